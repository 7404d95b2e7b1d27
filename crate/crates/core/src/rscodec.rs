//! Systematic Reed-Solomon codes over GF(2^m).
//!
//! Codewords are symbol slices `c[0..n]` where `c[i]` is the coefficient of
//! `x^(n-1-i)`; the information symbols occupy `c[0..k]`. Parity is the
//! remainder of `x^(n-k) u(x)` modulo the narrow-sense generator
//! `g(x) = (x - alpha)(x - alpha^2)...(x - alpha^(n-k))`.
//!
//! The decoder handles errors and erasures together: erasure positions are
//! folded into Forney syndromes, Berlekamp-Massey finds the error locator,
//! Chien search locates the roots and Forney's formula gives the values.
//! It succeeds whenever `2e + f <= n - k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2m::{Element, FieldContext, MAX_M, MIN_M};

/// Parameters of an admissible RS(n, k) code.
///
/// Admissible means `n = 2^m - 1` with `3 <= m <= 7`, and `k` odd with
/// `1 <= k <= n - 2`, so that `n - k` is even and `t = (n - k) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RsCodeRepr", into = "RsCodeRepr")]
pub struct RsCode {
    n: usize,
    k: usize,
    m: u32,
}

#[derive(Serialize, Deserialize)]
struct RsCodeRepr {
    n: usize,
    k: usize,
    m: u32,
    t: usize,
}

impl TryFrom<RsCodeRepr> for RsCode {
    type Error = Error;
    fn try_from(r: RsCodeRepr) -> Result<Self> {
        RsCode::new(r.n, r.k)
    }
}

impl From<RsCode> for RsCodeRepr {
    fn from(c: RsCode) -> Self {
        RsCodeRepr { n: c.n, k: c.k, m: c.m, t: c.t() }
    }
}

impl RsCode {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let m = (MIN_M..=MAX_M)
            .find(|&m| (1usize << m) - 1 == n)
            .ok_or_else(|| Error::param(format!("n={n} is not 2^m-1 for m in {MIN_M}..={MAX_M}")))?;
        if k < 1 || k + 2 > n {
            return Err(Error::param(format!("k={k} outside 1..={} for n={n}", n - 2)));
        }
        if k.is_multiple_of(2) {
            return Err(Error::param(format!("k={k} must be odd so that n-k is even")));
        }
        Ok(Self { n, k, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Symbol width in bits.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Number of parity symbols, `n - k`.
    pub fn parity(&self) -> usize {
        self.n - self.k
    }

    /// Correctable symbol errors, `floor((n - k) / 2)`.
    pub fn t(&self) -> usize {
        (self.n - self.k) / 2
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Every admissible code, ordered by `n` ascending then `k` descending.
    pub fn admissible() -> impl Iterator<Item = RsCode> {
        (MIN_M..=MAX_M).flat_map(|m| {
            let n = (1usize << m) - 1;
            (1..=n - 2).rev().step_by(2).map(move |k| RsCode { n, k, m })
        })
    }
}

impl std::fmt::Display for RsCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RS({},{})", self.n, self.k)
    }
}

/// Result of decoding one received word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    /// A codeword was found; `info` holds its first `k` symbols and
    /// `corrected` the number of symbol positions that were changed.
    Ok { info: Vec<Element>, corrected: usize },
    /// The received word is farther than the decoding radius from any
    /// codeword the decoder can certify.
    Failure,
}

impl Decoded {
    pub fn info(&self) -> Option<&[Element]> {
        match self {
            Decoded::Ok { info, .. } => Some(info),
            Decoded::Failure => None,
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Decoded::Failure)
    }
}

/// Encoder/decoder for one code. Immutable and `Sync`.
#[derive(Debug, Clone)]
pub struct ReedSolomon {
    code: RsCode,
    field: FieldContext,
    /// Generator polynomial, highest degree first, monic.
    generator: Vec<Element>,
}

impl ReedSolomon {
    pub fn new(code: RsCode) -> Result<Self> {
        let field = FieldContext::new(code.m())?;
        let mut generator = vec![1u8];
        for i in 1..=code.parity() {
            // multiply by (x + alpha^i)
            let root = field.alpha_pow(i as i64);
            let mut next = vec![0u8; generator.len() + 1];
            for (j, &g) in generator.iter().enumerate() {
                next[j] ^= g;
                next[j + 1] ^= field.mul(g, root);
            }
            generator = next;
        }
        Ok(Self { code, field, generator })
    }

    pub fn code(&self) -> RsCode {
        self.code
    }

    pub fn field(&self) -> &FieldContext {
        &self.field
    }

    /// Generator coefficients, highest degree first.
    pub fn generator(&self) -> &[Element] {
        &self.generator
    }

    pub fn encode(&self, info: &[Element]) -> Result<Vec<Element>> {
        let RsCode { n, k, .. } = self.code;
        if info.len() != k {
            return Err(Error::param(format!("expected {k} info symbols, got {}", info.len())));
        }
        if let Some(&bad) = info.iter().find(|&&s| !self.field.contains(s)) {
            return Err(Error::param(format!("symbol {bad} does not fit in {} bits", self.code.m())));
        }
        let nk = n - k;
        let mut rem = vec![0u8; nk];
        for &u in info {
            let fb = u ^ rem[0];
            for j in 0..nk - 1 {
                rem[j] = rem[j + 1] ^ self.field.mul(fb, self.generator[j + 1]);
            }
            rem[nk - 1] = self.field.mul(fb, self.generator[nk]);
        }
        let mut cw = Vec::with_capacity(n);
        cw.extend_from_slice(info);
        cw.extend_from_slice(&rem);
        Ok(cw)
    }

    /// Syndromes `S_j = r(alpha^(j+1))` for `j` in `0..n-k`.
    pub fn syndromes(&self, word: &[Element]) -> Vec<Element> {
        (1..=self.code.parity())
            .map(|j| {
                let x = self.field.alpha_pow(j as i64);
                word.iter().fold(0u8, |acc, &c| self.field.mul(acc, x) ^ c)
            })
            .collect()
    }

    pub fn is_codeword(&self, word: &[Element]) -> bool {
        word.len() == self.code.n() && self.syndromes(word).iter().all(|&s| s == 0)
    }

    /// Decode `received`, treating the listed positions as erasures.
    ///
    /// Malformed input (wrong length, symbol out of range, duplicate or
    /// out-of-range erasure) is an error; an uncorrectable word is
    /// `Ok(Decoded::Failure)`.
    pub fn decode(&self, received: &[Element], erasures: &[usize]) -> Result<Decoded> {
        let RsCode { n, k, .. } = self.code;
        let nk = n - k;
        if received.len() != n {
            return Err(Error::param(format!("expected {n} received symbols, got {}", received.len())));
        }
        if let Some(&bad) = received.iter().find(|&&s| !self.field.contains(s)) {
            return Err(Error::param(format!("symbol {bad} does not fit in {} bits", self.code.m())));
        }
        let mut seen = vec![false; n];
        for &p in erasures {
            if p >= n {
                return Err(Error::param(format!("erasure position {p} >= n={n}")));
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::param(format!("duplicate erasure position {p}")));
            }
        }
        let f = erasures.len();
        if f > nk {
            return Ok(Decoded::Failure);
        }

        let synd = self.syndromes(received);
        if synd.iter().all(|&s| s == 0) {
            return Ok(Decoded::Ok { info: received[..k].to_vec(), corrected: 0 });
        }

        let gf = &self.field;
        let locator_of = |pos: usize| gf.alpha_pow((n - 1 - pos) as i64);

        // Erasure locator Gamma(x) = prod (1 + X_j x), lowest degree first.
        let mut gamma = vec![1u8];
        for &p in erasures {
            gamma = poly_mul(gf, &gamma, &[1, locator_of(p)]);
        }

        // Forney syndromes: coefficients f..nk of Gamma(x) S(x) mod x^nk.
        let xi = poly_mul_trunc(gf, &gamma, &synd, nk);
        let (sigma, errors) = berlekamp_massey(gf, &xi[f..]);
        if 2 * errors + f > nk {
            return Ok(Decoded::Failure);
        }

        let psi = poly_mul(gf, &sigma, &gamma);
        let degree = errors + f;

        // Chien search over the n valid positions.
        let mut positions = Vec::with_capacity(degree);
        for pos in 0..n {
            let x_inv = gf.alpha_pow(-((n - 1 - pos) as i64));
            if poly_eval(gf, &psi, x_inv) == 0 {
                positions.push(pos);
            }
        }
        if positions.len() != degree || trimmed_degree(&psi) != degree {
            return Ok(Decoded::Failure);
        }

        // Forney: e = Omega(X^-1) / Psi'(X^-1) for narrow-sense (b = 1) codes.
        let omega = poly_mul_trunc(gf, &synd, &psi, nk);
        let dpsi = formal_derivative(&psi);
        let mut word = received.to_vec();
        let mut corrected = 0;
        for &pos in &positions {
            let x_inv = gf.alpha_pow(-((n - 1 - pos) as i64));
            let denom = poly_eval(gf, &dpsi, x_inv);
            if denom == 0 {
                return Ok(Decoded::Failure);
            }
            let magnitude = gf.div(poly_eval(gf, &omega, x_inv), denom);
            if magnitude != 0 {
                word[pos] ^= magnitude;
                corrected += 1;
            }
        }

        if !self.syndromes(&word).iter().all(|&s| s == 0) {
            return Ok(Decoded::Failure);
        }
        word.truncate(k);
        Ok(Decoded::Ok { info: word, corrected })
    }
}

// Polynomials below are stored lowest degree first.

fn poly_mul(gf: &FieldContext, a: &[Element], b: &[Element]) -> Vec<Element> {
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] ^= gf.mul(x, y);
        }
    }
    out
}

fn poly_mul_trunc(gf: &FieldContext, a: &[Element], b: &[Element], len: usize) -> Vec<Element> {
    let mut out = vec![0u8; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] ^= gf.mul(x, y);
        }
    }
    out
}

fn poly_eval(gf: &FieldContext, p: &[Element], x: Element) -> Element {
    p.iter().rev().fold(0u8, |acc, &c| gf.mul(acc, x) ^ c)
}

fn formal_derivative(p: &[Element]) -> Vec<Element> {
    // characteristic 2: only odd-degree terms survive
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| if i % 2 == 1 { c } else { 0 })
        .collect()
}

fn trimmed_degree(p: &[Element]) -> usize {
    p.iter().rposition(|&c| c != 0).unwrap_or(0)
}

/// Shortest LFSR generating `seq`. Returns the connection polynomial
/// (length `L + 1`) and `L`.
fn berlekamp_massey(gf: &FieldContext, seq: &[Element]) -> (Vec<Element>, usize) {
    let mut c = vec![1u8];
    let mut b = vec![1u8];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut last_d = 1u8;
    for i in 0..seq.len() {
        let mut d = seq[i];
        for j in 1..=len.min(c.len() - 1) {
            d ^= gf.mul(c[j], seq[i - j]);
        }
        if d == 0 {
            shift += 1;
            continue;
        }
        let coef = gf.div(d, last_d);
        let prev = c.clone();
        if c.len() < b.len() + shift {
            c.resize(b.len() + shift, 0);
        }
        for (j, &bj) in b.iter().enumerate() {
            c[j + shift] ^= gf.mul(coef, bj);
        }
        if 2 * len <= i {
            len = i + 1 - len;
            b = prev;
            last_d = d;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    c.resize(len + 1, 0);
    (c, len)
}
