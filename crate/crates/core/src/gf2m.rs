//! Arithmetic over GF(2^m) for 3 <= m <= 7.
//!
//! Every field uses a fixed minimal-weight primitive polynomial so that
//! codewords are bit-exact across runs and implementations:
//!
//! | m | polynomial     | mask   |
//! |---|----------------|--------|
//! | 3 | x^3 + x + 1    | 0x0b   |
//! | 4 | x^4 + x + 1    | 0x13   |
//! | 5 | x^5 + x^2 + 1  | 0x25   |
//! | 6 | x^6 + x + 1    | 0x43   |
//! | 7 | x^7 + x^3 + 1  | 0x89   |
//!
//! Elements are stored as `u8` in `0..2^m`. The generator is `alpha = 2`.

use crate::error::{Error, Result};

pub const MIN_M: u32 = 3;
pub const MAX_M: u32 = 7;

/// A field element. Always `< 2^m` for the owning field.
pub type Element = u8;

/// Defining polynomial (including the x^m term) for each supported `m`.
pub fn primitive_poly(m: u32) -> Option<u32> {
    match m {
        3 => Some(0b1011),
        4 => Some(0b1_0011),
        5 => Some(0b10_0101),
        6 => Some(0b100_0011),
        7 => Some(0b1000_1001),
        _ => None,
    }
}

/// Log/antilog tables for one field.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldContext {
    m: u32,
    poly: u32,
    // exp is doubled so that exp[log a + log b] needs no reduction.
    exp: Vec<Element>,
    log: Vec<u8>,
}

impl std::fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldContext")
            .field("m", &self.m)
            .field("poly", &format_args!("{:#x}", self.poly))
            .finish()
    }
}

impl FieldContext {
    pub fn new(m: u32) -> Result<Self> {
        let poly = primitive_poly(m).ok_or_else(|| {
            Error::param(format!("field width m={m} outside {MIN_M}..={MAX_M}"))
        })?;
        let size = 1usize << m;
        let order = size - 1;
        let mut exp = vec![0u8; 2 * order];
        let mut log = vec![0u8; size];
        let mut x: u32 = 1;
        for i in 0..order {
            // Hitting 1 again before i == order means the polynomial is not primitive.
            if i > 0 && x == 1 {
                return Err(Error::param(format!("polynomial {poly:#x} is not primitive")));
            }
            exp[i] = x as u8;
            log[x as usize] = i as u8;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            return Err(Error::param(format!("polynomial {poly:#x} is not primitive")));
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(Self { m, poly, exp, log })
    }

    /// Symbol width in bits.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn primitive_poly(&self) -> u32 {
        self.poly
    }

    /// Number of elements, `2^m`.
    pub fn size(&self) -> usize {
        1 << self.m
    }

    /// Order of the multiplicative group, `2^m - 1`.
    pub fn order(&self) -> usize {
        self.size() - 1
    }

    pub fn contains(&self, a: Element) -> bool {
        (a as usize) < self.size()
    }

    #[inline]
    pub fn add(&self, a: Element, b: Element) -> Element {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
    }

    pub fn inv(&self, a: Element) -> Result<Element> {
        if a == 0 {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(self.exp[(self.order() - self.log[a as usize] as usize) % self.order()])
    }

    /// `a / b`; panics on `b == 0` (internal callers guarantee it).
    #[inline]
    pub(crate) fn div(&self, a: Element, b: Element) -> Element {
        assert!(b != 0, "division by zero in GF(2^{})", self.m);
        if a == 0 {
            return 0;
        }
        let order = self.order();
        self.exp[(self.log[a as usize] as usize + order - self.log[b as usize] as usize) % order]
    }

    /// `a^e`, with `0^0 = 1`.
    pub fn pow(&self, a: Element, e: u64) -> Element {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = self.order() as u64;
        let l = (self.log[a as usize] as u64 * (e % order)) % order;
        self.exp[l as usize]
    }

    /// `alpha^i` for any integer `i` (negative exponents allowed).
    #[inline]
    pub fn alpha_pow(&self, i: i64) -> Element {
        let order = self.order() as i64;
        self.exp[i.rem_euclid(order) as usize]
    }

    /// Discrete log base alpha; `None` for zero.
    pub fn log(&self, a: Element) -> Option<usize> {
        (a != 0).then(|| self.log[a as usize] as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Schoolbook carry-less multiply then reduce; shares nothing with the tables.
    fn clmul_reduce(a: u32, b: u32, m: u32, poly: u32) -> u32 {
        let mut prod = 0u32;
        for i in 0..m {
            if b & (1 << i) != 0 {
                prod ^= a << i;
            }
        }
        for bit in (m..2 * m).rev() {
            if prod & (1 << bit) != 0 {
                prod ^= poly << (bit - m);
            }
        }
        prod
    }

    #[test]
    fn field_sizes() {
        assert_eq!(FieldContext::new(3).unwrap().order(), 7);
        assert_eq!(FieldContext::new(7).unwrap().order(), 127);
        assert!(matches!(FieldContext::new(8), Err(Error::Parameter(_))));
        assert!(matches!(FieldContext::new(2), Err(Error::Parameter(_))));
    }

    #[test]
    fn gf8_known_product() {
        let f = FieldContext::new(3).unwrap();
        assert_eq!(clmul_reduce(3, 3, 3, 0b1011), 5);
        assert_eq!(f.mul(3, 3), 5);
    }

    #[test]
    fn inverse_of_zero_is_domain_error() {
        let f = FieldContext::new(4).unwrap();
        assert!(matches!(f.inv(0), Err(Error::Domain(_))));
    }

    #[test]
    fn exhaustive_field_axioms() {
        for m in MIN_M..=MAX_M {
            let f = FieldContext::new(m).unwrap();
            let q = f.size() as u32;
            for a in 0..q {
                let a8 = a as u8;
                assert_eq!(f.add(a8, a8), 0);
                if a != 0 {
                    assert_eq!(f.exp[f.log[a as usize] as usize], a8);
                    assert_eq!(f.mul(a8, f.inv(a8).unwrap()), 1);
                }
                for b in 0..q {
                    let b8 = b as u8;
                    let p = f.mul(a8, b8);
                    assert!(f.contains(p));
                    assert_eq!(p as u32, clmul_reduce(a, b, m, f.primitive_poly()));
                    assert_eq!(p, f.mul(b8, a8));
                    if b != 0 {
                        assert_eq!(f.div(p, b8), a8);
                    }
                }
            }
            // distributivity on a stride of triples keeps this under a second
            for a in 0..q {
                for b in (0..q).step_by(3) {
                    for c in (0..q).step_by(5) {
                        let (a, b, c) = (a as u8, b as u8, c as u8);
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn generator_enumerates_every_nonzero_element_once() {
        for m in MIN_M..=MAX_M {
            let f = FieldContext::new(m).unwrap();
            let mut seen = vec![false; f.size()];
            for e in 1..=f.order() as u64 {
                let x = f.pow(2, e) as usize;
                assert!(x != 0 && !seen[x], "m={m} repeats {x}");
                seen[x] = true;
            }
            assert_eq!(f.pow(2, f.order() as u64), 1);
            assert_eq!(f.alpha_pow(-1), f.inv(2).unwrap());
        }
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let f = FieldContext::new(5).unwrap();
        for a in 0..32u8 {
            let mut acc = 1u8;
            for e in 0..70u64 {
                assert_eq!(f.pow(a, e), acc, "a={a} e={e}");
                acc = f.mul(acc, a);
            }
        }
    }
}
