use backscatter::gf2m::FieldContext;
use backscatter::rscodec::{Decoded, ReedSolomon, RsCode};
use proptest::prelude::*;

/// Schoolbook polynomial remainder, coefficients highest degree first.
fn long_division_parity(f: &FieldContext, info: &[u8], nk: usize) -> Vec<u8> {
    // g(x) = (x + a^1)(x + a^2)...(x + a^nk), built one factor at a time
    let mut g = vec![1u8];
    for i in 1..=nk {
        let root = f.alpha_pow(i as i64);
        let mut next = vec![0u8; g.len() + 1];
        for (j, &c) in g.iter().enumerate() {
            next[j] ^= c;
            next[j + 1] ^= f.mul(c, root);
        }
        g = next;
    }
    let mut work: Vec<u8> = info.iter().copied().chain(std::iter::repeat_n(0, nk)).collect();
    for i in 0..info.len() {
        let lead = work[i];
        if lead != 0 {
            for (j, &c) in g.iter().enumerate() {
                work[i + j] ^= f.mul(lead, c);
            }
        }
    }
    work[info.len()..].to_vec()
}

#[test]
fn encoder_matches_long_division() {
    let code = RsCode::new(7, 3).unwrap();
    let rs = ReedSolomon::new(code).unwrap();
    let f = FieldContext::new(3).unwrap();
    let cw = rs.encode(&[1, 2, 3]).unwrap();
    assert_eq!(&cw[..3], &[1, 2, 3]);
    assert_eq!(&cw[3..], &long_division_parity(&f, &[1, 2, 3], 4)[..]);

    for code in [RsCode::new(15, 7).unwrap(), RsCode::new(63, 45).unwrap(), RsCode::new(127, 95).unwrap()] {
        let rs = ReedSolomon::new(code).unwrap();
        let f = FieldContext::new(code.m()).unwrap();
        let info: Vec<u8> = (0..code.k()).map(|i| ((i * 37 + 11) % (code.n() + 1)) as u8).collect();
        let cw = rs.encode(&info).unwrap();
        assert_eq!(&cw[code.k()..], &long_division_parity(&f, &info, code.parity())[..], "{code}");
    }
}

#[test]
fn every_admissible_code_corrects_t_errors_and_2t_erasures() {
    for code in RsCode::admissible() {
        let rs = ReedSolomon::new(code).unwrap();
        let n = code.n();
        let info: Vec<u8> = (0..code.k()).map(|i| ((i * 7 + 3) % (n + 1)) as u8).collect();
        let cw = rs.encode(&info).unwrap();

        let mut r = cw.clone();
        for e in 0..code.t() {
            r[(e * 5) % n] ^= 1 + (e % n) as u8;
        }
        assert_eq!(rs.decode(&r, &[]).unwrap().info(), Some(&info[..]), "{code} errors");

        let erasures: Vec<usize> = (0..code.parity()).map(|i| (i * 3 + 1) % n).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let mut r = cw.clone();
        for &p in &erasures {
            r[p] = 0;
        }
        assert_eq!(rs.decode(&r, &erasures).unwrap().info(), Some(&info[..]), "{code} erasures");
    }
}

#[test]
fn bit_bursts_touch_few_symbols() {
    // an L-bit burst spans at most ceil(L/m) + 1 symbols
    for m in 3..=7u32 {
        let n = (1usize << m) - 1;
        let total_bits = n * m as usize;
        for len in 1..=3 * m as usize {
            for start in 0..=total_bits - len {
                let first = start / m as usize;
                let last = (start + len - 1) / m as usize;
                let span = last - first + 1;
                assert!(span <= len.div_ceil(m as usize) + 1);
            }
        }
    }
}

#[test]
fn mixed_errors_and_erasures_at_capacity() {
    let code = RsCode::new(31, 15).unwrap(); // t = 8
    let rs = ReedSolomon::new(code).unwrap();
    let info: Vec<u8> = (0..15).collect();
    let cw = rs.encode(&info).unwrap();
    // 2e + f = 16
    for e in 0..=8 {
        let f = 16 - 2 * e;
        let mut r = cw.clone();
        for s in &mut r[..e] {
            *s ^= 0x11;
        }
        let erasures: Vec<usize> = (e..e + f).collect();
        for &p in &erasures {
            r[p] ^= 0x0f;
        }
        match rs.decode(&r, &erasures).unwrap() {
            Decoded::Ok { info: got, .. } => assert_eq!(got, info, "e={e} f={f}"),
            Decoded::Failure => panic!("e={e} f={f} should decode"),
        }
    }
}

proptest! {
    #[test]
    fn round_trip_with_correctable_damage(
        ki in 0usize..32,
        seed in any::<u64>(),
    ) {
        let code = RsCode::admissible().nth(ki * 119 / 32).unwrap();
        let rs = ReedSolomon::new(code).unwrap();
        let n = code.n();
        let mut x = seed | 1;
        let mut next = move || { x ^= x << 13; x ^= x >> 7; x ^= x << 17; x };
        let info: Vec<u8> = (0..code.k()).map(|_| (next() % (n as u64 + 1)) as u8).collect();
        let cw = rs.encode(&info).unwrap();
        prop_assert!(rs.is_codeword(&cw));

        let f = (next() as usize) % (code.parity() + 1);
        let e = (code.parity() - f) / 2;
        let mut pos: Vec<usize> = (0..n).collect();
        for i in 0..n {
            let j = i + (next() as usize) % (n - i);
            pos.swap(i, j);
        }
        let mut r = cw.clone();
        for &p in &pos[..e] {
            r[p] ^= 1 + (next() % n as u64) as u8;
        }
        let erasures = pos[e..e + f].to_vec();
        for &p in &erasures {
            r[p] = (next() % (n as u64 + 1)) as u8;
        }
        let got = rs.decode(&r, &erasures).unwrap();
        prop_assert_eq!(got.info(), Some(&info[..]));
    }

    #[test]
    fn encoder_is_linear(a in proptest::collection::vec(0u8..16, 7), b in proptest::collection::vec(0u8..16, 7)) {
        let rs = ReedSolomon::new(RsCode::new(15, 7).unwrap()).unwrap();
        let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let ca = rs.encode(&a).unwrap();
        let cb = rs.encode(&b).unwrap();
        let cs: Vec<u8> = ca.iter().zip(&cb).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(rs.encode(&sum).unwrap(), cs);
    }
}
