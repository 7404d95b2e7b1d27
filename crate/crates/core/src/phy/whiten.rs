//! PN9 data whitening (x^9 + x^5 + 1, all-ones seed).
//!
//! On-off keying has no way to tell a long run of zeros from a missing
//! carrier, and frames end in zero padding. XOR-ing the line bits with a
//! PN9 sequence breaks those runs up; applying it twice is the identity.

pub fn pn9(len: usize) -> impl Iterator<Item = u8> {
    let mut state: u16 = 0x1FF;
    (0..len).map(move |_| {
        let out = (state & 1) as u8;
        let fb = (state ^ (state >> 5)) & 1;
        state = (state >> 1) | (fb << 8);
        out
    })
}

pub fn whiten(bits: &[u8]) -> Vec<u8> {
    bits.iter().zip(pn9(bits.len())).map(|(b, p)| b ^ p).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_is_511_and_balanced() {
        let seq: Vec<u8> = pn9(1022).collect();
        assert_eq!(seq[..511], seq[511..]);
        assert_eq!(seq[..511].iter().filter(|&&b| b == 1).count(), 256);
        // no run of zeros longer than 8 in a maximal-length 9-stage sequence
        let longest = seq.split(|&b| b == 1).map(<[u8]>::len).max().unwrap();
        assert_eq!(longest, 8);
    }

    #[test]
    fn involution() {
        let bits: Vec<u8> = (0..300).map(|i| (i % 3 == 0) as u8).collect();
        assert_eq!(whiten(&whiten(&bits)), bits);
    }
}
