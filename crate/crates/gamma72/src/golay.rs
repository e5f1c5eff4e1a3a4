//! The extended binary Golay code [24, 12, 8].
//!
//! Systematic construction from the cyclic (23, 12, 7) code with generator
//! polynomial g(x) = x^11 + x^9 + x^7 + x^6 + x^5 + x + 1 (bitmask 0xAE3),
//! extended by an overall parity bit in position 23. The weight distribution
//! (1, 759, 2576, 759, 1 at weights 0, 8, 12, 16, 24) is unit-tested and the
//! Leech construction depends on it.

/// Generator polynomial of the (23,12,7) Golay code; bit i = coefficient of x^i.
const GOLAY23_GEN: u32 = 0xAE3;

/// Remainder of division by g(x) over GF(2).
fn gf2_mod(mut v: u32, g: u32) -> u32 {
    let gd = 31 - g.leading_zeros();
    while v >> gd != 0 {
        let shift = (31 - v.leading_zeros()) - gd;
        v ^= g << shift;
    }
    v
}

/// Encode a 12-bit message to a 24-bit extended codeword.
pub fn encode(msg: u16) -> u32 {
    debug_assert!(msg < 4096);
    let shifted = (msg as u32) << 11;
    let c23 = shifted | gf2_mod(shifted, GOLAY23_GEN);
    let parity = c23.count_ones() & 1;
    c23 | (parity << 23)
}

/// All 4096 codewords, indexed by message.
pub fn codewords() -> Vec<u32> {
    (0u16..4096).map(encode).collect()
}

/// Twelve generator codewords (images of the unit messages).
pub fn generators() -> Vec<u32> {
    (0..12).map(|i| encode(1 << i)).collect()
}

pub fn weight_distribution() -> [usize; 25] {
    let mut dist = [0usize; 25];
    for cw in codewords() {
        dist[cw.count_ones() as usize] += 1;
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_distribution_is_golay() {
        let d = weight_distribution();
        assert_eq!(d[0], 1);
        assert_eq!(d[8], 759);
        assert_eq!(d[12], 2576);
        assert_eq!(d[16], 759);
        assert_eq!(d[24], 1);
        assert_eq!(d.iter().sum::<usize>(), 4096);
    }

    #[test]
    fn code_is_linear_and_self_dual() {
        let words = codewords();
        // spot-check closure under addition on a few pairs
        for i in [1usize, 77, 1033] {
            for j in [2usize, 940, 4001] {
                let sum = words[i] ^ words[j];
                assert!(words.binary_search(&sum).is_ok() || words.contains(&sum));
            }
        }
        // self-duality: all pairwise even intersections among generators
        for a in generators() {
            for b in generators() {
                assert_eq!((a & b).count_ones() % 2, 0);
            }
        }
    }
}
