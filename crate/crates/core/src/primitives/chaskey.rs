//! Chaskey permutation, one-block MAC, and its in-place circuit.

use super::adder::add_into;
use super::{
    bits_from_words32, finish_circuit, words32_from_bits, Bits, CipherCircuit, CipherId, Sections,
    SimonOpt,
};
use crate::circuit::{Circuit, Wire};

/// Output bits (of the postmapped word, see [`postmap`]) copied by the
/// truncated circuit.
pub const OUTPUT_BITS: std::ops::Range<usize> = 5..16;

pub fn round(v: &mut [u32; 4]) {
    v[0] = v[0].wrapping_add(v[1]);
    v[1] = v[1].rotate_left(5) ^ v[0];
    v[0] = v[0].rotate_left(16);
    v[2] = v[2].wrapping_add(v[3]);
    v[3] = v[3].rotate_left(8) ^ v[2];
    v[0] = v[0].wrapping_add(v[3]);
    v[3] = v[3].rotate_left(13) ^ v[0];
    v[2] = v[2].wrapping_add(v[1]);
    v[1] = v[1].rotate_left(7) ^ v[2];
    v[2] = v[2].rotate_left(16);
}

pub fn permute(mut v: [u32; 4], rounds: usize) -> [u32; 4] {
    for _ in 0..rounds {
        round(&mut v);
    }
    v
}

fn to_words(x: u128) -> [u32; 4] {
    [
        x as u32,
        (x >> 32) as u32,
        (x >> 64) as u32,
        (x >> 96) as u32,
    ]
}

fn from_words(v: [u32; 4]) -> u128 {
    v.iter().rev().fold(0, |a, &w| a << 32 | w as u128)
}

/// `π(m ⊕ K ⊕ K1) ⊕ K1` truncated to `t` bits, with `K1 = 2K`: the tag of a
/// one-block (complete) message.
pub fn tag_one_block(key: u128, m: u128, rounds: usize, t: usize) -> u128 {
    let k1 = super::gf128::mul2(key);
    let out = from_words(permute(to_words(m ^ key ^ k1), rounds)) ^ k1;
    if t >= 128 {
        out
    } else {
        out & ((1u128 << t) - 1)
    }
}

/// General mode for complete blocks only (enough for the attacks): CBC-like
/// absorption with `K1` folded into the last block.
pub fn tag(key: u128, blocks: &[u128], rounds: usize, t: usize) -> u128 {
    assert!(!blocks.is_empty());
    let k1 = super::gf128::mul2(key);
    let mut v = key;
    for (i, &b) in blocks.iter().enumerate() {
        v ^= b;
        if i + 1 == blocks.len() {
            v ^= k1;
        }
        v = from_words(permute(to_words(v), rounds));
    }
    v ^= k1;
    if t >= 128 {
        v
    } else {
        v & ((1u128 << t) - 1)
    }
}

/// The fixed-input part of round 1 (`g`): words 2 and 3 only.
pub fn precompute(input: &[bool]) -> Bits {
    let mut v = words32_from_bits(input);
    v[2] = v[2].wrapping_add(v[3]);
    v[3] = v[3].rotate_left(8) ^ v[2];
    bits_from_words32(&v)
}

/// Linear map from the final state to the word `r1` of the last round
/// (`v1` after its XOR with `v0`), recovered from words 1 and 2 only.
pub fn postmap(output: &[bool]) -> Bits {
    let v = words32_from_bits(output);
    let r1 = (v[1] ^ v[2].rotate_right(16)).rotate_right(7);
    bits_from_words32(&[r1])
}

fn xor_bits(c: &mut Circuit, src: &[Wire], dst: &[Wire], mask: u32) {
    for i in 0..32 {
        if mask >> i & 1 == 1 {
            c.cnot(src[i], dst[i]);
        }
    }
}

/// Widths and masks of one round: adder widths for the four additions and
/// XOR masks for the four XORs, in program order.
struct RoundShape {
    add: [usize; 4],
    xor: [u32; 4],
    skip_right_half: bool,
}

const FULL: RoundShape = RoundShape {
    add: [32; 4],
    xor: [u32::MAX; 4],
    skip_right_half: false,
};

fn apply_round(c: &mut Circuit, v: &mut [Vec<Wire>; 4], s: &RoundShape) {
    let [v0, v1, v2, v3] = v;
    add_into(c, &v1[..s.add[0]], &v0[..s.add[0]]);
    v1.rotate_right(5);
    xor_bits(c, v0, v1, s.xor[0]);
    v0.rotate_right(16);
    if !s.skip_right_half {
        add_into(c, &v3[..s.add[1]], &v2[..s.add[1]]);
        v3.rotate_right(8);
        xor_bits(c, v2, v3, s.xor[1]);
    }
    add_into(c, &v3[..s.add[2]], &v0[..s.add[2]]);
    v3.rotate_right(13);
    xor_bits(c, v0, v3, s.xor[2]);
    add_into(c, &v1[..s.add[3]], &v2[..s.add[3]]);
    v1.rotate_right(7);
    xor_bits(c, v2, v1, s.xor[3]);
    v2.rotate_right(16);
}

pub fn build(cipher: CipherId, opt: SimonOpt) -> CipherCircuit {
    let rounds = cipher.rounds();
    let mut c = Circuit::with_width(128);
    let input: Vec<Wire> = (0..128).collect();
    let mut v: [Vec<Wire>; 4] = std::array::from_fn(|i| input[32 * i..32 * i + 32].to_vec());
    let mut sec = Sections::default();
    let trunc = opt.truncate_last_rounds;
    let full_rounds = if trunc { rounds - 2 } else { rounds };
    for r in 0..full_rounds {
        sec.mark(&c, format!("round {}", r + 1));
        let skip = r == 0 && opt.fixed_input_precompute;
        apply_round(
            &mut c,
            &mut v,
            &RoundShape {
                skip_right_half: skip,
                ..FULL
            },
        );
    }
    let out = if trunc {
        assert!(
            opt.m_out <= OUTPUT_BITS.len(),
            "truncated Chaskey copies at most 11 bits"
        );
        // second-to-last: only the low 16 bits of v0 and v1 are consumed
        sec.mark(&c, format!("round {}", rounds - 1));
        let low = 0xffffu32;
        let shape = RoundShape {
            add: [32, 16, 16, 16],
            xor: [low | 0xfe00_0000, low, 0, low],
            skip_right_half: rounds == 2 && opt.fixed_input_precompute,
        };
        apply_round(&mut c, &mut v, &shape);
        // last: v0 += v1 on 16 bits; the XOR into v1 happens on copy-out
        sec.mark(&c, format!("round {}", rounds));
        let [v0, v1, _, _] = &mut v;
        add_into(&mut c, &v1[..16], &v0[..16]);
        v1.rotate_right(5);
        let sel: Vec<usize> = OUTPUT_BITS.take(opt.m_out).collect();
        vec![
            sel.iter().map(|&i| v[0][i]).collect(),
            sel.iter().map(|&i| v[1][i]).collect(),
        ]
    } else {
        let flat: Vec<Wire> = v.iter().flatten().copied().collect();
        vec![flat[..opt.m_out].to_vec()]
    };
    let sections = sec.finish(&c);
    let (circuit, output) = finish_circuit(c, 0, input.clone(), vec![], &out);
    let postmap = if trunc {
        "y = bits 5..15 of ((v1 ^ (v2 >>> 16)) >>> 7)".into()
    } else {
        "y = state bits 0..m_out".into()
    };
    CipherCircuit {
        cipher,
        opt,
        circuit,
        input,
        key: vec![],
        output,
        sections,
        postmap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_block_tag_is_mode_on_one_block() {
        let key = 0x0123_4567_89ab_cdef_fedc_ba98_7654_3210u128;
        let m = 0x1111_2222_3333_4444_5555_6666_7777_8888u128;
        for t in [64, 96, 128] {
            assert_eq!(tag_one_block(key, m, 8, t), tag(key, &[m], 8, t));
        }
    }

    #[test]
    fn precompute_is_round_one_right_half() {
        let x = bits_from_words32(&[1, 2, 0xdead_beef, 0x1234_5678]);
        let v = words32_from_bits(&precompute(&x));
        assert_eq!(v[0..2], [1, 2]);
        assert_eq!(v[2], 0xdead_beefu32.wrapping_add(0x1234_5678));
    }
}
