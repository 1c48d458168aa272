//! spongent-π[160] and spongent-π[176] as used by Elephant.
//!
//! State is `b/8` bytes; bit `i` is bit `i % 8` of byte `i / 8`, and S-box
//! `j` acts on bits `4j..4j+4`.

use super::sbox::{invert, SboxDecomposition, SPONGENT_SBOX};
use super::{finish_circuit, CipherCircuit, CipherId, Sections, SimonOpt};
use crate::circuit::{Circuit, Wire};

pub struct Params {
    pub bits: usize,
    pub rounds: usize,
    pub iv: u8,
}

pub fn params(bytes: usize) -> Params {
    match bytes {
        20 => Params {
            bits: 160,
            rounds: 80,
            iv: 0x75,
        },
        22 => Params {
            bits: 176,
            rounds: 90,
            iv: 0x45,
        },
        _ => panic!("unsupported spongent width {} bytes", bytes),
    }
}

fn params_of(cipher: CipherId) -> Params {
    params(cipher.n() / 8)
}

/// 7-bit round-counter LFSR.
pub fn lfsr_next(l: u8) -> u8 {
    (l << 1 | ((l >> 6 ^ l >> 5) & 1)) & 0x7f
}

/// Bit position that bit `j` moves to.
pub fn p_layer_index(j: usize, b: usize) -> usize {
    if j == b - 1 {
        j
    } else {
        j * b / 4 % (b - 1)
    }
}

fn get(s: &[u8], i: usize) -> bool {
    s[i / 8] >> (i % 8) & 1 == 1
}

fn p_layer(s: &mut [u8], inverse: bool) {
    let b = s.len() * 8;
    let mut out = vec![0u8; s.len()];
    for j in 0..b {
        let p = p_layer_index(j, b);
        let (from, to) = if inverse { (p, j) } else { (j, p) };
        if get(s, from) {
            out[to / 8] |= 1 << (to % 8);
        }
    }
    s.copy_from_slice(&out);
}

fn sbox_bytes(s: &mut [u8], t: &[u8; 16]) {
    for byte in s.iter_mut() {
        *byte = t[(*byte & 0xf) as usize] | t[(*byte >> 4) as usize] << 4;
    }
}

/// Round counters: the LFSR value added to byte 0 and its 8-bit reversal
/// added to the last byte.
pub fn counters(iv: u8, rounds: usize) -> Vec<(u8, u8)> {
    let mut l = iv;
    (0..rounds)
        .map(|_| {
            let c = (l, l.reverse_bits());
            l = lfsr_next(l);
            c
        })
        .collect()
}

pub fn permute(s: &mut [u8]) {
    let p = params(s.len());
    let last = s.len() - 1;
    for (lo, hi) in counters(p.iv, p.rounds) {
        s[0] ^= lo;
        s[last] ^= hi;
        sbox_bytes(s, &SPONGENT_SBOX);
        p_layer(s, false);
    }
}

pub fn permute_inverse(s: &mut [u8]) {
    let p = params(s.len());
    let last = s.len() - 1;
    let inv = invert(&SPONGENT_SBOX);
    for (lo, hi) in counters(p.iv, p.rounds).into_iter().rev() {
        p_layer(s, true);
        sbox_bytes(s, &inv);
        s[0] ^= lo;
        s[last] ^= hi;
    }
}

/// Output positions copied by the truncated circuit: the images, under the
/// last bit permutation, of the first `m` bits of the S-box layer.
pub fn output_bits(cipher: CipherId, m: usize) -> Vec<usize> {
    let b = cipher.n();
    (0..m).map(|j| p_layer_index(j, b)).collect()
}

pub fn build(cipher: CipherId, opt: SimonOpt) -> CipherCircuit {
    let p = params_of(cipher);
    let b = p.bits;
    let mut c = Circuit::with_width(b);
    let input: Vec<Wire> = (0..b).collect();
    let mut s = input.clone();
    let d = SboxDecomposition::spongent();
    let mut sec = Sections::default();
    let ctr = counters(p.iv, p.rounds);
    for (r, &(lo, hi)) in ctr.iter().enumerate() {
        sec.mark(&c, format!("round {}", r + 1));
        let last_round = r + 1 == p.rounds;
        let boxes = if last_round && opt.truncate_last_rounds {
            opt.m_out.div_ceil(4)
        } else {
            b / 4
        };
        for i in 0..8 {
            if lo >> i & 1 == 1 && i / 4 < boxes {
                c.x(s[i]);
            }
            if hi >> i & 1 == 1 && (b - 8 + i) / 4 < boxes {
                c.x(s[b - 8 + i]);
            }
        }
        for j in 0..boxes {
            let mut w = [s[4 * j], s[4 * j + 1], s[4 * j + 2], s[4 * j + 3]];
            d.apply(&mut c, &mut w);
            s[4 * j..4 * j + 4].copy_from_slice(&w);
        }
        if last_round && opt.truncate_last_rounds {
            break;
        }
        let old = s.clone();
        for j in 0..b {
            s[p_layer_index(j, b)] = old[j];
        }
    }
    // when truncated these are pre-permutation positions, which the output
    // selection maps through pLayer
    let out = s[..opt.m_out].to_vec();
    let sections = sec.finish(&c);
    let (circuit, output) = finish_circuit(c, 0, input.clone(), vec![], &[out]);
    let postmap = if opt.truncate_last_rounds {
        "y_j = state bit pLayer(j) for j < m_out".into()
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
    fn p_layer_is_a_permutation() {
        for b in [160, 176] {
            let mut seen = vec![false; b];
            for j in 0..b {
                seen[p_layer_index(j, b)] = true;
            }
            assert!(seen.iter().all(|&x| x));
            assert_eq!(p_layer_index(b - 1, b), b - 1);
            assert_eq!(p_layer_index(1, b), b / 4);
        }
    }

    #[test]
    fn lfsr_has_full_period() {
        let mut l = 0x75;
        let mut n = 0;
        loop {
            l = lfsr_next(l);
            n += 1;
            if l == 0x75 {
                break;
            }
        }
        assert_eq!(n, 127);
    }

    #[test]
    fn inverse_round_trips() {
        for len in [20, 22] {
            let mut s: Vec<u8> = (0..len as u8).map(|i| i.wrapping_mul(37) ^ 0x5a).collect();
            let orig = s.clone();
            permute(&mut s);
            assert_ne!(s, orig);
            permute_inverse(&mut s);
            assert_eq!(s, orig);
        }
    }
}
