//! Elephant mask schedule, one-block encryption and master-key recovery.
//!
//! The expanded key is `K' = P(K ‖ 0)`; masks are
//! `mask(K', i, j) = φ_b^j(φ_a^i(K'))` with `φ_b = φ_a ⊕ id`.

use super::{keccak, spongent, CipherId, PrimitiveError};

pub const KEY_BYTES: usize = 16;

/// Block size in bytes for the Elephant instance built on `cipher`.
pub fn block_bytes(cipher: CipherId) -> usize {
    match cipher {
        CipherId::Spongent160 | CipherId::Spongent176 | CipherId::Keccak200 => cipher.n() / 8,
        _ => panic!("{cipher} is not an Elephant permutation"),
    }
}

fn permutation(cipher: CipherId, s: &mut [u8]) {
    match cipher {
        CipherId::Keccak200 => {
            let a: &mut [u8; 25] = s.try_into().expect("25-byte state");
            keccak::permute(a);
        }
        _ => spongent::permute(s),
    }
}

fn permutation_inverse(cipher: CipherId, s: &mut [u8]) {
    match cipher {
        CipherId::Keccak200 => {
            let a: &mut [u8; 25] = s.try_into().expect("25-byte state");
            keccak::permute_inverse(a);
        }
        _ => spongent::permute_inverse(s),
    }
}

/// The byte-oriented LFSR `φ_a`: shift left by one byte, feed back a
/// combination of three bytes.
pub fn phi_a(cipher: CipherId, x: &[u8]) -> Vec<u8> {
    let n = x.len();
    let fb = match cipher {
        CipherId::Spongent160 => x[0].rotate_left(3) ^ x[3] << 7 ^ x[13] >> 7,
        CipherId::Spongent176 => x[0].rotate_left(1) ^ x[3] << 7 ^ x[19] >> 7,
        CipherId::Keccak200 => x[0].rotate_left(1) ^ x[2].rotate_left(1) ^ x[13] << 1,
        _ => panic!("{cipher} is not an Elephant permutation"),
    };
    let mut out = x[1..].to_vec();
    out.push(fb);
    debug_assert_eq!(out.len(), n);
    out
}

pub fn phi_b(cipher: CipherId, x: &[u8]) -> Vec<u8> {
    phi_a(cipher, x).iter().zip(x).map(|(a, b)| a ^ b).collect()
}

pub fn expand_key(cipher: CipherId, key: &[u8; KEY_BYTES]) -> Vec<u8> {
    let mut s = vec![0u8; block_bytes(cipher)];
    s[..KEY_BYTES].copy_from_slice(key);
    permutation(cipher, &mut s);
    s
}

pub fn mask(cipher: CipherId, expanded: &[u8], i: usize, j: usize) -> Vec<u8> {
    let mut m = expanded.to_vec();
    for _ in 0..i {
        m = phi_a(cipher, &m);
    }
    for _ in 0..j {
        m = phi_b(cipher, &m);
    }
    m
}

/// Inverts `P` on the expanded key; fails if the padding is not zero.
pub fn recover_key(cipher: CipherId, expanded: &[u8]) -> Result<[u8; KEY_BYTES], PrimitiveError> {
    let n = block_bytes(cipher);
    if expanded.len() != n {
        return Err(PrimitiveError::Size {
            what: "expanded key",
            expected: 8 * n,
            got: 8 * expanded.len(),
        });
    }
    let mut s = expanded.to_vec();
    permutation_inverse(cipher, &mut s);
    if s[KEY_BYTES..].iter().any(|&b| b != 0) {
        return Err(PrimitiveError::Padding);
    }
    Ok(s[..KEY_BYTES].try_into().expect("16 bytes"))
}

/// Keystream-XOR of block `i` (0-based):
/// `C = M ⊕ P(N ⊕ mask(K', i, 0)) ⊕ mask(K', i, 0)`, nonce zero-padded.
pub fn encrypt_block(
    cipher: CipherId,
    expanded: &[u8],
    nonce: &[u8],
    i: usize,
    m: &[u8],
) -> Vec<u8> {
    let n = block_bytes(cipher);
    assert!(nonce.len() <= n && m.len() <= n);
    let mk = mask(cipher, expanded, i, 0);
    let mut s = mk.clone();
    for (a, b) in s.iter_mut().zip(nonce) {
        *a ^= b;
    }
    permutation(cipher, &mut s);
    m.iter()
        .zip(s.iter().zip(&mk))
        .map(|(x, (p, k))| x ^ p ^ k)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIPHERS: [CipherId; 3] = [
        CipherId::Spongent160,
        CipherId::Spongent176,
        CipherId::Keccak200,
    ];

    #[test]
    fn zero_iterations_is_identity() {
        for c in CIPHERS {
            let k: Vec<u8> = (0..block_bytes(c) as u8).collect();
            assert_eq!(mask(c, &k, 0, 0), k);
        }
    }

    #[test]
    fn phi_a_is_invertible_on_small_sample() {
        // distinct inputs differing in the dropped byte give distinct outputs
        for c in CIPHERS {
            let n = block_bytes(c);
            let mut seen = std::collections::HashSet::new();
            for b in 0..=255u8 {
                let mut x = vec![0u8; n];
                x[0] = b;
                assert!(seen.insert(phi_a(c, &x)));
            }
        }
    }

    #[test]
    fn recover_rejects_wrong_expanded_key() {
        for c in CIPHERS {
            let k = [7u8; KEY_BYTES];
            let mut e = expand_key(c, &k);
            assert_eq!(recover_key(c, &e), Ok(k));
            e[0] ^= 1;
            assert_eq!(recover_key(c, &e), Err(PrimitiveError::Padding));
        }
    }
}
