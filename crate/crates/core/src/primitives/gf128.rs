//! Arithmetic in GF(2)[X]/(X^128 + X^7 + X^2 + X + 1).
//!
//! Bit `i` of the `u128` is the coefficient of `X^i`; for Chaskey keys this
//! places 32-bit word 0 in the low bits.

use std::sync::OnceLock;

const POLY_LOW: u128 = 0x87;

pub fn mul2(x: u128) -> u128 {
    let carry = x >> 127;
    x << 1 ^ if carry == 1 { POLY_LOW } else { 0 }
}

pub fn div2(x: u128) -> u128 {
    if x & 1 == 1 {
        (x ^ POLY_LOW) >> 1 | 1 << 127
    } else {
        x >> 1
    }
}

pub fn mul3(x: u128) -> u128 {
    mul2(x) ^ x
}

/// Shift-and-add product.
pub fn mul(mut a: u128, mut b: u128) -> u128 {
    let mut acc = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        a = mul2(a);
        b >>= 1;
    }
    acc
}

/// `x^(2^128 − 2)`, the inverse of a non-zero element.
pub fn inverse(x: u128) -> u128 {
    assert_ne!(x, 0, "zero has no inverse");
    let mut result = 1;
    let mut base = x;
    // exponent 2^128 − 2: every bit set except bit 0
    for i in 0..128 {
        if i > 0 {
            result = mul(result, base);
        }
        base = mul(base, base);
    }
    result
}

pub fn div3(x: u128) -> u128 {
    static INV3: OnceLock<u128> = OnceLock::new();
    mul(x, *INV3.get_or_init(|| inverse(3)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Carry-less product followed by polynomial reduction, written
    /// independently of `mul`.
    fn clmul_reduce(a: u128, b: u128) -> u128 {
        let mut lo = 0u128;
        let mut hi = 0u128;
        for i in 0..128 {
            if b >> i & 1 == 1 {
                lo ^= a << i;
                if i > 0 {
                    hi ^= a >> (128 - i);
                }
            }
        }
        // fold X^(128+j) = X^j·(X^7 + X^2 + X + 1) twice
        for _ in 0..2 {
            let h = hi;
            hi = 0;
            for j in 0..128 {
                if h >> j & 1 == 1 {
                    for s in [0, 1, 2, 7] {
                        let p = j + s;
                        if p < 128 {
                            lo ^= 1 << p;
                        } else {
                            hi ^= 1 << (p - 128);
                        }
                    }
                }
            }
        }
        lo
    }

    #[test]
    fn low_degree() {
        assert_eq!(mul2(1), 2);
        assert_eq!(div3(3), 1);
        assert_eq!(mul2(1 << 127), 0x87);
        assert_eq!(clmul_reduce(2, 1 << 127), 0x87);
    }

    #[test]
    fn inverse_of_three() {
        assert_eq!(mul(3, inverse(3)), 1);
    }

    proptest! {
        #[test]
        fn mul_matches_clmul(a: u128, b: u128) {
            prop_assert_eq!(mul(a, b), clmul_reduce(a, b));
        }

        #[test]
        fn round_trips(x: u128) {
            prop_assert_eq!(div2(mul2(x)), x);
            prop_assert_eq!(div3(mul3(x)), x);
            prop_assert_eq!(mul3(x), clmul_reduce(x, 3));
        }
    }
}
