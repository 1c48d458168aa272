//! Self-contained oracle suites: built circuits executed lane-parallel and
//! compared with classical references. Each suite is a list of named
//! checks so a front end can print PASS/FAIL lines and a failure list.

use crate::circuit::Circuit;
use crate::linalg::{self, LinearLayout};
use crate::primitives::sbox::{SboxDecomposition, PRINCE_SBOX, SPONGENT_SBOX};
use crate::primitives::{
    adder, build_circuit, chaskey, circuit_input, keccak, postmap, prince, reference, spongent,
    Bits, CipherId, SimonOpt,
};
use crate::revsim::{run, run_xor_out, State};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Failures kept per check; the count is always exact.
const MAX_LISTED: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Primitives,
    Linalg,
    Adders,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Primitives => "primitives",
            Suite::Linalg => "linalg",
            Suite::Adders => "adders",
        })
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "primitives" => Ok(Suite::Primitives),
            "linalg" => Ok(Suite::Linalg),
            "adders" => Ok(Suite::Adders),
            _ => Err(format!("unknown suite {s:?}")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub failed: usize,
    pub failures: Vec<String>,
}

impl Check {
    fn new(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            cases: 0,
            failed: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_LISTED {
                self.failures.push(what());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0 && self.cases > 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    let checks = match suite {
        Suite::Primitives => primitives_checks(seed),
        Suite::Linalg => linalg_checks(seed),
        Suite::Adders => adder_checks(seed),
    };
    SuiteReport {
        suite,
        seed,
        checks,
    }
}

fn random_bits(rng: &mut impl Rng, n: usize) -> Bits {
    (0..n).map(|_| rng.gen()).collect()
}

fn hex_u64(s: &str) -> u64 {
    u64::from_str_radix(s, 16).expect("fixture hex")
}

fn hex_words(s: &str) -> [u32; 4] {
    let b: Vec<u8> = (0..16)
        .map(|i| u8::from_str_radix(&s[2 * i..2 * i + 2], 16).expect("fixture hex"))
        .collect();
    std::array::from_fn(|i| u32::from_le_bytes(b[4 * i..4 * i + 4].try_into().unwrap()))
}

fn fixture(text: &str) -> Vec<serde_json::Value> {
    serde_json::from_str(text).expect("embedded fixture parses")
}

fn primitives_checks(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let mut c = Check::new("prince published vectors");
    for v in fixture(include_str!("../tests/fixtures/prince.json")) {
        let h = |k: &str| hex_u64(v[k].as_str().unwrap());
        let (x, k0, k1, y) = (h("input"), h("k0"), h("k1"), h("output"));
        c.record(prince::encrypt(x, k0, k1) == y, || {
            format!("encrypt {x:016x}")
        });
        c.record(prince::decrypt(y, k0, k1) == x, || {
            format!("decrypt {y:016x}")
        });
    }
    checks.push(c);

    // Even-Mansour over the permutation: π(v ⊕ K) ⊕ K
    let mut c = Check::new("chaskey-lts vectors");
    for v in fixture(include_str!("../tests/fixtures/chaskey_lts.json")) {
        let (k, m, want) = (
            hex_words(v["key"].as_str().unwrap()),
            hex_words(v["input"].as_str().unwrap()),
            hex_words(v["output"].as_str().unwrap()),
        );
        let rounds = v["rounds"].as_u64().unwrap() as usize;
        let y = chaskey::permute(std::array::from_fn(|i| m[i] ^ k[i]), rounds);
        let got: [u32; 4] = std::array::from_fn(|i| y[i] ^ k[i]);
        c.record(got == want, || format!("input {:?}", v["input"]));
    }
    checks.push(c);

    let mut c = Check::new("reference inverse round-trip");
    for _ in 0..64 {
        let mut a = [0u8; 25];
        rng.fill_bytes(&mut a);
        let orig = a;
        keccak::permute(&mut a);
        keccak::permute_inverse(&mut a);
        c.record(a == orig, || "keccak-f[200]".into());
        for bytes in [20, 22] {
            let mut s = vec![0u8; bytes];
            rng.fill_bytes(&mut s);
            let orig = s.clone();
            spongent::permute(&mut s);
            spongent::permute_inverse(&mut s);
            c.record(s == orig, || format!("spongent-{}", 8 * bytes));
        }
    }
    checks.push(c);

    let mut c = Check::new("s-box decompositions");
    let prince_sbox = SboxDecomposition::prince();
    let spongent_sbox = SboxDecomposition::spongent();
    c.record(prince_sbox.toffolis() == 6, || {
        format!("prince toffolis {}", prince_sbox.toffolis())
    });
    c.record(spongent_sbox.toffolis() == 4, || {
        format!("spongent toffolis {}", spongent_sbox.toffolis())
    });
    for x in 0..16 {
        c.record(prince_sbox.eval(x) == PRINCE_SBOX[x] as usize, || {
            format!("prince s-box at {x}")
        });
        c.record(spongent_sbox.eval(x) == SPONGENT_SBOX[x] as usize, || {
            format!("spongent s-box at {x}")
        });
    }
    checks.push(c);

    let mut round_trip = Check::new("adjoint restores inputs");
    for cipher in CipherId::ALL {
        let mut c = Check::new(format!("{cipher} circuit vs reference"));
        for (opt, batches) in [(SimonOpt::attack(), 16), (SimonOpt::baseline(cipher), 2)] {
            cipher_batches(cipher, opt, batches, &mut rng, &mut c, &mut round_trip);
        }
        checks.push(c);
    }
    checks.push(round_trip);
    checks
}

/// `batches` × 64 random inputs through one cipher circuit.
fn cipher_batches(
    cipher: CipherId,
    opt: SimonOpt,
    batches: usize,
    rng: &mut ChaCha8Rng,
    check: &mut Check,
    round_trip: &mut Check,
) {
    let cc = build_circuit(cipher, opt);
    for _ in 0..batches {
        let mut s = State::for_circuit(&cc.circuit);
        let mut want = Vec::new();
        let mut inputs = Vec::new();
        for lane in 0..64 {
            let x = random_bits(rng, cipher.n());
            let k = random_bits(rng, cipher.inner_key_bits());
            s.write(&cc.input, lane, &circuit_input(cipher, opt, &x));
            if !k.is_empty() {
                s.write(&cc.key, lane, &k);
            }
            let r = reference(cipher, &k, &x).expect("sizes match");
            want.push(postmap(cipher, opt, &k, &r));
            inputs.push(x);
        }
        let out = run_xor_out(&cc.circuit, &mut s, "y");
        round_trip.record(out.is_ok(), || {
            format!("{cipher} {opt:?}: {:?}", out.as_ref().err())
        });
        let Ok(out) = out else { continue };
        for (lane, w) in want.iter().enumerate() {
            let got: Bits = out.iter().map(|v| v >> lane & 1 == 1).collect();
            check.record(&got == w, || {
                let x = crate::revsim::bits_to_hex(&inputs[lane]);
                format!("{cipher} {opt:?} input {x}")
            });
        }
    }
}

fn run_lanes(c: &Circuit, l: &LinearLayout, sets: &[Vec<u64>]) -> Option<State> {
    let mut s = State::for_circuit(c);
    for (lane, rows) in sets.iter().enumerate() {
        for (j, &r) in rows.iter().enumerate() {
            s.write_u128(&l.x[j], lane, r as u128);
        }
    }
    run(c, &mut s).ok().map(|()| s)
}

/// Span by closure, independent of the elimination code.
fn span(rows: &[u64]) -> Vec<u64> {
    let mut sp = vec![0u64];
    for &r in rows {
        if !sp.contains(&r) {
            let ext: Vec<u64> = sp.iter().map(|v| v ^ r).collect();
            sp.extend(ext);
            sp.sort_unstable();
        }
    }
    sp
}

struct LinalgChecks {
    rank: Check,
    span: Check,
    dual: Check,
    feasible: Check,
}

fn check_lanes(m: usize, n: usize, sets: &[Vec<u64>], k: &mut LinalgChecks) {
    let (mut c, l) = linalg::build_triangular_basis(m, n);
    let flag = linalg::append_rank_check(&mut c, &l);
    let out = linalg::append_orthogonal_vector(&mut c, &l);
    let Some(s) = run_lanes(&c, &l, sets) else {
        k.rank
            .record(false, || format!("m={m} n={n}: AND precondition violated"));
        return;
    };
    for (lane, rows) in sets.iter().enumerate() {
        let sp = span(rows);
        let r = sp.len().trailing_zeros() as usize;
        let beta: Vec<u64> = (0..n)
            .map(|i| {
                let b = (s.read_u128(&l.b_row(i), lane) as u64) << (i + 1);
                if s.get(l.av[i], lane) {
                    0
                } else {
                    1 << i | b
                }
            })
            .collect();
        let deficient = s.get(flag, lane);
        let circuit_rank = beta.iter().filter(|&&b| b != 0).count();
        k.rank
            .record(circuit_rank == r && deficient == (r < n), || {
                format!("rows {rows:?} n={n}: rank {circuit_rank} vs {r}")
            });
        k.span
            .record(span(&beta) == sp, || format!("rows {rows:?} n={n}"));
        let o = s.read_u128(&out, lane) as u64;
        let orth = rows.iter().all(|&v| (o & v).count_ones() % 2 == 0);
        k.dual.record(orth && ((o != 0) == (r < n)), || {
            format!("rows {rows:?} n={n}: dual {o:#b}")
        });
    }
}

fn linalg_checks(seed: u64) -> Vec<Check> {
    let mut k = LinalgChecks {
        rank: Check::new("rank oracle agreement"),
        span: Check::new("span agreement"),
        dual: Check::new("dual orthogonality"),
        feasible: Check::new("feasibility agreement"),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < 200 {
        let m = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=5);
        let lanes = 64.min(200 - done);
        let sets: Vec<Vec<u64>> = (0..lanes)
            .map(|_| (0..m).map(|_| rng.gen_range(0..1u64 << n)).collect())
            .collect();
        check_lanes(m, n, &sets, &mut k);
        done += lanes;
    }
    for m in 1..=3 {
        let all: Vec<Vec<u64>> = (0..1usize << (3 * m))
            .map(|code| (0..m).map(|j| (code >> (3 * j) & 7) as u64).collect())
            .collect();
        for chunk in all.chunks(64) {
            check_lanes(m, 3, chunk, &mut k);
        }
    }
    // feasibility of [A | b] against exhaustive search over x
    for _ in 0..200 {
        let m = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=4);
        let rows: Vec<u64> = (0..m).map(|_| rng.gen_range(0..1u64 << (n + 1))).collect();
        let (c, l, f) = linalg::build_linear_solver_feasibility(m, n);
        let want = (0..1u64 << n).any(|x| {
            rows.iter()
                .all(|&r| (r & ((1 << n) - 1) & x).count_ones() % 2 == (r >> n) as u32)
        });
        let got = run_lanes(&c, &l, &[rows.clone()]).map(|s| s.get(f, 0));
        k.feasible
            .record(got == Some(want), || format!("rows {rows:?} n={n}"));
    }
    vec![k.rank, k.span, k.dual, k.feasible]
}

fn adder_checks(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = Check::new("adder sums mod 2^bits");
    let mut restored = Check::new("adder keeps its addend");
    for bits in 1..=64usize {
        let c = adder::build_adder(bits);
        let a = c.input("a").expect("declared").wires.clone();
        let t = c.output("t").expect("declared").wires.clone();
        let mask = if bits == 64 {
            u64::MAX
        } else {
            (1 << bits) - 1
        };
        let exhaustive = bits <= 3;
        let batches = if exhaustive { 1 } else { 4 };
        for batch in 0..batches {
            let pairs: Vec<(u64, u64)> = (0..64)
                .map(|lane| {
                    if exhaustive {
                        let code = (lane + 64 * batch) as u64;
                        (code & mask, code >> bits & mask)
                    } else {
                        (rng.gen::<u64>() & mask, rng.gen::<u64>() & mask)
                    }
                })
                .collect();
            let mut s = State::for_circuit(&c);
            for (lane, &(x, y)) in pairs.iter().enumerate() {
                s.write_u128(&a, lane, x as u128);
                s.write_u128(&t, lane, y as u128);
            }
            if let Err(e) = run(&c, &mut s) {
                sum.record(false, || format!("{bits} bits: {e}"));
                continue;
            }
            for (lane, &(x, y)) in pairs.iter().enumerate() {
                let got = s.read_u128(&t, lane) as u64;
                sum.record(got == x.wrapping_add(y) & mask, || {
                    format!("{bits} bits: {x:#x} + {y:#x} gave {got:#x}")
                });
                restored.record(s.read_u128(&a, lane) as u64 == x, || {
                    format!("{bits} bits: addend {x:#x}")
                });
            }
        }
    }
    vec![sum, restored]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linalg_and_adder_suites_pass() {
        assert!(run_suite(Suite::Linalg, 1).passed());
        assert!(run_suite(Suite::Adders, 1).passed());
    }

    #[test]
    fn failures_are_counted_beyond_the_listed_ones() {
        let mut c = Check::new("x");
        for i in 0..40 {
            c.record(i % 2 == 0, || format!("{i}"));
        }
        assert_eq!((c.cases, c.failed, c.failures.len()), (40, 20, MAX_LISTED));
        assert!(!c.passed());
    }
}
