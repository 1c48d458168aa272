use offsim::linalg::*;
use offsim::revsim::{run, State};
use offsim::{Circuit, GateKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Runs up to 64 row sets through one circuit, one per lane.
fn run_lanes(c: &Circuit, l: &LinearLayout, sets: &[Vec<u64>]) -> State {
    let mut s = State::for_circuit(c);
    for (lane, rows) in sets.iter().enumerate() {
        for (j, &r) in rows.iter().enumerate() {
            s.write_u128(&l.x[j], lane, r as u128);
        }
    }
    run(c, &mut s).expect("AND preconditions hold");
    s
}

fn span(rows: &[u64]) -> Vec<u64> {
    let mut sp = vec![0u64];
    for &r in rows {
        if !sp.contains(&r) {
            let ext: Vec<u64> = sp.iter().map(|v| v ^ r).collect();
            sp.extend(ext);
            sp.sort_unstable();
            sp.dedup();
        }
    }
    sp
}

fn check_instance(m: usize, n: usize, sets: &[Vec<u64>]) {
    let (mut c, l) = build_triangular_basis(m, n);
    let flag = append_rank_check(&mut c, &l);
    let out = append_orthogonal_vector(&mut c, &l);
    let s = run_lanes(&c, &l, sets);
    for (lane, rows) in sets.iter().enumerate() {
        let mirror = mirror_registers(rows, n);
        let tri = classical_triangular_basis(rows, n);
        for j in 0..m {
            assert_eq!(s.read_u128(&l.x[j], lane) as u64, mirror.x[j]);
            assert_eq!(s.get(l.used[j], lane), mirror.used[j]);
        }
        let mut beta = Vec::new();
        for i in 0..n {
            let av = s.get(l.av[i], lane);
            assert_eq!(av, mirror.av[i]);
            let b = (s.read_u128(&l.b_row(i), lane) as u64) << (i + 1);
            assert_eq!(b, mirror.b[i]);
            let row = if av { 0 } else { 1 << i | b };
            assert_eq!(row, tri.rows[i]);
            if !av {
                assert_eq!(row.trailing_zeros() as usize, i);
            }
            beta.push(row);
        }
        // span and rank against an independent enumeration
        assert_eq!(span(&beta), span(rows));
        assert_eq!(tri.rank, rank(rows));
        assert_eq!(1usize << tri.rank, span(rows).len());
        assert_eq!(s.get(flag, lane), tri.rank < n);
        let o = s.read_u128(&out, lane) as u64;
        assert_eq!(o, orthogonal(&tri));
        for &r in rows {
            assert_eq!((o & r).count_ones() % 2, 0, "dual not orthogonal");
        }
        if tri.rank < n {
            assert_ne!(o, 0);
        } else {
            assert_eq!(o, 0);
        }
    }
}

#[test]
fn random_instances_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    while done < 200 {
        let m = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=5);
        let lanes = 64.min(200 - done);
        let sets: Vec<Vec<u64>> = (0..lanes)
            .map(|_| (0..m).map(|_| rng.gen_range(0..1u64 << n)).collect())
            .collect();
        check_instance(m, n, &sets);
        done += lanes;
    }
}

#[test]
fn exhaustive_three_bit_row_sets() {
    for m in 1..=3 {
        let total = 1usize << (3 * m);
        let all: Vec<Vec<u64>> = (0..total)
            .map(|code| (0..m).map(|j| (code >> (3 * j) & 7) as u64).collect())
            .collect();
        for chunk in all.chunks(64) {
            check_instance(m, 3, chunk);
        }
    }
}

#[test]
fn feasibility_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let m = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=4);
        let rows: Vec<u64> = (0..m).map(|_| rng.gen_range(0..1u64 << (n + 1))).collect();
        let (c, l, f) = build_linear_solver_feasibility(m, n);
        let s = run_lanes(&c, &l, &[rows.clone()]);
        assert_eq!(s.get(f, 0), solvable(&rows, n), "rows {rows:?}");
    }
}

#[test]
fn anti_diagonal_order_is_free() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (m, n) = (6, 5);
    let sets: Vec<Vec<u64>> = (0..64)
        .map(|_| (0..m).map(|_| rng.gen_range(0..1u64 << n)).collect())
        .collect();
    let (c0, l0) = build_triangular_basis(m, n);
    let (c1, l1) = build_triangular_basis_permuted(m, n, |d, cells| {
        cells.reverse();
        if d % 2 == 0 && cells.len() > 2 {
            cells.swap(0, 1);
        }
    });
    let s0 = run_lanes(&c0, &l0, &sets);
    let s1 = run_lanes(&c1, &l1, &sets);
    assert_eq!(s0, s1);
}

#[test]
fn basis_block_uncomputes_via_adjoint() {
    let (c, l) = build_triangular_basis(5, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sets: Vec<Vec<u64>> = (0..64)
        .map(|_| (0..5).map(|_| rng.gen_range(0..16)).collect())
        .collect();
    let mut s = run_lanes(&c, &l, &sets);
    run(&c.adjoint(), &mut s).unwrap();
    for (lane, rows) in sets.iter().enumerate() {
        for (j, &r) in rows.iter().enumerate() {
            assert_eq!(s.read_u128(&l.x[j], lane) as u64, r);
        }
    }
}

#[test]
fn periodic_samples_flag_rank_deficient() {
    // vectors orthogonal to s = 0b1011 never reach rank 4
    let s_secret = 0b1011u64;
    let perp: Vec<u64> = (0..16)
        .filter(|v: &u64| (v & s_secret).count_ones() % 2 == 0)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sets: Vec<Vec<u64>> = (0..64)
        .map(|_| (0..8).map(|_| perp[rng.gen_range(0..perp.len())]).collect())
        .collect();
    let (c, l, f) = build_rank_check(8, 4);
    let s = run_lanes(&c, &l, &sets);
    assert!((0..64).all(|lane| s.get(f, lane)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn toffoli_count_identity(m in 1usize..=32, n in 1usize..=32) {
        let (c, l) = build_triangular_basis(m, n);
        prop_assert_eq!(c.gate_count(GateKind::Toffoli), m * n * n + m * n);
        prop_assert_eq!(l.ancillas(), m + n * (n + 1) / 2);
        prop_assert_eq!(l.fanout_pool(), n * (n - 1));
        prop_assert_eq!(c.peak_width(), m * n + m + n * (n + 1) / 2 + n * (n - 1));
    }

    #[test]
    fn rank_agrees(rows in proptest::collection::vec(0u64..256, 0..12)) {
        prop_assert_eq!(classical_triangular_basis(&rows, 8).rank, rank(&rows));
    }
}

#[test]
fn rank_check_closed_forms_match_built_circuits() {
    for m in 1..=12u64 {
        for n in 1..=10u64 {
            let (c, _, _) = build_rank_check(m as usize, n as usize);
            let counts: Vec<u64> = GateKind::ALL
                .iter()
                .map(|&k| c.gate_count(k) as u64)
                .collect();
            assert_eq!(counts, rank_check_counts(m, n), "m={m} n={n}");
            assert_eq!(c.peak_width() as u64, rank_check_width(m, n), "m={m} n={n}");
        }
    }
}
