//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test -p sparsepad --test acceptance -- --nocapture` to see
//! the per-criterion lines on success.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::Rng;

use sparsepad::analysis::{
    eps2_diagonal, mi_bruteforce, pad_stats, solve_p_star, source_entropy, sr_linear,
    LeakageBudget, LeakageSide,
};
use sparsepad::cli::analyze_rows;
use sparsepad::gf::{rng_from_seed, FieldSpec};
use sparsepad::matrix::DenseMatrix;
use sparsepad::pad::{encode, sample_source, PadParams, SourceModel};
use sparsepad::scheme::{
    coverage_after_removing, cyclic_block_index, exhaustive_recovery_threshold, max_unique_blocks,
    threshold_formula, Cluster, SchemeConfig,
};
use sparsepad::sim::{run_simulation, sweep_sparsity_vs_time, JitterModel, TimingModel};

struct Criterion {
    label: &'static str,
    started: Instant,
    budget: Option<Duration>,
}

impl Criterion {
    fn start(label: &'static str, budget_secs: Option<u64>) -> Self {
        Criterion {
            label,
            started: Instant::now(),
            budget: budget_secs.map(Duration::from_secs),
        }
    }

    fn finish(self) {
        let elapsed = self.started.elapsed();
        if let Some(budget) = self.budget {
            assert!(
                elapsed <= budget,
                "[FAIL] {}: ran {elapsed:.2?}, budget {budget:.2?}",
                self.label
            );
        }
        println!("[PASS] {} ({elapsed:.2?})", self.label);
    }
}

fn random_grid_point(rng: &mut sparsepad::gf::RngState, q: u32) -> (f64, f64) {
    let q_inv = 1.0 / q as f64;
    let s = (q_inv + (1.0 - q_inv) * (1.0 - rng.gen::<f64>())).min(1.0); // s in (1/q, 1]
    let p = q_inv + (1.0 - q_inv) * rng.gen::<f64>(); // p in [1/q, 1)
    (s, p)
}

#[test]
fn criterion_1_padded_matrix_is_private_on_the_diagonal() {
    let c = Criterion::start(
        "criterion 1: eps1 and brute-force MI of A+R vanish when p_z0 = p_nz0 (200-point grid, 1e-10)",
        Some(10),
    );
    let mut rng = rng_from_seed(0x0B5 + 1);
    let qs = [2u32, 3, 7, 256];
    for i in 0..200 {
        let q = qs[i % qs.len()];
        let field = FieldSpec::new(q).unwrap();
        let (s, p) = random_grid_point(&mut rng, q);
        let params = PadParams::diagonal(p, field).unwrap();
        let stats = pad_stats(s, &params).unwrap();
        assert!(
            stats.eps1.abs() <= 1e-10,
            "closed-form eps1 = {} at q={q} s={s} p={p}",
            stats.eps1
        );
        let mi = mi_bruteforce(s, &params, LeakageSide::Padded).unwrap();
        assert!(mi.abs() <= 1e-10, "brute MI = {mi} at q={q} s={s} p={p}");
    }
    c.finish();
}

#[test]
fn criterion_2_closed_forms_match_oracles() {
    let c = Criterion::start(
        "criterion 2: eps2 matches brute-force MI (1e-10); S(R), S(A+R) match sampling (3 sigma at 1e6 entries)",
        Some(60),
    );
    // leakage closed forms vs the exact joint, including p_z0 != p_nz0
    let mut rng = rng_from_seed(2024);
    let qs = [2u32, 3, 7, 256];
    for i in 0..200 {
        let q = qs[i % qs.len()];
        let field = FieldSpec::new(q).unwrap();
        let (s, _) = random_grid_point(&mut rng, q);
        let params = PadParams::new(rng.gen(), rng.gen(), field).unwrap();
        let stats = pad_stats(s, &params).unwrap();
        let bf2 = mi_bruteforce(s, &params, LeakageSide::Pad).unwrap();
        assert!(
            (stats.eps2 - bf2).abs() <= 1e-10,
            "q={q} s={s} {params:?}: closed {} vs brute {bf2}",
            stats.eps2
        );
        let bf1 = mi_bruteforce(s, &params, LeakageSide::Padded).unwrap();
        assert!((stats.eps1 - bf1).abs() <= 1e-10);
    }

    // sparsity closed forms vs 10^6-entry samples on 20 parameter points
    let mut rng = rng_from_seed(4096);
    let sample_qs = [2u32, 7, 256, 11];
    for i in 0..20 {
        let q = sample_qs[i % sample_qs.len()];
        let field = FieldSpec::new(q).unwrap();
        let (s, _) = random_grid_point(&mut rng, q);
        let params = PadParams::new(rng.gen(), rng.gen(), field).unwrap();
        let model = SourceModel::new(s, field).unwrap();
        let a = sample_source(&model, 1000, 1000, &mut rng).unwrap();
        let (b1, b2) = encode(&a, &params, &mut rng).unwrap();
        let stats = pad_stats(s, &params).unwrap();
        for (emp, ana, what) in [
            (b2.measure_sparsity(), stats.s_padded, "S(A+R)"),
            (b1.measure_sparsity(), stats.s_pad, "S(R)"),
        ] {
            let sigma = (ana * (1.0 - ana) / 1e6).sqrt();
            assert!(
                (emp - ana).abs() <= 3.0 * sigma,
                "{what} q={q} s={s} {params:?}: empirical {emp} vs {ana} (sigma {sigma})"
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_3_trade_off_surface_reproduction() {
    let c = Criterion::start(
        "criterion 3: trade-off boundary rows exact (p* = 1/q at eps=0, p* = 1 at eps=1), interior monotone, solver vs grid scan 1e-3",
        Some(30),
    );
    let field = FieldSpec::gf256();
    let (n2, alpha, s) = (100usize, 1usize, 0.93f64);
    let zs: Vec<usize> = (1..=n2).collect();
    let eps_values = [0.0, 0.05, 0.25, 0.5, 0.75, 1.0];
    let rows = analyze_rows(field, n2, alpha, s, &zs, &eps_values).unwrap();
    assert_eq!(rows.len(), zs.len() * eps_values.len());

    // exact boundary rows
    for r in rows.iter().filter(|r| r.eps_rel == 0.0) {
        assert_eq!(r.p_star, 1.0 / 256.0, "z={}", r.z);
    }
    for r in rows.iter().filter(|r| r.eps_rel == 1.0) {
        assert_eq!(r.p_star, 1.0, "z={}", r.z);
    }

    // p* non-increasing in z for each interior eps
    for &eps in &[0.05, 0.25, 0.5, 0.75] {
        let curve: Vec<f64> = rows
            .iter()
            .filter(|r| r.eps_rel == eps)
            .map(|r| r.p_star)
            .collect();
        assert_eq!(curve.len(), n2);
        for w in curve.windows(2) {
            assert!(w[0] >= w[1], "eps={eps}: {} < {}", w[0], w[1]);
        }
    }

    // p* non-decreasing in eps for each z
    for z in &zs {
        let mut last = -1.0;
        for &eps in &eps_values {
            let r = rows
                .iter()
                .find(|r| r.z == *z && r.eps_rel == eps)
                .unwrap();
            assert!(r.p_star >= last, "z={z} eps={eps}");
            last = r.p_star;
        }
    }

    // bisection vs independent 1e-4 grid scan on sampled interior points
    for &eps in &[0.05, 0.25, 0.5, 0.75] {
        for &z in &[1usize, 10, 50, 100] {
            let budget = LeakageBudget::new(eps, z, n2, alpha).unwrap();
            let p = solve_p_star(s, field, &budget).unwrap();
            let bound = eps * source_entropy(s, 256) / budget.collusion_fraction();
            let p_min = 1.0 / 256.0;
            let mut best = p_min;
            let mut t = p_min;
            while t <= 1.0 {
                if eps2_diagonal(s, 256, t) <= bound {
                    best = t;
                }
                t += 1e-4;
            }
            assert!((p - best).abs() <= 1e-3, "eps={eps} z={z}: {p} vs {best}");
        }
    }
    c.finish();
}

#[test]
fn criterion_4_pad_sparsity_coefficient_at_reference_point() {
    let c = Criterion::start(
        "criterion 4: S(R) coefficient (sq-1)/(q-1) in [0.9295, 0.9300] and the linear form is exact",
        None,
    );
    let (s, q) = (0.93f64, 256u32);
    let coeff = (s * q as f64 - 1.0) / (q as f64 - 1.0);
    assert!(
        (0.9295..=0.9300).contains(&coeff),
        "coefficient {coeff} outside [0.9295, 0.9300]"
    );
    let offset = (1.0 - s) / (q as f64 - 1.0);
    let field = FieldSpec::gf256();
    for eps in [0.0, 0.05, 0.25, 0.5, 0.75, 1.0] {
        let budget = LeakageBudget::new(eps, 10, 100, 1).unwrap();
        let p_star = solve_p_star(s, field, &budget).unwrap();
        // bit-exact: S(R)(p*) is exactly the linear form
        assert_eq!(sr_linear(s, q, p_star), p_star * coeff + offset);
        // and consistent with the general closed form
        let stats = pad_stats(s, &PadParams::diagonal(p_star, field).unwrap()).unwrap();
        assert!((stats.s_pad - sr_linear(s, q, p_star)).abs() <= 1e-15);
    }
    c.finish();
}

#[test]
fn criterion_5_threshold_tightness_exhaustive() {
    let c = Criterion::start(
        "criterion 5: closed-form thresholds tight under exhaustive adversarial completion orders (N <= 6)",
        Some(60),
    );
    for n in 1..=6 {
        for alpha in 1..=n {
            let formula = threshold_formula(n, alpha);
            let oracle = exhaustive_recovery_threshold(n, alpha);
            assert_eq!(
                formula, oracle,
                "n={n} alpha={alpha}: formula {formula} vs oracle {oracle}"
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_6_full_straggler_tolerance_exhaustive() {
    let c = Criterion::start(
        "criterion 6: any alpha-1 removals keep coverage, some alpha removals break it (N2 <= 8, alpha <= 4)",
        None,
    );
    for n in 1..=8usize {
        for alpha in 1..=n.min(4) {
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize != alpha - 1 {
                    continue;
                }
                let removed: Vec<usize> = (0..n).filter(|w| mask & (1 << w) != 0).collect();
                assert!(
                    coverage_after_removing(n, alpha, &removed),
                    "n={n} alpha={alpha} removed {removed:?}"
                );
            }
            // the alpha workers holding block 0 are a breaking set
            let holders: Vec<usize> = (0..alpha).collect();
            assert!(
                !coverage_after_removing(n, alpha, &holders),
                "n={n} alpha={alpha}"
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_7_collusion_counting_exhaustive() {
    let c = Criterion::start(
        "criterion 7: max unique blocks over z-subsets equals min(alpha z, N2) (N2 <= 12)",
        None,
    );
    for n in 1..=12 {
        for alpha in 1..=n {
            for z in 1..=n {
                assert_eq!(
                    max_unique_blocks(n, alpha, z),
                    (alpha * z).min(n),
                    "n={n} alpha={alpha} z={z}"
                );
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_8_end_to_end_simulations() {
    let c = Criterion::start(
        "criterion 8: 100 random simulations recover y = Ax exactly with coverage-consistent reports",
        Some(120),
    );
    let mut rng = rng_from_seed(0xE2E);
    let qs = [7u32, 11, 256];
    for trial in 0..100 {
        let field = FieldSpec::new(qs[trial % qs.len()]).unwrap();
        let q_inv = 1.0 / field.q() as f64;
        let s = (0.8 + 0.19 * rng.gen::<f64>()).max(q_inv + 1e-3);
        let rows = 20 + rng.gen_range(0..60);
        let cols = 10 + rng.gen_range(0..50);
        let k = 1 + rng.gen_range(0..3);
        let n1 = 1 + rng.gen_range(0..6);
        let n2 = 1 + rng.gen_range(0..6);
        let alpha_u = 1 + rng.gen_range(0..n1);
        let alpha_t = 1 + rng.gen_range(0..n2);
        let cfg = SchemeConfig {
            untrusted_workers: n1,
            untrusted_layers: alpha_u,
            trusted_workers: n2,
            trusted_layers: alpha_t,
            collusion_bound: 1 + rng.gen_range(0..n2),
            field,
        };

        let model = SourceModel::new(s, field).unwrap();
        let a = sample_source(&model, rows, cols, &mut rng).unwrap();
        let mut x = DenseMatrix::zero(field, cols, k).unwrap();
        for r in 0..cols {
            for cix in 0..k {
                x.set(r, cix, field.sample_uniform(false, &mut rng));
            }
        }
        let p = q_inv + (1.0 - q_inv) * rng.gen::<f64>();
        let params = PadParams::diagonal(p, field).unwrap();

        // stragglers within tolerance: at most alpha-1 full per cluster
        let mut timing = TimingModel::new(0.25 + rng.gen::<f64>());
        timing.straggler_slowdown = 1.0 + 4.0 * rng.gen::<f64>();
        let pick = |rng: &mut sparsepad::gf::RngState, n: usize, at_most: usize| -> BTreeSet<usize> {
            let count = if at_most == 0 { 0 } else { rng.gen_range(0..=at_most) };
            let mut set = BTreeSet::new();
            while set.len() < count {
                set.insert(rng.gen_range(0..n));
            }
            set
        };
        timing.full_stragglers_untrusted = pick(&mut rng, n1, alpha_u - 1);
        timing.full_stragglers_trusted = pick(&mut rng, n2, alpha_t - 1);
        timing.partial_stragglers_untrusted = pick(&mut rng, n1, n1);
        timing.partial_stragglers_trusted = pick(&mut rng, n2, n2);
        if rng.gen::<f64>() < 0.5 {
            timing.jitter = Some(JitterModel {
                rate: 0.5 + rng.gen::<f64>(),
                shift: rng.gen::<f64>(),
            });
        }

        let mut sim_rng = rng_from_seed(rng.gen());
        let report = run_simulation(&a, &x, &params, &cfg, &timing, &mut sim_rng)
            .unwrap_or_else(|e| panic!("trial {trial} failed: {e}"));

        // exact recovery
        assert_eq!(report.recovered, a.matvec(&x).unwrap(), "trial {trial}");

        // replay the event log: coverage completion must match the report
        let mut covered = [vec![false; n1], vec![false; n2]];
        let mut remaining = [n1, n2];
        let mut seen = [0usize; 2];
        let mut cover = [None::<(f64, usize)>; 2];
        for ev in &report.events {
            let slot = usize::from(ev.cluster == Cluster::Trusted);
            let n = [n1, n2][slot];
            assert_eq!(ev.block, cyclic_block_index(n, ev.worker, ev.layer));
            seen[slot] += 1;
            if !covered[slot][ev.block] {
                covered[slot][ev.block] = true;
                remaining[slot] -= 1;
                if remaining[slot] == 0 {
                    cover[slot] = Some((ev.time, seen[slot]));
                }
            }
        }
        let (t_u, n_u) = cover[0].expect("untrusted covered");
        let (t_t, n_t) = cover[1].expect("trusted covered");
        assert_eq!(report.decode_time_untrusted, t_u);
        assert_eq!(report.decode_time_trusted, t_t);
        assert_eq!(report.decode_time, t_u.max(t_t));
        assert_eq!(report.responses_consumed_untrusted, n_u);
        assert_eq!(report.responses_consumed_trusted, n_t);
        assert!(n_u <= report.threshold_untrusted);
        assert!(n_t <= report.threshold_trusted);
        assert_eq!(report.events.last().unwrap().time, report.decode_time);
    }
    c.finish();
}

#[test]
fn criterion_9_sparsity_latency_trend() {
    let c = Criterion::start(
        "criterion 9: simulated decode time at eps_rel = 0 >= decode time at eps_rel = 1 (fixed seed)",
        None,
    );
    let field = FieldSpec::gf256();
    let mut rng = rng_from_seed(0x7EAD);
    let model = SourceModel::new(0.93, field).unwrap();
    let a = sample_source(&model, 200, 200, &mut rng).unwrap();
    let mut x = DenseMatrix::zero(field, 200, 1).unwrap();
    for r in 0..200 {
        x.set(r, 0, field.sample_uniform(false, &mut rng));
    }
    let cfg = SchemeConfig {
        untrusted_workers: 4,
        untrusted_layers: 2,
        trusted_workers: 4,
        trusted_layers: 2,
        collusion_bound: 2,
        field,
    };
    let timing = TimingModel::new(1.0);
    let budgets: Vec<LeakageBudget> = [0.0, 0.25, 0.5, 0.75, 1.0]
        .into_iter()
        .map(|e| LeakageBudget::new(e, 2, 4, 2).unwrap())
        .collect();
    let rows = sweep_sparsity_vs_time(&a, &x, &cfg, &budgets, &timing, &mut rng).unwrap();
    assert_eq!(rows.first().unwrap().eps_rel, 0.0);
    assert_eq!(rows.last().unwrap().eps_rel, 1.0);
    assert!(
        rows.first().unwrap().decode_time >= rows.last().unwrap().decode_time,
        "decode at eps=0 ({}) < decode at eps=1 ({})",
        rows.first().unwrap().decode_time,
        rows.last().unwrap().decode_time
    );
    // p* grows along the sweep
    for w in rows.windows(2) {
        assert!(w[0].p_star <= w[1].p_star);
    }
    c.finish();
}
