//! Deterministic event-driven simulation of the chief/two-cluster run.
//!
//! Worker timelines are independent: each worker computes its layers in
//! order, one task costing `base_cost_per_nnz * nnz(task) * k` time units
//! (scaled by the slowdown factor for partial stragglers, plus optional
//! shifted-exponential jitter). Full stragglers never respond. The chief
//! checks decodability after every arrival, so the report captures the exact
//! first-decodable instant. The two clusters never exchange anything; their
//! only meeting point is the final subtraction at the chief.

use std::collections::BTreeSet;

use rand::Rng;

use crate::analysis::{solve_p_star, LeakageBudget};
use crate::error::{Error, Result};
use crate::gf::{fork_base, stream_rng, RngState};
use crate::matrix::{DenseMatrix, SparseMatrix};
use crate::pad::{encode, PadParams};
use crate::scheme::{
    build_plan, decode, recovery_thresholds, Cluster, DecodeOutcome, Response, ResponseSet,
    SchemeConfig,
};

/// Shifted-exponential per-task delay: `shift + Exp(rate)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterModel {
    pub rate: f64,
    pub shift: f64,
}

/// Cost model and straggler injection. Worker sets are 0-indexed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimingModel {
    /// Time units per nonzero per output column.
    pub base_cost_per_nnz: f64,
    /// Multiplicative slowdown applied to partial stragglers (>= 1).
    pub straggler_slowdown: f64,
    pub partial_stragglers_untrusted: BTreeSet<usize>,
    pub partial_stragglers_trusted: BTreeSet<usize>,
    /// Workers that never respond. Completion is guaranteed only while each
    /// cluster loses fewer than its layer count.
    pub full_stragglers_untrusted: BTreeSet<usize>,
    pub full_stragglers_trusted: BTreeSet<usize>,
    pub jitter: Option<JitterModel>,
}

impl TimingModel {
    pub fn new(base_cost_per_nnz: f64) -> Self {
        TimingModel {
            base_cost_per_nnz,
            straggler_slowdown: 1.0,
            ..TimingModel::default()
        }
    }

    pub fn validate(&self, cfg: &SchemeConfig) -> Result<()> {
        if !(self.base_cost_per_nnz > 0.0) {
            return Err(Error::invalid("base_cost_per_nnz must be positive"));
        }
        if !(self.straggler_slowdown >= 1.0) {
            return Err(Error::invalid("straggler_slowdown must be >= 1"));
        }
        if let Some(j) = &self.jitter {
            if !(j.rate > 0.0) || !(j.shift >= 0.0) {
                return Err(Error::invalid("jitter needs rate > 0 and shift >= 0"));
            }
        }
        let in_range = |set: &BTreeSet<usize>, n: usize, what: &str| -> Result<()> {
            match set.iter().max() {
                Some(&w) if w >= n => Err(Error::invalid(format!(
                    "{what} worker {} outside 1..={n}",
                    w + 1
                ))),
                _ => Ok(()),
            }
        };
        in_range(
            &self.partial_stragglers_untrusted,
            cfg.untrusted_workers,
            "partial straggler (untrusted)",
        )?;
        in_range(
            &self.partial_stragglers_trusted,
            cfg.trusted_workers,
            "partial straggler (trusted)",
        )?;
        in_range(
            &self.full_stragglers_untrusted,
            cfg.untrusted_workers,
            "full straggler (untrusted)",
        )?;
        in_range(
            &self.full_stragglers_trusted,
            cfg.trusted_workers,
            "full straggler (trusted)",
        )
    }
}

/// One received response in simulated-time order.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseEvent {
    pub cluster: Cluster,
    pub worker: usize,
    pub layer: usize,
    pub block: usize,
    pub time: f64,
}

/// Analytic (from the closed forms at the source's empirical sparsity) and
/// measured sparsity of the two encoded matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskSparsityStats {
    pub analytic_padded: f64,
    pub analytic_pad: f64,
    pub empirical_padded: f64,
    pub empirical_pad: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    /// Every response received up to and including the decode instant.
    pub events: Vec<ResponseEvent>,
    /// Instant each cluster's blocks were first fully covered.
    pub decode_time_untrusted: f64,
    pub decode_time_trusted: f64,
    /// First instant the full result is decodable (max of the two).
    pub decode_time: f64,
    /// Responses needed from each cluster for its own coverage; never
    /// exceeds the matching threshold on success.
    pub responses_consumed_untrusted: usize,
    pub responses_consumed_trusted: usize,
    pub threshold_untrusted: usize,
    pub threshold_trusted: usize,
    /// y = A x, truncated to the input's row count.
    pub recovered: DenseMatrix,
    pub sparsity: TaskSparsityStats,
}

struct RawEvent {
    time: f64,
    cluster: Cluster,
    worker: usize,
    layer: usize,
    block: usize,
}

/// Encode, distribute, simulate, and decode one full run.
pub fn run_simulation(
    a: &SparseMatrix,
    x: &DenseMatrix,
    params: &PadParams,
    cfg: &SchemeConfig,
    timing: &TimingModel,
    rng: &mut RngState,
) -> Result<SimReport> {
    cfg.validate()?;
    timing.validate(cfg)?;
    if a.field() != cfg.field || x.field() != cfg.field {
        return Err(Error::FieldMismatch(a.field().q(), cfg.field.q()));
    }
    if a.cols() != x.rows() {
        return Err(Error::ShapeMismatch(a.rows(), a.cols(), x.rows(), x.cols()));
    }

    let (b1, b2) = encode(a, params, rng)?;
    let plan = build_plan(&b1, &b2, cfg)?;
    let jitter_base = fork_base(rng);
    let k = x.cols();

    let mut raw: Vec<RawEvent> = Vec::new();
    for cluster in [Cluster::Untrusted, Cluster::Trusted] {
        let (n, layers, full, partial) = match cluster {
            Cluster::Untrusted => (
                cfg.untrusted_workers,
                cfg.untrusted_layers,
                &timing.full_stragglers_untrusted,
                &timing.partial_stragglers_untrusted,
            ),
            Cluster::Trusted => (
                cfg.trusted_workers,
                cfg.trusted_layers,
                &timing.full_stragglers_trusted,
                &timing.partial_stragglers_trusted,
            ),
        };
        let stream_offset = match cluster {
            Cluster::Untrusted => 0,
            Cluster::Trusted => cfg.untrusted_workers as u64,
        };
        for w in 0..n {
            if full.contains(&w) {
                continue;
            }
            let slowdown = if partial.contains(&w) {
                timing.straggler_slowdown
            } else {
                1.0
            };
            let mut worker_rng = stream_rng(jitter_base, stream_offset + w as u64);
            let mut t = 0.0;
            for layer in 0..layers {
                let block = plan.block_index(cluster, w, layer);
                let nnz = plan.blocks(cluster)[block].nnz();
                let mut dt = timing.base_cost_per_nnz * nnz as f64 * k as f64 * slowdown;
                if let Some(j) = &timing.jitter {
                    let u: f64 = worker_rng.gen();
                    dt += j.shift - (1.0 - u).ln() / j.rate;
                }
                t += dt;
                raw.push(RawEvent {
                    time: t,
                    cluster,
                    worker: w,
                    layer,
                    block,
                });
            }
        }
    }
    // simulated-time order; ties broken by (cluster, worker, layer)
    raw.sort_by(|a, b| {
        a.time
            .total_cmp(&b.time)
            .then(a.cluster.cmp(&b.cluster))
            .then(a.worker.cmp(&b.worker))
            .then(a.layer.cmp(&b.layer))
    });

    let mut covered = [
        vec![false; cfg.untrusted_workers],
        vec![false; cfg.trusted_workers],
    ];
    let mut remaining = [cfg.untrusted_workers, cfg.trusted_workers];
    let mut seen = [0usize, 0usize];
    let mut cover_time = [None::<f64>, None::<f64>];
    let mut consumed_at_cover = [0usize, 0usize];
    let mut events = Vec::new();
    for ev in &raw {
        let slot = usize::from(ev.cluster == Cluster::Trusted);
        seen[slot] += 1;
        if !covered[slot][ev.block] {
            covered[slot][ev.block] = true;
            remaining[slot] -= 1;
            if remaining[slot] == 0 {
                cover_time[slot] = Some(ev.time);
                consumed_at_cover[slot] = seen[slot];
            }
        }
        events.push(ResponseEvent {
            cluster: ev.cluster,
            worker: ev.worker,
            layer: ev.layer,
            block: ev.block,
            time: ev.time,
        });
        if cover_time.iter().all(Option::is_some) {
            break;
        }
    }
    if cover_time.iter().any(Option::is_none) {
        let missing = |slot: usize| -> Vec<usize> {
            covered[slot]
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(b, _)| b + 1)
                .collect()
        };
        return Err(Error::Undecodable {
            missing_untrusted: missing(0),
            missing_trusted: missing(1),
        });
    }

    let mut responses = ResponseSet::new();
    for ev in &events {
        responses.push(Response {
            cluster: ev.cluster,
            worker: ev.worker,
            layer: ev.layer,
            result: plan.task(ev.cluster, ev.worker, ev.layer).matvec(x)?,
            time: ev.time,
        })?;
    }
    let recovered = match decode(&responses, cfg, k, a.rows())? {
        DecodeOutcome::Complete(y) => y,
        DecodeOutcome::Incomplete { missing_untrusted, missing_trusted } => {
            return Err(Error::Undecodable {
                missing_untrusted,
                missing_trusted,
            })
        }
    };

    let s_src = a.measure_sparsity();
    let qf = cfg.field.q() as f64;
    let (k_u, k_t) = recovery_thresholds(cfg);
    Ok(SimReport {
        events,
        decode_time_untrusted: cover_time[0].unwrap(),
        decode_time_trusted: cover_time[1].unwrap(),
        decode_time: cover_time[0].unwrap().max(cover_time[1].unwrap()),
        responses_consumed_untrusted: consumed_at_cover[0],
        responses_consumed_trusted: consumed_at_cover[1],
        threshold_untrusted: k_u,
        threshold_trusted: k_t,
        recovered,
        sparsity: TaskSparsityStats {
            analytic_padded: (params.p_z0() - params.p_nz0()) * s_src + params.p_nz0(),
            analytic_pad: params.p_z0() * s_src
                + (1.0 - params.p_nz0()) * (1.0 - s_src) / (qf - 1.0),
            empirical_padded: b2.measure_sparsity(),
            empirical_pad: b1.measure_sparsity(),
        },
    })
}

/// One row of the sparsity-versus-latency sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eps_rel: f64,
    pub colluders: usize,
    pub p_star: f64,
    pub s_pad_analytic: f64,
    pub s_padded_analytic: f64,
    pub s_pad_empirical: f64,
    pub s_padded_empirical: f64,
    pub eps2_at_p_star: f64,
    pub decode_time: f64,
    pub responses_untrusted: usize,
    pub responses_trusted: usize,
}

/// For each budget (ascending relative leakage): solve for the sparsest
/// admissible pad, run one simulation with it, and record sparsity and
/// decode time. Budgets must match the scheme's trusted-cluster geometry.
pub fn sweep_sparsity_vs_time(
    a: &SparseMatrix,
    x: &DenseMatrix,
    cfg: &SchemeConfig,
    budgets: &[LeakageBudget],
    timing: &TimingModel,
    rng: &mut RngState,
) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    if budgets.is_empty() {
        return Err(Error::invalid("sweep needs at least one budget"));
    }
    if budgets.windows(2).any(|w| w[0].eps_rel > w[1].eps_rel) {
        return Err(Error::invalid("budgets must be sorted by eps_rel"));
    }
    for b in budgets {
        if b.trusted_workers != cfg.trusted_workers || b.trusted_layers != cfg.trusted_layers {
            return Err(Error::invalid(
                "budget geometry disagrees with the scheme config",
            ));
        }
    }
    let s_src = a.measure_sparsity();
    let base = fork_base(rng);
    let mut rows = Vec::with_capacity(budgets.len());
    for (i, budget) in budgets.iter().enumerate() {
        let p_star = solve_p_star(s_src, cfg.field, budget)?;
        let params = PadParams::diagonal(p_star, cfg.field)?;
        let mut run_rng = stream_rng(base, i as u64);
        let report = run_simulation(a, x, &params, cfg, timing, &mut run_rng)?;
        rows.push(SweepRow {
            eps_rel: budget.eps_rel,
            colluders: budget.colluders,
            p_star,
            s_pad_analytic: report.sparsity.analytic_pad,
            s_padded_analytic: report.sparsity.analytic_padded,
            s_pad_empirical: report.sparsity.empirical_pad,
            s_padded_empirical: report.sparsity.empirical_padded,
            eps2_at_p_star: crate::analysis::eps2_diagonal(s_src, cfg.field.q(), p_star),
            decode_time: report.decode_time,
            responses_untrusted: report.responses_consumed_untrusted,
            responses_trusted: report.responses_consumed_trusted,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{rng_from_seed, FieldSpec};
    use crate::pad::{sample_source, SourceModel};

    fn demo_inputs(field: FieldSpec, rows: usize, cols: usize, s: f64, seed: u64) -> (SparseMatrix, DenseMatrix) {
        let mut rng = rng_from_seed(seed);
        let model = SourceModel::new(s, field).unwrap();
        let a = sample_source(&model, rows, cols, &mut rng).unwrap();
        let mut x = DenseMatrix::zero(field, cols, 1).unwrap();
        for r in 0..cols {
            x.set(r, 0, field.sample_uniform(false, &mut rng));
        }
        (a, x)
    }

    fn demo_cfg(field: FieldSpec) -> SchemeConfig {
        SchemeConfig {
            untrusted_workers: 4,
            untrusted_layers: 2,
            trusted_workers: 4,
            trusted_layers: 2,
            collusion_bound: 1,
            field,
        }
    }

    #[test]
    fn single_layer_run_consumes_every_worker_once() {
        let field = FieldSpec::new(7).unwrap();
        let (a, x) = demo_inputs(field, 12, 8, 0.7, 2);
        let cfg = SchemeConfig {
            untrusted_workers: 3,
            untrusted_layers: 1,
            trusted_workers: 4,
            trusted_layers: 1,
            collusion_bound: 1,
            field,
        };
        let timing = TimingModel::new(1.0);
        let mut rng = rng_from_seed(3);
        let params = PadParams::diagonal(0.5, field).unwrap();
        let report = run_simulation(&a, &x, &params, &cfg, &timing, &mut rng).unwrap();
        assert_eq!(report.responses_consumed_untrusted, 3);
        assert_eq!(report.responses_consumed_trusted, 4);
        assert_eq!(report.events.len(), 7);
        assert_eq!(report.recovered, a.matvec(&x).unwrap());
        assert_eq!(report.threshold_untrusted, 3);
        assert_eq!(report.threshold_trusted, 4);
    }

    #[test]
    fn full_straggler_within_tolerance_still_decodes() {
        let field = FieldSpec::new(7).unwrap();
        let (a, x) = demo_inputs(field, 16, 10, 0.8, 5);
        let cfg = demo_cfg(field);
        let mut timing = TimingModel::new(1.0);
        timing.full_stragglers_trusted.insert(2);
        let params = PadParams::diagonal(0.5, field).unwrap();
        let mut rng = rng_from_seed(7);
        let report = run_simulation(&a, &x, &params, &cfg, &timing, &mut rng).unwrap();
        assert_eq!(report.recovered, a.matvec(&x).unwrap());
        assert!(report.responses_consumed_trusted <= report.threshold_trusted);
    }

    #[test]
    fn too_many_full_stragglers_fail_with_missing_blocks() {
        let field = FieldSpec::new(7).unwrap();
        let (a, x) = demo_inputs(field, 16, 10, 0.8, 5);
        let cfg = demo_cfg(field); // trusted_layers = 2 tolerates only 1
        let mut timing = TimingModel::new(1.0);
        timing.full_stragglers_trusted.insert(0);
        timing.full_stragglers_trusted.insert(1);
        let params = PadParams::diagonal(0.5, field).unwrap();
        let mut rng = rng_from_seed(7);
        match run_simulation(&a, &x, &params, &cfg, &timing, &mut rng) {
            Err(Error::Undecodable { missing_trusted, .. }) => {
                assert!(!missing_trusted.is_empty());
            }
            other => panic!("expected undecodable, got {other:?}"),
        }
    }

    #[test]
    fn identical_seeds_give_identical_reports() {
        let field = FieldSpec::gf256();
        let (a, x) = demo_inputs(field, 24, 18, 0.9, 11);
        let cfg = demo_cfg(field);
        let mut timing = TimingModel::new(0.5);
        timing.straggler_slowdown = 3.0;
        timing.partial_stragglers_trusted.insert(1);
        timing.jitter = Some(JitterModel { rate: 2.0, shift: 0.1 });
        let params = PadParams::diagonal(0.7, field).unwrap();
        let run = || {
            let mut rng = rng_from_seed(13);
            run_simulation(&a, &x, &params, &cfg, &timing, &mut rng).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn consumed_counts_stay_within_thresholds() {
        let field = FieldSpec::new(11).unwrap();
        let mut rng = rng_from_seed(17);
        for trial in 0..30u64 {
            let (a, x) = demo_inputs(field, 18, 9, 0.8, 100 + trial);
            let n1 = 1 + (trial as usize % 5);
            let n2 = 2 + (trial as usize % 4);
            let cfg = SchemeConfig {
                untrusted_workers: n1,
                untrusted_layers: (1 + (trial as usize % 2)).min(n1),
                trusted_workers: n2,
                trusted_layers: (1 + (trial as usize % 2)).min(n2),
                collusion_bound: 1,
                field,
            };
            let mut timing = TimingModel::new(1.0);
            timing.straggler_slowdown = 2.0;
            if trial % 3 == 0 {
                timing.partial_stragglers_untrusted.insert(0);
            }
            let params = PadParams::diagonal(0.4, field).unwrap();
            let report = run_simulation(&a, &x, &params, &cfg, &timing, &mut rng).unwrap();
            assert!(report.responses_consumed_untrusted <= report.threshold_untrusted);
            assert!(report.responses_consumed_trusted <= report.threshold_trusted);
            assert_eq!(report.recovered, a.matvec(&x).unwrap());
            assert_eq!(
                report.decode_time,
                report.decode_time_untrusted.max(report.decode_time_trusted)
            );
        }
    }

    #[test]
    fn sweep_shows_the_sparsity_latency_tradeoff() {
        let field = FieldSpec::gf256();
        let (a, x) = demo_inputs(field, 60, 40, 0.93, 19);
        let cfg = demo_cfg(field);
        let timing = TimingModel::new(1.0);
        let budgets: Vec<LeakageBudget> = [0.0, 0.25, 0.5, 0.75, 1.0]
            .into_iter()
            .map(|e| LeakageBudget::new(e, 1, 4, 2).unwrap())
            .collect();
        let mut rng = rng_from_seed(23);
        let rows = sweep_sparsity_vs_time(&a, &x, &cfg, &budgets, &timing, &mut rng).unwrap();
        assert_eq!(rows.len(), 5);
        // p* grows with the allowed leakage; decode time shrinks end to end
        for w in rows.windows(2) {
            assert!(w[0].p_star <= w[1].p_star);
        }
        assert_eq!(rows[0].p_star, 1.0 / 256.0);
        assert_eq!(rows[4].p_star, 1.0);
        assert!(rows[0].decode_time >= rows[4].decode_time);
        // p* = 1 degenerates to an all-zero padded matrix
        assert_eq!(rows[4].s_padded_empirical, 1.0);
    }

    #[test]
    fn sweep_rejects_unsorted_budgets() {
        let field = FieldSpec::gf256();
        let (a, x) = demo_inputs(field, 20, 10, 0.9, 29);
        let cfg = demo_cfg(field);
        let timing = TimingModel::new(1.0);
        let budgets = vec![
            LeakageBudget::new(0.5, 1, 4, 2).unwrap(),
            LeakageBudget::new(0.1, 1, 4, 2).unwrap(),
        ];
        let mut rng = rng_from_seed(31);
        assert!(sweep_sparsity_vs_time(&a, &x, &cfg, &budgets, &timing, &mut rng).is_err());
    }

    #[test]
    fn empirical_task_sparsity_tracks_the_closed_forms() {
        let field = FieldSpec::gf256();
        let (a, x) = demo_inputs(field, 300, 300, 0.93, 37);
        let cfg = demo_cfg(field);
        let timing = TimingModel::new(1.0);
        let params = PadParams::diagonal(0.6, field).unwrap();
        let mut rng = rng_from_seed(41);
        let report = run_simulation(&a, &x, &params, &cfg, &timing, &mut rng).unwrap();
        let n_entries = 300.0 * 300.0;
        for (emp, ana) in [
            (report.sparsity.empirical_padded, report.sparsity.analytic_padded),
            (report.sparsity.empirical_pad, report.sparsity.analytic_pad),
        ] {
            let sigma = (ana * (1.0 - ana) / n_entries).sqrt();
            assert!((emp - ana).abs() <= 3.0 * sigma, "{emp} vs {ana}");
        }
    }
}
