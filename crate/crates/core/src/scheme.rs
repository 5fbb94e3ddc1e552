//! Two-cluster task creation, cyclic layered assignment, recovery
//! thresholds, and the threshold decoder for y = A x.
//!
//! The padded matrix `A + R` is split row-wise into N1 blocks for the
//! untrusted cluster and the pad `R` into N2 blocks for the partly trusted
//! cluster. Layer 1 assigns block i to worker i; every further layer is the
//! cyclic shift of the previous one, so each block is replicated once per
//! layer and workers sharing a block are cyclically adjacent. Workers
//! compute their layers strictly in order, which is what makes the
//! closed-form response thresholds tight.
//!
//! Worker, layer, and block identifiers are 0-indexed throughout the API;
//! report/text surfaces add 1 to match the usual w_1..w_N convention.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::matrix::{DenseMatrix, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cluster {
    Untrusted,
    Trusted,
}

impl Cluster {
    pub fn label(&self) -> &'static str {
        match self {
            Cluster::Untrusted => "untrusted",
            Cluster::Trusted => "trusted",
        }
    }
}

/// Cluster sizes, layer counts, and the collusion bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeConfig {
    /// N1, workers in the untrusted cluster (receives A + R blocks).
    pub untrusted_workers: usize,
    /// Layers per untrusted worker (1..=N1).
    pub untrusted_layers: usize,
    /// N2, workers in the partly trusted cluster (receives R blocks).
    pub trusted_workers: usize,
    /// Layers per trusted worker (1..=N2).
    pub trusted_layers: usize,
    /// Collusion bound z among trusted workers (1..=N2).
    pub collusion_bound: usize,
    pub field: FieldSpec,
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.untrusted_workers == 0 || self.trusted_workers == 0 {
            return Err(Error::invalid("cluster sizes must be positive"));
        }
        if self.untrusted_layers == 0 || self.untrusted_layers > self.untrusted_workers {
            return Err(Error::invalid(format!(
                "untrusted layers {} outside 1..={}",
                self.untrusted_layers, self.untrusted_workers
            )));
        }
        if self.trusted_layers == 0 || self.trusted_layers > self.trusted_workers {
            return Err(Error::invalid(format!(
                "trusted layers {} outside 1..={}",
                self.trusted_layers, self.trusted_workers
            )));
        }
        if self.collusion_bound == 0 || self.collusion_bound > self.trusted_workers {
            return Err(Error::invalid(format!(
                "collusion bound {} outside 1..={}",
                self.collusion_bound, self.trusted_workers
            )));
        }
        Ok(())
    }

    fn cluster_dims(&self, cluster: Cluster) -> (usize, usize) {
        match cluster {
            Cluster::Untrusted => (self.untrusted_workers, self.untrusted_layers),
            Cluster::Trusted => (self.trusted_workers, self.trusted_layers),
        }
    }
}

/// Block held by `worker` at `layer` under the cyclic assignment over `n`
/// workers: layer 0 is the identity, each later layer shifts by one.
pub fn cyclic_block_index(n: usize, worker: usize, layer: usize) -> usize {
    (worker + n - layer % n) % n
}

/// The full n x layers assignment grid.
pub fn cyclic_assignment(n: usize, layers: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|w| (0..layers).map(|l| cyclic_block_index(n, w, l)).collect())
        .collect()
}

/// The layered assignment of both clusters plus the block matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskPlan {
    cfg: SchemeConfig,
    untrusted_assign: Vec<Vec<usize>>,
    trusted_assign: Vec<Vec<usize>>,
    untrusted_blocks: Vec<SparseMatrix>,
    trusted_blocks: Vec<SparseMatrix>,
    original_rows: usize,
}

impl TaskPlan {
    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn original_rows(&self) -> usize {
        self.original_rows
    }

    pub fn assignment(&self, cluster: Cluster) -> &[Vec<usize>] {
        match cluster {
            Cluster::Untrusted => &self.untrusted_assign,
            Cluster::Trusted => &self.trusted_assign,
        }
    }

    pub fn blocks(&self, cluster: Cluster) -> &[SparseMatrix] {
        match cluster {
            Cluster::Untrusted => &self.untrusted_blocks,
            Cluster::Trusted => &self.trusted_blocks,
        }
    }

    pub fn block_index(&self, cluster: Cluster, worker: usize, layer: usize) -> usize {
        self.assignment(cluster)[worker][layer]
    }

    pub fn task(&self, cluster: Cluster, worker: usize, layer: usize) -> &SparseMatrix {
        &self.blocks(cluster)[self.block_index(cluster, worker, layer)]
    }

    /// Audit dump: one `cluster worker layer block` line per task,
    /// 1-indexed.
    pub fn dump_text(&self) -> String {
        assignment_dump(&self.cfg)
    }
}

/// The assignment audit text for a config, independent of the block data.
pub fn assignment_dump(cfg: &SchemeConfig) -> String {
    let mut out = String::new();
    for cluster in [Cluster::Untrusted, Cluster::Trusted] {
        let (n, layers) = cfg.cluster_dims(cluster);
        for w in 0..n {
            for l in 0..layers {
                out.push_str(&format!(
                    "{} {} {} {}\n",
                    cluster.label(),
                    w + 1,
                    l + 1,
                    cyclic_block_index(n, w, l) + 1
                ));
            }
        }
    }
    out
}

/// Split the encoded pair into blocks and lay them out cyclically:
/// `b2 = A + R` feeds the untrusted grid, `b1 = R` the trusted grid.
pub fn build_plan(b1: &SparseMatrix, b2: &SparseMatrix, cfg: &SchemeConfig) -> Result<TaskPlan> {
    cfg.validate()?;
    if b1.field() != cfg.field || b2.field() != cfg.field {
        return Err(Error::FieldMismatch(b1.field().q(), cfg.field.q()));
    }
    if b1.rows() != b2.rows() || b1.cols() != b2.cols() {
        return Err(Error::ShapeMismatch(
            b1.rows(),
            b1.cols(),
            b2.rows(),
            b2.cols(),
        ));
    }
    Ok(TaskPlan {
        cfg: *cfg,
        untrusted_assign: cyclic_assignment(cfg.untrusted_workers, cfg.untrusted_layers),
        trusted_assign: cyclic_assignment(cfg.trusted_workers, cfg.trusted_layers),
        untrusted_blocks: b2.split_rows(cfg.untrusted_workers)?,
        trusted_blocks: b1.split_rows(cfg.trusted_workers)?,
        original_rows: b1.rows(),
    })
}

/// Distinct pad blocks a set of trusted workers sees across all its layers.
pub fn unique_tasks_seen(plan: &TaskPlan, workers: &[usize]) -> Result<usize> {
    let n = plan.cfg.trusted_workers;
    let mut blocks = BTreeSet::new();
    for &w in workers {
        if w >= n {
            return Err(Error::invalid(format!("worker {w} outside 0..{n}")));
        }
        blocks.extend(plan.trusted_assign[w].iter().copied());
    }
    Ok(blocks.len())
}

/// Closed-form response threshold for one cluster:
/// `(-alpha^2 + alpha (2n - 1)) / 2 + 1`.
pub fn threshold_formula(n: usize, alpha: usize) -> usize {
    // alpha (2n - 1 - alpha) is always even
    alpha * (2 * n - 1 - alpha) / 2 + 1
}

/// `(K_u, K_t)`: responses after which each cluster's partial result is
/// reconstructable under any sequential completion order.
pub fn recovery_thresholds(cfg: &SchemeConfig) -> (usize, usize) {
    (
        threshold_formula(cfg.untrusted_workers, cfg.untrusted_layers),
        threshold_formula(cfg.trusted_workers, cfg.trusted_layers),
    )
}

/// One worker's answer for one layer: the product `task * x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub cluster: Cluster,
    pub worker: usize,
    pub layer: usize,
    pub result: DenseMatrix,
    pub time: f64,
}

/// Responses received so far; at most one per (cluster, worker, layer).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResponseSet {
    responses: Vec<Response>,
    seen: BTreeSet<(Cluster, usize, usize)>,
}

impl ResponseSet {
    pub fn new() -> Self {
        ResponseSet::default()
    }

    pub fn push(&mut self, response: Response) -> Result<()> {
        let key = (response.cluster, response.worker, response.layer);
        if !self.seen.insert(key) {
            return Err(Error::invalid(format!(
                "duplicate response from {} worker {} layer {}",
                response.cluster.label(),
                response.worker + 1,
                response.layer + 1
            )));
        }
        self.responses.push(response);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Response> {
        self.responses.iter()
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

/// Result of a decode attempt: either y, or the blocks still uncovered.
#[derive(Debug, Clone, PartialEq)]
pub enum DecodeOutcome {
    Complete(DenseMatrix),
    Incomplete {
        missing_untrusted: Vec<usize>,
        missing_trusted: Vec<usize>,
    },
}

impl DecodeOutcome {
    pub fn is_complete(&self) -> bool {
        matches!(self, DecodeOutcome::Complete(_))
    }
}

/// Reassemble `y = (A+R)x - Rx`, truncated to `original_rows`.
///
/// Needs every untrusted block product and every trusted block product
/// covered by at least one response; replicated responses for the same block
/// are cross-checked for equality and then discarded. Returns
/// [`DecodeOutcome::Incomplete`] with the precise missing sets when coverage
/// is not yet reached.
pub fn decode(
    responses: &ResponseSet,
    cfg: &SchemeConfig,
    x_cols: usize,
    original_rows: usize,
) -> Result<DecodeOutcome> {
    cfg.validate()?;
    let mut per_cluster: [BTreeMap<usize, &DenseMatrix>; 2] = [BTreeMap::new(), BTreeMap::new()];
    for resp in responses.iter() {
        let (n, layers) = cfg.cluster_dims(resp.cluster);
        if resp.worker >= n || resp.layer >= layers {
            return Err(Error::invalid(format!(
                "response ({}, worker {}, layer {}) outside the plan",
                resp.cluster.label(),
                resp.worker + 1,
                resp.layer + 1
            )));
        }
        if resp.result.field() != cfg.field {
            return Err(Error::FieldMismatch(resp.result.field().q(), cfg.field.q()));
        }
        if resp.result.cols() != x_cols {
            return Err(Error::ShapeMismatch(
                resp.result.rows(),
                resp.result.cols(),
                resp.result.rows(),
                x_cols,
            ));
        }
        let block = cyclic_block_index(n, resp.worker, resp.layer);
        let slot = usize::from(resp.cluster == Cluster::Trusted);
        match per_cluster[slot].get(&block) {
            Some(existing) => {
                if **existing != resp.result {
                    return Err(Error::InconsistentResponses {
                        cluster: resp.cluster.label(),
                        block,
                    });
                }
            }
            None => {
                per_cluster[slot].insert(block, &resp.result);
            }
        }
    }

    let missing = |slot: usize, n: usize| -> Vec<usize> {
        (0..n).filter(|b| !per_cluster[slot].contains_key(b)).collect()
    };
    let missing_untrusted = missing(0, cfg.untrusted_workers);
    let missing_trusted = missing(1, cfg.trusted_workers);
    if !missing_untrusted.is_empty() || !missing_trusted.is_empty() {
        return Ok(DecodeOutcome::Incomplete {
            missing_untrusted,
            missing_trusted,
        });
    }

    let stack = |slot: usize, n: usize| -> Result<DenseMatrix> {
        let blocks: Vec<DenseMatrix> = (0..n)
            .map(|b| (*per_cluster[slot].get(&b).expect("coverage checked")).clone())
            .collect();
        DenseMatrix::vstack(&blocks)?.truncate_rows(original_rows)
    };
    let padded_part = stack(0, cfg.untrusted_workers)?;
    let pad_part = stack(1, cfg.trusted_workers)?;
    Ok(DecodeOutcome::Complete(padded_part.sub(&pad_part)?))
}

// --- exhaustive oracles (small instances) ---

/// Worst-case response threshold by enumerating every per-worker progress
/// vector: the smallest K such that no undecodable vector of total K exists.
/// Intended for n <= 16.
pub fn exhaustive_recovery_threshold(n: usize, alpha: usize) -> usize {
    assert!(n <= 16 && alpha <= n);
    // coverage mask of a worker's first c layers
    let prefix_mask: Vec<Vec<u32>> = (0..n)
        .map(|w| {
            let mut masks = vec![0u32; alpha + 1];
            for c in 1..=alpha {
                masks[c] = masks[c - 1] | 1 << cyclic_block_index(n, w, c - 1);
            }
            masks
        })
        .collect();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut worst_undecodable = 0usize;
    let mut progress = vec![0usize; n];
    loop {
        let mut mask = 0u32;
        let mut total = 0usize;
        for w in 0..n {
            mask |= prefix_mask[w][progress[w]];
            total += progress[w];
        }
        if mask != full {
            worst_undecodable = worst_undecodable.max(total);
        }
        // odometer over progress vectors in 0..=alpha per worker
        let mut i = 0;
        loop {
            if i == n {
                return worst_undecodable + 1;
            }
            if progress[i] < alpha {
                progress[i] += 1;
                break;
            }
            progress[i] = 0;
            i += 1;
        }
    }
}

/// Maximum number of distinct blocks any z-subset of workers sees, by
/// enumerating all subsets. Intended for n <= 16.
pub fn max_unique_blocks(n: usize, alpha: usize, z: usize) -> usize {
    assert!(n <= 16 && alpha <= n && z <= n);
    let worker_mask: Vec<u32> = (0..n)
        .map(|w| {
            (0..alpha)
                .map(|l| 1u32 << cyclic_block_index(n, w, l))
                .fold(0, |m, b| m | b)
        })
        .collect();
    let mut best = 0;
    for subset in 0u32..(1u32 << n) {
        if subset.count_ones() as usize != z {
            continue;
        }
        let mut mask = 0u32;
        for (w, &wm) in worker_mask.iter().enumerate() {
            if subset & (1 << w) != 0 {
                mask |= wm;
            }
        }
        best = best.max(mask.count_ones() as usize);
    }
    best
}

/// Whether all blocks stay covered after removing the given workers, with
/// every remaining worker completing all its layers.
pub fn coverage_after_removing(n: usize, alpha: usize, removed: &[usize]) -> bool {
    let removed: BTreeSet<usize> = removed.iter().copied().collect();
    let mut covered = vec![false; n];
    for w in 0..n {
        if removed.contains(&w) {
            continue;
        }
        for l in 0..alpha {
            covered[cyclic_block_index(n, w, l)] = true;
        }
    }
    covered.into_iter().all(|c| c)
}
