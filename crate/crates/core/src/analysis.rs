//! Closed-form and brute-force information-theoretic quantities.
//!
//! Everything is measured in q-ary units: entropies use log base q, so the
//! uniform distribution over GF(q) has entropy 1 and a per-entry leakage of
//! `eps` means `eps * m * n` q-ary symbols for an m x n matrix.
//!
//! The closed forms for the sparsity levels and the per-entry leakages
//! `eps1` (observing `A + R`) and `eps2` (observing `R`) follow from the
//! spiked shape of every distribution involved: one special mass plus q-1
//! equal masses. [`mi_bruteforce`] recomputes both leakages from the full
//! q x q joint distribution and serves as the independent oracle.

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec};
use crate::pad::PadParams;

/// A probability mass function over the q field symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    masses: Vec<f64>,
}

impl Pmf {
    /// Validates nonnegativity and unit total mass (within 1e-12).
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.len() < 2 {
            return Err(Error::invalid("a PMF needs at least two symbols"));
        }
        if masses.iter().any(|&p| p < 0.0 || p.is_nan()) {
            return Err(Error::invalid("PMF masses must be nonnegative"));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("PMF masses sum to {total}, not 1")));
        }
        Ok(Pmf { masses })
    }

    /// One special mass and q-1 equal masses on the remaining symbols — the
    /// shape of every distribution in this model. The entropy of a spiked
    /// PMF depends only on `(special, q)`, not on where the spike sits.
    pub fn spiked(special: f64, q: u32) -> Result<Self> {
        if !(-1e-12..=1.0 + 1e-12).contains(&special) || special.is_nan() {
            return Err(Error::invalid(format!("spike mass {special} outside [0, 1]")));
        }
        let special = special.clamp(0.0, 1.0);
        let rest = (1.0 - special) / (q as f64 - 1.0);
        let mut masses = vec![rest; q as usize];
        masses[0] = special;
        Pmf::new(masses)
    }

    pub fn uniform(q: u32) -> Self {
        Pmf {
            masses: vec![1.0 / q as f64; q as usize],
        }
    }

    pub fn point_mass(q: u32, at: usize) -> Self {
        let mut masses = vec![0.0; q as usize];
        masses[at] = 1.0;
        Pmf { masses }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }
}

/// q-ary entropy, with 0 log 0 = 0.
pub fn entropy_q(pmf: &Pmf) -> f64 {
    let ln_q = (pmf.len() as f64).ln();
    let h = -pmf
        .masses
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln() / ln_q)
        .sum::<f64>();
    if h == 0.0 {
        0.0 // normalize -0.0
    } else {
        h
    }
}

/// Entropy of the spiked PMF with the given special mass, in q-ary units.
/// Two-term closed form: the q-1 equal masses contribute jointly.
fn spiked_entropy(special: f64, q: u32) -> f64 {
    debug_assert!((-1e-12..=1.0 + 1e-12).contains(&special));
    let special = special.clamp(0.0, 1.0);
    let qf = q as f64;
    let ln_q = qf.ln();
    let rest = 1.0 - special;
    let mut h = 0.0;
    if special > 0.0 {
        h -= special * special.ln() / ln_q;
    }
    if rest > 0.0 {
        h -= rest * (rest / (qf - 1.0)).ln() / ln_q;
    }
    if h == 0.0 {
        0.0
    } else {
        h
    }
}

/// Per-entry entropy of the source: H_q of [s, (1-s)/(q-1), ...].
pub fn source_entropy(s: f64, q: u32) -> f64 {
    spiked_entropy(s, q)
}

/// Sparsity and leakage of a pad drawn with the given parameters against an
/// i.i.d. source of sparsity `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PadStats {
    /// S(A+R), fraction of zeros in the padded matrix.
    pub s_padded: f64,
    /// S(R), fraction of zeros in the pad itself.
    pub s_pad: f64,
    /// Per-entry leakage of A through A+R, in q-ary units.
    pub eps1: f64,
    /// Per-entry leakage of A through R, in q-ary units.
    pub eps2: f64,
}

/// Closed forms:
/// `S(A+R) = (p_z0 - p_nz0) s + p_nz0`,
/// `S(R) = p_z0 s + (1-p_nz0)(1-s)/(q-1)`, and
/// `eps = H_q(marginal) - s H_q([p_z0, ...]) - (1-s) H_q([p_nz0, ...])`
/// with the marginal spike at `S(A+R)` for eps1 and `S(R)` for eps2.
pub fn pad_stats(s: f64, params: &PadParams) -> Result<PadStats> {
    let q = params.field().q();
    check_source_sparsity(s, q)?;
    let qf = q as f64;
    let (p_z0, p_nz0) = (params.p_z0(), params.p_nz0());
    let s_padded = (p_z0 - p_nz0) * s + p_nz0;
    let s_pad = p_z0 * s + (1.0 - p_nz0) * (1.0 - s) / (qf - 1.0);
    let h_cond = s * spiked_entropy(p_z0, q) + (1.0 - s) * spiked_entropy(p_nz0, q);
    let eps1 = spiked_entropy(s_padded, q) - h_cond;
    let eps2 = spiked_entropy(s_pad, q) - h_cond;
    debug_assert!(eps1 >= -1e-12, "eps1 = {eps1}");
    debug_assert!(eps2 >= -1e-12, "eps2 = {eps2}");
    Ok(PadStats {
        s_padded,
        s_pad,
        eps1,
        eps2,
    })
}

fn check_source_sparsity(s: f64, q: u32) -> Result<()> {
    let q_inv = 1.0 / q as f64;
    if !(s > q_inv && s <= 1.0) {
        return Err(Error::invalid(format!(
            "source sparsity {s} must lie in (1/q, 1] = ({q_inv}, 1]"
        )));
    }
    Ok(())
}

/// Which encoded matrix the eavesdropper observes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeakageSide {
    /// Observe R (the partly trusted cluster's view).
    Pad,
    /// Observe A + R (the untrusted cluster's view).
    Padded,
}

/// Exact per-entry mutual information from the full q x q joint PMF of
/// `(A[i,j], observed[i,j])`, built directly from the source PMF and the two
/// conditional pad PMFs. Independent of the closed forms in [`pad_stats`];
/// feasible for q up to 1024.
pub fn mi_bruteforce(s: f64, params: &PadParams, side: LeakageSide) -> Result<f64> {
    let field = params.field();
    let q = field.q() as usize;
    if q > 1024 {
        return Err(Error::invalid(format!(
            "brute-force joint enumeration supports q <= 1024, got {q}"
        )));
    }
    check_source_sparsity(s, field.q())?;
    let (p_z0, p_nz0) = (params.p_z0(), params.p_nz0());
    let nonzero_mass = (1.0 - s) / (q as f64 - 1.0);

    let mut joint = vec![0.0f64; q * q];
    for a_idx in 0..q {
        let a = FieldElement(a_idx as u32);
        let p_a = if a_idx == 0 { s } else { nonzero_mass };
        let (special, p_special) = if a_idx == 0 {
            (FieldElement::ZERO, p_z0)
        } else {
            (field.neg(a), p_nz0)
        };
        let p_other = (1.0 - p_special) / (q as f64 - 1.0);
        for r_idx in 0..q {
            let r = FieldElement(r_idx as u32);
            let p_r = if r == special { p_special } else { p_other };
            let observed = match side {
                LeakageSide::Pad => r,
                LeakageSide::Padded => field.add(a, r),
            };
            joint[a_idx * q + observed.value() as usize] += p_a * p_r;
        }
    }

    let mut marg_a = vec![0.0f64; q];
    let mut marg_w = vec![0.0f64; q];
    for a_idx in 0..q {
        for w_idx in 0..q {
            let p = joint[a_idx * q + w_idx];
            marg_a[a_idx] += p;
            marg_w[w_idx] += p;
        }
    }
    let ln_q = (q as f64).ln();
    let mut mi = 0.0;
    for a_idx in 0..q {
        for w_idx in 0..q {
            let p = joint[a_idx * q + w_idx];
            if p > 0.0 {
                mi += p * (p / (marg_a[a_idx] * marg_w[w_idx])).ln() / ln_q;
            }
        }
    }
    Ok(mi)
}

/// The relative leakage budget together with the collusion geometry it is
/// measured against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageBudget {
    /// Allowed leakage relative to H_q(A), in [0, 1].
    pub eps_rel: f64,
    /// Colluding-worker bound z, 1..=trusted_workers.
    pub colluders: usize,
    /// Size of the partly trusted cluster.
    pub trusted_workers: usize,
    /// Task layers per trusted worker.
    pub trusted_layers: usize,
}

impl LeakageBudget {
    pub fn new(
        eps_rel: f64,
        colluders: usize,
        trusted_workers: usize,
        trusted_layers: usize,
    ) -> Result<Self> {
        let b = LeakageBudget {
            eps_rel,
            colluders,
            trusted_workers,
            trusted_layers,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eps_rel) || self.eps_rel.is_nan() {
            return Err(Error::invalid(format!(
                "relative leakage {} outside [0, 1]",
                self.eps_rel
            )));
        }
        if self.trusted_workers == 0 {
            return Err(Error::invalid("trusted cluster must have workers"));
        }
        if self.colluders == 0 || self.colluders > self.trusted_workers {
            return Err(Error::invalid(format!(
                "collusion bound {} outside 1..={}",
                self.colluders, self.trusted_workers
            )));
        }
        if self.trusted_layers == 0 {
            return Err(Error::invalid("layer count must be positive"));
        }
        Ok(())
    }

    /// Fraction of unique pad blocks a worst-case colluding set sees:
    /// min(alpha z / N2, 1).
    pub fn collusion_fraction(&self) -> f64 {
        ((self.trusted_layers as f64 * self.colluders as f64) / self.trusted_workers as f64)
            .min(1.0)
    }
}

/// Absolute leakage to a worst-case colluding set:
/// `min(alpha z / N2, 1) * m * n * eps2`.
pub fn collusion_leakage(budget: &LeakageBudget, rows: usize, cols: usize, stats: &PadStats) -> f64 {
    budget.collusion_fraction() * rows as f64 * cols as f64 * stats.eps2
}

/// S(R) in the diagonal regime as an explicit linear function of p:
/// `p (sq - 1)/(q - 1) + (1 - s)/(q - 1)`. Strictly increasing when s > 1/q.
pub fn sr_linear(s: f64, q: u32, p: f64) -> f64 {
    let qf = q as f64;
    p * ((s * qf - 1.0) / (qf - 1.0)) + (1.0 - s) / (qf - 1.0)
}

/// Per-entry pad leakage eps2 in the diagonal regime `p_z0 = p_nz0 = p`.
/// Zero at p = 1/q (uniform pad) and increasing beyond it.
pub fn eps2_diagonal(s: f64, q: u32, p: f64) -> f64 {
    spiked_entropy(sr_linear(s, q, p), q) - spiked_entropy(p, q)
}

/// Largest p in [1/q, 1] whose pad leakage fits the budget:
/// `eps2(p) <= eps_rel * H_q(A[i,j]) / min(alpha z / N2, 1)`.
///
/// Monotonicity of eps2 in p makes bisection exact up to the 1e-9 interval
/// tolerance. The budget boundaries are returned exactly: a zero budget
/// admits only the uniform pad p = 1/q, and a budget at least eps2(1)
/// admits p = 1.
pub fn solve_p_star(s: f64, field: FieldSpec, budget: &LeakageBudget) -> Result<f64> {
    budget.validate()?;
    let q = field.q();
    check_source_sparsity(s, q)?;
    let p_min = 1.0 / q as f64;
    let bound = budget.eps_rel * source_entropy(s, q) / budget.collusion_fraction();
    if bound <= 0.0 {
        return Ok(p_min);
    }
    if eps2_diagonal(s, q, 1.0) <= bound {
        return Ok(1.0);
    }
    let mut lo = p_min;
    let mut hi = 1.0;
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if eps2_diagonal(s, q, mid) <= bound {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Grid evaluation of the diagonal-regime monotonicity claims: S(R) strictly
/// increasing in p and eps2 non-decreasing on [1/q, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub grid_points: usize,
    pub sr_strictly_increasing: bool,
    pub eps2_non_decreasing: bool,
    /// First offending adjacent pair (p_i, p_{i+1}), if any.
    pub violation: Option<(f64, f64)>,
    /// Slope of S(R) in p: (sq-1)/(q-1).
    pub sr_slope: f64,
    /// eps2 at p = 1/q, the global minimum (zero for the uniform pad).
    pub eps2_at_uniform: f64,
}

impl MonotonicityReport {
    pub fn holds(&self) -> bool {
        self.sr_strictly_increasing && self.eps2_non_decreasing
    }
}

pub fn check_monotonicity(s: f64, field: FieldSpec, grid_points: usize) -> Result<MonotonicityReport> {
    let q = field.q();
    check_source_sparsity(s, q)?;
    if grid_points < 2 {
        return Err(Error::invalid("grid needs at least two points"));
    }
    let qf = q as f64;
    let p_min = 1.0 / qf;
    let step = (1.0 - p_min) / (grid_points - 1) as f64;
    let ps: Vec<f64> = (0..grid_points).map(|i| p_min + i as f64 * step).collect();
    let mut report = MonotonicityReport {
        grid_points,
        sr_strictly_increasing: true,
        eps2_non_decreasing: true,
        violation: None,
        sr_slope: (s * qf - 1.0) / (qf - 1.0),
        eps2_at_uniform: eps2_diagonal(s, q, p_min),
    };
    for w in ps.windows(2) {
        let (p0, p1) = (w[0], w[1]);
        if sr_linear(s, q, p1) <= sr_linear(s, q, p0) {
            report.sr_strictly_increasing = false;
            report.violation.get_or_insert((p0, p1));
        }
        // 1e-12 slack absorbs floating noise near the flat minimum
        if eps2_diagonal(s, q, p1) < eps2_diagonal(s, q, p0) - 1e-12 {
            report.eps2_non_decreasing = false;
            report.violation.get_or_insert((p0, p1));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::rng_from_seed;
    use rand::Rng;

    #[test]
    fn entropy_basics() {
        assert!((entropy_q(&Pmf::uniform(7)) - 1.0).abs() < 1e-15);
        assert_eq!(entropy_q(&Pmf::point_mass(7, 3)), 0.0);
        assert!((entropy_q(&Pmf::new(vec![0.5, 0.5]).unwrap()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pmf_validation() {
        assert!(Pmf::new(vec![0.5, 0.6]).is_err());
        assert!(Pmf::new(vec![-0.1, 1.1]).is_err());
        assert!(Pmf::spiked(0.3, 7).is_ok());
        assert!(Pmf::spiked(1.2, 7).is_err());
    }

    #[test]
    fn spiked_entropy_is_position_independent() {
        // permuting where the spike sits cannot change the entropy
        let q = 7u32;
        let spiked = Pmf::spiked(0.4, q).unwrap();
        let mut rotated = spiked.masses().to_vec();
        rotated.rotate_right(3);
        assert_eq!(entropy_q(&spiked), entropy_q(&Pmf::new(rotated).unwrap()));
    }

    #[test]
    fn closed_form_spiked_entropy_matches_generic() {
        for q in [2u32, 3, 7, 256] {
            for i in 0..=20 {
                let special = i as f64 / 20.0;
                let generic = entropy_q(&Pmf::spiked(special, q).unwrap());
                assert!(
                    (spiked_entropy(special, q) - generic).abs() < 1e-13,
                    "q={q} special={special}"
                );
            }
        }
    }

    #[test]
    fn perfect_pad_stats() {
        let f = FieldSpec::new(7).unwrap();
        let params = PadParams::diagonal(1.0 / 7.0, f).unwrap();
        let stats = pad_stats(0.9, &params).unwrap();
        assert!(stats.eps1.abs() < 1e-12);
        assert!(stats.eps2.abs() < 1e-12);
        assert!((stats.s_pad - 1.0 / 7.0).abs() < 1e-12);
        assert!((stats.s_padded - 1.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_eps1_is_zero_across_grid() {
        for q in [2u32, 3, 7, 256] {
            let f = FieldSpec::new(q).unwrap();
            let q_inv = 1.0 / q as f64;
            for i in 0..40 {
                let p = q_inv + (1.0 - q_inv) * i as f64 / 39.0;
                let s = q_inv + (1.0 - q_inv) * ((i * 17 + 3) % 40) as f64 / 40.0 + 1e-6;
                let s = s.min(1.0);
                let params = PadParams::diagonal(p, f).unwrap();
                let stats = pad_stats(s, &params).unwrap();
                assert!(stats.eps1.abs() <= 1e-12, "q={q} p={p} s={s}: {}", stats.eps1);
                assert!((stats.s_padded - p).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn fully_revealing_pad() {
        // p_z0 = p_nz0 = 1: R = -A, so observing R reveals A entirely
        let f = FieldSpec::new(7).unwrap();
        let params = PadParams::diagonal(1.0, f).unwrap();
        let s = 0.9;
        let stats = pad_stats(s, &params).unwrap();
        assert!((stats.eps2 - source_entropy(s, 7)).abs() < 1e-12);
        assert!((stats.s_pad - s).abs() < 1e-15);
    }

    #[test]
    fn known_point_matches_independent_computation() {
        // frozen from an independent implementation of the closed forms
        let f = FieldSpec::new(7).unwrap();
        let params = PadParams::new(0.8, 0.1, f).unwrap();
        let stats = pad_stats(0.9, &params).unwrap();
        assert!((stats.s_padded - 0.73).abs() < 1e-12);
        assert!((stats.s_pad - 0.735).abs() < 1e-12);
        assert!((stats.eps1 - 0.05158941262206736).abs() < 1e-12);
        assert!((stats.eps2 - 0.0443971076190955).abs() < 1e-12);
    }

    #[test]
    fn sr_coefficient_at_reference_parameters() {
        let coeff = (0.93f64 * 256.0 - 1.0) / 255.0;
        assert!((0.9295..=0.9300).contains(&coeff));
        assert!((sr_linear(0.93, 256, 0.5) - (0.5 * coeff + 0.07 / 255.0)).abs() == 0.0);
    }

    #[test]
    fn bruteforce_matches_closed_forms() {
        let mut rng = rng_from_seed(1234);
        for q in [2u32, 3, 7, 256] {
            let f = FieldSpec::new(q).unwrap();
            let q_inv = 1.0 / q as f64;
            for _ in 0..50 {
                let s = (q_inv + (1.0 - q_inv) * (1.0 - rng.gen::<f64>())).min(1.0);
                let params = PadParams::new(rng.gen(), rng.gen(), f).unwrap();
                let stats = pad_stats(s, &params).unwrap();
                let bf2 = mi_bruteforce(s, &params, LeakageSide::Pad).unwrap();
                let bf1 = mi_bruteforce(s, &params, LeakageSide::Padded).unwrap();
                assert!(
                    (stats.eps2 - bf2).abs() < 1e-10,
                    "q={q} s={s} params={params:?}: {} vs {bf2}",
                    stats.eps2
                );
                assert!(
                    (stats.eps1 - bf1).abs() < 1e-10,
                    "q={q} s={s} params={params:?}: {} vs {bf1}",
                    stats.eps1
                );
            }
        }
    }

    #[test]
    fn bruteforce_diagonal_padded_mi_is_zero() {
        let mut rng = rng_from_seed(77);
        for q in [2u32, 3, 7, 256] {
            let f = FieldSpec::new(q).unwrap();
            let q_inv = 1.0 / q as f64;
            for _ in 0..20 {
                let s = (q_inv + (1.0 - q_inv) * (1.0 - rng.gen::<f64>())).min(1.0);
                let p = q_inv + (1.0 - q_inv) * rng.gen::<f64>();
                let params = PadParams::diagonal(p, f).unwrap();
                let mi = mi_bruteforce(s, &params, LeakageSide::Padded).unwrap();
                assert!(mi.abs() < 1e-12, "q={q} s={s} p={p}: {mi}");
            }
        }
    }

    #[test]
    fn bruteforce_hand_enumerated_binary_cases() {
        let f = FieldSpec::new(2).unwrap();
        // p_z0 = 1, p_nz0 = 0 over GF(2): R is identically 0 -> MI = 0
        let params = PadParams::new(1.0, 0.0, f).unwrap();
        let mi = mi_bruteforce(0.9, &params, LeakageSide::Pad).unwrap();
        assert!(mi.abs() < 1e-15);
        // p_z0 = p_nz0 = 1 over GF(2): R = A -> MI = H_2(A) = H_2([0.9, 0.1])
        let params = PadParams::diagonal(1.0, f).unwrap();
        let mi = mi_bruteforce(0.9, &params, LeakageSide::Pad).unwrap();
        assert!((mi - 0.4689955935892812).abs() < 1e-12);
    }

    #[test]
    fn collusion_leakage_clamps() {
        let f = FieldSpec::new(7).unwrap();
        let params = PadParams::diagonal(0.8, f).unwrap();
        let stats = pad_stats(0.9, &params).unwrap();
        let full = LeakageBudget::new(0.5, 10, 10, 1).unwrap();
        assert!((collusion_leakage(&full, 20, 30, &stats) - 600.0 * stats.eps2).abs() < 1e-12);
        let clamped = LeakageBudget::new(0.5, 6, 10, 2).unwrap(); // alpha z = 12 >= N2
        assert!((collusion_leakage(&clamped, 20, 30, &stats) - 600.0 * stats.eps2).abs() < 1e-12);
        let tenth = LeakageBudget::new(0.5, 10, 100, 1).unwrap(); // alpha z / N2 = 0.1
        assert!(
            (collusion_leakage(&tenth, 20, 30, &stats) - 0.1 * 600.0 * stats.eps2).abs() < 1e-12
        );
    }

    #[test]
    fn p_star_boundaries_are_exact() {
        let f = FieldSpec::gf256();
        for z in [1usize, 7, 50, 100] {
            let zero = LeakageBudget::new(0.0, z, 100, 1).unwrap();
            assert_eq!(solve_p_star(0.93, f, &zero).unwrap(), 1.0 / 256.0);
            let one = LeakageBudget::new(1.0, z, 100, 1).unwrap();
            assert_eq!(solve_p_star(0.93, f, &one).unwrap(), 1.0);
        }
    }

    #[test]
    fn p_star_sits_at_the_budget_crossing() {
        let f = FieldSpec::gf256();
        for (eps_rel, z) in [(0.25, 5), (0.5, 10), (0.75, 40)] {
            let budget = LeakageBudget::new(eps_rel, z, 100, 1).unwrap();
            let p = solve_p_star(0.93, f, &budget).unwrap();
            let bound = eps_rel * source_entropy(0.93, 256) / budget.collusion_fraction();
            assert!(eps2_diagonal(0.93, 256, p) <= bound);
            if p < 1.0 {
                assert!(eps2_diagonal(0.93, 256, (p + 1e-6).min(1.0)) > bound);
            }
        }
    }

    #[test]
    fn p_star_non_increasing_in_colluders() {
        let f = FieldSpec::gf256();
        let mut last = f64::INFINITY;
        for z in 1..=100 {
            let budget = LeakageBudget::new(0.5, z, 100, 1).unwrap();
            let p = solve_p_star(0.93, f, &budget).unwrap();
            assert!(p <= last, "z={z}: {p} > {last}");
            last = p;
        }
    }

    #[test]
    fn p_star_agrees_with_grid_scan() {
        let f = FieldSpec::new(7).unwrap();
        for (eps_rel, z, n2, alpha) in [(0.3, 2, 8, 1), (0.6, 3, 8, 2), (0.9, 1, 4, 1)] {
            let budget = LeakageBudget::new(eps_rel, z, n2, alpha).unwrap();
            let p = solve_p_star(0.8, f, &budget).unwrap();
            let bound = eps_rel * source_entropy(0.8, 7) / budget.collusion_fraction();
            // independent coarse scan with step 1e-4
            let p_min = 1.0 / 7.0;
            let mut best = p_min;
            let mut t = p_min;
            while t <= 1.0 {
                if eps2_diagonal(0.8, 7, t) <= bound {
                    best = t;
                }
                t += 1e-4;
            }
            assert!((p - best).abs() <= 1e-3, "{p} vs scan {best}");
        }
    }

    #[test]
    fn monotonicity_report_on_reference_curve() {
        let f = FieldSpec::gf256();
        let report = check_monotonicity(0.93, f, 1000).unwrap();
        assert!(report.holds(), "violation: {:?}", report.violation);
        assert!(report.eps2_at_uniform.abs() < 1e-12);
        assert!(report.sr_slope > 0.0);
        assert!((report.sr_slope - (0.93 * 256.0 - 1.0) / 255.0).abs() < 1e-15);
    }

    #[test]
    fn preconditions_are_enforced() {
        let f = FieldSpec::new(7).unwrap();
        let params = PadParams::diagonal(0.5, f).unwrap();
        assert!(pad_stats(1.0 / 7.0, &params).is_err()); // s must exceed 1/q
        assert!(pad_stats(1.1, &params).is_err());
        let big = FieldSpec::new(1031).unwrap(); // prime above the brute-force cap
        let params_big = PadParams::diagonal(0.5, big).unwrap();
        assert!(mi_bruteforce(0.9, &params_big, LeakageSide::Pad).is_err());
    }
}
