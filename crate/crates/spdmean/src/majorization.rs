//! Log-majorization predicates and the theorem checks built on them.
//!
//! `A ≺_log B` asks that every prefix product of descending eigenvalues of A
//! stays below the matching prefix of B, with equal determinants. All
//! comparisons happen in the log domain (sums of log eigenvalues), since the
//! raw products overflow quickly.

use serde::Serialize;

use crate::barycenter::{cartan_barycenter, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::{eigh, norm, power_m, NormSpec, SpdMatrix};
use crate::measure::DiscreteMeasure;

/// Outcome of a log-majorization comparison.
#[derive(Clone, Debug, Serialize)]
pub struct MajorizationReport {
    /// `sum_{j<=k} log λ_j(B) - sum_{j<=k} log λ_j(A)` for k = 1..m.
    pub prefix_log_gaps: Vec<f64>,
    /// Full-trace gap `log det B - log det A` (must vanish for ≺_log).
    pub det_log_gap: f64,
    /// Tolerance the verdict was taken at.
    pub tol: f64,
    pub holds: bool,
}

/// Tests `A ≺_log B` at tolerance `tol` on the log gaps.
pub fn log_majorize(a: &SpdMatrix, b: &SpdMatrix, tol: f64) -> Result<MajorizationReport> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let m = a.dim();
    let la = eigh(a.hermitian())?;
    let lb = eigh(b.hermitian())?;
    let mut prefix_log_gaps = Vec::with_capacity(m);
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    for k in 0..m {
        sum_a += la.eigenvalues()[k].ln();
        sum_b += lb.eigenvalues()[k].ln();
        prefix_log_gaps.push(sum_b - sum_a);
    }
    let det_log_gap = prefix_log_gaps[m - 1];
    let holds =
        prefix_log_gaps.iter().all(|&g| g >= -tol) && det_log_gap.abs() <= tol;
    Ok(MajorizationReport {
        prefix_log_gaps,
        det_log_gap,
        tol,
        holds,
    })
}

/// Per-power outcome of the barycenter log-majorization
/// `G(μ^t) ≺_log G(μ)^t`.
#[derive(Clone, Debug, Serialize)]
pub struct PowerMajorization {
    pub t: f64,
    pub report: MajorizationReport,
}

/// Checks `G(μ^t) ≺_log G(μ)^t` for each `t >= 1` in `ts`.
pub fn check_main_theorem(
    mu: &DiscreteMeasure,
    ts: &[f64],
    tol: f64,
) -> Result<Vec<PowerMajorization>> {
    check_main_theorem_with(mu, ts, tol, &SolverOptions::default())
}

pub fn check_main_theorem_with(
    mu: &DiscreteMeasure,
    ts: &[f64],
    tol: f64,
    opts: &SolverOptions,
) -> Result<Vec<PowerMajorization>> {
    if ts.iter().any(|&t| t < 1.0) {
        return Err(Error::InvalidArgument(
            "power log-majorization needs t >= 1".into(),
        ));
    }
    let g = solve(mu, opts)?;
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        let g_power_measure = solve(&mu.power(t)?, opts)?;
        let g_powered = power_m(&g, t)?;
        let report = log_majorize(&g_power_measure, &g_powered, tol)?;
        out.push(PowerMajorization { t, report });
    }
    Ok(out)
}

/// One rung of the corollary chain between adjacent exponents `p <= q`.
#[derive(Clone, Debug, Serialize)]
pub struct ChainLink {
    pub p: f64,
    pub q: f64,
    /// `G(μ^q)^{1/q} ≺_log G(μ^p)^{1/p}`.
    pub majorization: MajorizationReport,
    /// Per-norm comparison `|||G(μ^q)^{1/q}||| <= |||G(μ^p)^{1/p}||| + tol`.
    pub norm_checks: Vec<NormCheck>,
    pub all_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormCheck {
    pub spec: NormSpec,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Verifies the monotone chain `G(μ^q)^{1/q} ≺_log G(μ^p)^{1/p}` and the
/// induced unitarily invariant norm inequalities across adjacent pairs of
/// the ascending grid `ps`.
pub fn check_corollary_chain(
    mu: &DiscreteMeasure,
    ps: &[f64],
    norms: &[NormSpec],
    tol: f64,
) -> Result<Vec<ChainLink>> {
    check_corollary_chain_with(mu, ps, norms, tol, &SolverOptions::default())
}

pub fn check_corollary_chain_with(
    mu: &DiscreteMeasure,
    ps: &[f64],
    norms: &[NormSpec],
    tol: f64,
    opts: &SolverOptions,
) -> Result<Vec<ChainLink>> {
    if ps.len() < 2 {
        return Err(Error::InvalidArgument(
            "chain needs at least two exponents".into(),
        ));
    }
    if ps.windows(2).any(|w| !(w[0] < w[1])) || ps.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::InvalidArgument(
            "exponents must be positive and strictly ascending".into(),
        ));
    }
    // G(μ^p)^{1/p} per grid point, each solved once.
    let mut roots = Vec::with_capacity(ps.len());
    for &p in ps {
        let g = solve(&mu.power(p)?, opts)?;
        roots.push(power_m(&g, 1.0 / p)?);
    }
    let mut out = Vec::with_capacity(ps.len() - 1);
    for w in 0..(ps.len() - 1) {
        let (p, q) = (ps[w], ps[w + 1]);
        let (low, high) = (&roots[w], &roots[w + 1]);
        let majorization = log_majorize(high, low, tol)?;
        let mut norm_checks = Vec::with_capacity(norms.len());
        for &spec in norms {
            let lhs = norm(high.hermitian(), spec)?;
            let rhs = norm(low.hermitian(), spec)?;
            norm_checks.push(NormCheck {
                spec,
                lhs,
                rhs,
                ok: lhs <= rhs + tol,
            });
        }
        let all_ok = majorization.holds && norm_checks.iter().all(|c| c.ok);
        out.push(ChainLink {
            p,
            q,
            majorization,
            norm_checks,
            all_ok,
        });
    }
    Ok(out)
}

fn solve(mu: &DiscreteMeasure, opts: &SolverOptions) -> Result<SpdMatrix> {
    let res = cartan_barycenter(mu, opts)?;
    if !res.converged {
        return Err(Error::SolverDidNotConverge {
            residual: res.residual_norm,
            iterations: res.iterations,
        });
    }
    Ok(res.point)
}
