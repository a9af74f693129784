//! The Lie-Trotter limit of measure powers and the norm inequalities
//! surrounding it.
//!
//! As t -> 0 the curve `t -> G(μ^t)^{1/t}` converges to
//! `exp(∫ log X dμ)`, sandwiched between the matching power means
//! `(∫ X^{-t} dμ)^{-1/t}` and `(∫ X^t dμ)^{1/t}` in every unitarily
//! invariant norm.

use crate::barycenter::{cartan_barycenter, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::{eigh, exp_m, norm, power_m, trace_metric, NormSpec, SpdMatrix};
use crate::measure::DiscreteMeasure;

/// The sampled curve `t -> G(μ^t)^{1/t}` with distances to its limit.
#[derive(Clone, Debug)]
pub struct TrotterCurve {
    pub ts: Vec<f64>,
    pub points: Vec<SpdMatrix>,
    /// Trace metric from each point to `target`.
    pub distances: Vec<f64>,
    pub target: SpdMatrix,
}

/// The limit point `exp(∫ log X dμ)`.
pub fn lie_trotter_target(mu: &DiscreteMeasure) -> Result<SpdMatrix> {
    exp_m(&mu.log_mean()?)
}

/// Samples `G(μ^t)^{1/t}` over the grid and records distances to the limit.
///
/// The solver tolerance is tightened by `min(|t|, 1)` because the 1/t power
/// amplifies the solve residual by 1/t. Negative t are allowed (the curve is
/// inversion-symmetric). A failed solve aborts with the partial curve
/// attached.
pub fn lie_trotter_curve(
    mu: &DiscreteMeasure,
    ts: &[f64],
    opts: &SolverOptions,
) -> Result<TrotterCurve> {
    if ts.iter().any(|&t| t == 0.0 || !t.is_finite()) {
        return Err(Error::InvalidArgument(
            "curve grid values must be finite and nonzero".into(),
        ));
    }
    let target = lie_trotter_target(mu)?;
    let mut curve = TrotterCurve {
        ts: Vec::with_capacity(ts.len()),
        points: Vec::with_capacity(ts.len()),
        distances: Vec::with_capacity(ts.len()),
        target,
    };
    for &t in ts {
        match curve_point(mu, t, opts, &curve.target) {
            Ok((point, distance)) => {
                curve.ts.push(t);
                curve.points.push(point);
                curve.distances.push(distance);
            }
            Err(cause) => {
                return Err(Error::CurveAborted {
                    at_t: t,
                    cause: Box::new(cause),
                    partial: Box::new(curve),
                });
            }
        }
    }
    Ok(curve)
}

/// The eigensolver stops at an off-diagonal mass of 1e-13 of the input
/// norm, which caps how small an absolute Karcher residual can be measured;
/// tightening below this floor would only stall the solve.
const CURVE_TOL_FLOOR: f64 = 4e-13;

fn curve_point(
    mu: &DiscreteMeasure,
    t: f64,
    opts: &SolverOptions,
    target: &SpdMatrix,
) -> Result<(SpdMatrix, f64)> {
    let tightened = SolverOptions {
        residual_tol: (opts.residual_tol * t.abs().min(1.0)).max(CURVE_TOL_FLOOR),
        ..opts.clone()
    };
    let res = cartan_barycenter(&mu.power(t)?, &tightened)?;
    if !res.converged {
        return Err(Error::SolverDidNotConverge {
            residual: res.residual_norm,
            iterations: res.iterations,
        });
    }
    let point = power_m(&res.point, 1.0 / t)?;
    let distance = trace_metric(&point, target)?;
    Ok((point, distance))
}

/// Matrix power mean `(∫ X^t dμ)^{1/t}`; t = 1 is the arithmetic mean,
/// t = -1 the harmonic mean.
pub fn power_mean(mu: &DiscreteMeasure, t: f64) -> Result<SpdMatrix> {
    if t == 0.0 {
        return Err(Error::InvalidArgument("power mean needs t != 0".into()));
    }
    let moment = mu.power(t)?.arithmetic_mean()?;
    power_m(&moment, 1.0 / t)
}

/// Power means sampled over a grid.
pub fn power_mean_curve(mu: &DiscreteMeasure, ts: &[f64]) -> Result<Vec<(f64, SpdMatrix)>> {
    ts.iter()
        .map(|&t| Ok((t, power_mean(mu, t)?)))
        .collect()
}

/// Löwner comparison of raw power moments across one exponent pair
/// `0 < t' < t`: the moment at t' sits below the interpolated moment at t,
/// and mirrored for negative exponents.
#[derive(Clone, Debug)]
pub struct PowerMeanComparison {
    pub t_small: f64,
    pub t_large: f64,
    /// `∫X^{t'} <= (∫X^t)^{t'/t}` within tol.
    pub forward_ok: bool,
    /// `(∫X^{-t'})^{-1} >= (∫X^{-t})^{-t'/t}` within tol.
    pub inverse_ok: bool,
}

/// Checks the interpolation inequalities across adjacent positive grid
/// values (the grid is sorted descending internally).
pub fn power_mean_comparisons(
    mu: &DiscreteMeasure,
    ts: &[f64],
    tol: f64,
) -> Result<Vec<PowerMeanComparison>> {
    let mut grid: Vec<f64> = ts.iter().cloned().filter(|&t| t > 0.0).collect();
    grid.sort_by(|a, b| b.partial_cmp(a).unwrap());
    grid.dedup();
    let mut out = Vec::new();
    for w in grid.windows(2) {
        let (t, t_small) = (w[0], w[1]);
        let moment_small = mu.power(t_small)?.arithmetic_mean()?;
        let moment_large = mu.power(t)?.arithmetic_mean()?;
        let interpolated = power_m(&moment_large, t_small / t)?;
        let forward_ok = crate::measure::loewner_leq(&moment_small, &interpolated, tol)?;

        let neg_small = power_m(&mu.power(-t_small)?.arithmetic_mean()?, -1.0)?;
        let neg_interp = power_m(&mu.power(-t)?.arithmetic_mean()?, -t_small / t)?;
        let inverse_ok = crate::measure::loewner_leq(&neg_interp, &neg_small, tol)?;

        out.push(PowerMeanComparison {
            t_small,
            t_large: t,
            forward_ok,
            inverse_ok,
        });
    }
    Ok(out)
}

/// Norm values at one grid point of the sandwich.
#[derive(Clone, Debug)]
pub struct SandwichRow {
    pub t: f64,
    /// `|||(∫ X^{-t} dμ)^{-1/t}|||`.
    pub lower: f64,
    /// `|||G(μ^t)^{1/t}|||`.
    pub middle: f64,
    /// `|||(∫ X^t dμ)^{1/t}|||`.
    pub upper: f64,
    pub ordered: bool,
}

/// Outcome of the sandwich check over a descending positive grid.
#[derive(Clone, Debug)]
pub struct SandwichReport {
    pub rows: Vec<SandwichRow>,
    pub target_norm: f64,
    /// Every row satisfies lower <= middle <= target <= upper within tol.
    pub all_ordered: bool,
    /// As t descends: middle and lower nondecreasing, upper nonincreasing.
    pub middle_monotone: bool,
    pub outer_monotone: bool,
}

/// Evaluates the norm sandwich
/// `|||(∫X^{-t})^{-1/t}||| <= |||G(μ^t)^{1/t}||| <= |||target||| <= |||(∫X^t)^{1/t}|||`
/// at every grid t and the monotone approach of all three curves to the
/// target as t decreases.
pub fn sandwich_check(
    mu: &DiscreteMeasure,
    ts: &[f64],
    spec: NormSpec,
    tol: f64,
) -> Result<SandwichReport> {
    sandwich_check_with(mu, ts, spec, tol, &SolverOptions::default())
}

pub fn sandwich_check_with(
    mu: &DiscreteMeasure,
    ts: &[f64],
    spec: NormSpec,
    tol: f64,
    opts: &SolverOptions,
) -> Result<SandwichReport> {
    if ts.is_empty() {
        return Err(Error::InvalidArgument("sandwich grid is empty".into()));
    }
    if ts.iter().any(|&t| !(t > 0.0)) || ts.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::InvalidArgument(
            "sandwich grid must be positive and strictly descending".into(),
        ));
    }
    let target = lie_trotter_target(mu)?;
    let target_norm = norm(target.hermitian(), spec)?;
    let mut rows = Vec::with_capacity(ts.len());
    for &t in ts {
        let (point, _) = curve_point(mu, t, opts, &target)?;
        let middle = norm(point.hermitian(), spec)?;
        let lower = norm(power_mean(mu, -t)?.hermitian(), spec)?;
        let upper = norm(power_mean(mu, t)?.hermitian(), spec)?;
        let ordered =
            lower <= middle + tol && middle <= target_norm + tol && target_norm <= upper + tol;
        rows.push(SandwichRow {
            t,
            lower,
            middle,
            upper,
            ordered,
        });
    }
    let all_ordered = rows.iter().all(|r| r.ordered);
    let middle_monotone = rows
        .windows(2)
        .all(|w| w[1].middle >= w[0].middle - tol);
    let outer_monotone = rows
        .windows(2)
        .all(|w| w[1].upper <= w[0].upper + tol && w[1].lower >= w[0].lower - tol);
    Ok(SandwichReport {
        rows,
        target_norm,
        all_ordered,
        middle_monotone,
        outer_monotone,
    })
}

/// One sampled moment value.
#[derive(Clone, Debug)]
pub struct MomentEntry {
    pub exponent: f64,
    pub value: f64,
}

/// Moment diagnostics of a measure: the mixed moments
/// `∫ (||X|| + ||X^{-1}||)^r dμ` that gate the Lie-Trotter formula, and the
/// log moments `∫ ||log X||_F^p dμ` that are always finite for finite
/// support. Also checks the per-atom bound
/// `||log X|| <= log(||X|| + ||X^{-1}||)` and its p-th power consequence
/// with the explicit constant `sqrt(m)·p/e`.
#[derive(Clone, Debug)]
pub struct IntegrabilityProfile {
    pub moments: Vec<MomentEntry>,
    pub log_moments: Vec<MomentEntry>,
    /// Max over atoms of `||log X|| - log(||X|| + ||X^{-1}||)`; <= 0 when
    /// the bound holds.
    pub log_bound_max_violation: f64,
    pub log_bound_ok: bool,
    /// For each p: `log_moment_p <= (sqrt(m)·p/e)^p · moment_1`.
    pub moment_implication_ok: bool,
}

const MOMENT_EXPONENTS: [f64; 3] = [0.5, 1.0, 2.0];
const LOG_MOMENT_EXPONENTS: [f64; 2] = [1.0, 2.0];

pub fn integrability_profile(mu: &DiscreteMeasure) -> Result<IntegrabilityProfile> {
    let m = mu.dim() as f64;
    // Per atom: ||X|| + ||X^{-1}||, ||log X||_op, ||log X||_F.
    let mut mixed = Vec::with_capacity(mu.len());
    let mut log_op = Vec::with_capacity(mu.len());
    let mut log_fro = Vec::with_capacity(mu.len());
    for atom in mu.atoms() {
        let es = eigh(atom.hermitian())?;
        let max = es.eigenvalues()[0];
        let min = es.eigenvalues()[atom.dim() - 1];
        mixed.push(max + 1.0 / min);
        log_op.push(max.ln().abs().max(min.ln().abs()));
        log_fro.push(
            es.eigenvalues()
                .iter()
                .map(|&lam| lam.ln().powi(2))
                .sum::<f64>()
                .sqrt(),
        );
    }
    let weighted = |values: &[f64], r: f64| -> f64 {
        mu.weights()
            .iter()
            .zip(values)
            .map(|(&w, &v)| w * v.powf(r))
            .sum()
    };
    let moments = MOMENT_EXPONENTS
        .iter()
        .map(|&r| MomentEntry {
            exponent: r,
            value: weighted(&mixed, r),
        })
        .collect();
    let log_moments: Vec<MomentEntry> = LOG_MOMENT_EXPONENTS
        .iter()
        .map(|&p| MomentEntry {
            exponent: p,
            value: weighted(&log_fro, p),
        })
        .collect();

    let log_bound_max_violation = log_op
        .iter()
        .zip(&mixed)
        .map(|(&l, &s)| l - s.ln())
        .fold(f64::NEG_INFINITY, f64::max);
    let moment_1 = weighted(&mixed, 1.0);
    let moment_implication_ok = log_moments.iter().all(|entry| {
        let p = entry.exponent;
        let c = m.sqrt() * p / std::f64::consts::E;
        entry.value <= c.powf(p) * moment_1 + 1e-12
    });
    Ok(IntegrabilityProfile {
        moments,
        log_moments,
        log_bound_max_violation,
        log_bound_ok: log_bound_max_violation <= 1e-10,
        moment_implication_ok,
    })
}

/// Least-squares slope of `log distance` against `log t`; the convergence
/// order of a curve sampled at small t.
pub fn log_log_slope(ts: &[f64], distances: &[f64]) -> f64 {
    let pairs: Vec<(f64, f64)> = ts
        .iter()
        .zip(distances)
        .filter(|&(&t, &d)| t > 0.0 && d > 0.0)
        .map(|(&t, &d)| (t.ln(), d.ln()))
        .collect();
    if pairs.len() < 2 {
        return f64::NAN;
    }
    let n = pairs.len() as f64;
    let mean_x: f64 = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y: f64 = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pairs
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    sxy / sxx
}
