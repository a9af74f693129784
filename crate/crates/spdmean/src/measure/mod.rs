//! Finitely supported probability measures on the positive definite cone:
//! push-forwards, measure powers, truncation, moments, Wasserstein distance,
//! and the stochastic order.

pub mod transport;

use crate::error::{Error, Result};
use crate::linalg::{eigh, log_m, norm, power_m, HermitianMatrix, NormSpec, SpdMatrix};

pub use transport::{stochastic_leq, wasserstein};

/// Frobenius distance below which two atoms are considered equal and merged.
const ATOM_MERGE_TOL: f64 = 1e-12;

/// Weight sums must match 1 to this tolerance after construction.
const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A probability measure `sum_j w_j δ_{X_j}` with finitely many positive
/// definite atoms. Weights are strictly positive and sum to one; atoms share
/// one dimension.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    atoms: Vec<SpdMatrix>,
    weights: Vec<f64>,
}

/// Where the mass of atoms excluded by [`DiscreteMeasure::truncate`] goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TruncationAnchor {
    /// Replacement atom `(1/n) I`.
    Low,
    /// Replacement atom `n I`.
    High,
    /// Replacement atom `I`.
    Identity,
}

impl DiscreteMeasure {
    /// Builds a measure from atoms and weights.
    ///
    /// Zero-weight atoms are dropped; negative weights are rejected; the
    /// remaining weights must sum to 1 within 1e-12. Atoms closer than 1e-12
    /// in Frobenius distance are merged with summed weights.
    pub fn new(atoms: Vec<SpdMatrix>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidMeasure(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let pairs: Vec<(SpdMatrix, f64)> = atoms
            .into_iter()
            .zip(weights)
            .filter(|(_, w)| *w > 0.0)
            .collect();
        if pairs.is_empty() {
            return Err(Error::InvalidMeasure("measure has no mass".into()));
        }
        let dim = pairs[0].0.dim();
        if pairs.iter().any(|(a, _)| a.dim() != dim) {
            return Err(Error::InvalidMeasure(
                "atoms must share one dimension".into(),
            ));
        }
        let (atoms, weights) = merge_atoms(pairs);
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {sum}, not 1"
            )));
        }
        Ok(Self { atoms, weights })
    }

    /// Like [`DiscreteMeasure::new`] but rescales the weights to sum to 1
    /// first (used by generators and the lenient file loader).
    pub fn normalized(atoms: Vec<SpdMatrix>, weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {sum}, cannot normalize"
            )));
        }
        let scaled = weights.iter().map(|w| w / sum).collect();
        Self::new(atoms, scaled)
    }

    /// The point measure `δ_A`.
    pub fn dirac(atom: SpdMatrix) -> Self {
        Self {
            atoms: vec![atom],
            weights: vec![1.0],
        }
    }

    pub fn atoms(&self) -> &[SpdMatrix] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].dim()
    }

    /// Push-forward under a map of atoms; weights follow their atoms and
    /// coinciding images merge.
    pub fn pushforward(
        &self,
        map: impl Fn(&SpdMatrix) -> Result<SpdMatrix>,
    ) -> Result<DiscreteMeasure> {
        let mut mapped = Vec::with_capacity(self.len());
        for (atom, &w) in self.atoms.iter().zip(&self.weights) {
            mapped.push((map(atom)?, w));
        }
        let dim = mapped[0].0.dim();
        if mapped.iter().any(|(a, _)| a.dim() != dim) {
            return Err(Error::InvalidMeasure(
                "push-forward images must share one dimension".into(),
            ));
        }
        let (atoms, weights) = merge_atoms(mapped);
        Ok(DiscreteMeasure { atoms, weights })
    }

    /// The measure power `μ^t`, the push-forward under `X -> X^t`.
    pub fn power(&self, t: f64) -> Result<DiscreteMeasure> {
        if t == 0.0 {
            return Err(Error::InvalidArgument("measure power needs t != 0".into()));
        }
        self.pushforward(|a| power_m(a, t))
    }

    /// Restricts to the band `(1/n) I <= X <= n I` and reassigns the mass of
    /// excluded atoms to the anchor atom.
    pub fn truncate(&self, n: f64, anchor: TruncationAnchor) -> Result<DiscreteMeasure> {
        if !(n > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "truncation level {n} must exceed 1"
            )));
        }
        let dim = self.dim();
        let replacement = match anchor {
            TruncationAnchor::Low => scaled_identity(dim, 1.0 / n),
            TruncationAnchor::High => scaled_identity(dim, n),
            TruncationAnchor::Identity => SpdMatrix::identity(dim),
        };
        let mut kept: Vec<(SpdMatrix, f64)> = Vec::with_capacity(self.len());
        let mut excluded_mass = 0.0;
        for (atom, &w) in self.atoms.iter().zip(&self.weights) {
            let es = eigh(atom.hermitian())?;
            let max = es.eigenvalues()[0];
            let min = es.eigenvalues()[dim - 1];
            if min >= 1.0 / n && max <= n {
                kept.push((atom.clone(), w));
            } else {
                excluded_mass += w;
            }
        }
        if excluded_mass > 0.0 {
            kept.push((replacement, excluded_mass));
        }
        let (atoms, weights) = merge_atoms(kept);
        Ok(DiscreteMeasure { atoms, weights })
    }

    /// `∫ X dμ`, the weighted arithmetic mean of the atoms.
    pub fn arithmetic_mean(&self) -> Result<SpdMatrix> {
        let mut acc = HermitianMatrix::zeros(self.dim());
        for (atom, &w) in self.atoms.iter().zip(&self.weights) {
            acc = acc.add(&atom.hermitian().scale(w))?;
        }
        SpdMatrix::new(acc)
    }

    /// `(∫ X^{-1} dμ)^{-1}`, the weighted harmonic mean.
    pub fn harmonic_mean(&self) -> Result<SpdMatrix> {
        let mut acc = HermitianMatrix::zeros(self.dim());
        for (atom, &w) in self.atoms.iter().zip(&self.weights) {
            acc = acc.add(&power_m(atom, -1.0)?.hermitian().scale(w))?;
        }
        power_m(&SpdMatrix::new(acc)?, -1.0)
    }

    /// `∫ log X dμ`, the tangent-space mean.
    pub fn log_mean(&self) -> Result<HermitianMatrix> {
        let mut acc = HermitianMatrix::zeros(self.dim());
        for (atom, &w) in self.atoms.iter().zip(&self.weights) {
            acc = acc.add(&log_m(atom)?.scale(w))?;
        }
        Ok(acc)
    }
}

fn scaled_identity(dim: usize, factor: f64) -> SpdMatrix {
    SpdMatrix::diagonal(&vec![factor; dim]).expect("positive scalar")
}

fn merge_atoms(pairs: Vec<(SpdMatrix, f64)>) -> (Vec<SpdMatrix>, Vec<f64>) {
    let mut atoms: Vec<SpdMatrix> = Vec::with_capacity(pairs.len());
    let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
    for (atom, w) in pairs {
        let existing = atoms.iter().position(|a| {
            a.hermitian()
                .sub(atom.hermitian())
                .map(|d| d.frobenius_norm() <= ATOM_MERGE_TOL)
                .unwrap_or(false)
        });
        match existing {
            Some(i) => weights[i] += w,
            None => {
                atoms.push(atom);
                weights.push(w);
            }
        }
    }
    (atoms, weights)
}

/// Löwner order test: `A <= B` up to a slack relative to `||B||`.
///
/// True iff `λ_min(B - A) >= -tol·(1 + ||B||_op)`.
pub fn loewner_leq(a: &SpdMatrix, b: &SpdMatrix, tol: f64) -> Result<bool> {
    a.hermitian().check_dim(b.dim())?;
    let diff = b.hermitian().sub(a.hermitian())?;
    let min_eig = *eigh(&diff)?.eigenvalues().last().unwrap();
    let scale = 1.0 + norm(b.hermitian(), NormSpec::Operator)?;
    Ok(min_eig >= -tol * scale)
}

/// A joint weight matrix over atom pairs whose marginals are two given
/// measures.
#[derive(Clone, Debug)]
pub struct Coupling {
    row_measure: DiscreteMeasure,
    col_measure: DiscreteMeasure,
    mass: Vec<f64>,
}

/// Row/column sums of a coupling must match the marginals this closely.
const MARGINAL_TOL: f64 = 1e-10;

impl Coupling {
    /// Validates the prescribed marginals and wraps the mass matrix
    /// (row-major, rows indexing `row_measure` atoms).
    pub fn new(
        row_measure: DiscreteMeasure,
        col_measure: DiscreteMeasure,
        mass: Vec<f64>,
    ) -> Result<Self> {
        let n = row_measure.len();
        let k = col_measure.len();
        if mass.len() != n * k {
            return Err(Error::InvalidMeasure(format!(
                "coupling mass has {} entries, expected {}",
                mass.len(),
                n * k
            )));
        }
        if mass.iter().any(|&x| x < -MARGINAL_TOL || !x.is_finite()) {
            return Err(Error::InvalidMeasure(
                "coupling mass must be nonnegative".into(),
            ));
        }
        for i in 0..n {
            let row_sum: f64 = (0..k).map(|j| mass[i * k + j]).sum();
            if (row_sum - row_measure.weights()[i]).abs() > MARGINAL_TOL {
                return Err(Error::InvalidMeasure(format!(
                    "coupling row {i} sums to {row_sum}, expected {}",
                    row_measure.weights()[i]
                )));
            }
        }
        for j in 0..k {
            let col_sum: f64 = (0..n).map(|i| mass[i * k + j]).sum();
            if (col_sum - col_measure.weights()[j]).abs() > MARGINAL_TOL {
                return Err(Error::InvalidMeasure(format!(
                    "coupling column {j} sums to {col_sum}, expected {}",
                    col_measure.weights()[j]
                )));
            }
        }
        Ok(Self {
            row_measure,
            col_measure,
            mass,
        })
    }

    pub fn row_measure(&self) -> &DiscreteMeasure {
        &self.row_measure
    }

    pub fn col_measure(&self) -> &DiscreteMeasure {
        &self.col_measure
    }

    /// Mass on the pair (row atom i, column atom j).
    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.col_measure.len() + j]
    }

    pub fn mass_matrix(&self) -> &[f64] {
        &self.mass
    }
}
