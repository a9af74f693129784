//! Hermitian linear algebra and the Riemannian geometry of the positive
//! definite cone.
//!
//! Points live in the open cone of positive definite Hermitian matrices,
//! tangent vectors in the space of Hermitian matrices. The metric is the
//! affine-invariant trace metric `d(A,B) = ||log(A^{-1/2} B A^{-1/2})||_F`,
//! under which the cone is a complete simply connected manifold of
//! nonpositive curvature.

pub mod eigen;
pub mod functions;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eigen::eigh;
pub use functions::{
    exp_m, geodesic, log_m, matrix_function, power_m, riem_exp, riem_log, sqrt_invsqrt,
    trace_metric,
};

/// Default relative positivity floor: the smallest eigenvalue must exceed
/// this fraction of the largest for a matrix to count as positive definite.
pub const PD_FLOOR_DEFAULT: f64 = 1e-13;

/// An m×m complex Hermitian matrix, stored dense row-major.
///
/// The conjugate symmetry `a[i][j] == conj(a[j][i])` holds exactly: every
/// constructor symmetrizes its input as `(M + M*)/2`, which absorbs
/// floating-point asymmetry from upstream arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds a Hermitian matrix from arbitrary complex entries by
    /// symmetrizing `(M + M*)/2`.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != dim * dim {
            return Err(Error::BadEntryCount {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let mut e = entries;
        for i in 0..dim {
            e[i * dim + i] = Complex64::new(e[i * dim + i].re + 0.0, 0.0);
            for j in (i + 1)..dim {
                let h = 0.5 * (e[i * dim + j] + e[j * dim + i].conj());
                let (upper, lower) = mirror_pair(h);
                e[i * dim + j] = upper;
                e[j * dim + i] = lower;
            }
        }
        Ok(Self { dim, entries: e })
    }

    /// Builds from real entries (a real symmetric matrix embeds as Hermitian).
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        let complex: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(dim, complex)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::ONE;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let dim = values.len();
        let mut m = Self::zeros(dim);
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * dim + i] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Frobenius norm, `sqrt(sum |a_ij|^2)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Real trace (the imaginary part is identically zero for Hermitian input).
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i].re).sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Congruence `M · self · M` with Hermitian `M` (so `M* = M`), symmetrized.
    pub fn congruence_by(&self, m: &HermitianMatrix) -> Result<Self> {
        self.check_dim(m.dim)?;
        let tmp = dense::mul(&m.entries, &self.entries, self.dim);
        let raw = dense::mul(&tmp, &m.entries, self.dim);
        Self::new(self.dim, raw)
    }

    /// Congruence `U · self · U*` by a general (typically unitary) matrix in
    /// raw row-major form, symmetrized.
    pub fn congruence_by_raw(&self, u: &[Complex64]) -> Result<Self> {
        if u.len() != self.dim * self.dim {
            return Err(Error::BadEntryCount {
                expected: self.dim * self.dim,
                found: u.len(),
            });
        }
        let tmp = dense::mul(u, &self.entries, self.dim);
        let raw = dense::mul(&tmp, &dense::adjoint(u, self.dim), self.dim);
        Self::new(self.dim, raw)
    }

    pub(crate) fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim != other {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: other,
            })
        } else {
            Ok(())
        }
    }
}

/// Conjugate mirror of an upper-triangle entry, with signed zeros folded to
/// +0.0 so serialized matrices are byte-stable under symmetrization.
fn mirror_pair(h: Complex64) -> (Complex64, Complex64) {
    let re = h.re + 0.0;
    let im = h.im + 0.0;
    if im == 0.0 {
        let z = Complex64::new(re, 0.0);
        (z, z)
    } else {
        (Complex64::new(re, im), Complex64::new(re, -im))
    }
}

/// A positive definite Hermitian matrix, the manifold point type.
///
/// Construction validates that the smallest eigenvalue exceeds
/// `pd_floor` times the largest.
#[derive(Clone, Debug, PartialEq)]
pub struct SpdMatrix {
    h: HermitianMatrix,
}

impl SpdMatrix {
    /// Validates positive definiteness with the default floor.
    pub fn new(h: HermitianMatrix) -> Result<Self> {
        Self::with_floor(h, PD_FLOOR_DEFAULT)
    }

    /// Validates positive definiteness with an explicit relative floor.
    pub fn with_floor(h: HermitianMatrix, pd_floor: f64) -> Result<Self> {
        let es = eigen::eigh(&h)?;
        let max_eig = es.eigenvalues()[0];
        let min_eig = es.eigenvalues()[h.dim() - 1];
        if !(max_eig > 0.0) || !(min_eig > pd_floor * max_eig) {
            return Err(Error::NotPositiveDefinite {
                min_eig,
                max_eig,
            });
        }
        Ok(Self { h })
    }

    /// Builds from raw complex entries (symmetrized, then validated).
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        Self::new(HermitianMatrix::new(dim, entries)?)
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real(dim, entries)?)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            h: HermitianMatrix::identity(dim),
        }
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::NotPositiveDefinite {
                min_eig: values.iter().cloned().fold(f64::INFINITY, f64::min),
                max_eig: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            });
        }
        Ok(Self {
            h: HermitianMatrix::diagonal(values),
        })
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.h
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.h.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.h.entry(i, j)
    }

    pub fn entries(&self) -> &[Complex64] {
        self.h.entries()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.h.frobenius_norm()
    }
}

/// Eigendecomposition of a Hermitian matrix: descending eigenvalues and the
/// unitary frame of column eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    dim: usize,
    eigenvalues: Vec<f64>,
    frame: Vec<Complex64>,
}

impl EigenSystem {
    pub(crate) fn from_parts(dim: usize, eigenvalues: Vec<f64>, frame: Vec<Complex64>) -> Self {
        Self {
            dim,
            eigenvalues,
            frame,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Row-major unitary matrix; column `j` is the eigenvector for
    /// `eigenvalues()[j]`.
    pub fn frame(&self) -> &[Complex64] {
        &self.frame
    }

    /// Spectral calculus: `frame · diag(f(λ)) · frame*`.
    ///
    /// Fails if `f` is not finite on the spectrum.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
        let mapped = self.map_eigenvalues(f)?;
        Ok(self.recompose(&mapped))
    }

    /// Spectral calculus for maps that stay strictly positive on the
    /// spectrum; the result is positive definite by construction.
    pub fn apply_positive(&self, f: impl Fn(f64) -> f64) -> Result<SpdMatrix> {
        let mapped = self.map_eigenvalues(f)?;
        let max = mapped.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = mapped.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(max > 0.0) || !(min > PD_FLOOR_DEFAULT * max) {
            return Err(Error::NotPositiveDefinite {
                min_eig: min,
                max_eig: max,
            });
        }
        Ok(SpdMatrix {
            h: self.recompose(&mapped),
        })
    }

    fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        self.eigenvalues
            .iter()
            .map(|&lam| {
                let v = f(lam);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::FunctionUndefined { eigenvalue: lam })
                }
            })
            .collect()
    }

    /// `frame · diag(values) · frame*`, computed on the upper triangle and
    /// mirrored so the result is Hermitian by construction.
    fn recompose(&self, values: &[f64]) -> HermitianMatrix {
        let m = self.dim;
        let mut out = vec![Complex64::ZERO; m * m];
        for i in 0..m {
            let mut diag = 0.0;
            for k in 0..m {
                diag += values[k] * self.frame[i * m + k].norm_sqr();
            }
            out[i * m + i] = Complex64::new(diag + 0.0, 0.0);
            for j in (i + 1)..m {
                let mut z = Complex64::ZERO;
                for k in 0..m {
                    z += values[k] * self.frame[i * m + k] * self.frame[j * m + k].conj();
                }
                let (upper, lower) = mirror_pair(z);
                out[i * m + j] = upper;
                out[j * m + i] = lower;
            }
        }
        HermitianMatrix {
            dim: m,
            entries: out,
        }
    }

    /// `frame · diag(eigenvalues) · frame*`, the original matrix.
    pub fn reconstruct(&self) -> HermitianMatrix {
        self.recompose(&self.eigenvalues)
    }

    /// `Z^{-1/2} X Z^{-1/2}` for the decomposed matrix `Z`, i.e. `X`
    /// expressed in the normal coordinates of the base point: a unitary
    /// congruence by the frame followed by an exact entrywise scaling by
    /// `(λ_i λ_j)^{-1/2}`. The factored form preserves the relative
    /// accuracy of small eigenvalues at high condition numbers, where a
    /// dense product with `Z^{-1/2}` would swamp them with roundoff from
    /// the large ones.
    pub fn inner_at(&self, x: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.scaled_congruence(x, |lam| 1.0 / lam.sqrt(), false)
    }

    /// The inverse transform `Z^{1/2} Y Z^{1/2}`, taking a matrix back out
    /// of the base point's normal coordinates.
    pub fn outer_from(&self, y: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.scaled_congruence(y, f64::sqrt, true)
    }

    fn scaled_congruence(
        &self,
        x: &HermitianMatrix,
        scale_of: impl Fn(f64) -> f64,
        outward: bool,
    ) -> Result<HermitianMatrix> {
        x.check_dim(self.dim)?;
        let m = self.dim;
        let scales: Vec<f64> = self.eigenvalues.iter().map(|&lam| scale_of(lam)).collect();
        if scales.iter().any(|s| !s.is_finite()) {
            return Err(Error::FunctionUndefined {
                eigenvalue: *self.eigenvalues.last().unwrap(),
            });
        }
        // Compensated products: the unitary congruence of a strongly graded
        // matrix cancels catastrophically in the entries destined to be
        // small, and those entries carry the small eigenvalues.
        let vh = dense::adjoint(&self.frame, m);
        let mut y = if outward {
            x.entries().to_vec()
        } else {
            dense::mul_compensated(&dense::mul_compensated(&vh, x.entries(), m), &self.frame, m)
        };
        for i in 0..m {
            for j in 0..m {
                y[i * m + j] *= scales[i] * scales[j];
            }
        }
        if outward {
            y = dense::mul_compensated(&dense::mul_compensated(&self.frame, &y, m), &vh, m);
        }
        HermitianMatrix::new(m, y)
    }
}

/// Selector for the unitarily invariant norms used throughout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NormSpec {
    Frobenius,
    Operator,
    KyFan { k: usize },
    Schatten { p: f64 },
}

/// Unitarily invariant norm of a Hermitian matrix.
///
/// Singular values of a Hermitian matrix are the absolute eigenvalues; the
/// Ky Fan k-norm sums the k largest, Schatten-p takes the p-th power mean.
pub fn norm(a: &HermitianMatrix, spec: NormSpec) -> Result<f64> {
    match spec {
        NormSpec::Frobenius => Ok(a.frobenius_norm()),
        NormSpec::Operator => {
            let es = eigen::eigh(a)?;
            Ok(es
                .eigenvalues()
                .iter()
                .map(|l| l.abs())
                .fold(0.0, f64::max))
        }
        NormSpec::KyFan { k } => {
            if k == 0 || k > a.dim() {
                return Err(Error::InvalidArgument(format!(
                    "ky-fan index {k} out of range 1..={}",
                    a.dim()
                )));
            }
            let mut sv = singular_values(a)?;
            sv.truncate(k);
            Ok(sv.iter().sum())
        }
        NormSpec::Schatten { p } => {
            if !(p >= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "schatten exponent {p} must be >= 1"
                )));
            }
            let sv = singular_values(a)?;
            Ok(sv.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p))
        }
    }
}

/// Absolute eigenvalues sorted descending.
fn singular_values(a: &HermitianMatrix) -> Result<Vec<f64>> {
    let es = eigen::eigh(a)?;
    let mut sv: Vec<f64> = es.eigenvalues().iter().map(|l| l.abs()).collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(sv)
}

/// Dense row-major complex matrix helpers for the non-Hermitian
/// intermediates (products, frames, minors).
pub(crate) mod dense {
    use num_complex::Complex64;

    pub fn mul(a: &[Complex64], b: &[Complex64], m: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::ZERO; m * m];
        for i in 0..m {
            for k in 0..m {
                let aik = a[i * m + k];
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..m {
                    out[i * m + j] += aik * b[k * m + j];
                }
            }
        }
        out
    }

    /// Product with Neumaier-compensated accumulation, separately on the
    /// real and imaginary parts. Spends a few extra flops to remove the
    /// summation cancellation error, which dominates when graded matrices
    /// pass through unitary congruences.
    pub fn mul_compensated(a: &[Complex64], b: &[Complex64], m: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::ZERO; m * m];
        for i in 0..m {
            for j in 0..m {
                let (mut s_re, mut c_re) = (0.0_f64, 0.0_f64);
                let (mut s_im, mut c_im) = (0.0_f64, 0.0_f64);
                for k in 0..m {
                    let p = a[i * m + k] * b[k * m + j];
                    let t = s_re + p.re;
                    c_re += if s_re.abs() >= p.re.abs() {
                        (s_re - t) + p.re
                    } else {
                        (p.re - t) + s_re
                    };
                    s_re = t;
                    let t = s_im + p.im;
                    c_im += if s_im.abs() >= p.im.abs() {
                        (s_im - t) + p.im
                    } else {
                        (p.im - t) + s_im
                    };
                    s_im = t;
                }
                out[i * m + j] = Complex64::new(s_re + c_re, s_im + c_im);
            }
        }
        out
    }

    pub fn adjoint(a: &[Complex64], m: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::ZERO; m * m];
        for i in 0..m {
            for j in 0..m {
                out[j * m + i] = a[i * m + j].conj();
            }
        }
        out
    }

    pub fn identity(m: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::ZERO; m * m];
        for i in 0..m {
            out[i * m + i] = Complex64::ONE;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_symmetrizes() {
        let a = HermitianMatrix::new(
            2,
            vec![
                Complex64::new(1.0, 0.5),
                Complex64::new(2.0, 1.0),
                Complex64::new(2.0, 3.0),
                Complex64::new(4.0, -0.25),
            ],
        )
        .unwrap();
        assert_eq!(a.entry(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(a.entry(1, 1), Complex64::new(4.0, 0.0));
        assert_eq!(a.entry(0, 1), a.entry(1, 0).conj());
        assert_eq!(a.entry(0, 1), Complex64::new(2.0, -1.0));
    }

    #[test]
    fn spd_rejects_indefinite() {
        let h = HermitianMatrix::diagonal(&[1.0, -2.0]);
        assert!(matches!(
            SpdMatrix::new(h),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let h = HermitianMatrix::diagonal(&[1.0, 0.0]);
        assert!(SpdMatrix::new(h).is_err());
    }

    #[test]
    fn norm_examples() {
        let a = HermitianMatrix::diagonal(&[3.0, 2.0, 1.0]);
        assert_eq!(norm(&a, NormSpec::KyFan { k: 2 }).unwrap(), 5.0);
        assert_eq!(norm(&a, NormSpec::Operator).unwrap(), 3.0);
        let b = HermitianMatrix::diagonal(&[3.0, 4.0]);
        assert!((norm(&b, NormSpec::Frobenius).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn ky_fan_full_equals_schatten_one() {
        let a = HermitianMatrix::from_real(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let kf = norm(&a, NormSpec::KyFan { k: 2 }).unwrap();
        let s1 = norm(&a, NormSpec::Schatten { p: 1.0 }).unwrap();
        assert!((kf - s1).abs() < 1e-12);
    }

    #[test]
    fn norm_rejects_bad_spec() {
        let a = HermitianMatrix::identity(2);
        assert!(norm(&a, NormSpec::KyFan { k: 3 }).is_err());
        assert!(norm(&a, NormSpec::KyFan { k: 0 }).is_err());
        assert!(norm(&a, NormSpec::Schatten { p: 0.5 }).is_err());
    }
}
