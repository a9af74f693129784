//! Matrix functions by spectral calculus, and the trace-metric geometry:
//! exponential/logarithm maps, geodesics, and the distance itself.

use super::{eigen, HermitianMatrix, SpdMatrix};
use crate::error::Result;

/// Applies a scalar map to the spectrum: `V diag(f(λ)) V*`.
pub fn matrix_function(a: &HermitianMatrix, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    eigen::eigh(a)?.apply(f)
}

/// Principal matrix logarithm of a positive definite matrix.
pub fn log_m(a: &SpdMatrix) -> Result<HermitianMatrix> {
    eigen::eigh(a.hermitian())?.apply(f64::ln)
}

/// Matrix exponential of a Hermitian matrix; always positive definite.
pub fn exp_m(h: &HermitianMatrix) -> Result<SpdMatrix> {
    eigen::eigh(h)?.apply_positive(f64::exp)
}

/// Real matrix power `A^t` (t = -1 inverts, t = 1/2 is the square root).
pub fn power_m(a: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    eigen::eigh(a.hermitian())?.apply_positive(|lam| lam.powf(t))
}

/// Square root and inverse square root from one shared eigendecomposition.
pub fn sqrt_invsqrt(a: &SpdMatrix) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let es = eigen::eigh(a.hermitian())?;
    let sqrt = es.apply(f64::sqrt)?;
    let invsqrt = es.apply(|lam| 1.0 / lam.sqrt())?;
    Ok((sqrt, invsqrt))
}

/// Riemannian exponential `exp_A(X) = A^{1/2} exp(A^{-1/2} X A^{-1/2}) A^{1/2}`.
pub fn riem_exp(a: &SpdMatrix, x: &HermitianMatrix) -> Result<SpdMatrix> {
    a.hermitian().check_dim(x.dim())?;
    let es = eigen::eigh(a.hermitian())?;
    let inner = exp_m(&es.inner_at(x)?)?;
    SpdMatrix::new(es.outer_from(inner.hermitian())?)
}

/// Riemannian logarithm `log_A(B) = A^{1/2} log(A^{-1/2} B A^{-1/2}) A^{1/2}`,
/// the inverse of `riem_exp` at the same base point.
pub fn riem_log(a: &SpdMatrix, b: &SpdMatrix) -> Result<HermitianMatrix> {
    a.hermitian().check_dim(b.dim())?;
    let es = eigen::eigh(a.hermitian())?;
    let inner = eigen::eigh(&es.inner_at(b.hermitian())?)?.apply(f64::ln)?;
    es.outer_from(&inner)
}

/// Trace metric `d(A,B) = ||log(A^{-1/2} B A^{-1/2})||_F`, the geodesic
/// distance of the affine-invariant structure.
pub fn trace_metric(a: &SpdMatrix, b: &SpdMatrix) -> Result<f64> {
    a.hermitian().check_dim(b.dim())?;
    let es_a = eigen::eigh(a.hermitian())?;
    let inner = es_a.inner_at(b.hermitian())?;
    let es = eigen::eigh(&inner)?;
    let sum: f64 = es.eigenvalues().iter().map(|&lam| lam.ln().powi(2)).sum();
    Ok(sum.sqrt())
}

/// Weighted geometric mean `A #_t B = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}`.
///
/// For t in [0,1] this is the geodesic segment from A to B; other t extend it.
pub fn geodesic(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    a.hermitian().check_dim(b.dim())?;
    let es = eigen::eigh(a.hermitian())?;
    let inner = SpdMatrix::new(es.inner_at(b.hermitian())?)?;
    let powered = power_m(&inner, t)?;
    SpdMatrix::new(es.outer_from(powered.hermitian())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn rel_close(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> bool {
        let scale = 1.0 + b.frobenius_norm();
        a.sub(b).unwrap().frobenius_norm() <= tol * scale
    }

    #[test]
    fn diagonal_closed_forms() {
        let a = SpdMatrix::diagonal(&[1.0, 4.0]).unwrap();
        let s = matrix_function(a.hermitian(), f64::sqrt).unwrap();
        assert!(rel_close(&s, &HermitianMatrix::diagonal(&[1.0, 2.0]), 1e-14));

        let p = power_m(&SpdMatrix::diagonal(&[4.0, 9.0]).unwrap(), 0.5).unwrap();
        assert!(rel_close(
            p.hermitian(),
            &HermitianMatrix::diagonal(&[2.0, 3.0]),
            1e-14
        ));
    }

    #[test]
    fn identity_map_is_identity() {
        let a = SpdMatrix::from_real(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let same = matrix_function(a.hermitian(), |x| x).unwrap();
        assert!(rel_close(&same, a.hermitian(), 1e-12));
    }

    #[test]
    fn log_of_two_by_two() {
        // log([[2,1],[1,2]]) has eigenvalues log 3 and 0.
        let a = SpdMatrix::from_real(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let l = log_m(&a).unwrap();
        let es = eigen::eigh(&l).unwrap();
        assert!((es.eigenvalues()[0] - 3.0_f64.ln()).abs() < 1e-13);
        assert!(es.eigenvalues()[1].abs() < 1e-13);
    }

    #[test]
    fn log_identity_is_zero() {
        let l = log_m(&SpdMatrix::identity(3)).unwrap();
        assert!(l.frobenius_norm() < 1e-14);
    }

    #[test]
    fn exp_log_roundtrip() {
        let a = SpdMatrix::from_real(2, &[3.0, 1.0, 1.0, 2.0]).unwrap();
        let back = exp_m(&log_m(&a).unwrap()).unwrap();
        assert!(rel_close(back.hermitian(), a.hermitian(), 1e-10));
    }

    #[test]
    fn power_compositions() {
        let a = SpdMatrix::from_real(2, &[2.0, -0.5, -0.5, 1.0]).unwrap();
        let st = power_m(&power_m(&a, 0.5).unwrap(), 3.0).unwrap();
        let direct = power_m(&a, 1.5).unwrap();
        assert!(rel_close(st.hermitian(), direct.hermitian(), 1e-10));

        let inv = power_m(&a, -1.0).unwrap();
        let prod = HermitianMatrix::new(
            2,
            super::super::dense::mul(inv.entries(), a.entries(), 2),
        )
        .unwrap();
        assert!(rel_close(&prod, &HermitianMatrix::identity(2), 1e-10));
    }

    #[test]
    fn function_undefined_on_spectrum() {
        let a = SpdMatrix::diagonal(&[1.0, 2.0]).unwrap();
        let r = matrix_function(a.hermitian(), |x| (x - 2.0).ln());
        assert!(matches!(r, Err(Error::FunctionUndefined { .. })));
    }

    #[test]
    fn riemannian_maps() {
        let b = SpdMatrix::from_real(2, &[2.0, 1.0, 1.0, 3.0]).unwrap();
        // Base point identity reduces to the flat maps.
        let l = riem_log(&SpdMatrix::identity(2), &b).unwrap();
        assert!(rel_close(&l, &log_m(&b).unwrap(), 1e-12));

        let a = SpdMatrix::from_real(2, &[4.0, 1.0, 1.0, 2.0]).unwrap();
        let zero = HermitianMatrix::zeros(2);
        assert!(rel_close(
            riem_exp(&a, &zero).unwrap().hermitian(),
            a.hermitian(),
            1e-12
        ));
        assert!(riem_log(&a, &a).unwrap().frobenius_norm() < 1e-12);

        // Round trip within 1e-9 relative.
        let x = riem_log(&a, &b).unwrap();
        let back = riem_exp(&a, &x).unwrap();
        assert!(rel_close(back.hermitian(), b.hermitian(), 1e-9));

        // Diagonal closed form: exp at I of diag(1,-1).
        let d = riem_exp(
            &SpdMatrix::identity(2),
            &HermitianMatrix::diagonal(&[1.0, -1.0]),
        )
        .unwrap();
        let expect = HermitianMatrix::diagonal(&[1.0_f64.exp(), (-1.0_f64).exp()]);
        assert!(rel_close(d.hermitian(), &expect, 1e-12));
    }

    #[test]
    fn metric_examples() {
        let a = SpdMatrix::from_real(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        assert!(trace_metric(&a, &a).unwrap() < 1e-12);

        let e2 = (2.0_f64).exp();
        let b = SpdMatrix::diagonal(&[e2, e2]).unwrap();
        let d = trace_metric(&SpdMatrix::identity(2), &b).unwrap();
        assert!((d - 2.0 * 2.0_f64.sqrt()).abs() < 1e-12);

        // Inversion symmetry.
        let c = SpdMatrix::from_real(2, &[3.0, -1.0, -1.0, 2.0]).unwrap();
        let d1 = trace_metric(&a, &c).unwrap();
        let d2 = trace_metric(&power_m(&a, -1.0).unwrap(), &power_m(&c, -1.0).unwrap()).unwrap();
        assert!((d1 - d2).abs() < 1e-10);
    }

    #[test]
    fn geodesic_examples() {
        let a = SpdMatrix::from_real(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let mid = geodesic(&a, &a, 0.5).unwrap();
        assert!(rel_close(mid.hermitian(), a.hermitian(), 1e-12));

        let g = geodesic(
            &SpdMatrix::diagonal(&[1.0, 4.0]).unwrap(),
            &SpdMatrix::diagonal(&[4.0, 1.0]).unwrap(),
            0.5,
        )
        .unwrap();
        assert!(rel_close(
            g.hermitian(),
            &HermitianMatrix::diagonal(&[2.0, 2.0]),
            1e-12
        ));

        // Base identity: I #_t B = B^t.
        let b = SpdMatrix::from_real(2, &[3.0, 1.0, 1.0, 2.0]).unwrap();
        let g = geodesic(&SpdMatrix::identity(2), &b, 0.3).unwrap();
        let p = power_m(&b, 0.3).unwrap();
        assert!(rel_close(g.hermitian(), p.hermitian(), 1e-11));
    }

    #[test]
    fn geodesic_endpoint_and_proportionality() {
        let a = SpdMatrix::from_real(2, &[5.0, 1.0, 1.0, 1.0]).unwrap();
        let b = SpdMatrix::from_real(2, &[1.0, 0.5, 0.5, 2.0]).unwrap();
        assert!(rel_close(
            geodesic(&a, &b, 0.0).unwrap().hermitian(),
            a.hermitian(),
            1e-12
        ));
        assert!(rel_close(
            geodesic(&a, &b, 1.0).unwrap().hermitian(),
            b.hermitian(),
            1e-11
        ));
        let full = trace_metric(&a, &b).unwrap();
        for t in [0.25, 0.5, 0.75] {
            let part = trace_metric(&a, &geodesic(&a, &b, t).unwrap()).unwrap();
            assert!((part - t * full).abs() < 1e-9);
        }
    }
}
