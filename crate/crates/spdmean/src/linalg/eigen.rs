//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Rotations sweep the upper triangle in row-major order, so the output is
//! deterministic for identical input. The complex rotation zeroing entry
//! (p,q) is the real Jacobi rotation of `[[a_pp, |a_pq|], [|a_pq|, a_qq]]`
//! carried onto the phase of `a_pq`. A pivot fires only while it exceeds
//! the relative threshold `ε·sqrt(|a_pp|·|a_qq|)`; stopping on that
//! per-pivot condition (rather than an absolute off-diagonal mass) keeps
//! the small eigenvalues of graded positive definite matrices relatively
//! accurate, which the barycenter residuals depend on at high condition
//! numbers.

use num_complex::Complex64;

use super::{EigenSystem, HermitianMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;
const REL_PIVOT_EPS: f64 = 1e-15;

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come out sorted descending; ties break on the original index
/// of the dominant eigenvector component. Each eigenvector's phase is fixed
/// so its dominant component is real and positive.
pub fn eigh(h: &HermitianMatrix) -> Result<EigenSystem> {
    let m = h.dim();
    let mut a: Vec<Complex64> = h.entries().to_vec();
    let mut v = super::dense::identity(m);

    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for p in 0..m {
            for q in (p + 1)..m {
                let g = a[p * m + q].norm();
                if g == 0.0 {
                    continue;
                }
                let threshold =
                    REL_PIVOT_EPS * (a[p * m + p].re.abs() * a[q * m + q].re.abs()).sqrt();
                if g <= threshold {
                    continue;
                }
                rotate(&mut a, &mut v, m, p, q);
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps >= MAX_SWEEPS {
            return Err(Error::EigenNonConvergence {
                sweeps,
                off_diag: off_diag_norm(&a, m),
            });
        }
    }

    let mut order: Vec<usize> = (0..m).collect();
    let dominant: Vec<usize> = (0..m).map(|j| dominant_index(&v, m, j)).collect();
    order.sort_by(|&x, &y| {
        let lx = a[x * m + x].re;
        let ly = a[y * m + y].re;
        ly.partial_cmp(&lx)
            .unwrap()
            .then(dominant[x].cmp(&dominant[y]))
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&j| a[j * m + j].re).collect();
    let mut frame = vec![Complex64::ZERO; m * m];
    for (col, &j) in order.iter().enumerate() {
        // Fix the phase: dominant component real positive.
        let lead = v[dominant[j] * m + j];
        let phase = if lead.norm() > 0.0 {
            lead.conj() / lead.norm()
        } else {
            Complex64::ONE
        };
        for i in 0..m {
            frame[i * m + col] = v[i * m + j] * phase;
        }
    }

    Ok(EigenSystem::from_parts(m, eigenvalues, frame))
}

fn off_diag_norm(a: &[Complex64], m: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            s += 2.0 * a[i * m + j].norm_sqr();
        }
    }
    s.sqrt()
}

fn dominant_index(v: &[Complex64], m: usize, col: usize) -> usize {
    let mut best = 0;
    let mut best_mag = -1.0;
    for i in 0..m {
        let mag = v[i * m + col].norm_sqr();
        if mag > best_mag {
            best_mag = mag;
            best = i;
        }
    }
    best
}

/// One Jacobi rotation annihilating a[p][q], applied two-sided to `a` and
/// accumulated on the right into `v`.
fn rotate(a: &mut [Complex64], v: &mut [Complex64], m: usize, p: usize, q: usize) {
    let gamma = a[p * m + q];
    let g = gamma.norm();
    if g == 0.0 {
        return;
    }
    let omega = gamma / g;
    let alpha = a[p * m + p].re;
    let beta = a[q * m + q].re;

    let tau = (beta - alpha) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Columns p,q of A, mirrored onto the rows through hermiticity.
    for k in 0..m {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * m + p];
        let akq = a[k * m + q];
        let new_kp = c * akp - s * omega.conj() * akq;
        let new_kq = s * omega * akp + c * akq;
        a[k * m + p] = new_kp;
        a[p * m + k] = new_kp.conj();
        a[k * m + q] = new_kq;
        a[q * m + k] = new_kq.conj();
    }
    a[p * m + p] = Complex64::new(alpha - t * g, 0.0);
    a[q * m + q] = Complex64::new(beta + t * g, 0.0);
    a[p * m + q] = Complex64::ZERO;
    a[q * m + p] = Complex64::ZERO;

    for k in 0..m {
        let vkp = v[k * m + p];
        let vkq = v[k * m + q];
        v[k * m + p] = c * vkp - s * omega.conj() * vkq;
        v[k * m + q] = s * omega * vkp + c * vkq;
    }
}
