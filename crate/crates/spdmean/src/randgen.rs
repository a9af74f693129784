//! Seeded random instances: Haar-like unitary frames, conditioned spectra,
//! and measures built from them.
//!
//! Frames come from a complex Gaussian matrix put through modified
//! Gram-Schmidt; the R diagonal is positive by construction, which pins the
//! phase ambiguity and keeps draws reproducible per seed. Spectra are
//! log-uniform in `[1/sqrt(κ), sqrt(κ)]` so the condition number is capped
//! at κ.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{HermitianMatrix, SpdMatrix};
use crate::measure::DiscreteMeasure;

pub type SeededRng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut SeededRng) -> f64 {
    StandardNormal.sample(rng)
}

/// Haar-like random unitary: complex Ginibre draw, then modified
/// Gram-Schmidt with positive column norms.
pub fn random_unitary(rng: &mut SeededRng, m: usize) -> Vec<Complex64> {
    let mut cols: Vec<Vec<Complex64>> = (0..m)
        .map(|_| {
            (0..m)
                .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
                .collect()
        })
        .collect();
    for j in 0..m {
        for prev in 0..j {
            let mut proj = Complex64::ZERO;
            for i in 0..m {
                proj += cols[prev][i].conj() * cols[j][i];
            }
            for i in 0..m {
                let sub = proj * cols[prev][i];
                cols[j][i] -= sub;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    let mut q = vec![Complex64::ZERO; m * m];
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            q[i * m + j] = z;
        }
    }
    q
}

/// Random positive definite matrix `Q diag(λ) Q*` with log-uniform spectrum
/// in `[κ^{-1/2}, κ^{1/2}]`.
pub fn random_spd(rng: &mut SeededRng, m: usize, kappa: f64) -> SpdMatrix {
    let q = random_unitary(rng, m);
    let spectrum: Vec<f64> = (0..m)
        .map(|_| {
            let u: f64 = rng.random_range(-0.5..=0.5);
            kappa.powf(u)
        })
        .collect();
    let diag = HermitianMatrix::diagonal(&spectrum);
    let h = diag.congruence_by_raw(&q).expect("dimension");
    SpdMatrix::new(h).expect("spectrum is positive")
}

/// Random Hermitian matrix with independent Gaussian entries at `scale`.
pub fn random_hermitian(rng: &mut SeededRng, m: usize, scale: f64) -> HermitianMatrix {
    let mut entries = vec![Complex64::ZERO; m * m];
    for i in 0..m {
        entries[i * m + i] = Complex64::new(scale * gaussian(rng), 0.0);
        for j in (i + 1)..m {
            let z = Complex64::new(scale * gaussian(rng), scale * gaussian(rng));
            entries[i * m + j] = z;
            entries[j * m + i] = z.conj();
        }
    }
    HermitianMatrix::new(m, entries).expect("square entry list")
}

/// Random measure with `n` atoms of dimension `m` and condition cap `κ`.
/// Weights are uniform unless `weighted`, in which case they are normalized
/// exponential draws.
pub fn random_measure(
    rng: &mut SeededRng,
    m: usize,
    n: usize,
    kappa: f64,
    weighted: bool,
) -> DiscreteMeasure {
    let atoms: Vec<SpdMatrix> = (0..n).map(|_| random_spd(rng, m, kappa)).collect();
    let weights = if weighted {
        let raw: Vec<f64> = (0..n)
            .map(|_| -(rng.random_range(1e-6..1.0_f64)).ln())
            .collect();
        let sum: f64 = raw.iter().sum();
        raw.iter().map(|w| w / sum).collect()
    } else {
        vec![1.0 / n as f64; n]
    };
    DiscreteMeasure::normalized(atoms, weights).expect("constructed weights are positive")
}

/// Random measure whose atoms all commute (shared random frame, random
/// diagonals): closed forms exist for everything, which makes these the
/// exactness fixtures.
pub fn random_commuting_measure(
    rng: &mut SeededRng,
    m: usize,
    n: usize,
    kappa: f64,
) -> DiscreteMeasure {
    let q = random_unitary(rng, m);
    let atoms: Vec<SpdMatrix> = (0..n)
        .map(|_| {
            let spectrum: Vec<f64> = (0..m)
                .map(|_| {
                    let u: f64 = rng.random_range(-0.5..=0.5);
                    kappa.powf(u)
                })
                .collect();
            let diag = HermitianMatrix::diagonal(&spectrum);
            SpdMatrix::new(diag.congruence_by_raw(&q).expect("dimension"))
                .expect("spectrum is positive")
        })
        .collect();
    DiscreteMeasure::normalized(atoms, vec![1.0; n]).expect("uniform weights")
}

/// An ordered pair `μ <= ν` built by construction: ν's atoms are μ's atoms
/// (permuted within equal weights) plus positive semidefinite bumps.
pub fn random_ordered_pair(
    rng: &mut SeededRng,
    m: usize,
    n: usize,
    kappa: f64,
) -> (DiscreteMeasure, DiscreteMeasure) {
    let mu = random_measure(rng, m, n, kappa, false);
    let mut indices: Vec<usize> = (0..mu.len()).collect();
    // Fisher-Yates with the seeded stream; uniform weights make any
    // permutation admissible.
    for i in (1..indices.len()).rev() {
        let j = rng.random_range(0..=i);
        indices.swap(i, j);
    }
    let bumped: Vec<SpdMatrix> = indices
        .iter()
        .map(|&idx| {
            let base = &mu.atoms()[idx];
            let g = random_hermitian(rng, m, 0.5);
            // g² is positive semidefinite, so base + g² dominates base.
            let bump = crate::linalg::dense::mul(g.entries(), g.entries(), m);
            let bump = HermitianMatrix::new(m, bump).expect("square");
            SpdMatrix::new(base.hermitian().add(&bump).expect("dimension"))
                .expect("psd bump keeps positivity")
        })
        .collect();
    let nu = DiscreteMeasure::normalized(bumped, mu.weights().to_vec())
        .expect("weights carried over");
    (mu, nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigh;

    #[test]
    fn unitary_frames_are_unitary() {
        let mut rng = rng_from_seed(7);
        for m in [2, 3, 5] {
            let q = random_unitary(&mut rng, m);
            let qh = crate::linalg::dense::adjoint(&q, m);
            let prod = crate::linalg::dense::mul(&qh, &q, m);
            for i in 0..m {
                for j in 0..m {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((prod[i * m + j] - expect).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn spd_draws_respect_condition_cap() {
        let mut rng = rng_from_seed(42);
        for _ in 0..20 {
            let a = random_spd(&mut rng, 3, 100.0);
            let es = eigh(a.hermitian()).unwrap();
            let max = es.eigenvalues()[0];
            let min = es.eigenvalues()[2];
            assert!(max / min <= 100.0 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn kappa_one_forces_identity() {
        let mut rng = rng_from_seed(1);
        let a = random_spd(&mut rng, 2, 1.0);
        let d = a
            .hermitian()
            .sub(&HermitianMatrix::identity(2))
            .unwrap()
            .frobenius_norm();
        assert!(d < 1e-12);
    }

    #[test]
    fn determinism_per_seed() {
        let a = random_measure(&mut rng_from_seed(5), 3, 4, 50.0, true);
        let b = random_measure(&mut rng_from_seed(5), 3, 4, 50.0, true);
        assert_eq!(a.weights(), b.weights());
        for (x, y) in a.atoms().iter().zip(b.atoms()) {
            assert_eq!(x.entries(), y.entries());
        }
    }

    #[test]
    fn ordered_pairs_are_ordered() {
        let mut rng = rng_from_seed(11);
        let (mu, nu) = random_ordered_pair(&mut rng, 3, 4, 20.0);
        let witness = crate::measure::stochastic_leq(&mu, &nu, 1e-9).unwrap();
        assert!(witness.is_some());
    }

    #[test]
    fn commuting_measures_commute() {
        let mut rng = rng_from_seed(3);
        let mu = random_commuting_measure(&mut rng, 3, 3, 30.0);
        let a = mu.atoms()[0].entries();
        let b = mu.atoms()[1].entries();
        let ab = crate::linalg::dense::mul(a, b, 3);
        let ba = crate::linalg::dense::mul(b, a, 3);
        let err: f64 = ab
            .iter()
            .zip(&ba)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-10);
    }
}
