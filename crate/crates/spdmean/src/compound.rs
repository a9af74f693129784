//! Antisymmetric tensor (compound) powers.
//!
//! The k-th compound of an m×m matrix is the C(m,k)×C(m,k) matrix of k×k
//! minors, indexed by the lexicographically ordered k-subsets of {1..m}.
//! Its eigenvalues are the k-fold products of distinct eigenvalues of the
//! input, which is what makes it the workhorse behind log-majorization: the
//! top eigenvalue of the compound is the product of the k largest
//! eigenvalues of the original.

use num_complex::Complex64;

use crate::barycenter::{cartan_barycenter, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::{eigh, trace_metric, HermitianMatrix, SpdMatrix};
use crate::measure::DiscreteMeasure;

/// Lexicographically ordered k-subsets of {0..m-1}, the row/column index
/// space of the k-th compound.
#[derive(Clone, Debug)]
pub struct CompoundIndex {
    m: usize,
    k: usize,
    subsets: Vec<Vec<usize>>,
}

impl CompoundIndex {
    pub fn new(m: usize, k: usize) -> Result<Self> {
        check_range(m, k)?;
        let mut subsets = Vec::with_capacity(binomial(m, k));
        let mut current: Vec<usize> = (0..k).collect();
        loop {
            subsets.push(current.clone());
            // Advance to the next subset in lexicographic order.
            let mut i = k;
            loop {
                if i == 0 {
                    return Ok(Self { m, k, subsets });
                }
                i -= 1;
                if current[i] != i + m - k {
                    break;
                }
            }
            current[i] += 1;
            for j in (i + 1)..k {
                current[j] = current[j - 1] + 1;
            }
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of subsets, C(m,k).
    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }
}

fn check_range(m: usize, k: usize) -> Result<()> {
    if k == 0 || k > m {
        return Err(Error::InvalidArgument(format!(
            "compound order {k} out of range 1..={m}"
        )));
    }
    Ok(())
}

/// Exact binomial coefficient (desk scale; fits comfortably in usize).
pub fn binomial(m: usize, k: usize) -> usize {
    let k = k.min(m - k.min(m));
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (m - i) as u128 / (i + 1) as u128;
    }
    c as usize
}

/// k-th compound of a Hermitian matrix; Hermitian of dimension C(m,k).
pub fn compound_hermitian(a: &HermitianMatrix, k: usize) -> Result<HermitianMatrix> {
    check_range(a.dim(), k)?;
    let index = CompoundIndex::new(a.dim(), k)?;
    let raw = compound_raw(a.entries(), a.dim(), &index);
    HermitianMatrix::new(index.len(), raw)
}

/// k-th compound of a positive definite matrix; positive definite of
/// dimension C(m,k).
pub fn compound(a: &SpdMatrix, k: usize) -> Result<SpdMatrix> {
    SpdMatrix::new(compound_hermitian(a.hermitian(), k)?)
}

fn compound_raw(entries: &[Complex64], m: usize, index: &CompoundIndex) -> Vec<Complex64> {
    let l = index.len();
    let k = index.k();
    let mut out = vec![Complex64::ZERO; l * l];
    let mut block = vec![Complex64::ZERO; k * k];
    for (r, rows) in index.subsets().iter().enumerate() {
        for (c, cols) in index.subsets().iter().enumerate() {
            for (bi, &i) in rows.iter().enumerate() {
                for (bj, &j) in cols.iter().enumerate() {
                    block[bi * k + bj] = entries[i * m + j];
                }
            }
            out[r * l + c] = det(&mut block, k);
        }
    }
    out
}

/// Determinant of a small complex block: closed forms up to 3×3, LU with
/// partial pivoting beyond.
fn det(block: &mut [Complex64], k: usize) -> Complex64 {
    match k {
        1 => block[0],
        2 => block[0] * block[3] - block[1] * block[2],
        3 => {
            block[0] * (block[4] * block[8] - block[5] * block[7])
                - block[1] * (block[3] * block[8] - block[5] * block[6])
                + block[2] * (block[3] * block[7] - block[4] * block[6])
        }
        _ => {
            let mut sign = Complex64::ONE;
            for col in 0..k {
                let mut pivot = col;
                let mut best = block[col * k + col].norm_sqr();
                for r in (col + 1)..k {
                    let mag = block[r * k + col].norm_sqr();
                    if mag > best {
                        best = mag;
                        pivot = r;
                    }
                }
                if best == 0.0 {
                    return Complex64::ZERO;
                }
                if pivot != col {
                    for c in 0..k {
                        block.swap(col * k + c, pivot * k + c);
                    }
                    sign = -sign;
                }
                let diag = block[col * k + col];
                for r in (col + 1)..k {
                    let factor = block[r * k + col] / diag;
                    for c in col..k {
                        let sub = factor * block[col * k + c];
                        block[r * k + c] -= sub;
                    }
                }
            }
            let mut d = sign;
            for i in 0..k {
                d *= block[i * k + i];
            }
            d
        }
    }
}

/// Product of the k largest eigenvalues, `λ_1(Λ^k A)`.
pub fn top_eigen_product(a: &SpdMatrix, k: usize) -> Result<f64> {
    check_range(a.dim(), k)?;
    let es = eigh(a.hermitian())?;
    Ok(es.eigenvalues()[..k].iter().product())
}

/// Push-forward of a measure under the k-th compound map.
pub fn compound_pushforward(mu: &DiscreteMeasure, k: usize) -> Result<DiscreteMeasure> {
    check_range(mu.dim(), k)?;
    mu.pushforward(|atom| compound(atom, k))
}

/// Lipschitz constant of the compound map for the trace metric:
/// `sqrt(k · C(m-1, k-1))`.
pub fn lipschitz_bound(m: usize, k: usize) -> Result<f64> {
    check_range(m, k)?;
    Ok(((k * binomial(m - 1, k - 1)) as f64).sqrt())
}

/// Result of checking that the compound map commutes with the barycenter.
#[derive(Clone, Debug)]
pub struct CommutingDiagramReport {
    /// Trace metric between `Λ^k(G(μ))` and `G(Λ^k_* μ)` in dimension C(m,k).
    pub distance: f64,
    pub pass: bool,
}

/// Compares the barycenter of the pushed measure with the pushed barycenter.
pub fn verify_commuting_diagram(
    mu: &DiscreteMeasure,
    k: usize,
    tol: f64,
) -> Result<CommutingDiagramReport> {
    verify_commuting_diagram_with(mu, k, tol, &SolverOptions::default())
}

pub fn verify_commuting_diagram_with(
    mu: &DiscreteMeasure,
    k: usize,
    tol: f64,
    opts: &SolverOptions,
) -> Result<CommutingDiagramReport> {
    check_range(mu.dim(), k)?;
    let g = cartan_barycenter(mu, opts)?;
    if !g.converged {
        return Err(Error::SolverDidNotConverge {
            residual: g.residual_norm,
            iterations: g.iterations,
        });
    }
    let pushed = compound_pushforward(mu, k)?;
    let g_pushed = cartan_barycenter(&pushed, opts)?;
    if !g_pushed.converged {
        return Err(Error::SolverDidNotConverge {
            residual: g_pushed.residual_norm,
            iterations: g_pushed.iterations,
        });
    }
    let lifted = compound(&g.point, k)?;
    let distance = trace_metric(&lifted, &g_pushed.point)?;
    Ok(CommutingDiagramReport {
        distance,
        pass: distance <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dense, power_m};

    #[test]
    fn index_enumeration() {
        let idx = CompoundIndex::new(4, 2).unwrap();
        assert_eq!(idx.len(), 6);
        assert_eq!(
            idx.subsets(),
            &[
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert!(CompoundIndex::new(3, 0).is_err());
        assert!(CompoundIndex::new(3, 4).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(5, 5), 1);
        assert_eq!(binomial(8, 3), 56);
    }

    #[test]
    fn first_compound_is_identity_map() {
        let a = SpdMatrix::from_real(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let c = compound(&a, 1).unwrap();
        assert_eq!(c.entries(), a.entries());
    }

    #[test]
    fn diagonal_second_compound() {
        let a = SpdMatrix::diagonal(&[3.0, 2.0, 1.0]).unwrap();
        let c = compound(&a, 2).unwrap();
        let expect = HermitianMatrix::diagonal(&[6.0, 3.0, 2.0]);
        assert!(c.hermitian().sub(&expect).unwrap().frobenius_norm() < 1e-13);
    }

    #[test]
    fn top_compound_is_determinant() {
        // det [[2,1],[1,2]] = 3.
        let a = SpdMatrix::from_real(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let c = compound(&a, 2).unwrap();
        assert_eq!(c.dim(), 1);
        assert!((c.entry(0, 0).re - 3.0).abs() < 1e-13);
    }

    #[test]
    fn multiplicativity_on_raw_products() {
        let a = SpdMatrix::from_real(3, &[4.0, 1.0, 0.5, 1.0, 3.0, -0.5, 0.5, -0.5, 2.0]).unwrap();
        let b = SpdMatrix::from_real(3, &[2.0, 0.25, 0.0, 0.25, 1.0, 0.5, 0.0, 0.5, 5.0]).unwrap();
        let idx = CompoundIndex::new(3, 2).unwrap();
        let ab = dense::mul(a.entries(), b.entries(), 3);
        let lhs = compound_raw(&ab, 3, &idx);
        let rhs = dense::mul(
            &compound_raw(a.entries(), 3, &idx),
            &compound_raw(b.entries(), 3, &idx),
            idx.len(),
        );
        let err: f64 = lhs
            .iter()
            .zip(&rhs)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-9);
    }

    #[test]
    fn commutes_with_powers() {
        let a = SpdMatrix::from_real(3, &[4.0, 1.0, 0.5, 1.0, 3.0, -0.5, 0.5, -0.5, 2.0]).unwrap();
        for t in [0.5, 2.0, -1.0] {
            let lhs = compound(&power_m(&a, t).unwrap(), 2).unwrap();
            let rhs = power_m(&compound(&a, 2).unwrap(), t).unwrap();
            let err = lhs
                .hermitian()
                .sub(rhs.hermitian())
                .unwrap()
                .frobenius_norm();
            assert!(err < 1e-9 * (1.0 + rhs.frobenius_norm()));
        }
    }

    #[test]
    fn spectrum_is_products_of_eigenvalues() {
        let a = SpdMatrix::from_real(4, &[
            5.0, 1.0, 0.0, 0.5,
            1.0, 4.0, -0.5, 0.0,
            0.0, -0.5, 3.0, 0.25,
            0.5, 0.0, 0.25, 2.0,
        ])
        .unwrap();
        let lam = eigh(a.hermitian()).unwrap().eigenvalues().to_vec();
        let c = compound(&a, 2).unwrap();
        let mut got = eigh(c.hermitian()).unwrap().eigenvalues().to_vec();
        let mut expect: Vec<f64> = Vec::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                expect.push(lam[i] * lam[j]);
            }
        }
        expect.sort_by(|x, y| y.partial_cmp(x).unwrap());
        got.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).abs() < 1e-9 * e.abs());
        }
    }

    #[test]
    fn top_product_examples() {
        let a = SpdMatrix::diagonal(&[3.0, 2.0, 1.0]).unwrap();
        assert!((top_eigen_product(&a, 2).unwrap() - 6.0).abs() < 1e-12);
        assert!((top_eigen_product(&SpdMatrix::identity(3), 2).unwrap() - 1.0).abs() < 1e-12);

        // k = m gives the determinant; cross-check against the compound.
        let b = SpdMatrix::from_real(3, &[4.0, 1.0, 0.5, 1.0, 3.0, -0.5, 0.5, -0.5, 2.0]).unwrap();
        let d = top_eigen_product(&b, 3).unwrap();
        let c = compound(&b, 3).unwrap();
        assert!((d - c.entry(0, 0).re).abs() < 1e-9 * d.abs());

        // Operator norm of the compound equals the top product.
        let norm_c = crate::linalg::norm(
            compound(&b, 2).unwrap().hermitian(),
            crate::linalg::NormSpec::Operator,
        )
        .unwrap();
        let p = top_eigen_product(&b, 2).unwrap();
        assert!((norm_c - p).abs() < 1e-9 * p.abs());
    }

    #[test]
    fn lipschitz_constants() {
        assert!((lipschitz_bound(5, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((lipschitz_bound(4, 2).unwrap() - 6.0_f64.sqrt()).abs() < 1e-15);
        assert!((lipschitz_bound(5, 5).unwrap() - 5.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pushforward_basics() {
        let a = SpdMatrix::from_real(3, &[4.0, 1.0, 0.5, 1.0, 3.0, -0.5, 0.5, -0.5, 2.0]).unwrap();
        let mu = DiscreteMeasure::dirac(a.clone());
        let pushed = compound_pushforward(&mu, 2).unwrap();
        assert_eq!(pushed.len(), 1);
        assert_eq!(pushed.dim(), 3);
        let expect = compound(&a, 2).unwrap();
        assert!(
            pushed.atoms()[0]
                .hermitian()
                .sub(expect.hermitian())
                .unwrap()
                .frobenius_norm()
                < 1e-12
        );

        // Push-forward commutes with measure powers on atoms.
        let mu = DiscreteMeasure::new(
            vec![a, SpdMatrix::diagonal(&[1.0, 2.0, 4.0]).unwrap()],
            vec![0.5, 0.5],
        )
        .unwrap();
        let lhs = compound_pushforward(&mu.power(2.0).unwrap(), 2).unwrap();
        let rhs = compound_pushforward(&mu, 2).unwrap().power(2.0).unwrap();
        for (x, y) in lhs.atoms().iter().zip(rhs.atoms()) {
            let err = x.hermitian().sub(y.hermitian()).unwrap().frobenius_norm();
            assert!(err < 1e-10 * (1.0 + y.frobenius_norm()));
        }
    }

    #[test]
    fn commuting_diagram_cases() {
        let a = SpdMatrix::from_real(3, &[4.0, 1.0, 0.5, 1.0, 3.0, -0.5, 0.5, -0.5, 2.0]).unwrap();
        let rep = verify_commuting_diagram(&DiscreteMeasure::dirac(a), 2, 1e-9).unwrap();
        assert!(rep.pass);

        let mu = DiscreteMeasure::new(
            vec![
                SpdMatrix::diagonal(&[1.0, 2.0, 4.0]).unwrap(),
                SpdMatrix::diagonal(&[3.0, 1.0, 2.0]).unwrap(),
            ],
            vec![0.5, 0.5],
        )
        .unwrap();
        let rep = verify_commuting_diagram(&mu, 2, 1e-8).unwrap();
        assert!(rep.pass, "distance {}", rep.distance);
    }
}
