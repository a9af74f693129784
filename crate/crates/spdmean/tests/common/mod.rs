//! Shared fixtures and independent oracles for the integration suites.
//!
//! The transport oracle here enumerates permutation couplings outright; it
//! must stay independent of the LP it is used to check.

use spdmean::linalg::{trace_metric, SpdMatrix};
use spdmean::measure::DiscreteMeasure;

/// Exhaustive p-Wasserstein oracle for uniform measures with equal atom
/// counts: for such measures an optimal coupling is a permutation (a vertex
/// of the Birkhoff polytope), so the minimum over all n! pairings is the
/// exact distance. Usable up to n = 6 or so.
pub fn permutation_wasserstein(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> f64 {
    let n = mu.len();
    assert_eq!(n, nu.len(), "oracle needs equal atom counts");
    let uniform = 1.0 / n as f64;
    assert!(
        mu.weights().iter().all(|&w| (w - uniform).abs() < 1e-12)
            && nu.weights().iter().all(|&w| (w - uniform).abs() < 1e-12),
        "oracle needs uniform weights"
    );
    let mut cost = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            cost[i * n + j] = trace_metric(&mu.atoms()[i], &nu.atoms()[j]).unwrap().powf(p);
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, 0, &mut |sigma| {
        let total: f64 = sigma
            .iter()
            .enumerate()
            .map(|(i, &j)| uniform * cost[i * n + j])
            .sum();
        if total < best {
            best = total;
        }
    });
    best.powf(1.0 / p)
}

fn permute(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}

/// Relative Frobenius closeness of two positive definite matrices.
pub fn rel_frobenius_err(a: &SpdMatrix, b: &SpdMatrix) -> f64 {
    let diff = a.hermitian().sub(b.hermitian()).unwrap().frobenius_norm();
    diff / b.hermitian().frobenius_norm().max(f64::MIN_POSITIVE)
}
