//! Discrete optimal transport on atom pairs.
//!
//! The Wasserstein distance is the optimum of a transportation LP over the
//! dense bipartite graph of atoms, solved by the transportation simplex with
//! a Bland-style pivot rule (lowest index enters, lexicographic tie-break on
//! the leaving arc), so the optimal coupling is reproducible. The stochastic
//! order is a coupling-feasibility question decided by max-flow on the
//! admissibility graph.

use super::{Coupling, DiscreteMeasure};
use crate::error::{Error, Result};
use crate::linalg::{eigh, trace_metric};

/// p-Wasserstein distance between two measures plus an optimal coupling.
///
/// The ground cost between atoms is the trace metric; the optimal value is
/// `(min over couplings of sum mass_ij d(X_i,Y_j)^p)^{1/p}`.
pub fn wasserstein(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
) -> Result<(f64, Coupling)> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "wasserstein exponent {p} must be >= 1"
        )));
    }
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch {
            left: mu.dim(),
            right: nu.dim(),
        });
    }
    let n = mu.len();
    let k = nu.len();
    let mut cost = vec![0.0; n * k];
    for i in 0..n {
        for j in 0..k {
            cost[i * k + j] = trace_metric(&mu.atoms()[i], &nu.atoms()[j])?.powf(p);
        }
    }
    let flow = solve_transport(mu.weights(), nu.weights(), &cost)?;
    let total: f64 = flow.iter().zip(&cost).map(|(f, c)| f * c).sum();
    let distance = total.max(0.0).powf(1.0 / p);
    let coupling = Coupling::new(mu.clone(), nu.clone(), flow)?;
    Ok((distance, coupling))
}

/// Stochastic order `μ <= ν`: is there a coupling supported on pairs with
/// `λ_min(Y_j - X_i) >= -tol`? Returns the witness coupling when one exists.
pub fn stochastic_leq(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    tol: f64,
) -> Result<Option<Coupling>> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch {
            left: mu.dim(),
            right: nu.dim(),
        });
    }
    let n = mu.len();
    let k = nu.len();
    let mut admissible = vec![false; n * k];
    for i in 0..n {
        for j in 0..k {
            let diff = nu.atoms()[j].hermitian().sub(mu.atoms()[i].hermitian())?;
            let min_eig = *eigh(&diff)?.eigenvalues().last().unwrap();
            admissible[i * k + j] = min_eig >= -tol;
        }
    }

    // Max-flow feasibility: source -> rows (capacity w_i), admissible arcs,
    // columns -> sink (capacity v_j). Order feasible iff one unit flows.
    let nodes = n + k + 2;
    let source = 0;
    let sink = nodes - 1;
    let mut cap = vec![0.0_f64; nodes * nodes];
    for i in 0..n {
        cap[source * nodes + (1 + i)] = mu.weights()[i];
    }
    for j in 0..k {
        cap[(1 + n + j) * nodes + sink] = nu.weights()[j];
    }
    for i in 0..n {
        for j in 0..k {
            if admissible[i * k + j] {
                cap[(1 + i) * nodes + (1 + n + j)] = 2.0;
            }
        }
    }
    let mut flow = vec![0.0_f64; nodes * nodes];
    let total = max_flow(&mut cap, &mut flow, nodes, source, sink);
    if total < 1.0 - 1e-10 {
        return Ok(None);
    }
    let mut mass = vec![0.0; n * k];
    for i in 0..n {
        for j in 0..k {
            mass[i * k + j] = flow[(1 + i) * nodes + (1 + n + j)].max(0.0);
        }
    }
    Ok(Some(Coupling::new(mu.clone(), nu.clone(), mass)?))
}

/// Edmonds-Karp with real capacities; the augmentation count is bounded
/// combinatorially, independent of the capacity values.
fn max_flow(cap: &mut [f64], flow: &mut [f64], nodes: usize, source: usize, sink: usize) -> f64 {
    const RESIDUAL_EPS: f64 = 1e-15;
    let mut total = 0.0;
    loop {
        let mut parent = vec![usize::MAX; nodes];
        parent[source] = source;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            if u == sink {
                break;
            }
            for v in 0..nodes {
                if parent[v] == usize::MAX && cap[u * nodes + v] - flow[u * nodes + v] > RESIDUAL_EPS
                {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[sink] == usize::MAX {
            return total;
        }
        let mut bottleneck = f64::INFINITY;
        let mut v = sink;
        while v != source {
            let u = parent[v];
            bottleneck = bottleneck.min(cap[u * nodes + v] - flow[u * nodes + v]);
            v = u;
        }
        let mut v = sink;
        while v != source {
            let u = parent[v];
            flow[u * nodes + v] += bottleneck;
            flow[v * nodes + u] -= bottleneck;
            v = u;
        }
        total += bottleneck;
    }
}

/// Transportation simplex on the dense bipartite graph.
///
/// Returns the optimal flow matrix (row-major n×k). Supplies and demands
/// must balance; here both are probability weights summing to one.
fn solve_transport(supply: &[f64], demand: &[f64], cost: &[f64]) -> Result<Vec<f64>> {
    let n = supply.len();
    let k = demand.len();
    let mut flow = vec![0.0_f64; n * k];
    let mut basis = vec![false; n * k];

    // Northwest-corner start: one basic cell per step, n+k-1 in total,
    // forming a spanning tree of the bipartite graph.
    {
        let mut s = supply.to_vec();
        let mut d = demand.to_vec();
        let (mut i, mut j) = (0, 0);
        loop {
            let x = s[i].min(d[j]);
            flow[i * k + j] = x;
            basis[i * k + j] = true;
            s[i] -= x;
            d[j] -= x;
            if i == n - 1 && j == k - 1 {
                break;
            }
            if (s[i] <= d[j] && i < n - 1) || j == k - 1 {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    let cost_scale = cost.iter().fold(0.0_f64, |a, &c| a.max(c.abs()));
    let enter_eps = 1e-12 * (1.0 + cost_scale);
    let max_pivots = 10_000 * (n + k);

    for _ in 0..max_pivots {
        let (u, v) = potentials(&basis, cost, n, k)?;

        // Bland: lowest-index arc with negative reduced cost enters.
        let mut entering = None;
        'scan: for i in 0..n {
            for j in 0..k {
                if !basis[i * k + j] && cost[i * k + j] - u[i] - v[j] < -enter_eps {
                    entering = Some((i, j));
                    break 'scan;
                }
            }
        }
        let Some((ei, ej)) = entering else {
            return Ok(flow);
        };

        let cycle = basis_cycle(&basis, n, k, ei, ej)?;
        // Odd positions along the path carry minus signs.
        let mut theta = f64::INFINITY;
        let mut leaving = None;
        for (pos, &(ci, cj)) in cycle.iter().enumerate() {
            if pos % 2 == 1 {
                let f = flow[ci * k + cj];
                if f < theta - 1e-18 || (f <= theta && leaving.is_none()) {
                    theta = f;
                    leaving = Some((ci, cj));
                } else if (f - theta).abs() <= 1e-18 {
                    // Lexicographic tie-break keeps the pivot deterministic.
                    if let Some((li, lj)) = leaving {
                        if (ci, cj) < (li, lj) {
                            leaving = Some((ci, cj));
                        }
                    }
                }
            }
        }
        let (li, lj) = leaving.ok_or_else(|| Error::Transport("cycle has no minus arc".into()))?;
        for (pos, &(ci, cj)) in cycle.iter().enumerate() {
            if pos % 2 == 1 {
                flow[ci * k + cj] = (flow[ci * k + cj] - theta).max(0.0);
            } else {
                flow[ci * k + cj] += theta;
            }
        }
        basis[li * k + lj] = false;
        basis[ei * k + ej] = true;
        flow[li * k + lj] = 0.0;
    }
    Err(Error::Transport("pivot limit exceeded".into()))
}

/// Dual potentials u_i + v_j = c_ij on the basis tree, rooted at row 0.
fn potentials(basis: &[bool], cost: &[f64], n: usize, k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut u = vec![f64::NAN; n];
    let mut v = vec![f64::NAN; k];
    u[0] = 0.0;
    let mut queue = std::collections::VecDeque::from([0_usize]); // rows 0..n, cols n..n+k
    let mut seen = vec![false; n + k];
    seen[0] = true;
    while let Some(node) = queue.pop_front() {
        if node < n {
            let i = node;
            for j in 0..k {
                if basis[i * k + j] && !seen[n + j] {
                    v[j] = cost[i * k + j] - u[i];
                    seen[n + j] = true;
                    queue.push_back(n + j);
                }
            }
        } else {
            let j = node - n;
            for i in 0..n {
                if basis[i * k + j] && !seen[i] {
                    u[i] = cost[i * k + j] - v[j];
                    seen[i] = true;
                    queue.push_back(i);
                }
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Transport("basis is not a spanning tree".into()));
    }
    Ok((u, v))
}

/// The unique cycle created by adding the entering arc to the basis tree,
/// returned as cells starting with the entering arc and alternating +,-.
fn basis_cycle(
    basis: &[bool],
    n: usize,
    k: usize,
    ei: usize,
    ej: usize,
) -> Result<Vec<(usize, usize)>> {
    // BFS from row node ei to column node ej over basis arcs.
    let total = n + k;
    let mut parent = vec![usize::MAX; total];
    parent[ei] = ei;
    let mut queue = std::collections::VecDeque::from([ei]);
    while let Some(node) = queue.pop_front() {
        if node == n + ej {
            break;
        }
        if node < n {
            let i = node;
            for j in 0..k {
                if basis[i * k + j] && parent[n + j] == usize::MAX {
                    parent[n + j] = node;
                    queue.push_back(n + j);
                }
            }
        } else {
            let j = node - n;
            for i in 0..n {
                if basis[i * k + j] && parent[i] == usize::MAX {
                    parent[i] = node;
                    queue.push_back(i);
                }
            }
        }
    }
    if parent[n + ej] == usize::MAX {
        return Err(Error::Transport("entering arc closes no cycle".into()));
    }
    // Walk back from col ej to row ei collecting path cells.
    let mut path = Vec::new();
    let mut node = n + ej;
    while node != ei {
        let prev = parent[node];
        let cell = if node < n {
            (node, prev - n)
        } else {
            (prev, node - n)
        };
        path.push(cell);
        node = prev;
    }
    // path currently runs col ej -> ... -> row ei; reverse so it leaves the
    // entering arc's row first, giving the alternation +(entering),-,+,...
    path.reverse();
    let mut cycle = Vec::with_capacity(path.len() + 1);
    cycle.push((ei, ej));
    cycle.extend(path);
    Ok(cycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SpdMatrix;

    fn diag2(a: f64, b: f64) -> SpdMatrix {
        SpdMatrix::diagonal(&[a, b]).unwrap()
    }

    fn uniform(atoms: Vec<SpdMatrix>) -> DiscreteMeasure {
        let n = atoms.len();
        DiscreteMeasure::new(atoms, vec![1.0 / n as f64; n]).unwrap()
    }

    #[test]
    fn dirac_pair_is_ground_distance() {
        let a = diag2(1.0, 1.0);
        let b = diag2(4.0, 4.0);
        let (d, pi) = wasserstein(
            &DiscreteMeasure::dirac(a.clone()),
            &DiscreteMeasure::dirac(b.clone()),
            2.0,
        )
        .unwrap();
        let ground = trace_metric(&a, &b).unwrap();
        assert!((d - ground).abs() < 1e-12);
        assert!((pi.mass(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_distance_is_zero() {
        let mu = uniform(vec![diag2(1.0, 2.0), diag2(3.0, 1.0)]);
        let (d, _) = wasserstein(&mu, &mu, 1.0).unwrap();
        assert!(d < 1e-12);
    }

    #[test]
    fn two_atom_pairing_minimum() {
        // Uniform 2 vs 2: optimum is the cheaper of the two pairings.
        let a1 = diag2(1.0, 1.0);
        let a2 = diag2(16.0, 16.0);
        let b1 = diag2(2.0, 2.0);
        let b2 = diag2(8.0, 8.0);
        let mu = uniform(vec![a1.clone(), a2.clone()]);
        let nu = uniform(vec![b1.clone(), b2.clone()]);
        let d = |x: &SpdMatrix, y: &SpdMatrix| trace_metric(x, y).unwrap();
        let straight = 0.5 * (d(&a1, &b1) + d(&a2, &b2));
        let crossed = 0.5 * (d(&a1, &b2) + d(&a2, &b1));
        let expect = straight.min(crossed);
        let (got, _) = wasserstein(&mu, &nu, 1.0).unwrap();
        assert!((got - expect).abs() < 1e-10);
    }

    #[test]
    fn order_between_exponents() {
        let mu = uniform(vec![diag2(1.0, 2.0), diag2(5.0, 1.0), diag2(2.0, 2.0)]);
        let nu = uniform(vec![diag2(3.0, 1.0), diag2(1.0, 6.0)]);
        let (d1, _) = wasserstein(&mu, &nu, 1.0).unwrap();
        let (d2, _) = wasserstein(&mu, &nu, 2.0).unwrap();
        assert!(d1 <= d2 + 1e-9);
        assert!(wasserstein(&mu, &nu, 0.5).is_err());
    }

    #[test]
    fn stochastic_order_basics() {
        let i2 = SpdMatrix::identity(2);
        let two = diag2(2.0, 2.0);
        assert!(stochastic_leq(
            &DiscreteMeasure::dirac(i2.clone()),
            &DiscreteMeasure::dirac(two.clone()),
            1e-9
        )
        .unwrap()
        .is_some());
        assert!(stochastic_leq(
            &DiscreteMeasure::dirac(two),
            &DiscreteMeasure::dirac(i2),
            1e-9
        )
        .unwrap()
        .is_none());
    }

    #[test]
    fn stochastic_order_needs_permutation() {
        // A1 <= B2 and A2 <= B1 but not the straight pairing.
        let a1 = diag2(1.0, 1.0);
        let a2 = diag2(3.0, 3.0);
        let b1 = diag2(4.0, 4.0);
        let b2 = diag2(1.5, 1.5);
        let mu = uniform(vec![a1, a2]);
        let nu = uniform(vec![b1, b2]);
        let witness = stochastic_leq(&mu, &nu, 1e-9).unwrap().unwrap();
        // The witness must put (essentially) no mass on inadmissible pairs.
        assert!(witness.mass(1, 1) < 1e-9);
    }
}
