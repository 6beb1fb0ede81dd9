//! SIR-constrained selection of simultaneously servable users.
//!
//! Two users `k`, `l` served by matched filters interfere with
//! `SIR(l, k) = |ĝ_kᴴĝ_l|⁻²`. Users compatible at threshold γ form the edges
//! of an undirected graph, and a servable set is a clique in it. Finding the
//! largest one is NP-complete, so [`heuristic_select`] runs the greedy
//! nearest-first rule while [`exact_max_clique`] gives the optimum on small
//! instances for comparison.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::array::{channel_vector, ChannelVector, TxArray};
use crate::em::{Medium, Model, Vec3};
use crate::error::{Error, Result};

/// Largest graph accepted by [`exact_max_clique`].
pub const EXACT_CLIQUE_CAP: usize = 25;

/// Candidate receiver positions; index order is the user label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserSet {
    positions: Vec<Vec3>,
}

impl UserSet {
    pub fn new(positions: Vec<Vec3>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::config("users", "need at least one user"));
        }
        for (i, p) in positions.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(Error::config("users", format!("position {i} is not finite")));
            }
            if positions[..i].contains(p) {
                return Err(Error::config("users", format!("position {i} duplicates an earlier user")));
            }
        }
        Ok(Self { positions })
    }

    /// `k` equally spaced points on the Z axis, both endpoints included.
    pub fn on_z_axis(k: usize, d_min: f64, d_max: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::config("k", "must be >= 1"));
        }
        if !(d_min > 0.0 && d_min.is_finite()) {
            return Err(Error::config("d_min", "must be finite and > 0"));
        }
        if !(d_max > d_min && d_max.is_finite()) {
            return Err(Error::config("d_max", "must be finite and > d_min"));
        }
        Self::new(z_grid(k, d_min, d_max).into_iter().map(|z| Vec3::new(0.0, 0.0, z)).collect())
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// `k` points from `lo` to `hi` inclusive; a single point sits at `lo`.
pub fn z_grid(k: usize, lo: f64, hi: f64) -> Vec<f64> {
    if k == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (k as f64 - 1.0);
    (0..k)
        .map(|i| if i + 1 == k { hi } else { lo + step * i as f64 })
        .collect()
}

fn normalized_inner(a: &[Complex64], b: &[Complex64]) -> f64 {
    let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    ip.norm_sqr()
}

fn sir_from_overlap(overlap: f64, len: usize) -> f64 {
    if overlap == 0.0 {
        f64::INFINITY
    } else if overlap >= 1.0 - 8.0 * (len.max(1) as f64) * f64::EPSILON {
        // Equality case of Cauchy–Schwarz, up to rounding in the sum.
        1.0
    } else {
        1.0 / overlap
    }
}

/// `SIR(l, k) = |ĝ_kᴴĝ_l|⁻² ≥ 1`, `+∞` for orthogonal channels.
pub fn sir(g_k: &ChannelVector, g_l: &ChannelVector) -> Result<f64> {
    if g_k.len() != g_l.len() {
        return Err(Error::LengthMismatch {
            left: g_k.len(),
            right: g_l.len(),
        });
    }
    let a = g_k.normalized()?;
    let b = g_l.normalized()?;
    Ok(sir_from_overlap(normalized_inner(&a, &b), a.len()))
}

/// Symmetric matrix of linear pairwise SIR values with a unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SirMatrix {
    values: Vec<Vec<f64>>,
}

impl SirMatrix {
    /// Normalizes each channel once and evaluates the upper triangle, then
    /// mirrors it.
    pub fn from_channels(channels: &[ChannelVector]) -> Result<Self> {
        let k = channels.len();
        if let Some(bad) = channels.iter().find(|g| g.len() != channels[0].len()) {
            return Err(Error::LengthMismatch {
                left: channels[0].len(),
                right: bad.len(),
            });
        }
        let unit = channels.iter().map(|g| g.normalized()).collect::<Result<Vec<_>>>()?;
        let upper: Vec<Vec<f64>> = (0..k)
            .into_par_iter()
            .map(|i| ((i + 1)..k).map(|j| sir_from_overlap(normalized_inner(&unit[i], &unit[j]), unit[i].len())).collect())
            .collect();
        let mut values = vec![vec![1.0; k]; k];
        for (i, row) in upper.iter().enumerate() {
            for (off, &v) in row.iter().enumerate() {
                let j = i + 1 + off;
                values[i][j] = v;
                values[j][i] = v;
            }
        }
        Ok(Self { values })
    }

    pub fn from_values(values: Vec<Vec<f64>>) -> Result<Self> {
        let k = values.len();
        for (i, row) in values.iter().enumerate() {
            if row.len() != k {
                return Err(Error::LengthMismatch { left: row.len(), right: k });
            }
            for j in 0..i {
                if row[j].to_bits() != values[j][i].to_bits() {
                    return Err(Error::config("sir_matrix", format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.values[k][l]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Values in dB; `None` stands for an infinite SIR.
    pub fn to_db(&self) -> Vec<Vec<Option<f64>>> {
        self.values
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| v.is_finite().then(|| 10.0 * v.log10()))
                    .collect()
            })
            .collect()
    }
}

/// `10^(dB/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Compatibility graph: `k ~ l` iff `SIR(l, k) > γ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SirGraph {
    k: usize,
    adjacency: Vec<Vec<bool>>,
    /// Linear threshold γ.
    pub gamma: f64,
}

impl SirGraph {
    pub fn from_sir(sir: &SirMatrix, gamma: f64) -> Self {
        let k = sir.len();
        let adjacency = (0..k)
            .map(|i| (0..k).map(|j| i != j && sir.get(i, j) > gamma).collect())
            .collect();
        Self { k, adjacency, gamma }
    }

    /// Graph from an explicit edge list. Self-loops are dropped.
    pub fn from_edges(k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![vec![false; k]; k];
        for &(a, b) in edges {
            if a >= k || b >= k {
                return Err(Error::config("edges", format!("edge ({a}, {b}) out of range for {k} nodes")));
            }
            if a != b {
                adjacency[a][b] = true;
                adjacency[b][a] = true;
            }
        }
        Ok(Self {
            k,
            adjacency,
            gamma: f64::NAN,
        })
    }

    pub fn node_count(&self) -> usize {
        self.k
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a][b]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().flatten().filter(|&&e| e).count() / 2
    }

    pub fn is_clique(&self, nodes: &[usize]) -> bool {
        nodes
            .iter()
            .enumerate()
            .all(|(i, &a)| nodes[i + 1..].iter().all(|&b| self.adjacent(a, b)))
    }
}

/// Near-model channels for every user.
pub fn user_channels(users: &UserSet, array: &TxArray, medium: &Medium, model: Model) -> Result<Vec<ChannelVector>> {
    users
        .positions()
        .par_iter()
        .map(|r| channel_vector(array, r, medium, model))
        .collect()
}

/// Compatibility graph with near-model channels.
pub fn build_graph(users: &UserSet, gamma_db: f64, array: &TxArray, medium: &Medium) -> Result<SirGraph> {
    build_graph_with_model(users, gamma_db, array, medium, Model::Near)
}

pub fn build_graph_with_model(
    users: &UserSet,
    gamma_db: f64,
    array: &TxArray,
    medium: &Medium,
    model: Model,
) -> Result<SirGraph> {
    let channels = user_channels(users, array, medium, model)?;
    Ok(SirGraph::from_sir(&SirMatrix::from_channels(&channels)?, db_to_linear(gamma_db)))
}

/// Greedy nearest-first selection on a compatibility graph.
///
/// Repeatedly picks the remaining node with the smallest `priority`
/// (lowest index on ties), keeps it, and discards it together with every
/// remaining node it is not adjacent to. Runs at most `k` rounds since the
/// picked node always leaves the candidate set.
pub fn greedy_select(graph: &SirGraph, priority: &[f64]) -> Result<Vec<usize>> {
    if priority.len() != graph.node_count() {
        return Err(Error::LengthMismatch {
            left: priority.len(),
            right: graph.node_count(),
        });
    }
    let mut remaining = vec![true; graph.node_count()];
    let mut selected = Vec::new();
    loop {
        let mut pick: Option<usize> = None;
        for (i, _) in remaining.iter().enumerate().filter(|(_, &r)| r) {
            if pick.is_none_or(|p| priority[i] < priority[p]) {
                pick = Some(i);
            }
        }
        let Some(x) = pick else { break };
        selected.push(x);
        remaining[x] = false;
        for (y, keep) in remaining.iter_mut().enumerate() {
            if *keep && !graph.adjacent(x, y) {
                *keep = false;
            }
        }
    }
    Ok(selected)
}

/// Selected users plus everything needed to audit the choice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleResult {
    /// User indices in selection order (nearest first).
    pub selected: Vec<usize>,
    pub sir_matrix: SirMatrix,
    pub graph: SirGraph,
    pub model: Model,
}

impl ScheduleResult {
    /// Smallest pairwise SIR among the selected users, `+∞` for fewer than
    /// two.
    pub fn min_selected_sir(&self) -> f64 {
        let mut min = f64::INFINITY;
        for (i, &a) in self.selected.iter().enumerate() {
            for &b in &self.selected[i + 1..] {
                min = min.min(self.sir_matrix.get(a, b));
            }
        }
        min
    }
}

/// Greedy user selection with near-model channels.
pub fn heuristic_select(users: &UserSet, gamma_db: f64, array: &TxArray, medium: &Medium) -> Result<ScheduleResult> {
    heuristic_select_with_model(users, gamma_db, array, medium, Model::Near)
}

pub fn heuristic_select_with_model(
    users: &UserSet,
    gamma_db: f64,
    array: &TxArray,
    medium: &Medium,
    model: Model,
) -> Result<ScheduleResult> {
    if !gamma_db.is_finite() {
        return Err(Error::config("gamma_db", "must be finite"));
    }
    let channels = user_channels(users, array, medium, model)?;
    let sir_matrix = SirMatrix::from_channels(&channels)?;
    let graph = SirGraph::from_sir(&sir_matrix, db_to_linear(gamma_db));
    let distances: Vec<f64> = users.positions().iter().map(|p| p.norm()).collect();
    let selected = greedy_select(&graph, &distances)?;
    Ok(ScheduleResult {
        selected,
        sir_matrix,
        graph,
        model,
    })
}

/// A maximum clique by branch and bound. Nodes are tried in index order,
/// so the result is deterministic; it is returned sorted.
pub fn exact_max_clique(graph: &SirGraph) -> Result<Vec<usize>> {
    let k = graph.node_count();
    if k > EXACT_CLIQUE_CAP {
        return Err(Error::InstanceTooLarge {
            k,
            cap: EXACT_CLIQUE_CAP,
        });
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let neighbors: Vec<u32> = (0..k)
        .map(|a| (0..k).filter(|&b| graph.adjacent(a, b)).fold(0u32, |m, b| m | (1 << b)))
        .collect();

    fn expand(current: u32, candidates: u32, neighbors: &[u32], best: &mut u32) {
        if candidates == 0 {
            if current.count_ones() > best.count_ones() {
                *best = current;
            }
            return;
        }
        let mut cand = candidates;
        while cand != 0 {
            if current.count_ones() + cand.count_ones() <= best.count_ones() {
                return;
            }
            let v = cand.trailing_zeros() as usize;
            cand &= !(1 << v);
            expand(current | (1 << v), cand & neighbors[v], neighbors, best);
        }
        if current.count_ones() > best.count_ones() {
            *best = current;
        }
    }

    let mut best = 0u32;
    expand(0, (1u32 << k) - 1, &neighbors, &mut best);
    Ok((0..k).filter(|&i| best & (1 << i) != 0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::build_array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn medium() -> Medium {
        Medium::with_wavelength(0.01, 376.730).unwrap()
    }

    fn cv(entries: Vec<Complex64>) -> ChannelVector {
        ChannelVector {
            entries,
            model: Model::Near,
            rx_position: Vec3::zeros(),
        }
    }

    #[test]
    fn sir_of_identical_channels_is_one() {
        let g = cv(vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.1)]);
        assert_eq!(sir(&g, &g).unwrap(), 1.0);
    }

    #[test]
    fn orthogonal_channels_give_infinite_sir() {
        let a = cv(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let b = cv(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 3.0)]);
        assert_eq!(sir(&a, &b).unwrap(), f64::INFINITY);
        assert!(f64::INFINITY > db_to_linear(300.0));
    }

    #[test]
    fn sir_errors() {
        let a = cv(vec![Complex64::new(1.0, 0.0)]);
        let z = cv(vec![Complex64::new(0.0, 0.0)]);
        let b = cv(vec![Complex64::new(1.0, 0.0); 2]);
        assert_eq!(sir(&a, &z).unwrap_err(), Error::NullChannel);
        assert!(matches!(sir(&a, &b), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn sir_is_symmetric_bit_for_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.gen_range(1..40);
            let a = cv((0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect());
            let b = cv((0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect());
            let s1 = sir(&a, &b).unwrap();
            let s2 = sir(&b, &a).unwrap();
            assert_eq!(s1.to_bits(), s2.to_bits());
            assert!(s1 >= 1.0);
        }
    }

    #[test]
    fn z_grid_includes_both_endpoints() {
        let g = z_grid(100, 0.1, 10.0);
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[99], 10.0);
        assert!((g[1] - 0.2).abs() < 1e-12);
        assert_eq!(z_grid(1, 0.3, 1.0), vec![0.3]);
    }

    #[test]
    fn user_set_validation() {
        assert!(UserSet::new(vec![]).is_err());
        let p = Vec3::new(0.0, 0.0, 1.0);
        assert!(UserSet::new(vec![p, p]).is_err());
        assert!(UserSet::on_z_axis(3, 1.0, 0.5).is_err());
        assert!(UserSet::on_z_axis(3, 0.0, 0.5).is_err());
    }

    #[test]
    fn single_user_graph_is_edgeless_and_selected() {
        let m = medium();
        let a = build_array(4, 4, 0.005, 0.005).unwrap();
        let users = UserSet::on_z_axis(1, 0.2, 1.0).unwrap();
        let g = build_graph(&users, 10.0, &a, &m).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 0));
        let res = heuristic_select(&users, 10.0, &a, &m).unwrap();
        assert_eq!(res.selected, vec![0]);
    }

    #[test]
    fn threshold_extremes() {
        let m = medium();
        let a = build_array(8, 16, 0.005, 0.005).unwrap();
        let users = UserSet::new(vec![
            Vec3::new(0.0, 0.0, 0.1),
            Vec3::new(0.02, 0.0, 0.3),
            Vec3::new(0.0, -0.05, 0.2),
            Vec3::new(0.01, 0.03, 0.6),
        ])
        .unwrap();
        let g = build_graph(&users, 1e-9, &a, &m).unwrap();
        assert_eq!(g.edge_count(), 6);
        let g = build_graph(&users, 200.0, &a, &m).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn hand_traced_three_users() {
        // Only the (closest, farthest) pair is compatible.
        let g = SirGraph::from_edges(3, &[(0, 2)]).unwrap();
        assert_eq!(greedy_select(&g, &[1.0, 2.0, 3.0]).unwrap(), vec![0, 2]);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let g = SirGraph::from_edges(3, &[]).unwrap();
        assert_eq!(greedy_select(&g, &[2.0, 1.0, 1.0]).unwrap(), vec![1]);
    }

    #[test]
    fn clique_oracle_small_graphs() {
        let tri = SirGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(exact_max_clique(&tri).unwrap(), vec![0, 1, 2]);
        let empty = SirGraph::from_edges(4, &[]).unwrap();
        assert_eq!(exact_max_clique(&empty).unwrap().len(), 1);
        let big = SirGraph::from_edges(26, &[]).unwrap();
        assert!(matches!(exact_max_clique(&big), Err(Error::InstanceTooLarge { k: 26, cap: 25 })));
        let full: Vec<_> = (0..25).flat_map(|a| (a + 1..25).map(move |b| (a, b))).collect();
        let g = SirGraph::from_edges(25, &full).unwrap();
        assert_eq!(exact_max_clique(&g).unwrap().len(), 25);
    }

    /// All subsets, largest clique wins.
    fn brute_force_clique(g: &SirGraph) -> usize {
        let k = g.node_count();
        (0u32..(1 << k))
            .filter(|mask| {
                let nodes: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
                g.is_clique(&nodes)
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn clique_oracle_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..60 {
            let k = rng.gen_range(1..=12);
            let p = rng.gen_range(0.1..0.9);
            let edges: Vec<_> = (0..k)
                .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
                .filter(|_| rng.gen_bool(p))
                .collect();
            let g = SirGraph::from_edges(k, &edges).unwrap();
            let best = exact_max_clique(&g).unwrap();
            assert!(g.is_clique(&best));
            assert_eq!(best.len(), brute_force_clique(&g));
        }
    }

    #[test]
    fn sir_matrix_rejects_asymmetry() {
        assert!(SirMatrix::from_values(vec![vec![1.0, 2.0], vec![3.0, 1.0]]).is_err());
        let m = SirMatrix::from_values(vec![vec![1.0, f64::INFINITY], vec![f64::INFINITY, 1.0]]).unwrap();
        assert_eq!(m.to_db()[0], vec![Some(0.0), None]);
    }
}
