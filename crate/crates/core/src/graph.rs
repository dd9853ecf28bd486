//! Undirected connected graphs and the Laplacian spectral data the analysis
//! layer consumes.
//!
//! Adjacency and degrees are stored as integers so that `L·1 = 0` holds
//! exactly. Spectral work (`spectral_decompose`) runs in double precision on
//! a dense copy of the Laplacian.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Relative off-diagonal tolerance handed to the symmetric eigensolver.
pub const EIGEN_TOLERANCE: f64 = 1e-10;
const EIGEN_MAX_SWEEPS: usize = 10_000;
/// Bound on retries when drawing a connected geometric graph.
pub const GEOMETRIC_MAX_ATTEMPTS: usize = 100;

/// A simple undirected graph that is known to be connected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    /// Canonical edges `(i, j)` with `i < j`, sorted.
    edges: Vec<(usize, usize)>,
    /// Sorted neighbor lists.
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Validates the edge list and builds the graph. Edges are unordered
    /// pairs; `(i, j)` and `(j, i)` in the same list count as a duplicate.
    pub fn new(node_count: usize, edge_list: &[(usize, usize)]) -> Result<Self> {
        if node_count < 2 {
            return Err(Error::TooFewNodes(node_count));
        }
        let mut seen = BTreeSet::new();
        for &(i, j) in edge_list {
            if i >= node_count || j >= node_count {
                return Err(Error::NodeOutOfRange(i, j, node_count));
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            let key = (i.min(j), i.max(j));
            if !seen.insert(key) {
                return Err(Error::DuplicateEdge(i, j));
            }
        }
        let edges: Vec<_> = seen.into_iter().collect();
        let mut neighbors = vec![Vec::new(); node_count];
        for &(i, j) in &edges {
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let graph = Graph {
            node_count,
            edges,
            neighbors,
        };
        let reached = graph.reachable_from(0);
        if reached != node_count {
            return Err(Error::DisconnectedGraph {
                reached,
                nodes: node_count,
            });
        }
        Ok(graph)
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self::new(n, &edges)
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges)
    }

    /// Star with node 0 at the hub.
    pub fn star(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Self::new(n, &edges)
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`; needs `n >= 3`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewNodes(n));
        }
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((0, n - 1));
        Self::new(n, &edges)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.neighbors[node].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    /// Number of directed (receiver, sender) pairs, i.e. `2 |E|`.
    pub fn directed_edge_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn adjacency(&self) -> DMatrix<i64> {
        let n = self.node_count;
        let mut a = DMatrix::zeros(n, n);
        for &(i, j) in &self.edges {
            a[(i, j)] = 1;
            a[(j, i)] = 1;
        }
        a
    }

    pub fn degree_matrix(&self) -> DMatrix<i64> {
        let d: Vec<i64> = self.degrees().into_iter().map(|d| d as i64).collect();
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))
    }

    /// `L = D - A` in exact integer arithmetic.
    pub fn laplacian(&self) -> DMatrix<i64> {
        self.degree_matrix() - self.adjacency()
    }

    pub fn laplacian_f64(&self) -> DMatrix<f64> {
        self.laplacian().map(|v| v as f64)
    }

    /// Row `i` of `L·v`, evaluated as `d_i v_i - Σ_{j ∈ N_i} v_j` with the
    /// neighbor sum taken in ascending node order.
    #[inline]
    pub fn laplacian_row(&self, node: usize, v: &[f64]) -> f64 {
        let received: f64 = self.neighbors[node].iter().map(|&j| v[j]).sum();
        self.degree(node) as f64 * v[node] - received
    }

    /// `out = L·v`, row by row through [`Graph::laplacian_row`].
    pub fn apply_laplacian(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.laplacian_row(i, v);
        }
    }

    /// BFS hop distances from `source`; `None` for unreachable nodes.
    pub fn hop_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.neighbors[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    fn reachable_from(&self, source: usize) -> usize {
        self.hop_distances(source).iter().flatten().count()
    }

    pub fn diameter(&self) -> usize {
        (0..self.node_count)
            .map(|s| self.hop_distances(s).into_iter().flatten().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Edge-list text: first line `N`, then one `i j` pair per line, 0-indexed.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}", self.node_count).unwrap();
        for &(i, j) in &self.edges {
            writeln!(s, "{i} {j}").unwrap();
        }
        s
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::SpecParse("edge list is empty".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::SpecParse(format!("bad node count line {header:?}")))?;
        let mut edges = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            let parse = |p: Option<&str>| -> Result<usize> {
                p.and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::SpecParse(format!("bad edge line {line:?}")))
            };
            let i = parse(parts.next())?;
            let j = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::SpecParse(format!("bad edge line {line:?}")));
            }
            edges.push((i, j));
        }
        Self::new(n, &edges)
    }

    pub fn read_edge_list(path: &Path) -> Result<Self> {
        Self::from_edge_list(&std::fs::read_to_string(path)?)
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list())?;
        Ok(())
    }
}

/// Free-function form of [`Graph::new`].
pub fn build_graph(node_count: usize, edge_list: &[(usize, usize)]) -> Result<Graph> {
    Graph::new(node_count, edge_list)
}

/// Eigen-decomposition of a connected graph's Laplacian.
///
/// Eigenvalues are ascending with `λ₁` snapped to exactly zero. The basis
/// `U` is orthonormal and its first column is exactly `1/√N`. Every other
/// column is sign-normalized so that its first entry with magnitude above
/// `1e-8` is positive.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    basis: DMatrix<f64>,
}

impl Spectrum {
    pub fn node_count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Non-zero eigenvalues `λ₂ … λ_N`.
    pub fn nonzero_eigenvalues(&self) -> &[f64] {
        &self.eigenvalues[1..]
    }

    /// `U = [1/√N · 1, Φ]`.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// `Φ`: columns 2..N of `U`.
    pub fn phi(&self) -> DMatrix<f64> {
        self.basis.columns(1, self.node_count() - 1).into_owned()
    }

    /// Diagonal `(N-1)×(N-1)` matrix of the non-zero eigenvalues of `-L`.
    pub fn b_matrix(&self) -> DMatrix<f64> {
        let neg: Vec<f64> = self.nonzero_eigenvalues().iter().map(|l| -l).collect();
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(neg))
    }

    pub fn algebraic_connectivity(&self) -> f64 {
        self.eigenvalues[1]
    }
}

pub fn spectral_decompose(graph: &Graph) -> Result<Spectrum> {
    let n = graph.node_count();
    let lap = graph.laplacian_f64();
    let eig = SymmetricEigen::try_new(lap, EIGEN_TOLERANCE, EIGEN_MAX_SWEEPS)
        .ok_or_else(|| Error::EigensolverFailure("no convergence".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let scale = eig.eigenvalues.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let mut eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if eigenvalues[0].abs() > 1e-8 * scale {
        return Err(Error::EigensolverFailure(format!(
            "smallest eigenvalue {} is not zero",
            eigenvalues[0]
        )));
    }
    if eigenvalues[1] <= 1e-8 * scale {
        return Err(Error::EigensolverFailure(format!(
            "second eigenvalue {} is not positive",
            eigenvalues[1]
        )));
    }
    eigenvalues[0] = 0.0;

    let mut basis = DMatrix::zeros(n, n);
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    basis.column_mut(0).fill(inv_sqrt_n);
    for (col, &k) in order.iter().enumerate().skip(1) {
        let v = eig.eigenvectors.column(k);
        let sign = v
            .iter()
            .find(|x| x.abs() > 1e-8)
            .map_or(1.0, |x| x.signum());
        basis.column_mut(col).copy_from(&(v * sign));
    }

    Ok(Spectrum { eigenvalues, basis })
}

pub fn algebraic_connectivity(spectrum: &Spectrum) -> f64 {
    spectrum.algebraic_connectivity()
}

/// Nodes placed uniformly in the unit square, joined when their Euclidean
/// distance is at most `radius`.
///
/// Attempt `k` draws positions from the ChaCha stream `k` of `seed`, so the
/// result depends only on `(node_count, radius, seed)`. Disconnected draws
/// are retried up to [`GEOMETRIC_MAX_ATTEMPTS`] times.
pub fn random_geometric_graph(node_count: usize, radius: f64, seed: u64) -> Result<Graph> {
    if node_count < 2 {
        return Err(Error::TooFewNodes(node_count));
    }
    if !(radius > 0.0 && radius <= std::f64::consts::SQRT_2) {
        return Err(Error::InvalidRadius(radius));
    }
    for attempt in 0..GEOMETRIC_MAX_ATTEMPTS {
        let points = geometric_positions(node_count, seed, attempt as u64);
        let mut edges = Vec::new();
        for i in 0..node_count {
            for j in i + 1..node_count {
                let dx = points[i].0 - points[j].0;
                let dy = points[i].1 - points[j].1;
                if (dx * dx + dy * dy).sqrt() <= radius {
                    edges.push((i, j));
                }
            }
        }
        match Graph::new(node_count, &edges) {
            Ok(g) => return Ok(g),
            Err(Error::DisconnectedGraph { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::CouldNotConnect(GEOMETRIC_MAX_ATTEMPTS))
}

fn geometric_positions(node_count: usize, seed: u64, stream: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..node_count)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn smallest_graph_laplacian() {
        let g = build_graph(2, &[(0, 1)]).unwrap();
        assert_eq!(g.laplacian(), DMatrix::from_row_slice(2, 2, &[1, -1, -1, 1]));
    }

    #[test]
    fn path_degrees_and_row_sums() {
        let g = Graph::path(3).unwrap();
        assert_eq!(g.degrees(), vec![1, 2, 1]);
        let lap = g.laplacian();
        for i in 0..3 {
            assert_eq!(lap.row(i).sum(), 0);
        }
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(build_graph(3, &[(0, 0)]), Err(Error::SelfLoop(0)));
        assert_eq!(
            build_graph(3, &[(0, 1), (1, 0), (1, 2)]),
            Err(Error::DuplicateEdge(1, 0))
        );
        assert!(matches!(
            build_graph(4, &[(0, 1), (2, 3)]),
            Err(Error::DisconnectedGraph {
                reached: 2,
                nodes: 4
            })
        ));
        assert_eq!(build_graph(1, &[]), Err(Error::TooFewNodes(1)));
        assert_eq!(
            build_graph(2, &[(0, 2)]),
            Err(Error::NodeOutOfRange(0, 2, 2))
        );
    }

    #[test]
    fn complete_graph_spectrum() {
        let s = spectral_decompose(&Graph::complete(3).unwrap()).unwrap();
        assert_eq!(s.eigenvalues()[0], 0.0);
        assert_abs_diff_eq!(s.eigenvalues()[1], 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.eigenvalues()[2], 3.0, epsilon = 1e-10);
    }

    #[test]
    fn two_node_basis() {
        let s = spectral_decompose(&Graph::complete(2).unwrap()).unwrap();
        assert_abs_diff_eq!(s.eigenvalues()[1], 2.0, epsilon = 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = s.basis();
        assert_abs_diff_eq!(u[(0, 0)], h, epsilon = 1e-12);
        assert_abs_diff_eq!(u[(1, 0)], h, epsilon = 1e-12);
        assert_abs_diff_eq!(u[(0, 1)], h, epsilon = 1e-12);
        assert_abs_diff_eq!(u[(1, 1)], -h, epsilon = 1e-12);
    }

    #[test]
    fn b_matrix_negates_nonzero_eigenvalues() {
        let s = spectral_decompose(&Graph::path(3).unwrap()).unwrap();
        let b = s.b_matrix();
        assert_eq!(b.shape(), (2, 2));
        assert_abs_diff_eq!(b[(0, 0)], -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(b[(1, 1)], -3.0, epsilon = 1e-10);
        assert_eq!(b[(0, 1)], 0.0);
    }

    #[test]
    fn geometric_graph_full_radius_is_complete() {
        let g = random_geometric_graph(2, std::f64::consts::SQRT_2, 3).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        assert!(matches!(
            random_geometric_graph(5, 0.0, 1),
            Err(Error::InvalidRadius(_))
        ));
        assert!(matches!(
            random_geometric_graph(5, 1.5, 1),
            Err(Error::InvalidRadius(_))
        ));
    }

    #[test]
    fn geometric_graph_gives_up() {
        // 60 nodes with a tiny radius is essentially never connected.
        assert_eq!(
            random_geometric_graph(60, 0.01, 9),
            Err(Error::CouldNotConnect(GEOMETRIC_MAX_ATTEMPTS))
        );
    }

    #[test]
    fn edge_list_parse_errors() {
        assert!(Graph::from_edge_list("").is_err());
        assert!(Graph::from_edge_list("x\n0 1\n").is_err());
        assert!(Graph::from_edge_list("2\n0\n").is_err());
        assert!(Graph::from_edge_list("2\n0 1 2\n").is_err());
        let g = Graph::from_edge_list("# comment\n3\n0 1\n\n1 2\n").unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn apply_laplacian_matches_dense_product() {
        let g = Graph::star(5).unwrap();
        let v = [0.3, -1.0, 2.5, 4.0, 0.0];
        let mut out = [0.0; 5];
        g.apply_laplacian(&v, &mut out);
        let dense = g.laplacian_f64() * nalgebra::DVector::from_row_slice(&v);
        for i in 0..5 {
            assert_abs_diff_eq!(out[i], dense[i], epsilon = 1e-12);
        }
    }
}
