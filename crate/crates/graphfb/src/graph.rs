//! Graph data model, Laplacian, Dirichlet energy, and deterministic generators.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A signal assigns one real value per vertex, in vertex order.
pub type Signal = DVector<f64>;

/// Connected, undirected, weighted graph without self-loops.
///
/// Weights are stored densely: `weights[(i, j)]` is the positive weight of the
/// edge between `i` and `j`, zero when absent; the matrix is symmetric with a
/// zero diagonal. Vertex indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    weights: DMatrix<f64>,
}

/// Interpretation of vertex indices in an edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexBase {
    Zero,
    One,
}

impl Graph {
    /// Validates and wraps a dense weight matrix.
    pub fn from_weights(weights: DMatrix<f64>) -> Result<Self> {
        let n = weights.nrows();
        if weights.ncols() != n || n < 2 {
            return Err(Error::InvalidParam(format!(
                "weight matrix must be square with n >= 2, got {}x{}",
                weights.nrows(),
                weights.ncols()
            )));
        }
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                return Err(Error::SelfLoop(i));
            }
            for j in 0..n {
                let w = weights[(i, j)];
                if !(w >= 0.0) || !w.is_finite() {
                    return Err(Error::NegativeWeight { i, j, w });
                }
                if w != weights[(j, i)] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        let g = Graph { weights };
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.weights.row(i).sum()
    }

    /// Edges as `(i, j, w)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let w = self.weights[(i, j)];
                if w > 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    fn is_connected(&self) -> bool {
        components(&self.weights).len() == 1
    }
}

/// Builds a graph from an edge list with 0-based indices.
pub fn build_graph(n: usize, edges: &[(usize, usize, f64)]) -> Result<Graph> {
    build_graph_with_base(n, edges, IndexBase::Zero)
}

/// Builds a graph from an edge list, interpreting indices per `base`.
///
/// Duplicate listings of the same pair are accepted when the weights agree
/// exactly and rejected otherwise.
pub fn build_graph_with_base(
    n: usize,
    edges: &[(usize, usize, f64)],
    base: IndexBase,
) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParam(format!("need at least 2 vertices, got {n}")));
    }
    let off = match base {
        IndexBase::Zero => 0,
        IndexBase::One => 1,
    };
    let mut w = DMatrix::zeros(n, n);
    for &(ri, rj, wt) in edges {
        let (i, j) = (ri.wrapping_sub(off), rj.wrapping_sub(off));
        if ri < off || rj < off || i >= n || j >= n {
            return Err(Error::IndexOutOfRange { index: ri.max(rj), n });
        }
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        if !(wt > 0.0) || !wt.is_finite() {
            return Err(Error::NegativeWeight { i, j, w: wt });
        }
        let prev = w[(i, j)];
        if prev != 0.0 && prev != wt {
            return Err(Error::DuplicateEdgeConflict { i: i.min(j), j: i.max(j), first: prev, second: wt });
        }
        w[(i, j)] = wt;
        w[(j, i)] = wt;
    }
    Graph::from_weights(w)
}

/// Combinatorial Laplacian L = D - W.
pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let mut l = -g.weights.clone();
    for i in 0..n {
        l[(i, i)] = g.degree(i);
    }
    l
}

/// Dirichlet form: sum of w_ij (x_i - x_j)^2 over all ordered pairs, so each
/// edge counts twice and the value equals 2 x'Lx. Zero exactly on constants.
pub fn dirichlet_energy(g: &Graph, x: &Signal) -> Result<f64> {
    let n = g.n();
    if x.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: x.len() });
    }
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let w = g.weights[(i, j)];
            if w > 0.0 {
                let d = x[i] - x[j];
                acc += w * d * d;
            }
        }
    }
    Ok(acc)
}

/// BFS hop distances from `v` over the edge support (weights ignored).
pub fn hop_distances(g: &Graph, v: usize) -> Result<Vec<usize>> {
    let n = g.n();
    if v >= n {
        return Err(Error::IndexOutOfRange { index: v, n });
    }
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    dist[v] = 0;
    queue.push_back(v);
    while let Some(u) = queue.pop_front() {
        for j in 0..n {
            if g.weights[(u, j)] > 0.0 && dist[j] == usize::MAX {
                dist[j] = dist[u] + 1;
                queue.push_back(j);
            }
        }
    }
    Ok(dist)
}

/// Unit-weight cycle on n >= 3 vertices.
pub fn gen_ring(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParam(format!("ring needs n >= 3, got {n}")));
    }
    let mut edges = Vec::with_capacity(n);
    for i in 0..n {
        edges.push((i, (i + 1) % n, 1.0));
    }
    build_graph(n, &edges)
}

/// Random geometric graph: n points uniform in the unit square; pairs within
/// `radius` get weight exp(-d^2 / (2 sigma^2)) with sigma = radius / 2.
/// Disconnected draws are repaired by chaining components.
pub fn gen_sensor(n: usize, seed: u64, radius: f64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParam(format!("sensor graph needs n >= 2, got {n}")));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidParam(format!("radius must be positive, got {radius}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
    let sigma = radius / 2.0;
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = pts[i].0 - pts[j].0;
            let dy = pts[i].1 - pts[j].1;
            let d2 = dx * dx + dy * dy;
            if d2 <= radius * radius {
                let wt = (-d2 / (2.0 * sigma * sigma)).exp();
                w[(i, j)] = wt;
                w[(j, i)] = wt;
            }
        }
    }
    repair_connectivity(&mut w);
    Graph::from_weights(w)
}

/// Stochastic block model with unit weights: `blocks` contiguous groups of
/// near-equal size, edge probability `p_in` inside a group and `p_out`
/// across. Disconnected draws are repaired by chaining components.
pub fn gen_community(n: usize, seed: u64, blocks: usize, p_in: f64, p_out: f64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParam(format!("community graph needs n >= 2, got {n}")));
    }
    if blocks == 0 || blocks > n {
        return Err(Error::InvalidParam(format!("blocks must be in 1..=n, got {blocks}")));
    }
    for (name, p) in [("p_in", p_in), ("p_out", p_out)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParam(format!("{name} must be in [0, 1], got {p}")));
        }
    }
    let base = n / blocks;
    let rem = n % blocks;
    let mut block_of = Vec::with_capacity(n);
    for b in 0..blocks {
        let size = base + usize::from(b < rem);
        block_of.extend(std::iter::repeat(b).take(size));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if block_of[i] == block_of[j] { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                w[(i, j)] = 1.0;
                w[(j, i)] = 1.0;
            }
        }
    }
    repair_connectivity(&mut w);
    Graph::from_weights(w)
}

/// Connected components over the nonzero support, each sorted ascending,
/// ordered by lowest member.
fn components(w: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = w.nrows();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for j in 0..n {
                if w[(u, j)] > 0.0 && !seen[j] {
                    seen[j] = true;
                    comp.push(j);
                    queue.push_back(j);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Adds unit-weight edges between the lowest-index vertices of successive
/// components. Returns the number of edges added (0 when already connected).
pub(crate) fn repair_connectivity(w: &mut DMatrix<f64>) -> usize {
    let comps = components(w);
    for pair in comps.windows(2) {
        let (a, b) = (pair[0][0], pair[1][0]);
        w[(a, b)] = 1.0;
        w[(b, a)] = 1.0;
    }
    comps.len().saturating_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_vertex() -> Graph {
        build_graph(
            4,
            &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 2.0), (1, 2, 1.0), (1, 3, 1.0), (2, 3, 2.0)],
        )
        .unwrap()
    }

    #[test]
    fn two_vertex_laplacian() {
        let g = build_graph(2, &[(0, 1, 1.0)]).unwrap();
        let l = laplacian(&g);
        assert_eq!(l, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn four_vertex_laplacian_is_the_worked_example() {
        let l = laplacian(&four_vertex());
        let want = DMatrix::from_row_slice(
            4,
            4,
            &[4.0, -1.0, -1.0, -2.0, -1.0, 3.0, -1.0, -1.0, -1.0, -1.0, 4.0, -2.0, -2.0, -1.0, -2.0, 5.0],
        );
        assert_eq!(l, want);
    }

    #[test]
    fn laplacian_rows_sum_to_zero_and_symmetric() {
        for g in [four_vertex(), gen_ring(9).unwrap(), gen_sensor(30, 3, 0.4).unwrap()] {
            let l = laplacian(&g);
            for i in 0..g.n() {
                assert!(l.row(i).sum().abs() <= 1e-12);
            }
            assert_eq!(l, l.transpose());
        }
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(build_graph(3, &[(0, 0, 1.0)]), Err(Error::SelfLoop(0))));
        assert!(matches!(build_graph(3, &[(0, 1, -1.0)]), Err(Error::NegativeWeight { .. })));
        assert!(matches!(build_graph(3, &[(0, 1, 0.0)]), Err(Error::NegativeWeight { .. })));
        assert!(matches!(
            build_graph(3, &[(0, 1, 1.0), (1, 0, 2.0), (1, 2, 1.0)]),
            Err(Error::DuplicateEdgeConflict { .. })
        ));
        assert!(matches!(build_graph(3, &[(0, 1, 1.0)]), Err(Error::Disconnected)));
        assert!(matches!(build_graph(3, &[(0, 5, 1.0)]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn duplicate_edge_with_same_weight_is_idempotent() {
        let g = build_graph(3, &[(0, 1, 2.0), (1, 0, 2.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(g.weight(0, 1), 2.0);
    }

    #[test]
    fn one_based_edge_lists() {
        let g = build_graph_with_base(3, &[(1, 2, 1.0), (2, 3, 1.0)], IndexBase::One).unwrap();
        assert_eq!(g.weight(0, 1), 1.0);
        assert_eq!(g.weight(1, 2), 1.0);
    }

    #[test]
    fn dirichlet_energy_basics() {
        let g = build_graph(2, &[(0, 1, 1.0)]).unwrap();
        let x = Signal::from_vec(vec![0.0, 1.0]);
        assert_eq!(dirichlet_energy(&g, &x).unwrap(), 2.0);
        let c = Signal::from_element(2, 3.7);
        assert_eq!(dirichlet_energy(&g, &c).unwrap(), 0.0);
    }

    #[test]
    fn dirichlet_energy_matches_quadratic_form() {
        let g = gen_sensor(25, 11, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = Signal::from_fn(g.n(), |_, _| rng.gen::<f64>() - 0.5);
        let l = laplacian(&g);
        let quad = (x.transpose() * &l * &x)[(0, 0)];
        let direct = dirichlet_energy(&g, &x).unwrap();
        assert!((2.0 * quad - direct).abs() <= 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn ring_shapes() {
        assert!(gen_ring(2).is_err());
        let k3 = gen_ring(3).unwrap();
        assert_eq!(k3.edges().len(), 3);
        let r4 = gen_ring(4).unwrap();
        assert_eq!(r4.degree(0), 2.0);
        assert_eq!(r4.weight(0, 2), 0.0);
    }

    #[test]
    fn generators_are_deterministic_and_connected() {
        let a = gen_sensor(60, 7, 0.25).unwrap();
        let b = gen_sensor(60, 7, 0.25).unwrap();
        assert_eq!(a, b);
        let c = gen_community(50, 3, 4, 0.4, 0.02).unwrap();
        let d = gen_community(50, 3, 4, 0.4, 0.02).unwrap();
        assert_eq!(c, d);
        assert_ne!(a, gen_sensor(60, 8, 0.25).unwrap());
    }

    #[test]
    fn sparse_sensor_draw_gets_repaired() {
        // Tiny radius forces isolated points; the chain repair must connect them.
        let g = gen_sensor(12, 1, 0.01).unwrap();
        assert_eq!(g.n(), 12);
    }

    #[test]
    fn hop_distances_on_ring() {
        let g = gen_ring(8).unwrap();
        let d = hop_distances(&g, 0).unwrap();
        assert_eq!(d, vec![0, 1, 2, 3, 4, 3, 2, 1]);
    }
}
