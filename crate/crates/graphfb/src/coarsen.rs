//! graph reduction to exactly s supernodes, so the lowpass channel's s
//! samples can live on a graph of their own.
//!
//! vertices are paired by greedy heavy-edge matching (heaviest edge first,
//! ties broken by lowest index pair), then leftover singletons are merged
//! pairwise by ascending index until exactly s = ceil(n/2) supernodes
//! remain. a supernode may therefore hold two non-adjacent vertices; the
//! coarse edge weight is the sum of fine weights between the two groups.
//! contraction keeps the graph connected, but the chaining repair runs
//! defensively anyway.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::graph::{laplacian, repair_connectivity, Graph};
use crate::sampler::channel_sizes;
use crate::spectral::eig_sym;

#[derive(Debug, Clone, PartialEq)]
pub struct CoarseMap {
    pub fine_n: usize,
    pub coarse_n: usize,
    /// coarse index of every fine vertex; each coarse vertex has one or two
    /// fine preimages, and coarse ids are ordered by smallest fine member.
    pub assignment: Vec<usize>,
    /// None when everything collapsed into a single supernode (n = 2).
    pub coarse_graph: Option<Graph>,
}

pub fn coarsen(g: &Graph) -> CoarseMap {
    let n = g.n();
    let (s, _) = channel_sizes(n);
    let mut edges = g.edges();
    edges.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .expect("graph weights are finite")
            .then(a.0.cmp(&b.0))
            .then(a.1.cmp(&b.1))
    });
    let mut mate: Vec<Option<usize>> = vec![None; n];
    for &(i, j, _) in &edges {
        if mate[i].is_none() && mate[j].is_none() {
            mate[i] = Some(j);
            mate[j] = Some(i);
        }
    }
    let singles: Vec<usize> = (0..n).filter(|&v| mate[v].is_none()).collect();
    for pair in singles.chunks_exact(2) {
        mate[pair[0]] = Some(pair[1]);
        mate[pair[1]] = Some(pair[0]);
    }
    let mut assignment = vec![usize::MAX; n];
    let mut next = 0usize;
    for v in 0..n {
        if assignment[v] != usize::MAX {
            continue;
        }
        assignment[v] = next;
        if let Some(p) = mate[v] {
            assignment[p] = next;
        }
        next += 1;
    }
    debug_assert_eq!(next, s);
    if s == 1 {
        return CoarseMap { fine_n: n, coarse_n: 1, assignment, coarse_graph: None };
    }
    let mut w = DMatrix::zeros(s, s);
    for (i, j, wt) in g.edges() {
        let (a, b) = (assignment[i], assignment[j]);
        if a != b {
            w[(a, b)] += wt;
            w[(b, a)] += wt;
        }
    }
    repair_connectivity(&mut w);
    let coarse_graph =
        Graph::from_weights(w).expect("contraction of a connected graph stays connected");
    CoarseMap { fine_n: n, coarse_n: s, assignment, coarse_graph: Some(coarse_graph) }
}

/// eigenbasis of the coarse laplacian, identity in the trivial one-vertex
/// case. any orthogonal matrix here leaves reconstruction untouched; this
/// one gives the lowpass samples a frequency ordering on the coarse graph.
pub fn coarse_basis(cm: &CoarseMap) -> Result<DMatrix<f64>> {
    match &cm.coarse_graph {
        None => Ok(DMatrix::identity(1, 1)),
        Some(g) => Ok(eig_sym(&laplacian(g))?.basis().clone()),
    }
}

impl CoarseMap {
    pub fn to_json(&self) -> String {
        let ids: Vec<String> = self.assignment.iter().map(|v| v.to_string()).collect();
        format!(
            "{{\n  \"fine_n\": {},\n  \"coarse_n\": {},\n  \"assignment\": [{}]\n}}\n",
            self.fine_n,
            self.coarse_n,
            ids.join(", ")
        )
    }
}
