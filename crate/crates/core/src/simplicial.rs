//! Simplicial complexes, Vietoris-Rips construction and boundary matrices.

use serde::{Deserialize, Serialize};

use crate::metric::{within, BallMode, MetricSample};
use crate::{Error, Exec, IndexSet, Result};

/// A simplicial complex stored as canonical sorted face lists per dimension.
///
/// Simplices are strictly increasing vertex tuples; each dimension's list is
/// in lexicographic order, so lookups are binary searches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialComplex {
    vertex_count: usize,
    cap: usize,
    simplices: Vec<Vec<IndexSet>>,
}

impl SimplicialComplex {
    /// The complex generated by `faces` (closed under taking faces),
    /// truncated at dimension `cap`.
    pub fn from_simplices<I>(vertex_count: usize, cap: usize, faces: I) -> Result<Self>
    where
        I: IntoIterator<Item = IndexSet>,
    {
        let mut by_dim: Vec<Vec<IndexSet>> = vec![Vec::new(); cap + 1];
        for f in faces {
            if f.is_empty() {
                continue;
            }
            if let Some(v) = f.iter().find(|&v| v as usize >= vertex_count) {
                return Err(Error::IndexOutOfRange { index: v as usize, size: vertex_count });
            }
            let top = f.len() - 1;
            if top <= cap {
                by_dim[top].push(f);
            } else {
                // keep only the cap-dimensional faces of an oversized simplex
                for sub in subsets_of_size(f.as_slice(), cap + 1) {
                    by_dim[cap].push(sub);
                }
            }
        }
        for d in (1..=cap).rev() {
            by_dim[d].sort_unstable();
            by_dim[d].dedup();
            let facets: Vec<IndexSet> =
                by_dim[d].iter().flat_map(|s| (0..s.len()).map(move |p| s.without_position(p))).collect();
            by_dim[d - 1].extend(facets);
        }
        by_dim[0].sort_unstable();
        by_dim[0].dedup();
        while by_dim.len() > 1 && by_dim.last().is_some_and(Vec::is_empty) {
            by_dim.pop();
        }
        Ok(Self { vertex_count, cap, simplices: by_dim })
    }

    /// Assembles a complex from per-dimension lists that are already sorted
    /// and closed under faces.
    pub(crate) fn from_sorted_parts(vertex_count: usize, cap: usize, mut simplices: Vec<Vec<IndexSet>>) -> Self {
        debug_assert!(simplices.iter().all(|l| l.windows(2).all(|w| w[0] < w[1])));
        while simplices.len() > 1 && simplices.last().is_some_and(Vec::is_empty) {
            simplices.pop();
        }
        if simplices.is_empty() {
            simplices.push(Vec::new());
        }
        Self { vertex_count, cap, simplices }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Maximum dimension the complex was built to.
    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Highest dimension with at least one simplex.
    pub fn dimension(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn simplices(&self, dim: usize) -> &[IndexSet] {
        self.simplices.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, dim: usize) -> usize {
        self.simplices(dim).len()
    }

    pub fn total(&self) -> usize {
        self.simplices.iter().map(Vec::len).sum()
    }

    pub fn index_of(&self, simplex: &IndexSet) -> Option<usize> {
        if simplex.is_empty() {
            return None;
        }
        self.simplices(simplex.len() - 1).binary_search(simplex).ok()
    }

    pub fn contains(&self, simplex: &IndexSet) -> bool {
        self.index_of(simplex).is_some()
    }

    /// All simplices in (dimension, lexicographic) order.
    pub fn iter(&self) -> impl Iterator<Item = &IndexSet> {
        self.simplices.iter().flatten()
    }

    /// Maximal simplices (those that are not a facet of another simplex).
    pub fn maximal_simplices(&self) -> Vec<IndexSet> {
        let mut out = Vec::new();
        for d in 0..=self.dimension() {
            let cofaces = self.simplices(d + 1);
            let mut covered = vec![false; self.count(d)];
            for s in cofaces {
                for p in 0..s.len() {
                    if let Some(i) = self.index_of(&s.without_position(p)) {
                        covered[i] = true;
                    }
                }
            }
            out.extend(self.simplices(d).iter().zip(covered).filter(|(_, c)| !c).map(|(s, _)| s.clone()));
        }
        out
    }
}

fn subsets_of_size(items: &[u32], k: usize) -> Vec<IndexSet> {
    fn rec(items: &[u32], k: usize, start: usize, cur: &mut Vec<u32>, out: &mut Vec<IndexSet>) {
        if cur.len() == k {
            out.push(IndexSet::from_sorted(cur));
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Edge threshold rule for the 1-skeleton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// `d(u, v) < t`
    Strict,
    /// `d(u, v) <= t`
    NonStrict,
}

impl Threshold {
    pub fn ball_mode(self) -> BallMode {
        match self {
            Threshold::Strict => BallMode::Open,
            Threshold::NonStrict => BallMode::Closed,
        }
    }
}

/// Edges `{u, v}`, `u < v`, of the Vietoris-Rips 1-skeleton, by brute force.
pub fn rips_graph(sample: &MetricSample, threshold: f64, mode: Threshold, tol: f64, exec: Exec) -> Vec<(u32, u32)> {
    let n = sample.len() as u32;
    let mode = mode.ball_mode();
    let per_vertex = exec.map_range(n as usize, |u| {
        let u = u as u32;
        (u + 1..n).filter(|&v| within(sample.dist(u, v), threshold, mode, tol)).map(|v| (u, v)).collect::<Vec<_>>()
    });
    per_vertex.into_iter().flatten().collect()
}

/// Clique complex of a graph up to dimension `max_dim`, by incremental
/// expansion: each simplex is extended by the common upper neighbours of
/// its vertices.
pub fn clique_expansion(edges: &[(u32, u32)], vertex_count: usize, max_dim: usize, exec: Exec) -> SimplicialComplex {
    let mut upper: Vec<Vec<u32>> = vec![Vec::new(); vertex_count];
    for &(a, b) in edges {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if a != b {
            upper[a as usize].push(b);
        }
    }
    for list in &mut upper {
        list.sort_unstable();
        list.dedup();
    }

    fn expand(
        upper: &[Vec<u32>],
        simplex: &mut Vec<u32>,
        candidates: &[u32],
        max_dim: usize,
        out: &mut [Vec<IndexSet>],
    ) {
        out[simplex.len() - 1].push(IndexSet::from_sorted(simplex));
        if simplex.len() > max_dim {
            return;
        }
        for (i, &v) in candidates.iter().enumerate() {
            let next: Vec<u32> = intersect_sorted(&candidates[i + 1..], &upper[v as usize]);
            simplex.push(v);
            expand(upper, simplex, &next, max_dim, out);
            simplex.pop();
        }
    }

    let per_vertex = exec.map_range(vertex_count, |v| {
        let mut out = vec![Vec::new(); max_dim + 1];
        let mut simplex = vec![v as u32];
        expand(&upper, &mut simplex, &upper[v], max_dim, &mut out);
        out
    });
    let mut simplices: Vec<Vec<IndexSet>> = vec![Vec::new(); max_dim + 1];
    for part in per_vertex {
        for (d, list) in part.into_iter().enumerate() {
            simplices[d].extend(list);
        }
    }
    SimplicialComplex::from_sorted_parts(vertex_count, max_dim, simplices)
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Vietoris-Rips complex: every subset of at most `max_dim + 1` points
/// whose pairwise distances pass the threshold rule.
pub fn vietoris_rips(
    sample: &MetricSample,
    threshold: f64,
    mode: Threshold,
    max_dim: usize,
    tol: f64,
    exec: Exec,
) -> SimplicialComplex {
    let edges = rips_graph(sample, threshold, mode, tol, exec);
    clique_expansion(&edges, sample.len(), max_dim, exec)
}

/// Sparse integer matrix stored by columns; row indices ascend in each column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    pub rows: usize,
    pub columns: Vec<Vec<(u32, i64)>>,
}

impl SparseIntMatrix {
    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut dense = vec![vec![0i64; self.cols()]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                dense[i as usize][j] = v;
            }
        }
        dense
    }

    /// Dense product `self * other`.
    pub fn mul_dense(&self, other: &SparseIntMatrix) -> Vec<Vec<i64>> {
        assert_eq!(self.cols(), other.rows);
        let mut out = vec![vec![0i64; other.cols()]; self.rows];
        for (j, col) in other.columns.iter().enumerate() {
            for &(k, b) in col {
                for &(i, a) in &self.columns[k as usize] {
                    out[i as usize][j] += a * b;
                }
            }
        }
        out
    }
}

/// Matrix of `∂_k : C_k → C_{k-1}` in the lexicographic bases, with the
/// facet omitting position `i` carrying sign `(-1)^i`.
pub fn boundary_matrix(complex: &SimplicialComplex, k: usize) -> Result<SparseIntMatrix> {
    if k == 0 || k > complex.cap() {
        return Err(Error::DegreeOutOfRange { degree: k, cap: complex.cap() });
    }
    let rows = complex.count(k - 1);
    let columns = complex
        .simplices(k)
        .iter()
        .map(|s| {
            let mut col: Vec<(u32, i64)> = (0..s.len())
                .map(|p| {
                    let row = complex.index_of(&s.without_position(p)).expect("complex is closed under faces");
                    (row as u32, if p % 2 == 0 { 1 } else { -1 })
                })
                .collect();
            col.sort_unstable_by_key(|e| e.0);
            col
        })
        .collect();
    Ok(SparseIntMatrix { rows, columns })
}
