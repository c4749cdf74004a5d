//! Simplicial homology with exact rational, prime-field or integer
//! coefficients, homology bases, induced maps and tower reports.
//!
//! Ranks of boundary operators are computed by sparse column reduction of
//! the coboundary matrices with clearing. Homology bases use the reduced
//! boundary columns together with the reduction transforms of the cycles
//! that are not killed, so every cycle has unique coordinates.

mod field;
mod report;

use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::metric::MetricSample;
use crate::poset::{order_complex, SpaceMap};
use crate::simplicial::{rips_graph, SimplicialComplex, Threshold};
use crate::{Error, Exec, IndexSet, Result};

pub use field::{Coefficients, Q};
pub use report::{
    tower_homology, FunctorialityCheck, HomologyOptions, HomologyReport, IdentityCheck, LevelHomology, LimitRank,
    MapHomology, MapRoute, OrderComplexCheck,
};

use field::{Field, PrimeField, RationalField};

type Chain<E> = Vec<(u32, E)>;

/// `a + c·b` for sparse vectors sorted by index.
fn axpy<F: Field>(f: &F, a: &[(u32, F::E)], c: &F::E, b: &[(u32, F::E)]) -> Chain<F::E> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, f.mul(c, &b[j].1)));
            j += 1;
        } else {
            let v = f.add(&a[i].1, &f.mul(c, &b[j].1));
            if !f.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

const NO_PIVOT: u32 = u32::MAX;

struct Reduced<E> {
    columns: Vec<Chain<E>>,
    /// `pivot[row]` is the column whose lowest entry sits in `row`.
    pivot: Vec<u32>,
    transforms: Option<Vec<Chain<E>>>,
    rank: usize,
}

/// Standard column reduction: afterwards the nonzero columns have distinct
/// lowest rows. Columns with `skip(j)` are known to reduce to zero and are
/// left empty.
fn reduce<F: Field>(
    f: &F,
    mut columns: Vec<Chain<F::E>>,
    rows: usize,
    skip: impl Fn(usize) -> bool,
    track: bool,
) -> Reduced<F::E> {
    let mut pivot = vec![NO_PIVOT; rows];
    let mut transforms: Option<Vec<Chain<F::E>>> =
        track.then(|| (0..columns.len() as u32).map(|j| vec![(j, f.one())]).collect());
    let mut rank = 0;
    for j in 0..columns.len() {
        if skip(j) {
            columns[j].clear();
            continue;
        }
        let mut col = std::mem::take(&mut columns[j]);
        while let Some((low, value)) = col.last().cloned() {
            let i = pivot[low as usize];
            if i == NO_PIVOT {
                pivot[low as usize] = j as u32;
                rank += 1;
                break;
            }
            let other = &columns[i as usize];
            let c = f.neg(&f.div(&value, &other.last().expect("pivot column is nonzero").1));
            col = axpy(f, &col, &c, other);
            if let Some(v) = transforms.as_mut() {
                let (head, tail) = v.split_at_mut(j);
                tail[0] = axpy(f, &tail[0], &c, &head[i as usize]);
            }
        }
        columns[j] = col;
    }
    Reduced { columns, pivot, transforms, rank }
}

/// Columns of `∂_k`: one per `k`-simplex, rows are `(k-1)`-simplices.
fn boundary_columns<F: Field>(f: &F, complex: &SimplicialComplex, k: usize, exec: Exec) -> Vec<Chain<F::E>> {
    exec.map_slice(complex.simplices(k), |s| {
        let mut col: Chain<F::E> = (0..s.len())
            .map(|p| {
                let row = complex.index_of(&s.without_position(p)).expect("complex is closed under faces");
                (row as u32, f.from_i64(if p % 2 == 0 { 1 } else { -1 }))
            })
            .collect();
        col.sort_unstable_by_key(|e| e.0);
        col
    })
}

/// Columns of `δ_d = ∂_{d+1}^T`: one per `d`-simplex, rows are `(d+1)`-simplices.
fn coboundary_columns<F: Field>(f: &F, complex: &SimplicialComplex, d: usize, exec: Exec) -> Vec<Chain<F::E>> {
    let facets: Vec<Vec<u32>> = exec.map_slice(complex.simplices(d + 1), |s| {
        (0..s.len())
            .map(|p| complex.index_of(&s.without_position(p)).expect("complex is closed under faces") as u32)
            .collect()
    });
    let mut columns: Vec<Chain<F::E>> = vec![Vec::new(); complex.count(d)];
    for (row, fs) in facets.iter().enumerate() {
        for (p, &i) in fs.iter().enumerate() {
            columns[i as usize].push((row as u32, f.from_i64(if p % 2 == 0 { 1 } else { -1 })));
        }
    }
    columns
}

/// `ranks[d] = rank ∂_d` for `d = 0..=top` (`∂_0 = 0`).
fn boundary_ranks<F: Field>(f: &F, complex: &SimplicialComplex, top: usize, exec: Exec) -> Vec<usize> {
    let mut ranks = vec![0; top + 1];
    let mut cleared = vec![false; complex.count(0)];
    for d in 1..=top {
        let columns = coboundary_columns(f, complex, d - 1, exec);
        let red = reduce(f, columns, complex.count(d), |j| cleared[j], false);
        ranks[d] = red.rank;
        // a d-simplex that is a pivot row of δ_{d-1} spans a zero column of δ_d
        cleared = red.pivot.iter().map(|&c| c != NO_PIVOT).collect();
    }
    ranks
}

/// One Betti number with its bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiResult {
    pub degree: usize,
    pub betti: usize,
    /// Invariant factors greater than one (integer coefficients only).
    pub torsion: Vec<u64>,
    /// The complex stops below dimension `degree + 1`, so boundaries from
    /// above are missing and `betti` is only the cycle rank.
    pub skeleton_limited: bool,
}

/// `β_k` of `complex`.
pub fn betti(complex: &SimplicialComplex, k: usize, coefficients: Coefficients) -> Result<BettiResult> {
    let all = betti_numbers(complex, k, coefficients, Exec::Sequential)?;
    Ok(all.into_iter().nth(k).expect("one result per degree"))
}

/// `β_0, ..., β_{k_max}` of `complex`.
pub fn betti_numbers(
    complex: &SimplicialComplex,
    k_max: usize,
    coefficients: Coefficients,
    exec: Exec,
) -> Result<Vec<BettiResult>> {
    if k_max > complex.cap() {
        return Err(Error::DegreeOutOfRange { degree: k_max, cap: complex.cap() });
    }
    let top = (k_max + 1).min(complex.cap());
    let ranks = match coefficients {
        Coefficients::Rationals | Coefficients::Integers => boundary_ranks(&RationalField, complex, top, exec),
        Coefficients::Prime(p) => boundary_ranks(&PrimeField::new(p)?, complex, top, exec),
    };
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let limited = k + 1 > complex.cap();
        let above = if limited { 0 } else { ranks[k + 1] };
        let torsion = if coefficients == Coefficients::Integers && !limited {
            torsion_coefficients(complex, k + 1)?
        } else {
            Vec::new()
        };
        out.push(BettiResult { degree: k, betti: complex.count(k) - ranks[k] - above, torsion, skeleton_limited: limited });
    }
    Ok(out)
}

/// Largest dense integer matrix (in cells) reduced to Smith normal form.
pub const SMITH_CELL_CAP: usize = 4_000_000;

/// Invariant factors `> 1` of `∂_k`, i.e. the torsion of `H_{k-1}`.
fn torsion_coefficients(complex: &SimplicialComplex, k: usize) -> Result<Vec<u64>> {
    let (rows, cols) = (complex.count(k - 1), complex.count(k));
    if rows == 0 || cols == 0 {
        return Ok(Vec::new());
    }
    if rows.saturating_mul(cols) > SMITH_CELL_CAP {
        return Err(Error::ResourceCap { what: "Smith normal form".into(), needed: rows * cols, cap: SMITH_CELL_CAP });
    }
    let dense = crate::simplicial::boundary_matrix(complex, k)?.to_dense();
    Ok(smith_diagonal(dense)?.into_iter().filter(|&d| d > 1).collect())
}

/// Invariant factors `d_1 | d_2 | ...` of an integer matrix (zeros dropped).
pub fn smith_diagonal(mut m: Vec<Vec<i64>>) -> Result<Vec<u64>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diagonal: Vec<u64> = Vec::new();
    let overflow = || Error::Overflow("Smith normal form");
    for t in 0..rows.min(cols) {
        // smallest nonzero entry of the remaining block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(t) {
            for (j, &v) in row.iter().enumerate().skip(t) {
                if v != 0 && best.is_none_or(|(bi, bj)| v.unsigned_abs() < m[bi][bj].unsigned_abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if m[i][t] != 0 {
                    let q = m[i][t] / m[t][t];
                    for j in t..cols {
                        let v = m[t][j].checked_mul(q).and_then(|x| m[i][j].checked_sub(x)).ok_or_else(overflow)?;
                        m[i][j] = v;
                    }
                    clean &= m[i][t] == 0;
                }
            }
            for j in t + 1..cols {
                if m[t][j] != 0 {
                    let q = m[t][j] / m[t][t];
                    for row in m.iter_mut().skip(t) {
                        let v = row[t].checked_mul(q).and_then(|x| row[j].checked_sub(x)).ok_or_else(overflow)?;
                        row[j] = v;
                    }
                    clean &= m[t][j] == 0;
                }
            }
            if clean {
                break;
            }
            // a smaller remainder appeared in the pivot row or column
            let mut best = (t, t);
            for i in t + 1..rows {
                if m[i][t] != 0 && m[i][t].unsigned_abs() < m[best.0][best.1].unsigned_abs() {
                    best = (i, t);
                }
            }
            for j in t + 1..cols {
                if m[t][j] != 0 && m[t][j].unsigned_abs() < m[best.0][best.1].unsigned_abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                m.swap(t, best.0);
            }
            if best.1 != t {
                for row in m.iter_mut() {
                    row.swap(t, best.1);
                }
            }
        }
        diagonal.push(m[t][t].unsigned_abs());
    }
    // turn the diagonal into a divisibility chain
    for i in 0..diagonal.len() {
        for j in i + 1..diagonal.len() {
            let (a, b) = (diagonal[i], diagonal[j]);
            let g = num_integer::gcd(a, b);
            diagonal[i] = g;
            diagonal[j] = a / g * b;
        }
    }
    Ok(diagonal)
}

/// A basis of `H_k` with elimination data for coordinates.
struct Basis<F: Field> {
    degree: usize,
    cycles: Vec<Chain<F::E>>,
    /// `cycle_at[j]` is the basis index of the cycle whose lowest simplex is `j`.
    cycle_at: Vec<u32>,
    /// Reduced boundary column with lowest simplex `j`.
    boundary_at: Vec<u32>,
    boundaries: Vec<Chain<F::E>>,
}

impl<F: Field> Basis<F> {
    fn build(f: &F, complex: &SimplicialComplex, k: usize, exec: Exec) -> Self {
        let n = complex.count(k);
        let mut boundary_at = vec![NO_PIVOT; n];
        let mut boundaries = Vec::new();
        if k < complex.cap() && complex.count(k + 1) > 0 {
            let red = reduce(f, boundary_columns(f, complex, k + 1, exec), n, |_| false, false);
            for col in red.columns.into_iter().filter(|c| !c.is_empty()) {
                boundary_at[col.last().expect("nonzero").0 as usize] = boundaries.len() as u32;
                boundaries.push(col);
            }
        }
        let killed = |j: usize| boundary_at[j] != NO_PIVOT;
        let mut cycle_at = vec![NO_PIVOT; n];
        let mut cycles = Vec::new();
        if k == 0 {
            for j in (0..n).filter(|&j| !killed(j)) {
                cycle_at[j] = cycles.len() as u32;
                cycles.push(vec![(j as u32, f.one())]);
            }
        } else {
            let red = reduce(f, boundary_columns(f, complex, k, exec), complex.count(k - 1), killed, true);
            let transforms = red.transforms.expect("tracked");
            for (j, v) in transforms.into_iter().enumerate() {
                if !killed(j) && red.columns[j].is_empty() {
                    cycle_at[j] = cycles.len() as u32;
                    cycles.push(v);
                }
            }
        }
        Self { degree: k, cycles, cycle_at, boundary_at, boundaries }
    }

    /// Coordinates of the class of the cycle `z` in this basis.
    fn coordinates(&self, f: &F, mut z: Chain<F::E>) -> Result<Vec<F::E>> {
        let mut coords = vec![f.zero(); self.cycles.len()];
        while let Some((low, value)) = z.last().cloned() {
            let low = low as usize;
            if low >= self.cycle_at.len() {
                return Err(Error::NotACycle { degree: self.degree });
            }
            if self.boundary_at[low] != NO_PIVOT {
                let b = &self.boundaries[self.boundary_at[low] as usize];
                let c = f.neg(&f.div(&value, &b.last().expect("nonzero").1));
                z = axpy(f, &z, &c, b);
            } else if self.cycle_at[low] != NO_PIVOT {
                let idx = self.cycle_at[low] as usize;
                // basis cycles carry coefficient one on their lowest simplex
                coords[idx] = f.add(&coords[idx], &value);
                z = axpy(f, &z, &f.neg(&value), &self.cycles[idx]);
            } else {
                return Err(Error::NotACycle { degree: self.degree });
            }
        }
        Ok(coords)
    }
}

enum BasisSet {
    Rational(Vec<Basis<RationalField>>),
    Prime(PrimeField, Vec<Basis<PrimeField>>),
}

/// Homology bases of a complex in degrees `0..=k_max`.
pub struct ComplexHomology {
    complex: Arc<SimplicialComplex>,
    coefficients: Coefficients,
    bases: BasisSet,
}

impl std::fmt::Debug for ComplexHomology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComplexHomology")
            .field("coefficients", &self.coefficients)
            .field("betti", &(0..self.degrees()).map(|k| self.betti(k)).collect::<Vec<_>>())
            .finish()
    }
}

impl ComplexHomology {
    pub fn new(complex: Arc<SimplicialComplex>, k_max: usize, coefficients: Coefficients, exec: Exec) -> Result<Self> {
        if k_max + 1 > complex.cap() {
            return Err(Error::DegreeOutOfRange { degree: k_max + 1, cap: complex.cap() });
        }
        let bases = match coefficients {
            Coefficients::Integers => return Err(Error::NeedsField),
            Coefficients::Rationals => {
                BasisSet::Rational(exec.map_range(k_max + 1, |k| Basis::build(&RationalField, &complex, k, exec)))
            }
            Coefficients::Prime(p) => {
                let f = PrimeField::new(p)?;
                let bases = exec.map_range(k_max + 1, |k| Basis::build(&f, &complex, k, exec));
                BasisSet::Prime(f, bases)
            }
        };
        Ok(Self { complex, coefficients, bases })
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn coefficients(&self) -> Coefficients {
        self.coefficients
    }

    fn degrees(&self) -> usize {
        match &self.bases {
            BasisSet::Rational(b) => b.len(),
            BasisSet::Prime(_, b) => b.len(),
        }
    }

    fn check_degree(&self, k: usize) -> Result<()> {
        if k >= self.degrees() {
            return Err(Error::DegreeOutOfRange { degree: k, cap: self.degrees().saturating_sub(1) });
        }
        Ok(())
    }

    pub fn betti(&self, k: usize) -> usize {
        match &self.bases {
            BasisSet::Rational(b) => b.get(k).map_or(0, |b| b.cycles.len()),
            BasisSet::Prime(_, b) => b.get(k).map_or(0, |b| b.cycles.len()),
        }
    }

    /// Cycle representatives of the basis classes in degree `k`, as sparse
    /// chains over the `k`-simplices.
    pub fn representatives(&self, k: usize) -> Result<Vec<Vec<(u32, Q)>>> {
        self.check_degree(k)?;
        fn lift<F: Field>(f: &F, b: &Basis<F>) -> Vec<Vec<(u32, Q)>> {
            b.cycles.iter().map(|z| z.iter().map(|(i, v)| (*i, f.to_q(v))).collect()).collect()
        }
        Ok(match &self.bases {
            BasisSet::Rational(b) => lift(&RationalField, &b[k]),
            BasisSet::Prime(f, b) => lift(f, &b[k]),
        })
    }

    /// Coordinates of the class of a `k`-cycle in the basis.
    pub fn coordinates(&self, k: usize, chain: &[(u32, Q)]) -> Result<Vec<Q>> {
        self.check_degree(k)?;
        fn go<F: Field>(f: &F, b: &Basis<F>, chain: &[(u32, Q)]) -> Result<Vec<Q>> {
            let mut z: Chain<F::E> = Vec::with_capacity(chain.len());
            for (i, q) in chain {
                let v = f.from_q(q)?;
                if !f.is_zero(&v) {
                    z.push((*i, v));
                }
            }
            z.sort_unstable_by_key(|e| e.0);
            Ok(b.coordinates(f, z)?.iter().map(|v| f.to_q(v)).collect())
        }
        match &self.bases {
            BasisSet::Rational(b) => go(&RationalField, &b[k], chain),
            BasisSet::Prime(f, b) => go(f, &b[k], chain),
        }
    }
}

/// Image of a `k`-chain under the simplicial map with vertex map
/// `vertex_map`; degenerate simplices go to zero.
pub fn push_forward(
    source: &SimplicialComplex,
    target: &SimplicialComplex,
    vertex_map: &[u32],
    k: usize,
    chain: &[(u32, Q)],
) -> Result<Vec<(u32, Q)>> {
    let mut acc: std::collections::BTreeMap<u32, Q> = std::collections::BTreeMap::new();
    for (idx, c) in chain {
        let sigma = &source.simplices(k)[*idx as usize];
        let mut image: Vec<u32> = sigma.iter().map(|v| vertex_map[v as usize]).collect();
        let negative = sort_with_parity(&mut image);
        if image.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let tau = IndexSet::from_sorted(&image);
        let row = target
            .index_of(&tau)
            .ok_or_else(|| Error::ImageNotInTarget { element: *idx as usize, image: tau.to_vec() })?;
        let term = if negative { c.neg() } else { c.clone() };
        let entry = acc.entry(row as u32).or_insert_with(Q::zero);
        *entry = entry.add(&term);
    }
    Ok(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect())
}

/// Sorts in place; returns `true` for an odd permutation.
fn sort_with_parity(v: &mut [u32]) -> bool {
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    odd
}

/// Matrix of a map on homology in chosen bases: column `j` holds the
/// coordinates of the image of source basis class `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedMatrix {
    pub coefficients: Coefficients,
    pub degree: usize,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Q>>,
}

impl InducedMatrix {
    pub fn identity(coefficients: Coefficients, degree: usize, n: usize) -> Self {
        let entries =
            (0..n).map(|i| (0..n).map(|j| if i == j { Q::from_i64(1) } else { Q::zero() }).collect()).collect();
        Self { coefficients, degree, rows: n, cols: n, entries }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.coefficients, self.degree, self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Q::is_zero)
    }

    /// `self · other` (apply `other` first).
    pub fn mul(&self, other: &InducedMatrix) -> Result<InducedMatrix> {
        if self.cols != other.rows || self.coefficients != other.coefficients {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut entries = vec![vec![Q::zero(); other.cols]; self.rows];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = Q::zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.entries[i][k].mul(&other.entries[k][j]));
                }
                *cell = match self.coefficients {
                    Coefficients::Prime(p) => acc.modulo(p)?,
                    _ => acc,
                };
            }
        }
        Ok(InducedMatrix { coefficients: self.coefficients, degree: self.degree, rows: self.rows, cols: other.cols, entries })
    }

    pub fn rank(&self) -> usize {
        match self.coefficients {
            Coefficients::Prime(p) => {
                let f = PrimeField::new(p).expect("validated prime");
                dense_rank(&f, &self.entries)
            }
            _ => dense_rank(&RationalField, &self.entries),
        }
    }

    /// Entries as strings (`"p/q"` for rationals).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "coefficients": self.coefficients.to_string(),
            "degree": self.degree,
            "rows": self.rows,
            "cols": self.cols,
            "entries": self.entries.iter().map(|r| r.iter().map(Q::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

fn dense_rank<F: Field>(f: &F, entries: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<F::E>> =
        entries.iter().map(|r| r.iter().map(|q| f.from_q(q).expect("entries live in the field")).collect()).collect();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !f.is_zero(&m[r][c])) else { continue };
        m.swap(rank, p);
        for r in 0..rows {
            if r != rank && !f.is_zero(&m[r][c]) {
                let factor = f.neg(&f.div(&m[r][c], &m[rank][c]));
                for cc in c..cols {
                    let v = f.add(&m[r][cc], &f.mul(&factor, &m[rank][cc]));
                    m[r][cc] = v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Matrix of `H_k` of the simplicial map `vertex_map` between two complexes.
pub fn induced_matrix(
    source: &ComplexHomology,
    target: &ComplexHomology,
    vertex_map: &[u32],
    k: usize,
) -> Result<InducedMatrix> {
    if source.coefficients != target.coefficients {
        return Err(Error::InvalidSample("homology computed over different coefficients".into()));
    }
    if vertex_map.len() != source.complex.vertex_count() {
        return Err(Error::PartialAssignment { expected: source.complex.vertex_count(), got: vertex_map.len() });
    }
    let reps = source.representatives(k)?;
    target.check_degree(k)?;
    let mut columns = Vec::with_capacity(reps.len());
    for z in &reps {
        let image = push_forward(&source.complex, &target.complex, vertex_map, k, z)?;
        columns.push(target.coordinates(k, &image)?);
    }
    let rows = target.betti(k);
    let entries = (0..rows).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
    Ok(InducedMatrix { coefficients: source.coefficients, degree: k, rows, cols: reps.len(), entries })
}

/// `H_k` of an order-preserving map, computed on order complexes: a chain
/// `C_0 < ... < C_k` goes to `f(C_0) <= ... <= f(C_k)`, or to zero when two
/// images coincide.
pub fn induced_map(f: &SpaceMap, k: usize, coefficients: Coefficients, exec: Exec) -> Result<InducedMatrix> {
    let source = Arc::new(order_complex(f.source(), k + 1, exec));
    let target = Arc::new(order_complex(f.target(), k + 1, exec));
    let hs = ComplexHomology::new(source, k, coefficients, exec)?;
    let ht = ComplexHomology::new(target, k, coefficients, exec)?;
    let map: Vec<u32> = f.assignment().into_iter().map(|y| y as u32).collect();
    induced_matrix(&hs, &ht, &map, k)
}

/// Connected components of the Rips graph, by union-find.
pub fn component_count_oracle(sample: &MetricSample, threshold: f64, mode: Threshold, tol: f64, exec: Exec) -> usize {
    let edges = rips_graph(sample, threshold, mode, tol, exec);
    let mut uf = UnionFind::<u32>::new(sample.len());
    for (a, b) in edges {
        uf.union(a, b);
    }
    let mut roots = uf.into_labeling();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

/// Dense exact rank of an integer matrix (used for cross-checks).
pub fn rational_rank(dense: &[Vec<i64>]) -> usize {
    let m: Vec<Vec<Q>> = dense.iter().map(|r| r.iter().map(|&v| Q::from_i64(v)).collect()).collect();
    dense_rank(&RationalField, &m)
}
