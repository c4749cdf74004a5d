//! Brute-force reference computations over plain data: simplices are
//! sorted `Vec<u32>`, distances come from a full matrix, and linear
//! algebra is dense Gaussian elimination over `BigRational`.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Mat = Vec<Vec<BigRational>>;

pub fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Parses `"a"` or `"a/b"`.
pub fn parse_q(s: &str) -> BigRational {
    match s.split_once('/') {
        Some((a, b)) => BigRational::new(a.parse().unwrap(), b.parse().unwrap()),
        None => BigRational::from_integer(s.parse().unwrap()),
    }
}

fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![BigRational::zero(); c]; r]
}

/// Row echelon form; returns the pivot columns.
fn echelon(m: &mut Mat) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = BigRational::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = m[r][j].clone() * f.clone();
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Mat) -> usize {
    let mut a = m.clone();
    echelon(&mut a).len()
}

/// Basis of the null space of `m` (with `cols` columns), as column vectors.
pub fn null_space(m: &Mat, cols: usize) -> Vec<Vec<BigRational>> {
    let mut a = m.clone();
    let pivots = echelon(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Columns side by side.
pub fn hcat(columns_a: &[Vec<BigRational>], columns_b: &[Vec<BigRational>], rows: usize) -> Mat {
    let all: Vec<&Vec<BigRational>> = columns_a.iter().chain(columns_b).collect();
    let mut m = zeros(rows, all.len());
    for (j, c) in all.iter().enumerate() {
        for i in 0..rows {
            m[i][j] = c[i].clone();
        }
    }
    m
}

fn columns_of(m: &Mat, rows: usize, cols: usize) -> Vec<Vec<BigRational>> {
    (0..cols).map(|j| (0..rows).map(|i| m[i][j].clone()).collect()).collect()
}

/// A complex as lists of simplices per dimension.
#[derive(Clone, Debug)]
pub struct Cx {
    pub dims: Vec<Vec<Vec<u32>>>,
    index: Vec<HashMap<Vec<u32>, usize>>,
}

impl Cx {
    pub fn new(mut dims: Vec<Vec<Vec<u32>>>) -> Self {
        for d in dims.iter_mut() {
            for s in d.iter_mut() {
                s.sort_unstable();
            }
        }
        let index = dims.iter().map(|d| d.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
        Cx { dims, index }
    }

    /// Closes a list of simplices under faces, keeping dimensions `≤ top`.
    pub fn closure(maximal: &[Vec<u32>], top: usize) -> Self {
        let mut dims: Vec<std::collections::BTreeSet<Vec<u32>>> = vec![Default::default(); top + 1];
        for m in maximal {
            let mut m = m.clone();
            m.sort_unstable();
            m.dedup();
            let n = m.len();
            for mask in 1u64..(1 << n) {
                let s: Vec<u32> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| m[i]).collect();
                if s.len() <= top + 1 {
                    dims[s.len() - 1].insert(s);
                }
            }
        }
        Cx::new(dims.into_iter().map(|d| d.into_iter().collect()).collect())
    }

    pub fn count(&self, k: usize) -> usize {
        self.dims.get(k).map_or(0, Vec::len)
    }

    pub fn index(&self, k: usize, s: &[u32]) -> Option<usize> {
        self.index.get(k)?.get(s).copied()
    }

    /// `∂_k` as a dense `count(k-1) × count(k)` matrix.
    pub fn boundary(&self, k: usize) -> Mat {
        let rows = if k == 0 { 0 } else { self.count(k - 1) };
        let cols = self.count(k);
        let mut m = zeros(rows, cols);
        if k == 0 {
            return m;
        }
        for (j, s) in self.dims[k].iter().enumerate() {
            for p in 0..s.len() {
                let mut f = s.clone();
                f.remove(p);
                let i = self.index(k - 1, &f).expect("closed under faces");
                m[i][j] = q(if p % 2 == 0 { 1 } else { -1 });
            }
        }
        m
    }

    pub fn betti(&self, k: usize) -> usize {
        let n = self.count(k);
        let down = if k == 0 { 0 } else { rank(&self.boundary(k)) };
        let up = if k + 1 < self.dims.len() { rank(&self.boundary(k + 1)) } else { 0 };
        n - down - up
    }

    /// `β_k` through [`sparse_rank`], for complexes too large for dense elimination.
    pub fn betti_sparse(&self, k: usize) -> usize {
        let n = self.count(k);
        let down = if k == 0 { 0 } else { sparse_rank(self.sparse_boundary(k)) };
        let up = if k + 1 < self.dims.len() { sparse_rank(self.sparse_boundary(k + 1)) } else { 0 };
        n - down - up
    }

    pub fn sparse_boundary(&self, k: usize) -> Vec<Sv> {
        self.dims[k]
            .iter()
            .map(|s| {
                (0..s.len())
                    .map(|p| {
                        let mut f = s.clone();
                        f.remove(p);
                        (self.index(k - 1, &f).expect("closed under faces"), q(if p % 2 == 0 { 1 } else { -1 }))
                    })
                    .collect()
            })
            .collect()
    }

    /// Reducer holding the columns of `∂_{k+1}`.
    pub fn boundary_reducer(&self, k: usize) -> Reducer {
        let mut r = Reducer::default();
        if k + 1 < self.dims.len() {
            for c in self.sparse_boundary(k + 1) {
                r.add(c);
            }
        }
        r
    }

    /// Basis of `ker ∂_k` from a column reduction that tracks combinations.
    pub fn sparse_cycles(&self, k: usize) -> Vec<Sv> {
        let unit = |j: usize| Sv::from([(j, q(1))]);
        if k == 0 {
            return (0..self.count(0)).map(unit).collect();
        }
        let mut pivots: HashMap<usize, (Sv, Sv)> = HashMap::new();
        let mut cycles = Vec::new();
        for (j, mut col) in self.sparse_boundary(k).into_iter().enumerate() {
            let mut v = unit(j);
            while let Some((&low, x)) = col.iter().next_back() {
                let Some((other, ov)) = pivots.get(&low) else { break };
                let f = x.clone() / other[&low].clone();
                axpy(&mut col, &f, other);
                axpy(&mut v, &f, ov);
            }
            match col.iter().next_back() {
                Some((&low, _)) => {
                    pivots.insert(low, (col, v));
                }
                None => cycles.push(v),
            }
        }
        cycles
    }

    /// `∂_k` applied to a sparse chain.
    pub fn apply_boundary(&self, k: usize, chain: &Sv) -> Sv {
        let mut out = Sv::new();
        if k == 0 {
            return out;
        }
        for (&j, x) in chain {
            let s = &self.dims[k][j];
            for p in 0..s.len() {
                let mut f = s.clone();
                f.remove(p);
                let i = self.index(k - 1, &f).expect("closed under faces");
                let sign = if p % 2 == 0 { x.clone() } else { -x.clone() };
                axpy(&mut out, &q(-1), &Sv::from([(i, sign)]));
            }
        }
        out
    }

    /// Boundary columns of degree `k + 1`, empty when the complex stops at `k`.
    pub fn boundaries(&self, k: usize) -> Vec<Vec<BigRational>> {
        if k + 1 < self.dims.len() {
            columns_of(&self.boundary(k + 1), self.count(k), self.count(k + 1))
        } else {
            Vec::new()
        }
    }

    pub fn cycles(&self, k: usize) -> Vec<Vec<BigRational>> {
        if k == 0 {
            return (0..self.count(0))
                .map(|i| (0..self.count(0)).map(|j| q((i == j) as i64)).collect())
                .collect();
        }
        null_space(&self.boundary(k), self.count(k))
    }

    pub fn is_boundary(&self, k: usize, chain: &[BigRational]) -> bool {
        let b = self.boundaries(k);
        let n = self.count(k);
        rank(&hcat(&b, &[chain.to_vec()], n)) == rank(&hcat(&b, &[], n))
    }
}

/// Sparse column: row index to nonzero entry.
pub type Sv = BTreeMap<usize, BigRational>;

/// `col -= f · x`, dropping zeros.
fn axpy(col: &mut Sv, f: &BigRational, x: &Sv) {
    for (&r, v) in x {
        let e = col.entry(r).or_insert_with(BigRational::zero);
        *e -= f.clone() * v.clone();
        if e.is_zero() {
            col.remove(&r);
        }
    }
}

/// Incremental column reduction keyed by the lowest nonzero row.
#[derive(Clone, Default)]
pub struct Reducer {
    by_low: HashMap<usize, Sv>,
}

impl Reducer {
    pub fn reduce(&self, mut col: Sv) -> Sv {
        while let Some((&low, v)) = col.iter().next_back() {
            let Some(other) = self.by_low.get(&low) else { break };
            let f = v.clone() / other[&low].clone();
            axpy(&mut col, &f, other);
        }
        col
    }

    /// False when `col` depends on the columns already added.
    pub fn add(&mut self, col: Sv) -> bool {
        let col = self.reduce(col);
        match col.iter().next_back() {
            Some((&low, _)) => {
                self.by_low.insert(low, col);
                true
            }
            None => false,
        }
    }

    pub fn rank(&self) -> usize {
        self.by_low.len()
    }
}

pub fn sparse_rank(columns: Vec<Sv>) -> usize {
    let mut r = Reducer::default();
    for c in columns {
        r.add(c);
    }
    r.rank()
}

/// Chain map of a vertex map on `k`-chains, degenerate simplices to zero.
pub fn push(src: &Cx, tgt: &Cx, vmap: &[u32], k: usize, chain: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); tgt.count(k)];
    for (j, s) in src.dims[k].iter().enumerate() {
        if chain[j].is_zero() {
            continue;
        }
        let image: Vec<u32> = s.iter().map(|&v| vmap[v as usize]).collect();
        let mut inversions = 0;
        for a in 0..image.len() {
            for b in a + 1..image.len() {
                if image[a] > image[b] {
                    inversions += 1;
                }
            }
        }
        let mut sorted = image.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let i = tgt.index(k, &sorted).expect("vertex map is simplicial");
        let sign = if inversions % 2 == 0 { q(1) } else { q(-1) };
        out[i] += chain[j].clone() * sign;
    }
    out
}

/// Sparse form of [`push`].
pub fn push_sparse(tgt: &Cx, src: &Cx, vmap: &[u32], k: usize, chain: &Sv) -> Sv {
    let mut out = Sv::new();
    for (&j, x) in chain {
        let image: Vec<u32> = src.dims[k][j].iter().map(|&v| vmap[v as usize]).collect();
        let mut sorted = image.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let inversions = (0..image.len()).flat_map(|a| (a + 1..image.len()).map(move |b| (a, b))).filter(|&(a, b)| image[a] > image[b]).count();
        let i = tgt.index(k, &sorted).expect("vertex map is simplicial");
        let term = if inversions % 2 == 0 { x.clone() } else { -x.clone() };
        axpy(&mut out, &q(-1), &Sv::from([(i, term)]));
    }
    out
}

/// Sparse form of [`check_induced`] for complexes beyond dense elimination.
pub fn check_induced_sparse(
    src: &Cx,
    tgt: &Cx,
    vmap: &[u32],
    k: usize,
    src_reps: &[Sv],
    tgt_reps: &[Sv],
    matrix: &Mat,
) -> Result<(), String> {
    if tgt_reps.len() != tgt.betti_sparse(k) || src_reps.len() != src.betti_sparse(k) {
        return Err("basis sizes differ from Betti numbers".into());
    }
    for (cx, reps) in [(src, src_reps), (tgt, tgt_reps)] {
        if reps.iter().any(|z| !cx.apply_boundary(k, z).is_empty()) {
            return Err("representative is not a cycle".into());
        }
    }
    let boundaries = tgt.boundary_reducer(k);
    let mut with_reps = boundaries.clone();
    if !tgt_reps.iter().all(|w| with_reps.add(w.clone())) {
        return Err("target representatives are dependent modulo boundaries".into());
    }
    for (j, z) in src_reps.iter().enumerate() {
        let mut r = push_sparse(tgt, src, vmap, k, z);
        for (i, w) in tgt_reps.iter().enumerate() {
            axpy(&mut r, &matrix[i][j], w);
        }
        if !boundaries.reduce(r).is_empty() {
            return Err(format!("column {j} does not match the pushed-forward class"));
        }
    }
    let mut images = boundaries.clone();
    let brute = src.sparse_cycles(k).iter().filter(|z| images.add(push_sparse(tgt, src, vmap, k, z))).count();
    if brute != rank(matrix) {
        return Err(format!("rank {} differs from brute-force rank {brute}", rank(matrix)));
    }
    Ok(())
}

/// Checks a matrix of `H_k(f)` against representatives of both bases:
/// every representative is a cycle, the target representatives are
/// independent modulo boundaries, and `f(z_j) - Σ_i M_ij w_i` is a boundary
/// for each source class `j`. Also compares the rank with the rank of `f`
/// on an exhaustive cycle basis.
pub fn check_induced(
    src: &Cx,
    tgt: &Cx,
    vmap: &[u32],
    k: usize,
    src_reps: &[Vec<BigRational>],
    tgt_reps: &[Vec<BigRational>],
    matrix: &Mat,
) -> Result<(), String> {
    let nt = tgt.count(k);
    if tgt_reps.len() != tgt.betti(k) || src_reps.len() != src.betti(k) {
        return Err("basis sizes differ from Betti numbers".into());
    }
    for (cx, reps) in [(src, src_reps), (tgt, tgt_reps)] {
        if k == 0 {
            continue;
        }
        let d = cx.boundary(k);
        for z in reps {
            for row in &d {
                let s: BigRational = row.iter().zip(z).map(|(a, b)| a.clone() * b.clone()).sum();
                if !s.is_zero() {
                    return Err("representative is not a cycle".into());
                }
            }
        }
    }
    let b = tgt.boundaries(k);
    if rank(&hcat(&b, tgt_reps, nt)) != rank(&hcat(&b, &[], nt)) + tgt_reps.len() {
        return Err("target representatives are dependent modulo boundaries".into());
    }
    for (j, z) in src_reps.iter().enumerate() {
        let mut r = push(src, tgt, vmap, k, z);
        for (i, w) in tgt_reps.iter().enumerate() {
            for (x, y) in r.iter_mut().zip(w) {
                *x -= matrix[i][j].clone() * y.clone();
            }
        }
        if !tgt.is_boundary(k, &r) {
            return Err(format!("column {j} does not match the pushed-forward class"));
        }
    }
    let images: Vec<Vec<BigRational>> = src.cycles(k).iter().map(|z| push(src, tgt, vmap, k, z)).collect();
    let brute = rank(&hcat(&b, &images, nt)) - rank(&hcat(&b, &[], nt));
    if brute != rank(matrix) {
        return Err(format!("rank {} differs from brute-force rank {brute}", rank(matrix)));
    }
    Ok(())
}

/// Every subset of at most `top + 1` points with pairwise distances below
/// `threshold` (`d < threshold · (1 - tol)`), by exhaustive enumeration.
pub fn rips(dist: &[Vec<f64>], threshold: f64, tol: f64, top: usize) -> Cx {
    let n = dist.len();
    assert!(n <= 20, "exhaustive enumeration");
    let mut dims: Vec<Vec<Vec<u32>>> = vec![Vec::new(); top + 1];
    for mask in 1u32..(1 << n) {
        let s: Vec<u32> = (0..n as u32).filter(|i| mask >> i & 1 == 1).collect();
        if s.len() > top + 1 {
            continue;
        }
        let ok = s.iter().all(|&a| s.iter().all(|&b| a == b || dist[a as usize][b as usize] < threshold - tol * threshold));
        if ok {
            dims[s.len() - 1].push(s);
        }
    }
    for d in dims.iter_mut() {
        d.sort();
    }
    Cx::new(dims)
}

/// Connected components by depth-first search.
pub fn components(dist: &[Vec<f64>], threshold: f64, tol: f64) -> usize {
    let n = dist.len();
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(a) = stack.pop() {
            for b in 0..n {
                if !seen[b] && dist[a][b] < threshold - tol * threshold {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
    }
    count
}

/// `{a ∈ coarse : d(x, a) < r}` for each fine point `x`, by scanning.
pub fn ball_images(cross: &[Vec<f64>], r: f64, tol: f64) -> Vec<Vec<u32>> {
    cross
        .iter()
        .map(|row| (0..row.len() as u32).filter(|&a| row[a as usize] < r - tol * r).collect())
        .collect()
}

/// Order complex of a poset given by `leq[i][j]`, chains of at most `top + 1` elements.
pub fn order_complex(leq: &[Vec<bool>], top: usize) -> Cx {
    let n = leq.len();
    let mut dims: Vec<Vec<Vec<u32>>> = vec![Vec::new(); top + 1];
    fn extend(leq: &[Vec<bool>], chain: &mut Vec<u32>, dims: &mut Vec<Vec<Vec<u32>>>, top: usize) {
        let mut sorted = chain.clone();
        sorted.sort_unstable();
        dims[chain.len() - 1].push(sorted);
        if chain.len() == top + 1 {
            return;
        }
        let last = *chain.last().unwrap() as usize;
        for j in 0..leq.len() {
            if j != last && leq[last][j] {
                chain.push(j as u32);
                extend(leq, chain, dims, top);
                chain.pop();
            }
        }
    }
    for i in 0..n {
        extend(leq, &mut vec![i as u32], &mut dims, top);
    }
    for d in dims.iter_mut() {
        d.sort();
        d.dedup();
    }
    Cx::new(dims)
}

pub fn abs_max(v: &[BigRational]) -> BigRational {
    v.iter().map(|x| x.abs()).fold(BigRational::zero(), |a, b| if b > a { b } else { a })
}
