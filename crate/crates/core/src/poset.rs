//! Finite T0 spaces as posets.
//!
//! Open sets are the upper sets of the stored order, so the minimal open
//! neighbourhood of `x` is `{y : x <= y}` and a map is continuous exactly
//! when it is order-preserving. Spaces whose elements are index sets carry
//! their order implicitly: under [`Orientation::FasoReverseInclusion`]
//! `C <= D` iff `D ⊆ C`, under [`Orientation::NaturalInclusion`] iff
//! `C ⊆ D`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::simplicial::SimplicialComplex;
use crate::{Error, Exec, IndexSet, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    FasoReverseInclusion,
    NaturalInclusion,
    Abstract,
}

impl Orientation {
    pub fn opposite(self) -> Self {
        match self {
            Orientation::FasoReverseInclusion => Orientation::NaturalInclusion,
            Orientation::NaturalInclusion => Orientation::FasoReverseInclusion,
            Orientation::Abstract => Orientation::Abstract,
        }
    }

    pub fn has_set_order(self) -> bool {
        self != Orientation::Abstract
    }
}

/// A finite T0 space.
#[derive(Debug)]
pub struct FiniteSpace {
    elements: Vec<IndexSet>,
    orientation: Orientation,
    /// Hasse diagram of an abstract order: `up_covers[x]` lists the
    /// elements covering `x`.
    up_covers: Option<Vec<Vec<u32>>>,
    face_closed: bool,
    lookup: OnceLock<HashMap<IndexSet, u32>>,
    up_sets: OnceLock<Vec<FixedBitSet>>,
}

impl Clone for FiniteSpace {
    fn clone(&self) -> Self {
        Self {
            elements: self.elements.clone(),
            orientation: self.orientation,
            up_covers: self.up_covers.clone(),
            face_closed: self.face_closed,
            lookup: OnceLock::new(),
            up_sets: OnceLock::new(),
        }
    }
}

impl PartialEq for FiniteSpace {
    fn eq(&self, other: &Self) -> bool {
        if self.elements != other.elements || self.orientation != other.orientation {
            return false;
        }
        match (&self.up_covers, &other.up_covers) {
            (Some(_), Some(_)) => self.up_sets() == other.up_sets(),
            (None, None) => true,
            _ => false,
        }
    }
}

/// Outcome of a continuity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Continuity {
    Continuous,
    /// `x <= y` in the source but `f(x) <= f(y)` fails in the target.
    Violated { x: usize, y: usize },
}

impl Continuity {
    pub fn is_continuous(&self) -> bool {
        matches!(self, Continuity::Continuous)
    }
}

impl FiniteSpace {
    /// A space of distinct index sets ordered by (reverse) inclusion.
    pub fn from_sets(elements: Vec<IndexSet>, orientation: Orientation) -> Result<Self> {
        if !orientation.has_set_order() {
            return Err(Error::NoSetPayload("from_sets needs an inclusion orientation"));
        }
        let space = Self::from_sets_unchecked(elements, orientation);
        if space.lookup().len() != space.len() {
            return Err(Error::InvalidSample("duplicate elements".into()));
        }
        if space.elements.iter().any(IndexSet::is_empty) {
            return Err(Error::InvalidSample("empty element".into()));
        }
        Ok(space)
    }

    pub(crate) fn from_sets_unchecked(elements: Vec<IndexSet>, orientation: Orientation) -> Self {
        let face_closed = is_face_closed(&elements);
        Self { elements, orientation, up_covers: None, face_closed, lookup: OnceLock::new(), up_sets: OnceLock::new() }
    }

    /// An abstract poset on `0..n` generated by the relations `a <= b`.
    /// Fails if the generated preorder is not antisymmetric.
    pub fn from_relation(n: usize, relations: &[(usize, usize)]) -> Result<Self> {
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (x, set) in up.iter_mut().enumerate() {
            set.insert(x);
        }
        for &(a, b) in relations {
            if a >= n || b >= n {
                return Err(Error::UnknownElement(a.max(b)));
            }
            up[a].insert(b);
        }
        // transitive closure (Warshall)
        for k in 0..n {
            let row_k = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        for a in 0..n {
            for b in up[a].ones() {
                if a != b && up[b].contains(a) {
                    return Err(Error::InvalidSample(format!("relation is not antisymmetric: {a} <= {b} <= {a}")));
                }
            }
        }
        let up_covers = (0..n)
            .map(|x| {
                up[x]
                    .ones()
                    .filter(|&y| y != x && !up[x].ones().any(|z| z != x && z != y && up[z].contains(y)))
                    .map(|y| y as u32)
                    .collect()
            })
            .collect();
        let elements = (0..n as u32).map(IndexSet::singleton).collect();
        let space = Self {
            elements,
            orientation: Orientation::Abstract,
            up_covers: Some(up_covers),
            face_closed: false,
            lookup: OnceLock::new(),
            up_sets: OnceLock::new(),
        };
        let _ = space.up_sets.set(up);
        Ok(space)
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        let rel: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_relation(n, &rel).expect("a chain is a poset")
    }

    pub fn antichain(n: usize) -> Self {
        Self::from_relation(n, &[]).expect("an antichain is a poset")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn elements(&self) -> &[IndexSet] {
        &self.elements
    }

    pub fn element(&self, x: usize) -> &IndexSet {
        &self.elements[x]
    }

    pub fn is_face_closed(&self) -> bool {
        self.face_closed
    }

    fn lookup(&self) -> &HashMap<IndexSet, u32> {
        self.lookup
            .get_or_init(|| self.elements.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect())
    }

    /// Position of the element with payload `set`, if present.
    pub fn index_of(&self, set: &IndexSet) -> Option<usize> {
        self.lookup().get(set).map(|&i| i as usize)
    }

    fn up_sets(&self) -> &[FixedBitSet] {
        self.up_sets.get_or_init(|| {
            let covers = self.up_covers.as_ref().expect("abstract spaces store covers");
            let n = self.len();
            // covers form a DAG; process in reverse topological order
            let order = topological_order(covers);
            let mut up = vec![FixedBitSet::with_capacity(n); n];
            for &x in order.iter().rev() {
                let mut set = FixedBitSet::with_capacity(n);
                set.insert(x);
                for &y in &covers[x] {
                    set.union_with(&up[y as usize]);
                }
                up[x] = set;
            }
            up
        })
    }

    /// `x <= y` in the stored order.
    pub fn leq(&self, x: usize, y: usize) -> bool {
        match self.orientation {
            Orientation::FasoReverseInclusion => self.elements[y].is_subset(&self.elements[x]),
            Orientation::NaturalInclusion => self.elements[x].is_subset(&self.elements[y]),
            Orientation::Abstract => self.up_sets()[x].contains(y),
        }
    }

    fn check_element(&self, x: usize) -> Result<()> {
        if x >= self.len() {
            return Err(Error::UnknownElement(x));
        }
        Ok(())
    }

    /// Minimal open neighbourhood `U_x = {y : x <= y}`.
    pub fn min_open(&self, x: usize) -> Result<Vec<usize>> {
        self.check_element(x)?;
        Ok((0..self.len()).filter(|&y| self.leq(x, y)).collect())
    }

    /// Minimal closed set `F_x = {y : y <= x}`.
    pub fn closure(&self, x: usize) -> Result<Vec<usize>> {
        self.check_element(x)?;
        Ok((0..self.len()).filter(|&y| self.leq(y, x)).collect())
    }

    /// Covering pairs `(x, y)`: `x < y` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        if let Some(up) = &self.up_covers {
            return up.iter().enumerate().flat_map(|(x, ys)| ys.iter().map(move |&y| (x, y as usize))).collect();
        }
        let mut out = Vec::new();
        if self.face_closed {
            // covers in a face-closed family drop exactly one point
            for (big, set) in self.elements.iter().enumerate() {
                if set.len() < 2 {
                    continue;
                }
                for p in 0..set.len() {
                    let small = self.index_of(&set.without_position(p)).expect("face-closed");
                    out.push(match self.orientation {
                        Orientation::FasoReverseInclusion => (big, small),
                        _ => (small, big),
                    });
                }
            }
        } else {
            for x in 0..self.len() {
                for y in 0..self.len() {
                    if x != y
                        && self.leq(x, y)
                        && !(0..self.len()).any(|z| z != x && z != y && self.leq(x, z) && self.leq(z, y))
                    {
                        out.push((x, y));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// `up_covers()[x]` lists the elements covering `x`.
    pub fn up_covers(&self) -> Vec<Vec<u32>> {
        if let Some(up) = &self.up_covers {
            return up.clone();
        }
        let mut up = vec![Vec::new(); self.len()];
        for (x, y) in self.covers() {
            up[x].push(y as u32);
        }
        up
    }

    /// Same elements with the order reversed.
    pub fn opposite(&self) -> FiniteSpace {
        match &self.up_covers {
            None => FiniteSpace::from_sets_unchecked(self.elements.clone(), self.orientation.opposite()),
            Some(up) => {
                let mut down = vec![Vec::new(); self.len()];
                for (x, ys) in up.iter().enumerate() {
                    for &y in ys {
                        down[y as usize].push(x as u32);
                    }
                }
                for list in &mut down {
                    list.sort_unstable();
                }
                FiniteSpace {
                    elements: self.elements.clone(),
                    orientation: Orientation::Abstract,
                    up_covers: Some(down),
                    face_closed: false,
                    lookup: OnceLock::new(),
                    up_sets: OnceLock::new(),
                }
            }
        }
    }

    /// Strict up-sets `{y : x < y}` for every `x`.
    fn strict_up_sets(&self, exec: Exec) -> Vec<Vec<u32>> {
        let up = self.up_covers();
        exec.map_range(self.len(), |x| {
            let mut seen = std::collections::HashSet::new();
            let mut stack: Vec<u32> = up[x].clone();
            while let Some(y) = stack.pop() {
                if seen.insert(y) {
                    stack.extend(up[y as usize].iter().copied().filter(|z| !seen.contains(z)));
                }
            }
            let mut out: Vec<u32> = seen.into_iter().collect();
            out.sort_unstable();
            out
        })
    }

    /// Number of simplices of the order complex up to dimension `cap`.
    pub fn order_complex_size(&self, cap: usize, exec: Exec) -> usize {
        chain_counts(&self.strict_up_sets(exec), cap).iter().sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "elements": self.elements.iter().map(IndexSet::to_vec).collect::<Vec<_>>(),
            "covers": self.covers().into_iter().map(|(a, b)| [a, b]).collect::<Vec<_>>(),
            "orientation": self.orientation,
        })
    }

    /// Hasse diagram in DOT: one node per element labelled by its index
    /// set, one edge per covering pair drawn upward.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{name}\" {{");
        let _ = writeln!(out, "  rankdir=BT;");
        let _ = writeln!(out, "  node [shape=box, fontsize=10];");
        for (i, e) in self.elements.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{e}\"];");
        }
        for (a, b) in self.covers() {
            let _ = writeln!(out, "  n{a} -> n{b};");
        }
        out.push_str("}\n");
        out
    }
}

fn is_face_closed(elements: &[IndexSet]) -> bool {
    let all: std::collections::HashSet<&IndexSet> = elements.iter().collect();
    elements.iter().all(|e| e.len() < 2 || (0..e.len()).all(|p| all.contains(&e.without_position(p))))
}

fn topological_order(up: &[Vec<u32>]) -> Vec<usize> {
    let n = up.len();
    let mut indegree = vec![0usize; n];
    for ys in up {
        for &y in ys {
            indegree[y as usize] += 1;
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&x| indegree[x] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(x) = queue.pop() {
        order.push(x);
        for &y in &up[x] {
            indegree[y as usize] -= 1;
            if indegree[y as usize] == 0 {
                queue.push(y as usize);
            }
        }
    }
    order
}

/// `counts[d]` = number of chains with `d + 1` elements.
fn chain_counts(strict_up: &[Vec<u32>], cap: usize) -> Vec<usize> {
    let n = strict_up.len();
    // starting[x] = chains of the current length whose minimum is x
    let mut starting = vec![1usize; n];
    let mut counts = vec![n];
    for _ in 0..cap {
        let next: Vec<usize> =
            (0..n).map(|x| strict_up[x].iter().map(|&y| starting[y as usize]).sum::<usize>()).collect();
        counts.push(next.iter().sum());
        starting = next;
    }
    counts
}

/// Simplices of `K(X(K))` with at most `cap + 1` elements, counted from the
/// face numbers of `K` alone. A chain of faces ending at a simplex with `m`
/// vertices is a chain of nonempty subsets of an `m`-set, so its count
/// depends only on `m`. Saturates at `usize::MAX`.
pub fn face_poset_order_complex_size(complex: &SimplicialComplex, cap: usize) -> usize {
    let top = complex.dimension() + 1;
    let binom = |n: usize, k: usize| -> u128 { (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128) };
    // ending[m][l] = chains of l nonempty subsets of an m-set ending at the whole set
    let mut ending = vec![vec![0u128; cap + 2]; top + 1];
    for m in 1..=top {
        ending[m][1] = 1;
        for l in 2..=cap + 1 {
            ending[m][l] = (1..m).map(|j| binom(m, j).saturating_mul(ending[j][l - 1])).fold(0u128, u128::saturating_add);
        }
    }
    let total = (0..complex.dimension().min(usize::MAX - 1) + 1)
        .map(|d| (complex.count(d) as u128).saturating_mul(ending[d + 1].iter().fold(0u128, |a, &b| a.saturating_add(b))))
        .fold(0u128, u128::saturating_add);
    usize::try_from(total).unwrap_or(usize::MAX)
}

/// Order complex `K(P)`: the simplices are the nonempty chains of `P` with
/// at most `cap + 1` elements, as sorted element-index tuples.
pub fn order_complex(space: &FiniteSpace, cap: usize, exec: Exec) -> SimplicialComplex {
    let strict_up = space.strict_up_sets(exec);
    build_chains(space.len(), &strict_up, cap, exec)
}

/// [`order_complex`] that refuses to build more than `max_simplices` simplices.
pub fn order_complex_capped(space: &FiniteSpace, cap: usize, max_simplices: usize, exec: Exec) -> Result<SimplicialComplex> {
    let strict_up = space.strict_up_sets(exec);
    let needed: usize = chain_counts(&strict_up, cap).iter().sum();
    if needed > max_simplices {
        return Err(Error::ResourceCap { what: "order complex".into(), needed, cap: max_simplices });
    }
    Ok(build_chains(space.len(), &strict_up, cap, exec))
}

fn build_chains(n: usize, strict_up: &[Vec<u32>], cap: usize, exec: Exec) -> SimplicialComplex {
    fn rec(strict_up: &[Vec<u32>], chain: &mut Vec<u32>, cap: usize, out: &mut [Vec<IndexSet>]) {
        out[chain.len() - 1].push(IndexSet::from_unsorted(chain.iter().copied()));
        if chain.len() > cap {
            return;
        }
        let last = *chain.last().expect("nonempty chain") as usize;
        for &y in &strict_up[last] {
            chain.push(y);
            rec(strict_up, chain, cap, out);
            chain.pop();
        }
    }
    let parts = exec.map_range(n, |x| {
        let mut out = vec![Vec::new(); cap + 1];
        rec(strict_up, &mut vec![x as u32], cap, &mut out);
        out
    });
    let mut simplices: Vec<Vec<IndexSet>> = vec![Vec::new(); cap + 1];
    for part in parts {
        for (d, list) in part.into_iter().enumerate() {
            simplices[d].extend(list);
        }
    }
    for list in &mut simplices {
        list.sort_unstable();
    }
    SimplicialComplex::from_sorted_parts(n, cap, simplices)
}

/// Face poset `X(K)`: the simplices of `K` in (dimension, lexicographic)
/// order, ordered by inclusion or by reverse inclusion.
pub fn face_poset(complex: &SimplicialComplex, orientation: Orientation) -> Result<FiniteSpace> {
    if !orientation.has_set_order() {
        return Err(Error::NoSetPayload("face posets are ordered by inclusion"));
    }
    if complex.total() == 0 {
        return Err(Error::EmptySet("face_poset of an empty complex"));
    }
    let elements: Vec<IndexSet> = complex.iter().cloned().collect();
    Ok(FiniteSpace {
        elements,
        orientation,
        up_covers: None,
        face_closed: true,
        lookup: OnceLock::new(),
        up_sets: OnceLock::new(),
    })
}

/// Checks whether a total assignment is order-preserving, reporting a
/// violated pair of the source order on failure.
pub fn is_continuous(source: &FiniteSpace, target: &FiniteSpace, assignment: &[usize]) -> Result<Continuity> {
    if assignment.len() != source.len() {
        return Err(Error::PartialAssignment { expected: source.len(), got: assignment.len() });
    }
    if let Some(&bad) = assignment.iter().find(|&&y| y >= target.len()) {
        return Err(Error::UnknownElement(bad));
    }
    // order-preservation on covers implies it on the transitive closure
    for (x, y) in source.covers() {
        if !target.leq(assignment[x], assignment[y]) {
            return Ok(Continuity::Violated { x, y });
        }
    }
    Ok(Continuity::Continuous)
}

/// An order-preserving (continuous) map between finite spaces.
#[derive(Clone, Debug)]
pub struct SpaceMap {
    source: Arc<FiniteSpace>,
    target: Arc<FiniteSpace>,
    assignment: Vec<u32>,
}

impl SpaceMap {
    pub fn new(source: Arc<FiniteSpace>, target: Arc<FiniteSpace>, assignment: Vec<usize>) -> Result<Self> {
        match is_continuous(&source, &target, &assignment)? {
            Continuity::Continuous => {}
            Continuity::Violated { x, y } => return Err(Error::NotOrderPreserving { x, y }),
        }
        Ok(Self { source, target, assignment: assignment.into_iter().map(|y| y as u32).collect() })
    }

    /// Map from a set-valued rule: each source element goes to the target
    /// element with payload `rule(x)`.
    pub fn from_rule<F>(source: Arc<FiniteSpace>, target: Arc<FiniteSpace>, rule: F) -> Result<Self>
    where
        F: Fn(&IndexSet) -> IndexSet,
    {
        let assignment = source
            .elements()
            .iter()
            .enumerate()
            .map(|(x, e)| {
                let image = rule(e);
                target.index_of(&image).ok_or(Error::ImageNotInTarget { element: x, image: image.to_vec() })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, assignment)
    }

    pub fn identity(space: Arc<FiniteSpace>) -> Self {
        let assignment = (0..space.len() as u32).collect();
        Self { source: space.clone(), target: space, assignment }
    }

    pub fn constant(source: Arc<FiniteSpace>, target: Arc<FiniteSpace>, value: usize) -> Result<Self> {
        let n = source.len();
        Self::new(source, target, vec![value; n])
    }

    pub fn source(&self) -> &Arc<FiniteSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteSpace> {
        &self.target
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x] as usize
    }

    pub fn assignment(&self) -> Vec<usize> {
        self.assignment.iter().map(|&y| y as usize).collect()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &SpaceMap) -> Result<SpaceMap> {
        if !Arc::ptr_eq(&self.target, &other.source) && *self.target != *other.source {
            return Err(Error::InvalidSample("maps are not composable".into()));
        }
        let assignment = self.assignment.iter().map(|&y| other.assignment[y as usize]).collect();
        Ok(SpaceMap { source: self.source.clone(), target: other.target.clone(), assignment })
    }
}

/// Result of [`homotopic_via_union`].
#[derive(Clone, Debug)]
pub struct UnionHomotopy {
    pub homotopic: bool,
    /// `h = f ∪ g` when it is a valid map into the target.
    pub witness: Option<SpaceMap>,
    /// First source element where `f(x) ∪ g(x)` is not admissible.
    pub failure: Option<usize>,
}

/// Tries to connect `f` and `g` through `h(x) = f(x) ∪ g(x)`.
///
/// When every `h(x)` is an admissible element of the target and `h` is
/// order-preserving, `f` and `g` are both comparable to `h` pointwise and
/// hence homotopic.
pub fn homotopic_via_union<P>(f: &SpaceMap, g: &SpaceMap, union_admissible: P) -> Result<UnionHomotopy>
where
    P: Fn(&IndexSet) -> bool,
{
    if !f.target.orientation().has_set_order() || !g.target.orientation().has_set_order() {
        return Err(Error::NoSetPayload("union homotopy needs set-valued targets"));
    }
    if f.source.len() != g.source.len() || *f.target != *g.target {
        return Err(Error::InvalidSample("maps must share source and target".into()));
    }
    let target = &f.target;
    let mut assignment = Vec::with_capacity(f.source.len());
    for x in 0..f.source.len() {
        let h = target.element(f.apply(x)).union(target.element(g.apply(x)));
        match target.index_of(&h).filter(|_| union_admissible(&h)) {
            Some(y) => assignment.push(y),
            None => return Ok(UnionHomotopy { homotopic: false, witness: None, failure: Some(x) }),
        }
    }
    match SpaceMap::new(f.source.clone(), target.clone(), assignment) {
        Ok(h) => Ok(UnionHomotopy { homotopic: true, witness: Some(h), failure: None }),
        Err(Error::NotOrderPreserving { x, .. }) => Ok(UnionHomotopy { homotopic: false, witness: None, failure: Some(x) }),
        Err(e) => Err(e),
    }
}
