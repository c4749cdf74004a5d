//! Threads of the inverse limit: nearest-point sets, canonical threads of
//! points, and the compatibility, convergence and minimality checks.

use serde::{Deserialize, Serialize};

use crate::metric::{hausdorff_distance, hausdorff_to_point, within, BallMode, Point};
use crate::tower::{diameter_below, Tower};
use crate::{Error, IndexSet, Result};

/// `A_m(x)`: the points of level `m` nearest to `x`, ties within the tower tolerance.
pub fn nearest_set(tower: &Tower, x: &Point, m: usize) -> Result<IndexSet> {
    let sample = tower.sample(m)?;
    sample.context.check(x)?;
    Ok(sample.nearest_set(x, tower.tolerance()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Canonical { x: Point },
    UserSupplied,
}

/// One element per level, starting at level 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thread {
    pub entries: Vec<IndexSet>,
    pub provenance: Provenance,
}

impl Thread {
    /// Validates that every entry is an element of its term: a nonempty set
    /// of indices of `A_n` with diameter below `4ε_n`. Compatibility is left
    /// to [`verify_thread`].
    pub fn user_supplied(tower: &Tower, entries: Vec<IndexSet>) -> Result<Thread> {
        if entries.len() > tower.depth() {
            return Err(Error::LevelOutOfRange { level: entries.len(), depth: tower.depth() });
        }
        for (i, c) in entries.iter().enumerate() {
            let n = i + 1;
            let sample = tower.sample(n)?;
            if c.is_empty() {
                return Err(Error::EmptySet("thread entry"));
            }
            if let Some(v) = c.iter().find(|&v| v as usize >= sample.len()) {
                return Err(Error::IndexOutOfRange { index: v as usize, size: sample.len() });
            }
            let bound = 4.0 * sample.epsilon;
            if !diameter_below(sample, c, bound, tower.tolerance()) {
                return Err(Error::DiameterBound { level: n, image: c.to_vec(), diameter: sample.diameter(c), bound });
            }
        }
        Ok(Thread { entries, provenance: Provenance::UserSupplied })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry at level `n` (1-based).
    pub fn entry(&self, n: usize) -> Option<&IndexSet> {
        n.checked_sub(1).and_then(|i| self.entries.get(i))
    }

    pub fn point(&self) -> Option<&Point> {
        match &self.provenance {
            Provenance::Canonical { x } => Some(x),
            Provenance::UserSupplied => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryCheck {
    pub level: usize,
    /// Last `m` at which the running union grew.
    pub last_growth: usize,
    /// The last growth happened at the deepest level: deeper levels may still add points.
    pub possibly_unstabilized: bool,
    /// `q_{n,m}(A_m(x)) ⊆ q_{n,m+1}(A_{m+1}(x))` for every built `m`.
    pub monotone: bool,
    /// Nonempty with diameter below `4ε_n`.
    pub is_element: bool,
    /// Kept by the truncated term (at most `max_dim + 1` points).
    pub in_truncated_term: bool,
    /// Contained in the open ball `B(x, 2ε_n)`.
    pub within_two_epsilon: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizationReport {
    pub depth: usize,
    pub levels: Vec<EntryCheck>,
}

impl StabilizationReport {
    pub fn last_growth(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.last_growth).collect()
    }

    pub fn passed(&self) -> bool {
        self.levels.iter().all(|l| l.monotone && l.is_element && l.within_two_epsilon)
    }
}

/// `X^n = ⋃_{n<m≤N} q_{n,m}(A_m(x))` for `n = 1..N-1`.
pub fn canonical_thread(tower: &Tower, x: &Point) -> Result<(Thread, StabilizationReport)> {
    let depth = tower.depth();
    if depth < 2 {
        return Err(Error::LevelOutOfRange { level: 2, depth });
    }
    let nearest = (1..=depth).map(|m| nearest_set(tower, x, m)).collect::<Result<Vec<_>>>()?;
    let tol = tower.tolerance();
    let mut entries = Vec::with_capacity(depth - 1);
    let mut levels = Vec::with_capacity(depth - 1);
    for n in 1..depth {
        let mut union = IndexSet::new();
        let mut previous: Option<IndexSet> = None;
        let mut last_growth = n + 1;
        let mut monotone = true;
        for m in n + 1..=depth {
            let image = tower.composite(n, m, &nearest[m - 1])?;
            if let Some(p) = &previous {
                monotone &= p.is_subset(&image);
            }
            let grown = union.union(&image);
            if grown.len() > union.len() {
                last_growth = m;
            }
            union = grown;
            previous = Some(image);
        }
        let sample = tower.sample(n)?;
        let eps = sample.epsilon;
        let is_element = !union.is_empty() && diameter_below(sample, &union, 4.0 * eps, tol);
        let within_two_epsilon =
            union.iter().all(|a| within(sample.dist_to(a, x), 2.0 * eps, BallMode::Open, tol));
        levels.push(EntryCheck {
            level: n,
            last_growth,
            possibly_unstabilized: last_growth == depth,
            monotone,
            is_element,
            in_truncated_term: tower.complex(n)?.contains(&union),
            within_two_epsilon,
        });
        entries.push(union);
    }
    let thread = Thread { entries, provenance: Provenance::Canonical { x: x.clone() } };
    Ok((thread, StabilizationReport { depth, levels }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityCheck {
    pub level: usize,
    /// `q_{n,n+1}(C_{n+1})`.
    pub image: IndexSet,
    /// `C_n`.
    pub entry: IndexSet,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreadReport {
    pub levels: Vec<CompatibilityCheck>,
    pub passed: bool,
}

impl ThreadReport {
    pub fn first_failure(&self) -> Option<&CompatibilityCheck> {
        self.levels.iter().find(|c| !c.passed)
    }
}

/// Checks `q_{n,n+1}(C_{n+1}) = C_n` exactly for every consecutive pair.
pub fn verify_thread(tower: &Tower, thread: &Thread) -> Result<ThreadReport> {
    let mut levels = Vec::new();
    for n in 1..thread.len() {
        let image = tower.bonding(n)?.apply(&thread.entries[n]);
        let entry = thread.entries[n - 1].clone();
        levels.push(CompatibilityCheck { level: n, passed: image == entry, image, entry });
    }
    let passed = levels.iter().all(|c| c.passed);
    Ok(ThreadReport { levels, passed })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointDistance {
    pub level: usize,
    /// `d_H({x}, C_n)`.
    pub distance: f64,
    /// `2ε_n`.
    pub bound: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDistance {
    pub level: usize,
    pub other: usize,
    /// `d_H(C_n, C_m)`.
    pub distance: f64,
    /// `2ε_n - γ_n/2`.
    pub bound: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub to_point: Vec<PointDistance>,
    /// Only for levels carrying a coverage radius.
    pub between_levels: Vec<PairDistance>,
    pub passed: bool,
}

impl ConvergenceReport {
    pub fn first_failure(&self) -> Option<usize> {
        self.to_point.iter().find(|c| !c.passed).map(|c| c.level)
    }
}

fn entry_points(tower: &Tower, n: usize, c: &IndexSet) -> Result<Vec<Point>> {
    let sample = tower.sample(n)?;
    Ok(c.iter().map(|a| sample.point(a).clone()).collect())
}

/// `d_H({x}, C_n) < 2ε_n` per level and `d_H(C_n, C_m) < 2ε_n - γ_n/2` for `n < m`.
pub fn convergence_check(tower: &Tower, thread: &Thread, x: &Point) -> Result<ConvergenceReport> {
    let tol = tower.tolerance();
    let mut to_point = Vec::new();
    for (i, c) in thread.entries.iter().enumerate() {
        let n = i + 1;
        let sample = tower.sample(n)?;
        sample.context.check(x)?;
        let distance = hausdorff_to_point(sample, x, c)?;
        let bound = 2.0 * sample.epsilon;
        to_point.push(PointDistance { level: n, distance, bound, passed: within(distance, bound, BallMode::Open, tol) });
    }
    let mut between_levels = Vec::new();
    for (i, c) in thread.entries.iter().enumerate() {
        let n = i + 1;
        let sample = tower.sample(n)?;
        let Some(gamma) = sample.gamma else { continue };
        let bound = 2.0 * sample.epsilon - gamma.radius / 2.0;
        let pc = entry_points(tower, n, c)?;
        for (j, d) in thread.entries.iter().enumerate().skip(i + 1) {
            let distance = hausdorff_distance(&sample.context, &pc, &entry_points(tower, j + 1, d)?)?;
            between_levels.push(PairDistance {
                level: n,
                other: j + 1,
                distance,
                bound,
                passed: within(distance, bound, BallMode::Open, tol),
            });
        }
    }
    let passed = to_point.iter().all(|c| c.passed) && between_levels.iter().all(|c| c.passed);
    Ok(ConvergenceReport { to_point, between_levels, passed })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MinimalityReport {
    /// The other thread is not compatible or does not converge to `x`.
    PreconditionFailed { reason: String },
    Checked { levels: Vec<MinimalityLevel>, passed: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimalityLevel {
    pub level: usize,
    pub contained: bool,
}

impl MinimalityReport {
    pub fn passed(&self) -> Option<bool> {
        match self {
            MinimalityReport::PreconditionFailed { .. } => None,
            MinimalityReport::Checked { passed, .. } => Some(*passed),
        }
    }
}

/// `X^n ⊆ C_n` on the common levels, provided `other` is a compatible
/// thread converging to `x`.
pub fn minimality_check(tower: &Tower, canonical: &Thread, other: &Thread, x: &Point) -> Result<MinimalityReport> {
    let compat = verify_thread(tower, other)?;
    if let Some(f) = compat.first_failure() {
        return Ok(MinimalityReport::PreconditionFailed {
            reason: format!("precondition failed: other thread is not compatible at level {}", f.level),
        });
    }
    let conv = convergence_check(tower, other, x)?;
    if let Some(level) = conv.first_failure() {
        return Ok(MinimalityReport::PreconditionFailed {
            reason: format!("precondition failed: other thread does not approach x at level {level}"),
        });
    }
    let levels: Vec<MinimalityLevel> = canonical
        .entries
        .iter()
        .zip(&other.entries)
        .enumerate()
        .map(|(i, (a, b))| MinimalityLevel { level: i + 1, contained: a.is_subset(b) })
        .collect();
    let passed = levels.iter().all(|l| l.contained);
    Ok(MinimalityReport::Checked { levels, passed })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationLevel {
    pub level: usize,
    pub disjoint: bool,
}

/// For the levels with `d(x, y) > 16ε_n`, whether `X^n ∩ Y^n = ∅`.
pub fn separation_check(tower: &Tower, x: &Point, y: &Point) -> Result<Vec<SeparationLevel>> {
    let d = tower.context().distance(x, y)?;
    let (tx, _) = canonical_thread(tower, x)?;
    let (ty, _) = canonical_thread(tower, y)?;
    let mut out = Vec::new();
    for (i, (a, b)) in tx.entries.iter().zip(&ty.entries).enumerate() {
        if d > 16.0 * tower.epsilon(i + 1)? {
            out.push(SeparationLevel { level: i + 1, disjoint: a.is_disjoint(b) });
        }
    }
    Ok(out)
}

/// Serialized thread with its checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreadDump {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<Point>,
    pub entries: Vec<IndexSet>,
    pub stabilization: Vec<usize>,
    pub checks: ThreadChecks,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreadChecks {
    pub compatibility: ThreadReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub convergence: Option<ConvergenceReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stabilization: Option<StabilizationReport>,
}

/// Canonical thread of `x` with every check applicable to it.
pub fn thread_dump(tower: &Tower, x: &Point) -> Result<ThreadDump> {
    let (thread, stab) = canonical_thread(tower, x)?;
    let compatibility = verify_thread(tower, &thread)?;
    let convergence = convergence_check(tower, &thread, x)?;
    Ok(ThreadDump {
        x: Some(x.clone()),
        entries: thread.entries,
        stabilization: stab.last_growth(),
        checks: ThreadChecks { compatibility, convergence: Some(convergence), stabilization: Some(stab) },
    })
}

#[cfg(test)]
mod tests;
