//! Schedules, FASO terms, bonding maps and the diagram checks.
//!
//! Levels are numbered from 1. Term `n` is the face poset of the strict
//! Vietoris-Rips complex of `A_n` at `4ε_n` (reverse-inclusion order),
//! truncated to sets of at most `max_dim + 1` points. The bonding map
//! `q_{n,n+1}` sends a set to the union of the open `ε_n`-balls of its
//! points in `A_n`; it is stored as one image per vertex of `A_{n+1}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::metric::{fmt_real, within, BallMode, Coverage, MetricContext, MetricSample, Point, DEFAULT_TOLERANCE};
use crate::poset::{face_poset, homotopic_via_union, FiniteSpace, Orientation, SpaceMap};
use crate::simplicial::{vietoris_rips, SimplicialComplex, Threshold};
use crate::{Error, Exec, IndexSet, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMode {
    /// `ε_{n+1} < (ε_n - γ_n)/2`.
    #[default]
    Strict,
    /// `ε_{n+1} < ε_n/2`; never consults γ.
    Relaxed,
}

/// Scales and approximations of a tower.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub mode: ScheduleMode,
    pub levels: Vec<MetricSample>,
}

impl Schedule {
    pub fn new(mode: ScheduleMode, levels: Vec<MetricSample>) -> Self {
        Self { mode, levels }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn epsilons(&self) -> Vec<f64> {
        self.levels.iter().map(|s| s.epsilon).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelCheck {
    pub level: usize,
    pub passed: bool,
    /// The inequality that was evaluated, with its numbers.
    pub inequality: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub mode: ScheduleMode,
    pub levels: Vec<LevelCheck>,
    pub passed: bool,
    /// Strict checks that relied on estimated coverage radii.
    pub advisory: bool,
}

impl ScheduleReport {
    pub fn first_violation(&self) -> Option<&LevelCheck> {
        self.levels.iter().find(|c| !c.passed)
    }
}

const DIGITS: usize = 12;

fn num(x: f64) -> String {
    fmt_real(x, DIGITS)
}

/// Checks the scale inequalities between consecutive levels.
pub fn validate_schedule(schedule: &Schedule) -> ScheduleReport {
    let mut levels = Vec::new();
    let mut advisory = false;
    if schedule.levels.is_empty() {
        levels.push(LevelCheck { level: 1, passed: false, inequality: "schedule has no levels".into() });
    }
    for (i, pair) in schedule.levels.windows(2).enumerate() {
        let n = i + 1;
        let (a, b) = (&pair[0], &pair[1]);
        let check = if a.context != b.context {
            LevelCheck { level: n, passed: false, inequality: format!("levels {n} and {} use different metrics", n + 1) }
        } else if b.epsilon >= a.epsilon {
            LevelCheck {
                level: n,
                passed: false,
                inequality: format!("ε_{} = {} < ε_{n} = {}", n + 1, num(b.epsilon), num(a.epsilon)),
            }
        } else {
            match schedule.mode {
                ScheduleMode::Relaxed => {
                    let bound = a.epsilon / 2.0;
                    LevelCheck {
                        level: n,
                        passed: b.epsilon < bound,
                        inequality: format!("ε_{} = {} < ε_{n}/2 = {}", n + 1, num(b.epsilon), num(bound)),
                    }
                }
                ScheduleMode::Strict => match a.gamma {
                    None => LevelCheck {
                        level: n,
                        passed: false,
                        inequality: format!("γ_{n} is required in strict mode"),
                    },
                    Some(g) => {
                        advisory |= !g.exact;
                        let bound = (a.epsilon - g.radius) / 2.0;
                        LevelCheck {
                            level: n,
                            passed: b.epsilon < bound,
                            inequality: format!(
                                "ε_{} = {} < (ε_{n} - γ_{n})/2 = {}",
                                n + 1,
                                num(b.epsilon),
                                num(bound)
                            ),
                        }
                    }
                },
            }
        };
        levels.push(check);
    }
    let passed = levels.iter().all(|c| c.passed);
    ScheduleReport { mode: schedule.mode, levels, passed, advisory }
}

/// Construction parameters shared by every level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerParams {
    /// Terms keep sets of at most `max_dim + 1` points.
    pub max_dim: usize,
    pub tolerance: f64,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for TowerParams {
    fn default() -> Self {
        Self { max_dim: 3, tolerance: DEFAULT_TOLERANCE, exec: Exec::default() }
    }
}

/// Whether every pair of points of `set` is closer than `bound`, i.e.
/// `diam(set) < bound` under the tolerance rule of open balls.
pub fn diameter_below(sample: &MetricSample, set: &IndexSet, bound: f64, tol: f64) -> bool {
    let s = set.as_slice();
    s.iter().enumerate().all(|(k, &a)| s[k + 1..].iter().all(|&b| within(sample.dist(a, b), bound, BallMode::Open, tol)))
}

/// Strict Rips complex of a sample at `4ε`: the simplices are the term's elements.
pub fn term_complex(sample: &MetricSample, max_dim: usize, tol: f64, exec: Exec) -> SimplicialComplex {
    vietoris_rips(sample, 4.0 * sample.epsilon, Threshold::Strict, max_dim, tol, exec)
}

/// `U_{4ε}(A)` truncated to sets of at most `max_dim + 1` points.
pub fn build_term(sample: &MetricSample, max_dim: usize, tol: f64, exec: Exec) -> Result<FiniteSpace> {
    face_poset(&term_complex(sample, max_dim, tol, exec), Orientation::FasoReverseInclusion)
}

/// One level of a tower.
#[derive(Debug)]
pub struct Level {
    sample: Arc<MetricSample>,
    complex: Arc<SimplicialComplex>,
    term: OnceLock<Arc<FiniteSpace>>,
}

impl Level {
    pub fn sample(&self) -> &Arc<MetricSample> {
        &self.sample
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn term(&self) -> Arc<FiniteSpace> {
        self.term
            .get_or_init(|| {
                Arc::new(face_poset(&self.complex, Orientation::FasoReverseInclusion).expect("levels are nonempty"))
            })
            .clone()
    }
}

/// `q_{n,n+1}` as vertex images, plus the nearest-vertex selection used for
/// induced maps on truncated terms.
#[derive(Debug)]
pub struct Bonding {
    vertex_images: Vec<IndexSet>,
    selection: Vec<u32>,
    map: OnceLock<std::result::Result<Arc<SpaceMap>, (usize, Vec<u32>)>>,
}

impl Bonding {
    pub fn vertex_images(&self) -> &[IndexSet] {
        &self.vertex_images
    }

    /// For each vertex `a` of `A_{n+1}`, the nearest point of `A_n`
    /// (lowest index on ties). It lies in `q({a})`, so the induced vertex
    /// map is pointwise comparable to `q` and lands in the truncated term.
    pub fn selection(&self) -> &[u32] {
        &self.selection
    }

    pub fn apply(&self, set: &IndexSet) -> IndexSet {
        IndexSet::union_all(set.iter().map(|a| &self.vertex_images[a as usize]))
    }
}

/// A finite FASO built to some depth.
#[derive(Debug)]
pub struct Tower {
    schedule: Schedule,
    params: TowerParams,
    report: ScheduleReport,
    levels: Vec<Level>,
    /// `bondings[n - 1]` is `q_{n,n+1}`.
    bondings: Vec<Bonding>,
    composites: Mutex<HashMap<(usize, usize), Arc<Vec<IndexSet>>>>,
}

fn vertex_images(coarse: &MetricSample, fine: &MetricSample, radius: f64, tol: f64, exec: Exec) -> Vec<IndexSet> {
    exec.map_range(fine.len(), |a| coarse.ball_around(fine, a as u32, radius, BallMode::Open, tol))
}

fn selection(coarse: &MetricSample, fine: &MetricSample, images: &[IndexSet], exec: Exec) -> Vec<u32> {
    exec.map_range(fine.len(), |a| {
        let x = fine.point(a as u32);
        images[a]
            .iter()
            .min_by(|&i, &j| coarse.dist_to(i, x).total_cmp(&coarse.dist_to(j, x)).then(i.cmp(&j)))
            .expect("vertex images are nonempty")
    })
}

impl Tower {
    /// Validates the schedule and builds every term and bonding map.
    pub fn build(schedule: Schedule, params: TowerParams) -> Result<Tower> {
        let report = validate_schedule(&schedule);
        if let Some(bad) = report.first_violation() {
            return Err(Error::Schedule(format!("level {}: {}", bad.level, bad.inequality)));
        }
        let exec = params.exec;
        let levels: Vec<Level> = schedule
            .levels
            .iter()
            .map(|s| Level {
                sample: Arc::new(s.clone()),
                complex: Arc::new(term_complex(s, params.max_dim, params.tolerance, exec)),
                term: OnceLock::new(),
            })
            .collect();
        let mut tower =
            Tower { schedule, params, report, levels, bondings: Vec::new(), composites: Mutex::new(HashMap::new()) };
        for n in 1..tower.depth() {
            let (coarse, fine) = (tower.levels[n - 1].sample.clone(), tower.levels[n].sample.clone());
            let images = vertex_images(&coarse, &fine, coarse.epsilon, params.tolerance, exec);
            tower.bondings.push(Bonding { selection: Vec::new(), vertex_images: images, map: OnceLock::new() });
            tower.check_bonding(n)?;
            let sel = selection(&coarse, &fine, &tower.bondings[n - 1].vertex_images, exec);
            tower.bondings[n - 1].selection = sel;
        }
        Ok(tower)
    }

    /// Empty images and the diameter bound over every element of term `n+1`.
    /// The diameter of a union of vertex images is attained on a pair of
    /// vertices, so vertices and edges cover every simplex.
    fn check_bonding(&self, n: usize) -> Result<()> {
        let bonding = &self.bondings[n - 1];
        if let Some(a) = bonding.vertex_images.iter().position(IndexSet::is_empty) {
            return Err(Error::EmptyImage { level: n, element: vec![a as u32] });
        }
        let coarse = self.sample(n)?;
        let bound = 4.0 * coarse.epsilon;
        let tol = self.params.tolerance;
        let complex = self.complex(n + 1)?;
        for d in 0..=complex.dimension().min(1) {
            let bad = self.params.exec.map_slice(complex.simplices(d), |s| {
                let image = bonding.apply(s);
                (!diameter_below(coarse, &image, bound, tol)).then(|| (s.to_vec(), image))
            });
            if let Some((_, image)) = bad.into_iter().flatten().next() {
                let diameter = coarse.diameter(&image);
                return Err(Error::DiameterBound { level: n, image: image.to_vec(), diameter, bound });
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn params(&self) -> &TowerParams {
        &self.params
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn schedule_report(&self) -> &ScheduleReport {
        &self.report
    }

    pub fn tolerance(&self) -> f64 {
        self.params.tolerance
    }

    pub fn context(&self) -> &MetricContext {
        &self.levels[0].sample.context
    }

    pub fn level(&self, n: usize) -> Result<&Level> {
        if n == 0 || n > self.depth() {
            return Err(Error::LevelOutOfRange { level: n, depth: self.depth() });
        }
        Ok(&self.levels[n - 1])
    }

    pub fn sample(&self, n: usize) -> Result<&MetricSample> {
        Ok(&self.level(n)?.sample)
    }

    pub fn epsilon(&self, n: usize) -> Result<f64> {
        Ok(self.sample(n)?.epsilon)
    }

    pub fn complex(&self, n: usize) -> Result<&Arc<SimplicialComplex>> {
        Ok(&self.level(n)?.complex)
    }

    /// Term `n` as a finite space.
    pub fn term(&self, n: usize) -> Result<Arc<FiniteSpace>> {
        Ok(self.level(n)?.term())
    }

    /// `q_{n,n+1}`.
    pub fn bonding(&self, n: usize) -> Result<&Bonding> {
        if n == 0 || n >= self.depth() {
            return Err(Error::LevelOutOfRange { level: n + 1, depth: self.depth() });
        }
        Ok(&self.bondings[n - 1])
    }

    /// `q_{n,n+1}` as a map of finite spaces. Fails when an image has more
    /// points than the truncated term keeps.
    pub fn bonding_map(&self, n: usize) -> Result<Arc<SpaceMap>> {
        let bonding = self.bonding(n)?;
        let source = self.term(n + 1)?;
        let target = self.term(n)?;
        bonding
            .map
            .get_or_init(|| {
                SpaceMap::from_rule(source, target, |c| bonding.apply(c)).map(Arc::new).map_err(|e| match e {
                    Error::ImageNotInTarget { element, image } => (element, image),
                    other => unreachable!("bonding maps are order preserving: {other}"),
                })
            })
            .clone()
            .map_err(|(element, image)| Error::ImageNotInTarget { element, image })
    }

    /// Vertex images of `q_{n,m}` (identity when `n == m`), memoized.
    pub fn composite_images(&self, n: usize, m: usize) -> Result<Arc<Vec<IndexSet>>> {
        if n == 0 || m > self.depth() || n > m {
            return Err(Error::LevelOutOfRange { level: m, depth: self.depth() });
        }
        if let Some(hit) = self.composites.lock().expect("cache lock").get(&(n, m)) {
            return Ok(hit.clone());
        }
        let images: Vec<IndexSet> = if n == m {
            (0..self.sample(n)?.len() as u32).map(IndexSet::singleton).collect()
        } else {
            let inner = self.composite_images(n + 1, m)?;
            let step = self.bonding(n)?;
            inner.iter().map(|c| step.apply(c)).collect()
        };
        let images = Arc::new(images);
        self.composites.lock().expect("cache lock").insert((n, m), images.clone());
        Ok(images)
    }

    /// `q_{n,m}(C)` for a set `C` of points of `A_m`.
    pub fn composite(&self, n: usize, m: usize, set: &IndexSet) -> Result<IndexSet> {
        let images = self.composite_images(n, m)?;
        Ok(IndexSet::union_all(set.iter().map(|a| &images[a as usize])))
    }

    /// `q_{n,m}` as a map of finite spaces.
    pub fn composite_map(&self, n: usize, m: usize) -> Result<SpaceMap> {
        if n == m {
            return Ok(SpaceMap::identity(self.term(n)?));
        }
        let images = self.composite_images(n, m)?;
        SpaceMap::from_rule(self.term(m)?, self.term(n)?, |c| IndexSet::union_all(c.iter().map(|a| &images[a as usize])))
    }

    /// Composite of the nearest-vertex selections from level `m` to level `n`.
    pub fn selection_composite(&self, n: usize, m: usize) -> Result<Vec<u32>> {
        let mut map: Vec<u32> = (0..self.sample(m)?.len() as u32).collect();
        for l in (n..m).rev() {
            let sel = self.bonding(l)?.selection();
            map = map.iter().map(|&a| sel[a as usize]).collect();
        }
        Ok(map)
    }

    /// `q_n(x) = B(x, ε_n) ∩ A_n`.
    pub fn projection(&self, x: &Point, n: usize) -> Result<IndexSet> {
        let sample = self.sample(n)?;
        let set = sample.ball_query(x, sample.epsilon, BallMode::Open, self.params.tolerance)?;
        if set.is_empty() {
            return Err(Error::EmptyProjection { level: n });
        }
        Ok(set)
    }

    /// Replaces the vertex images of `q_{n,n+1}`, e.g. with the table of a
    /// tower dump. No validation is done; the checks report what breaks.
    pub fn override_vertex_images(&mut self, n: usize, images: Vec<IndexSet>) -> Result<()> {
        let expected = self.sample(n + 1)?.len();
        if images.len() != expected {
            return Err(Error::PartialAssignment { expected, got: images.len() });
        }
        let coarse = self.sample(n)?.len();
        if let Some(v) = images.iter().flat_map(IndexSet::iter).find(|&v| v as usize >= coarse) {
            return Err(Error::IndexOutOfRange { index: v as usize, size: coarse });
        }
        let bonding = self.bonding(n)?;
        let selection = bonding
            .selection
            .iter()
            .zip(&images)
            .map(|(&s, img)| if img.contains(s) { s } else { img.iter().next().unwrap_or(s) })
            .collect();
        self.bondings[n - 1] = Bonding { vertex_images: images, selection, map: OnceLock::new() };
        self.composites.lock().expect("cache lock").clear();
        Ok(())
    }

    /// Serializable snapshot: schedule, element lists and bonding tables.
    pub fn dump(&self) -> TowerDump {
        let levels = self
            .levels
            .iter()
            .map(|l| LevelDump {
                epsilon: l.sample.epsilon,
                gamma: l.sample.gamma,
                context: l.sample.context.clone(),
                points: l.sample.points.clone(),
                elements: l.complex.iter().cloned().collect(),
            })
            .collect();
        let bondings = (1..self.depth())
            .map(|n| BondingDump {
                level: n,
                vertex_images: self.bondings[n - 1].vertex_images.clone(),
                assignment: self.bonding_map(n).ok().map(|m| m.assignment().into_iter().map(|y| y as u32).collect()),
            })
            .collect();
        TowerDump { mode: self.schedule.mode, max_dim: self.params.max_dim, tolerance: self.params.tolerance, levels, bondings }
    }

    /// Rebuilds a tower from the schedule stored in a dump and compares the
    /// stored elements and bonding tables with the recomputed ones. Stored
    /// bonding tables that differ are applied to the returned tower.
    pub fn from_dump(dump: &TowerDump, exec: Exec) -> Result<(Tower, DumpCheck)> {
        if dump.levels.is_empty() {
            return Err(Error::EmptySet("tower dump has no levels"));
        }
        let samples = dump
            .levels
            .iter()
            .map(|l| MetricSample::new(l.context.clone(), l.points.clone(), l.epsilon, l.gamma))
            .collect::<Result<Vec<_>>>()?;
        let params = TowerParams { max_dim: dump.max_dim, tolerance: dump.tolerance, exec };
        let mut tower = Tower::build(Schedule::new(dump.mode, samples), params)?;
        let mut check = DumpCheck::default();
        for (i, l) in dump.levels.iter().enumerate() {
            let rebuilt: Vec<IndexSet> = tower.levels[i].complex.iter().cloned().collect();
            if rebuilt != l.elements {
                check.element_mismatches.push(i + 1);
            }
        }
        for b in &dump.bondings {
            let recomputed = tower.bonding(b.level)?.vertex_images.clone();
            if recomputed.len() != b.vertex_images.len() {
                return Err(Error::PartialAssignment { expected: recomputed.len(), got: b.vertex_images.len() });
            }
            let diffs: Vec<BondingMismatch> = recomputed
                .iter()
                .zip(&b.vertex_images)
                .enumerate()
                .filter(|(_, (r, s))| r != s)
                .map(|(v, (r, s))| BondingMismatch { level: b.level, vertex: v, recomputed: r.clone(), stored: s.clone() })
                .collect();
            if !diffs.is_empty() {
                tower.override_vertex_images(b.level, b.vertex_images.clone())?;
                check.bonding_mismatches.extend(diffs);
            }
        }
        Ok((tower, check))
    }

    fn require_gamma(&self, n: usize) -> Result<Coverage> {
        self.sample(n)?.gamma.ok_or(Error::MissingGamma(n))
    }

    /// Strict Rips complex of `A_n` at `2ε_n`: the elements of `U_{2ε_n}(A_n)`.
    pub fn fas_complex(&self, n: usize) -> Result<SimplicialComplex> {
        let s = self.sample(n)?;
        Ok(vietoris_rips(s, 2.0 * s.epsilon, Threshold::Strict, self.params.max_dim, self.params.tolerance, self.params.exec))
    }

    /// `U_{2ε_n}(A_n)` with the chosen orientation.
    pub fn fas_term(&self, n: usize, orientation: Orientation) -> Result<FiniteSpace> {
        self.require_gamma(n)?;
        face_poset(&self.fas_complex(n)?, orientation)
    }

    /// Nearest-point images of the vertices of `A_{n+1}` in `A_n`.
    pub fn fas_vertex_images(&self, n: usize) -> Result<Vec<IndexSet>> {
        self.require_gamma(n)?;
        let (coarse, fine) = (self.sample(n)?, self.sample(n + 1)?);
        let tol = self.params.tolerance;
        Ok(self.params.exec.map_range(fine.len(), |a| coarse.nearest_set(fine.point(a as u32), tol)))
    }

    /// `p_{n,n+1}(C) = ⋃_{c∈C} {a ∈ A_n : d(c,a) = d(c,A_n)}` as a map
    /// `U_{2ε_{n+1}} → U_{2ε_n}`.
    pub fn fas_bonding(&self, n: usize, orientation: Orientation) -> Result<SpaceMap> {
        let images = self.fas_vertex_images(n)?;
        let source = Arc::new(self.fas_term(n + 1, orientation)?);
        let target = Arc::new(self.fas_term(n, orientation)?);
        let coarse = self.sample(n)?;
        let bound = 2.0 * coarse.epsilon;
        for (x, c) in source.elements().iter().enumerate() {
            let image = IndexSet::union_all(c.iter().map(|a| &images[a as usize]));
            if !diameter_below(coarse, &image, bound, self.params.tolerance) {
                return Err(Error::DiameterBound { level: n, image: image.to_vec(), diameter: coarse.diameter(&image), bound });
            }
            if target.index_of(&image).is_none() {
                return Err(Error::ImageNotInTarget { element: x, image: image.to_vec() });
            }
        }
        SpaceMap::from_rule(source, target, |c| IndexSet::union_all(c.iter().map(|a| &images[a as usize])))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelDump {
    pub epsilon: f64,
    pub gamma: Option<Coverage>,
    pub context: MetricContext,
    pub points: Vec<Point>,
    /// Term elements as sorted index arrays, in (size, lexicographic) order.
    pub elements: Vec<IndexSet>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BondingDump {
    /// The map goes from level `level + 1` to level `level`.
    pub level: usize,
    pub vertex_images: Vec<IndexSet>,
    /// Element index of term `level + 1` ↦ element index of term `level`,
    /// when no image exceeds the truncation.
    pub assignment: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerDump {
    pub mode: ScheduleMode,
    pub max_dim: usize,
    pub tolerance: f64,
    pub levels: Vec<LevelDump>,
    pub bondings: Vec<BondingDump>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BondingMismatch {
    pub level: usize,
    pub vertex: usize,
    pub recomputed: IndexSet,
    pub stored: IndexSet,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DumpCheck {
    pub element_mismatches: Vec<usize>,
    pub bonding_mismatches: Vec<BondingMismatch>,
}

impl DumpCheck {
    pub fn consistent(&self) -> bool {
        self.element_mismatches.is_empty() && self.bonding_mismatches.is_empty()
    }
}

/// A failing element with both sides of the violated relation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub element: IndexSet,
    pub left: IndexSet,
    pub right: IndexSet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeCheck {
    pub probe: usize,
    /// `q_n(x)`.
    pub direct: Option<IndexSet>,
    /// `q_{n,n+1}(q_{n+1}(x))`.
    pub through: Option<IndexSet>,
    pub diameter: Option<f64>,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramReport {
    pub level: usize,
    pub bound: f64,
    pub probes: Vec<ProbeCheck>,
    /// `q_n` and `q_{n,n+1} ∘ q_{n+1}` joined by their union on the probe set.
    pub union_homotopy: bool,
    pub passed: bool,
}

impl DiagramReport {
    pub fn failures(&self) -> impl Iterator<Item = &ProbeCheck> {
        self.probes.iter().filter(|p| !p.passed)
    }
}

/// Checks that `q_n` and `q_{n,n+1} ∘ q_{n+1}` agree up to homotopy on the
/// probes: both sides exist and their union has diameter below `4ε_n`.
pub fn check_projection_diagram(tower: &Tower, n: usize, probes: &[Point]) -> Result<DiagramReport> {
    let coarse = tower.sample(n)?;
    tower.sample(n + 1)?;
    for x in probes {
        coarse.context.check(x)?;
    }
    let bound = 4.0 * coarse.epsilon;
    let tol = tower.tolerance();
    let checks: Vec<ProbeCheck> = tower.params.exec.map_range(probes.len(), |i| {
        let x = &probes[i];
        let direct = tower.projection(x, n);
        let through = tower.projection(x, n + 1).and_then(|c| Ok(tower.bonding(n)?.apply(&c)));
        match (direct, through) {
            (Ok(f), Ok(g)) => {
                let union = f.union(&g);
                let passed = !g.is_empty() && diameter_below(coarse, &union, bound, tol);
                ProbeCheck {
                    probe: i,
                    diameter: Some(coarse.diameter(&union)),
                    direct: Some(f),
                    through: Some(g),
                    passed,
                    error: None,
                }
            }
            (f, g) => ProbeCheck {
                probe: i,
                direct: f.as_ref().ok().cloned(),
                through: g.as_ref().ok().cloned(),
                diameter: None,
                passed: false,
                error: f.err().or(g.err()).map(|e| e.to_string()),
            },
        }
    });
    let union_homotopy = checks.iter().all(|c| c.direct.is_some() && c.through.is_some()) && {
        // the probes form a discrete domain; the target collects every
        // payload and the admissible unions inside U_{4ε_n}(A_n)
        let mut payloads: Vec<IndexSet> = Vec::new();
        for c in &checks {
            let (f, g) = (c.direct.clone().expect("present"), c.through.clone().expect("present"));
            let u = f.union(&g);
            payloads.push(f);
            payloads.push(g);
            if diameter_below(coarse, &u, bound, tol) {
                payloads.push(u);
            }
        }
        payloads.retain(|p| !p.is_empty());
        payloads.sort_unstable();
        payloads.dedup();
        if payloads.is_empty() {
            false
        } else {
            let target = Arc::new(FiniteSpace::from_sets(payloads, Orientation::FasoReverseInclusion)?);
            let domain = Arc::new(FiniteSpace::antichain(checks.len()));
            let pick = |side: &dyn Fn(&ProbeCheck) -> IndexSet| {
                SpaceMap::new(
                    domain.clone(),
                    target.clone(),
                    checks.iter().map(|c| target.index_of(&side(c)).expect("payload collected")).collect(),
                )
            };
            match (pick(&|c| c.direct.clone().expect("present")), pick(&|c| c.through.clone().expect("present"))) {
                (Ok(f), Ok(g)) => homotopic_via_union(&f, &g, |u| diameter_below(coarse, u, bound, tol))?.homotopic,
                _ => false,
            }
        }
    };
    let passed = union_homotopy && checks.iter().all(|c| c.passed);
    Ok(DiagramReport { level: n, bound, probes: checks, union_homotopy, passed })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ContainmentCheck {
    pub relation: String,
    pub checked: usize,
    pub failures: usize,
    pub witness: Option<Witness>,
}

impl ContainmentCheck {
    fn new(relation: &str) -> Self {
        Self { relation: relation.into(), ..Default::default() }
    }

    fn record(&mut self, element: &IndexSet, left: IndexSet, right: IndexSet, holds: bool) {
        self.checked += 1;
        if !holds {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(Witness { element: element.clone(), left, right });
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FasFasoLevel {
    pub level: usize,
    /// Source level `m` of `g_n`, the least `m > n` with `4ε_m < 2ε_n - 2γ_n`.
    pub g_source: Option<usize>,
    /// Every element of `U_{2ε_n}` is an element of `U_{4ε_n}`.
    pub inclusion: ContainmentCheck,
    /// `p(i(C)) ⊆ i(q(C))` over `U_{2ε_{n+1}}`.
    pub p_in_q: ContainmentCheck,
    /// `g_n(C)` has diameter below `2ε_n`, over `U_{4ε_m}`.
    pub g_defined: ContainmentCheck,
    /// `g_n(i(C)) ⊆ p_{n,m}(C)` over `U_{2ε_m}`.
    pub g_in_p: ContainmentCheck,
    /// `q_{n,m}(C) ⊆ i(g_n(C))` over `U_{4ε_m}`.
    pub q_in_g: ContainmentCheck,
    /// `g_n(C) ⊆ q_{n,m}(C)` over `U_{4ε_m}`: the two maps are comparable.
    pub g_in_q: ContainmentCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FasFasoReport {
    pub levels: Vec<FasFasoLevel>,
    /// All inclusion, `p ⊆ q`, `g ⊆ p` and `q ⊆ g` checks hold.
    pub containments_hold: bool,
    /// Inclusion, `p ⊆ q`, `g ⊆ p`, well-definedness and `g ⊆ q` hold,
    /// which makes `i ∘ g_n` and `q_{n,m}` pointwise comparable.
    pub comparable: bool,
    /// Levels at which the comparison maps could be formed.
    pub certified_levels: Vec<usize>,
}

/// Elementwise checks of the comparison between the FAS tower
/// `(U_{2ε_n}, p)` and the FASO `(U_{4ε_n}, q)` through the inclusion `i`
/// and the closed-ball map `g_n(C) = B̄(C, γ_n) ∩ A_n`.
pub fn fas_faso_comparison(tower: &Tower) -> Result<FasFasoReport> {
    let tol = tower.tolerance();
    let mut levels = Vec::new();
    for n in 1..tower.depth() {
        let coarse = tower.sample(n)?;
        let gamma = tower.require_gamma(n)?.radius;
        let eps = coarse.epsilon;
        let fas_n = tower.fas_complex(n)?;
        let mut inclusion = ContainmentCheck::new("U_{2ε_n} ⊆ U_{4ε_n}");
        let faso_n = tower.complex(n)?;
        for c in fas_n.iter() {
            inclusion.record(c, c.clone(), c.clone(), faso_n.contains(c));
        }
        let p_images = tower.fas_vertex_images(n)?;
        let p = |c: &IndexSet| IndexSet::union_all(c.iter().map(|a| &p_images[a as usize]));
        let mut p_in_q = ContainmentCheck::new("p(i(C)) ⊆ i(q(C))");
        for c in tower.fas_complex(n + 1)?.iter() {
            let (left, right) = (p(c), tower.bonding(n)?.apply(c));
            let holds = left.is_subset(&right);
            p_in_q.record(c, left, right, holds);
        }
        let m = (n + 1..=tower.depth()).find(|&m| {
            tower.epsilon(m).map(|e| 4.0 * e < 2.0 * eps - 2.0 * gamma).unwrap_or(false)
        });
        let mut g_defined = ContainmentCheck::new("diam g_n(C) < 2ε_n");
        let mut g_in_p = ContainmentCheck::new("g_n(i(C)) ⊆ p(C)");
        let mut q_in_g = ContainmentCheck::new("q(C) ⊆ i(g_n(C))");
        let mut g_in_q = ContainmentCheck::new("g_n(C) ⊆ q(C)");
        if let Some(m) = m {
            let fine = tower.sample(m)?;
            let g_images: Vec<IndexSet> = tower.params.exec.map_range(fine.len(), |a| {
                coarse.ball_around(fine, a as u32, gamma, BallMode::Closed, tol)
            });
            let g = |c: &IndexSet| IndexSet::union_all(c.iter().map(|a| &g_images[a as usize]));
            // p_{n,m} by composing nearest-point images
            let mut pm: Vec<IndexSet> = (0..fine.len() as u32).map(IndexSet::singleton).collect();
            for l in (n..m).rev() {
                let step = tower.fas_vertex_images(l)?;
                pm = pm.iter().map(|c| IndexSet::union_all(c.iter().map(|a| &step[a as usize]))).collect();
            }
            let pnm = |c: &IndexSet| IndexSet::union_all(c.iter().map(|a| &pm[a as usize]));
            for c in tower.fas_complex(m)?.iter() {
                let (left, right) = (g(c), pnm(c));
                let holds = left.is_subset(&right);
                g_in_p.record(c, left, right, holds);
            }
            for c in tower.complex(m)?.iter() {
                let gc = g(c);
                let qc = tower.composite(n, m, c)?;
                let defined = !gc.is_empty() && diameter_below(coarse, &gc, 2.0 * eps, tol);
                g_defined.record(c, gc.clone(), gc.clone(), defined);
                q_in_g.record(c, qc.clone(), gc.clone(), qc.is_subset(&gc));
                g_in_q.record(c, gc.clone(), qc.clone(), gc.is_subset(&qc));
            }
        }
        levels.push(FasFasoLevel { level: n, g_source: m, inclusion, p_in_q, g_defined, g_in_p, q_in_g, g_in_q });
    }
    let containments_hold = levels
        .iter()
        .all(|l| l.inclusion.passed() && l.p_in_q.passed() && l.g_in_p.passed() && l.q_in_g.passed());
    let comparable = levels.iter().all(|l| {
        l.inclusion.passed() && l.p_in_q.passed() && l.g_in_p.passed() && l.g_defined.passed() && l.g_in_q.passed()
    });
    let certified_levels = levels.iter().filter(|l| l.g_source.is_some()).map(|l| l.level).collect();
    Ok(FasFasoReport { levels, containments_hold, comparable, certified_levels })
}

/// Default constant `c` in the index rule `I(n) = min{l : δ_l < ε_n / c}`.
pub const COMPARISON_CONSTANT: f64 = 16.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexChoice {
    pub level: usize,
    /// `None` when no built level of the other tower is fine enough.
    pub index: Option<usize>,
    /// Scales of the other tower must drop below this value.
    pub needed_below: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapCheck {
    pub level: usize,
    pub from_level: usize,
    /// Images are nonempty with diameter below `4ε`.
    pub well_defined: ContainmentCheck,
    /// `C ⊆ D ⇒ I(C) ⊆ I(D)` over every face relation.
    pub order_preserving: ContainmentCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareCheck {
    pub level: usize,
    pub from_level: usize,
    /// `diam(f(C) ∪ g(C)) < 4ε` for the two ways around.
    pub union: ContainmentCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionReport {
    pub indices: Vec<IndexChoice>,
    pub maps: Vec<MapCheck>,
    pub squares: Vec<SquareCheck>,
    pub round_trips: Vec<SquareCheck>,
}

impl DirectionReport {
    fn passed(&self) -> bool {
        self.maps.iter().all(|m| m.well_defined.passed() && m.order_preserving.passed())
            && self.squares.iter().all(|s| s.union.passed())
            && self.round_trips.iter().all(|s| s.union.passed())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub constant: f64,
    /// `I : B → A`.
    pub forward: DirectionReport,
    /// `T : A → B`.
    pub backward: DirectionReport,
    pub passed: bool,
    /// Number of squares actually checked; nothing beyond the built depth is certified.
    pub squares_checked: usize,
}

fn index_rule(target: &Tower, source: &Tower, constant: f64) -> Result<Vec<IndexChoice>> {
    (1..=target.depth())
        .map(|n| {
            let needed = target.epsilon(n)? / constant;
            let index = (1..=source.depth()).find(|&l| source.epsilon(l).map(|d| d < needed).unwrap_or(false));
            Ok(IndexChoice { level: n, index, needed_below: needed })
        })
        .collect()
}

/// Images of the vertices of `source` level `l` under `C ↦ ⋃ B(x, ε_n) ∩ A_n`.
fn cross_images(target: &Tower, n: usize, source: &Tower, l: usize) -> Result<Vec<IndexSet>> {
    let (a, b) = (target.sample(n)?, source.sample(l)?);
    Ok(vertex_images(a, b, a.epsilon, target.tolerance(), target.params.exec))
}

fn union_images(images: &[IndexSet], c: &IndexSet) -> IndexSet {
    IndexSet::union_all(c.iter().map(|a| &images[a as usize]))
}

fn direction(target: &Tower, source: &Tower, constant: f64) -> Result<(DirectionReport, Vec<IndexChoice>)> {
    let tol = target.tolerance();
    let indices = index_rule(target, source, constant)?;
    let back = index_rule(source, target, constant)?;
    let mut images: HashMap<usize, Vec<IndexSet>> = HashMap::new();
    let mut maps = Vec::new();
    for choice in &indices {
        let Some(l) = choice.index else { continue };
        let n = choice.level;
        let img = cross_images(target, n, source, l)?;
        let a = target.sample(n)?;
        let bound = 4.0 * a.epsilon;
        let mut well_defined = ContainmentCheck::new("I_n(C) nonempty with diam < 4ε_n");
        let mut order_preserving = ContainmentCheck::new("C ⊆ D ⇒ I_n(C) ⊆ I_n(D)");
        let complex = source.complex(l)?;
        for c in complex.iter() {
            let ic = union_images(&img, c);
            let ok = !ic.is_empty() && diameter_below(a, &ic, bound, tol);
            well_defined.record(c, ic.clone(), ic.clone(), ok);
            for p in 0..c.len().saturating_sub(1).min(c.len()) {
                if c.len() < 2 {
                    break;
                }
                let face = c.without_position(p);
                let iface = union_images(&img, &face);
                order_preserving.record(c, iface.clone(), ic.clone(), iface.is_subset(&ic));
            }
        }
        maps.push(MapCheck { level: n, from_level: l, well_defined, order_preserving });
        images.insert(n, img);
    }
    let mut squares = Vec::new();
    for n in 1..target.depth() {
        let (Some(l0), Some(l1)) = (indices[n - 1].index, indices[n].index) else { continue };
        let a = target.sample(n)?;
        let bound = 4.0 * a.epsilon;
        let mut union = ContainmentCheck::new("diam(q∘I_{n+1}(C) ∪ I_n∘q(C)) < 4ε_n");
        let (i0, i1) = (&images[&n], &images[&(n + 1)]);
        for c in source.complex(l1)?.iter() {
            let f = target.bonding(n)?.apply(&union_images(i1, c));
            let g = union_images(i0, &source.composite(l0, l1, c)?);
            let u = f.union(&g);
            let holds = diameter_below(a, &u, bound, tol);
            union.record(c, f, g, holds);
        }
        squares.push(SquareCheck { level: n, from_level: l1, union });
    }
    // I_n ∘ T_{I(n)} against q_{n,t} with t = T(I(n))
    let mut round_trips = Vec::new();
    for choice in &indices {
        let (n, Some(l)) = (choice.level, choice.index) else { continue };
        let Some(t) = back[l - 1].index else { continue };
        if t < n {
            continue;
        }
        let a = target.sample(n)?;
        let bound = 4.0 * a.epsilon;
        let t_images = cross_images(source, l, target, t)?;
        let mut union = ContainmentCheck::new("diam(I_n∘T(C) ∪ q(C)) < 4ε_n");
        for c in target.complex(t)?.iter() {
            let f = union_images(&images[&n], &union_images(&t_images, c));
            let g = target.composite(n, t, c)?;
            let u = f.union(&g);
            let holds = !f.is_empty() && diameter_below(a, &u, bound, tol);
            union.record(c, f, g, holds);
        }
        round_trips.push(SquareCheck { level: n, from_level: t, union });
    }
    Ok((DirectionReport { indices: indices.clone(), maps, squares, round_trips }, indices))
}

/// Compares two towers over the same metric through the union-of-balls
/// maps `I_n : U(B_{I(n)}) → U(A_n)` and `T_l : U(A_{T(l)}) → U(B_l)`.
pub fn two_tower_comparison(a: &Tower, b: &Tower, constant: f64) -> Result<ComparisonReport> {
    if a.context() != b.context() {
        return Err(Error::InvalidSample("towers live in different metric spaces".into()));
    }
    if constant.is_nan() || constant <= 0.0 {
        return Err(Error::InvalidSample(format!("comparison constant must be positive, got {constant}")));
    }
    let (forward, _) = direction(a, b, constant)?;
    let (backward, _) = direction(b, a, constant)?;
    let squares_checked = forward.squares.len() + backward.squares.len();
    let passed = forward.passed() && backward.passed();
    Ok(ComparisonReport { constant, forward, backward, passed, squares_checked })
}

#[cfg(test)]
mod tests;
