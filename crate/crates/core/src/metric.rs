//! Metric contexts, samples of the example spaces, ball queries and
//! Hausdorff distances.
//!
//! Points of a sample are addressed by their position in the ordered point
//! list; every downstream set is an [`IndexSet`] of those positions.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Exec, IndexSet, Result};

/// Relative tolerance used when comparing distances against radii.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    /// Euclidean coordinates, or a single angle for the circle.
    Coords(Vec<f64>),
    /// Row of an explicit distance matrix.
    Index(usize),
}

impl Point {
    pub fn angle(theta: f64) -> Point {
        Point::Coords(vec![theta.rem_euclid(TAU)])
    }

    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Coords(c) => Some(c),
            Point::Index(_) => None,
        }
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point::Coords(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricContext {
    Euclidean { dimension: usize },
    CircleGeodesic,
    Explicit { matrix: Arc<Vec<Vec<f64>>> },
}

impl MetricContext {
    /// Validates and wraps an explicit distance matrix: square, zero
    /// diagonal, symmetric, nonnegative and satisfying the triangle
    /// inequality (all up to `tol` relative slack).
    pub fn explicit(matrix: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let n = matrix.len();
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMetric(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidMetric(format!("nonzero diagonal at {i}")));
            }
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidMetric(format!("entry ({i},{j}) = {d} is not a nonnegative number")));
                }
                if (d - matrix[j][i]).abs() > tol * d.max(matrix[j][i]) {
                    return Err(Error::InvalidMetric(format!("not symmetric at ({i},{j})")));
                }
                if i != j && d == 0.0 {
                    return Err(Error::InvalidMetric(format!("distinct rows {i},{j} at distance 0")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let direct = matrix[i][k];
                    let via = matrix[i][j] + matrix[j][k];
                    if direct > via * (1.0 + tol) {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails: d({i},{k}) = {direct} > d({i},{j}) + d({j},{k}) = {via}"
                        )));
                    }
                }
            }
        }
        Ok(MetricContext::Explicit { matrix: Arc::new(matrix) })
    }

    /// Checks that `p` is a valid point of this context.
    pub fn check(&self, p: &Point) -> Result<()> {
        match (self, p) {
            (MetricContext::Euclidean { dimension }, Point::Coords(c)) => {
                if c.len() != *dimension {
                    return Err(Error::DimensionMismatch { expected: *dimension, got: c.len() });
                }
                if c.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidSample("non-finite coordinate".into()));
                }
                Ok(())
            }
            (MetricContext::CircleGeodesic, Point::Coords(c)) => {
                if c.len() != 1 {
                    return Err(Error::DimensionMismatch { expected: 1, got: c.len() });
                }
                if !(0.0..TAU).contains(&c[0]) {
                    return Err(Error::InvalidSample(format!("angle {} outside [0, 2π)", c[0])));
                }
                Ok(())
            }
            (MetricContext::Explicit { matrix }, Point::Index(i)) => {
                if *i >= matrix.len() {
                    return Err(Error::IndexOutOfRange { index: *i, size: matrix.len() });
                }
                Ok(())
            }
            (MetricContext::Explicit { .. }, Point::Coords(_)) => {
                Err(Error::PointKind("explicit metrics take matrix indices".into()))
            }
            (_, Point::Index(_)) => Err(Error::PointKind("coordinate metrics take coordinates".into())),
        }
    }

    /// Distance between two points, validating both.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.distance_unchecked(p, q))
    }

    pub(crate) fn distance_unchecked(&self, p: &Point, q: &Point) -> f64 {
        match (self, p, q) {
            (MetricContext::Euclidean { .. }, Point::Coords(a), Point::Coords(b)) => euclidean(a, b),
            (MetricContext::CircleGeodesic, Point::Coords(a), Point::Coords(b)) => geodesic(a[0], b[0]),
            (MetricContext::Explicit { matrix }, Point::Index(i), Point::Index(j)) => matrix[*i][*j],
            _ => unreachable!("points validated against the context"),
        }
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn geodesic(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(TAU - d)
}

/// Free-function form of [`MetricContext::distance`].
pub fn distance(ctx: &MetricContext, p: &Point, q: &Point) -> Result<f64> {
    ctx.distance(p, q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallMode {
    Open,
    Closed,
}

/// Whether a distance `d` lies in the ball of radius `r`.
///
/// Distances within `tol * r` of the radius are boundary cases: the open
/// ball excludes them and the closed ball includes them.
pub fn within(d: f64, r: f64, mode: BallMode, tol: f64) -> bool {
    match mode {
        BallMode::Open => d < r - tol * r,
        BallMode::Closed => d <= r + tol * r,
    }
}

/// Coverage radius `γ = sup_x d(x, A)` of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub radius: f64,
    /// `true` when analytic, `false` when estimated from a reference sample.
    pub exact: bool,
}

/// A finite point set approximating a space at scale `epsilon`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub context: MetricContext,
    pub points: Vec<Point>,
    pub epsilon: f64,
    pub gamma: Option<Coverage>,
}

impl MetricSample {
    pub fn new(context: MetricContext, points: Vec<Point>, epsilon: f64, gamma: Option<Coverage>) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidSample(format!("epsilon must be positive, got {epsilon}")));
        }
        if points.is_empty() {
            return Err(Error::InvalidSample("no points".into()));
        }
        if points.len() > u32::MAX as usize {
            return Err(Error::InvalidSample("too many points".into()));
        }
        for p in &points {
            context.check(p)?;
        }
        if let Some(g) = gamma {
            if g.radius.is_nan() || g.radius < 0.0 {
                return Err(Error::InvalidSample(format!("gamma must be nonnegative, got {}", g.radius)));
            }
            if g.radius >= epsilon {
                return Err(Error::InvalidSample(format!(
                    "gamma {} is not below epsilon {epsilon}: not an ε-approximation",
                    g.radius
                )));
            }
        }
        check_distinct(&points)?;
        Ok(Self { context, points, epsilon, gamma })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance between sample points `i` and `j`.
    pub fn dist(&self, i: u32, j: u32) -> f64 {
        self.context.distance_unchecked(&self.points[i as usize], &self.points[j as usize])
    }

    /// Distance from sample point `i` to an arbitrary (validated) point.
    pub fn dist_to(&self, i: u32, x: &Point) -> f64 {
        self.context.distance_unchecked(&self.points[i as usize], x)
    }

    /// Diameter of a subset of the sample; zero for singletons and the empty set.
    pub fn diameter(&self, set: &IndexSet) -> f64 {
        let s = set.as_slice();
        let mut best = 0.0f64;
        for (k, &a) in s.iter().enumerate() {
            for &b in &s[k + 1..] {
                best = best.max(self.dist(a, b));
            }
        }
        best
    }

    /// `d(x, A)`.
    pub fn distance_to_set(&self, x: &Point) -> f64 {
        (0..self.len() as u32).map(|i| self.dist_to(i, x)).fold(f64::INFINITY, f64::min)
    }

    /// Points of the sample at distance `< radius` (open) or `<= radius`
    /// (closed) from `x`.
    pub fn ball_query(&self, x: &Point, radius: f64, mode: BallMode, tol: f64) -> Result<IndexSet> {
        self.context.check(x)?;
        Ok(self.ball_query_unchecked(x, radius, mode, tol))
    }

    pub(crate) fn ball_query_unchecked(&self, x: &Point, radius: f64, mode: BallMode, tol: f64) -> IndexSet {
        (0..self.len() as u32)
            .filter(|&i| within(self.dist_to(i, x), radius, mode, tol))
            .collect()
    }

    /// Ball around a sample point of *another* sample (e.g. a vertex of
    /// `A_{n+1}` queried against `A_n`).
    pub fn ball_around(&self, other: &MetricSample, j: u32, radius: f64, mode: BallMode, tol: f64) -> IndexSet {
        self.ball_query_unchecked(&other.points[j as usize], radius, mode, tol)
    }

    /// Points realising `d(x, A)`, with ties decided up to relative `tol`.
    pub fn nearest_set(&self, x: &Point, tol: f64) -> IndexSet {
        let dists: Vec<f64> = (0..self.len() as u32).map(|i| self.dist_to(i, x)).collect();
        let best = dists.iter().copied().fold(f64::INFINITY, f64::min);
        (0..self.len() as u32).filter(|&i| dists[i as usize] <= best + tol * best).collect()
    }

    pub fn point(&self, i: u32) -> &Point {
        &self.points[i as usize]
    }
}

fn check_distinct(points: &[Point]) -> Result<()> {
    let mut keyed: Vec<(Vec<u64>, usize)> = points
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let key = match p {
                Point::Coords(c) => c.iter().map(|x| (x + 0.0).to_bits()).collect(),
                Point::Index(i) => vec![*i as u64],
            };
            (key, k)
        })
        .collect();
    keyed.sort();
    for w in keyed.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::InvalidSample(format!("points {} and {} coincide", w[0].1, w[1].1)));
        }
    }
    Ok(())
}

/// `x` with `digits` significant digits in `%g` style, trailing zeros trimmed.
pub fn fmt_real(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    let exp = x.abs().log10().floor() as i32;
    if exp < -5 || exp >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, x);
        let (m, e) = s.split_once('e').expect("exponent form");
        format!("{}e{e}", trim(m))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

/// Free-function form of [`MetricSample::ball_query`].
pub fn ball_query(sample: &MetricSample, x: &Point, radius: f64, mode: BallMode) -> Result<IndexSet> {
    sample.ball_query(x, radius, mode, DEFAULT_TOLERANCE)
}

/// Hausdorff distance between two nonempty finite sets:
/// `max(max_{c∈C} d(c, D), max_{d∈D} d(d, C))`.
pub fn hausdorff_distance(ctx: &MetricContext, c: &[Point], d: &[Point]) -> Result<f64> {
    if c.is_empty() || d.is_empty() {
        return Err(Error::EmptySet("hausdorff_distance"));
    }
    for p in c.iter().chain(d) {
        ctx.check(p)?;
    }
    let directed = |from: &[Point], to: &[Point]| {
        from.iter()
            .map(|p| to.iter().map(|q| ctx.distance_unchecked(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0f64, f64::max)
    };
    Ok(directed(c, d).max(directed(d, c)))
}

/// Hausdorff distance between two index subsets of one sample.
pub fn hausdorff_indexed(sample: &MetricSample, c: &IndexSet, d: &IndexSet) -> Result<f64> {
    if c.is_empty() || d.is_empty() {
        return Err(Error::EmptySet("hausdorff_distance"));
    }
    let directed = |from: &IndexSet, to: &IndexSet| {
        from.iter()
            .map(|p| to.iter().map(|q| sample.dist(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0f64, f64::max)
    };
    Ok(directed(c, d).max(directed(d, c)))
}

/// Hausdorff distance from a point to a subset of a sample, `max_{c∈C} d(x, c)`.
pub fn hausdorff_to_point(sample: &MetricSample, x: &Point, c: &IndexSet) -> Result<f64> {
    if c.is_empty() {
        return Err(Error::EmptySet("hausdorff_distance"));
    }
    Ok(c.iter().map(|i| sample.dist_to(i, x)).fold(0.0, f64::max))
}

/// Coverage radius of `sample`: the analytic γ when the sample carries an
/// exact one, otherwise `max_{r∈reference} d(r, A)`.
pub fn coverage_radius(sample: &MetricSample, reference: &[Point], exec: Exec) -> Result<Coverage> {
    if let Some(g) = sample.gamma.filter(|g| g.exact) {
        return Ok(g);
    }
    Ok(Coverage { radius: estimate_coverage(sample, reference, exec)?, exact: false })
}

/// `max_{r∈reference} d(r, A)` by brute force.
pub fn estimate_coverage(sample: &MetricSample, reference: &[Point], exec: Exec) -> Result<f64> {
    if reference.is_empty() {
        return Err(Error::EmptySet("coverage reference"));
    }
    for r in reference {
        sample.context.check(r)?;
    }
    let per = exec.map_slice(reference, |r| sample.distance_to_set(r));
    Ok(per.into_iter().fold(0.0, f64::max))
}

/// The example spaces and their samplers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum Generator {
    /// `2^{3n-4}` equispaced angles on the geodesic unit circle (one point at n = 1).
    Circle { level: usize },
    /// The circle sample rotated by `offset` radians.
    RotatedCircle { level: usize, offset: f64 },
    /// Endpoints of the `n+1`-th stage of the middle-thirds construction.
    Cantor { level: usize },
    /// Seeded uniform sample of the two-squares graph in the plane.
    TwoSquares { level: usize, count: usize, seed: u64 },
    /// Grid approximations of the unit interval.
    Interval { level: usize },
    /// Points read from a CSV file.
    FromFile {
        path: String,
        context: MetricContext,
        epsilon: f64,
        #[serde(default)]
        gamma: Option<f64>,
    },
}

/// Scale `ε_n = 1/2^{2(n-1)}` shared by the two-squares and Cantor towers.
pub fn quarter_schedule(level: usize) -> f64 {
    0.25f64.powi(level as i32 - 1)
}

pub fn circle_epsilon(level: usize) -> f64 {
    if level == 1 {
        3.0 * PI
    } else {
        PI / 2f64.powi(3 * level as i32 - 5)
    }
}

pub fn circle_gamma(level: usize) -> f64 {
    if level == 1 {
        PI
    } else {
        PI / 2f64.powi(3 * level as i32 - 4)
    }
}

/// Segments of the two-squares graph `{0}×[0,2] ∪ {1}×[0,2] ∪ [0,1]×{0,1,2}`.
pub const TWO_SQUARES_SEGMENTS: [([f64; 2], [f64; 2]); 5] = [
    ([0.0, 0.0], [0.0, 2.0]),
    ([1.0, 0.0], [1.0, 2.0]),
    ([0.0, 0.0], [1.0, 0.0]),
    ([0.0, 1.0], [1.0, 1.0]),
    ([0.0, 2.0], [1.0, 2.0]),
];

fn two_squares_at(t: f64) -> Point {
    // t is an arclength parameter in [0, 7)
    let mut rest = t;
    for (a, b) in TWO_SQUARES_SEGMENTS {
        let len = euclidean(&a, &b);
        if rest < len {
            let s = rest / len;
            return Point::Coords(vec![a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
        }
        rest -= len;
    }
    let (_, b) = TWO_SQUARES_SEGMENTS[4];
    Point::Coords(b.to_vec())
}

fn level_rng(seed: u64, level: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(level as u64);
    rng
}

fn check_level(level: usize) -> Result<()> {
    if level == 0 {
        return Err(Error::InvalidSample("levels start at 1".into()));
    }
    Ok(())
}

/// Endpoints of `E_{stage}` (stage 1 is `[0,1]`), in increasing order.
pub fn cantor_endpoints(stage: usize) -> Vec<f64> {
    let k = stage as i32 - 1;
    let len = 3f64.powi(-k);
    let mut out = Vec::with_capacity(2usize << (stage - 1));
    for word in 0..(1u64 << (stage - 1)) {
        // left endpoint: sum of 2·3^{-j} over the set bits, most significant first
        let mut left = 0.0;
        for j in 0..k {
            if word >> (k - 1 - j) & 1 == 1 {
                left += 2.0 * 3f64.powi(-(j + 1));
            }
        }
        out.push(left);
        out.push(left + len);
    }
    out
}

pub fn generate(generator: &Generator) -> Result<MetricSample> {
    match generator {
        Generator::Circle { level } => generate(&Generator::RotatedCircle { level: *level, offset: 0.0 }),
        Generator::RotatedCircle { level, offset } => {
            check_level(*level)?;
            let count = if *level == 1 { 1usize } else { 1usize << (3 * level - 4) };
            let points = (0..count).map(|k| Point::angle(TAU * k as f64 / count as f64 + offset)).collect();
            MetricSample::new(
                MetricContext::CircleGeodesic,
                points,
                circle_epsilon(*level),
                Some(Coverage { radius: circle_gamma(*level), exact: true }),
            )
        }
        Generator::Cantor { level } => {
            check_level(*level)?;
            let points = cantor_endpoints(level + 1).into_iter().map(|x| Point::Coords(vec![x])).collect();
            MetricSample::new(
                MetricContext::Euclidean { dimension: 1 },
                points,
                quarter_schedule(*level),
                Some(Coverage { radius: 3f64.powi(-(*level as i32 + 1)), exact: true }),
            )
        }
        Generator::TwoSquares { level, count, seed } => {
            check_level(*level)?;
            if *count == 0 {
                return Err(Error::InvalidSample("two_squares needs at least one point".into()));
            }
            let mut rng = level_rng(*seed, *level);
            let points = (0..*count).map(|_| two_squares_at(rng.gen_range(0.0..7.0))).collect();
            MetricSample::new(MetricContext::Euclidean { dimension: 2 }, points, quarter_schedule(*level), None)
        }
        Generator::Interval { level } => {
            check_level(*level)?;
            if *level == 1 {
                return MetricSample::new(
                    MetricContext::Euclidean { dimension: 1 },
                    vec![Point::Coords(vec![0.0])],
                    2.0,
                    Some(Coverage { radius: 1.0, exact: true }),
                );
            }
            let steps = 3usize.pow(2 * *level as u32 - 3);
            let points = (0..=steps).map(|k| Point::Coords(vec![k as f64 / steps as f64])).collect();
            MetricSample::new(
                MetricContext::Euclidean { dimension: 1 },
                points,
                1.0 / steps as f64,
                Some(Coverage { radius: 0.5 / steps as f64, exact: true }),
            )
        }
        Generator::FromFile { path, context, epsilon, gamma } => {
            let points = match context {
                MetricContext::Explicit { matrix } => (0..matrix.len()).map(Point::Index).collect(),
                _ => read_points_csv(path)?,
            };
            let points = match context {
                MetricContext::CircleGeodesic => {
                    points.into_iter().map(|p| Point::angle(p.coords().map_or(0.0, |c| c[0]))).collect()
                }
                _ => points,
            };
            MetricSample::new(
                context.clone(),
                points,
                *epsilon,
                gamma.map(|radius| Coverage { radius, exact: false }),
            )
        }
    }
}

/// Dense reference samples of the model spaces, for coverage estimates and
/// ε-approximation checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpace {
    Circle,
    Cantor,
    TwoSquares,
    Interval,
}

impl ModelSpace {
    pub fn context(self) -> MetricContext {
        match self {
            ModelSpace::Circle => MetricContext::CircleGeodesic,
            ModelSpace::Cantor | ModelSpace::Interval => MetricContext::Euclidean { dimension: 1 },
            ModelSpace::TwoSquares => MetricContext::Euclidean { dimension: 2 },
        }
    }

    /// Roughly `count` deterministic, evenly spread points of the space.
    pub fn reference(self, count: usize) -> Vec<Point> {
        let count = count.max(2);
        match self {
            ModelSpace::Circle => (0..count).map(|k| Point::angle(TAU * k as f64 / count as f64)).collect(),
            ModelSpace::Interval => {
                (0..count).map(|k| Point::Coords(vec![k as f64 / (count - 1) as f64])).collect()
            }
            ModelSpace::TwoSquares => {
                (0..count).map(|k| two_squares_at(7.0 * k as f64 / (count - 1) as f64)).collect()
            }
            ModelSpace::Cantor => {
                let stage = ((count as f64).log2().ceil() as usize).clamp(2, 24);
                cantor_endpoints(stage).into_iter().map(|x| Point::Coords(vec![x])).collect()
            }
        }
    }

    /// Seeded random points of the space.
    pub fn random_points(self, count: usize, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| match self {
                ModelSpace::Circle => Point::angle(rng.gen_range(0.0..TAU)),
                ModelSpace::Interval => Point::Coords(vec![rng.gen_range(0.0..=1.0)]),
                ModelSpace::TwoSquares => two_squares_at(rng.gen_range(0.0..7.0)),
                ModelSpace::Cantor => {
                    // 0/2 ternary digits: a point of the Cantor set
                    let mut x = 0.0;
                    let mut scale = 1.0 / 3.0;
                    for _ in 0..32 {
                        if rng.gen_bool(0.5) {
                            x += 2.0 * scale;
                        }
                        scale /= 3.0;
                    }
                    Point::Coords(vec![x])
                }
            })
            .collect()
    }
}

/// Uniform grid of `count` points over the stage-`stage` intervals of the
/// middle-thirds construction.
pub fn cantor_stage_grid(stage: usize, count: usize) -> Vec<Point> {
    let ends = cantor_endpoints(stage);
    let len = 3f64.powi(-(stage as i32 - 1));
    let total = len * (ends.len() / 2) as f64;
    (0..count)
        .map(|k| {
            let t = total * k as f64 / (count - 1).max(1) as f64;
            let idx = ((t / len) as usize).min(ends.len() / 2 - 1);
            Point::Coords(vec![ends[2 * idx] + (t - idx as f64 * len)])
        })
        .collect()
}

/// Reads one point per line; lines starting with `#` are skipped and every
/// line must have the same number of coordinates.
pub fn read_points_csv(path: impl AsRef<Path>) -> Result<Vec<Point>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut points = Vec::new();
    let mut arity = None;
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let coords = record
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", line + 1))))
            .collect::<Result<Vec<_>>>()?;
        match arity {
            None => arity = Some(coords.len()),
            Some(a) if a != coords.len() => {
                return Err(Error::Parse(format!("line {}: {} coordinates, expected {a}", line + 1, coords.len())))
            }
            _ => {}
        }
        points.push(Point::Coords(coords));
    }
    Ok(points)
}

/// Reads a square distance matrix and validates it as a metric.
pub fn read_matrix_csv(path: impl AsRef<Path>, tol: f64) -> Result<MetricContext> {
    let rows = read_points_csv(path)?;
    let matrix = rows.into_iter().map(|p| p.coords().map(<[f64]>::to_vec).unwrap_or_default()).collect();
    MetricContext::explicit(matrix, tol)
}

/// Writes points with 17 significant digits (round-trip exact).
pub fn write_points_csv(path: impl AsRef<Path>, sample: &MetricSample) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for p in &sample.points {
        match p {
            Point::Coords(c) => writer.write_record(c.iter().map(|x| format!("{x:.17e}")))?,
            Point::Index(i) => writer.write_record([i.to_string()])?,
        }
    }
    writer.flush()?;
    Ok(())
}
