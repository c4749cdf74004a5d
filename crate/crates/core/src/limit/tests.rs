use super::*;
use crate::metric::{generate, Generator, MetricContext, MetricSample};
use crate::tower::{Schedule, ScheduleMode, TowerParams};
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

fn circle_tower(depth: usize) -> Tower {
    let levels = (1..=depth).map(|level| generate(&Generator::Circle { level }).unwrap()).collect();
    Tower::build(Schedule::new(ScheduleMode::Strict, levels), TowerParams { max_dim: 1, ..Default::default() }).unwrap()
}

fn shared() -> &'static Tower {
    static T: OnceLock<Tower> = OnceLock::new();
    T.get_or_init(|| circle_tower(5))
}

fn angle(t: f64) -> Point {
    Point::Coords(vec![t])
}

/// Index of the level-`n` grid point at angle `TAU * k / count`.
fn grid(t: &Tower, n: usize, k: usize) -> u32 {
    let s = t.sample(n).unwrap();
    let target = TAU * k as f64 / s.len() as f64;
    (0..s.len() as u32).find(|&i| s.point(i).coords().unwrap()[0] == target).unwrap()
}

#[test]
fn nearest_set_examples() {
    let t = shared();
    assert_eq!(nearest_set(t, &angle(PI / 8.0), 2).unwrap().as_slice(), [grid(t, 2, 0)]);
    let s3 = t.sample(3).unwrap();
    let x = s3.point(5).clone();
    assert_eq!(nearest_set(t, &x, 3).unwrap().as_slice(), [5]);
    // exact tie on the line
    let line = MetricSample::new(
        MetricContext::Euclidean { dimension: 1 },
        vec![vec![0.0].into(), vec![1.0].into()],
        1.0,
        None,
    )
    .unwrap();
    assert_eq!(line.nearest_set(&vec![0.5].into(), 1e-9).len(), 2);
    assert!(nearest_set(t, &angle(7.0), 2).is_err());
}

#[test]
fn grid_point_thread() {
    let t = shared();
    // x is a point of A_4 that is not in A_3
    let x = angle(TAU / 256.0);
    let (thread, stab) = canonical_thread(t, &x).unwrap();
    assert_eq!(thread.len(), 4);
    assert_eq!(thread.entry(1).unwrap().as_slice(), [0]);
    assert_eq!(thread.entry(4).unwrap().as_slice(), [grid(t, 4, 1)]);
    for n in 2..=3 {
        let mut pair = vec![grid(t, n, 0), grid(t, n, 1)];
        pair.sort();
        assert_eq!(thread.entry(n).unwrap().as_slice(), pair.as_slice(), "level {n}");
    }
    assert!(stab.passed());
    assert!(verify_thread(t, &thread).unwrap().passed);
}

#[test]
fn off_grid_thread_is_pairs() {
    let t = shared();
    let x = 1.0;
    let (thread, stab) = canonical_thread(t, &angle(x)).unwrap();
    for n in 2..=4 {
        let s = t.sample(n).unwrap();
        let count = s.len() as f64;
        let k = (x / TAU * count).floor() as usize;
        let mut pair = vec![grid(t, n, k), grid(t, n, (k + 1) % s.len())];
        pair.sort();
        assert_eq!(thread.entry(n).unwrap().as_slice(), pair.as_slice(), "level {n}");
    }
    assert!(stab.levels.iter().all(|l| l.monotone && l.within_two_epsilon && l.in_truncated_term));
    assert!(convergence_check(t, &thread, &angle(x)).unwrap().passed);
}

#[test]
fn one_point_first_level() {
    let t = circle_tower(3);
    let (thread, _) = canonical_thread(&t, &angle(2.5)).unwrap();
    assert_eq!(thread.entry(1).unwrap().as_slice(), [0]);
}

#[test]
fn depth_one_is_rejected() {
    let t = circle_tower(1);
    assert!(matches!(canonical_thread(&t, &angle(0.3)), Err(Error::LevelOutOfRange { .. })));
}

#[test]
fn stabilization_flags_deepest_growth() {
    let t = circle_tower(3);
    let (_, stab) = canonical_thread(&t, &angle(1.0)).unwrap();
    for l in &stab.levels {
        assert_eq!(l.possibly_unstabilized, l.last_growth == 3);
    }
}

#[test]
fn tampered_thread_fails_compatibility() {
    let t = shared();
    let (thread, _) = canonical_thread(t, &angle(1.0)).unwrap();
    let mut entries = thread.entries.clone();
    let c = &entries[1];
    let extra = (0..t.sample(2).unwrap().len() as u32).find(|v| !c.contains(*v)).unwrap();
    let bigger = c.union(&IndexSet::singleton(extra));
    entries[1] = bigger;
    match Thread::user_supplied(t, entries) {
        Ok(u) => {
            let r = verify_thread(t, &u).unwrap();
            assert!(!r.passed);
            let f = r.first_failure().unwrap();
            assert!(f.level == 1 || f.level == 2);
            assert_ne!(f.image, f.entry);
        }
        Err(e) => assert!(matches!(e, Error::DiameterBound { .. })),
    }
    let single = Thread::user_supplied(t, vec![IndexSet::singleton(0)]).unwrap();
    assert!(verify_thread(t, &single).unwrap().passed);
}

#[test]
fn user_threads_are_validated() {
    let t = shared();
    assert!(Thread::user_supplied(t, vec![IndexSet::new()]).is_err());
    assert!(Thread::user_supplied(t, vec![IndexSet::singleton(3)]).is_err());
    let all: IndexSet = (0..32).collect();
    assert!(matches!(
        Thread::user_supplied(t, vec![IndexSet::singleton(0), IndexSet::singleton(0), all]),
        Err(Error::DiameterBound { level: 3, .. })
    ));
    assert!(Thread::user_supplied(t, vec![IndexSet::singleton(0); 6]).is_err());
}

#[test]
fn convergence_examples() {
    let t = shared();
    for k in 0..40 {
        let x = angle(TAU * (k as f64 + 0.37) / 40.0);
        let (thread, _) = canonical_thread(t, &x).unwrap();
        let r = convergence_check(t, &thread, &x).unwrap();
        assert!(r.passed, "{k}: {r:?}");
        assert!(!r.between_levels.is_empty());
    }
    // entries that are exactly {x}
    let x = t.sample(3).unwrap().point(0).clone();
    let thread = Thread::user_supplied(t, vec![IndexSet::singleton(0); 3]).unwrap();
    let r = convergence_check(t, &thread, &x).unwrap();
    assert!(r.to_point.iter().all(|c| c.distance == 0.0 && c.passed));
    // wrong point
    let (thread, _) = canonical_thread(t, &angle(0.5)).unwrap();
    let r = convergence_check(t, &thread, &angle(0.5 + PI)).unwrap();
    // level 2 has 2ε_2 = π, the diameter of the circle, so failures start at level 3
    assert_eq!(r.first_failure(), Some(3));
    assert!(r.to_point.iter().filter(|c| c.level >= 3).all(|c| !c.passed));
}

#[test]
fn minimality_examples() {
    let t = shared();
    let x = angle(1.0);
    let (canon, _) = canonical_thread(t, &x).unwrap();
    assert_eq!(minimality_check(t, &canon, &canon, &x).unwrap().passed(), Some(true));
    // enlarge one entry by a point while keeping the thread compatible
    let mut found = 0;
    for n in 1..=canon.len() {
        for v in 0..t.sample(n).unwrap().len() as u32 {
            if canon.entries[n - 1].contains(v) {
                continue;
            }
            let mut entries = canon.entries.clone();
            entries[n - 1] = entries[n - 1].union(&IndexSet::singleton(v));
            let Ok(other) = Thread::user_supplied(t, entries) else { continue };
            if !verify_thread(t, &other).unwrap().passed || !convergence_check(t, &other, &x).unwrap().passed {
                continue;
            }
            found += 1;
            assert_eq!(other.entries[n - 1].len(), 3);
            assert_eq!(minimality_check(t, &canon, &other, &x).unwrap().passed(), Some(true));
        }
    }
    assert!(found > 0);
    let (far, _) = canonical_thread(t, &angle(1.0 + PI)).unwrap();
    let r = minimality_check(t, &canon, &far, &x).unwrap();
    assert!(matches!(r, MinimalityReport::PreconditionFailed { ref reason } if reason.contains("precondition failed")));
}

#[test]
fn dump_shape() {
    let t = shared();
    let d = thread_dump(t, &angle(1.0)).unwrap();
    let v = serde_json::to_value(&d).unwrap();
    for key in ["x", "entries", "stabilization", "checks"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["entries"].as_array().unwrap().len(), 4);
    let back: ThreadDump = serde_json::from_value(v).unwrap();
    assert_eq!(back, d);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_threads_are_compatible(x in 0.0..TAU) {
        let t = shared();
        let (thread, stab) = canonical_thread(t, &angle(x)).unwrap();
        prop_assert!(stab.passed());
        let r = verify_thread(t, &thread).unwrap();
        // exact compatibility below the last built pair
        for c in r.levels.iter().filter(|c| c.level + 2 <= t.depth()) {
            prop_assert!(c.passed, "{:?}", c);
        }
        prop_assert!(convergence_check(t, &thread, &angle(x)).unwrap().passed);
    }

    #[test]
    fn far_points_have_disjoint_entries(x in 0.0..TAU, y in 0.0..TAU) {
        let t = shared();
        for level in separation_check(t, &angle(x), &angle(y)).unwrap() {
            prop_assert!(level.disjoint, "level {}", level.level);
        }
    }
}
