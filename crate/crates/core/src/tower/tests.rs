use super::*;
use crate::metric::{generate, Generator};
use std::f64::consts::PI;

fn circle(depth: usize) -> Schedule {
    Schedule::new(ScheduleMode::Strict, (1..=depth).map(|level| generate(&Generator::Circle { level }).unwrap()).collect())
}

fn cantor(depth: usize) -> Schedule {
    Schedule::new(ScheduleMode::Strict, (1..=depth).map(|level| generate(&Generator::Cantor { level }).unwrap()).collect())
}

fn params() -> TowerParams {
    TowerParams { max_dim: 2, ..Default::default() }
}

#[test]
fn circle_schedule_is_strict() {
    let report = validate_schedule(&circle(5));
    assert!(report.passed, "{report:?}");
    assert_eq!(report.levels.len(), 4);
}

#[test]
fn constant_epsilon_fails_at_first_level() {
    let mut s = circle(3);
    for l in &mut s.levels {
        l.epsilon = 1.0;
        l.gamma = None;
    }
    s.mode = ScheduleMode::Relaxed;
    let report = validate_schedule(&s);
    assert!(!report.passed);
    assert_eq!(report.first_violation().unwrap().level, 1);
    assert!(matches!(Tower::build(s, params()), Err(Error::Schedule(_))));
}

#[test]
fn strict_mode_needs_gamma() {
    let mut s = circle(2);
    s.levels[0].gamma = None;
    let report = validate_schedule(&s);
    assert!(!report.passed);
    s.mode = ScheduleMode::Relaxed;
    assert!(validate_schedule(&s).passed);
}

#[test]
fn circle_tower_shapes() {
    let t = Tower::build(circle(3), params()).unwrap();
    assert_eq!(t.depth(), 3);
    assert_eq!(t.term(1).unwrap().len(), 1);
    assert_eq!(t.sample(2).unwrap().len(), 4);
    assert_eq!(t.sample(3).unwrap().len(), 32);
    // every vertex of level 2 maps to the single point of level 1
    assert!(t.bonding(1).unwrap().vertex_images().iter().all(|c| c.as_slice() == [0]));
    assert!(t.bonding(0).is_err());
    assert!(t.bonding(3).is_err());
    assert!(matches!(t.term(4), Err(Error::LevelOutOfRange { .. })));
}

#[test]
fn bonding_map_is_continuous_and_composes() {
    let t = Tower::build(circle(3), params()).unwrap();
    let q = t.bonding_map(2).unwrap();
    let p = t.bonding_map(1).unwrap();
    let comp = t.composite_map(1, 3).unwrap();
    assert_eq!(q.then(&p).unwrap().assignment(), comp.assignment());
    assert!(t.composite_map(2, 2).unwrap().assignment().iter().enumerate().all(|(i, &j)| i == j));
}

#[test]
fn selection_lands_in_image() {
    let t = Tower::build(circle(4), params()).unwrap();
    for n in 1..4 {
        let b = t.bonding(n).unwrap();
        for (a, &s) in b.selection().iter().enumerate() {
            assert!(b.vertex_images()[a].contains(s));
        }
    }
    let sel = t.selection_composite(1, 4).unwrap();
    assert!(sel.iter().all(|&v| v == 0));
}

#[test]
fn projection_diagram_commutes_up_to_homotopy() {
    let t = Tower::build(circle(4), params()).unwrap();
    let probes: Vec<Point> = (0..50).map(|k| Point::Coords(vec![2.0 * PI * k as f64 / 50.0 + 0.013])).collect();
    for n in 1..4 {
        let r = check_projection_diagram(&t, n, &probes).unwrap();
        assert!(r.passed, "level {n}: {:?}", r.failures().next());
    }
}

#[test]
fn projection_rejects_wrong_point_kind() {
    let t = Tower::build(circle(2), params()).unwrap();
    assert!(check_projection_diagram(&t, 1, &[Point::Coords(vec![0.0, 1.0])]).is_err());
}

#[test]
fn dump_round_trip() {
    let t = Tower::build(circle(3), params()).unwrap();
    let dump = t.dump();
    let json = serde_json::to_string(&dump).unwrap();
    let back: TowerDump = serde_json::from_str(&json).unwrap();
    assert_eq!(back, dump);
    let (rebuilt, check) = Tower::from_dump(&back, Exec::Sequential).unwrap();
    assert!(check.consistent(), "{check:?}");
    assert_eq!(rebuilt.dump(), dump);
}

#[test]
fn tampered_dump_is_reported() {
    let t = Tower::build(circle(3), params()).unwrap();
    let mut dump = t.dump();
    dump.bondings[1].vertex_images[0] = IndexSet::singleton(2);
    let (_, check) = Tower::from_dump(&dump, Exec::Sequential).unwrap();
    assert_eq!(check.bonding_mismatches.len(), 1);
    assert_eq!(check.bonding_mismatches[0].vertex, 0);
}

#[test]
fn fas_comparison_on_circle() {
    let t = Tower::build(circle(4), params()).unwrap();
    let r = fas_faso_comparison(&t).unwrap();
    for l in &r.levels {
        assert_eq!(l.g_source, Some(l.level + 1));
        assert!(l.inclusion.passed() && l.p_in_q.passed() && l.g_in_p.passed(), "{l:?}");
    }
    assert!(r.comparable, "{r:?}");
    // the literal q ⊆ g containment breaks on level 3 sets off the grid of level 2
    assert!(!r.levels[1].q_in_g.passed());
}

#[test]
fn fas_needs_gamma() {
    let mut s = circle(2);
    s.mode = ScheduleMode::Relaxed;
    s.levels[0].gamma = None;
    let t = Tower::build(s, params()).unwrap();
    assert!(matches!(t.fas_vertex_images(1), Err(Error::MissingGamma(1))));
}

#[test]
fn cantor_tower_builds() {
    let t = Tower::build(cantor(4), params()).unwrap();
    // A_1 has 4 points and A_2 has 8, all inside one ε_1-ball: q_{1,2} leaves the truncated term
    assert_eq!(t.sample(1).unwrap().len(), 4);
    assert!(matches!(t.bonding_map(1), Err(Error::ImageNotInTarget { .. })));
    for n in 1..4 {
        let b = t.bonding(n).unwrap();
        for (a, &s) in b.selection().iter().enumerate() {
            assert!(b.vertex_images()[a].contains(s));
        }
    }
}

#[test]
fn self_comparison_indices() {
    let t = Tower::build(circle(5), TowerParams { max_dim: 1, ..Default::default() }).unwrap();
    let r = two_tower_comparison(&t, &t, COMPARISON_CONSTANT).unwrap();
    let idx: Vec<Option<usize>> = r.forward.indices.iter().map(|c| c.index).collect();
    assert_eq!(idx, vec![Some(3), Some(4), Some(5), None, None]);
    assert!(r.passed, "{r:?}");
    assert!(r.forward.round_trips.iter().any(|s| s.level == 1 && s.from_level == 5));
}

#[test]
fn rotated_comparison() {
    let a = Tower::build(circle(5), TowerParams { max_dim: 1, ..Default::default() }).unwrap();
    let rot = Schedule::new(
        ScheduleMode::Strict,
        (1..=5).map(|level| generate(&Generator::RotatedCircle { level, offset: PI / 1024.0 }).unwrap()).collect(),
    );
    let b = Tower::build(rot, TowerParams { max_dim: 1, ..Default::default() }).unwrap();
    let r = two_tower_comparison(&a, &b, COMPARISON_CONSTANT).unwrap();
    assert!(r.passed, "{r:?}");
    assert!(two_tower_comparison(&a, &b, 0.0).is_err());
}
