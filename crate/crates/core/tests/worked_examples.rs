//! Hand-computed expectations for the two periodic example worlds and the
//! free-streaming world.

use proptime_core::rational::{int, q};
use proptime_core::{
    affine_isomorphic, detect_inertial, external_state_equal, simulate, state_snapshot, BodyFrame, BodyRef,
    Configuration, Edge, FrameMap, Topology,
};

fn example1() -> Configuration {
    Configuration::standard(Topology::Periodic(2), [(0, Edge::plus(0)), (1, Edge::minus(1))]).unwrap()
}

fn example2() -> Configuration {
    Configuration::standard(
        Topology::Periodic(4),
        [(0, Edge::plus(0)), (1, Edge::minus(1)), (2, Edge::plus(2))],
    )
    .unwrap()
}

fn a1() -> Vec<BodyRef> {
    vec![BodyRef::new(0), BodyRef::new(1), BodyRef::copy(0, 1)]
}

fn a2() -> Vec<BodyRef> {
    vec![BodyRef::new(0), BodyRef::new(1), BodyRef::new(2)]
}

#[test]
fn example1_pair_bounces_in_place() {
    let c = example1();
    let next = c.step();
    assert_eq!(next.placements()[0].edge, Edge::minus(0));
    assert_eq!(next.placements()[1].edge, Edge::plus(1));
    assert_eq!(next.step(), c);
}

#[test]
fn example2_drifts_one_vertex_every_three_steps() {
    let c = example2();
    let three = c.step().step().step();
    assert!(c.equals_shifted(&three, 1));
    assert_eq!(three, c.shift(1));
}

#[test]
fn inertial_signatures() {
    let s1 = detect_inertial(&example1(), &a1(), 64).unwrap().unwrap();
    assert_eq!(
        (s1.period, s1.displacement, s1.v.clone(), s1.w.clone()),
        (2, 0, int(0), int(1))
    );
    let s2 = detect_inertial(&example2(), &a2(), 64).unwrap().unwrap();
    assert_eq!(
        (s2.period, s2.displacement, s2.v.clone(), s2.w.clone()),
        (3, 1, q(1, 3), q(2, 3))
    );

    let free = Configuration::standard(Topology::Finite, [(0, Edge::plus(0))]).unwrap();
    let s = detect_inertial(&free, &[BodyRef::new(0)], 8).unwrap().unwrap();
    assert_eq!(
        (s.period, s.displacement, s.v.clone(), s.w.clone()),
        (1, 1, int(1), int(0))
    );
    assert!(s.is_light_like());
}

#[test]
fn example2_rates_hold_every_step() {
    let trace = simulate(&example2(), 30).unwrap();
    let obs = trace.body_observables(&a2()).unwrap();
    assert!(obs.v.iter().all(|v| *v == q(1, 3)));
    assert!(obs.w.iter().all(|w| *w == q(2, 3)));
    assert_eq!(obs.tau[30], int(20));
}

#[test]
fn frame_of_example2_seen_from_example1() {
    let t1 = simulate(&example1(), 24).unwrap();
    let t2 = simulate(&example2(), 24).unwrap();
    let f1 = BodyFrame::new(&t1, &a1(), 64).unwrap();
    let f2 = BodyFrame::new(&t2, &a2(), 64).unwrap();
    let l21 = f2.map_into(&f1);
    let want = FrameMap::new(q(3, 2), q(1, 2), q(1, 2), q(3, 2)).unwrap();
    assert_eq!(l21.linear(), want.linear());
    let k12 = f1.relative_to(&f2).unwrap();
    assert_eq!((k12.v, k12.w), (q(-1, 3), q(4, 3)));
}

#[test]
fn snapshots_and_isomorphism() {
    let t1 = simulate(&example1(), 24).unwrap();
    let t2 = simulate(&example2(), 24).unwrap();
    assert!(external_state_equal(&t1, &a1(), 0, &t2, &a2(), 0).unwrap());
    assert!(!external_state_equal(&t1, &a1(), 1, &t2, &a2(), 1).unwrap());

    let s = state_snapshot(&t2, &a2(), &int(0), 64).unwrap();
    let xs: Vec<_> = s.key().into_iter().map(|(_, x)| x).collect();
    assert_eq!(xs, vec![int(-1), int(0), int(1)]);

    let w = affine_isomorphic(&t1, &a1(), &t2, &a2(), 64).unwrap().unwrap();
    assert_eq!(w.pairs.len(), 3);
}
