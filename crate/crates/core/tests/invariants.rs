//! Property tests for the lattice dynamics and the observables built on it.

use proptest::prelude::*;

use proptime_core::rational::int;
use proptime_core::{simulate, BodyRef, Configuration, Direction, Edge, Topology};

fn edge() -> impl Strategy<Value = Edge> {
    (-6i64..6, any::<bool>()).prop_map(|(x, plus)| Edge {
        x,
        dir: if plus { Direction::Plus } else { Direction::Minus },
    })
}

fn configuration() -> impl Strategy<Value = Configuration> {
    (
        proptest::collection::vec(edge(), 1..7),
        prop_oneof![Just(0u32), 2u32..9],
    )
        .prop_map(|(edges, period)| {
            let topology = if period == 0 {
                Topology::Finite
            } else {
                Topology::Periodic(period)
            };
            Configuration::standard(topology, edges.into_iter().enumerate().map(|(i, e)| (i as u32, e))).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn step_commutes_with_shift(config in configuration(), k in -10i64..10) {
        prop_assert_eq!(config.shift(k).step(), config.step().shift(k));
    }

    #[test]
    fn step_preserves_bodies_and_colors(config in configuration()) {
        let next = config.step();
        prop_assert_eq!(next.placements().len(), config.placements().len());
        for (a, b) in config.placements().iter().zip(next.placements()) {
            prop_assert_eq!((a.id, a.color), (b.id, b.color));
            // Each body either turns in place or advances one vertex.
            prop_assert!(b.edge == a.edge.contrary() || b.edge == a.edge.advanced());
        }
    }

    #[test]
    fn every_body_spends_one_unit_per_step(config in configuration(), horizon in 1u64..40) {
        let trace = simulate(&config, horizon).unwrap();
        for p in config.placements() {
            let obs = trace.elementary_observables(BodyRef::new(p.id)).unwrap();
            for t in 0..horizon as usize {
                prop_assert_eq!(obs.w[t] + obs.v[t].abs(), 1);
            }
            for t in 0..=horizon as usize {
                prop_assert_eq!(obs.tau[t] + obs.s[t], t as i64);
            }
        }
    }

    #[test]
    fn collective_clock_and_speed_budget(config in configuration(), horizon in 1u64..30) {
        let trace = simulate(&config, horizon).unwrap();
        let members: Vec<BodyRef> = config.placements().iter().map(|p| BodyRef::new(p.id)).collect();
        let obs = trace.body_observables(&members).unwrap();
        for (v, w) in obs.v.iter().zip(&obs.w) {
            prop_assert!(*w >= int(0));
            prop_assert!(proptime_core::rational::abs(v) + w <= int(1));
        }
    }

    #[test]
    fn continuous_world_line_moves_at_light_speed(config in configuration(), horizon in 1u64..20) {
        let trace = simulate(&config, horizon).unwrap();
        let (lo, hi) = trace.window();
        for p in config.placements() {
            let line = trace.world_line(BodyRef::new(p.id), &lo, &hi).unwrap();
            for pair in line.windows(2) {
                let dx = &pair[1].x - &pair[0].x;
                let dt = &pair[1].t - &pair[0].t;
                prop_assert!(dt > int(0));
                prop_assert_eq!(proptime_core::rational::abs(&dx), dt);
            }
        }
    }
}
