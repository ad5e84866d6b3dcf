mod common;

use std::collections::{BTreeSet, HashMap};

use contam_core::bounds::max_connectivity_factor;
use contam_core::geometry::{can_observe, dense_circle_capacity};
use contam_core::graph::connected_components;
use contam_core::wpc::{self, sequence_cost, transform_sequence, AttackingSequence};
use contam_core::{AgentSnapshot, HealthState, ObservationGraph, Vec2, WorldConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

/// Drops points that would overlap an earlier one.
fn world(points: Vec<(f64, f64, bool)>, cfg: &WorldConfig) -> Vec<AgentSnapshot> {
    let mut out: Vec<AgentSnapshot> = Vec::new();
    for (x, y, h) in points {
        let p = Vec2::new(x, y);
        if out.iter().all(|a| (a.pos - p).norm() > cfg.d_r * 1.01) {
            let state = if h { HealthState::Healthy } else { HealthState::Contaminated };
            out.push(AgentSnapshot::new(out.len() as u32 + 1, x, y, state));
        }
    }
    out
}

fn points(n: usize, side: f64) -> impl Strategy<Value = Vec<(f64, f64, bool)>> {
    prop::collection::vec((0.0..side, 0.0..side, any::<bool>()), 1..n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn observation_is_symmetric(pts in points(40, 16.0)) {
        let cfg = WorldConfig::default();
        let agents = world(pts, &cfg);
        let g = ObservationGraph::build(&agents, &cfg).unwrap();
        for &a in g.ids() {
            for b in g.neighbors(a) {
                prop_assert!(g.has_edge(b, a));
                prop_assert!(g.observed_set(b).contains(&a));
            }
            prop_assert!(g.observed_set(a).contains(&a));
        }
    }

    #[test]
    fn more_blockers_never_reveal(
        target in (0.0..12.0f64, 0.0..12.0f64),
        blockers in prop::collection::vec((0.0..12.0f64, 0.0..12.0f64), 0..12),
        split in 0usize..12,
    ) {
        let cfg = WorldConfig::default();
        let from = Vec2::new(6.0, 6.0);
        let to = Vec2::new(target.0, target.1);
        let all: Vec<Vec2> = blockers.iter().map(|&(x, y)| Vec2::new(x, y)).collect();
        let some = &all[..split.min(all.len())];
        if can_observe(from, to, &all, &cfg) {
            prop_assert!(can_observe(from, to, some, &cfg));
        }
    }

    #[test]
    fn capacity_grows_with_radius(r in 0.25..40.0f64, dr in 0.05..0.25f64, grow in 0.0..5.0f64) {
        prop_assume!(r >= dr);
        let a = dense_circle_capacity(r, dr).unwrap();
        let b = dense_circle_capacity(r + grow, dr).unwrap();
        prop_assert!(a <= b);
    }

    #[test]
    fn connectivity_within_ring_bound(pts in points(120, 14.0)) {
        let cfg = WorldConfig::default();
        let bound = max_connectivity_factor(&cfg).unwrap();
        let agents = world(pts, &cfg);
        let g = ObservationGraph::build(&agents, &cfg).unwrap();
        let states: HashMap<_, _> = agents.iter().map(|a| (a.id, a.state)).collect();
        let comps = connected_components(&g, &states).unwrap();
        for comp in &comps.components {
            for &m in &comp.members {
                prop_assert!(comp.connectivity_factor(m).unwrap() <= bound);
            }
        }
        let covered: BTreeSet<_> = comps.components.iter().flat_map(|c| c.members.iter().copied()).collect();
        prop_assert_eq!(covered.len(), agents.len());
    }

    #[test]
    fn trace_is_monotone_and_replayable(seed in any::<u64>(), n in 1u32..10, p in 0.0..0.9f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let adj = random_connected(n, p, &mut rng);
        let (value, trace) = wpc::wpc_abstract(&adj, None).unwrap();
        let first = &trace.steps[0];
        let lead = *first.chosen.iter().next().unwrap();
        prop_assert_eq!(first.r, adj[&lead].len() as i64 + 1);
        let (mut c, mut r) = (0i64, 0i64);
        for s in &trace.steps {
            let delta = s.max_pbf - c;
            prop_assert_eq!(s.delta, delta);
            if delta > 0 {
                r += delta;
                c += delta;
            }
            c += s.chosen.len() as i64;
            prop_assert_eq!((s.c, s.r), (c, r));
            prop_assert_eq!(s.c, s.r + s.conquered.len() as i64);
        }
        prop_assert!(trace.steps.windows(2).all(|w| w[0].c <= w[1].c && w[0].r <= w[1].r));
        prop_assert_eq!(value, r);
        prop_assert_eq!(trace.order().len(), n as usize);
    }

    #[test]
    fn transform_keeps_members_and_cost(seed in any::<u64>(), n in 1u32..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let adj = random_connected(n, 0.4, &mut rng);
        let comp = component(&adj);
        let everything = AttackingSequence::new(vec![comp.members.clone()]);
        let single = transform_sequence(&comp, &everything).unwrap();
        prop_assert!(single.is_singular());
        prop_assert!(sequence_cost(&comp, &single).unwrap() <= sequence_cost(&comp, &everything).unwrap());
        prop_assert_eq!(transform_sequence(&comp, &single).unwrap(), single);
    }
}
