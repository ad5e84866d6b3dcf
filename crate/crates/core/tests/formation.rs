use contam_core::geometry::distance;
use contam_core::sim::{Init, Schedule, World};
use contam_core::strategies::{strategy_by_name, CircleMode, FormationState};
use contam_core::{AgentId, AgentSnapshot, HealthState, Vec2, WorldConfig};

fn triangle_world(cfg: &WorldConfig, schedule: Option<Vec<u32>>) -> World {
    let h = 3.0 * 3f64.sqrt() / 2.0;
    let agents = vec![
        AgentSnapshot::new(1, 50.0, 50.0, HealthState::Healthy),
        AgentSnapshot::new(2, 53.0, 50.0, HealthState::Healthy),
        AgentSnapshot::new(3, 51.5, 50.0 + h, HealthState::Healthy),
    ];
    let s = strategy_by_name("circle", cfg).unwrap();
    let mut w = World::new(cfg.clone(), &Init::Explicit { agents }, s.clone(), s, 2).unwrap();
    if let Some(order) = schedule {
        w.set_schedule(Schedule::Fixed(order.into_iter().map(AgentId).collect()));
    }
    w
}

fn formations(w: &World) -> Vec<FormationState> {
    w.agents.iter().map(|a| a.memory.formation).collect()
}

fn allowed(from: FormationState, to: FormationState) -> bool {
    use FormationState::*;
    from == to || matches!((from, to), (Single, Converging) | (Converging, Circle) | (Circle, Converging))
}

#[test]
fn triangle_settles_into_a_circle() {
    let cfg = WorldConfig::default();
    for schedule in [Some(vec![1, 2, 3]), Some(vec![3, 1, 2]), None] {
        let mut w = triangle_world(&cfg, schedule);
        let mut last = formations(&w);
        let mut settled = None;
        for _ in 0..40 {
            w.step().unwrap();
            let now = formations(&w);
            for (a, b) in last.iter().zip(&now) {
                assert!(allowed(*a, *b), "{a:?} -> {b:?}");
            }
            last = now;
            if last.iter().all(|f| *f == FormationState::Circle) {
                settled = Some(w.step);
                break;
            }
        }
        assert!(settled.is_some(), "no circle after 40 steps");
        let m0 = w.agents[0].memory.membership.clone().unwrap();
        for a in &w.agents {
            let m = a.memory.membership.as_ref().unwrap();
            assert_eq!((m.circle, &m.members, m.center), (m0.circle, &m0.members, m0.center));
            let radius = distance(a.pos, m.center);
            assert!((radius - cfg.s_max / 2.0).abs() <= 2.0 * cfg.d_r, "radius {radius}");
        }
    }
}

#[test]
fn circle_moves_as_one() {
    let cfg = WorldConfig::default();
    let mut w = triangle_world(&cfg, Some(vec![1, 2, 3]));
    while formations(&w).iter().any(|f| *f != FormationState::Circle) || CircleMode::at(w.step) != CircleMode::Publicize {
        w.step().unwrap();
    }
    let mut moves = 0;
    for _ in 0..32 {
        let before: Vec<Vec2> = w.agents.iter().map(|a| a.pos).collect();
        let mode = CircleMode::at(w.step);
        w.step().unwrap();
        let shifts: Vec<Vec2> = w.agents.iter().zip(&before).map(|(a, b)| a.pos - *b).collect();
        if mode == CircleMode::Move && shifts[0].norm() > 0.0 {
            moves += 1;
            for s in &shifts {
                assert!((s.norm() - cfg.v_max).abs() < 1e-9, "{s:?}");
                assert!((*s - shifts[0]).norm() < 1e-9);
            }
        } else {
            assert!(shifts.iter().all(|s| s.norm() < 1e-9), "moved outside the move mode");
        }
        assert!(w.agents.iter().all(|a| a.memory.formation == FormationState::Circle));
    }
    assert_eq!(moves, 8);
}

#[test]
fn merged_circles_respect_threshold() {
    let cfg = WorldConfig::default();
    for name in ["clique", "circle"] {
        let s = strategy_by_name(name, &cfg).unwrap();
        let threshold = if name == "clique" { cfg.max_clique_size } else { 37 };
        let init = Init::Random {
            n_healthy: 60,
            n_contaminated: 10,
        };
        let small = WorldConfig {
            arena_width: 40.0,
            arena_height: 40.0,
            ..cfg.clone()
        };
        let mut w = World::new(small, &init, s.clone(), s, 21).unwrap();
        let mut largest = 0;
        for _ in 0..300 {
            w.step().unwrap();
            for a in &w.agents {
                if let Some(m) = &a.memory.membership {
                    assert!(m.members.len() <= threshold, "{name}: {} members", m.members.len());
                    assert!(m.members.contains(&a.id));
                    largest = largest.max(m.members.len());
                }
            }
        }
        assert!(largest >= 6, "{name}: largest circle {largest}");
    }
}
