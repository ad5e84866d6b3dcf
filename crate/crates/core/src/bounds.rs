//! Dense-circle capacity bounds and the empirical checks built on them.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dense_arc, dense_circle_capacity, dense_circle_positions, Vec2, WorldConfig, FLOOR_GUARD};
use crate::graph::{AgentSnapshot, ComponentView, HealthState, ObservationGraph};
use crate::wpc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseCircleSpec {
    pub radius: f64,
    pub count: usize,
    pub positions: Vec<Vec2>,
}

/// Most same-state agents one agent can observe: a dense ring on its outer
/// sensing circle.
pub fn max_connectivity_factor(cfg: &WorldConfig) -> Result<usize> {
    dense_circle_capacity(cfg.s_max, cfg.d_r)
}

/// Cap on the bareness of a weak point: half the ring.
pub fn weak_point_bound(cfg: &WorldConfig) -> Result<usize> {
    if cfg.s_max < cfg.d_r {
        return Err(Error::Domain(format!("s_max {} below d_r {}", cfg.s_max, cfg.d_r)));
    }
    Ok((PI / dense_arc(cfg.s_max, cfg.d_r) + FLOOR_GUARD).floor() as usize)
}

/// Angle of the sector hidden behind one body on a dense circle of `radius`,
/// and how many ring slots fit inside it.
pub fn concealed_sector(radius: f64, cfg: &WorldConfig) -> Result<(f64, usize)> {
    if !(radius > cfg.d_r) {
        return Err(Error::Domain(format!("radius {radius} must exceed d_r {}", cfg.d_r)));
    }
    let beta = 2.0 * (1.0 - cfg.d_r / radius).acos();
    let count = (beta / dense_arc(radius, cfg.d_r) + FLOOR_GUARD).floor() as usize;
    Ok((beta, count))
}

/// Fully packed circle of diameter `s_max`, centered at the origin.
pub fn odc(cfg: &WorldConfig) -> Result<DenseCircleSpec> {
    dense_circle(cfg.s_max / 2.0, None, cfg)
}

/// Dense circle of `radius` holding `count` agents (full capacity if `None`).
pub fn dense_circle(radius: f64, count: Option<usize>, cfg: &WorldConfig) -> Result<DenseCircleSpec> {
    let count = match count {
        Some(n) => n,
        None => dense_circle_capacity(radius, cfg.d_r)?,
    };
    let positions = dense_circle_positions(count, radius, Vec2::ZERO, cfg.d_r)?;
    Ok(DenseCircleSpec {
        radius,
        count,
        positions,
    })
}

impl DenseCircleSpec {
    pub fn agents(&self) -> Vec<AgentSnapshot> {
        self.positions
            .iter()
            .enumerate()
            .map(|(i, p)| AgentSnapshot {
                id: crate::graph::AgentId(i as u32 + 1),
                pos: *p,
                state: HealthState::Healthy,
            })
            .collect()
    }
}

/// Weak-point value of all agents of `world` taken as one member set, with
/// sampled bareness. The induced graph need not be connected.
pub fn world_wpc(world: &[AgentSnapshot], cfg: &WorldConfig) -> Result<i64> {
    let graph = ObservationGraph::build(world, cfg)?;
    let members: BTreeSet<_> = world.iter().map(|a| a.id).collect();
    let comp = ComponentView::induced(&graph, HealthState::Healthy, &members);
    wpc::wpc(&comp, world, cfg)
}

pub fn dense_circle_wpc(radius: f64, count: usize, cfg: &WorldConfig) -> Result<i64> {
    world_wpc(&dense_circle(radius, Some(count), cfg)?.agents(), cfg)
}

/// Largest ring of equally spaced agents on a circle of diameter `s_max`
/// in which every pair observes every other.
pub fn stable_clique_size(cfg: &WorldConfig) -> Result<usize> {
    let radius = cfg.s_max / 2.0;
    let mut best = 1;
    for n in 2..=dense_circle_capacity(radius, cfg.d_r)? {
        let agents: Vec<AgentSnapshot> = (0..n)
            .map(|k| {
                let p = Vec2::from_angle(2.0 * PI * k as f64 / n as f64) * radius;
                AgentSnapshot::new(k as u32 + 1, p.x, p.y, HealthState::Healthy)
            })
            .collect();
        let graph = ObservationGraph::build(&agents, cfg)?;
        if graph.edges().len() != n * (n - 1) / 2 {
            break;
        }
        best = n;
    }
    Ok(best)
}

/// Grows a connected healthy component of `n` agents around the origin by
/// dropping each new agent in the sensing band of a random earlier one.
pub fn random_connected_component<R: Rng>(n: usize, cfg: &WorldConfig, rng: &mut R) -> Result<Vec<AgentSnapshot>> {
    const ATTEMPTS: usize = 200;
    const PLACE_TRIES: usize = 1000;
    for _ in 0..ATTEMPTS {
        let mut pts = vec![Vec2::ZERO];
        let mut stuck = false;
        while pts.len() < n {
            let mut placed = false;
            for _ in 0..PLACE_TRIES {
                let anchor = pts[rng.random_range(0..pts.len())];
                let d = rng.random_range(cfg.s_min..cfg.s_max);
                let p = anchor + Vec2::from_angle(rng.random_range(0.0..2.0 * PI)) * d;
                if d > cfg.s_min && pts.iter().all(|q| (*q - p).norm() > 2.0 * cfg.d_r) {
                    pts.push(p);
                    placed = true;
                    break;
                }
            }
            if !placed {
                stuck = true;
                break;
            }
        }
        if stuck {
            continue;
        }
        let agents: Vec<AgentSnapshot> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| AgentSnapshot::new(i as u32 + 1, p.x, p.y, HealthState::Healthy))
            .collect();
        let graph = ObservationGraph::build(&agents, cfg)?;
        let members = agents.iter().map(|a| a.id).collect();
        if ComponentView::induced(&graph, HealthState::Healthy, &members).is_connected() {
            return Ok(agents);
        }
    }
    Err(Error::Placement(format!("no connected placement of {n} agents")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub s_min: f64,
    pub s_max: f64,
    pub d_r: f64,
    pub max_connectivity_factor: usize,
    pub weak_point_bound: usize,
    pub odc_radius: f64,
    pub odc_count: usize,
    pub concealed_sector_beta: f64,
    pub concealed_sector_count: usize,
    pub stable_clique_size: usize,
}

pub fn report(cfg: &WorldConfig) -> Result<BoundsReport> {
    let odc = odc(cfg)?;
    let (beta, hidden) = concealed_sector(odc.radius, cfg)?;
    Ok(BoundsReport {
        s_min: cfg.s_min,
        s_max: cfg.s_max,
        d_r: cfg.d_r,
        max_connectivity_factor: max_connectivity_factor(cfg)?,
        weak_point_bound: weak_point_bound(cfg)?,
        odc_radius: odc.radius,
        odc_count: odc.count,
        concealed_sector_beta: beta,
        concealed_sector_count: hidden,
        stable_clique_size: stable_clique_size(cfg)?,
    })
}
