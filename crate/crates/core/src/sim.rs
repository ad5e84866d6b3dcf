//! Synchronous game loop: majority update, scheduled look-compute-move with
//! immediate mailbox delivery, movement and termination.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, Vec2, WorldConfig};
use crate::graph::{AgentId, AgentSnapshot, HealthState, ObservationGraph};
use crate::spatial::SpatialIndex;
use crate::strategies::{AgentMemory, FormationState, Strategy};
use crate::wpc::IdSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CircleId {
    pub founder: AgentId,
    pub epoch: u64,
}

/// Public summary of a circle as carried in publications and exterior info.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleInfo {
    pub id: CircleId,
    pub members: IdSet,
    pub center: Vec2,
}

/// A merge of two circles (a lone agent counts as a circle of one) into a
/// new one. Both sides derive the same layout from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergePlan {
    pub from: CircleId,
    pub to: CircleId,
    pub from_size: usize,
    pub circle: CircleId,
    pub members: IdSet,
    pub center: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    ObservationShare {
        agents: Vec<AgentSnapshot>,
    },
    CircleProposal {
        circle: CircleId,
        members: IdSet,
    },
    CircleApproval {
        circle: CircleId,
    },
    CircleEstablishment {
        circle: CircleId,
        members: IdSet,
        center: Vec2,
        /// Slot of every member, by ascending id.
        targets: Vec<(AgentId, Vec2)>,
    },
    ConvergenceState {
        circle: CircleId,
        converged: IdSet,
    },
    CirclePublication(CircleInfo),
    ExteriorInfo {
        circles: Vec<CircleInfo>,
        proposals: Vec<MergePlan>,
    },
    MergeProposal(MergePlan),
    MergeApproval(MergePlan),
    RandomDirection {
        circle: CircleId,
        angle: f64,
        move_step: u64,
    },
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::ObservationShare { .. } => "observation_share",
            Payload::CircleProposal { .. } => "circle_proposal",
            Payload::CircleApproval { .. } => "circle_approval",
            Payload::CircleEstablishment { .. } => "circle_establishment",
            Payload::ConvergenceState { .. } => "convergence_state",
            Payload::CirclePublication(_) => "circle_publication",
            Payload::ExteriorInfo { .. } => "exterior_info",
            Payload::MergeProposal(_) => "merge_proposal",
            Payload::MergeApproval(_) => "merge_approval",
            Payload::RandomDirection { .. } => "random_direction",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub sender: AgentId,
    /// Step in which the message was sent; stamped by the engine.
    pub step: u64,
    pub recipients: IdSet,
    pub payload: Payload,
}

/// Another agent as perceived this step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seen {
    pub id: AgentId,
    pub pos: Vec2,
    pub state: HealthState,
    pub formation: FormationState,
}

/// Everything a strategy may know about the world in one cycle.
#[derive(Debug, Clone)]
pub struct Observation {
    pub id: AgentId,
    pub pos: Vec2,
    pub state: HealthState,
    pub step: u64,
    /// Agents inside the observation area, self excluded.
    pub visible: Vec<Seen>,
    /// Agents closer than `s_min`, sensed by proximity only.
    pub nearby: Vec<Seen>,
    pub cfg: WorldConfig,
}

impl Observation {
    pub fn sees(&self, id: AgentId) -> bool {
        self.visible.iter().any(|s| s.id == id)
    }

    pub fn seen(&self, id: AgentId) -> Option<&Seen> {
        self.visible.iter().find(|s| s.id == id)
    }

    /// Visible agents sharing this agent's health state.
    pub fn allies(&self) -> impl Iterator<Item = &Seen> + '_ {
        self.visible.iter().filter(move |s| s.state == self.state)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Decision {
    pub movement: Vec2,
    pub outgoing: Vec<Message>,
}

impl Decision {
    pub fn stay() -> Self {
        Self::default()
    }

    pub fn moving(movement: Vec2) -> Self {
        Self {
            movement,
            outgoing: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Agent {
    pub id: AgentId,
    pub pos: Vec2,
    pub state: HealthState,
    pub memory: AgentMemory,
}

impl Agent {
    pub fn snapshot(&self) -> AgentSnapshot {
        AgentSnapshot {
            id: self.id,
            pos: self.pos,
            state: self.state,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    AllHealthy,
    AllContaminated,
    TimeBound,
    Stagnation,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::AllHealthy => "all_healthy",
            Termination::AllContaminated => "all_contaminated",
            Termination::TimeBound => "time_bound",
            Termination::Stagnation => "stagnation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    pub termination: Termination,
    pub steps: u64,
    /// (healthy, contaminated) after each step.
    pub history: Vec<(usize, usize)>,
    pub final_healthy: usize,
    pub final_contaminated: usize,
    pub final_healthy_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryAgent {
    pub id: AgentId,
    pub x: f64,
    pub y: f64,
    pub state: HealthState,
    pub formation: FormationState,
}

/// One line of a trajectory dump: the world after `step` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub healthy: usize,
    pub contaminated: usize,
    pub messages: usize,
    pub agents: Vec<TrajectoryAgent>,
}

/// Initial population of a game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Init {
    Explicit { agents: Vec<AgentSnapshot> },
    Random { n_healthy: usize, n_contaminated: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Random,
    /// Fixed acting order; any agent not listed acts afterwards by id.
    Fixed(Vec<AgentId>),
}

/// Majority rule over each agent's observed set, self included; ties keep
/// an agent healthy.
pub fn majority_update(graph: &ObservationGraph, states: &[HealthState]) -> Vec<HealthState> {
    (0..states.len())
        .map(|i| {
            let mut healthy = usize::from(states[i] == HealthState::Healthy);
            let mut contaminated = 1 - healthy;
            for &j in graph.neighbor_indices(i) {
                match states[j] {
                    HealthState::Healthy => healthy += 1,
                    HealthState::Contaminated => contaminated += 1,
                }
            }
            if contaminated > healthy {
                HealthState::Contaminated
            } else {
                HealthState::Healthy
            }
        })
        .collect()
}

pub struct World {
    pub cfg: WorldConfig,
    pub agents: Vec<Agent>,
    pub step: u64,
    rng: ChaCha8Rng,
    mailboxes: Vec<Vec<Message>>,
    index: HashMap<AgentId, usize>,
    healthy: Arc<dyn Strategy>,
    contaminated: Arc<dyn Strategy>,
    schedule: Schedule,
    record_messages: bool,
    last_messages: Vec<Message>,
    last_message_count: usize,
}

impl World {
    pub fn new(
        cfg: WorldConfig,
        init: &Init,
        healthy: Arc<dyn Strategy>,
        contaminated: Arc<dyn Strategy>,
        seed: u64,
    ) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let snapshots = match init {
            Init::Explicit { agents } => {
                // reuse the graph builder for id and overlap validation
                ObservationGraph::build(agents, &cfg)?;
                for a in agents {
                    if !in_arena(a.pos, &cfg) {
                        return Err(Error::Domain(format!("{} lies outside the arena", a.id)));
                    }
                }
                agents.clone()
            }
            Init::Random {
                n_healthy,
                n_contaminated,
            } => random_placement(*n_healthy, *n_contaminated, &cfg, &mut rng)?,
        };
        let agents: Vec<Agent> = snapshots
            .iter()
            .map(|s| Agent {
                id: s.id,
                pos: s.pos,
                state: s.state,
                memory: AgentMemory::default(),
            })
            .collect();
        let index = agents.iter().enumerate().map(|(i, a)| (a.id, i)).collect();
        Ok(Self {
            mailboxes: vec![Vec::new(); agents.len()],
            cfg,
            agents,
            step: 0,
            rng,
            index,
            healthy,
            contaminated,
            schedule: Schedule::Random,
            record_messages: false,
            last_messages: Vec::new(),
            last_message_count: 0,
        })
    }

    pub fn set_schedule(&mut self, schedule: Schedule) {
        self.schedule = schedule;
    }

    /// Keep a copy of every message sent during the latest step.
    pub fn record_messages(&mut self, on: bool) {
        self.record_messages = on;
    }

    pub fn last_messages(&self) -> &[Message] {
        &self.last_messages
    }

    pub fn agent(&self, id: AgentId) -> Option<&Agent> {
        self.index.get(&id).map(|&i| &self.agents[i])
    }

    pub fn snapshots(&self) -> Vec<AgentSnapshot> {
        self.agents.iter().map(Agent::snapshot).collect()
    }

    pub fn counts(&self) -> (usize, usize) {
        let healthy = self
            .agents
            .iter()
            .filter(|a| a.state == HealthState::Healthy)
            .count();
        (healthy, self.agents.len() - healthy)
    }

    pub fn record(&self) -> StepRecord {
        let (healthy, contaminated) = self.counts();
        StepRecord {
            step: self.step,
            healthy,
            contaminated,
            messages: self.last_message_count,
            agents: self
                .agents
                .iter()
                .map(|a| TrajectoryAgent {
                    id: a.id,
                    x: a.pos.x,
                    y: a.pos.y,
                    state: a.state,
                    formation: a.memory.formation,
                })
                .collect(),
        }
    }

    fn order(&mut self) -> Vec<usize> {
        let n = self.agents.len();
        match &self.schedule {
            Schedule::Random => {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut self.rng);
                order
            }
            Schedule::Fixed(ids) => {
                let mut order: Vec<usize> = ids.iter().filter_map(|id| self.index.get(id).copied()).collect();
                let mut rest: Vec<usize> = (0..n).filter(|i| !order.contains(i)).collect();
                rest.sort_by_key(|&i| self.agents[i].id);
                order.extend(rest);
                order
            }
        }
    }

    pub fn step(&mut self) -> Result<()> {
        let n = self.agents.len();
        let ids: Vec<AgentId> = self.agents.iter().map(|a| a.id).collect();
        let positions: Vec<Vec2> = self.agents.iter().map(|a| a.pos).collect();
        let graph = ObservationGraph::from_positions(ids, &positions, &self.cfg);

        let before: Vec<HealthState> = self.agents.iter().map(|a| a.state).collect();
        let after = majority_update(&graph, &before);
        for (i, agent) in self.agents.iter_mut().enumerate() {
            if after[i] != before[i] {
                agent.state = after[i];
                agent.memory = AgentMemory::default();
                self.mailboxes[i].clear();
            }
        }
        let formations: Vec<FormationState> = self.agents.iter().map(|a| a.memory.formation).collect();
        let seen: Vec<Seen> = (0..n)
            .map(|j| Seen {
                id: self.agents[j].id,
                pos: positions[j],
                state: after[j],
                formation: formations[j],
            })
            .collect();
        let grid = SpatialIndex::new(&positions, self.cfg.s_max);

        let order = self.order();
        let mut moves = vec![Vec2::ZERO; n];
        self.last_messages.clear();
        self.last_message_count = 0;
        for i in order {
            let visible: Vec<Seen> = graph.neighbor_indices(i).iter().map(|&j| seen[j]).collect();
            let nearby: Vec<Seen> = grid
                .within(positions[i], self.cfg.s_min)
                .into_iter()
                .filter(|&j| j != i)
                .map(|j| seen[j])
                .collect();
            let obs = Observation {
                id: self.agents[i].id,
                pos: positions[i],
                state: after[i],
                step: self.step,
                visible,
                nearby,
                cfg: self.cfg.clone(),
            };
            let inbox = std::mem::take(&mut self.mailboxes[i]);
            let strategy = match after[i] {
                HealthState::Healthy => Arc::clone(&self.healthy),
                HealthState::Contaminated => Arc::clone(&self.contaminated),
            };
            let decision = strategy.decide(&obs, inbox, &mut self.agents[i].memory, &mut self.rng)?;
            if !decision.movement.is_finite() {
                return Err(Error::Protocol(format!("{} produced a non-finite move", obs.id)));
            }
            moves[i] = decision.movement;
            for mut msg in decision.outgoing {
                msg.step = self.step;
                if msg.sender != obs.id {
                    return Err(Error::Protocol(format!("{} sent as {}", obs.id, msg.sender)));
                }
                if let Some(r) = msg.recipients.iter().find(|r| !obs.sees(**r)) {
                    return Err(Error::Protocol(format!("{} messaged unobserved {r}", obs.id)));
                }
                for r in &msg.recipients {
                    self.mailboxes[self.index[r]].push(msg.clone());
                }
                self.last_message_count += 1;
                if self.record_messages {
                    self.last_messages.push(msg);
                }
            }
        }
        self.apply_moves(&positions, &moves);
        self.step += 1;
        Ok(())
    }

    /// Applies all moves at once. Moves that would leave two bodies closer
    /// than `d_r` are undone, repeatedly, until the layout is valid.
    fn apply_moves(&mut self, old: &[Vec2], moves: &[Vec2]) {
        let cfg = &self.cfg;
        let mut new: Vec<Vec2> = old
            .iter()
            .zip(moves)
            .map(|(p, m)| clamp_to_arena(*p + m.clamp_length(cfg.v_max), cfg))
            .collect();
        loop {
            let grid = SpatialIndex::new(&new, cfg.d_r.max(cfg.v_max));
            let mut revert = Vec::new();
            for i in 0..new.len() {
                for j in grid.within(new[i], cfg.d_r) {
                    if j > i {
                        if new[i] != old[i] {
                            revert.push(i);
                        }
                        if new[j] != old[j] {
                            revert.push(j);
                        }
                    }
                }
            }
            if revert.is_empty() {
                break;
            }
            for i in revert {
                new[i] = old[i];
            }
        }
        for (agent, p) in self.agents.iter_mut().zip(new) {
            agent.pos = p;
        }
    }

    /// Steps until a termination condition holds.
    pub fn run(&mut self, mut on_step: impl FnMut(&World) -> Result<()>) -> Result<GameResult> {
        let total = self.agents.len();
        let mut history: Vec<(usize, usize)> = Vec::new();
        let window = self.cfg.stagnation_window as usize;
        let termination = loop {
            self.step()?;
            let counts = self.counts();
            history.push(counts);
            on_step(self)?;
            if counts.1 == 0 {
                break Termination::AllHealthy;
            }
            if counts.0 == 0 {
                break Termination::AllContaminated;
            }
            if history.len() >= window && history[history.len() - window..].iter().all(|c| *c == counts) {
                break Termination::Stagnation;
            }
            if self.step >= self.cfg.t_max {
                break Termination::TimeBound;
            }
        };
        let (h, c) = *history.last().expect("at least one step");
        Ok(GameResult {
            termination,
            steps: self.step,
            history,
            final_healthy: h,
            final_contaminated: c,
            final_healthy_pct: if total == 0 { 0.0 } else { 100.0 * h as f64 / total as f64 },
        })
    }
}

fn in_arena(p: Vec2, cfg: &WorldConfig) -> bool {
    (0.0..=cfg.arena_width).contains(&p.x) && (0.0..=cfg.arena_height).contains(&p.y)
}

fn clamp_to_arena(p: Vec2, cfg: &WorldConfig) -> Vec2 {
    Vec2::new(p.x.clamp(0.0, cfg.arena_width), p.y.clamp(0.0, cfg.arena_height))
}

/// Uniform rejection sampling with pairwise spacing at least `2 * d_r`.
/// Healthy agents get ids `1..=n_healthy`, contaminated ones follow.
pub fn random_placement<R: Rng + ?Sized>(
    n_healthy: usize,
    n_contaminated: usize,
    cfg: &WorldConfig,
    rng: &mut R,
) -> Result<Vec<AgentSnapshot>> {
    let n = n_healthy + n_contaminated;
    let spacing = 2.0 * cfg.d_r;
    let budget = 1000 * n.max(1);
    let mut placed: Vec<Vec2> = Vec::with_capacity(n);
    let mut tries = 0;
    while placed.len() < n {
        if tries == budget {
            return Err(Error::Placement(format!(
                "placed {} of {n} agents after {budget} draws",
                placed.len()
            )));
        }
        tries += 1;
        let p = Vec2::new(
            rng.random_range(0.0..cfg.arena_width),
            rng.random_range(0.0..cfg.arena_height),
        );
        if placed.iter().all(|q| distance(*q, p) >= spacing) {
            placed.push(p);
        }
    }
    Ok(placed
        .into_iter()
        .enumerate()
        .map(|(i, pos)| AgentSnapshot {
            id: AgentId(i as u32 + 1),
            pos,
            state: if i < n_healthy {
                HealthState::Healthy
            } else {
                HealthState::Contaminated
            },
        })
        .collect())
}

/// Plays one game to termination.
pub fn run_game(
    cfg: &WorldConfig,
    healthy: Arc<dyn Strategy>,
    contaminated: Arc<dyn Strategy>,
    init: &Init,
    seed: u64,
) -> Result<GameResult> {
    World::new(cfg.clone(), init, healthy, contaminated, seed)?.run(|_| Ok(()))
}

/// Same as [`run_game`], also returning the per-step records.
pub fn run_game_traced(
    cfg: &WorldConfig,
    healthy: Arc<dyn Strategy>,
    contaminated: Arc<dyn Strategy>,
    init: &Init,
    seed: u64,
) -> Result<(GameResult, Vec<StepRecord>)> {
    let mut world = World::new(cfg.clone(), init, healthy, contaminated, seed)?;
    let mut records = vec![world.record()];
    let result = world.run(|w| {
        records.push(w.record());
        Ok(())
    })?;
    Ok((result, records))
}

/// Convenience for strategies: a message to the given recipients.
pub fn message(sender: AgentId, recipients: impl IntoIterator<Item = AgentId>, payload: Payload) -> Message {
    Message {
        sender,
        step: 0,
        recipients: recipients.into_iter().collect(),
        payload,
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::{strategy_by_name, RandomWalk};
    use rand::RngCore;

    struct Still;

    impl Strategy for Still {
        fn name(&self) -> &'static str {
            "still"
        }

        fn decide(&self, _: &Observation, _: Vec<Message>, _: &mut AgentMemory, _: &mut dyn RngCore) -> Result<Decision> {
            Ok(Decision::stay())
        }
    }

    /// Tries to message an agent it cannot see.
    struct Snoop;

    impl Strategy for Snoop {
        fn name(&self) -> &'static str {
            "snoop"
        }

        fn decide(&self, obs: &Observation, _: Vec<Message>, _: &mut AgentMemory, _: &mut dyn RngCore) -> Result<Decision> {
            for s in &obs.visible {
                let d = distance(obs.pos, s.pos);
                assert!(d > obs.cfg.s_min && d <= obs.cfg.s_max + obs.cfg.eps);
            }
            Ok(Decision {
                movement: Vec2::ZERO,
                outgoing: vec![message(obs.id, [AgentId(999)], Payload::CircleApproval {
                    circle: CircleId {
                        founder: obs.id,
                        epoch: 0,
                    },
                })],
            })
        }
    }

    fn snap(id: u32, x: f64, y: f64, h: bool) -> AgentSnapshot {
        let state = if h { HealthState::Healthy } else { HealthState::Contaminated };
        AgentSnapshot::new(id, x, y, state)
    }

    fn update(agents: &[AgentSnapshot]) -> Vec<HealthState> {
        let cfg = WorldConfig::default();
        let graph = ObservationGraph::build(agents, &cfg).unwrap();
        majority_update(&graph, &agents.iter().map(|a| a.state).collect::<Vec<_>>())
    }

    #[test]
    fn majority_examples() {
        use HealthState::*;
        assert_eq!(update(&[snap(1, 10.0, 10.0, false)]), vec![Contaminated]);
        assert_eq!(update(&[snap(1, 10.0, 10.0, true), snap(2, 13.0, 10.0, false)]), vec![Healthy, Healthy]);
        let out = update(&[snap(1, 10.0, 10.0, true), snap(2, 13.0, 10.0, false), snap(3, 10.0, 13.0, false)]);
        assert_eq!(out[0], Contaminated);
        // too close to be observed: no influence
        assert_eq!(update(&[snap(1, 10.0, 10.0, true), snap(2, 11.0, 10.0, false)]), vec![Healthy, Contaminated]);
    }

    fn world(agents: Vec<AgentSnapshot>, cfg: WorldConfig, s: Arc<dyn Strategy>) -> World {
        World::new(cfg, &Init::Explicit { agents }, s.clone(), s, 1).unwrap()
    }

    #[test]
    fn all_healthy_ends_at_first_step() {
        let mut w = world(vec![snap(1, 10.0, 10.0, true), snap(2, 13.0, 10.0, true)], WorldConfig::default(), Arc::new(Still));
        let res = w.run(|_| Ok(())).unwrap();
        assert_eq!((res.termination, res.steps), (Termination::AllHealthy, 1));
        assert_eq!(res.final_healthy_pct, 100.0);
    }

    #[test]
    fn stagnation_at_window() {
        let cfg = WorldConfig::default();
        let mut w = world(vec![snap(1, 10.0, 10.0, true), snap(2, 50.0, 50.0, false)], cfg.clone(), Arc::new(Still));
        let res = w.run(|_| Ok(())).unwrap();
        assert_eq!(res.termination, Termination::Stagnation);
        assert_eq!(res.steps, cfg.stagnation_window);
        assert_eq!(res.history.len() as u64, res.steps);
    }

    #[test]
    fn time_bound() {
        let cfg = WorldConfig {
            t_max: 5,
            ..WorldConfig::default()
        };
        let mut w = world(vec![snap(1, 10.0, 10.0, true), snap(2, 50.0, 50.0, false)], cfg, Arc::new(Still));
        let res = w.run(|_| Ok(())).unwrap();
        assert_eq!((res.termination, res.steps), (Termination::TimeBound, 5));
    }

    #[test]
    fn unobserved_recipient_is_rejected() {
        let mut w = world(vec![snap(1, 10.0, 10.0, true), snap(2, 13.0, 10.0, true)], WorldConfig::default(), Arc::new(Snoop));
        assert!(matches!(w.step(), Err(Error::Protocol(_))));
    }

    #[test]
    fn explicit_init_is_validated() {
        let s: Arc<dyn Strategy> = Arc::new(Still);
        let cfg = WorldConfig::default();
        let overlap = Init::Explicit {
            agents: vec![snap(1, 10.0, 10.0, true), snap(2, 10.1, 10.0, true)],
        };
        assert!(matches!(World::new(cfg.clone(), &overlap, s.clone(), s.clone(), 0), Err(Error::Overlap { .. })));
        let outside = Init::Explicit {
            agents: vec![snap(1, -1.0, 10.0, true)],
        };
        assert!(matches!(World::new(cfg, &outside, s.clone(), s, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn placement_spacing_and_ids() {
        let cfg = WorldConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let agents = random_placement(30, 20, &cfg, &mut rng).unwrap();
        assert_eq!(agents.iter().filter(|a| a.state == HealthState::Healthy).count(), 30);
        assert_eq!(agents[0].id, AgentId(1));
        for (i, a) in agents.iter().enumerate() {
            for b in &agents[i + 1..] {
                assert!(distance(a.pos, b.pos) >= 2.0 * cfg.d_r);
            }
        }
        let tiny = WorldConfig {
            arena_width: 1.0,
            arena_height: 1.0,
            ..cfg
        };
        assert!(matches!(random_placement(20, 20, &tiny, &mut rng), Err(Error::Placement(_))));
    }

    #[test]
    fn deterministic_and_conserving() {
        let cfg = WorldConfig::default();
        let init = Init::Random {
            n_healthy: 12,
            n_contaminated: 12,
        };
        let play = || {
            run_game_traced(
                &cfg,
                strategy_by_name("circle", &cfg).unwrap(),
                strategy_by_name("potential", &cfg).unwrap(),
                &init,
                3,
            )
            .unwrap()
        };
        let (a, ra) = play();
        let (b, rb) = play();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
        assert_eq!(ra.len() as u64, a.steps + 1);
        for w in ra.windows(2) {
            assert_eq!(w[1].healthy + w[1].contaminated, 24);
            for (p, q) in w[0].agents.iter().zip(&w[1].agents) {
                let d = Vec2::new(q.x - p.x, q.y - p.y).norm();
                assert!(d <= cfg.v_max + cfg.eps, "step {} moved {d}", w[1].step);
            }
        }
    }

    #[test]
    fn bodies_never_overlap() {
        let cfg = WorldConfig {
            arena_width: 20.0,
            arena_height: 20.0,
            t_max: 150,
            ..WorldConfig::default()
        };
        let init = Init::Random {
            n_healthy: 20,
            n_contaminated: 20,
        };
        let s: Arc<dyn Strategy> = Arc::new(RandomWalk);
        let (_, records) = run_game_traced(&cfg, s.clone(), s, &init, 9).unwrap();
        for r in &records {
            let pts: Vec<AgentSnapshot> = r.agents.iter().map(|a| AgentSnapshot::new(a.id.0, a.x, a.y, a.state)).collect();
            ObservationGraph::build(&pts, &cfg).unwrap();
        }
    }
}
