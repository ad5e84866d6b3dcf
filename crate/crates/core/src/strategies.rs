//! Decision rules run by each agent in its compute phase.
//!
//! The formation strategy gathers same-state agents into uniform circles of
//! diameter `s_max` and then merges neighboring circles up to a size
//! threshold. Every agent moves through three formation states; circle
//! members cycle through four message modes in lockstep with the global
//! step counter.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::geometry::{Vec2, WorldConfig};
use crate::graph::{AgentId, AgentSnapshot};
use crate::sim::{message, CircleId, CircleInfo, Decision, MergePlan, Message, Observation, Payload, Seen};
use crate::wpc::IdSet;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormationState {
    #[default]
    Single,
    Converging,
    Circle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircleMode {
    Publicize,
    Discovery,
    Coordinate,
    Move,
}

impl CircleMode {
    /// Mode of every circle during global step `step`.
    pub fn at(step: u64) -> Self {
        match step % 4 {
            0 => CircleMode::Publicize,
            1 => CircleMode::Discovery,
            2 => CircleMode::Coordinate,
            _ => CircleMode::Move,
        }
    }
}

pub trait Strategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn decide(
        &self,
        obs: &Observation,
        inbox: Vec<Message>,
        memory: &mut AgentMemory,
        rng: &mut dyn RngCore,
    ) -> Result<Decision>;
}

/// The circle an agent belongs to or is converging on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub circle: CircleId,
    pub members: IdSet,
    pub center: Vec2,
    pub target: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
struct Pending {
    circle: CircleId,
    members: IdSet,
    approvals: IdSet,
    sent: u64,
}

#[derive(Debug, Clone, PartialEq)]
struct SavedProposal {
    sender: Option<AgentId>,
    plan: MergePlan,
    received: u64,
}

/// Per-agent memory. Only the owning agent's strategy reads or writes it;
/// the engine reads `formation` to expose it to observers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AgentMemory {
    pub formation: FormationState,
    pub membership: Option<Membership>,
    shares: BTreeMap<AgentId, (u64, IdSet)>,
    last_share: Option<IdSet>,
    approved: Option<(CircleId, u64)>,
    proposal: Option<Pending>,
    circles: BTreeMap<CircleId, (u64, CircleInfo)>,
    join: Option<(CircleId, u64)>,
    converged: IdSet,
    since: u64,
    proposals: BTreeMap<CircleId, SavedProposal>,
    proposed_to: Option<CircleId>,
    direction: Option<(u64, f64)>,
}

/// Steps a converging agent waits for its circle before giving up.
pub const CONVERGENCE_PATIENCE: u64 = 96;
/// Steps a single waits on a proposal it approved or a join it sent.
const SINGLE_PATIENCE: u64 = 4;
/// Age after which circle knowledge is dropped.
const CIRCLE_INFO_TTL: u64 = 8;

/// Equally spaced slots by ascending id, starting at angle zero.
pub fn circle_layout(members: &IdSet, center: Vec2, radius: f64) -> BTreeMap<AgentId, Vec2> {
    let n = members.len().max(1) as f64;
    members
        .iter()
        .enumerate()
        .map(|(k, &id)| (id, center + Vec2::from_angle(2.0 * PI * k as f64 / n) * radius))
        .collect()
}

fn solo_circle(id: AgentId) -> CircleId {
    CircleId {
        founder: id,
        epoch: u64::MAX,
    }
}

/// Keeps a circle of `radius` fully inside the arena.
fn clamp_center(c: Vec2, radius: f64, cfg: &WorldConfig) -> Vec2 {
    let mx = (radius + cfg.d_r).min(cfg.arena_width / 2.0);
    let my = (radius + cfg.d_r).min(cfg.arena_height / 2.0);
    Vec2::new(
        c.x.clamp(mx, cfg.arena_width - mx),
        c.y.clamp(my, cfg.arena_height - my),
    )
}

fn random_unit(rng: &mut dyn RngCore) -> Vec2 {
    Vec2::from_angle(rng.random_range(0.0..2.0 * PI))
}

/// Largest clique containing `me`, searched over `candidates` (all assumed
/// adjacent to `me`). Ties go to the lexicographically smallest id set.
pub fn max_clique(me: AgentId, candidates: &IdSet, adjacent: impl Fn(AgentId, AgentId) -> bool) -> IdSet {
    fn grow(
        chosen: &mut Vec<AgentId>,
        rest: &[AgentId],
        adjacent: &dyn Fn(AgentId, AgentId) -> bool,
        best: &mut Vec<AgentId>,
    ) {
        if chosen.len() > best.len() {
            *best = chosen.clone();
        }
        for (k, &v) in rest.iter().enumerate() {
            if chosen.len() + rest.len() - k <= best.len() {
                return;
            }
            if chosen.iter().all(|&u| adjacent(u, v)) {
                chosen.push(v);
                grow(chosen, &rest[k + 1..], adjacent, best);
                chosen.pop();
            }
        }
    }
    let rest: Vec<AgentId> = candidates.iter().copied().filter(|&c| c != me).collect();
    let mut best = Vec::new();
    grow(&mut Vec::new(), &rest, &adjacent, &mut best);
    best.into_iter().chain(std::iter::once(me)).collect()
}

/// Circle-forming strategy; `threshold` caps the size of any merged circle.
#[derive(Debug, Clone)]
pub struct Formation {
    pub name: &'static str,
    pub threshold: usize,
}

impl Formation {
    pub fn circle_variant(cfg: &WorldConfig) -> Result<Self> {
        Ok(Self {
            name: "circle",
            threshold: bounds::odc(cfg)?.count,
        })
    }

    pub fn clique_variant(cfg: &WorldConfig) -> Self {
        Self {
            name: "clique",
            threshold: cfg.max_clique_size,
        }
    }

    fn converge_on(&self, obs: &Observation, mem: &mut AgentMemory, circle: CircleId, members: IdSet, center: Vec2) -> Result<Vec2> {
        let radius = obs.cfg.s_max / 2.0;
        let center = clamp_center(center, radius, &obs.cfg);
        let target = *circle_layout(&members, center, radius)
            .get(&obs.id)
            .ok_or_else(|| Error::Memory(format!("{} missing from its own circle", obs.id)))?;
        *mem = AgentMemory {
            formation: FormationState::Converging,
            membership: Some(Membership {
                circle,
                members,
                center,
                target,
            }),
            since: obs.step,
            ..AgentMemory::default()
        };
        Ok(target - obs.pos)
    }

    fn single(&self, obs: &Observation, inbox: Vec<Message>, mem: &mut AgentMemory, rng: &mut dyn RngCore) -> Result<Decision> {
        let me = obs.id;
        let step = obs.step;
        let mut best: Option<(AgentId, CircleId, IdSet)> = None;
        for m in inbox {
            match m.payload {
                Payload::ObservationShare { agents } => {
                    let ids = agents.iter().map(|a| a.id).collect();
                    mem.shares.insert(m.sender, (m.step, ids));
                }
                Payload::CircleProposal { circle, members } if members.contains(&me) => {
                    let better = match &best {
                        None => true,
                        Some((_, c, b)) => members.len() > b.len() || (members.len() == b.len() && circle < *c),
                    };
                    if better {
                        best = Some((m.sender, circle, members));
                    }
                }
                Payload::CircleApproval { circle } => {
                    if let Some(p) = mem.proposal.as_mut().filter(|p| p.circle == circle) {
                        p.approvals.insert(m.sender);
                    }
                }
                Payload::CircleEstablishment {
                    circle, members, center, ..
                } if members.contains(&me) => {
                    let mv = self.converge_on(obs, mem, circle, members, center)?;
                    return Ok(Decision::moving(mv));
                }
                Payload::MergeApproval(plan) if plan.from == solo_circle(me) && plan.members.contains(&me) => {
                    let mv = self.converge_on(obs, mem, plan.circle, plan.members, plan.center)?;
                    return Ok(Decision::moving(mv));
                }
                Payload::CirclePublication(info) => {
                    mem.circles.insert(info.id, (step, info));
                }
                _ => {}
            }
        }
        mem.circles.retain(|_, (t, _)| step - *t <= CIRCLE_INFO_TTL);

        let singles: Vec<&Seen> = obs
            .allies()
            .filter(|s| s.formation == FormationState::Single)
            .collect();
        let single_ids: IdSet = singles.iter().map(|s| s.id).collect();
        mem.shares.retain(|id, _| single_ids.contains(id));
        let mut out = Vec::new();
        if !single_ids.is_empty() && mem.last_share.as_ref() != Some(&single_ids) {
            let agents: Vec<AgentSnapshot> = singles
                .iter()
                .map(|s| AgentSnapshot {
                    id: s.id,
                    pos: s.pos,
                    state: s.state,
                })
                .collect();
            out.push(message(me, single_ids.iter().copied(), Payload::ObservationShare { agents }));
        }
        mem.last_share = Some(single_ids.clone());

        // only shares from earlier steps describe a neighbor's settled view
        let usable: BTreeMap<AgentId, &IdSet> = mem
            .shares
            .iter()
            .filter(|(_, (t, _))| *t < step)
            .map(|(id, (_, set))| (*id, set))
            .collect();
        let candidates: IdSet = usable.keys().copied().collect();
        let clique = max_clique(me, &candidates, |a, b| {
            usable.get(&a).is_some_and(|s| s.contains(&b)) || usable.get(&b).is_some_and(|s| s.contains(&a))
        });

        // a better proposal from someone else overrides our own pending one
        let outranks = |size: usize, circle: CircleId, p: &Pending| {
            size > p.members.len() || (size == p.members.len() && circle < p.circle)
        };
        if let (Some((_, circle, members)), Some(p)) = (&best, &mem.proposal) {
            if outranks(members.len(), *circle, p) {
                mem.proposal = None;
            }
        }

        if let Some(p) = mem.proposal.clone() {
            let others: IdSet = p.members.iter().copied().filter(|&id| id != me).collect();
            if others.is_subset(&p.approvals) && others.iter().all(|id| obs.sees(*id)) {
                let positions: Vec<Vec2> = p
                    .members
                    .iter()
                    .map(|id| if *id == me { obs.pos } else { obs.seen(*id).expect("visible").pos })
                    .collect();
                let center = positions.iter().fold(Vec2::ZERO, |a, b| a + *b) * (1.0 / positions.len() as f64);
                let radius = obs.cfg.s_max / 2.0;
                let center = clamp_center(center, radius, &obs.cfg);
                let targets = circle_layout(&p.members, center, radius).into_iter().collect();
                out.push(message(
                    me,
                    others,
                    Payload::CircleEstablishment {
                        circle: p.circle,
                        members: p.members.clone(),
                        center,
                        targets,
                    },
                ));
                let mv = self.converge_on(obs, mem, p.circle, p.members, center)?;
                return Ok(Decision {
                    movement: mv,
                    outgoing: out,
                });
            }
            if step < p.sent + 2 {
                return Ok(Decision {
                    movement: Vec2::ZERO,
                    outgoing: out,
                });
            }
            mem.proposal = None;
            let approvers: IdSet = p.approvals.iter().copied().filter(|id| obs.sees(*id)).collect();
            if !approvers.is_empty() {
                let members: IdSet = approvers.iter().copied().chain([me]).collect();
                let circle = CircleId { founder: me, epoch: step };
                out.push(message(me, approvers, Payload::CircleProposal { circle, members: members.clone() }));
                mem.proposal = Some(Pending {
                    circle,
                    members,
                    approvals: IdSet::new(),
                    sent: step,
                });
                return Ok(Decision {
                    movement: Vec2::ZERO,
                    outgoing: out,
                });
            }
        }

        if let Some((sender, circle, members)) = best {
            if members.len() >= clique.len() && members.len() > 1 && obs.sees(sender) {
                out.push(message(me, [sender], Payload::CircleApproval { circle }));
                mem.approved = Some((circle, step));
                return Ok(Decision {
                    movement: Vec2::ZERO,
                    outgoing: out,
                });
            }
        }
        let waiting = mem.approved.is_some_and(|(_, t)| step < t + SINGLE_PATIENCE)
            || mem.join.is_some_and(|(_, t)| step < t + SINGLE_PATIENCE);
        if waiting {
            return Ok(Decision {
                movement: Vec2::ZERO,
                outgoing: out,
            });
        }
        mem.approved = None;
        mem.join = None;

        if clique.len() > 1 {
            let circle = CircleId { founder: me, epoch: step };
            let others: IdSet = clique.iter().copied().filter(|&id| id != me).collect();
            out.push(message(me, others, Payload::CircleProposal { circle, members: clique.clone() }));
            mem.proposal = Some(Pending {
                circle,
                members: clique,
                approvals: IdSet::new(),
                sent: step,
            });
            return Ok(Decision {
                movement: Vec2::ZERO,
                outgoing: out,
            });
        }

        let nearest_circle = obs
            .allies()
            .filter(|s| s.formation == FormationState::Circle)
            .min_by(|a, b| {
                (a.pos - obs.pos)
                    .norm_sq()
                    .total_cmp(&(b.pos - obs.pos).norm_sq())
                    .then(a.id.cmp(&b.id))
            });
        if let Some(target) = nearest_circle {
            let known = mem.circles.values().map(|(_, i)| i).find(|i| i.members.contains(&target.id));
            if let Some(info) = known.filter(|i| i.members.len() < self.threshold) {
                let members: IdSet = info.members.iter().copied().chain([me]).collect();
                let n = info.members.len() as f64;
                let plan = MergePlan {
                    from: solo_circle(me),
                    to: info.id,
                    from_size: 1,
                    circle: CircleId {
                        founder: *members.iter().next().expect("non-empty"),
                        epoch: step,
                    },
                    center: (info.center * n + obs.pos) * (1.0 / (n + 1.0)),
                    members,
                };
                let recipients: IdSet = info.members.iter().copied().filter(|id| obs.sees(*id)).collect();
                if !recipients.is_empty() {
                    out.push(message(me, recipients, Payload::MergeProposal(plan)));
                    mem.join = Some((info.id, step));
                }
            }
            return Ok(Decision {
                movement: Vec2::ZERO,
                outgoing: out,
            });
        }
        if single_ids.is_empty() {
            return Ok(Decision {
                movement: random_unit(rng) * obs.cfg.v_max,
                outgoing: out,
            });
        }
        Ok(Decision {
            movement: Vec2::ZERO,
            outgoing: out,
        })
    }

    /// Removes members seen in the opposite health state. Returns false when
    /// fewer than two members remain and the agent has reverted to single.
    fn prune(&self, obs: &Observation, mem: &mut AgentMemory) -> bool {
        let m = mem.membership.as_mut().expect("membership checked by caller");
        for s in &obs.visible {
            if s.state != obs.state {
                m.members.remove(&s.id);
            }
        }
        if m.members.len() < 2 || !m.members.contains(&obs.id) {
            *mem = AgentMemory::default();
            return false;
        }
        true
    }

    fn converging(&self, obs: &Observation, inbox: Vec<Message>, mem: &mut AgentMemory, rng: &mut dyn RngCore) -> Result<Decision> {
        let Some(m) = mem.membership.clone() else {
            return Err(Error::Memory(format!("{} is converging without a target", obs.id)));
        };
        if !self.prune(obs, mem) {
            return Ok(Decision::stay());
        }
        let joined_circle = inbox.iter().any(|msg| {
            matches!(msg.payload, Payload::RandomDirection { circle, .. } if circle == m.circle)
        });
        if joined_circle {
            mem.formation = FormationState::Circle;
            return self.circle(obs, inbox, mem, rng);
        }
        for msg in &inbox {
            if let Payload::ConvergenceState { circle, converged } = &msg.payload {
                if *circle == m.circle {
                    mem.converged.extend(converged.iter().copied());
                }
            }
        }
        let m = mem.membership.clone().expect("pruned membership");
        mem.converged.retain(|id| m.members.contains(id));
        let mut movement = Vec2::ZERO;
        if (m.target - obs.pos).norm() <= obs.cfg.d_r / 4.0 {
            mem.converged.insert(obs.id);
        } else {
            movement = m.target - obs.pos;
        }
        let mates: IdSet = obs
            .allies()
            .filter(|s| m.members.contains(&s.id))
            .map(|s| s.id)
            .collect();
        let mut out = Vec::new();
        if !mates.is_empty() {
            out.push(message(
                obs.id,
                mates,
                Payload::ConvergenceState {
                    circle: m.circle,
                    converged: mem.converged.clone(),
                },
            ));
        }
        if m.members.is_subset(&mem.converged) {
            mem.formation = FormationState::Circle;
        } else if obs.step >= mem.since + CONVERGENCE_PATIENCE {
            *mem = AgentMemory::default();
        }
        Ok(Decision { movement, outgoing: out })
    }

    fn circle(&self, obs: &Observation, inbox: Vec<Message>, mem: &mut AgentMemory, rng: &mut dyn RngCore) -> Result<Decision> {
        if mem.membership.is_none() {
            return Err(Error::Memory(format!("{} is in a circle without membership", obs.id)));
        }
        if !self.prune(obs, mem) {
            return Ok(Decision::stay());
        }
        let me = obs.id;
        let step = obs.step;
        let mode = CircleMode::at(step);
        let own = mem.membership.as_ref().expect("pruned membership").circle;
        let allies: IdSet = obs.allies().map(|s| s.id).collect();
        let mut out = Vec::new();

        for msg in inbox {
            match msg.payload {
                Payload::MergeProposal(plan) if plan.to == own => {
                    if mem.proposed_to == Some(plan.from) && plan.members.len() <= self.threshold {
                        return self.accept_merge(obs, mem, plan, Some(msg.sender), out);
                    }
                    mem.proposals.insert(
                        plan.from,
                        SavedProposal {
                            sender: Some(msg.sender),
                            plan,
                            received: step,
                        },
                    );
                }
                Payload::MergeApproval(plan) if plan.to == own || plan.from == own => {
                    return self.accept_merge(obs, mem, plan, Some(msg.sender), out);
                }
                Payload::ExteriorInfo { circles, proposals } => {
                    for info in circles {
                        if info.id != own {
                            mem.circles.insert(info.id, (step, info));
                        }
                    }
                    for plan in proposals.into_iter().filter(|p| p.to == own) {
                        mem.proposals.entry(plan.from).or_insert(SavedProposal {
                            sender: None,
                            plan,
                            received: step,
                        });
                    }
                }
                Payload::CirclePublication(info) => {
                    if info.id == own {
                        let m = mem.membership.as_mut().expect("membership");
                        m.members.retain(|id| info.members.contains(id));
                    } else {
                        mem.circles.insert(info.id, (step, info));
                    }
                }
                Payload::RandomDirection {
                    circle,
                    angle,
                    move_step,
                } if circle == own => {
                    if mem.direction.map(|d| d.0) != Some(move_step) {
                        mem.direction = Some((move_step, angle));
                        let mates = self.mates(mem, &allies);
                        if !mates.is_empty() {
                            out.push(message(
                                me,
                                mates,
                                Payload::RandomDirection {
                                    circle,
                                    angle,
                                    move_step,
                                },
                            ));
                        }
                    }
                }
                _ => {}
            }
        }
        if !self.prune(obs, mem) {
            return Ok(Decision {
                movement: Vec2::ZERO,
                outgoing: out,
            });
        }
        mem.circles.retain(|_, (t, _)| step - *t <= CIRCLE_INFO_TTL);
        let m = mem.membership.clone().expect("membership");
        mem.circles.retain(|_, (_, info)| info.members.is_disjoint(&m.members));
        let heal = if (m.target - obs.pos).norm() > obs.cfg.d_r / 4.0 {
            m.target - obs.pos
        } else {
            Vec2::ZERO
        };
        let info = CircleInfo {
            id: m.circle,
            members: m.members.clone(),
            center: m.center,
        };
        let mates = self.mates(mem, &allies);

        match mode {
            CircleMode::Publicize => {
                if !allies.is_empty() {
                    out.push(message(me, allies.iter().copied(), Payload::CirclePublication(info)));
                }
                if m.members.iter().next() == Some(&me) {
                    let angle = self.draw_direction(obs, &m, rng);
                    let move_step = step + 3;
                    mem.direction = Some((move_step, angle));
                    if !mates.is_empty() {
                        out.push(message(
                            me,
                            mates,
                            Payload::RandomDirection {
                                circle: m.circle,
                                angle,
                                move_step,
                            },
                        ));
                    }
                }
                Ok(Decision { movement: heal, outgoing: out })
            }
            CircleMode::Discovery => {
                let circles: Vec<CircleInfo> = mem.circles.values().map(|(_, i)| i.clone()).collect();
                let proposals: Vec<MergePlan> = mem.proposals.values().map(|p| p.plan.clone()).collect();
                if !mates.is_empty() && !(circles.is_empty() && proposals.is_empty()) {
                    out.push(message(me, mates, Payload::ExteriorInfo { circles, proposals }));
                }
                Ok(Decision { movement: heal, outgoing: out })
            }
            CircleMode::Coordinate => {
                let size = m.members.len();
                let fits = |n: usize| size + n <= self.threshold;
                let neighbor = mem
                    .circles
                    .values()
                    .map(|(_, i)| i)
                    .filter(|i| fits(i.members.len()))
                    .max_by(|a, b| a.members.len().cmp(&b.members.len()).then(b.id.cmp(&a.id)))
                    .cloned();
                let proposal = mem
                    .proposals
                    .values()
                    .filter(|p| p.received < step && p.plan.members.len() <= self.threshold)
                    .max_by(|a, b| a.plan.from_size.cmp(&b.plan.from_size).then(b.plan.from.cmp(&a.plan.from)))
                    .cloned();
                mem.proposals.clear();
                mem.proposed_to = None;
                let f_size = neighbor.as_ref().map_or(0, |f| f.members.len());
                if let Some(p) = proposal.filter(|p| p.plan.from_size > f_size) {
                    if p.sender.is_some_and(|s| obs.sees(s)) {
                        return self.accept_merge(obs, mem, p.plan, None, out);
                    }
                    return Ok(Decision { movement: heal, outgoing: out });
                }
                if let Some(f) = neighbor {
                    let members: IdSet = m.members.union(&f.members).copied().collect();
                    let total = (size + f.members.len()) as f64;
                    let plan = MergePlan {
                        from: m.circle,
                        to: f.id,
                        from_size: size,
                        circle: CircleId {
                            founder: *members.iter().next().expect("non-empty"),
                            epoch: step,
                        },
                        center: (m.center * size as f64 + f.center * f.members.len() as f64) * (1.0 / total),
                        members,
                    };
                    mem.proposed_to = Some(f.id);
                    let targets: IdSet = f.members.iter().copied().filter(|id| obs.sees(*id)).collect();
                    if !targets.is_empty() {
                        out.push(message(me, targets, Payload::MergeProposal(plan)));
                    }
                }
                Ok(Decision { movement: heal, outgoing: out })
            }
            CircleMode::Move => match mem.direction.filter(|d| d.0 == step) {
                Some((_, angle)) => {
                    let shift = Vec2::from_angle(angle) * obs.cfg.v_max;
                    let mm = mem.membership.as_mut().expect("membership");
                    mm.center += shift;
                    mm.target += shift;
                    Ok(Decision {
                        movement: mm.target - obs.pos,
                        outgoing: out,
                    })
                }
                None => Ok(Decision { movement: heal, outgoing: out }),
            },
        }
    }

    fn mates(&self, mem: &AgentMemory, allies: &IdSet) -> IdSet {
        let m = mem.membership.as_ref().expect("membership");
        allies.intersection(&m.members).copied().collect()
    }

    /// Uniform angle, redrawn a few times so the shifted circle stays in the
    /// arena; falls back to heading for the arena center.
    fn draw_direction(&self, obs: &Observation, m: &Membership, rng: &mut dyn RngCore) -> f64 {
        let cfg = &obs.cfg;
        let radius = cfg.s_max / 2.0;
        for _ in 0..8 {
            let angle = rng.random_range(0.0..2.0 * PI);
            let c = m.center + Vec2::from_angle(angle) * cfg.v_max;
            if clamp_center(c, radius, cfg) == c {
                return angle;
            }
        }
        let home = Vec2::new(cfg.arena_width / 2.0, cfg.arena_height / 2.0) - m.center;
        home.y.atan2(home.x)
    }

    fn accept_merge(
        &self,
        obs: &Observation,
        mem: &mut AgentMemory,
        plan: MergePlan,
        from: Option<AgentId>,
        mut out: Vec<Message>,
    ) -> Result<Decision> {
        let recipients: IdSet = obs
            .allies()
            .map(|s| s.id)
            .filter(|id| Some(*id) != from && (plan.members.contains(id)))
            .collect();
        if !recipients.is_empty() {
            out.push(message(obs.id, recipients, Payload::MergeApproval(plan.clone())));
        }
        let mv = self.converge_on(obs, mem, plan.circle, plan.members, plan.center)?;
        Ok(Decision { movement: mv, outgoing: out })
    }
}

impl Strategy for Formation {
    fn name(&self) -> &'static str {
        self.name
    }

    fn decide(&self, obs: &Observation, inbox: Vec<Message>, memory: &mut AgentMemory, rng: &mut dyn RngCore) -> Result<Decision> {
        match memory.formation {
            FormationState::Single => self.single(obs, inbox, memory, rng),
            FormationState::Converging => self.converging(obs, inbox, memory, rng),
            FormationState::Circle => self.circle(obs, inbox, memory, rng),
        }
    }
}

/// Unit attraction to same-state agents in the sensing band and unit
/// repulsion from those closer than `s_min`. Silent.
#[derive(Debug, Clone, Copy, Default)]
pub struct PotentialForces;

impl Strategy for PotentialForces {
    fn name(&self) -> &'static str {
        "potential"
    }

    fn decide(&self, obs: &Observation, _inbox: Vec<Message>, _memory: &mut AgentMemory, _rng: &mut dyn RngCore) -> Result<Decision> {
        let pull = obs
            .allies()
            .map(|s| (s.pos - obs.pos).normalized())
            .fold(Vec2::ZERO, |a, b| a + b);
        let push = obs
            .nearby
            .iter()
            .filter(|s| s.state == obs.state)
            .map(|s| (obs.pos - s.pos).normalized())
            .fold(Vec2::ZERO, |a, b| a + b);
        Ok(Decision::moving(pull + push))
    }
}

/// Uniform random heading at full speed every step.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomWalk;

impl Strategy for RandomWalk {
    fn name(&self) -> &'static str {
        "random"
    }

    fn decide(&self, obs: &Observation, _inbox: Vec<Message>, _memory: &mut AgentMemory, rng: &mut dyn RngCore) -> Result<Decision> {
        Ok(Decision::moving(random_unit(rng) * obs.cfg.v_max))
    }
}

pub const STRATEGY_NAMES: [&str; 4] = ["circle", "clique", "potential", "random"];

pub fn strategy_by_name(name: &str, cfg: &WorldConfig) -> Result<Arc<dyn Strategy>> {
    Ok(match name {
        "circle" => Arc::new(Formation::circle_variant(cfg)?),
        "clique" => Arc::new(Formation::clique_variant(cfg)),
        "potential" => Arc::new(PotentialForces),
        "random" => Arc::new(RandomWalk),
        other => return Err(Error::UnknownStrategy(other.to_string())),
    })
}
