//! Iterative conquest of a component, the weak-point rule, attacking
//! sequences and an exhaustive minimum-cost oracle.
//!
//! Bookkeeping per iteration: `m` is the largest predicted bareness factor
//! among the chosen agents, `delta = m - c`. A positive delta is added to both
//! the required count `r` and the available count `c`; afterwards every
//! conquered agent joins the attackers, so `c` grows by the number chosen.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::WorldConfig;
use crate::graph::{AgentId, AgentSnapshot, ComponentView, FenceSampler};

pub type IdSet = BTreeSet<AgentId>;

/// Iteration-indexed conquest plan. Step `i` lists the agents taken in
/// iteration `i + 1`; empty steps are allowed and skipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackingSequence {
    pub steps: Vec<IdSet>,
}

impl AttackingSequence {
    pub fn new(steps: Vec<IdSet>) -> Self {
        Self { steps }
    }

    pub fn singular(order: impl IntoIterator<Item = AgentId>) -> Self {
        Self {
            steps: order.into_iter().map(|id| IdSet::from([id])).collect(),
        }
    }

    /// Index (1-based) of the last non-empty step.
    pub fn length(&self) -> usize {
        self.steps
            .iter()
            .rposition(|s| !s.is_empty())
            .map_or(0, |i| i + 1)
    }

    pub fn is_singular(&self) -> bool {
        self.steps.iter().all(|s| s.len() == 1)
    }

    /// Checks that the steps partition the members of `comp`.
    pub fn validate(&self, comp: &ComponentView) -> Result<()> {
        let mut seen = IdSet::new();
        for (i, step) in self.steps.iter().enumerate() {
            for &id in step {
                if !comp.contains(id) {
                    return Err(Error::Sequence(format!("step {} names non-member {id}", i + 1)));
                }
                if !seen.insert(id) {
                    return Err(Error::Sequence(format!("{id} is conquered twice")));
                }
            }
        }
        if seen.len() != comp.len() {
            let missing: Vec<String> = comp
                .members
                .difference(&seen)
                .map(ToString::to_string)
                .collect();
            return Err(Error::Sequence(format!("never conquered: {}", missing.join(", "))));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WpcStep {
    pub chosen: IdSet,
    pub max_pbf: i64,
    pub delta: i64,
    pub c: i64,
    pub r: i64,
    /// Conquered set after this iteration.
    pub conquered: IdSet,
    /// Chosen agents whose own bareness exceeded the attackers on hand.
    pub effective: IdSet,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WpcTrace {
    pub steps: Vec<WpcStep>,
}

impl WpcTrace {
    pub fn required(&self) -> i64 {
        self.steps.last().map_or(0, |s| s.r)
    }

    pub fn effective_subset(&self) -> IdSet {
        self.steps
            .iter()
            .filter(|s| s.delta > 0)
            .flat_map(|s| s.effective.iter().copied())
            .collect()
    }

    pub fn order(&self) -> Vec<AgentId> {
        self.steps.iter().flat_map(|s| s.chosen.iter().copied()).collect()
    }
}

/// Predicted bareness factor: `cf + 1 - |observed ∩ conquered|`.
pub fn pbf(agent: AgentId, conquered: &IdSet, comp: &ComponentView) -> Result<i64> {
    if conquered.contains(&agent) {
        return Err(Error::AlreadyConquered(agent));
    }
    let nb = comp.neighbors(agent)?;
    let removed = nb.iter().filter(|n| conquered.contains(n)).count();
    Ok(nb.len() as i64 + 1 - removed as i64)
}

/// Runs the conquest bookkeeping with an arbitrary decision rule.
///
/// `rule(comp, conquered, t)` is called with the 1-based iteration index and
/// must return a non-empty set of unconquered members.
pub fn iterative_conquer<F>(comp: &ComponentView, mut rule: F) -> Result<(i64, WpcTrace)>
where
    F: FnMut(&ComponentView, &IdSet, usize) -> Result<IdSet>,
{
    let mut conquered = IdSet::new();
    let mut trace = WpcTrace::default();
    let (mut c, mut r) = (0i64, 0i64);
    let mut t = 0;
    while conquered.len() < comp.len() {
        t += 1;
        let chosen = rule(comp, &conquered, t)?;
        if chosen.is_empty() {
            return Err(Error::Protocol(format!("iteration {t} chose no agents")));
        }
        let mut scores = Vec::with_capacity(chosen.len());
        for &id in &chosen {
            if !comp.contains(id) {
                return Err(Error::Protocol(format!("iteration {t} chose non-member {id}")));
            }
            if conquered.contains(&id) {
                return Err(Error::Protocol(format!("iteration {t} chose conquered {id}")));
            }
            scores.push((id, pbf(id, &conquered, comp)?));
        }
        let max_pbf = scores.iter().map(|&(_, p)| p).max().expect("non-empty");
        let delta = max_pbf - c;
        let effective = scores
            .iter()
            .filter(|&&(_, p)| p - c > 0)
            .map(|&(id, _)| id)
            .collect();
        if delta > 0 {
            r += delta;
            c += delta;
        }
        c += chosen.len() as i64;
        conquered.extend(chosen.iter().copied());
        trace.steps.push(WpcStep {
            chosen,
            max_pbf,
            delta,
            c,
            r,
            conquered: conquered.clone(),
            effective,
        });
    }
    Ok((r, trace))
}

/// Which remaining members may be attacked.
#[derive(Clone)]
pub enum FenceModel<'a> {
    /// Every remaining member is attackable.
    AllBare,
    /// The given members start exposed; any member becomes exposed once one
    /// of its neighbors has been conquered.
    Exposed(IdSet),
    /// Sampled geometric bareness of the remainder inside a fixed world.
    Geometric {
        world: &'a [AgentSnapshot],
        cfg: &'a WorldConfig,
    },
}

/// Incremental bare-set tracker for one conquest run.
struct Attackable<'m, 'a> {
    model: &'m FenceModel<'a>,
    sampler: Option<FenceSampler<'a>>,
    bare: IdSet,
}

impl<'m, 'a> Attackable<'m, 'a> {
    fn new(model: &'m FenceModel<'a>) -> Self {
        let sampler = match model {
            FenceModel::Geometric { world, cfg } => Some(FenceSampler::new(world, cfg)),
            _ => None,
        };
        Self {
            model,
            sampler,
            bare: IdSet::new(),
        }
    }

    /// Bare members of the remainder. Bareness never reverts as members are
    /// removed, so verdicts are cached.
    fn of(&mut self, comp: &ComponentView, conquered: &IdSet) -> Result<IdSet> {
        let remaining: IdSet = comp.members.difference(conquered).copied().collect();
        let fresh = match self.model {
            FenceModel::AllBare => remaining.clone(),
            FenceModel::Exposed(initial) => remaining
                .iter()
                .copied()
                .filter(|id| {
                    initial.contains(id)
                        || comp.adjacency[id].iter().any(|n| conquered.contains(n))
                })
                .collect(),
            FenceModel::Geometric { .. } => {
                let sampler = self.sampler.as_ref().expect("geometric sampler");
                let mut out = IdSet::new();
                for &id in remaining.iter().filter(|id| !self.bare.contains(id)) {
                    if sampler.is_bare(id, &remaining)? {
                        out.insert(id);
                    }
                }
                out
            }
        };
        self.bare.extend(fresh);
        let bare: IdSet = self.bare.intersection(&remaining).copied().collect();
        Ok(if bare.is_empty() { remaining } else { bare })
    }
}

/// Weak-point conquest under a fence model; returns the required count and
/// the full trace. Ties in the weak-point choice go to the lowest id.
pub fn wpc_traced(comp: &ComponentView, model: &FenceModel) -> Result<(i64, WpcTrace)> {
    if comp.is_empty() {
        return Err(Error::Domain("empty component".into()));
    }
    let mut attackable = Attackable::new(model);
    iterative_conquer(comp, |comp, conquered, _| {
        let mut best: Option<(i64, AgentId)> = None;
        for id in attackable.of(comp, conquered)? {
            let p = pbf(id, conquered, comp)?;
            if best.is_none_or(|b| (p, id) < b) {
                best = Some((p, id));
            }
        }
        Ok(IdSet::from([best.expect("non-empty remainder").1]))
    })
}

/// Weak-point conquest value of a component placed in `world`.
pub fn wpc(comp: &ComponentView, world: &[AgentSnapshot], cfg: &WorldConfig) -> Result<i64> {
    wpc_traced(comp, &FenceModel::Geometric { world, cfg }).map(|(r, _)| r)
}

/// Builds a component from an undirected edge list, requiring connectivity.
pub fn abstract_component(edges: &[(AgentId, AgentId)], isolated: &[AgentId]) -> Result<ComponentView> {
    let comp = ComponentView::from_edges(
        crate::graph::HealthState::Healthy,
        edges.iter().copied(),
        isolated.iter().copied(),
    );
    if comp.is_empty() {
        return Err(Error::Domain("empty adjacency".into()));
    }
    if !comp.is_connected() {
        return Err(Error::Domain("adjacency is not connected".into()));
    }
    Ok(comp)
}

/// Weak-point conquest on a bare adjacency. With `all_bare` every member is
/// attackable; otherwise `fence` seeds the exposed set.
pub fn wpc_abstract(adjacency: &BTreeMap<AgentId, IdSet>, fence: Option<&IdSet>) -> Result<(i64, WpcTrace)> {
    let edges: Vec<(AgentId, AgentId)> = adjacency
        .iter()
        .flat_map(|(&a, nb)| nb.iter().map(move |&b| (a, b)))
        .collect();
    let isolated: Vec<AgentId> = adjacency.keys().copied().collect();
    let comp = abstract_component(&edges, &isolated)?;
    let model = match fence {
        None => FenceModel::AllBare,
        Some(f) => FenceModel::Exposed(f.clone()),
    };
    wpc_traced(&comp, &model)
}

/// Required count of an explicit sequence that covers every member once.
pub fn sequence_cost(comp: &ComponentView, seq: &AttackingSequence) -> Result<i64> {
    seq.validate(comp)?;
    let mut steps = seq.steps.iter().filter(|s| !s.is_empty());
    iterative_conquer(comp, |_, _, _| Ok(steps.next().cloned().unwrap_or_default())).map(|(r, _)| r)
}

/// Expands every multi-agent step into single steps ordered by ascending
/// predicted bareness at the start of that step (ties by id).
pub fn transform_sequence(comp: &ComponentView, seq: &AttackingSequence) -> Result<AttackingSequence> {
    seq.validate(comp)?;
    let mut conquered = IdSet::new();
    let mut order = Vec::with_capacity(comp.len());
    for step in seq.steps.iter().filter(|s| !s.is_empty()) {
        let mut scored = step
            .iter()
            .map(|&id| pbf(id, &conquered, comp).map(|p| (p, id)))
            .collect::<Result<Vec<_>>>()?;
        scored.sort_unstable();
        order.extend(scored.iter().map(|&(_, id)| id));
        conquered.extend(step.iter().copied());
    }
    Ok(AttackingSequence::singular(order))
}

pub const BRUTE_FORCE_LIMIT: usize = 8;

/// Minimum required count over every singular order that only takes
/// attackable members at each step.
pub fn brute_force_min_conquer(comp: &ComponentView, model: &FenceModel) -> Result<i64> {
    let n = comp.len();
    if n == 0 {
        return Err(Error::Domain("empty component".into()));
    }
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(n));
    }
    let mut best = i64::MAX;
    let mut conquered = IdSet::new();
    search(comp, model, &mut conquered, 0, &mut best)?;
    Ok(best)
}

fn search(comp: &ComponentView, model: &FenceModel, conquered: &mut IdSet, r: i64, best: &mut i64) -> Result<()> {
    if r >= *best {
        return Ok(());
    }
    if conquered.len() == comp.len() {
        *best = r;
        return Ok(());
    }
    let candidates = attackable_now(comp, model, conquered)?;
    for id in candidates {
        let p = pbf(id, conquered, comp)?;
        // c before this step is r + |conquered|
        let next_r = r.max(p - conquered.len() as i64);
        conquered.insert(id);
        search(comp, model, conquered, next_r, best)?;
        conquered.remove(&id);
    }
    Ok(())
}

fn attackable_now(comp: &ComponentView, model: &FenceModel, conquered: &IdSet) -> Result<IdSet> {
    let remaining: IdSet = comp.members.difference(conquered).copied().collect();
    let bare: IdSet = match model {
        FenceModel::AllBare => remaining.clone(),
        FenceModel::Exposed(initial) => remaining
            .iter()
            .copied()
            .filter(|id| initial.contains(id) || comp.adjacency[id].iter().any(|n| conquered.contains(n)))
            .collect(),
        FenceModel::Geometric { world, cfg } => {
            let sampler = FenceSampler::new(world, cfg);
            let mut out = IdSet::new();
            for &id in &remaining {
                if sampler.is_bare(id, &remaining)? {
                    out.insert(id);
                }
            }
            out
        }
    };
    Ok(if bare.is_empty() { remaining } else { bare })
}

/// Attackable members of the untouched component.
pub fn initial_fence(comp: &ComponentView, model: &FenceModel) -> Result<IdSet> {
    attackable_now(comp, model, &IdSet::new())
}

/// Whether every agent that forced extra attackers was on the original fence.
pub fn is_monotonic(comp: &ComponentView, model: &FenceModel) -> Result<bool> {
    let fence = attackable_now(comp, model, &IdSet::new())?;
    let (_, trace) = wpc_traced(comp, model)?;
    Ok(trace.effective_subset().is_subset(&fence))
}
