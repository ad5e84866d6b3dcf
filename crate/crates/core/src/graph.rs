//! Observation graph, same-state components and the sampled fence.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, in_observation_band, line_is_clear, Vec2, WorldConfig};
use crate::spatial::SpatialIndex;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HealthState {
    Healthy,
    Contaminated,
}

impl HealthState {
    pub fn opposite(self) -> Self {
        match self {
            HealthState::Healthy => HealthState::Contaminated,
            HealthState::Contaminated => HealthState::Healthy,
        }
    }
}

/// Serialized flat as `{id, x, y, state}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "FlatAgent", into = "FlatAgent")]
pub struct AgentSnapshot {
    pub id: AgentId,
    pub pos: Vec2,
    pub state: HealthState,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlatAgent {
    id: AgentId,
    x: f64,
    y: f64,
    state: HealthState,
}

impl From<FlatAgent> for AgentSnapshot {
    fn from(a: FlatAgent) -> Self {
        Self {
            id: a.id,
            pos: Vec2::new(a.x, a.y),
            state: a.state,
        }
    }
}

impl From<AgentSnapshot> for FlatAgent {
    fn from(a: AgentSnapshot) -> Self {
        Self {
            id: a.id,
            x: a.pos.x,
            y: a.pos.y,
            state: a.state,
        }
    }
}

impl AgentSnapshot {
    pub fn new(id: u32, x: f64, y: f64, state: HealthState) -> Self {
        Self {
            id: AgentId(id),
            pos: Vec2::new(x, y),
            state,
        }
    }
}

/// Undirected mutual-visibility graph. Every node implicitly observes itself.
#[derive(Debug, Clone)]
pub struct ObservationGraph {
    ids: Vec<AgentId>,
    index: HashMap<AgentId, usize>,
    adjacency: Vec<Vec<usize>>,
}

impl ObservationGraph {
    /// Builds the graph, rejecting duplicate ids and overlapping bodies.
    pub fn build(agents: &[AgentSnapshot], cfg: &WorldConfig) -> Result<Self> {
        let positions: Vec<Vec2> = agents.iter().map(|a| a.pos).collect();
        if let Some(p) = positions.iter().find(|p| !p.is_finite()) {
            return Err(Error::Domain(format!("non-finite position {p:?}")));
        }
        let grid = SpatialIndex::new(&positions, cfg.s_max.max(cfg.d_r));
        for (i, a) in agents.iter().enumerate() {
            for j in grid.within(a.pos, cfg.d_r) {
                if j > i {
                    return Err(Error::Overlap {
                        a: a.id,
                        b: agents[j].id,
                        distance: distance(a.pos, agents[j].pos),
                    });
                }
            }
        }
        let ids: Vec<AgentId> = agents.iter().map(|a| a.id).collect();
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(*id, i).is_some() {
                return Err(Error::Domain(format!("duplicate agent id {id}")));
            }
        }
        let adjacency = visibility_adjacency(&positions, cfg);
        Ok(Self {
            ids,
            index,
            adjacency,
        })
    }

    /// Builds the graph from raw positions without the overlap check.
    /// Node `i` gets id `ids[i]`.
    pub(crate) fn from_positions(ids: Vec<AgentId>, positions: &[Vec2], cfg: &WorldConfig) -> Self {
        let index = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        Self {
            adjacency: visibility_adjacency(positions, cfg),
            ids,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[AgentId] {
        &self.ids
    }

    pub fn contains(&self, id: AgentId) -> bool {
        self.index.contains_key(&id)
    }

    /// Other agents observed by `id`, ascending by node index.
    pub fn neighbors(&self, id: AgentId) -> impl Iterator<Item = AgentId> + '_ {
        self.index
            .get(&id)
            .into_iter()
            .flat_map(move |&i| self.adjacency[i].iter().map(move |&j| self.ids[j]))
    }

    pub(crate) fn neighbor_indices(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Observation set of `id`, which always includes `id` itself.
    pub fn observed_set(&self, id: AgentId) -> BTreeSet<AgentId> {
        let mut set: BTreeSet<AgentId> = self.neighbors(id).collect();
        if self.contains(id) {
            set.insert(id);
        }
        set
    }

    pub fn has_edge(&self, a: AgentId, b: AgentId) -> bool {
        match (self.index.get(&a), self.index.get(&b)) {
            (Some(&i), Some(&j)) => self.adjacency[i].binary_search(&j).is_ok(),
            _ => false,
        }
    }

    /// Edge list with each pair ordered `(low, high)` and sorted.
    pub fn edges(&self) -> Vec<(AgentId, AgentId)> {
        let mut out: Vec<(AgentId, AgentId)> = self
            .adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, nb)| {
                nb.iter().filter_map(move |&j| {
                    let (a, b) = (self.ids[i], self.ids[j]);
                    (a < b).then_some((a, b))
                })
            })
            .collect();
        out.sort_unstable();
        out
    }
}

fn visibility_adjacency(positions: &[Vec2], cfg: &WorldConfig) -> Vec<Vec<usize>> {
    let n = positions.len();
    let mut adjacency = vec![Vec::new(); n];
    let grid = SpatialIndex::new(positions, cfg.s_max);
    let reach = cfg.s_max + cfg.eps + cfg.body_radius();
    for i in 0..n {
        let nearby = grid.within(positions[i], reach);
        for &j in nearby.iter().filter(|&&j| j > i) {
            if !in_observation_band(distance(positions[i], positions[j]), cfg) {
                continue;
            }
            let blockers = nearby
                .iter()
                .filter(|&&k| k != i && k != j)
                .map(|&k| positions[k]);
            if line_is_clear(positions[i], positions[j], blockers, cfg) {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    for nb in &mut adjacency {
        nb.sort_unstable();
    }
    adjacency
}

pub fn build_observation_graph(agents: &[AgentSnapshot], cfg: &WorldConfig) -> Result<ObservationGraph> {
    ObservationGraph::build(agents, cfg)
}

/// A same-state connected component with its induced adjacency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentView {
    pub state: HealthState,
    pub members: BTreeSet<AgentId>,
    /// Induced same-state adjacency; self is never listed.
    pub adjacency: BTreeMap<AgentId, BTreeSet<AgentId>>,
}

impl ComponentView {
    /// Builds a view from an explicit edge list. Every endpoint becomes a
    /// member; `isolated` adds members without edges.
    pub fn from_edges(
        state: HealthState,
        edges: impl IntoIterator<Item = (AgentId, AgentId)>,
        isolated: impl IntoIterator<Item = AgentId>,
    ) -> Self {
        let mut adjacency: BTreeMap<AgentId, BTreeSet<AgentId>> = BTreeMap::new();
        for id in isolated {
            adjacency.entry(id).or_default();
        }
        for (a, b) in edges {
            if a == b {
                adjacency.entry(a).or_default();
                continue;
            }
            adjacency.entry(a).or_default().insert(b);
            adjacency.entry(b).or_default().insert(a);
        }
        Self {
            state,
            members: adjacency.keys().copied().collect(),
            adjacency,
        }
    }

    /// Restricts the observation graph to `members`, regardless of whether
    /// the induced subgraph is connected.
    pub fn induced(graph: &ObservationGraph, state: HealthState, members: &BTreeSet<AgentId>) -> Self {
        let adjacency = members
            .iter()
            .map(|&id| {
                let nb = graph.neighbors(id).filter(|n| members.contains(n)).collect();
                (id, nb)
            })
            .collect();
        Self {
            state,
            members: members.clone(),
            adjacency,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: AgentId) -> bool {
        self.members.contains(&id)
    }

    pub fn neighbors(&self, id: AgentId) -> Result<&BTreeSet<AgentId>> {
        self.adjacency.get(&id).ok_or(Error::NotMember(id))
    }

    pub fn connectivity_factor(&self, id: AgentId) -> Result<usize> {
        self.neighbors(id).map(BTreeSet::len)
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.members.iter().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(id) = stack.pop() {
            for &n in &self.adjacency[&id] {
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen.len() == self.members.len()
    }
}

pub fn connectivity_factor(agent: AgentId, comp: &ComponentView) -> Result<usize> {
    comp.connectivity_factor(agent)
}

/// Graph of same-state components; `edges` joins opposing components that
/// share at least one observation edge.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentGraph {
    pub components: Vec<ComponentView>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl ComponentGraph {
    pub fn component_of(&self, id: AgentId) -> Option<usize> {
        self.components.iter().position(|c| c.contains(id))
    }
}

/// Disjoint-set forest with path halving and union by size.
struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
    }
}

/// Partitions the graph into same-state connected components, ordered by
/// their smallest member id.
pub fn connected_components(
    graph: &ObservationGraph,
    states: &HashMap<AgentId, HealthState>,
) -> Result<ComponentGraph> {
    let n = graph.len();
    let state_of = |i: usize| -> Result<HealthState> {
        states
            .get(&graph.ids[i])
            .copied()
            .ok_or_else(|| Error::Domain(format!("no state for agent {}", graph.ids[i])))
    };
    let node_states = (0..n).map(state_of).collect::<Result<Vec<_>>>()?;
    let mut dsu = DisjointSet::new(n);
    for i in 0..n {
        for &j in graph.neighbor_indices(i) {
            if j > i && node_states[i] == node_states[j] {
                dsu.union(i, j);
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<AgentId>> = BTreeMap::new();
    for i in 0..n {
        let root = dsu.find(i);
        groups.entry(root).or_default().insert(graph.ids[i]);
    }
    let mut components: Vec<ComponentView> = groups
        .into_values()
        .map(|members| {
            let first = *members.iter().next().expect("non-empty group");
            let state = states[&first];
            ComponentView::induced(graph, state, &members)
        })
        .collect();
    components.sort_by_key(|c| *c.members.iter().next().expect("non-empty component"));

    let mut owner = HashMap::with_capacity(n);
    for (ci, comp) in components.iter().enumerate() {
        for &id in &comp.members {
            owner.insert(id, ci);
        }
    }
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for &j in graph.neighbor_indices(i) {
            if j > i && node_states[i] != node_states[j] {
                let (a, b) = (owner[&graph.ids[i]], owner[&graph.ids[j]]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
    }
    Ok(ComponentGraph { components, edges })
}

/// Sampled bareness test over a fixed world of agent bodies.
///
/// A sample point lies on the circle of radius `s_max * (1 - eps)` around
/// the agent. It counts as an intrusion point when an intruder body fits
/// there without overlapping any agent, the agent sees it, and no covering
/// member sees it. Every body in the world occludes.
pub struct FenceSampler<'a> {
    cfg: &'a WorldConfig,
    positions: Vec<Vec2>,
    index: HashMap<AgentId, usize>,
    offsets: Vec<Vec2>,
    grid: SpatialIndex,
}

impl<'a> FenceSampler<'a> {
    pub fn new(world: &[AgentSnapshot], cfg: &'a WorldConfig) -> Self {
        let radius = cfg.s_max * (1.0 - cfg.eps);
        let k = cfg.fence_samples;
        let offsets = (0..k)
            .map(|s| Vec2::from_angle(2.0 * PI * s as f64 / k as f64) * radius)
            .collect();
        let positions: Vec<Vec2> = world.iter().map(|a| a.pos).collect();
        Self {
            cfg,
            grid: SpatialIndex::new(&positions, cfg.s_max),
            positions,
            index: world.iter().enumerate().map(|(i, a)| (a.id, i)).collect(),
            offsets,
        }
    }

    fn position(&self, id: AgentId) -> Result<Vec2> {
        self.index
            .get(&id)
            .map(|&i| self.positions[i])
            .ok_or_else(|| Error::Domain(format!("agent {id} is not in the world")))
    }

    /// Whether `agent` has an intrusion point not covered by any of `covering`.
    pub fn is_bare(&self, agent: AgentId, covering: &BTreeSet<AgentId>) -> Result<bool> {
        let me = self.index.get(&agent).copied().ok_or(Error::NotMember(agent))?;
        let origin = self.positions[me];
        let cover: Vec<usize> = covering
            .iter()
            .filter(|&&id| id != agent)
            .map(|id| self.position(*id).map(|_| self.index[id]))
            .collect::<Result<_>>()?;
        let reach = self.cfg.s_max + self.cfg.eps + self.cfg.body_radius();
        let cover_set: BTreeSet<usize> = cover.into_iter().collect();

        for off in &self.offsets {
            let p = origin + *off;
            let nearby = self.grid.within(p, reach);
            let fits = nearby
                .iter()
                .all(|&k| distance(self.positions[k], p) >= self.cfg.d_r);
            if !fits {
                continue;
            }
            let seen_by = |who: usize| {
                in_observation_band(distance(self.positions[who], p), self.cfg)
                    && line_is_clear(
                        self.positions[who],
                        p,
                        nearby.iter().filter(|&&k| k != who).map(|&k| self.positions[k]),
                        self.cfg,
                    )
            };
            // The agent's own blockers may lie outside `nearby` only if they
            // are farther than `reach` from p, which cannot touch the segment.
            if !seen_by(me) {
                continue;
            }
            let covered = nearby
                .iter()
                .filter(|k| cover_set.contains(k))
                .any(|&k| seen_by(k));
            if !covered {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Bare members of `members`, each tested against all other members.
    pub fn fence_of(&self, members: &BTreeSet<AgentId>) -> Result<BTreeSet<AgentId>> {
        let mut out = BTreeSet::new();
        for &id in members {
            if self.is_bare(id, members)? {
                out.insert(id);
            }
        }
        Ok(out)
    }
}

/// Sampled fence of a component placed in `world`.
pub fn fence(comp: &ComponentView, world: &[AgentSnapshot], cfg: &WorldConfig) -> Result<BTreeSet<AgentId>> {
    FenceSampler::new(world, cfg).fence_of(&comp.members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use HealthState::*;

    pub(crate) fn healthy(coords: &[(f64, f64)]) -> Vec<AgentSnapshot> {
        coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| AgentSnapshot::new(i as u32 + 1, x, y, Healthy))
            .collect()
    }

    fn ids(v: &[u32]) -> BTreeSet<AgentId> {
        v.iter().map(|&i| AgentId(i)).collect()
    }

    fn states(agents: &[AgentSnapshot]) -> HashMap<AgentId, HealthState> {
        agents.iter().map(|a| (a.id, a.state)).collect()
    }

    #[test]
    fn single_agent_graph() {
        let agents = healthy(&[(0.0, 0.0)]);
        let g = build_observation_graph(&agents, &WorldConfig::default()).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.edges().is_empty());
        assert_eq!(g.observed_set(AgentId(1)), ids(&[1]));
    }

    #[test]
    fn three_on_a_line_is_a_path() {
        let agents = healthy(&[(0.0, 0.0), (3.0, 0.0), (6.0, 0.0)]);
        let g = build_observation_graph(&agents, &WorldConfig::default()).unwrap();
        assert_eq!(
            g.edges(),
            vec![(AgentId(1), AgentId(2)), (AgentId(2), AgentId(3))]
        );
        // without the middle body the end points see each other
        let ends = healthy(&[(0.0, 0.0), (6.0, 0.0)]);
        let g = build_observation_graph(&ends, &WorldConfig::default()).unwrap();
        assert_eq!(g.edges().len(), 1);
    }

    #[test]
    fn offset_blocker_leaves_line_clear() {
        let cfg = WorldConfig::with_radii(1.0, 3.0, 0.5);
        let agents = healthy(&[(-1.25, 0.0), (1.25, 0.0), (0.0, -1.1)]);
        let g = build_observation_graph(&agents, &cfg).unwrap();
        assert!(g.has_edge(AgentId(1), AgentId(2)));
        let blocked = healthy(&[(-1.25, 0.0), (1.25, 0.0), (0.0, 0.0)]);
        let g = build_observation_graph(&blocked, &cfg).unwrap();
        assert!(!g.has_edge(AgentId(1), AgentId(2)));
    }

    #[test]
    fn overlap_and_duplicates_rejected() {
        let cfg = WorldConfig::default();
        let agents = healthy(&[(0.0, 0.0), (0.2, 0.0)]);
        assert!(matches!(
            build_observation_graph(&agents, &cfg),
            Err(Error::Overlap { .. })
        ));
        let mut dup = healthy(&[(0.0, 0.0), (3.0, 0.0)]);
        dup[1].id = AgentId(1);
        assert!(build_observation_graph(&dup, &cfg).is_err());
    }

    #[test]
    fn components_of_clique_and_isolated_pair() {
        let cfg = WorldConfig::default();
        let clique = healthy(&[(0.0, 0.0), (3.0, 0.0), (1.5, 2.6)]);
        let g = build_observation_graph(&clique, &cfg).unwrap();
        let cg = connected_components(&g, &states(&clique)).unwrap();
        assert_eq!(cg.components.len(), 1);
        for id in 1..=3 {
            assert_eq!(connectivity_factor(AgentId(id), &cg.components[0]).unwrap(), 2);
        }

        let apart = healthy(&[(0.0, 0.0), (20.0, 0.0)]);
        let g = build_observation_graph(&apart, &cfg).unwrap();
        let cg = connected_components(&g, &states(&apart)).unwrap();
        assert_eq!(cg.components.len(), 2);
        assert_eq!(connectivity_factor(AgentId(1), &cg.components[0]).unwrap(), 0);
        assert!(cg.edges.is_empty());
    }

    #[test]
    fn five_components_with_cross_edges_only() {
        // H1 - C - H2 chain plus a separate H-C pair, laid out on a line
        // with 3-unit spacing so only consecutive agents see each other.
        let cfg = WorldConfig::default();
        let agents = vec![
            AgentSnapshot::new(1, 0.0, 0.0, Healthy),
            AgentSnapshot::new(2, 3.0, 0.0, Healthy),
            AgentSnapshot::new(3, 6.0, 0.0, Contaminated),
            AgentSnapshot::new(4, 9.0, 0.0, Contaminated),
            AgentSnapshot::new(5, 12.0, 0.0, Healthy),
            AgentSnapshot::new(6, 40.0, 0.0, Healthy),
            AgentSnapshot::new(7, 43.0, 0.0, Contaminated),
        ];
        let g = build_observation_graph(&agents, &cfg).unwrap();
        let cg = connected_components(&g, &states(&agents)).unwrap();
        assert_eq!(cg.components.len(), 5);
        assert_eq!(cg.components[0].members, ids(&[1, 2]));
        assert_eq!(cg.components[1].members, ids(&[3, 4]));
        assert_eq!(cg.components[2].members, ids(&[5]));
        assert_eq!(
            cg.edges,
            BTreeSet::from([(0, 1), (1, 2), (3, 4)])
        );
        for &(a, b) in &cg.edges {
            assert_ne!(cg.components[a].state, cg.components[b].state);
        }
        assert_eq!(cg.component_of(AgentId(7)), Some(4));
    }

    #[test]
    fn connectivity_factor_of_non_member() {
        let comp = ComponentView::from_edges(Healthy, [(AgentId(1), AgentId(2))], []);
        assert!(matches!(
            comp.connectivity_factor(AgentId(9)),
            Err(Error::NotMember(AgentId(9)))
        ));
    }

    #[test]
    fn singleton_is_bare() {
        let agents = healthy(&[(0.0, 0.0)]);
        let cfg = WorldConfig::default();
        let g = build_observation_graph(&agents, &cfg).unwrap();
        let cg = connected_components(&g, &states(&agents)).unwrap();
        assert_eq!(fence(&cg.components[0], &agents, &cfg).unwrap(), ids(&[1]));
    }

    pub(crate) const THIRTEEN: [(f64, f64); 13] = [
        (0.0, 0.0),
        (-0.5, 0.5),
        (0.5, 0.5),
        (0.75, 1.25),
        (-0.75, 1.25),
        (0.0, 2.0),
        (-1.25, 2.0),
        (-1.5, 0.75),
        (-1.1, -0.4),
        (-0.2, -1.2),
        (0.9, -0.7),
        (1.7, 0.3),
        (1.95, 1.45),
    ];

    #[test]
    fn thirteen_agent_fence() {
        let cfg = WorldConfig::with_radii(0.5, 1.5, 0.5);
        let agents = healthy(&THIRTEEN);
        let g = build_observation_graph(&agents, &cfg).unwrap();
        let cg = connected_components(&g, &states(&agents)).unwrap();
        assert_eq!(cg.components.len(), 1);
        let f = fence(&cg.components[0], &agents, &cfg).unwrap();
        assert_eq!(f, ids(&[6, 7, 8, 9, 10, 11, 12, 13]));
    }

    #[test]
    fn star_component_is_all_bare() {
        let cfg = WorldConfig::with_radii(1.0, 3.0, 0.5);
        let agents = healthy(&[(0.0, 0.0), (-0.4, 0.4), (-0.4, -0.4), (-1.7, 0.0)]);
        let g = build_observation_graph(&agents, &cfg).unwrap();
        assert_eq!(
            g.edges(),
            vec![
                (AgentId(1), AgentId(4)),
                (AgentId(2), AgentId(4)),
                (AgentId(3), AgentId(4))
            ]
        );
        let cg = connected_components(&g, &states(&agents)).unwrap();
        let f = fence(&cg.components[0], &agents, &cfg).unwrap();
        assert_eq!(f, ids(&[1, 2, 3, 4]));
    }

    #[test]
    fn fence_stable_under_sample_refinement() {
        let agents = healthy(&THIRTEEN);
        for k in [90, 180, 720] {
            let mut cfg = WorldConfig::with_radii(0.5, 1.5, 0.5);
            cfg.fence_samples = k;
            let members = agents.iter().map(|a| a.id).collect();
            let f = FenceSampler::new(&agents, &cfg).fence_of(&members).unwrap();
            assert_eq!(f, ids(&[6, 7, 8, 9, 10, 11, 12, 13]), "k = {k}");
        }
    }
}
