#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use contam_core::wpc::IdSet;
use contam_core::{AgentId, ComponentView, HealthState};
use rand::Rng;

pub type Adjacency = BTreeMap<AgentId, IdSet>;

pub fn id(i: u32) -> AgentId {
    AgentId(i)
}

pub fn adjacency(n: u32, edges: &[(u32, u32)]) -> Adjacency {
    let mut adj: Adjacency = (1..=n).map(|i| (id(i), IdSet::new())).collect();
    for &(a, b) in edges {
        adj.get_mut(&id(a)).unwrap().insert(id(b));
        adj.get_mut(&id(b)).unwrap().insert(id(a));
    }
    adj
}

pub fn component(adj: &Adjacency) -> ComponentView {
    let edges: Vec<(AgentId, AgentId)> = adj
        .iter()
        .flat_map(|(&a, nb)| nb.iter().map(move |&b| (a, b)))
        .collect();
    ComponentView::from_edges(HealthState::Healthy, edges, adj.keys().copied())
}

pub fn is_connected(adj: &Adjacency) -> bool {
    let Some(&start) = adj.keys().next() else {
        return false;
    };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in &adj[&v] {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == adj.len()
}

/// Random spanning tree plus each remaining edge with probability `p`.
pub fn random_connected<R: Rng>(n: u32, p: f64, rng: &mut R) -> Adjacency {
    let mut edges = Vec::new();
    for v in 2..=n {
        edges.push((rng.random_range(1..v), v));
    }
    for a in 1..=n {
        for b in a + 1..=n {
            if !edges.contains(&(a, b)) && rng.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    adjacency(n, &edges)
}

/// Every connected labelled graph on `n` vertices.
pub fn all_connected(n: u32) -> Vec<Adjacency> {
    let pairs: Vec<(u32, u32)> = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            let edges: Vec<(u32, u32)> = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, e)| *e)
                .collect();
            adjacency(n, &edges)
        })
        .filter(is_connected)
        .collect()
}

/// Attackers needed by a one-at-a-time conquest order: before the `k`-th
/// conquest `r + k` attackers are on hand and the target demands its degree
/// plus one, minus its already conquered neighbors.
pub fn singular_cost(adj: &Adjacency, order: &[AgentId]) -> i64 {
    let mut conquered = IdSet::new();
    let mut required = 0i64;
    for (k, a) in order.iter().enumerate() {
        let demand = adj[a].len() as i64 + 1 - adj[a].intersection(&conquered).count() as i64;
        required = required.max(demand - k as i64);
        conquered.insert(*a);
    }
    required
}

/// Minimum of `singular_cost` over every order of the members.
pub fn min_over_orders(adj: &Adjacency) -> i64 {
    fn go(adj: &Adjacency, order: &mut Vec<AgentId>, left: &mut Vec<AgentId>, best: &mut i64) {
        if left.is_empty() {
            *best = (*best).min(singular_cost(adj, order));
            return;
        }
        for k in 0..left.len() {
            let v = left.remove(k);
            order.push(v);
            go(adj, order, left, best);
            order.pop();
            left.insert(k, v);
        }
    }
    let mut best = i64::MAX;
    go(adj, &mut Vec::new(), &mut adj.keys().copied().collect(), &mut best);
    best
}
