//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use antpath_core::graph::{EdgeId, Graph, VertexId};
use nalgebra::{DMatrix, DVector};

/// What the walker remembers about its past.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Memory {
    vertex: VertexId,
    crossed: u64,
    first_entry: Vec<Option<EdgeId>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Uniform choice among the shortest nest-food paths of the crossed edges.
    UniformGeodesic,
    /// Back from the food along first-entry edges.
    LoopErased,
}

/// Exact law of the reinforced edge set (sorted) for one walker with the
/// given edge weights, by an absorbing chain over the walker's memory.
pub fn reinforced_law(graph: &Graph, weights: &[f64], rule: Rule) -> BTreeMap<Vec<EdgeId>, f64> {
    assert!(graph.edge_count() <= 64);
    let start = Memory {
        vertex: graph.nest(),
        crossed: 0,
        first_entry: vec![None; graph.vertex_count()],
    };
    let mut index: HashMap<Memory, usize> = HashMap::new();
    let mut states = vec![start.clone()];
    index.insert(start, 0);
    let mut moves: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut exits: Vec<Vec<(Vec<EdgeId>, f64)>> = Vec::new();
    let mut outcomes: BTreeSet<Vec<EdgeId>> = BTreeSet::new();
    let mut k = 0;
    while k < states.len() {
        let here = states[k].clone();
        let total: f64 = graph.incident(here.vertex).iter().map(|i| weights[i.edge]).sum();
        let mut out = Vec::new();
        let mut done = Vec::new();
        for inc in graph.incident(here.vertex) {
            let p = weights[inc.edge] / total;
            if p == 0.0 {
                continue;
            }
            let mut next = here.clone();
            next.vertex = inc.neighbor;
            next.crossed |= 1 << inc.edge;
            if rule == Rule::LoopErased && inc.neighbor != graph.nest() && next.first_entry[inc.neighbor].is_none() {
                next.first_entry[inc.neighbor] = Some(inc.edge);
            }
            if inc.neighbor == graph.food() {
                for (path, q) in finish(graph, &next, rule) {
                    outcomes.insert(path.clone());
                    done.push((path, p * q));
                }
            } else {
                let j = *index.entry(next.clone()).or_insert_with(|| {
                    states.push(next);
                    states.len() - 1
                });
                out.push((j, p));
            }
        }
        moves.push(out);
        exits.push(done);
        k += 1;
    }
    let n = states.len();
    let mut system = DMatrix::<f64>::identity(n, n);
    for (i, out) in moves.iter().enumerate() {
        for &(j, p) in out {
            system[(i, j)] -= p;
        }
    }
    let lu = system.lu();
    let mut law = BTreeMap::new();
    for path in outcomes {
        let rhs = DVector::from_iterator(
            n,
            exits.iter().map(|d| d.iter().filter(|(q, _)| *q == path).map(|(_, p)| p).sum::<f64>()),
        );
        let sol = lu.solve(&rhs).expect("transient chain");
        law.insert(path, sol[0]);
    }
    law
}

fn finish(graph: &Graph, memory: &Memory, rule: Rule) -> Vec<(Vec<EdgeId>, f64)> {
    match rule {
        Rule::LoopErased => {
            let mut path = Vec::new();
            let mut v = graph.food();
            while v != graph.nest() {
                let e = memory.first_entry[v].expect("visited");
                path.push(e);
                v = graph.opposite(e, v);
            }
            path.sort_unstable();
            vec![(path, 1.0)]
        }
        Rule::UniformGeodesic => {
            let paths = shortest_paths(graph, |e| memory.crossed >> e & 1 == 1);
            let q = 1.0 / paths.len() as f64;
            paths.into_iter().map(|p| (p, q)).collect()
        }
    }
}

/// All shortest nest-food paths using allowed edges, each as a sorted edge
/// list, by exhaustive search over self-avoiding paths.
pub fn shortest_paths(graph: &Graph, allow: impl Fn(EdgeId) -> bool) -> Vec<Vec<EdgeId>> {
    let mut best: Vec<Vec<EdgeId>> = Vec::new();
    let mut on_path = vec![false; graph.vertex_count()];
    let mut edges = Vec::new();
    fn go(
        graph: &Graph,
        allow: &dyn Fn(EdgeId) -> bool,
        v: VertexId,
        on_path: &mut [bool],
        edges: &mut Vec<EdgeId>,
        best: &mut Vec<Vec<EdgeId>>,
    ) {
        if let Some(b) = best.first() {
            if edges.len() > b.len() {
                return;
            }
        }
        if v == graph.food() {
            if best.first().is_some_and(|b| edges.len() < b.len()) {
                best.clear();
            }
            let mut p = edges.clone();
            p.sort_unstable();
            best.push(p);
            return;
        }
        on_path[v] = true;
        for inc in graph.incident(v) {
            if allow(inc.edge) && !on_path[inc.neighbor] {
                edges.push(inc.edge);
                go(graph, allow, inc.neighbor, on_path, edges, best);
                edges.pop();
            }
        }
        on_path[v] = false;
    }
    go(graph, &allow, graph.nest(), &mut on_path, &mut edges, &mut best);
    best
}

/// Random series-parallel expression with exactly `leaves` edges.
pub fn random_sp<R: rand::Rng>(rng: &mut R, leaves: usize) -> antpath_core::graph::SpExpr {
    use antpath_core::graph::SpExpr;
    if leaves == 1 {
        return SpExpr::Base;
    }
    let left = rng.random_range(1..leaves);
    let a = random_sp(rng, left);
    let b = random_sp(rng, leaves - left);
    if rng.random::<bool>() {
        SpExpr::series(a, b)
    } else {
        SpExpr::parallel(a, b)
    }
}
