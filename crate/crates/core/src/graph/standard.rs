use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::{Graph, GraphError, VertexId};

/// Vertex ids of the losange graph.
pub mod losange_vertex {
    pub const NEST: usize = 0;
    pub const LEFT: usize = 1;
    pub const RIGHT: usize = 2;
    pub const FOOD: usize = 3;
}

/// The four-vertex diamond with a middle edge.
///
/// Edge ids: 0 = N-left, 1 = left-F, 2 = left-right (the middle edge),
/// 3 = N-right, 4 = right-F.
pub fn losange() -> Graph {
    let labels = ["N", "l", "r", "F"].map(String::from).to_vec();
    Graph::with_labels(labels, vec![[0, 1], [1, 3], [1, 2], [0, 2], [2, 3]], 0, 3)
        .expect("losange is valid")
}

/// Two disjoint paths of `length` edges from the nest to a hub `P`, and one
/// edge from `P` to the food.
///
/// Vertex 0 is N, 1 is P, 2 is F. Left path edges have ids `0..length`
/// (ordered from N), right path edges `length..2*length`, and the P-F edge is
/// `2*length`.
pub fn counterexample(length: usize) -> Result<Graph, GraphError> {
    if length == 0 {
        return Err(GraphError::InvalidParameter("counterexample length must be at least 1".into()));
    }
    let mut labels: Vec<String> = ["N", "P", "F"].map(String::from).to_vec();
    let mut edges = Vec::with_capacity(2 * length + 1);
    for side in ["a", "b"] {
        let mut prev: VertexId = 0;
        for k in 1..length {
            let v = labels.len();
            labels.push(format!("{side}{k}"));
            edges.push([prev, v]);
            prev = v;
        }
        edges.push([prev, 1]);
    }
    edges.push([1, 2]);
    Graph::with_labels(labels, edges, 0, 2)
}

/// A direct nest-food edge (id 0) in parallel with a two-edge path through a
/// middle vertex (ids 1 and 2).
pub fn sublinear_demo() -> Graph {
    let labels = ["N", "F", "m"].map(String::from).to_vec();
    Graph::with_labels(labels, vec![[0, 1], [0, 2], [2, 1]], 0, 1).expect("triangle is valid")
}

/// Two Sierpiński gaskets of equal depth glued along their bases.
///
/// Vertices live on triangular-lattice coordinates `(i, j)`. The upper gasket
/// has corners `(0,0)`, `(s,0)`, `(0,s)` with `s = 2^(depth-1)`; the lower
/// gasket is its image under `(i, j) -> (i + j, -j)`, which fixes the shared
/// base. The nest is the upper apex `(0, s)` and the food the lower apex
/// `(s, -s)`. Depth 1 is the losange. Vertex ids follow the sorted order of
/// coordinates and edge ids the sorted order of endpoint pairs.
pub fn double_sierpinski(depth: u32) -> Result<Graph, GraphError> {
    if depth == 0 || depth > 12 {
        return Err(GraphError::InvalidParameter("sierpinski depth must be in 1..=12".into()));
    }
    let side = 1i64 << (depth - 1);
    let mut triangles = Vec::new();
    gasket((0, 0), side, &mut triangles);

    let mut segments = BTreeSet::new();
    for &[a, b, c] in &triangles {
        for (p, q) in [(a, b), (b, c), (a, c)] {
            for (p, q) in [(p, q), (mirror(p), mirror(q))] {
                segments.insert(if p < q { (p, q) } else { (q, p) });
            }
        }
    }
    let points: BTreeSet<(i64, i64)> = segments.iter().flat_map(|&(p, q)| [p, q]).collect();
    let points: Vec<(i64, i64)> = points.into_iter().collect();
    let id = |p: (i64, i64)| points.binary_search(&p).expect("known point");
    let mut edges: Vec<[VertexId; 2]> = segments
        .iter()
        .map(|&(p, q)| {
            let (u, v) = (id(p), id(q));
            [u.min(v), u.max(v)]
        })
        .collect();
    edges.sort();
    let labels = points.iter().map(|(i, j)| format!("({i},{j})")).collect();
    Graph::with_labels(labels, edges, id((0, side)), id((side, -side)))
}

type Point = (i64, i64);

fn mirror((i, j): Point) -> Point {
    (i + j, -j)
}

fn gasket(origin: Point, side: i64, out: &mut Vec<[Point; 3]>) {
    let (i, j) = origin;
    if side == 1 {
        out.push([(i, j), (i + 1, j), (i, j + 1)]);
        return;
    }
    let half = side / 2;
    gasket((i, j), half, out);
    gasket((i + half, j), half, out);
    gasket((i, j + half), half, out);
}

/// A named standard graph, as written in configuration files and on the
/// command line: `losange`, `counterexample:<L>`, `sublinear_demo`,
/// `double_sierpinski:<depth>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardGraph {
    Losange,
    Counterexample(usize),
    SublinearDemo,
    DoubleSierpinski(u32),
}

impl StandardGraph {
    pub fn build(self) -> Result<Graph, GraphError> {
        match self {
            StandardGraph::Losange => Ok(losange()),
            StandardGraph::Counterexample(length) => counterexample(length),
            StandardGraph::SublinearDemo => Ok(sublinear_demo()),
            StandardGraph::DoubleSierpinski(depth) => double_sierpinski(depth),
        }
    }
}

impl fmt::Display for StandardGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StandardGraph::Losange => write!(f, "losange"),
            StandardGraph::Counterexample(length) => write!(f, "counterexample:{length}"),
            StandardGraph::SublinearDemo => write!(f, "sublinear_demo"),
            StandardGraph::DoubleSierpinski(depth) => write!(f, "double_sierpinski:{depth}"),
        }
    }
}

impl FromStr for StandardGraph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, arg) = match s.split_once(':') {
            Some((name, arg)) => (name.trim(), Some(arg.trim())),
            None => (s.trim(), None),
        };
        let number = |what: &str| -> Result<u64, GraphError> {
            arg.ok_or_else(|| GraphError::InvalidParameter(format!("{name} needs a {what}")))?
                .parse()
                .map_err(|_| GraphError::InvalidParameter(format!("bad {what} for {name}")))
        };
        match (name, arg) {
            ("losange", None) => Ok(StandardGraph::Losange),
            ("sublinear_demo", None) => Ok(StandardGraph::SublinearDemo),
            ("counterexample", _) => Ok(StandardGraph::Counterexample(number("length")? as usize)),
            ("double_sierpinski", _) => Ok(StandardGraph::DoubleSierpinski(number("depth")? as u32)),
            _ => Err(GraphError::InvalidParameter(format!("unknown graph '{s}'"))),
        }
    }
}
