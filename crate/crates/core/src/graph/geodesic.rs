use num_bigint::BigUint;
use num_traits::{CheckedAdd, One, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use super::{EdgeId, Graph, VertexId};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("food is not reachable from the nest within the allowed edges")]
pub struct NoPath;

#[derive(Debug, Clone)]
enum Counts {
    Small(Vec<u128>),
    Big(Vec<BigUint>),
}

impl Counts {
    fn get(&self, v: VertexId) -> BigUint {
        match self {
            Counts::Small(c) => BigUint::from(c[v]),
            Counts::Big(c) => c[v].clone(),
        }
    }
}

/// Shortest nest-to-food paths of a graph, optionally restricted to a subset
/// of its edges.
///
/// Path counts are exact. They are kept in `u128` while that suffices and
/// switch to arbitrary precision on overflow.
#[derive(Debug, Clone)]
pub struct GeodesicDag<'g> {
    graph: &'g Graph,
    allowed: Option<Vec<bool>>,
    level: Vec<Option<usize>>,
    to_food: Vec<Option<usize>>,
    from_nest: Counts,
    into_food: Counts,
}

impl<'g> GeodesicDag<'g> {
    pub fn new(graph: &'g Graph) -> Result<Self, NoPath> {
        Self::build(graph, None)
    }

    /// Geodesics using only the listed edges.
    pub fn restricted(graph: &'g Graph, edges: &[EdgeId]) -> Result<Self, NoPath> {
        let mut allowed = vec![false; graph.edge_count()];
        for &e in edges {
            allowed[e] = true;
        }
        Self::build(graph, Some(allowed))
    }

    /// Geodesics using only edges whose mask entry is set.
    pub fn with_mask(graph: &'g Graph, mask: &[bool]) -> Result<Self, NoPath> {
        Self::build(graph, Some(mask.to_vec()))
    }

    fn build(graph: &'g Graph, allowed: Option<Vec<bool>>) -> Result<Self, NoPath> {
        let ok = |e: EdgeId| allowed.as_ref().is_none_or(|m| m[e]);
        let level = graph.distances_from(graph.nest(), ok);
        if level[graph.food()].is_none() {
            return Err(NoPath);
        }
        let to_food = graph.distances_from(graph.food(), ok);
        let from_nest = count_layers(graph, &level, graph.nest(), &ok);
        let into_food = count_layers(graph, &to_food, graph.food(), &ok);
        Ok(GeodesicDag { graph, allowed, level, to_food, from_nest, into_food })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// Length of the geodesics.
    pub fn length(&self) -> usize {
        self.level[self.graph.food()].expect("food is reachable")
    }

    /// BFS level of `v` from the nest within the allowed edges.
    pub fn level(&self, v: VertexId) -> Option<usize> {
        self.level[v]
    }

    fn allowed(&self, e: EdgeId) -> bool {
        self.allowed.as_ref().is_none_or(|m| m[e])
    }

    fn on_geodesic(&self, v: VertexId) -> bool {
        matches!((self.level[v], self.to_food[v]), (Some(a), Some(b)) if a + b == self.length())
    }

    /// Number of distinct geodesics.
    pub fn count(&self) -> BigUint {
        self.from_nest.get(self.graph.food())
    }

    /// Number of geodesics, if it fits in a `u128`.
    pub fn count_u128(&self) -> Option<u128> {
        self.count().to_u128()
    }

    /// Number of geodesics passing through `v`.
    pub fn paths_through(&self, v: VertexId) -> BigUint {
        if self.on_geodesic(v) {
            self.from_nest.get(v) * self.into_food.get(v)
        } else {
            BigUint::zero()
        }
    }

    /// Whether `e` lies on at least one geodesic.
    pub fn contains_edge(&self, e: EdgeId) -> bool {
        if !self.allowed(e) {
            return false;
        }
        let [a, b] = self.graph.endpoints(e);
        let fits = |u: VertexId, v: VertexId| {
            matches!((self.level[u], self.to_food[v]), (Some(x), Some(y)) if x + 1 + y == self.length())
        };
        fits(a, b) || fits(b, a)
    }

    /// The geodesic of the given rank, as edges ordered from nest to food.
    ///
    /// Ranks order paths by their predecessor choices walking back from the
    /// food. Panics if `rank >= self.count()`.
    pub fn unrank(&self, rank: &BigUint) -> Vec<EdgeId> {
        match &self.from_nest {
            Counts::Small(counts) => {
                let rank = rank.to_u128().expect("rank below count");
                self.unrank_with(counts, rank)
            }
            Counts::Big(counts) => self.unrank_with(counts, rank.clone()),
        }
    }

    fn unrank_with<T>(&self, counts: &[T], mut rank: T) -> Vec<EdgeId>
    where
        T: Clone + PartialOrd + std::ops::SubAssign,
    {
        let mut path = Vec::with_capacity(self.length());
        let mut v = self.graph.food();
        while v != self.graph.nest() {
            let want = self.level[v].expect("on geodesic") - 1;
            let mut next = None;
            for inc in self.graph.incident(v) {
                if !self.allowed(inc.edge) || self.level[inc.neighbor] != Some(want) {
                    continue;
                }
                let c = &counts[inc.neighbor];
                if rank < *c {
                    next = Some(*inc);
                    break;
                }
                rank -= c.clone();
            }
            let inc = next.expect("rank below count");
            path.push(inc.edge);
            v = inc.neighbor;
        }
        path.reverse();
        path
    }

    /// A geodesic chosen uniformly at random. Consumes no randomness when the
    /// geodesic is unique.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<EdgeId> {
        match &self.from_nest {
            Counts::Small(counts) => {
                let total = counts[self.graph.food()];
                let rank = if total == 1 { 0 } else { rng.random_range(0..total) };
                self.unrank_with(counts, rank)
            }
            Counts::Big(counts) => {
                let rank = uniform_below(&counts[self.graph.food()], rng);
                self.unrank_with(counts, rank)
            }
        }
    }
}

fn count_layers(
    graph: &Graph,
    level: &[Option<usize>],
    root: VertexId,
    ok: &impl Fn(EdgeId) -> bool,
) -> Counts {
    match count_with::<u128>(graph, level, root, ok) {
        Some(c) => Counts::Small(c),
        None => Counts::Big(
            count_with::<BigUint>(graph, level, root, ok).expect("big integers do not overflow"),
        ),
    }
}

fn count_with<T: Clone + Zero + One + CheckedAdd>(
    graph: &Graph,
    level: &[Option<usize>],
    root: VertexId,
    ok: &impl Fn(EdgeId) -> bool,
) -> Option<Vec<T>> {
    let mut order: Vec<VertexId> = (0..graph.vertex_count()).filter(|&v| level[v].is_some()).collect();
    order.sort_by_key(|&v| level[v]);
    let mut counts = vec![T::zero(); graph.vertex_count()];
    counts[root] = T::one();
    for &v in &order {
        if v == root {
            continue;
        }
        let want = level[v].expect("filtered") - 1;
        let mut total = T::zero();
        for inc in graph.incident(v) {
            if ok(inc.edge) && level[inc.neighbor] == Some(want) {
                total = total.checked_add(&counts[inc.neighbor])?;
            }
        }
        counts[v] = total;
    }
    Some(counts)
}

/// Uniform integer in `0..bound` by rejection on the smallest covering power
/// of two.
pub(crate) fn uniform_below<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(!bound.is_zero(), "empty range");
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let spare = (bytes as u64 * 8 - bits) as u32;
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill_bytes(&mut buf);
        buf[bytes - 1] &= 0xffu8 >> spare;
        let candidate = BigUint::from_bytes_le(&buf);
        if &candidate < bound {
            return candidate;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{losange, parse_sp};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn losange_geodesics() {
        let g = losange();
        let dag = GeodesicDag::new(&g).unwrap();
        assert_eq!(dag.count_u128(), Some(2));
        assert_eq!(dag.length(), 2);
        let mut paths = vec![dag.unrank(&0u32.into()), dag.unrank(&1u32.into())];
        paths.sort();
        assert_eq!(paths, vec![vec![0, 1], vec![3, 4]]);
        assert!(!dag.contains_edge(2));

        let dag = GeodesicDag::restricted(&g, &[0, 2, 4]).unwrap();
        assert_eq!(dag.count_u128(), Some(1));
        assert_eq!(dag.length(), 3);
        assert_eq!(dag.unrank(&0u32.into()), vec![0, 2, 4]);

        assert_eq!(GeodesicDag::restricted(&g, &[0, 2]).unwrap_err(), NoPath);
    }

    #[test]
    fn parallel_edges_count_separately() {
        let g = parse_sp("P(e,e)").unwrap().to_graph();
        let dag = GeodesicDag::new(&g).unwrap();
        assert_eq!(dag.count_u128(), Some(2));
        assert_eq!(dag.length(), 1);
        assert_eq!(dag.paths_through(0), BigUint::from(2u32));
    }

    #[test]
    fn overflowing_counts_stay_exact() {
        // 100 stages of two parallel edges in series: 2^100 geodesics fits
        // u128, 2^140 does not.
        let mut expr = parse_sp("P(e,e)").unwrap();
        for _ in 1..140 {
            expr = crate::graph::SpExpr::series(expr, parse_sp("P(e,e)").unwrap());
        }
        let g = expr.to_graph();
        let dag = GeodesicDag::new(&g).unwrap();
        assert_eq!(dag.count(), BigUint::one() << 140usize);
        assert_eq!(dag.count_u128(), None);
        let last = dag.count() - 1u32;
        let path = dag.unrank(&last);
        assert!(g.is_self_avoiding_path(&path));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sampled = dag.sample(&mut rng);
        assert_eq!(sampled.len(), 140);
        assert!(g.is_self_avoiding_path(&sampled));
    }

    #[test]
    fn uniform_below_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let bound = BigUint::from(1000u32);
        let mut seen = [false; 1000];
        for _ in 0..20_000 {
            let x = uniform_below(&bound, &mut rng).to_usize().unwrap();
            seen[x] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}
