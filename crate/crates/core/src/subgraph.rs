//! Randomised extraction of connected k-vertex subgraphs, graph
//! isomorphism and subgraph monomorphism search.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::topology::{TopologyError, TopologyGraph, Vertex};

/// Largest graph accepted by [`is_isomorphic`].
pub const ISOMORPHISM_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    pub k: usize,
    pub attempts: usize,
    /// Probability of accepting each unvisited neighbour into the frontier.
    pub p: f64,
    pub seed: u64,
}

impl ExtractOptions {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            attempts: 200,
            p: 0.5,
            seed: 0,
        }
    }
}

/// Pairwise non-isomorphic connected induced subgraphs, in discovery order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SubgraphList {
    pub subgraphs: Vec<TopologyGraph>,
    /// Growths abandoned because the frontier emptied below k vertices.
    pub stalled: usize,
    pub seed: u64,
}

/// Randomised growth from a random start vertex; each unvisited neighbour
/// of a newly added vertex joins the frontier with probability `p`. Growths
/// that stall below `k` vertices are discarded.
pub fn extract_subgraphs(
    graph: &TopologyGraph,
    opts: ExtractOptions,
) -> Result<SubgraphList, TopologyError> {
    let available = graph.vertex_count();
    if opts.k == 0 || opts.k > available {
        return Err(TopologyError::NotEnoughVertices {
            k: opts.k,
            available,
        });
    }
    if !(opts.p > 0.0 && opts.p <= 1.0) {
        return Err(TopologyError::InvalidProbability(opts.p));
    }
    if opts.k > ISOMORPHISM_LIMIT {
        return Err(TopologyError::TooLarge {
            got: opts.k,
            limit: ISOMORPHISM_LIMIT,
        });
    }
    let vertices: Vec<Vertex> = graph.vertices().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = SubgraphList {
        seed: opts.seed,
        ..Default::default()
    };

    for _ in 0..opts.attempts {
        let start = vertices[rng.gen_range(0..vertices.len())];
        let mut chosen: BTreeSet<Vertex> = BTreeSet::new();
        let mut frontier = vec![start];
        while let Some(v) = frontier.pop() {
            if chosen.insert(v) {
                if chosen.len() == opts.k {
                    break;
                }
                for w in graph.neighbors(v)? {
                    if !chosen.contains(&w) && rng.gen_bool(opts.p) {
                        frontier.push(w);
                    }
                }
            }
        }
        if chosen.len() < opts.k {
            out.stalled += 1;
            continue;
        }
        let candidate = graph.induced(chosen)?;
        let mut novel = true;
        for known in &out.subgraphs {
            if is_isomorphic(known, &candidate)? {
                novel = false;
                break;
            }
        }
        if novel {
            out.subgraphs.push(candidate);
        }
    }
    Ok(out)
}

/// Dense view of a graph: vertex list plus adjacency bitmasks.
struct Dense {
    adj: Vec<u64>,
    degree: Vec<u32>,
}

impl Dense {
    fn new(g: &TopologyGraph) -> (Self, Vec<Vertex>) {
        let vertices: Vec<Vertex> = g.vertices().collect();
        let idx = |v: Vertex| vertices.binary_search(&v).unwrap();
        let mut adj = vec![0u64; vertices.len()];
        for (a, b) in g.edges() {
            adj[idx(a)] |= 1 << idx(b);
            adj[idx(b)] |= 1 << idx(a);
        }
        let degree = adj.iter().map(|m| m.count_ones()).collect();
        (Self { adj, degree }, vertices)
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn has(&self, a: usize, b: usize) -> bool {
        self.adj[a] >> b & 1 == 1
    }
}

/// Exhaustive permutation search with degree pruning.
pub fn is_isomorphic(a: &TopologyGraph, b: &TopologyGraph) -> Result<bool, TopologyError> {
    for g in [a, b] {
        if g.vertex_count() > ISOMORPHISM_LIMIT {
            return Err(TopologyError::TooLarge {
                got: g.vertex_count(),
                limit: ISOMORPHISM_LIMIT,
            });
        }
    }
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    let (da, _) = Dense::new(a);
    let (db, _) = Dense::new(b);
    let mut sa = da.degree.clone();
    let mut sb = db.degree.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return Ok(false);
    }
    let mut image = vec![usize::MAX; da.len()];
    let mut used = vec![false; db.len()];
    Ok(extend_iso(&da, &db, 0, &mut image, &mut used))
}

fn extend_iso(a: &Dense, b: &Dense, next: usize, image: &mut [usize], used: &mut [bool]) -> bool {
    if next == a.len() {
        return true;
    }
    for cand in 0..b.len() {
        if used[cand] || a.degree[next] != b.degree[cand] {
            continue;
        }
        let consistent = (0..next).all(|prev| a.has(next, prev) == b.has(cand, image[prev]));
        if !consistent {
            continue;
        }
        image[next] = cand;
        used[cand] = true;
        if extend_iso(a, b, next + 1, image, used) {
            return true;
        }
        used[cand] = false;
    }
    image[next] = usize::MAX;
    false
}

/// All edge-preserving injective maps from `pattern` into `target`
/// (non-edges unconstrained), as `(pattern vertex, target vertex)` lists
/// sorted by pattern vertex. Stops after `limit` results.
pub fn monomorphisms(
    pattern: &TopologyGraph,
    target: &TopologyGraph,
    limit: usize,
) -> Vec<Vec<(Vertex, Vertex)>> {
    let pv: Vec<Vertex> = pattern.vertices().collect();
    let tv: Vec<Vertex> = target.vertices().collect();
    if pv.is_empty() || pv.len() > tv.len() || limit == 0 {
        return Vec::new();
    }
    // Order pattern vertices so each one after the first in its component
    // has an already-placed neighbour.
    let mut order: Vec<Vertex> = Vec::with_capacity(pv.len());
    let mut placed = BTreeSet::new();
    for &root in &pv {
        if placed.contains(&root) {
            continue;
        }
        let mut queue = alloc::collections::VecDeque::from([root]);
        placed.insert(root);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for w in pattern.neighbors(v).unwrap() {
                if placed.insert(w) {
                    queue.push_back(w);
                }
            }
        }
    }

    struct Search<'a> {
        pattern: &'a TopologyGraph,
        target: &'a TopologyGraph,
        order: Vec<Vertex>,
        targets: Vec<Vertex>,
        image: Vec<Option<Vertex>>,
        pattern_index: Vec<Vertex>,
        used: BTreeSet<Vertex>,
        out: Vec<Vec<(Vertex, Vertex)>>,
        limit: usize,
    }

    impl Search<'_> {
        fn pos(&self, v: Vertex) -> usize {
            self.pattern_index.binary_search(&v).unwrap()
        }

        fn go(&mut self, depth: usize) {
            if self.out.len() >= self.limit {
                return;
            }
            if depth == self.order.len() {
                let mut m: Vec<(Vertex, Vertex)> = self
                    .pattern_index
                    .iter()
                    .map(|&v| (v, self.image[self.pos(v)].unwrap()))
                    .collect();
                m.sort_unstable();
                self.out.push(m);
                return;
            }
            let v = self.order[depth];
            let mapped_nbrs: Vec<Vertex> = self
                .pattern
                .neighbors(v)
                .unwrap()
                .filter_map(|w| self.image[self.pos(w)])
                .collect();
            let candidates: Vec<Vertex> = match mapped_nbrs.first() {
                Some(&anchor) => self.target.neighbors(anchor).unwrap().collect(),
                None => self.targets.clone(),
            };
            let need = self.pattern.degree(v);
            for c in candidates {
                if self.used.contains(&c) || self.target.degree(c) < need {
                    continue;
                }
                if !mapped_nbrs.iter().all(|&m| self.target.has_edge(m, c)) {
                    continue;
                }
                let p = self.pos(v);
                self.image[p] = Some(c);
                self.used.insert(c);
                self.go(depth + 1);
                self.used.remove(&c);
                self.image[p] = None;
                if self.out.len() >= self.limit {
                    return;
                }
            }
        }
    }

    let mut search = Search {
        pattern,
        target,
        order,
        targets: tv,
        image: vec![None; pv.len()],
        pattern_index: pv,
        used: BTreeSet::new(),
        out: Vec::new(),
        limit,
    };
    search.go(0);
    search.out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(n: u32) -> TopologyGraph {
        TopologyGraph::from_edges(0..n, (1..n).map(|v| (0, v))).unwrap()
    }

    #[test]
    fn isomorphism_basics() {
        let p1 = TopologyGraph::from_edges([1, 2, 3], [(1, 2), (2, 3)]).unwrap();
        let p2 = TopologyGraph::from_edges([7, 8, 9], [(9, 7), (7, 8)]).unwrap();
        assert!(is_isomorphic(&p1, &p2).unwrap());
        assert!(!is_isomorphic(&p1, &star(4)).unwrap());
        // T-shape vs 4-path: (1,1,1,3) vs (1,1,2,2).
        assert!(!is_isomorphic(&star(4), &TopologyGraph::path(4)).unwrap());
        assert!(is_isomorphic(&TopologyGraph::cycle(6), &TopologyGraph::cycle(6)).unwrap());
        let big = TopologyGraph::path(13);
        assert!(matches!(
            is_isomorphic(&big, &big),
            Err(TopologyError::TooLarge { .. })
        ));
    }

    #[test]
    fn same_degrees_different_graphs() {
        // Two triangles vs a 6-cycle: all degrees 2.
        let triangles =
            TopologyGraph::from_edges(0..6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
                .unwrap();
        assert!(!is_isomorphic(&triangles, &TopologyGraph::cycle(6)).unwrap());
    }

    #[test]
    fn four_cycle_has_one_class() {
        let list = extract_subgraphs(
            &TopologyGraph::cycle(4),
            ExtractOptions {
                attempts: 100,
                ..ExtractOptions::new(4)
            },
        )
        .unwrap();
        assert_eq!(list.subgraphs.len(), 1);
        assert_eq!(list.subgraphs[0].edge_count(), 4);
    }

    #[test]
    fn path_has_one_three_vertex_class() {
        let list = extract_subgraphs(
            &TopologyGraph::path(6),
            ExtractOptions {
                attempts: 300,
                ..ExtractOptions::new(3)
            },
        )
        .unwrap();
        assert_eq!(list.subgraphs.len(), 1);
        assert!(list.stalled > 0);
    }

    #[test]
    fn extraction_rejects_bad_arguments() {
        let g = TopologyGraph::path(3);
        assert!(extract_subgraphs(&g, ExtractOptions::new(4)).is_err());
        assert!(extract_subgraphs(
            &g,
            ExtractOptions {
                p: 0.0,
                ..ExtractOptions::new(2)
            }
        )
        .is_err());
    }

    #[test]
    fn extraction_is_deterministic() {
        let g = TopologyGraph::cycle(7);
        let opts = ExtractOptions {
            seed: 42,
            ..ExtractOptions::new(4)
        };
        assert_eq!(
            extract_subgraphs(&g, opts).unwrap(),
            extract_subgraphs(&g, opts).unwrap()
        );
    }

    #[test]
    fn path_into_cycle_monomorphisms() {
        let p = TopologyGraph::path(3);
        let c = TopologyGraph::cycle(4);
        assert_eq!(monomorphisms(&p, &c, usize::MAX).len(), 8);
        assert_eq!(monomorphisms(&p, &c, 3).len(), 3);
        assert!(monomorphisms(&star(4), &TopologyGraph::path(6), 100).is_empty());
        let own = monomorphisms(&c, &c, 100);
        assert!(own.contains(&vec![(0, 0), (1, 1), (2, 2), (3, 3)]));
    }
}
