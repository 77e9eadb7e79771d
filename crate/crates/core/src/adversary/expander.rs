//! Random 3-regular bipartite expanders and their extensions by an extra
//! vertex class attached to one side.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::AdversaryError;

/// A simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// Adds an edge; fails on loops and repeated edges.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), AdversaryError> {
        if u == v {
            return Err(AdversaryError::NotSimple(format!("loop at {u}")));
        }
        if !self.adj[u].insert(v) {
            return Err(AdversaryError::NotSimple(format!("repeated edge {u}-{v}")));
        }
        self.adj[v].insert(u);
        Ok(())
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, nb) in self.adj.iter().enumerate() {
            for &v in nb.range(u + 1..) {
                out.push((u, v));
            }
        }
        out
    }

    /// Two-coloring by breadth-first search.
    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![None; self.len()];
        for s in 0..self.len() {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            let mut queue = vec![s];
            while let Some(u) = queue.pop() {
                let cu = color[u].unwrap();
                for &v in &self.adj[u] {
                    match color[v] {
                        None => {
                            color[v] = Some(!cu);
                            queue.push(v);
                        }
                        Some(cv) if cv == cu => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    /// `|N(S)|`, the number of vertices adjacent to some member of `set`.
    pub fn neighborhood_size(&self, set: &[usize]) -> usize {
        let mut nb = HashSet::new();
        for &v in set {
            nb.extend(self.adj[v].iter().copied());
        }
        nb.len()
    }

    /// One `u v` pair per line, 0-indexed.
    pub fn to_edge_list(&self) -> String {
        self.edges()
            .iter()
            .map(|(u, v)| format!("{u} {v}\n"))
            .collect()
    }
}

/// A bipartite graph with sides `L = 0..n` and `R = n..2n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteExpander {
    pub n: usize,
    pub graph: Graph,
    /// Expansion constant the graph was checked against.
    pub alpha: f64,
}

impl BipartiteExpander {
    pub fn left(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn right(&self) -> std::ops::Range<usize> {
        self.n..2 * self.n
    }

    pub fn is_cubic(&self) -> bool {
        (0..2 * self.n).all(|v| self.graph.degree(v) == 3)
    }
}

pub const DEFAULT_ALPHA: f64 = 0.1;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_ATTEMPTS: usize = 64;
/// Independent sampling rounds a candidate must survive before it is returned.
pub const CONFIRM_ROUNDS: usize = 4;
/// Largest set size screened exhaustively before sampling.
pub const EXACT_SCREEN: usize = 4;

/// A random 3-regular graph by the configuration model, rejecting loops
/// and repeated edges.
pub fn random_cubic(n: usize, rng: &mut ChaCha8Rng) -> Result<Graph, AdversaryError> {
    if n < 4 || n % 2 == 1 {
        return Err(AdversaryError::InvalidSize(format!(
            "a 3-regular graph needs an even vertex count >= 4, got {n}"
        )));
    }
    'retry: for _ in 0..100_000 {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| [v, v, v]).collect();
        stubs.shuffle(rng);
        let mut g = Graph::new(n);
        for pair in stubs.chunks(2) {
            if g.add_edge(pair[0], pair[1]).is_err() {
                continue 'retry;
            }
        }
        return Ok(g);
    }
    Err(AdversaryError::SeedExhausted(100_000))
}

/// The bipartite double cover: `u_i ~ w_j` iff `v_i ~ v_j`.
pub fn double_cover(base: &Graph) -> Graph {
    let n = base.len();
    let mut g = Graph::new(2 * n);
    for (i, j) in base.edges() {
        g.add_edge(i, n + j).expect("double cover of a simple graph is simple");
        g.add_edge(j, n + i).expect("double cover of a simple graph is simple");
    }
    g
}

// Union of three random perfect matchings between L and R, used when the
// side size is odd and no cubic base graph exists.
fn random_bipartite_cubic(n: usize, rng: &mut ChaCha8Rng) -> Result<Graph, AdversaryError> {
    'retry: for _ in 0..100_000 {
        let mut g = Graph::new(2 * n);
        for _ in 0..3 {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            for (i, &j) in perm.iter().enumerate() {
                if g.add_edge(i, n + j).is_err() {
                    continue 'retry;
                }
            }
        }
        return Ok(g);
    }
    Err(AdversaryError::SeedExhausted(100_000))
}

/// A 3-regular bipartite graph with sides of size `n` that passes the
/// sampled expansion check. Even `n` uses the double cover of a random
/// cubic graph; odd `n` uses three random perfect matchings.
pub fn random_expander(n: usize, seed: u64) -> Result<BipartiteExpander, AdversaryError> {
    random_expander_with(n, seed, DEFAULT_ALPHA, DEFAULT_SAMPLES, DEFAULT_ATTEMPTS)
}

pub fn random_expander_with(
    n: usize,
    seed: u64,
    alpha: f64,
    samples: usize,
    attempts: usize,
) -> Result<BipartiteExpander, AdversaryError> {
    if n < 3 {
        return Err(AdversaryError::InvalidSize(format!(
            "expander sides need at least 3 vertices, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..attempts {
        let graph = if n.is_multiple_of(2) && n >= 4 {
            double_cover(&random_cubic(n, &mut rng)?)
        } else {
            random_bipartite_cubic(n, &mut rng)?
        };
        let g = BipartiteExpander { n, graph, alpha };
        let limit = ((alpha * n as f64).floor() as usize).min(EXACT_SCREEN);
        let left: Vec<usize> = g.left().collect();
        let right: Vec<usize> = g.right().collect();
        if small_set_violation(&g.graph, &left, limit, 1.99).is_some()
            || small_set_violation(&g.graph, &right, limit, 1.99).is_some()
        {
            continue;
        }
        let seeds: Vec<u64> = (0..CONFIRM_ROUNDS).map(|_| rng.gen()).collect();
        if seeds.iter().all(|&s| sampled_expansion_check(&g, alpha, samples, s)) {
            return Ok(g);
        }
    }
    Err(AdversaryError::SeedExhausted(attempts))
}

/// Disjoint copies of the double cover of K4: cubic and bipartite, but a
/// whole side of one copy has only four neighbors.
pub fn negative_control(copies: usize) -> BipartiteExpander {
    let n = 4 * copies;
    let mut base = Graph::new(n);
    for c in 0..copies {
        for a in 0..4 {
            for b in a + 1..4 {
                base.add_edge(4 * c + a, 4 * c + b).unwrap();
            }
        }
    }
    BipartiteExpander {
        n,
        graph: double_cover(&base),
        alpha: DEFAULT_ALPHA,
    }
}

/// Samples uniform subsets of `pool` with sizes in `1..=max_size` and
/// checks `|N(S)| >= factor * |S|`.
pub fn sampled_set_expansion(
    graph: &Graph,
    pool: &[usize],
    max_size: usize,
    factor: f64,
    samples: usize,
    seed: u64,
) -> bool {
    let max_size = max_size.min(pool.len());
    if max_size == 0 {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).all(|_| {
        let size = rng.gen_range(1..=max_size);
        let set: Vec<usize> = pool.choose_multiple(&mut rng, size).copied().collect();
        graph.neighborhood_size(&set) as f64 >= factor * set.len() as f64
    })
}

/// Exhaustively searches subsets of `pool` of size at most `max_size` for
/// one with `|N(S)| < factor * |S|`. Only sets that are connected through
/// shared neighbors are enumerated; a violating set always has such a
/// violating component.
pub fn small_set_violation(
    graph: &Graph,
    pool: &[usize],
    max_size: usize,
    factor: f64,
) -> Option<Vec<usize>> {
    let in_pool: HashSet<usize> = pool.iter().copied().collect();
    let two_hop = |v: usize| -> BTreeSet<usize> {
        graph
            .neighbors(v)
            .iter()
            .flat_map(|&w| graph.neighbors(w).iter().copied())
            .filter(|&u| u != v && in_pool.contains(&u))
            .collect()
    };
    fn grow(
        root: usize,
        set: &mut Vec<usize>,
        ext: BTreeSet<usize>,
        max_size: usize,
        factor: f64,
        graph: &Graph,
        two_hop: &dyn Fn(usize) -> BTreeSet<usize>,
    ) -> Option<Vec<usize>> {
        if (graph.neighborhood_size(set) as f64) < factor * set.len() as f64 {
            return Some(set.clone());
        }
        if set.len() == max_size {
            return None;
        }
        let near: BTreeSet<usize> = set.iter().flat_map(|&v| two_hop(v)).collect();
        let mut ext = ext;
        while let Some(w) = ext.pop_first() {
            let mut next = ext.clone();
            next.extend(
                two_hop(w)
                    .into_iter()
                    .filter(|&u| u > root && !set.contains(&u) && !near.contains(&u)),
            );
            set.push(w);
            let found = grow(root, set, next, max_size, factor, graph, two_hop);
            set.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
    if max_size == 0 {
        return None;
    }
    for &v in pool {
        let ext: BTreeSet<usize> = two_hop(v).into_iter().filter(|&u| u > v).collect();
        if let Some(s) = grow(v, &mut vec![v], ext, max_size, factor, graph, &two_hop) {
            return Some(s);
        }
    }
    None
}

/// Checks `|N(S)| >= 1.99 |S|` on sampled subsets of each side with
/// `|S| <= alpha n`.
pub fn sampled_expansion_check(g: &BipartiteExpander, alpha: f64, samples: usize, seed: u64) -> bool {
    let max_size = (alpha * g.n as f64).floor() as usize;
    let left: Vec<usize> = g.left().collect();
    let right: Vec<usize> = g.right().collect();
    let half = samples.div_ceil(2);
    sampled_set_expansion(&g.graph, &left, max_size, 1.99, half, seed)
        && sampled_set_expansion(&g.graph, &right, max_size, 1.99, samples - half, seed ^ 0x9e37_79b9)
}

fn with_z(g: &BipartiteExpander, attach_offset: usize) -> Result<Graph, AdversaryError> {
    let n = g.n;
    if !n.is_multiple_of(3) {
        return Err(AdversaryError::NotMultipleOfThree(n));
    }
    let mut out = Graph::new(2 * n + n / 3);
    for (u, v) in g.graph.edges() {
        out.add_edge(u, v)?;
    }
    for i in 0..n / 3 {
        for k in 0..3 {
            out.add_edge(2 * n + i, attach_offset + 3 * i + k)?;
        }
    }
    Ok(out)
}

/// Adds `n/3` vertices `z_i = 2n + i`, each joined to three distinct
/// vertices of `R` that no other `z` uses.
pub fn build_gml(g: &BipartiteExpander) -> Result<Graph, AdversaryError> {
    with_z(g, g.n)
}

/// The mirror image of [`build_gml`], attaching the extra vertices to `L`.
pub fn build_gmr(g: &BipartiteExpander) -> Result<Graph, AdversaryError> {
    with_z(g, 0)
}
