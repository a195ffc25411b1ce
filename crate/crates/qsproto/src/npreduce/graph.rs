//! Directed graphs and Hamiltonian cycles.

use crate::bits::Bits;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HamiltonicityInstance {
    vertices: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) out of range for {2} vertices")]
    OutOfRange(usize, usize, usize),
}

impl HamiltonicityInstance {
    pub fn new(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= vertices || v >= vertices {
                return Err(GraphError::OutOfRange(u, v, vertices));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            set.insert((u, v));
        }
        Ok(HamiltonicityInstance { vertices, edges: set })
    }

    pub fn complete(v: usize) -> Self {
        Self::new(v, (0..v).flat_map(|a| (0..v).filter(move |&b| b != a).map(move |b| (a, b)))).unwrap()
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u, v))
    }

    /// Row-major `v * v` adjacency bits.
    pub fn adjacency(&self) -> Vec<bool> {
        let v = self.vertices;
        let mut m = vec![false; v * v];
        for &(a, b) in &self.edges {
            m[a * v + b] = true;
        }
        m
    }

    pub fn is_cycle(&self, c: &CycleWitness) -> bool {
        let v = self.vertices;
        if v == 0 || c.0.len() != v {
            return false;
        }
        let mut seen = vec![false; v];
        for &x in &c.0 {
            if x >= v || seen[x] {
                return false;
            }
            seen[x] = true;
        }
        (0..v).all(|i| self.has_edge(c.0[i], c.0[(i + 1) % v]))
    }

    /// Exact search: branches on successor choices, propagating forced
    /// edges and excluding edges that would close a short cycle.
    /// Exponential in the worst case; meant for test oracles.
    pub fn find_cycle(&self) -> Option<CycleWitness> {
        let v = self.vertices;
        if v < 2 {
            return None;
        }
        let mut st = SearchState {
            v,
            cand: self.adjacency(),
            succ: vec![None; v],
            pred: vec![None; v],
            head: (0..v).collect(),
            tail: (0..v).collect(),
            size: vec![1; v],
        };
        if !st.propagate() {
            return None;
        }
        let succ = solve(st)?;
        let mut cycle = vec![0];
        while cycle.len() < v {
            cycle.push(succ[*cycle.last().unwrap()]);
        }
        Some(CycleWitness(cycle))
    }
}

/// Partial successor function during [`HamiltonicityInstance::find_cycle`].
/// `head[t]` is the first vertex of the fragment ending at `t`, `tail[h]` the
/// last vertex of the fragment starting at `h`; valid at fragment ends only.
#[derive(Clone)]
struct SearchState {
    v: usize,
    cand: Vec<bool>,
    succ: Vec<Option<usize>>,
    pred: Vec<Option<usize>>,
    head: Vec<usize>,
    tail: Vec<usize>,
    /// Vertex count of the fragment starting at a head.
    size: Vec<usize>,
}

impl SearchState {
    fn out_count(&self, u: usize) -> usize {
        (0..self.v).filter(|&x| self.cand[u * self.v + x]).count()
    }

    fn in_count(&self, w: usize) -> usize {
        (0..self.v).filter(|&x| self.cand[x * self.v + w]).count()
    }

    fn choose(&mut self, u: usize, w: usize) -> bool {
        if !self.cand[u * self.v + w] {
            return false;
        }
        let (h, t) = (self.head[u], self.tail[w]);
        if h == w && self.size[h] < self.v {
            return false;
        }
        for x in 0..self.v {
            self.cand[u * self.v + x] = x == w;
            self.cand[x * self.v + w] = x == u;
        }
        self.succ[u] = Some(w);
        self.pred[w] = Some(u);
        if h != w {
            self.head[t] = h;
            self.tail[h] = t;
            self.size[h] += self.size[w];
            // Closing the fragment early would make a short cycle.
            if self.size[h] < self.v {
                self.cand[t * self.v + h] = false;
            }
        }
        true
    }

    /// Applies forced choices until none remain; false on a contradiction.
    fn propagate(&mut self) -> bool {
        loop {
            let mut progress = false;
            for u in 0..self.v {
                if self.succ[u].is_none() {
                    match self.out_count(u) {
                        0 => return false,
                        1 => {
                            let w = (0..self.v).find(|&x| self.cand[u * self.v + x]).unwrap();
                            if !self.choose(u, w) {
                                return false;
                            }
                            progress = true;
                        }
                        _ => {}
                    }
                }
                if self.pred[u].is_none() {
                    match self.in_count(u) {
                        0 => return false,
                        1 => {
                            let x = (0..self.v).find(|&x| self.cand[x * self.v + u]).unwrap();
                            if !self.choose(x, u) {
                                return false;
                            }
                            progress = true;
                        }
                        _ => {}
                    }
                }
            }
            if !progress {
                return true;
            }
        }
    }
}

fn solve(st: SearchState) -> Option<Vec<usize>> {
    let open = (0..st.v).filter(|&u| st.succ[u].is_none()).min_by_key(|&u| st.out_count(u));
    let Some(u) = open else {
        return Some(st.succ.iter().map(|s| s.unwrap()).collect());
    };
    for w in (0..st.v).filter(|&w| st.cand[u * st.v + w]) {
        let mut next = st.clone();
        if next.choose(u, w) && next.propagate() {
            if let Some(s) = solve(next) {
                return Some(s);
            }
        }
    }
    None
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: usize,
    edges: Vec<[usize; 2]>,
}

impl Serialize for HamiltonicityInstance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphJson {
            vertices: self.vertices,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HamiltonicityInstance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let g = GraphJson::deserialize(d)?;
        HamiltonicityInstance::new(g.vertices, g.edges.into_iter().map(|[a, b]| (a, b)))
            .map_err(serde::de::Error::custom)
    }
}

/// Vertex order of a Hamiltonian cycle; the wrap-around edge is implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleWitness(pub Vec<usize>);

/// Bits per vertex index in witness encodings.
pub fn index_width(v: usize) -> usize {
    if v <= 2 {
        1
    } else {
        (usize::BITS - (v - 1).leading_zeros()) as usize
    }
}

impl CycleWitness {
    pub fn to_bits(&self, v: usize) -> Bits {
        let w = index_width(v);
        let mut out = Bits::new();
        for &x in &self.0 {
            out.extend(&Bits::from_u64(x as u64, w));
        }
        out
    }

    /// Decodes `v` fixed-width indices; no validity check.
    pub fn from_bits(bits: &Bits, v: usize) -> Option<Self> {
        let w = index_width(v);
        (bits.len() == v * w && v > 0).then(|| CycleWitness(bits.chunks(w).iter().map(|c| c.to_u64() as usize).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_self_loops_and_range() {
        assert_eq!(HamiltonicityInstance::new(3, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert!(HamiltonicityInstance::new(3, [(0, 3)]).is_err());
    }

    #[test]
    fn json_format() {
        let g = HamiltonicityInstance::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"vertices":3,"edges":[[0,1],[1,2],[2,0]]}"#);
        assert_eq!(serde_json::from_str::<HamiltonicityInstance>(&s).unwrap(), g);
    }

    #[test]
    fn cycle_checks_and_search() {
        let tri = HamiltonicityInstance::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(tri.is_cycle(&CycleWitness(vec![1, 2, 0])));
        assert!(!tri.is_cycle(&CycleWitness(vec![0, 2, 1])));
        assert!(!tri.is_cycle(&CycleWitness(vec![0, 1, 1])));
        assert!(tri.find_cycle().is_some());
        let path = HamiltonicityInstance::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(path.find_cycle().is_none());
        let c = tri.find_cycle().unwrap();
        assert_eq!(CycleWitness::from_bits(&c.to_bits(3), 3), Some(c));
    }

    fn brute_force(g: &HamiltonicityInstance) -> bool {
        fn perms(rest: &mut Vec<usize>, path: &mut Vec<usize>, g: &HamiltonicityInstance) -> bool {
            if rest.is_empty() {
                return g.is_cycle(&CycleWitness(path.clone()));
            }
            for i in 0..rest.len() {
                let x = rest.remove(i);
                path.push(x);
                let ok = perms(rest, path, g);
                path.pop();
                rest.insert(i, x);
                if ok {
                    return true;
                }
            }
            false
        }
        perms(&mut (1..g.vertices()).collect(), &mut vec![0], g)
    }

    proptest::proptest! {
        #[test]
        fn search_matches_brute_force(v in 2usize..7, mask in proptest::prelude::any::<u64>()) {
            let edges = (0..v * v).filter(|&k| k / v != k % v && (mask >> (k % 64)) & 1 == 1).map(|k| (k / v, k % v));
            let g = HamiltonicityInstance::new(v, edges).unwrap();
            let found = g.find_cycle();
            proptest::prop_assert_eq!(found.is_some(), brute_force(&g));
            if let Some(c) = found {
                proptest::prop_assert!(g.is_cycle(&c));
            }
        }
    }
}
