//! Multigraphs with distinguishable parallel edges, and their edge-list text
//! format.
//!
//! Every edge has an id, so parallel edges stay distinct for counting. A loop
//! at `v` appears twice in `v`'s incidence list, matching its contribution of
//! two to the degree.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(u32, u32)>,
    /// `incidence[v]` lists `(other endpoint, edge id)`.
    incidence: Vec<Vec<(u32, u32)>>,
}

impl Multigraph {
    pub fn new(n: usize) -> Self {
        Multigraph { n, edges: Vec::new(), incidence: vec![Vec::new(); n] }
    }

    /// Builds a graph from an edge list; each entry is one edge.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                g.push_edge(u, v);
            }
        }
        g
    }

    /// Complete bipartite graph with parts `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let mut g = Self::new(a + b);
        for u in 0..a as u32 {
            for v in a as u32..(a + b) as u32 {
                g.push_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::new(n);
        for v in 0..n as u32 {
            g.push_edge(v, (v + 1) % n as u32);
        }
        g
    }

    pub fn petersen() -> Self {
        let mut g = Self::new(10);
        for i in 0..5u32 {
            g.push_edge(i, (i + 1) % 5);
            g.push_edge(i, i + 5);
            g.push_edge(5 + i, 5 + (i + 2) % 5);
        }
        g
    }

    /// Adds an edge and returns its id.
    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<u32> {
        if u as usize >= self.n || v as usize >= self.n {
            return Err(Error::invalid(format!("edge ({u},{v}) out of range for n={}", self.n)));
        }
        Ok(self.push_edge(u, v))
    }

    pub(crate) fn push_edge(&mut self, u: u32, v: u32) -> u32 {
        let id = self.edges.len() as u32;
        self.edges.push((u.min(v), u.max(v)));
        self.incidence[u as usize].push((v, id));
        self.incidence[v as usize].push((u, id));
        id
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(min, max)` endpoint pairs, indexed by edge id.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// `(other endpoint, edge id)` for every edge end at `v`.
    pub fn incidence(&self, v: u32) -> &[(u32, u32)] {
        &self.incidence[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.incidence[v as usize].len()
    }

    pub fn is_regular(&self, d: usize) -> bool {
        self.incidence.iter().all(|inc| inc.len() == d)
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(u, v)| u == v).count()
    }

    /// Multiplicity of every vertex pair that carries an edge.
    pub fn multiplicities(&self) -> BTreeMap<(u32, u32), u64> {
        let mut out = BTreeMap::new();
        for &e in &self.edges {
            *out.entry(e).or_insert(0) += 1;
        }
        out
    }

    pub fn has_multi_edge(&self) -> bool {
        self.multiplicities().iter().any(|(&(u, v), &c)| u != v && c > 1)
    }

    pub fn is_simple(&self) -> bool {
        self.loop_count() == 0 && !self.has_multi_edge()
    }

    /// Sorted, deduplicated neighbour lists without loops.
    pub fn simple_adjacency(&self) -> Vec<Vec<u32>> {
        self.incidence
            .iter()
            .enumerate()
            .map(|(v, inc)| {
                let mut nb: Vec<u32> = inc.iter().map(|&(w, _)| w).filter(|&w| w as usize != v).collect();
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect()
    }

    /// Edge-list text: a header `# n=<n> d=<d>` (the `d=` field only when
    /// the graph is regular) followed by `u v multiplicity` lines sorted by
    /// endpoint pair.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let d = self.incidence.first().map(Vec::len);
        match d {
            Some(d) if self.is_regular(d) => writeln!(out, "# n={} d={}", self.n, d).unwrap(),
            _ => writeln!(out, "# n={}", self.n).unwrap(),
        }
        for ((u, v), c) in self.multiplicities() {
            writeln!(out, "{u} {v} {c}").unwrap();
        }
        out
    }

    /// Parses the edge-list format. The header is required for the vertex
    /// count; a `d=` field, when present, is checked against the degrees.
    /// Lines may omit the multiplicity, which then defaults to one.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut d: Option<usize> = None;
        let mut pending = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                for field in rest.split_whitespace() {
                    if let Some(v) = field.strip_prefix("n=") {
                        n = Some(v.parse().map_err(|_| Error::Parse(format!("bad header field `{field}`")))?);
                    } else if let Some(v) = field.strip_prefix("d=") {
                        d = Some(v.parse().map_err(|_| Error::Parse(format!("bad header field `{field}`")))?);
                    }
                }
                continue;
            }
            let nums: Vec<u64> = line
                .split_whitespace()
                .map(|t| t.parse::<u64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse(format!("line {}: expected integers", lineno + 1)))?;
            let (u, v, c) = match nums.as_slice() {
                [u, v] => (*u, *v, 1),
                [u, v, c] => (*u, *v, *c),
                _ => return Err(Error::Parse(format!("line {}: expected `u v multiplicity`", lineno + 1))),
            };
            pending.push((u, v, c));
        }
        let n = n.ok_or_else(|| Error::Parse("missing header `# n=<n>`".into()))?;
        let mut g = Multigraph::new(n);
        for (u, v, c) in pending {
            if u > u32::MAX as u64 || v > u32::MAX as u64 {
                return Err(Error::Parse("vertex index too large".into()));
            }
            for _ in 0..c {
                g.add_edge(u as u32, v as u32).map_err(|e| Error::Parse(e.to_string()))?;
            }
        }
        if let Some(d) = d {
            if !g.is_regular(d) {
                return Err(Error::Parse(format!("header says d={d} but the graph is not {d}-regular")));
            }
        }
        Ok(g)
    }
}
