//! Constructive comb embedding: a spine path, a block factor on the rest of
//! the graph, and a bipartite matching joining spine vertices to blocks.
//!
//! Every search here is heuristic. Outputs are checked by [`verify_comb`]
//! and [`RodFactor::verify`] before they are returned.

mod factor;
mod local;
pub mod matching;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cycle_factors::RodFactor;
use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::pairing::sample_gnp_with;
use crate::rng::{stream_rng, TrialRng};
use factor::Blocks;
use local::{rotation_path, Extension, Local};
use matching::hopcroft_karp;

/// An `(n/k)`-vertex spine with a `k`-vertex tooth hanging from each spine
/// vertex; `teeth[i][0] == spine[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comb {
    pub spine: Vec<u32>,
    pub teeth: Vec<Vec<u32>>,
}

impl Comb {
    /// The same comb with the spine read from its smaller end.
    pub fn canonical(&self) -> Comb {
        let mut c = self.clone();
        if c.spine.len() > 1 && c.spine[0] > c.spine[c.spine.len() - 1] {
            c.spine.reverse();
            c.teeth.reverse();
        }
        c
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Comb> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("comb JSON: {e}")))
    }
}

/// True when `comb` is a comb of order `k` spanning the `n` vertices of `g`
/// and every spine and tooth edge is an edge of `g`.
pub fn verify_comb(g: &Multigraph, comb: &Comb, n: usize, k: usize) -> bool {
    if g.n() != n || k == 0 || n % k != 0 {
        return false;
    }
    let m = n / k;
    if comb.spine.len() != m || comb.teeth.len() != m {
        return false;
    }
    let mut seen = vec![false; n];
    for (s, tooth) in comb.spine.iter().zip(&comb.teeth) {
        if tooth.len() != k || tooth[0] != *s {
            return false;
        }
        for &v in tooth {
            if v as usize >= n || std::mem::replace(&mut seen[v as usize], true) {
                return false;
            }
        }
    }
    let adj = g.simple_adjacency();
    let edge = |a: u32, b: u32| adj[a as usize].binary_search(&b).is_ok();
    comb.spine.windows(2).all(|w| edge(w[0], w[1]))
        && comb.teeth.iter().all(|t| t.windows(2).all(|w| edge(w[0], w[1])))
}

/// Limits for the randomized searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    /// Independent pipeline attempts, each with a fresh spine.
    pub attempts: u32,
    /// Path rotations allowed per vertex of the searched graph.
    pub rotations_per_vertex: u64,
    /// Exchange steps of the block repair walk.
    pub repair_steps: u64,
    /// The repair walk stops after this many steps without reducing the
    /// number of open blocks.
    pub repair_stall: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { attempts: 4, rotations_per_vertex: 10, repair_steps: 20_000, repair_stall: 2_000 }
    }
}

impl SearchBudget {
    fn rotations(&self, n: usize) -> u64 {
        self.rotations_per_vertex.saturating_mul(n as u64).max(1000)
    }
}

/// A simple path of `g` on at least `target` vertices, if the rotation
/// search finds one within `max_rotations` rotations.
pub fn find_long_path(g: &Multigraph, target: usize, seed: u64, max_rotations: u64) -> Option<Vec<u32>> {
    let l = Local::induced(&g.simple_adjacency(), &vec![true; g.n()]);
    let all: Vec<u32> = (0..g.n() as u32).collect();
    rotation_path(&l, &all, target, max_rotations, Extension::FewestFree, &mut stream_rng(seed, 0))
}

/// A `k`-cycle factor of `g` from the block heuristic, or `None` when some
/// block is still open after the repair walk. Successes are verified.
pub fn cycle_factor_heuristic(g: &Multigraph, k: usize, seed: u64, budget: SearchBudget) -> Result<Option<RodFactor>> {
    let n = g.n();
    if k < 3 || n % k != 0 {
        return Err(Error::invalid(format!("need k >= 3 dividing n (n={n}, k={k})")));
    }
    let l = Local::induced(&g.simple_adjacency(), &vec![true; n]);
    let mut rng = stream_rng(seed, 0);
    for _ in 0..budget.attempts.max(1) {
        let Ok(mut blocks) = Blocks::build(&l, k, budget.rotations(n), &mut rng) else { continue };
        blocks.repair(&l, budget.repair_steps, budget.repair_stall, &mut rng);
        if blocks.open_count() == 0 {
            let factor = RodFactor { k, sequence: blocks.blocks.concat() };
            if factor.verify(g) {
                return Ok(Some(factor));
            }
        }
    }
    Ok(None)
}

/// Furthest pipeline stage reached; `Done` means a verified comb.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Spine,
    Factor,
    Matching,
    Done,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stage::Spine => "spine",
            Stage::Factor => "factor",
            Stage::Matching => "matching",
            Stage::Done => "done",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbedOutcome {
    pub stage: Stage,
    pub comb: Option<Comb>,
    pub attempts: u32,
}

fn check_shape(n: usize, k: usize) -> Result<()> {
    if k == 0 || n == 0 || n % k != 0 {
        return Err(Error::invalid(format!("need k >= 1 dividing n >= 1 (n={n}, k={k})")));
    }
    Ok(())
}

/// Embeds a comb of order `k` in the simple graph `g` on `n` vertices.
pub fn embed_comb(g: &Multigraph, n: usize, k: usize, seed: u64, budget: SearchBudget) -> Result<EmbedOutcome> {
    if g.n() != n {
        return Err(Error::invalid(format!("graph has {} vertices, expected {n}", g.n())));
    }
    if !g.is_simple() {
        return Err(Error::invalid("comb embedding needs a simple graph"));
    }
    check_shape(n, k)?;
    let adj = g.simple_adjacency();
    Ok(embed_on(&adj, &adj, k, budget, &mut stream_rng(seed, 0)))
}

/// Edge probability of the second exposure round in [`embed_gnp`]:
/// `min(p/2, ln n / n)`.
pub fn matching_round_probability(n: usize, p: f64) -> f64 {
    let nf = n.max(2) as f64;
    (p / 2.0).min(nf.ln() / nf)
}

/// Two-round exposure: `G(n, p)` is the union of independent samples
/// `G1 = G(n, p1)` and `G2 = G(n, p2)` with `(1-p1)(1-p2) = 1-p`, where `p2`
/// is [`matching_round_probability`]. The spine and the block factor use `G1`
/// and the matching uses `G2` only. Returns the union graph with the outcome.
pub fn embed_gnp(n: usize, k: usize, p: f64, seed: u64, budget: SearchBudget) -> Result<(Multigraph, EmbedOutcome)> {
    check_shape(n, k)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("edge probability {p} outside [0,1]")));
    }
    let p2 = matching_round_probability(n, p);
    let p1 = 1.0 - (1.0 - p) / (1.0 - p2);
    let g1 = sample_gnp_with(n, p1.clamp(0.0, 1.0), &mut stream_rng(seed, 0))?;
    let g2 = sample_gnp_with(n, p2, &mut stream_rng(seed, 1))?;
    let (a1, a2) = (g1.simple_adjacency(), g2.simple_adjacency());
    let mut union_edges: Vec<(u32, u32)> = g1.edges().iter().chain(g2.edges()).copied().collect();
    union_edges.sort_unstable();
    union_edges.dedup();
    let union = Multigraph::from_edges(n, &union_edges)?;
    let mut outcome = embed_on(&a1, &a2, k, budget, &mut stream_rng(seed, 2));
    if let Some(c) = &outcome.comb {
        if !verify_comb(&union, c, n, k) {
            outcome.comb = None;
            outcome.stage = Stage::Matching;
        }
    }
    Ok((union, outcome))
}

fn embed_on(first: &[Vec<u32>], second: &[Vec<u32>], k: usize, budget: SearchBudget, rng: &mut TrialRng) -> EmbedOutcome {
    let n = first.len();
    let mut best = Stage::Spine;
    let attempts = budget.attempts.max(1);
    for attempt in 1..=attempts {
        match attempt_once(first, second, k, budget, rng) {
            Ok(comb) => return EmbedOutcome { stage: Stage::Done, comb: Some(comb), attempts: attempt },
            Err(stage) => best = best.max(stage),
        }
    }
    debug_assert!(n > 0);
    EmbedOutcome { stage: best, comb: None, attempts }
}

fn attempt_once(first: &[Vec<u32>], second: &[Vec<u32>], k: usize, budget: SearchBudget, rng: &mut TrialRng) -> std::result::Result<Comb, Stage> {
    let n = first.len();
    let m = n / k;
    let whole = Local::induced(first, &vec![true; n]);
    let all: Vec<u32> = (0..n as u32).collect();
    let spine_local = rotation_path(&whole, &all, m, budget.rotations(n), Extension::Uniform, rng).ok_or(Stage::Spine)?;
    let spine: Vec<u32> = spine_local[..m].iter().map(|&v| whole.verts[v as usize]).collect();
    if k == 1 {
        return Ok(Comb { teeth: spine.iter().map(|&s| vec![s]).collect(), spine });
    }
    let mut keep = vec![true; n];
    for &s in &spine {
        keep[s as usize] = false;
    }
    let rest = Local::induced(first, &keep);
    let c = k - 1;
    let mut blocks = Blocks::build(&rest, c, budget.rotations(rest.n()), rng).map_err(|_| Stage::Factor)?;
    blocks.repair(&rest, budget.repair_steps, budget.repair_stall, rng);

    let mut local_of = vec![u32::MAX; n];
    for (i, &v) in rest.verts.iter().enumerate() {
        local_of[v as usize] = i as u32;
    }
    // attach[i] lists (block, position) pairs usable by spine vertex i.
    let mut options: Vec<Vec<usize>> = Vec::with_capacity(m);
    let mut attach: Vec<Vec<(usize, usize)>> = Vec::with_capacity(m);
    for &s in &spine {
        let mut row: Vec<(usize, usize)> = Vec::new();
        for &w in &second[s as usize] {
            let lw = local_of[w as usize];
            if lw == u32::MAX {
                continue;
            }
            let b = blocks.block_of[lw as usize] as usize;
            let t = blocks.pos[lw as usize] as usize;
            let usable = blocks.closed[b] || t == 0 || t == c - 1;
            if usable && !row.iter().any(|&(rb, _)| rb == b) {
                row.push((b, t));
            }
        }
        row.shuffle(rng);
        options.push(row.iter().map(|&(b, _)| b).collect());
        attach.push(row);
    }
    let matched = hopcroft_karp(&options, blocks.blocks.len());
    if matched.iter().any(|x| x.is_none()) {
        return Err(Stage::Matching);
    }
    let teeth: Vec<Vec<u32>> = spine
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let b = matched[i].expect("perfect");
            let t = attach[i].iter().find(|&&(rb, _)| rb == b).expect("matched edge").1;
            let blk = &blocks.blocks[b];
            let order: Vec<u32> = if blocks.closed[b] {
                (0..c).map(|j| blk[(t + j) % c]).collect()
            } else if t == 0 {
                blk.clone()
            } else {
                blk.iter().rev().copied().collect()
            };
            std::iter::once(s).chain(order.iter().map(|&v| rest.verts[v as usize])).collect()
        })
        .collect();
    Ok(Comb { spine, teeth })
}

/// Success frequency of [`embed_gnp`] over `seeds` consecutive seeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbedRun {
    pub seed: u64,
    pub stage: Stage,
    pub success: bool,
    pub verified: bool,
    pub millis: u128,
}

/// Runs [`embed_gnp`] for seeds `first_seed..first_seed + seeds` and checks
/// every success with [`verify_comb`] on the union graph.
pub fn embed_gnp_runs(n: usize, k: usize, p: f64, first_seed: u64, seeds: u64, budget: SearchBudget) -> Result<Vec<EmbedRun>> {
    (first_seed..first_seed + seeds)
        .map(|seed| {
            let start = std::time::Instant::now();
            let (g, out) = embed_gnp(n, k, p, seed, budget)?;
            let verified = out.comb.as_ref().is_some_and(|c| verify_comb(&g, c, n, k));
            Ok(EmbedRun {
                seed,
                stage: out.stage,
                success: out.comb.is_some(),
                verified,
                millis: start.elapsed().as_millis(),
            })
        })
        .collect()
}

/// `n` vertices where spine `0..m` carries teeth `m + i(k-1) ..`; no other edges.
pub fn comb_graph(n: usize, k: usize) -> Result<(Multigraph, Comb)> {
    check_shape(n, k)?;
    let m = n / k;
    let spine: Vec<u32> = (0..m as u32).collect();
    let teeth: Vec<Vec<u32>> = (0..m)
        .map(|i| std::iter::once(i as u32).chain((0..k - 1).map(|j| (m + i * (k - 1) + j) as u32)).collect())
        .collect();
    let mut edges: Vec<(u32, u32)> = spine.windows(2).map(|w| (w[0], w[1])).collect();
    for t in &teeth {
        edges.extend(t.windows(2).map(|w| (w[0], w[1])));
    }
    Ok((Multigraph::from_edges(n, &edges)?, Comb { spine, teeth }))
}

#[allow(dead_code)]
fn random_relabel<R: Rng>(g: &Multigraph, rng: &mut R) -> (Multigraph, Vec<u32>) {
    let mut perm: Vec<u32> = (0..g.n() as u32).collect();
    perm.shuffle(rng);
    let edges: Vec<(u32, u32)> = g.edges().iter().map(|&(u, v)| (perm[u as usize], perm[v as usize])).collect();
    (Multigraph::from_edges(g.n(), &edges).expect("same vertex set"), perm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big() -> SearchBudget {
        SearchBudget { attempts: 400, ..SearchBudget::default() }
    }

    #[test]
    fn complete_graph_k9() {
        let g = Multigraph::complete(9);
        let out = embed_comb(&g, 9, 3, 1, SearchBudget::default()).unwrap();
        assert_eq!(out.stage, Stage::Done);
        let c = out.comb.unwrap();
        assert!(verify_comb(&g, &c, 9, 3));
        assert_eq!((c.spine.len(), c.teeth[0].len()), (3, 3));
    }

    #[test]
    fn unique_witness_is_recovered() {
        let (g, comb) = comb_graph(12, 4).unwrap();
        assert!(verify_comb(&g, &comb, 12, 4));
        let mut rng = stream_rng(4, 0);
        let (h, perm) = random_relabel(&g, &mut rng);
        let relabelled = Comb {
            spine: comb.spine.iter().map(|&v| perm[v as usize]).collect(),
            teeth: comb.teeth.iter().map(|t| t.iter().map(|&v| perm[v as usize]).collect()).collect(),
        };
        for (graph, expect) in [(g, comb), (h, relabelled)] {
            let out = embed_comb(&graph, 12, 4, 9, big()).unwrap();
            assert_eq!(out.comb.unwrap().canonical(), expect.canonical());
        }
    }

    #[test]
    fn verifier_rejects_broken_combs() {
        let (g, comb) = comb_graph(12, 4).unwrap();
        let mut broken = g.edges().to_vec();
        let tooth_edge = (comb.teeth[1][1], comb.teeth[1][2]);
        broken.retain(|&e| e != tooth_edge && e != (tooth_edge.1, tooth_edge.0));
        let h = Multigraph::from_edges(12, &broken).unwrap();
        assert!(!verify_comb(&h, &comb, 12, 4));
        assert!(!verify_comb(&g, &comb, 12, 3));
        assert!(!verify_comb(&Multigraph::complete(13), &comb, 13, 4));
        let mut swapped = comb.clone();
        swapped.teeth[0][0] = comb.teeth[0][1];
        assert!(!verify_comb(&g, &swapped, 12, 4));
        assert_eq!(Comb::from_json(&comb.to_json()).unwrap(), comb);
    }

    #[test]
    fn long_paths() {
        let k10 = Multigraph::complete(10);
        let p = find_long_path(&k10, 10, 1, 100).unwrap();
        assert_eq!(p.len(), 10);
        assert!(find_long_path(&Multigraph::new(6), 2, 1, 100).is_none());
    }

    #[test]
    fn cycle_factor_examples() {
        let g = Multigraph::complete(12);
        assert!(cycle_factor_heuristic(&g, 4, 1, SearchBudget::default()).unwrap().unwrap().verify(&g));
        let mut edges = Vec::new();
        for b in 0..5u32 {
            for i in 0..6u32 {
                edges.push((6 * b + i, 6 * b + (i + 1) % 6));
            }
        }
        let disjoint = Multigraph::from_edges(30, &edges).unwrap();
        let f = cycle_factor_heuristic(&disjoint, 6, 2, SearchBudget::default()).unwrap().unwrap();
        assert!(f.verify(&disjoint));
        let mut found: Vec<Vec<u32>> = f
            .cycles()
            .map(|c| {
                let mut c = c.to_vec();
                c.sort();
                c
            })
            .collect();
        found.sort();
        assert_eq!(found, (0..5u32).map(|b| (6 * b..6 * b + 6).collect::<Vec<_>>()).collect::<Vec<_>>());
        assert!(cycle_factor_heuristic(&Multigraph::cycle(12), 4, 1, SearchBudget::default()).unwrap().is_none());
        assert!(cycle_factor_heuristic(&g, 5, 1, SearchBudget::default()).is_err());
    }

    #[test]
    fn gnp_embedding_small() {
        let n = 400;
        let p = 6.0 * (n as f64).ln() / n as f64;
        let runs = embed_gnp_runs(n, 20, p, 0, 10, SearchBudget::default()).unwrap();
        assert!(runs.iter().all(|r| r.success == r.verified));
        assert!(runs.iter().filter(|r| r.success).count() >= 8, "{runs:?}");
    }

    #[test]
    fn invalid_shapes() {
        let g = Multigraph::complete(10);
        assert!(embed_comb(&g, 10, 3, 0, SearchBudget::default()).is_err());
        assert!(embed_comb(&g, 9, 3, 0, SearchBudget::default()).is_err());
        let mut m = Multigraph::complete(4);
        m.add_edge(0, 1).unwrap();
        assert!(embed_comb(&m, 4, 2, 0, SearchBudget::default()).is_err());
    }
}
