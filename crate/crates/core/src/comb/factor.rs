//! Partition of a graph into equal blocks that are paths or cycles.
//!
//! A Hamilton path of each component is cut into blocks of `c` vertices.
//! Blocks are then closed into cycles by end rotations where possible, and
//! a random walk over two-block exchanges repairs the blocks left open.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use super::local::{rotate, rotation_path, Extension, Local};

/// Blocks of `c` local vertices. A closed block is stored in cycle order.
#[derive(Debug, Clone)]
pub(crate) struct Blocks {
    pub c: usize,
    pub blocks: Vec<Vec<u32>>,
    pub closed: Vec<bool>,
    pub block_of: Vec<u32>,
    pub pos: Vec<u32>,
}

/// Why a block factor could not be built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FactorFailure {
    /// A component has a size not divisible by `c`.
    Divisibility,
    /// No Hamilton path was found in some component.
    HamiltonPath,
}

/// End rotations of `p` up to `depth`, including `p` itself.
fn end_rotations(g: &Local, p: &[u32], depth: u32, out: &mut Vec<Vec<u32>>) {
    let first = out.len();
    out.push(p.to_vec());
    let mut frontier = first..out.len();
    for _ in 0..depth {
        let start = out.len();
        for idx in frontier.clone() {
            let q = out[idx].clone();
            let end = q[q.len() - 1];
            for &x in &g.adj[end as usize] {
                if let Some(i) = q[..q.len().saturating_sub(2)].iter().position(|&v| v == x) {
                    out.push(rotate(&q, i));
                }
            }
        }
        frontier = start..out.len();
    }
}

/// A cycle order on the vertex set of the path `p` reachable by at most two
/// rotations at one end and one at the other, if any.
pub(crate) fn close_path(g: &Local, p: &[u32]) -> Option<Vec<u32>> {
    let c = p.len();
    if c <= 2 {
        return Some(p.to_vec());
    }
    let mut outer = Vec::new();
    end_rotations(g, p, 2, &mut outer);
    let mut inner = Vec::new();
    for x in outer {
        if g.has_edge(x[0], x[c - 1]) {
            return Some(x);
        }
        let rev: Vec<u32> = x.iter().rev().copied().collect();
        inner.clear();
        end_rotations(g, &rev, 1, &mut inner);
        if let Some(y) = inner.drain(1..).find(|y| g.has_edge(y[0], y[c - 1])) {
            return Some(y);
        }
    }
    None
}

impl Blocks {
    /// Cuts a Hamilton path of every component into blocks of `c` and closes
    /// what end rotations can close.
    pub fn build<R: Rng>(g: &Local, c: usize, max_rotations: u64, rng: &mut R) -> Result<Blocks, FactorFailure> {
        assert!(c >= 1);
        let comps = g.components();
        if comps.iter().any(|comp| comp.len() % c != 0) {
            return Err(FactorFailure::Divisibility);
        }
        let mut blocks = Blocks {
            c,
            blocks: Vec::with_capacity(g.n() / c),
            closed: Vec::new(),
            block_of: vec![u32::MAX; g.n()],
            pos: vec![u32::MAX; g.n()],
        };
        for comp in comps {
            if comp.len() > 2 && comp.iter().filter(|&&v| g.adj[v as usize].len() <= 1).count() > 2 {
                return Err(FactorFailure::HamiltonPath);
            }
            let path = rotation_path(g, &comp, comp.len(), max_rotations, Extension::FewestFree, rng).ok_or(FactorFailure::HamiltonPath)?;
            for chunk in path.chunks(c) {
                let b = blocks.blocks.len();
                blocks.blocks.push(Vec::new());
                blocks.closed.push(false);
                blocks.set(g, b, chunk.to_vec());
            }
        }
        Ok(blocks)
    }

    /// Stores `p` as block `b`, closing it when possible.
    fn set(&mut self, g: &Local, b: usize, p: Vec<u32>) {
        let (order, closed) = match close_path(g, &p) {
            Some(cyc) => (cyc, true),
            None => (p, false),
        };
        for (i, &v) in order.iter().enumerate() {
            self.block_of[v as usize] = b as u32;
            self.pos[v as usize] = i as u32;
        }
        self.blocks[b] = order;
        self.closed[b] = closed;
    }

    pub fn open_count(&self) -> usize {
        self.closed.iter().filter(|&&c| !c).count()
    }

    /// Random walk over two-block exchanges for at most `max_steps` steps,
    /// ending early once `stall` steps pass without fewer open blocks.
    ///
    /// For an open block `C = c_0..c_{c-1}` and a block `Q = q_0..q_{c-1}`
    /// with `c_{c-1} ~ q_0` and `c_j ~ q_{c-1}`, the exchange produces
    /// `c_0..c_j q_{c-1}..q_{j+1}` and `q_j..q_0 c_{c-1}..c_{j+1}`, both paths
    /// on `c` vertices. A move is taken when it lowers the number of open
    /// blocks, otherwise a move keeping that number is taken at random.
    /// Returns the number of steps used.
    pub fn repair<R: Rng>(&mut self, g: &Local, max_steps: u64, stall: u64, rng: &mut R) -> u64 {
        let c = self.c;
        if c <= 2 {
            return 0;
        }
        let mut steps = 0u64;
        let (mut best, mut best_at) = (self.open_count(), 0u64);
        let mut moves: Vec<(usize, Vec<u32>, usize)> = Vec::new();
        while steps < max_steps && steps - best_at < stall {
            let open: Vec<usize> = (0..self.blocks.len()).filter(|&b| !self.closed[b]).collect();
            let Some(&ci) = open.choose(rng) else { break };
            steps += 1;
            let mut cpath = self.blocks[ci].clone();
            if rng.random_bool(0.5) {
                cpath.reverse();
            }
            let reversed = cpath[0] != self.blocks[ci][0];
            let index_in_c = |v: u32, pos: &[u32]| {
                let p = pos[v as usize] as usize;
                if reversed { c - 1 - p } else { p }
            };
            moves.clear();
            for &y in &g.adj[cpath[c - 1] as usize] {
                let qi = self.block_of[y as usize] as usize;
                if qi == ci {
                    continue;
                }
                let qb = &self.blocks[qi];
                let t = self.pos[y as usize] as usize;
                let mut orientations: Vec<Vec<u32>> = Vec::with_capacity(2);
                if self.closed[qi] {
                    orientations.push((0..c).map(|s| qb[(t + s) % c]).collect());
                    orientations.push((0..c).map(|s| qb[(t + c - s) % c]).collect());
                } else if t == 0 {
                    orientations.push(qb.clone());
                } else if t == c - 1 {
                    orientations.push(qb.iter().rev().copied().collect());
                }
                for q in orientations {
                    for &x in &g.adj[q[c - 1] as usize] {
                        if self.block_of[x as usize] as usize == ci {
                            let j = index_in_c(x, &self.pos);
                            if j + 2 <= c {
                                moves.push((qi, q.clone(), j));
                            }
                        }
                    }
                }
            }
            moves.shuffle(rng);
            let mut neutral: Option<(usize, Vec<u32>, Vec<u32>)> = None;
            let mut taken = false;
            for (qi, q, j) in moves.drain(..) {
                let mut c_new: Vec<u32> = cpath[..=j].to_vec();
                c_new.extend(q[j + 1..].iter().rev());
                let mut q_new: Vec<u32> = q[..=j].iter().rev().copied().collect();
                q_new.extend(cpath[j + 1..].iter().rev());
                let before = 1 + usize::from(!self.closed[qi]);
                let after = usize::from(close_path(g, &c_new).is_none()) + usize::from(close_path(g, &q_new).is_none());
                if after < before {
                    self.set(g, ci, c_new);
                    self.set(g, qi, q_new);
                    taken = true;
                    break;
                }
                if after == before && neutral.is_none() {
                    neutral = Some((qi, c_new, q_new));
                }
            }
            if taken {
                let open = self.open_count();
                if open < best {
                    (best, best_at) = (open, steps);
                }
            } else if let Some((qi, c_new, q_new)) = neutral {
                self.set(g, ci, c_new);
                self.set(g, qi, q_new);
            }
        }
        steps
    }
}
