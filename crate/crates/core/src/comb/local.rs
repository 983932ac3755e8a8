//! Induced subgraphs in local indices and the rotation-extension path search.

use rand::seq::IndexedRandom;
use rand::Rng;

/// Simple induced subgraph; vertex `i` here is `verts[i]` in the host.
#[derive(Debug, Clone)]
pub(crate) struct Local {
    pub verts: Vec<u32>,
    /// Sorted local neighbour lists.
    pub adj: Vec<Vec<u32>>,
}

impl Local {
    /// Subgraph of the host adjacency induced by the vertices with `keep[v]`.
    pub fn induced(host: &[Vec<u32>], keep: &[bool]) -> Local {
        let mut local_of = vec![u32::MAX; host.len()];
        let mut verts = Vec::new();
        for v in 0..host.len() {
            if keep[v] {
                local_of[v] = verts.len() as u32;
                verts.push(v as u32);
            }
        }
        let adj = verts
            .iter()
            .map(|&v| {
                let mut nb: Vec<u32> =
                    host[v as usize].iter().map(|&w| local_of[w as usize]).filter(|&w| w != u32::MAX).collect();
                nb.sort_unstable();
                nb
            })
            .collect();
        Local { verts, adj }
    }

    pub fn n(&self) -> usize {
        self.verts.len()
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        let (x, y) = if self.adj[a as usize].len() <= self.adj[b as usize].len() { (a, b) } else { (b, a) };
        self.adj[x as usize].binary_search(&y).is_ok()
    }

    pub fn components(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s as u32];
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head] as usize;
                head += 1;
                for &w in &self.adj[v] {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        comp.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}

/// How the path end picks among its unvisited neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Extension {
    /// The neighbour with the fewest unvisited neighbours, ties at random.
    FewestFree,
    Uniform,
}

/// Rotation-extension search for a simple path on at least `target` vertices
/// starting from a vertex of `starts`.
///
/// Extension follows `rule`. When
/// both ends are blocked the end is rotated, preferring rotations whose new
/// end can be extended. Returns `None` once `max_rotations` is spent.
pub(crate) fn rotation_path<R: Rng>(
    g: &Local,
    starts: &[u32],
    target: usize,
    max_rotations: u64,
    rule: Extension,
    rng: &mut R,
) -> Option<Vec<u32>> {
    if target == 0 {
        return Some(Vec::new());
    }
    if starts.is_empty() || target > g.n() {
        return None;
    }
    let n = g.n();
    let mut pos = vec![usize::MAX; n];
    let mut free_deg: Vec<u32> = g.adj.iter().map(|a| a.len() as u32).collect();
    let mut path: Vec<u32> = Vec::with_capacity(target);
    let mut rotations = 0u64;

    let visit = |v: u32, path: &mut Vec<u32>, pos: &mut [usize], free_deg: &mut [u32]| {
        pos[v as usize] = path.len();
        path.push(v);
        for &w in &g.adj[v as usize] {
            free_deg[w as usize] -= 1;
        }
    };
    let best_free = |v: u32, pos: &[usize], free_deg: &[u32], rng: &mut R| -> Option<u32> {
        let mut best: Option<u32> = None;
        let mut ties = 0u32;
        for &w in &g.adj[v as usize] {
            if pos[w as usize] != usize::MAX {
                continue;
            }
            if rule == Extension::Uniform {
                ties += 1;
                if rng.random_range(0..ties) == 0 {
                    best = Some(w);
                }
                continue;
            }
            match best {
                Some(b) if free_deg[w as usize] > free_deg[b as usize] => {}
                Some(b) if free_deg[w as usize] == free_deg[b as usize] => {
                    ties += 1;
                    if rng.random_range(0..=ties) == 0 {
                        best = Some(w);
                    }
                }
                _ => {
                    best = Some(w);
                    ties = 0;
                }
            }
        }
        best
    };

    loop {
        for &v in &path {
            pos[v as usize] = usize::MAX;
            for &w in &g.adj[v as usize] {
                free_deg[w as usize] += 1;
            }
        }
        path.clear();
        visit(*starts.choose(rng).expect("nonempty"), &mut path, &mut pos, &mut free_deg);
        let mut blocked_rotations = 0u32;
        while path.len() < target {
            let end = *path.last().expect("nonempty");
            if let Some(w) = best_free(end, &pos, &free_deg, rng) {
                visit(w, &mut path, &mut pos, &mut free_deg);
                blocked_rotations = 0;
                continue;
            }
            if free_deg[path[0] as usize] > 0 {
                path.reverse();
                for (i, &v) in path.iter().enumerate() {
                    pos[v as usize] = i;
                }
                continue;
            }
            rotations += 1;
            if rotations > max_rotations {
                return None;
            }
            let len = path.len();
            let pivots: Vec<usize> = g.adj[end as usize]
                .iter()
                .map(|&x| pos[x as usize])
                .filter(|&i| i != usize::MAX && i + 2 < len)
                .collect();
            if pivots.is_empty() {
                blocked_rotations += 1;
                if blocked_rotations > 2 {
                    break;
                }
                path.reverse();
                for (i, &v) in path.iter().enumerate() {
                    pos[v as usize] = i;
                }
                continue;
            }
            blocked_rotations = 0;
            let promising: Vec<usize> =
                pivots.iter().copied().filter(|&i| free_deg[path[i + 1] as usize] > 0).collect();
            let i = *promising.choose(rng).unwrap_or_else(|| pivots.choose(rng).expect("nonempty"));
            path[i + 1..].reverse();
            for j in i + 1..len {
                pos[path[j] as usize] = j;
            }
        }
        if path.len() >= target {
            return Some(path);
        }
        rotations += 1;
        if rotations > max_rotations {
            return None;
        }
    }
}

/// `p[..=i]` followed by `p[i+1..]` reversed: the rotation of `p` about the
/// edge from its end to `p[i]`.
pub(crate) fn rotate(p: &[u32], i: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(p.len());
    out.extend_from_slice(&p[..=i]);
    out.extend(p[i + 1..].iter().rev());
    out
}
