//! Maximum bipartite matching by shortest augmenting paths in phases.

use std::collections::VecDeque;

const INF: u32 = u32::MAX;

/// Maximum matching of a bipartite graph given as left-vertex adjacency
/// lists over `0..right`. Entry `i` of the result is the right partner of
/// left vertex `i`.
pub fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    let left = adj.len();
    let mut match_l: Vec<Option<usize>> = vec![None; left];
    let mut match_r: Vec<Option<usize>> = vec![None; right];
    let mut dist = vec![INF; left];
    loop {
        let mut queue = VecDeque::new();
        for u in 0..left {
            if match_l[u].is_none() {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = INF;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match match_r[v] {
                    None => found = true,
                    Some(w) if dist[w] == INF => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    Some(_) => {}
                }
            }
        }
        if !found {
            return match_l;
        }
        let mut next = vec![0usize; left];
        for u in 0..left {
            if match_l[u].is_none() {
                augment(u, adj, &mut match_l, &mut match_r, &mut dist, &mut next);
            }
        }
    }
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_l: &mut [Option<usize>],
    match_r: &mut [Option<usize>],
    dist: &mut [u32],
    next: &mut [usize],
) -> bool {
    while next[u] < adj[u].len() {
        let v = adj[u][next[u]];
        next[u] += 1;
        let ok = match match_r[v] {
            None => true,
            Some(w) => dist[w] == dist[u] + 1 && augment(w, adj, match_l, match_r, dist, next),
        };
        if ok {
            match_l[u] = Some(v);
            match_r[v] = Some(u);
            return true;
        }
    }
    dist[u] = INF;
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn size(m: &[Option<usize>]) -> usize {
        m.iter().flatten().count()
    }

    fn brute(adj: &[Vec<usize>], i: usize, used: &mut Vec<bool>) -> usize {
        if i == adj.len() {
            return 0;
        }
        let mut best = brute(adj, i + 1, used);
        for &v in &adj[i] {
            if !used[v] {
                used[v] = true;
                best = best.max(1 + brute(adj, i + 1, used));
                used[v] = false;
            }
        }
        best
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = stream_rng(8, 0);
        for _ in 0..300 {
            let (l, r) = (rng.random_range(1..7), rng.random_range(1..7));
            let adj: Vec<Vec<usize>> =
                (0..l).map(|_| (0..r).filter(|_| rng.random_bool(0.35)).collect()).collect();
            let m = hopcroft_karp(&adj, r);
            for (u, v) in m.iter().enumerate() {
                if let Some(v) = v {
                    assert!(adj[u].contains(v));
                }
            }
            let mut rs: Vec<usize> = m.iter().flatten().copied().collect();
            rs.sort();
            rs.dedup();
            assert_eq!(rs.len(), size(&m));
            assert_eq!(size(&m), brute(&adj, 0, &mut vec![false; r]));
        }
    }

    #[test]
    fn greedy_trap() {
        // Greedy 0->0 blocks 1; the maximum matching is 0->1, 1->0.
        let m = hopcroft_karp(&[vec![0, 1], vec![0]], 2);
        assert_eq!(m, vec![Some(1), Some(0)]);
    }
}
