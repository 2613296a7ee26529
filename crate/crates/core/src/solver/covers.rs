use std::collections::BTreeSet;

use crate::udg::IntersectionGraph;

/// Every vertex cover of size at most `k`, minimal or not, ordered by size and
/// then lexicographically.
pub fn enumerate_candidate_sets(g: &IntersectionGraph, k: u64) -> Vec<Vec<usize>> {
    enumerate_with_forced(g, k, &[], usize::MAX).unwrap_or_default()
}

/// Covers of size at most `k` that contain every vertex of `forced`. `None`
/// when more than `cap` sets would be produced.
pub(crate) fn enumerate_with_forced(
    g: &IntersectionGraph,
    k: u64,
    forced: &[usize],
    cap: usize,
) -> Option<Vec<Vec<usize>>> {
    let n = g.vertex_count();
    let k = k.min(n as u64) as usize;
    let mut start = vec![false; n];
    for &f in forced {
        start[f] = true;
    }
    if forced.len() > k {
        return Some(Vec::new());
    }
    let mut seeds = BTreeSet::new();
    branch(g.edges(), &mut start, forced.len(), k, &mut seeds);
    let mut all: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    for seed in seeds {
        extend(&seed, n, k, &mut all, cap)?;
    }
    Some(all.into_iter().map(|(_, s)| s).collect())
}

fn branch(edges: &[(usize, usize)], chosen: &mut Vec<bool>, size: usize, k: usize, out: &mut BTreeSet<Vec<usize>>) {
    let Some(&(a, b)) = edges.iter().find(|&&(a, b)| !chosen[a] && !chosen[b]) else {
        out.insert((0..chosen.len()).filter(|&v| chosen[v]).collect());
        return;
    };
    if size == k {
        return;
    }
    for v in [a, b] {
        chosen[v] = true;
        branch(edges, chosen, size + 1, k, out);
        chosen[v] = false;
    }
}

/// Adds every superset of `seed` with at most `k` vertices.
fn extend(seed: &[usize], n: usize, k: usize, out: &mut BTreeSet<(usize, Vec<usize>)>, cap: usize) -> Option<()> {
    fn rec(
        cur: &mut Vec<usize>,
        from: usize,
        n: usize,
        k: usize,
        out: &mut BTreeSet<(usize, Vec<usize>)>,
        cap: usize,
    ) -> Option<()> {
        let mut sorted = cur.clone();
        sorted.sort_unstable();
        out.insert((sorted.len(), sorted));
        if out.len() > cap {
            return None;
        }
        if cur.len() == k {
            return Some(());
        }
        for v in from..n {
            if !cur.contains(&v) {
                cur.push(v);
                rec(cur, v + 1, n, k, out, cap)?;
                cur.pop();
            }
        }
        Some(())
    }
    let mut cur = seed.to_vec();
    rec(&mut cur, 0, n, k, out, cap)
}
