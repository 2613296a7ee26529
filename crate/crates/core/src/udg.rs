//! Intersection graphs of unit disks, greedy vertex covers and components.

use thiserror::Error;

use crate::geometry::{compare_to, dist2, near_pairs, Disk, Point};
use crate::numerics::{Comparison, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("could not decide whether disks {0} and {1} intersect")]
pub struct GraphError(pub usize, pub usize);

/// Undirected graph on `0..n` with a sorted edge list, `i < j` in every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl IntersectionGraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut edges: Vec<_> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).filter(|(a, b)| a != b).collect();
        edges.sort_unstable();
        edges.dedup();
        assert!(edges.iter().all(|&(_, b)| b < n), "edge endpoint out of range");
        IntersectionGraph { n, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_edgeless(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// True iff every edge has an endpoint in `cover`.
    pub fn is_cover(&self, cover: &[usize]) -> bool {
        let mut mark = vec![false; self.n];
        for &v in cover {
            mark[v] = true;
        }
        self.edges.iter().all(|&(a, b)| mark[a] || mark[b])
    }
}

/// Which squared distances count as an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRule {
    pub threshold: Rational,
    /// Whether a pair exactly at the threshold is joined.
    pub inclusive: bool,
}

impl EdgeRule {
    /// Open disks of radius `r`: joined iff `dist2 < (2r)^2`.
    pub fn open_radius(r: &Rational) -> Self {
        EdgeRule { threshold: (Rational::from(2) * r).square(), inclusive: false }
    }

    pub fn unit() -> Self {
        EdgeRule::open_radius(&Rational::one())
    }

    fn joins(&self, c: Comparison) -> Option<bool> {
        match c {
            Comparison::Less => Some(true),
            Comparison::Equal => Some(self.inclusive),
            Comparison::Greater => Some(false),
            Comparison::Indeterminate => None,
        }
    }
}

pub fn build_graph(disks: &[Disk]) -> Result<IntersectionGraph, GraphError> {
    let centres: Vec<&Point> = disks.iter().map(|d| &d.center).collect();
    build_graph_with(&centres, &EdgeRule::unit(), false)
}

/// Builds the graph under `rule`. With `accelerated`, candidate pairs come from a
/// spatial bucket grid; the edge list is identical either way.
pub fn build_graph_with(
    centres: &[&Point],
    rule: &EdgeRule,
    accelerated: bool,
) -> Result<IntersectionGraph, GraphError> {
    let n = centres.len();
    let test = |i: usize, j: usize| -> Result<bool, GraphError> {
        rule.joins(compare_to(&dist2(centres[i], centres[j]), &rule.threshold)).ok_or(GraphError(i, j))
    };
    let mut edges = Vec::new();
    if accelerated {
        let reach = rule.threshold.to_f64().max(0.0).sqrt() * (1.0 + 1e-9) + 1e-9;
        for (i, j) in near_pairs(centres.iter().copied(), reach) {
            if test(i, j)? {
                edges.push((i, j));
            }
        }
    } else {
        for i in 0..n {
            for j in i + 1..n {
                if test(i, j)? {
                    edges.push((i, j));
                }
            }
        }
    }
    Ok(IntersectionGraph { n, edges })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexCover {
    Cover(Vec<usize>),
    ExceedsBudget,
}

/// Greedy maximal matching over edges in ascending order.
pub fn maximal_matching(g: &IntersectionGraph) -> Vec<(usize, usize)> {
    let mut used = vec![false; g.n];
    let mut matching = Vec::new();
    for &(a, b) in &g.edges {
        if !used[a] && !used[b] {
            used[a] = true;
            used[b] = true;
            matching.push((a, b));
        }
    }
    matching
}

/// Both endpoints of a greedy maximal matching, or `ExceedsBudget` once the
/// matching has more than `k` edges.
pub fn approx_vc(g: &IntersectionGraph, k: u64) -> VertexCover {
    let mut used = vec![false; g.n];
    let mut matched = 0u64;
    for &(a, b) in &g.edges {
        if !used[a] && !used[b] {
            matched += 1;
            if matched > k {
                return VertexCover::ExceedsBudget;
            }
            used[a] = true;
            used[b] = true;
        }
    }
    VertexCover::Cover((0..g.n).filter(|&v| used[v]).collect())
}

/// Connected components, each sorted, listed by smallest member.
pub fn components(g: &IntersectionGraph) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..g.n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for &(a, b) in &g.edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut slot = vec![usize::MAX; g.n];
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for v in 0..g.n {
        let r = find(&mut parent, v);
        if slot[r] == usize::MAX {
            slot[r] = parts.len();
            parts.push(Vec::new());
        }
        parts[slot[r]].push(v);
    }
    parts
}

/// Size of a minimum vertex cover by exhaustive search; intended for small graphs.
pub fn exact_min_cover(g: &IntersectionGraph) -> usize {
    assert!(g.n <= 24, "exhaustive cover search is limited to 24 vertices");
    let masks: Vec<(u32, u32)> = g.edges.iter().map(|&(a, b)| (1u32 << a, 1u32 << b)).collect();
    (0u32..1 << g.n)
        .filter(|&s| masks.iter().all(|&(a, b)| s & (a | b) != 0))
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap_or(0)
}
