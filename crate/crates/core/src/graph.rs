//! Intersection graphs of disc families: edge classification, exact clique
//! number, degeneracy order and greedy coloring.

use std::f64::consts::E;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::Family;
use crate::report::{BoundReport, Inequality};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeClass {
    BoundaryCrossing,
    Containment,
}

/// Fixed-size bit set over vertex indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet { words: vec![0; len.div_ceil(64)] }
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    rows: Vec<BitSet>,
    edges: Vec<(usize, usize, EdgeClass)>,
}

impl IntersectionGraph {
    /// Builds a graph from `(u, v, class)` triples; duplicates and loops are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, EdgeClass)>) -> Result<Self> {
        let mut rows = vec![BitSet::new(n); n];
        let mut list = Vec::new();
        for (u, v, class) in edges {
            if u == v || u >= n || v >= n {
                return Err(Error::Parameter(format!("bad edge ({u}, {v}) for {n} vertices")));
            }
            if rows[u].contains(v) {
                return Err(Error::Parameter(format!("duplicate edge ({u}, {v})")));
            }
            rows[u].insert(v);
            rows[v].insert(u);
            list.push((u.min(v), u.max(v), class));
        }
        list.sort_by_key(|&(u, v, _)| (u, v));
        let adj = rows.iter().map(|r| r.iter().collect()).collect();
        Ok(IntersectionGraph { n, adj, rows, edges: list })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn row(&self, v: usize) -> &BitSet {
        &self.rows[v]
    }

    /// Edges as `(u, v, class)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize, EdgeClass)] {
        &self.edges
    }

    pub fn count_class(&self, class: EdgeClass) -> usize {
        self.edges.iter().filter(|e| e.2 == class).count()
    }
}

/// Intersection graph of a disc family. General position keeps center
/// distances away from `r_i + r_j` and `|r_i - r_j|`, so strict comparisons
/// classify every pair unambiguously.
pub fn build_graph(f: &Family) -> Result<IntersectionGraph> {
    let discs = f.disc_members()?;
    let n = discs.len();
    let edges: Vec<(usize, usize, EdgeClass)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..n).filter_map(move |j| {
                let (a, b) = (&discs[i], &discs[j]);
                let d = a.center().dist(&b.center());
                if d >= a.r + b.r {
                    None
                } else if d < (a.r - b.r).abs() {
                    Some((i, j, EdgeClass::Containment))
                } else {
                    Some((i, j, EdgeClass::BoundaryCrossing))
                }
            })
        })
        .collect();
    IntersectionGraph::from_edges(n, edges)
}

/// Node budget for [`clique_number`].
pub const DEFAULT_CLIQUE_BUDGET: u64 = 50_000_000;

struct CliqueSearch<'a> {
    rows: &'a [BitSet],
    best: usize,
    nodes: u64,
    budget: u64,
}

impl CliqueSearch<'_> {
    /// Greedy sequential coloring of `cands`; returns vertices in color
    /// order with the color (1-based) of each, nondecreasing.
    fn color_sort(&self, cands: &BitSet) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(cands.len());
        let mut bounds = Vec::with_capacity(cands.len());
        let mut uncolored = cands.clone();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut avail = uncolored.clone();
            while let Some(v) = avail.first() {
                avail.remove(v);
                avail.difference_with(&self.rows[v]);
                uncolored.remove(v);
                order.push(v);
                bounds.push(color);
            }
        }
        (order, bounds)
    }

    fn expand(&mut self, size: usize, mut cands: BitSet) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        let (order, bounds) = self.color_sort(&cands);
        for i in (0..order.len()).rev() {
            if size + bounds[i] <= self.best {
                return Ok(());
            }
            let v = order[i];
            let mut next = cands.clone();
            next.intersect_with(&self.rows[v]);
            if next.is_empty() {
                self.best = self.best.max(size + 1);
            } else {
                self.expand(size + 1, next)?;
            }
            cands.remove(v);
        }
        Ok(())
    }
}

/// Exact clique number by branch and bound with coloring bounds.
pub fn clique_number(g: &IntersectionGraph) -> Result<usize> {
    clique_number_with_budget(g, DEFAULT_CLIQUE_BUDGET)
}

pub fn clique_number_with_budget(g: &IntersectionGraph, budget: u64) -> Result<usize> {
    let n = g.n();
    if n == 0 {
        return Ok(0);
    }
    // Relabel by nonincreasing degree so low indices (colored first) are hubs.
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut pos = vec![0; n];
    for (i, &v) in perm.iter().enumerate() {
        pos[v] = i;
    }
    let rows: Vec<BitSet> = perm
        .iter()
        .map(|&v| {
            let mut r = BitSet::new(n);
            for &u in g.neighbors(v) {
                r.insert(pos[u]);
            }
            r
        })
        .collect();
    let mut all = BitSet::new(n);
    for v in 0..n {
        all.insert(v);
    }
    let mut search = CliqueSearch { rows: &rows, best: 1, nodes: 0, budget };
    search.expand(0, all)?;
    Ok(search.best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Degeneracy {
    /// Vertex order in which each vertex has fewer than `col` earlier neighbors.
    pub order: Vec<usize>,
    pub col: usize,
}

/// Smallest-last order: repeatedly removes a minimum-degree vertex (ties by
/// smallest id) and reverses the removal sequence.
pub fn degeneracy_order(g: &IntersectionGraph) -> Degeneracy {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut removal = Vec::with_capacity(n);
    let mut max_at_removal = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (deg[v], v))
            .expect("vertices remain");
        max_at_removal = max_at_removal.max(deg[v]);
        removed[v] = true;
        removal.push(v);
        for &u in g.neighbors(v) {
            if !removed[u] {
                deg[u] -= 1;
            }
        }
    }
    removal.reverse();
    Degeneracy { order: removal, col: if n == 0 { 0 } else { max_at_removal + 1 } }
}

/// Largest number of earlier neighbors any vertex has along `order`.
pub fn max_back_degree(g: &IntersectionGraph, order: &[usize]) -> usize {
    let mut seen = vec![false; g.n()];
    let mut worst = 0;
    for &v in order {
        worst = worst.max(g.neighbors(v).iter().filter(|&&u| seen[u]).count());
        seen[v] = true;
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    /// Color of each vertex, starting at 0.
    pub colors: Vec<usize>,
    pub used: usize,
}

impl Coloring {
    pub fn is_proper(&self, g: &IntersectionGraph) -> bool {
        g.edges().iter().all(|&(u, v, _)| self.colors[u] != self.colors[v])
    }
}

/// First-fit coloring along `order`, which must be a permutation of the vertices.
pub fn greedy_color(g: &IntersectionGraph, order: &[usize]) -> Result<Coloring> {
    let n = g.n();
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
        return Err(Error::Parameter("coloring order is not a permutation of the vertices".into()));
    }
    const UNSET: usize = usize::MAX;
    let mut colors = vec![UNSET; n];
    let mut taken = Vec::new();
    for &v in order {
        taken.clear();
        taken.resize(g.degree(v) + 1, false);
        for &u in g.neighbors(v) {
            let c = colors[u];
            if c != UNSET && c < taken.len() {
                taken[c] = true;
            }
        }
        colors[v] = taken.iter().position(|&t| !t).expect("degree + 1 slots");
    }
    let used = colors.iter().map(|&c| c + 1).max().unwrap_or(0);
    Ok(Coloring { colors, used })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub crossing_pairs: usize,
    pub containment_pairs: usize,
    pub omega: usize,
    pub degeneracy_order: Vec<usize>,
    pub col: usize,
    pub chi_greedy: usize,
}

pub fn graph_stats(g: &IntersectionGraph) -> Result<GraphStats> {
    let omega = clique_number(g)?;
    let deg = degeneracy_order(g);
    let coloring = greedy_color(g, &deg.order)?;
    Ok(GraphStats {
        n: g.n(),
        m: g.m(),
        crossing_pairs: g.count_class(EdgeClass::BoundaryCrossing),
        containment_pairs: g.count_class(EdgeClass::Containment),
        omega,
        degeneracy_order: deg.order,
        col: deg.col,
        chi_greedy: coloring.used,
    })
}

pub fn theorem1_report(stats: &GraphStats, c: f64) -> BoundReport {
    let (n, w) = (stats.n as f64, stats.omega as f64);
    let mut r = BoundReport::new(format!("edge bound with union-complexity constant c = {c}"));
    r.push(Inequality::le("edges", stats.m as f64, ((c * E / 2.0 + 1.0) * w - 1.0) * n));
    r.push(Inequality::le("crossing_pairs", stats.crossing_pairs as f64, c * E / 2.0 * w * n));
    r.push(Inequality::le("containment_pairs", stats.containment_pairs as f64, (w - 1.0) * n));
    r
}

pub fn corollary_report(stats: &GraphStats) -> BoundReport {
    let (col, w) = (stats.col as f64, stats.omega as f64);
    let mut r = BoundReport::new("coloring bound for disc families");
    r.push(Inequality::le("chi_greedy_le_col", stats.chi_greedy as f64, col));
    r.push(Inequality::lt("col_lt_(6e+2)omega", col, (6.0 * E + 2.0) * w));
    r.push(Inequality::lt("col_lt_19omega", col, 19.0 * w));
    r
}

/// `m <= ((c e / 2 + 1) omega - 1) n` and its two constituents.
pub fn check_theorem1(f: &Family, c: f64) -> Result<BoundReport> {
    let stats = graph_stats(&build_graph(f)?)?;
    Ok(theorem1_report(&stats, c))
}

/// `chi_greedy <= col < (6e + 2) omega < 19 omega`.
pub fn check_corollary(f: &Family) -> Result<BoundReport> {
    let stats = graph_stats(&build_graph(f)?)?;
    Ok(corollary_report(&stats))
}

/// Stats record in the shape written by `analyze`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub n: usize,
    pub m: usize,
    pub crossing_pairs: usize,
    pub containment_pairs: usize,
    pub omega: usize,
    pub col: usize,
    pub chi_greedy: usize,
    pub bounds: StatsBounds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsBounds {
    pub thm1: BoundVerdict,
    pub corollary: CorollaryVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundVerdict {
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryVerdict {
    pub col_over_omega: f64,
    pub pass: bool,
}

impl StatsSummary {
    pub fn new(stats: &GraphStats, thm1: &BoundReport, corollary: &BoundReport) -> Self {
        StatsSummary {
            n: stats.n,
            m: stats.m,
            crossing_pairs: stats.crossing_pairs,
            containment_pairs: stats.containment_pairs,
            omega: stats.omega,
            col: stats.col,
            chi_greedy: stats.chi_greedy,
            bounds: StatsBounds {
                thm1: BoundVerdict {
                    bound: thm1.get("edges").map_or(f64::NAN, |i| i.rhs),
                    pass: thm1.passed(),
                },
                corollary: CorollaryVerdict {
                    col_over_omega: stats.col as f64 / stats.omega as f64,
                    pass: corollary.passed(),
                },
            },
        }
    }
}
