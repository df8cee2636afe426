//! Explicit finite truncations of loop graphs, period lifts, and DOT/JSON export.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::LoopSpectrum;

/// Realizations larger than this are refused.
pub const MAX_VERTICES: usize = 2_000_000;

/// A vertex of the unlifted graph: the root, or the k-th interior vertex of the
/// i-th loop of length n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Root,
    Loop { n: usize, i: usize, k: usize },
}

/// A vertex together with its phase `1..=p` in a period-p lift (phase 1 when unlifted).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub vertex: Vertex,
    pub phase: usize,
}

impl Node {
    pub fn root() -> Node {
        Node {
            vertex: Vertex::Root,
            phase: 1,
        }
    }

    fn name(&self, lifted: bool) -> String {
        let base = match self.vertex {
            Vertex::Root => "root".to_string(),
            Vertex::Loop { n, i, k } => format!("v_{n}_{i}_{k}"),
        };
        if lifted {
            format!("{base}@{}", self.phase)
        } else {
            base
        }
    }

    fn parse(s: &str, lifted: bool) -> Result<Node> {
        let bad = || Error::Format(format!("bad vertex name {s:?}"));
        let (base, phase) = if lifted {
            let (b, p) = s.rsplit_once('@').ok_or_else(bad)?;
            (b, p.parse::<usize>().map_err(|_| bad())?)
        } else {
            (s, 1)
        };
        let vertex = if base == "root" {
            Vertex::Root
        } else {
            let rest = base.strip_prefix("v_").ok_or_else(bad)?;
            let parts: Vec<usize> = rest
                .split('_')
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            match parts[..] {
                [n, i, k] => Vertex::Loop { n, i, k },
                _ => return Err(bad()),
            }
        };
        Ok(Node { vertex, phase })
    }
}

/// A finite oriented graph with at most one arrow per ordered pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitGraph {
    nodes: Vec<Node>,
    arrows: Vec<(usize, usize)>,
    out: Vec<Vec<usize>>,
    period_lift: usize,
}

impl ExplicitGraph {
    /// Build from nodes and arrows given by endpoint nodes; vertices and arrows are sorted.
    pub fn from_parts(mut nodes: Vec<Node>, arrows: Vec<(Node, Node)>, period_lift: usize) -> Result<ExplicitGraph> {
        if period_lift == 0 {
            return Err(Error::InvalidArgument("period lift must be at least 1".into()));
        }
        nodes.sort();
        let before = nodes.len();
        nodes.dedup();
        if nodes.len() != before {
            return Err(Error::InvalidArgument("duplicate vertex".into()));
        }
        let index: HashMap<Node, usize> = nodes.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut idx_arrows = Vec::with_capacity(arrows.len());
        for (u, v) in arrows {
            let (Some(&a), Some(&b)) = (index.get(&u), index.get(&v)) else {
                return Err(Error::InvalidArgument(format!("arrow {u:?} -> {v:?} uses an unknown vertex")));
            };
            idx_arrows.push((a, b));
        }
        idx_arrows.sort_unstable();
        let before = idx_arrows.len();
        idx_arrows.dedup();
        if idx_arrows.len() != before {
            return Err(Error::InvalidArgument("more than one arrow between the same ordered pair".into()));
        }
        let mut out = vec![Vec::new(); nodes.len()];
        for &(a, b) in &idx_arrows {
            out[a].push(b);
        }
        Ok(ExplicitGraph {
            nodes,
            arrows: idx_arrows,
            out,
            period_lift,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Arrows as index pairs into [`ExplicitGraph::nodes`], sorted.
    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn period_lift(&self) -> usize {
        self.period_lift
    }

    pub fn index_of(&self, node: &Node) -> Option<usize> {
        self.nodes.binary_search(node).ok()
    }

    /// Index of the distinguished vertex (root, phase 1).
    pub fn root(&self) -> usize {
        self.index_of(&Node::root()).expect("every realized graph has a root")
    }

    /// Loop counts per length read back off the vertex names: `a(1..=N)`.
    pub fn loop_spectrum(&self) -> Vec<BigUint> {
        let mut per_len: HashMap<usize, usize> = HashMap::new();
        let mut max_n = 1;
        for node in &self.nodes {
            if let Vertex::Loop { n, i, k: 1 } = node.vertex {
                if node.phase == 1 {
                    per_len.entry(n).and_modify(|c| *c = (*c).max(i)).or_insert(i);
                    max_n = max_n.max(n);
                }
            }
        }
        let mut a = vec![BigUint::zero(); max_n];
        let root_last = self.index_of(&Node {
            vertex: Vertex::Root,
            phase: self.period_lift,
        });
        if let Some(r) = root_last {
            if self.out[r].contains(&self.root()) {
                a[0] = BigUint::one();
            }
        }
        for (n, count) in per_len {
            a[n - 1] = BigUint::from(count);
        }
        a
    }

    /// Every vertex reaches the root and is reached from it.
    pub fn is_strongly_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let root = self.root();
        let forward = reachable(&self.out, root);
        let mut rev = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.arrows {
            rev[b].push(a);
        }
        let backward = reachable(&rev, root);
        forward.iter().all(|&x| x) && backward.iter().all(|&x| x)
    }
}

fn reachable(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

fn check_size(vertices: &BigUint) -> Result<()> {
    match vertices.to_usize() {
        Some(v) if v <= MAX_VERTICES => Ok(()),
        _ => Err(Error::GraphTooLarge {
            vertices: vertices.to_string(),
            limit: MAX_VERTICES,
        }),
    }
}

/// Vertex count `1 + Σ_{n=2}^{N} a(n)(n-1)` of the truncation at `n_max`.
pub fn realized_vertex_count(s: &LoopSpectrum, n_max: usize) -> BigUint {
    let mut total = BigUint::one();
    for n in 2..=n_max.min(s.max_n()) {
        total += s.a(n) * BigUint::from(n - 1);
    }
    total
}

/// Largest truncation `N <= s.max_n()` whose realization (times `period`) stays within `limit` vertices.
pub fn largest_realizable(s: &LoopSpectrum, period: usize, limit: usize) -> usize {
    let limit = BigUint::from(limit);
    let p = BigUint::from(period.max(1));
    (1..=s.max_n())
        .take_while(|&n| realized_vertex_count(s, n) * &p <= limit)
        .last()
        .unwrap_or(0)
}

/// The finite subgraph made of the root and all loops of length `<= n_max`.
pub fn realize(s: &LoopSpectrum, n_max: usize) -> Result<ExplicitGraph> {
    if n_max == 0 || n_max > s.max_n() {
        return Err(Error::InvalidArgument(format!(
            "truncation {n_max} outside 1..={}",
            s.max_n()
        )));
    }
    if *s.a(1) > BigUint::one() {
        return Err(Error::InvalidArgument("a(1) > 1 needs parallel self-loops".into()));
    }
    check_size(&realized_vertex_count(s, n_max))?;
    let root = Node::root();
    let mut nodes = vec![root];
    let mut arrows = Vec::new();
    if s.a(1).is_one() {
        arrows.push((root, root));
    }
    for n in 2..=n_max {
        let count = s.a(n).to_usize().expect("size checked");
        for i in 1..=count {
            let at = |k: usize| {
                if k == 0 || k == n {
                    root
                } else {
                    Node {
                        vertex: Vertex::Loop { n, i, k },
                        phase: 1,
                    }
                }
            };
            for k in 1..n {
                nodes.push(at(k));
            }
            for k in 0..n {
                arrows.push((at(k), at(k + 1)));
            }
        }
    }
    ExplicitGraph::from_parts(nodes, arrows, 1)
}

/// Cross every vertex with phases `1..=p`: `(v,i) -> (v,i+1)` and `(v,p) -> (w,1)` for `v -> w`.
pub fn lift_period(g: &ExplicitGraph, p: usize) -> Result<ExplicitGraph> {
    if p == 0 {
        return Err(Error::InvalidArgument("period must be at least 1".into()));
    }
    if g.period_lift != 1 {
        return Err(Error::InvalidArgument("graph is already lifted".into()));
    }
    if p == 1 {
        return Ok(g.clone());
    }
    check_size(&(BigUint::from(g.vertex_count()) * BigUint::from(p)))?;
    let phase = |v: usize, i: usize| Node {
        vertex: g.nodes[v].vertex,
        phase: i,
    };
    let mut nodes = Vec::with_capacity(g.vertex_count() * p);
    let mut arrows = Vec::new();
    for v in 0..g.vertex_count() {
        for i in 1..=p {
            nodes.push(phase(v, i));
        }
        for i in 1..p {
            arrows.push((phase(v, i), phase(v, i + 1)));
        }
    }
    for &(v, w) in &g.arrows {
        arrows.push((phase(v, p), phase(w, 1)));
    }
    ExplicitGraph::from_parts(nodes, arrows, p)
}

/// Period of a strongly connected graph, from BFS levels: the gcd of
/// `level(u) + 1 - level(v)` over all arrows `u -> v`.
pub fn period(g: &ExplicitGraph) -> Result<u64> {
    let root = g.root();
    let mut level: Vec<Option<u64>> = vec![None; g.vertex_count()];
    level[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let lv = level[v].unwrap();
        for &w in &g.out[v] {
            if level[w].is_none() {
                level[w] = Some(lv + 1);
                queue.push_back(w);
            }
        }
    }
    let mut d = 0u64;
    for &(u, v) in &g.arrows {
        if let (Some(lu), Some(lv)) = (level[u], level[v]) {
            d = d.gcd(&(lu + 1).abs_diff(lv));
        }
    }
    if d == 0 {
        Err(Error::EmptyLoopSet)
    } else {
        Ok(d)
    }
}

/// gcd of the lengths of the loops through the root, `gcd{n p : a(n) > 0}`.
pub fn loop_length_gcd(g: &ExplicitGraph) -> Result<u64> {
    let p = g.period_lift as u64;
    let d = g
        .loop_spectrum()
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .fold(0u64, |acc, (i, _)| acc.gcd(&((i as u64 + 1) * p)));
    if d == 0 {
        Err(Error::EmptyLoopSet)
    } else {
        Ok(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<String>,
    arrows: Vec<[String; 2]>,
    period_lift: usize,
}

pub fn export(g: &ExplicitGraph, format: ExportFormat) -> String {
    match format {
        ExportFormat::Dot => export_dot(g),
        ExportFormat::Json => export_json(g),
    }
}

pub fn export_dot(g: &ExplicitGraph) -> String {
    let lifted = g.period_lift > 1;
    let mut s = String::from("digraph loops {\n");
    for node in &g.nodes {
        writeln!(s, "  \"{}\";", node.name(lifted)).unwrap();
    }
    for &(a, b) in &g.arrows {
        writeln!(s, "  \"{}\" -> \"{}\";", g.nodes[a].name(lifted), g.nodes[b].name(lifted)).unwrap();
    }
    s.push_str("}\n");
    s
}

pub fn export_json(g: &ExplicitGraph) -> String {
    let lifted = g.period_lift > 1;
    let doc = GraphJson {
        vertices: g.nodes.iter().map(|n| n.name(lifted)).collect(),
        arrows: g
            .arrows
            .iter()
            .map(|&(a, b)| [g.nodes[a].name(lifted), g.nodes[b].name(lifted)])
            .collect(),
        period_lift: g.period_lift,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn import_json(text: &str) -> Result<ExplicitGraph> {
    let doc: GraphJson = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let lifted = doc.period_lift > 1;
    let nodes = doc
        .vertices
        .iter()
        .map(|v| Node::parse(v, lifted))
        .collect::<Result<Vec<_>>>()?;
    let arrows = doc
        .arrows
        .iter()
        .map(|[a, b]| Ok((Node::parse(a, lifted)?, Node::parse(b, lifted)?)))
        .collect::<Result<Vec<_>>>()?;
    ExplicitGraph::from_parts(nodes, arrows, doc.period_lift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{BetaValue, PrecisionPolicy};
    use crate::spectrum::{build_spectrum, GrowthModel};

    fn beta2(n: usize) -> LoopSpectrum {
        build_spectrum(&BetaValue::integer(2).unwrap(), n, &PrecisionPolicy::default()).unwrap()
    }

    #[test]
    fn beta_two_truncated_at_four() {
        let g = realize(&beta2(16), 4).unwrap();
        assert_eq!(g.vertex_count(), 13);
        assert_eq!(g.arrow_count(), 17);
        assert!(g.is_strongly_connected());
        assert_eq!(period(&g).unwrap(), 1);
        let a = g.loop_spectrum();
        assert_eq!(a, vec![BigUint::from(1u32), 0u32.into(), 0u32.into(), 4u32.into()]);
    }

    #[test]
    fn single_self_loop() {
        let s = LoopSpectrum::from_u64s(&[1], GrowthModel::Finite).unwrap();
        let g = realize(&s, 1).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.arrows(), &[(0, 0)]);
        let dot = export_dot(&g);
        assert_eq!(dot, "digraph loops {\n  \"root\";\n  \"root\" -> \"root\";\n}\n");
    }

    #[test]
    fn vertex_count_formula() {
        let s = beta2(16);
        let g = realize(&s, 9).unwrap();
        assert_eq!(BigUint::from(g.vertex_count()), realized_vertex_count(&s, 9));
        assert_eq!(g.vertex_count(), 1 + 4 * 3 + 64 * 8);
    }

    #[test]
    fn lift_triples_vertices_and_period() {
        let g = realize(&beta2(16), 4).unwrap();
        let h = lift_period(&g, 3).unwrap();
        assert_eq!(h.vertex_count(), 39);
        assert_eq!(period(&h).unwrap(), 3);
        assert_eq!(loop_length_gcd(&h).unwrap(), 3);
        assert!(h.is_strongly_connected());
        assert!(lift_period(&h, 2).is_err());
        assert_eq!(lift_period(&g, 1).unwrap(), g);
    }

    #[test]
    fn support_two_and_four_has_period_two() {
        let s = LoopSpectrum::from_u64s(&[0, 1, 0, 2], GrowthModel::Finite).unwrap();
        let g = realize(&s, 4).unwrap();
        assert_eq!(period(&g).unwrap(), 2);
        assert_eq!(loop_length_gcd(&g).unwrap(), 2);
    }

    #[test]
    fn empty_loop_set() {
        let s = LoopSpectrum::from_u64s(&[0, 0], GrowthModel::Finite).unwrap();
        let g = realize(&s, 2).unwrap();
        assert_eq!(period(&g), Err(Error::EmptyLoopSet));
        assert_eq!(loop_length_gcd(&g), Err(Error::EmptyLoopSet));
    }

    #[test]
    fn refuses_huge_truncations() {
        let s = beta2(64);
        assert!(matches!(realize(&s, 30), Err(Error::GraphTooLarge { .. })));
        let n = largest_realizable(&s, 1, MAX_VERTICES);
        assert!(realize(&s, n).is_ok());
    }

    #[test]
    fn json_round_trip_lifted() {
        let g = lift_period(&realize(&beta2(16), 9).unwrap(), 2).unwrap();
        let text = export_json(&g);
        let back = import_json(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(export_json(&back), text);
    }

    #[test]
    fn rejects_parallel_arrows() {
        let r = Node::root();
        assert!(ExplicitGraph::from_parts(vec![r], vec![(r, r), (r, r)], 1).is_err());
    }
}
