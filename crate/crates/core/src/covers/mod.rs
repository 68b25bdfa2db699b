//! Covers and precovers of a graph of groups.
//!
//! A total vertex lies over a base vertex and carries a finite-index subgroup
//! of its vertex group: a coset table over a non-cyclic vertex, or an index
//! `d` over a cyclic one (the `d`-cycle table). A total edge over the base
//! pair `P` realizes, on each side `s`, the elevation of `P.words[s]` given by
//! the cycle through its anchor coset. Elevations not realized by any edge
//! are hanging slots.

mod complete;
mod enumerate;
mod lift;
mod surgery;
mod torsion;
mod tower;

use std::borrow::Cow;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::cosets::{schreier, CosetTable};
use crate::error::{Error, Report, Result};
use crate::gog::{euler_characteristic, EdgePair, GraphOfGroups, Vertex, VertexKind};
use crate::homology::{h1, AbelianGroup};
use crate::words::Word;

pub use complete::{complete, CompletionBound};
pub use enumerate::{enumerate_covers, for_each_cover};
pub use lift::{lift_through, lift_word, LiftOutcome};
pub use surgery::{chain, detach_edge, merge_cyclic, ring, splice, split_cyclic, swap_glue, Chain, EdgeEnd, SlotRef};
pub use torsion::{certify_piece, find_torsion_piece, is_cut_vertex, TorsionPiece};
pub use tower::{build_tower, StepReport, TowerBounds, TowerReport, TowerStatus};

/// The subgroup carried by a total vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Lift {
    Table(CosetTable),
    /// Index of the subgroup of `Z`.
    Cyclic(usize),
}

impl Lift {
    pub fn index(&self) -> usize {
        match self {
            Lift::Table(t) => t.index(),
            Lift::Cyclic(d) => *d,
        }
    }

    pub fn table(&self) -> Cow<'_, CosetTable> {
        match self {
            Lift::Table(t) => Cow::Borrowed(t),
            Lift::Cyclic(d) => Cow::Owned(CosetTable::cyclic(*d)),
        }
    }

    pub fn subgroup_rank(&self) -> usize {
        match self {
            Lift::Table(t) => t.subgroup_rank(),
            Lift::Cyclic(_) => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalVertex {
    pub name: String,
    pub over: usize,
    pub lift: Lift,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalEdge {
    pub name: String,
    /// Base edge pair.
    pub over: usize,
    pub ends: [usize; 2],
    /// Least coset of the realized cycle on each side.
    pub anchors: [usize; 2],
}

/// An unrealized elevation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HangingSlot {
    pub vertex: usize,
    pub pair: usize,
    pub side: usize,
    pub anchor: usize,
    pub degree: usize,
}

/// A precover of `base`; a cover when no slot hangs.
#[derive(Clone, Debug)]
pub struct Precover {
    base: Arc<GraphOfGroups>,
    vertices: Vec<TotalVertex>,
    edges: Vec<TotalEdge>,
    base_vertex: usize,
}

impl PartialEq for Precover {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.base, &other.base) || self.base == other.base)
            && self.vertices == other.vertices
            && self.edges == other.edges
            && self.base_vertex == other.base_vertex
    }
}

impl Precover {
    /// Validates and normalizes anchors to cycle minima.
    pub fn new(
        base: Arc<GraphOfGroups>,
        vertices: Vec<TotalVertex>,
        mut edges: Vec<TotalEdge>,
        base_vertex: usize,
    ) -> Result<Precover> {
        let shape = shape_report(&base, &vertices, &edges, base_vertex);
        shape.into_result().map_err(Error::InvalidPrecover)?;
        for e in &mut edges {
            for s in 0..2 {
                let t = vertices[e.ends[s]].lift.table();
                e.anchors[s] = t.cycle_through(e.anchors[s], &base.edge(e.over).words[s]).1;
            }
        }
        let m = Precover { base, vertices, edges, base_vertex };
        m.validate().into_result().map_err(Error::InvalidPrecover)?;
        Ok(m)
    }

    pub(crate) fn from_parts(
        base: Arc<GraphOfGroups>,
        vertices: Vec<TotalVertex>,
        edges: Vec<TotalEdge>,
        base_vertex: usize,
    ) -> Precover {
        let m = Precover { base, vertices, edges, base_vertex };
        debug_assert!(m.validate().is_ok(), "{}", m.validate());
        m
    }

    /// The identity cover.
    pub fn identity(base: Arc<GraphOfGroups>) -> Precover {
        let vertices = base
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| TotalVertex { name: v.name.clone(), over: i, lift: trivial_lift(v) })
            .collect();
        let edges = base
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| TotalEdge { name: e.name.clone(), over: i, ends: e.ends, anchors: [0, 0] })
            .collect();
        let bv = base.base();
        Precover::from_parts(base, vertices, edges, bv)
    }

    pub fn base(&self) -> &Arc<GraphOfGroups> {
        &self.base
    }

    pub fn vertices(&self) -> &[TotalVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[TotalEdge] {
        &self.edges
    }

    pub fn base_vertex(&self) -> usize {
        self.base_vertex
    }

    pub fn with_base_vertex(mut self, v: usize) -> Result<Precover> {
        if self.vertices.get(v).map(|x| x.over) != Some(self.base.base()) {
            return Err(Error::Surgery(format!("vertex #{v} does not lie over the base vertex")));
        }
        self.base_vertex = v;
        Ok(self)
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownName { kind: "total vertex", name: name.to_string() })
    }

    pub fn edge_index(&self, name: &str) -> Result<usize> {
        self.edges
            .iter()
            .position(|e| e.name == name)
            .ok_or_else(|| Error::UnknownName { kind: "total edge", name: name.to_string() })
    }

    pub fn is_cyclic(&self, v: usize) -> bool {
        self.base.is_cyclic(self.vertices[v].over)
    }

    pub(crate) fn side_word(&self, pair: usize, side: usize) -> &Word {
        &self.base.edge(pair).words[side]
    }

    /// Degree of the total edge (equal on both sides when valid).
    pub fn edge_degree(&self, e: usize) -> usize {
        let edge = &self.edges[e];
        let t = self.vertices[edge.ends[0]].lift.table();
        t.cycle_through(edge.anchors[0], self.side_word(edge.over, 0)).0
    }

    /// Every elevation at every vertex as a slot, realized or not.
    pub fn all_elevations(&self) -> Vec<HangingSlot> {
        let mut out = Vec::new();
        for (v, tv) in self.vertices.iter().enumerate() {
            let table = tv.lift.table();
            for (p, pair) in self.base.edges().iter().enumerate() {
                for s in 0..2 {
                    if pair.ends[s] != tv.over {
                        continue;
                    }
                    for cycle in table.word_cycles(&pair.words[s]) {
                        out.push(HangingSlot { vertex: v, pair: p, side: s, anchor: cycle[0], degree: cycle.len() });
                    }
                }
            }
        }
        out
    }

    /// Unrealized elevations, ordered by (vertex, pair, side, anchor).
    pub fn hanging_slots(&self) -> Vec<HangingSlot> {
        let used: HashSet<(usize, usize, usize, usize)> = self
            .edges
            .iter()
            .flat_map(|e| (0..2).map(move |s| (e.ends[s], e.over, s, e.anchors[s])))
            .collect();
        self.all_elevations()
            .into_iter()
            .filter(|h| !used.contains(&(h.vertex, h.pair, h.side, h.anchor)))
            .collect()
    }

    /// Precover axioms: lifts match base kinds, edges lie over their pairs,
    /// anchors are cycle minima, degrees agree across each edge, and no
    /// elevation is realized twice.
    pub fn validate(&self) -> Report {
        let mut report = shape_report(&self.base, &self.vertices, &self.edges, self.base_vertex);
        if !report.is_ok() {
            return report;
        }
        let mut used = HashMap::new();
        for e in &self.edges {
            let loc = format!("edge {}", e.name);
            let mut degrees = [0; 2];
            for s in 0..2 {
                let t = self.vertices[e.ends[s]].lift.table();
                let (len, min) = t.cycle_through(e.anchors[s], self.side_word(e.over, s));
                if min != e.anchors[s] {
                    report.push(&loc, format!("anchor {} at side {s} is not the least coset {min} of its cycle", e.anchors[s]));
                }
                degrees[s] = len;
                if let Some(other) = used.insert((e.ends[s], e.over, s, min), e.name.clone()) {
                    report.push(
                        &loc,
                        format!(
                            "elevation at {} (side {s}, coset {min}) already realized by edge {other}",
                            self.vertices[e.ends[s]].name
                        ),
                    );
                }
            }
            if degrees[0] != degrees[1] {
                report.push(&loc, format!("degree mismatch at edge ({} vs {})", degrees[0], degrees[1]));
            }
        }
        report
    }

    /// Precover axioms plus: every elevation realized.
    pub fn validate_cover(&self) -> Report {
        let mut report = self.validate();
        if !report.is_ok() {
            return report;
        }
        for h in self.hanging_slots() {
            report.push(
                format!("vertex {}", self.vertices[h.vertex].name),
                format!(
                    "missing elevation: hanging slot of degree {} for edge {} side {} at coset {}",
                    h.degree,
                    self.base.edge(h.pair).name,
                    h.side,
                    h.anchor
                ),
            );
        }
        report
    }

    pub fn is_cover(&self) -> bool {
        self.validate_cover().is_ok()
    }

    /// `Σ_{v′ ↦ v} index(v′)` for each base vertex `v`.
    pub fn index_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.base.vertices().len()];
        for v in &self.vertices {
            sums[v.over] += v.lift.index();
        }
        sums
    }

    pub fn predegree(&self) -> usize {
        self.index_sums().into_iter().max().unwrap_or(0)
    }

    /// Degree of a connected cover.
    pub fn degree(&self) -> Result<usize> {
        let report = self.validate_cover();
        report.into_result().map_err(Error::InvalidPrecover)?;
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let sums = self.index_sums();
        if sums.iter().any(|&s| s != sums[0]) {
            let mut r = Report::new();
            r.push("cover", format!("inconsistent index sums {sums:?}"));
            return Err(Error::InvalidPrecover(r));
        }
        Ok(sums[0])
    }

    /// Component label of every total vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(e.ends[0], e.ends[1]);
        }
        let mut labels = HashMap::new();
        (0..self.vertices.len())
            .map(|v| {
                let r = uf.find(v);
                let next = labels.len();
                *labels.entry(r).or_insert(next)
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// The total graph of groups: vertex groups are the lifted subgroups in
    /// their Schreier bases, edge words are the realized elevations rewritten
    /// in those bases.
    pub fn total_graph(&self) -> GraphOfGroups {
        let tables: Vec<CosetTable> = self.vertices.iter().map(|v| v.lift.table().into_owned()).collect();
        let schreiers: Vec<_> = tables.iter().map(schreier).collect();
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                let rank = v.lift.subgroup_rank();
                let kind = if self.base.is_cyclic(v.over) { VertexKind::Cyclic } else { VertexKind::for_rank(rank) };
                Vertex { name: v.name.clone(), rank, kind }
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let d = self.edge_degree(i);
                let words = [0, 1].map(|s| {
                    let v = e.ends[s];
                    let sch = &schreiers[v];
                    let rep = &sch.representatives[e.anchors[s]];
                    let elevated = self.side_word(e.over, s).pow(d as i64).conjugate_by(rep);
                    sch.rewrite(&tables[v], &elevated).expect("elevations lie in the subgroup")
                });
                EdgePair { name: e.name.clone(), ends: e.ends, words }
            })
            .collect();
        GraphOfGroups::new_unconnected(vertices, edges, self.base_vertex).expect("total graph is well formed")
    }

    pub fn euler_characteristic(&self) -> i64 {
        euler_characteristic(&self.total_graph())
    }

    pub fn h1(&self) -> Result<AbelianGroup> {
        h1(&self.total_graph())
    }

    /// Edges incident to `v` as (edge, side) pairs.
    pub fn incident(&self, v: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            for s in 0..2 {
                if e.ends[s] == v {
                    out.push((i, s));
                }
            }
        }
        out
    }

    /// The sub-precover on the kept vertices and the edges between them.
    pub fn induced(&self, keep: &[bool]) -> Precover {
        let mut map = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if keep[i] {
                map[i] = vertices.len();
                vertices.push(v.clone());
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.ends[0]] && keep[e.ends[1]])
            .map(|e| TotalEdge { ends: e.ends.map(|v| map[v]), ..e.clone() })
            .collect();
        let bv = if keep[self.base_vertex] {
            map[self.base_vertex]
        } else {
            vertices.iter().position(|v| v.over == self.base.base()).unwrap_or(0)
        };
        Precover::from_parts(self.base.clone(), vertices, edges, bv)
    }

    pub fn describe(&self) -> String {
        self.to_string()
    }
}

fn trivial_lift(v: &Vertex) -> Lift {
    match v.kind {
        VertexKind::Cyclic => Lift::Cyclic(1),
        VertexKind::NonCyclic => Lift::Table(CosetTable::trivial(v.rank)),
    }
}

fn shape_report(base: &GraphOfGroups, vertices: &[TotalVertex], edges: &[TotalEdge], base_vertex: usize) -> Report {
    let mut report = Report::new();
    let mut names = HashSet::new();
    for v in vertices {
        let loc = format!("vertex {}", v.name);
        if !names.insert(v.name.as_str()) {
            report.push(&loc, "duplicate vertex name");
        }
        let Some(bv) = base.vertices().get(v.over) else {
            report.push(&loc, "lies over a missing base vertex");
            continue;
        };
        match (&v.lift, bv.kind) {
            (Lift::Cyclic(0), _) => report.push(&loc, "cyclic index must be positive"),
            (Lift::Cyclic(_), VertexKind::Cyclic) => {}
            (Lift::Table(t), VertexKind::NonCyclic) if t.rank() == bv.rank => {}
            (Lift::Table(t), VertexKind::NonCyclic) => {
                report.push(&loc, format!("table of rank {} over vertex {} of rank {}", t.rank(), bv.name, bv.rank))
            }
            (Lift::Table(_), VertexKind::Cyclic) => {
                report.push(&loc, format!("coset table over cyclic vertex {}; expected an index", bv.name))
            }
            (Lift::Cyclic(_), VertexKind::NonCyclic) => {
                report.push(&loc, format!("cyclic index over non-cyclic vertex {}", bv.name))
            }
        }
    }
    match vertices.get(base_vertex) {
        None if !vertices.is_empty() => report.push("base", "designated base vertex missing"),
        Some(v) if v.over != base.base() => report.push("base", "designated base vertex does not lie over the base"),
        _ => {}
    }
    let mut names = HashSet::new();
    for e in edges {
        let loc = format!("edge {}", e.name);
        if !names.insert(e.name.as_str()) {
            report.push(&loc, "duplicate edge name");
        }
        let Some(pair) = base.edges().get(e.over) else {
            report.push(&loc, "lies over a missing base edge");
            continue;
        };
        for s in 0..2 {
            match vertices.get(e.ends[s]) {
                None => report.push(&loc, format!("end {s} refers to a missing vertex")),
                Some(v) if v.over != pair.ends[s] => report.push(
                    &loc,
                    format!("end {s} lies over {} but edge {} needs {}", base.vertex(v.over).name, pair.name, base.vertex(pair.ends[s]).name),
                ),
                Some(v) if e.anchors[s] >= v.lift.index() => {
                    report.push(&loc, format!("anchor {} at side {s} out of range", e.anchors[s]))
                }
                _ => {}
            }
        }
    }
    report
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    /// Returns false when already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Disjoint union; returns the vertex and edge offsets of each part.
///
/// Names colliding with an earlier part get a `#i` suffix.
pub fn disjoint_union(parts: &[&Precover]) -> Result<(Precover, Vec<(usize, usize)>)> {
    let Some(first) = parts.first() else {
        return Err(Error::Surgery("empty union".into()));
    };
    let base = first.base.clone();
    let mut vertices: Vec<TotalVertex> = Vec::new();
    let mut edges: Vec<TotalEdge> = Vec::new();
    let mut vnames = HashSet::new();
    let mut enames = HashSet::new();
    let mut offsets = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        if !(Arc::ptr_eq(&p.base, &base) || *p.base == *base) {
            return Err(Error::Surgery(format!("part {i} covers a different graph")));
        }
        let (vo, eo) = (vertices.len(), edges.len());
        offsets.push((vo, eo));
        for v in &p.vertices {
            let name = fresh(&mut vnames, &v.name, i);
            vertices.push(TotalVertex { name, ..v.clone() });
        }
        for e in &p.edges {
            let name = fresh(&mut enames, &e.name, i);
            edges.push(TotalEdge { name, over: e.over, ends: e.ends.map(|v| v + vo), anchors: e.anchors });
        }
    }
    Ok((Precover::from_parts(base, vertices, edges, first.base_vertex), offsets))
}

fn fresh(used: &mut HashSet<String>, name: &str, part: usize) -> String {
    let mut candidate = name.to_string();
    let mut k = part;
    while used.contains(&candidate) {
        candidate = format!("{name}#{k}");
        k += 1;
    }
    used.insert(candidate.clone());
    candidate
}

pub(crate) fn fresh_name(existing: impl IntoIterator<Item = String>, prefix: &str) -> String {
    let used: HashSet<String> = existing.into_iter().collect();
    (0..).map(|i| format!("{prefix}{i}")).find(|n| !used.contains(n)).expect("unbounded")
}

/// Isomorphism of precovers of the same base: a bijection of total vertices
/// preserving base vertex and lift (tables compared exactly) that carries
/// the edges onto the edges with equal anchors.
pub fn is_isomorphic(a: &Precover, b: &Precover) -> bool {
    if a.vertices.len() != b.vertices.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    if !(Arc::ptr_eq(&a.base, &b.base) || a.base == b.base) {
        return false;
    }
    let signature = |m: &Precover, v: usize| {
        let mut s: Vec<(usize, usize, usize)> = m
            .incident(v)
            .into_iter()
            .map(|(e, side)| (m.edges[e].over, side, m.edges[e].anchors[side]))
            .collect();
        s.sort_unstable();
        s
    };
    let sig_a: Vec<_> = (0..a.vertices.len()).map(|v| signature(a, v)).collect();
    let sig_b: Vec<_> = (0..b.vertices.len()).map(|v| signature(b, v)).collect();
    let between = |m: &Precover, x: usize, y: usize| {
        let mut s: Vec<(usize, [usize; 2])> =
            m.edges.iter().filter(|e| e.ends == [x, y]).map(|e| (e.over, e.anchors)).collect();
        s.sort_unstable();
        s
    };
    struct Search<'a, F, G>
    where
        F: Fn(&Precover, usize, usize) -> Vec<(usize, [usize; 2])>,
        G: Fn(usize, usize) -> bool,
    {
        a: &'a Precover,
        b: &'a Precover,
        map: Vec<usize>,
        used: Vec<bool>,
        between: F,
        compatible: G,
    }
    impl<F, G> Search<'_, F, G>
    where
        F: Fn(&Precover, usize, usize) -> Vec<(usize, [usize; 2])>,
        G: Fn(usize, usize) -> bool,
    {
        fn run(&mut self, i: usize) -> bool {
            if i == self.map.len() {
                return true;
            }
            for j in 0..self.map.len() {
                if self.used[j] || !(self.compatible)(i, j) {
                    continue;
                }
                self.map[i] = j;
                let consistent = (0..=i).all(|k| {
                    let (mk, mi) = (self.map[k], j);
                    (self.between)(self.a, i, k) == (self.between)(self.b, mi, mk)
                        && (self.between)(self.a, k, i) == (self.between)(self.b, mk, mi)
                });
                if consistent {
                    self.used[j] = true;
                    if self.run(i + 1) {
                        return true;
                    }
                    self.used[j] = false;
                }
            }
            self.map[i] = usize::MAX;
            false
        }
    }
    let compatible = |i: usize, j: usize| {
        a.vertices[i].over == b.vertices[j].over && a.vertices[i].lift == b.vertices[j].lift && sig_a[i] == sig_b[j]
    };
    let n = a.vertices.len();
    let mut search = Search { a, b, map: vec![usize::MAX; n], used: vec![false; n], between, compatible };
    search.run(0)
}

impl fmt::Display for Precover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vertices {
            let lift = match &v.lift {
                Lift::Table(t) => format!("table {t}"),
                Lift::Cyclic(d) => format!("index {d}"),
            };
            writeln!(f, "vertex {} over {} {}", v.name, self.base.vertex(v.over).name, lift)?;
        }
        for e in &self.edges {
            writeln!(
                f,
                "edge {} over {} {}@{} -- {}@{}",
                e.name,
                self.base.edge(e.over).name,
                self.vertices[e.ends[0]].name,
                e.anchors[0],
                self.vertices[e.ends[1]].name,
                e.anchors[1]
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn hnn_f2() -> Arc<GraphOfGroups> {
        Arc::new(GraphOfGroups::builder().vertex("v", 2).edge("t", "v", "v", &[1], &[2]).build().unwrap())
    }

    /// Index-2 cover of the HNN extension of `F_2` along `a ~ b`: two copies
    /// of the vertex with the stable edges crossed.
    fn hnn_double(g: &Arc<GraphOfGroups>) -> Precover {
        let t = CosetTable::trivial(2);
        let vertices = vec![
            TotalVertex { name: "v0".into(), over: 0, lift: Lift::Table(t.clone()) },
            TotalVertex { name: "v1".into(), over: 0, lift: Lift::Table(t) },
        ];
        let edges = vec![
            TotalEdge { name: "t0".into(), over: 0, ends: [0, 1], anchors: [0, 0] },
            TotalEdge { name: "t1".into(), over: 0, ends: [1, 0], anchors: [0, 0] },
        ];
        Precover::new(g.clone(), vertices, edges, 0).unwrap()
    }

    #[test]
    fn identity_cover() {
        for g in [fixtures::hnn_f1(), fixtures::genus2(), fixtures::seeded_torsion()] {
            let m = Precover::identity(Arc::new(g));
            assert!(m.validate().is_ok());
            assert!(m.validate_cover().is_ok());
            assert!(m.hanging_slots().is_empty());
            assert_eq!(m.degree().unwrap(), 1);
            assert_eq!(m.predegree(), 1);
            assert_eq!(m.total_graph(), **m.base());
        }
    }

    #[test]
    fn double_cover_of_hnn() {
        let g = hnn_f2();
        let m = hnn_double(&g);
        assert!(m.validate_cover().is_ok());
        assert_eq!(m.degree().unwrap(), 2);
        assert_eq!(m.euler_characteristic(), 2 * euler_characteristic(&g));
        let fewer = Precover::new(g, m.vertices().to_vec(), m.edges()[..1].to_vec(), 0).unwrap();
        assert!(fewer.validate_cover().mentions("missing elevation"));
    }

    #[test]
    fn degree_mismatch_reported() {
        let g = hnn_f2();
        let swap = CosetTable::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let vertices = vec![TotalVertex { name: "v".into(), over: 0, lift: Lift::Table(swap) }];
        // side 0 ([a]) has degree 2, side 1 ([b]) degree 1 at coset 0.
        let edges = vec![TotalEdge { name: "t".into(), over: 0, ends: [0, 0], anchors: [0, 0] }];
        let err = Precover::new(g, vertices, edges, 0).unwrap_err();
        assert!(matches!(err, Error::InvalidPrecover(r) if r.mentions("degree mismatch at edge")));
    }

    #[test]
    fn detached_identity_hangs_twice() {
        let g = Arc::new(fixtures::seeded_torsion());
        let m = Precover::identity(g);
        let d = detach_edge(&m, 0).unwrap();
        assert!(d.validate().is_ok());
        let slots = d.hanging_slots();
        assert_eq!(slots.len(), 2);
        assert_ne!(d.is_cyclic(slots[0].vertex), d.is_cyclic(slots[1].vertex));
        assert_eq!(d.predegree(), 1);
    }

    #[test]
    fn union_doubles_predegree() {
        let m = Precover::identity(Arc::new(fixtures::genus2()));
        let (u, _) = disjoint_union(&[&m, &m]).unwrap();
        assert_eq!(u.predegree(), 2);
        assert!(matches!(u.degree(), Err(Error::Disconnected)));
        assert!(!is_isomorphic(&u, &m));
        assert!(is_isomorphic(&m, &m.clone()));
    }

    #[test]
    fn induced_component() {
        let m = Precover::identity(Arc::new(fixtures::genus2()));
        let (u, _) = disjoint_union(&[&m, &m]).unwrap();
        let comps = u.components();
        let keep: Vec<bool> = comps.iter().map(|&c| c == 0).collect();
        assert!(is_isomorphic(&u.induced(&keep), &m));
    }
}
