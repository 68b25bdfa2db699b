//! Graphs of free groups with infinite cyclic edge groups.
//!
//! An edge pair joins `ends[0]` and `ends[1]`; `words[s]` is the image of the
//! edge-group generator in the vertex group at `ends[s]`. The oriented edge
//! `{pair, to: s}` terminates at `ends[s]`, and crossing it from side `1 − s`
//! obeys `words[1−s] · e = e · words[s]`.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use crate::cosets::Pair;
use crate::error::{Error, Report, Result};
use crate::homology::IntMatrix;
use crate::words::{abelianize_word, conj_canonical, primitive_root, ConjClass, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Cyclic,
    NonCyclic,
}

impl VertexKind {
    pub fn for_rank(rank: usize) -> VertexKind {
        if rank == 1 {
            VertexKind::Cyclic
        } else {
            VertexKind::NonCyclic
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub rank: usize,
    pub kind: VertexKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgePair {
    pub name: String,
    pub ends: [usize; 2],
    pub words: [Word; 2],
}

/// One orientation of an edge pair; it terminates at `ends[to]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedEdge {
    pub pair: usize,
    pub to: usize,
}

impl OrientedEdge {
    pub fn reverse(self) -> OrientedEdge {
        OrientedEdge { pair: self.pair, to: 1 - self.to }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphOfGroups {
    vertices: Vec<Vertex>,
    edges: Vec<EdgePair>,
    base: usize,
}

fn structural_report(vertices: &[Vertex], edges: &[EdgePair], base: usize) -> Report {
    let mut report = Report::new();
    let mut names = HashSet::new();
    for v in vertices {
        if !names.insert(v.name.as_str()) {
            report.push(format!("vertex {}", v.name), "duplicate vertex name");
        }
        if v.rank == 0 {
            report.push(format!("vertex {}", v.name), "rank must be at least 1");
        }
        if v.kind != VertexKind::for_rank(v.rank) {
            report.push(
                format!("vertex {}", v.name),
                format!("kind {:?} inconsistent with rank {}", v.kind, v.rank),
            );
        }
    }
    if base >= vertices.len() {
        report.push("base", "base vertex missing");
    }
    let mut names = HashSet::new();
    for e in edges {
        let loc = format!("edge {}", e.name);
        if !names.insert(e.name.as_str()) {
            report.push(&loc, "duplicate edge name");
        }
        for s in 0..2 {
            let Some(v) = vertices.get(e.ends[s]) else {
                report.push(&loc, format!("end {s} refers to a missing vertex"));
                continue;
            };
            let w = &e.words[s];
            if w.rank() != v.rank {
                report.push(&loc, format!("word {w} has rank {} but vertex {} has rank {}", w.rank(), v.name, v.rank));
            }
            if w.is_identity() {
                report.push(&loc, format!("trivial edge embedding at side {s}"));
            }
        }
    }
    report
}

fn components_of(n: usize, edges: &[EdgePair]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.ends[0]].push(e.ends[1]);
        adj[e.ends[1]].push(e.ends[0]);
    }
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if comp[u] == usize::MAX {
                    comp[u] = next;
                    queue.push_back(u);
                }
            }
        }
        next += 1;
    }
    comp
}

impl GraphOfGroups {
    /// Builds and validates a connected graph of groups.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<EdgePair>, base: usize) -> Result<GraphOfGroups> {
        let g = Self::new_unconnected(vertices, edges, base)?;
        let report = g.validate();
        report.into_result().map_err(Error::InvalidGraph)?;
        Ok(g)
    }

    /// As [`GraphOfGroups::new`] but accepts disconnected graphs, as arise
    /// for total graphs of precovers.
    pub fn new_unconnected(vertices: Vec<Vertex>, edges: Vec<EdgePair>, base: usize) -> Result<GraphOfGroups> {
        structural_report(&vertices, &edges, base).into_result().map_err(Error::InvalidGraph)?;
        Ok(GraphOfGroups { vertices, edges, base })
    }

    pub fn builder() -> GogBuilder {
        GogBuilder::default()
    }

    /// All graph-of-groups axioms, including connectivity.
    pub fn validate(&self) -> Report {
        let mut report = structural_report(&self.vertices, &self.edges, self.base);
        if report.is_ok() && !self.is_connected() {
            let comp = components_of(self.vertices.len(), &self.edges);
            let count = comp.iter().max().map_or(0, |m| m + 1);
            report.push("graph", format!("disconnected ({count} components)"));
        }
        report
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgePair] {
        &self.edges
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn edge(&self, e: usize) -> &EdgePair {
        &self.edges[e]
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownName { kind: "vertex", name: name.to_string() })
    }

    pub fn edge_index(&self, name: &str) -> Result<usize> {
        self.edges
            .iter()
            .position(|e| e.name == name)
            .ok_or_else(|| Error::UnknownName { kind: "edge", name: name.to_string() })
    }

    pub fn is_cyclic(&self, v: usize) -> bool {
        self.vertices[v].kind == VertexKind::Cyclic
    }

    pub fn initial(&self, e: OrientedEdge) -> usize {
        self.edges[e.pair].ends[1 - e.to]
    }

    pub fn terminal(&self, e: OrientedEdge) -> usize {
        self.edges[e.pair].ends[e.to]
    }

    pub fn edge_word(&self, e: OrientedEdge) -> &Word {
        &self.edges[e.pair].words[e.to]
    }

    /// Oriented edges terminating at `v`, ordered by (pair, side).
    pub fn incoming(&self, v: usize) -> Vec<OrientedEdge> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            for to in 0..2 {
                if e.ends[to] == v {
                    out.push(OrientedEdge { pair: i, to });
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        components_of(self.vertices.len(), &self.edges).iter().all(|&c| c == 0)
    }

    /// Component label of every vertex.
    pub fn components(&self) -> Vec<usize> {
        components_of(self.vertices.len(), &self.edges)
    }

    /// First column of vertex `v`'s generators in the abelianized
    /// presentation.
    pub fn generator_offset(&self, v: usize) -> usize {
        self.vertices[..v].iter().map(|x| x.rank).sum()
    }
}

/// Convenience constructor for graphs given by names and raw letters.
#[derive(Default, Debug, Clone)]
pub struct GogBuilder {
    vertices: Vec<Vertex>,
    edges: Vec<(String, String, String, Vec<i32>, Vec<i32>)>,
    base: Option<String>,
}

impl GogBuilder {
    pub fn vertex(mut self, name: &str, rank: usize) -> Self {
        self.vertices.push(Vertex { name: name.into(), rank, kind: VertexKind::for_rank(rank) });
        self
    }

    pub fn edge(mut self, name: &str, from: &str, to: &str, word_fwd: &[i32], word_bwd: &[i32]) -> Self {
        self.edges.push((name.into(), from.into(), to.into(), word_fwd.to_vec(), word_bwd.to_vec()));
        self
    }

    pub fn base(mut self, name: &str) -> Self {
        self.base = Some(name.into());
        self
    }

    fn parts(self) -> Result<(Vec<Vertex>, Vec<EdgePair>, usize)> {
        let find = |name: &str| {
            self.vertices
                .iter()
                .position(|v| v.name == name)
                .ok_or_else(|| Error::UnknownName { kind: "vertex", name: name.to_string() })
        };
        let mut edges = Vec::new();
        for (name, a, b, w0, w1) in &self.edges {
            let ends = [find(a)?, find(b)?];
            let words = [
                Word::new(w0.clone(), self.vertices[ends[0]].rank)?,
                Word::new(w1.clone(), self.vertices[ends[1]].rank)?,
            ];
            edges.push(EdgePair { name: name.clone(), ends, words });
        }
        let base = match &self.base {
            Some(b) => find(b)?,
            None => 0,
        };
        Ok((self.vertices, edges, base))
    }

    pub fn build(self) -> Result<GraphOfGroups> {
        let (v, e, b) = self.parts()?;
        GraphOfGroups::new(v, e, b)
    }

    pub fn build_unconnected(self) -> Result<GraphOfGroups> {
        let (v, e, b) = self.parts()?;
        GraphOfGroups::new_unconnected(v, e, b)
    }
}

/// Peripheral structure induced at a non-cyclic vertex, in the order of
/// [`GraphOfGroups::incoming`].
pub fn induced_pair(g: &GraphOfGroups, v: usize) -> Result<Pair> {
    if g.is_cyclic(v) {
        return Err(Error::DegenerateVertex(g.vertex(v).name.clone()));
    }
    let mut classes: Vec<ConjClass> = Vec::new();
    for e in g.incoming(v) {
        let class = conj_canonical(g.edge_word(e))?;
        if classes.contains(&class) {
            return Err(Error::DuplicateClass { vertex: g.vertex(v).name.clone(), class: class.to_string() });
        }
        classes.push(class);
    }
    Pair::new(g.vertex(v).rank, classes)
}

/// Reasons a list of classes fails to be malnormal in a free group.
///
/// Malnormal means every class is primitive and no two classes (or a class
/// and another's inverse) have conjugate roots.
pub fn malnormality_violations(classes: &[ConjClass]) -> Vec<String> {
    let mut out = Vec::new();
    let mut roots = Vec::new();
    for c in classes {
        let (root, exp) = primitive_root(c.canonical()).expect("classes are non-trivial");
        if exp > 1 {
            out.push(format!("{c} is a proper power ({root}^{exp})"));
        }
        roots.push(conj_canonical(&root).expect("non-trivial root"));
    }
    for i in 0..roots.len() {
        for j in 0..i {
            if roots[i] == roots[j] || roots[i] == roots[j].inverse() {
                out.push(format!("{} and {} have conjugate roots", classes[j], classes[i]));
            }
        }
    }
    out
}

/// Checks the bipartite normal form: every edge joins a cyclic and a
/// non-cyclic vertex, embeddings into cyclic vertices are generators, and
/// every non-cyclic vertex carries a malnormal induced pair.
pub fn check_normal_form(g: &GraphOfGroups) -> Report {
    let mut report = Report::new();
    for e in g.edges() {
        let kinds = [g.is_cyclic(e.ends[0]), g.is_cyclic(e.ends[1])];
        if kinds[0] == kinds[1] {
            let what = if kinds[0] { "cyclic" } else { "non-cyclic" };
            report.push(format!("edge {}", e.name), format!("joins two {what} vertices"));
        }
        for s in 0..2 {
            if kinds[s] && e.words[s].len() != 1 {
                report.push(
                    format!("edge {}", e.name),
                    format!("embedding {} into cyclic vertex {} is not a generator", e.words[s], g.vertex(e.ends[s]).name),
                );
            }
        }
    }
    for v in 0..g.vertices().len() {
        if g.is_cyclic(v) {
            continue;
        }
        let loc = format!("vertex {}", g.vertex(v).name);
        let classes: Vec<ConjClass> = g
            .incoming(v)
            .into_iter()
            .map(|e| conj_canonical(g.edge_word(e)).expect("edge words are non-trivial"))
            .collect();
        for issue in malnormality_violations(&classes) {
            report.push(&loc, format!("malnormality violation: {issue}"));
        }
    }
    report
}

/// `Σ_v (1 − rank(v))`; cyclic edge groups contribute nothing.
pub fn euler_characteristic(g: &GraphOfGroups) -> i64 {
    g.vertices().iter().map(|v| 1 - v.rank as i64).sum()
}

/// Origin of a column in the abelianized presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Column {
    Generator { vertex: usize, index: usize },
    Stable { pair: usize },
}

#[derive(Clone, Debug)]
pub struct Presentation {
    /// Vertex generators in vertex order, then one stable letter per edge
    /// pair outside the spanning forest, in edge order.
    pub columns: Vec<Column>,
    /// One row per edge pair.
    pub relations: IntMatrix,
}

/// Edge pairs of a breadth-first spanning forest rooted at the base vertex,
/// visiting incident edges in name order.
pub fn spanning_forest(g: &GraphOfGroups) -> Vec<bool> {
    let n = g.vertices().len();
    let mut by_name: Vec<usize> = (0..g.edges().len()).collect();
    by_name.sort_by(|&a, &b| g.edge(a).name.cmp(&g.edge(b).name));
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &i in &by_name {
        let e = g.edge(i);
        incident[e.ends[0]].push(i);
        if e.ends[1] != e.ends[0] {
            incident[e.ends[1]].push(i);
        }
    }
    let mut tree = vec![false; g.edges().len()];
    let mut seen = vec![false; n];
    let roots = std::iter::once(g.base()).chain(0..n);
    for root in roots {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &i in &incident[v] {
                let e = g.edge(i);
                let u = if e.ends[0] == v { e.ends[1] } else { e.ends[0] };
                if !seen[u] {
                    seen[u] = true;
                    tree[i] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    tree
}

pub fn abelianized_presentation(g: &GraphOfGroups) -> Presentation {
    let mut columns = Vec::new();
    for (v, vertex) in g.vertices().iter().enumerate() {
        for index in 0..vertex.rank {
            columns.push(Column::Generator { vertex: v, index });
        }
    }
    let tree = spanning_forest(g);
    for (i, in_tree) in tree.iter().enumerate() {
        if !in_tree {
            columns.push(Column::Stable { pair: i });
        }
    }
    let mut relations = IntMatrix::zeros(g.edges().len(), columns.len());
    for (row, e) in g.edges().iter().enumerate() {
        for (s, sign) in [(0usize, 1i64), (1, -1)] {
            let offset = g.generator_offset(e.ends[s]);
            for (k, x) in abelianize_word(&e.words[s]).into_iter().enumerate() {
                relations.add_to(row, offset + k, sign * x);
            }
        }
    }
    Presentation { columns, relations }
}

/// An element of the fundamental group written as an edge path: vertex-group
/// words interleaved with oriented edges, starting and ending at `base`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GogWord {
    base: usize,
    segments: Vec<Word>,
    edges: Vec<OrientedEdge>,
}

impl GogWord {
    pub fn new(g: &GraphOfGroups, base: usize, segments: Vec<Word>, edges: Vec<OrientedEdge>) -> Result<GogWord> {
        if segments.len() != edges.len() + 1 {
            return Err(Error::MalformedPath(format!(
                "{} segments for {} edges",
                segments.len(),
                edges.len()
            )));
        }
        if base >= g.vertices().len() {
            return Err(Error::MalformedPath("base vertex missing".into()));
        }
        let mut at = base;
        for (i, seg) in segments.iter().enumerate() {
            if seg.rank() != g.vertex(at).rank {
                return Err(Error::MalformedPath(format!(
                    "segment {i} has rank {} at vertex {} of rank {}",
                    seg.rank(),
                    g.vertex(at).name,
                    g.vertex(at).rank
                )));
            }
            if let Some(&e) = edges.get(i) {
                if e.pair >= g.edges().len() || e.to > 1 {
                    return Err(Error::MalformedPath(format!("edge {i} does not exist")));
                }
                if g.initial(e) != at {
                    return Err(Error::MalformedPath(format!(
                        "edge {} leaves {} but the path is at {}",
                        g.edge(e.pair).name,
                        g.vertex(g.initial(e)).name,
                        g.vertex(at).name
                    )));
                }
                at = g.terminal(e);
            }
        }
        if at != base {
            return Err(Error::MalformedPath(format!(
                "path ends at {} instead of {}",
                g.vertex(at).name,
                g.vertex(base).name
            )));
        }
        Ok(GogWord { base, segments, edges })
    }

    /// A loop with no edges.
    pub fn vertex_word(base: usize, w: Word) -> GogWord {
        GogWord { base, segments: vec![w], edges: Vec::new() }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn segments(&self) -> &[Word] {
        &self.segments
    }

    pub fn edges(&self) -> &[OrientedEdge] {
        &self.edges
    }

    /// Letters plus edges.
    pub fn cost(&self) -> usize {
        self.segments.iter().map(Word::len).sum::<usize>() + self.edges.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty() && self.segments[0].is_identity()
    }

    /// Concatenation of two loops at the same base.
    pub fn concat(&self, other: &GogWord) -> GogWord {
        assert_eq!(self.base, other.base);
        let mut segments = self.segments.clone();
        let last = segments.pop().expect("non-empty");
        let mut rest = other.segments.clone();
        rest[0] = last.mul(&rest[0]);
        segments.extend(rest);
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        GogWord { base: self.base, segments, edges }
    }

    pub fn pow(&self, n: usize) -> GogWord {
        let mut acc = GogWord::vertex_word(self.base, Word::identity(self.segments[0].rank()));
        for _ in 0..n {
            acc = acc.concat(self);
        }
        acc
    }

    pub fn display(&self, g: &GraphOfGroups) -> String {
        let mut out = format!("{}:{}", g.vertex(self.base).name, self.segments[0]);
        for (e, seg) in self.edges.iter().zip(&self.segments[1..]) {
            let dir = if e.to == 1 { "+" } else { "-" };
            out.push_str(&format!(" {}{} {}", dir, g.edge(e.pair).name, seg));
        }
        out
    }
}

/// Number of edges of the stored path.
pub fn word_length(w: &GogWord) -> usize {
    w.edges.len()
}

/// Positions `i` where edge `i + 1` immediately backtracks edge `i` through
/// a power of the edge word.
pub fn backtracks(g: &GraphOfGroups, w: &GogWord) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 0..w.edges.len().saturating_sub(1) {
        let (e, f) = (w.edges[i], w.edges[i + 1]);
        if f == e.reverse() && w.segments[i + 1].power_of(g.edge_word(e)).is_some() {
            out.push(i);
        }
    }
    out
}

pub fn is_reduced(g: &GraphOfGroups, w: &GogWord) -> bool {
    backtracks(g, w).is_empty()
}

/// Non-trivial reduced loops at the base vertex with cost at most
/// `max_cost`, ordered by cost then lexicographically.
///
/// Tokens compare letters before edges; letters in the order
/// `−r < … < −1 < 1 < … < r`, edges by (pair, orientation).
pub fn enumerate_gog_words(g: &GraphOfGroups, max_cost: usize) -> Vec<GogWord> {
    #[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
    enum Token {
        Letter(i32),
        Edge(usize, usize),
    }
    struct State<'a> {
        g: &'a GraphOfGroups,
        max: usize,
        found: BTreeMap<(usize, Vec<Token>), GogWord>,
    }
    fn rec(st: &mut State, at: usize, segs: &mut Vec<Vec<i32>>, edges: &mut Vec<OrientedEdge>, toks: &mut Vec<Token>) {
        let g = st.g;
        if at == g.base() && !toks.is_empty() {
            let segments = segs.iter().enumerate().map(|(i, s)| {
                let v = if i == 0 { g.base() } else { g.terminal(edges[i - 1]) };
                Word::new(s.clone(), g.vertex(v).rank).expect("letters in range")
            });
            let w = GogWord { base: g.base(), segments: segments.collect(), edges: edges.clone() };
            if is_reduced(g, &w) {
                st.found.insert((toks.len(), toks.clone()), w);
            }
        }
        if toks.len() == st.max {
            return;
        }
        let rank = g.vertex(at).rank as i32;
        for l in (-rank..=rank).filter(|&l| l != 0) {
            let seg = segs.last_mut().expect("segment");
            if seg.last() == Some(&-l) {
                continue;
            }
            seg.push(l);
            toks.push(Token::Letter(l));
            rec(st, at, segs, edges, toks);
            toks.pop();
            segs.last_mut().expect("segment").pop();
        }
        for pair in 0..g.edges().len() {
            for to in [1usize, 0] {
                let e = OrientedEdge { pair, to };
                if g.initial(e) != at {
                    continue;
                }
                edges.push(e);
                segs.push(Vec::new());
                toks.push(Token::Edge(pair, 1 - to));
                rec(st, g.terminal(e), segs, edges, toks);
                toks.pop();
                segs.pop();
                edges.pop();
            }
        }
    }
    let mut st = State { g, max: max_cost, found: BTreeMap::new() };
    rec(&mut st, g.base(), &mut vec![Vec::new()], &mut Vec::new(), &mut Vec::new());
    st.found.into_values().collect()
}

impl fmt::Display for GraphOfGroups {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vertices {
            writeln!(f, "vertex {} rank {}", v.name, v.rank)?;
        }
        for e in &self.edges {
            writeln!(
                f,
                "edge {} {}{} -- {}{}",
                e.name, self.vertices[e.ends[0]].name, e.words[0], self.vertices[e.ends[1]].name, e.words[1]
            )?;
        }
        Ok(())
    }
}
