//! The JSON workbench document.
//!
//! Every document carries `format_version`, a `kind`, the base graph of
//! groups, and at most one extra block matching its kind. Names are used for
//! all cross references; coset tables are lists of generator columns with
//! 0-based cosets. See `docs/format.md` for the annotated schema.

use std::sync::Arc;

use gogwork::covers::{certify_piece, Lift, TotalEdge, TotalVertex, TowerBounds};
use gogwork::gog::{EdgePair, Vertex};
use gogwork::{CosetTable, GraphOfGroups, Precover, TorsionPiece, VertexKind, Word};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

/// A schema or reference problem, located by field path.
#[derive(Debug, thiserror::Error)]
#[error("{path}: {message}")]
pub struct FormatError {
    pub path: String,
    pub message: String,
}

fn err<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError { path: path.into(), message: message.into() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Gog,
    Precover,
    TorsionPiece,
    Tower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub format_version: u32,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub gog: GogDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precover: Option<PrecoverDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion_piece: Option<PieceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tower: Option<TowerDoc>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKindDoc {
    Cyclic,
    NonCyclic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GogDoc {
    pub base: String,
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub name: String,
    pub rank: usize,
    /// Optional on input; checked against the rank when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<VertexKindDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub name: String,
    pub ends: [String; 2],
    /// Embedding at `ends[0]`.
    pub word_fwd: Vec<i32>,
    /// Embedding at `ends[1]`.
    #[serde(default)]
    pub word_bwd: Option<Vec<i32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecoverDoc {
    pub base_vertex: String,
    pub vertices: Vec<TotalVertexDoc>,
    pub edges: Vec<TotalEdgeDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TotalVertexDoc {
    pub name: String,
    pub over: String,
    /// Generator columns of the coset table (non-cyclic vertices).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<u32>>>,
    /// Index in `Z` (cyclic vertices).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TotalEdgeDoc {
    pub name: String,
    pub over: String,
    pub ends: [String; 2],
    pub anchors: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    pub prime: u64,
    pub boundary: [String; 2],
    pub piece: PrecoverDoc,
    pub source: PrecoverDoc,
    pub split_vertex: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerDoc {
    pub primes: Vec<u64>,
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub piece_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub piece_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_cost: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assemblies: Option<usize>,
}

impl BoundsDoc {
    pub fn resolve(&self) -> TowerBounds {
        let d = TowerBounds::default();
        TowerBounds {
            cover_index: self.cover_index.unwrap_or(d.cover_index),
            cover_cap: self.cover_cap.unwrap_or(d.cover_cap),
            piece_index: self.piece_index.unwrap_or(d.piece_index),
            piece_cap: self.piece_cap.unwrap_or(d.piece_cap),
            word_cost: self.word_cost.unwrap_or(d.word_cost),
            assemblies: self.assemblies.unwrap_or(d.assemblies),
        }
    }
}

/// A loaded document.
#[derive(Clone, Debug)]
pub enum Loaded {
    Gog(Arc<GraphOfGroups>),
    Precover(Precover),
    TorsionPiece(TorsionPiece),
    Tower { gog: Arc<GraphOfGroups>, config: TowerDoc },
}

impl Loaded {
    pub fn gog(&self) -> &Arc<GraphOfGroups> {
        match self {
            Loaded::Gog(g) | Loaded::Tower { gog: g, .. } => g,
            Loaded::Precover(m) => m.base(),
            Loaded::TorsionPiece(p) => p.piece.base(),
        }
    }
}

/// Parses and resolves a document. JSON syntax and schema errors carry
/// line and column; reference errors carry the field path.
pub fn parse(text: &str) -> Result<(Document, Loaded), FormatError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| FormatError { path: "document".into(), message: e.to_string() })?;
    match value.get("format_version").map(|v| v.as_u64()) {
        None => return err("format_version", "missing"),
        Some(Some(v)) if v == u64::from(FORMAT_VERSION) => {}
        Some(other) => {
            let shown = other.map_or_else(|| value["format_version"].to_string(), |v| v.to_string());
            return err("format_version", format!("unsupported version {shown}, expected {FORMAT_VERSION}"));
        }
    }
    let doc: Document =
        serde_json::from_str(text).map_err(|e| FormatError { path: "document".into(), message: e.to_string() })?;
    let loaded = load(&doc)?;
    Ok((doc, loaded))
}

pub fn load(doc: &Document) -> Result<Loaded, FormatError> {
    let present = [
        ("precover", doc.precover.is_some(), Kind::Precover),
        ("torsion_piece", doc.torsion_piece.is_some(), Kind::TorsionPiece),
        ("tower", doc.tower.is_some(), Kind::Tower),
    ];
    for (field, there, kind) in present {
        if there != (doc.kind == kind) {
            let why = if there { "present but kind is not " } else { "required for kind " };
            return err(field, format!("{why}{}", kind_name(kind)));
        }
    }
    let g = Arc::new(gog_from_doc(&doc.gog)?);
    Ok(match doc.kind {
        Kind::Gog => Loaded::Gog(g),
        Kind::Precover => Loaded::Precover(precover_from_doc(&g, doc.precover.as_ref().expect("checked"), "precover")?),
        Kind::TorsionPiece => Loaded::TorsionPiece(piece_from_doc(&g, doc.torsion_piece.as_ref().expect("checked"))?),
        Kind::Tower => {
            let config = doc.tower.clone().expect("checked");
            for (i, &p) in config.primes.iter().enumerate() {
                if !gogwork::homology::is_prime(p) {
                    return err(format!("tower.primes[{i}]"), format!("{p} is not prime"));
                }
            }
            Loaded::Tower { gog: g, config }
        }
    })
}

pub fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::Gog => "gog",
        Kind::Precover => "precover",
        Kind::TorsionPiece => "torsion_piece",
        Kind::Tower => "tower",
    }
}

pub fn gog_from_doc(d: &GogDoc) -> Result<GraphOfGroups, FormatError> {
    let mut vertices = Vec::new();
    for (i, v) in d.vertices.iter().enumerate() {
        let path = format!("gog.vertices[{i}]");
        if v.rank == 0 {
            return err(path + ".rank", format!("vertex {} has rank 0", v.name));
        }
        if d.vertices[..i].iter().any(|u| u.name == v.name) {
            return err(path + ".name", format!("duplicate vertex name {}", v.name));
        }
        let kind = VertexKind::for_rank(v.rank);
        if let Some(k) = v.kind {
            if k != kind_doc(kind) {
                return err(path + ".kind", format!("vertex {} of rank {} cannot be {k:?}", v.name, v.rank));
            }
        }
        vertices.push(Vertex { name: v.name.clone(), rank: v.rank, kind });
    }
    let index = |path: String, name: &str| -> Result<usize, FormatError> {
        match d.vertices.iter().position(|v| v.name == name) {
            Some(i) => Ok(i),
            None => err(path, format!("unknown vertex {name}")),
        }
    };
    let mut edges = Vec::new();
    for (i, e) in d.edges.iter().enumerate() {
        let path = format!("gog.edges[{i}]");
        if d.edges[..i].iter().any(|f| f.name == e.name) {
            return err(path + ".name", format!("duplicate edge name {}", e.name));
        }
        let ends = [index(format!("{path}.ends[0]"), &e.ends[0])?, index(format!("{path}.ends[1]"), &e.ends[1])?];
        let Some(bwd) = &e.word_bwd else {
            return err(path + ".word_bwd", format!("edge {} has no reverse embedding", e.name));
        };
        let word = |field: &str, letters: &[i32], v: usize| {
            Word::new(letters.to_vec(), vertices[v].rank)
                .map_err(|x| FormatError { path: format!("{path}.{field}"), message: format!("edge {}: {x}", e.name) })
        };
        let words = [word("word_fwd", &e.word_fwd, ends[0])?, word("word_bwd", bwd, ends[1])?];
        edges.push(EdgePair { name: e.name.clone(), ends, words });
    }
    let base = index("gog.base".into(), &d.base)?;
    GraphOfGroups::new(vertices, edges, base).map_err(|e| FormatError { path: "gog".into(), message: e.to_string() })
}

fn kind_doc(k: VertexKind) -> VertexKindDoc {
    match k {
        VertexKind::Cyclic => VertexKindDoc::Cyclic,
        VertexKind::NonCyclic => VertexKindDoc::NonCyclic,
    }
}

pub fn gog_to_doc(g: &GraphOfGroups) -> GogDoc {
    GogDoc {
        base: g.vertex(g.base()).name.clone(),
        vertices: g
            .vertices()
            .iter()
            .map(|v| VertexDoc { name: v.name.clone(), rank: v.rank, kind: Some(kind_doc(v.kind)) })
            .collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                name: e.name.clone(),
                ends: e.ends.map(|v| g.vertex(v).name.clone()),
                word_fwd: e.words[0].letters().to_vec(),
                word_bwd: Some(e.words[1].letters().to_vec()),
            })
            .collect(),
    }
}

pub fn precover_from_doc(g: &Arc<GraphOfGroups>, d: &PrecoverDoc, at: &str) -> Result<Precover, FormatError> {
    let mut vertices = Vec::new();
    for (i, v) in d.vertices.iter().enumerate() {
        let path = format!("{at}.vertices[{i}]");
        if d.vertices[..i].iter().any(|u| u.name == v.name) {
            return err(path + ".name", format!("duplicate total vertex name {}", v.name));
        }
        let over = g.vertex_index(&v.over).map_err(|e| FormatError { path: format!("{path}.over"), message: e.to_string() })?;
        let lift = match (g.is_cyclic(over), &v.table, v.index) {
            (true, None, Some(k)) if k >= 1 => Lift::Cyclic(k),
            (true, _, _) => return err(path, format!("{} lies over a cyclic vertex and needs a positive index (and no table)", v.name)),
            (false, Some(t), None) => Lift::Table(
                CosetTable::new(g.vertex(over).rank, t.clone())
                    .map_err(|e| FormatError { path: format!("{path}.table"), message: e.to_string() })?,
            ),
            (false, _, _) => return err(path, format!("{} lies over a non-cyclic vertex and needs a table (and no index)", v.name)),
        };
        vertices.push(TotalVertex { name: v.name.clone(), over, lift });
    }
    let index = |path: String, name: &str| -> Result<usize, FormatError> {
        match d.vertices.iter().position(|v| v.name == name) {
            Some(i) => Ok(i),
            None => err(path, format!("unknown total vertex {name}")),
        }
    };
    let mut edges = Vec::new();
    for (i, e) in d.edges.iter().enumerate() {
        let path = format!("{at}.edges[{i}]");
        if d.edges[..i].iter().any(|f| f.name == e.name) {
            return err(path + ".name", format!("duplicate total edge name {}", e.name));
        }
        let over = g.edge_index(&e.over).map_err(|x| FormatError { path: format!("{path}.over"), message: x.to_string() })?;
        let ends = [index(format!("{path}.ends[0]"), &e.ends[0])?, index(format!("{path}.ends[1]"), &e.ends[1])?];
        edges.push(TotalEdge { name: e.name.clone(), over, ends, anchors: e.anchors });
    }
    let base = index(format!("{at}.base_vertex"), &d.base_vertex)?;
    Precover::new(g.clone(), vertices, edges, base).map_err(|e| FormatError { path: at.into(), message: e.to_string() })
}

pub fn precover_to_doc(m: &Precover) -> PrecoverDoc {
    let g = m.base();
    PrecoverDoc {
        base_vertex: m.vertices()[m.base_vertex()].name.clone(),
        vertices: m
            .vertices()
            .iter()
            .map(|v| {
                let (table, index) = match &v.lift {
                    Lift::Table(t) => (Some(t.action().to_vec()), None),
                    Lift::Cyclic(d) => (None, Some(*d)),
                };
                TotalVertexDoc { name: v.name.clone(), over: g.vertex(v.over).name.clone(), table, index }
            })
            .collect(),
        edges: m
            .edges()
            .iter()
            .map(|e| TotalEdgeDoc {
                name: e.name.clone(),
                over: g.edge(e.over).name.clone(),
                ends: e.ends.map(|v| m.vertices()[v].name.clone()),
                anchors: e.anchors,
            })
            .collect(),
    }
}

fn piece_from_doc(g: &Arc<GraphOfGroups>, d: &PieceDoc) -> Result<TorsionPiece, FormatError> {
    let piece = precover_from_doc(g, &d.piece, "torsion_piece.piece")?;
    let source = precover_from_doc(g, &d.source, "torsion_piece.source")?;
    let find = |m: &Precover, path: &str, name: &str| {
        m.vertex_index(name).map_err(|e| FormatError { path: path.into(), message: e.to_string() })
    };
    let boundary = (
        find(&piece, "torsion_piece.boundary[0]", &d.boundary[0])?,
        find(&piece, "torsion_piece.boundary[1]", &d.boundary[1])?,
    );
    let split_vertex = find(&source, "torsion_piece.split_vertex", &d.split_vertex)?;
    let certificate = certify_piece(&piece, boundary, d.prime)
        .map_err(|e| FormatError { path: "torsion_piece".into(), message: e.to_string() })?;
    if certificate.complementary_rank == 0 {
        return err("torsion_piece", format!("no {}-torsion summand complementary to the boundary", d.prime));
    }
    Ok(TorsionPiece { piece, prime: d.prime, boundary, certificate, source, split_vertex })
}

pub fn piece_to_doc(p: &TorsionPiece) -> PieceDoc {
    let name = |v: usize| p.piece.vertices()[v].name.clone();
    PieceDoc {
        prime: p.prime,
        boundary: [name(p.boundary.0), name(p.boundary.1)],
        piece: precover_to_doc(&p.piece),
        source: precover_to_doc(&p.source),
        split_vertex: p.source.vertices()[p.split_vertex].name.clone(),
    }
}

/// A document for a loaded value.
pub fn to_document(loaded: &Loaded, description: Option<String>) -> Document {
    let mut doc = Document {
        format_version: FORMAT_VERSION,
        kind: Kind::Gog,
        description,
        gog: gog_to_doc(loaded.gog()),
        precover: None,
        torsion_piece: None,
        tower: None,
    };
    match loaded {
        Loaded::Gog(_) => {}
        Loaded::Precover(m) => {
            doc.kind = Kind::Precover;
            doc.precover = Some(precover_to_doc(m));
        }
        Loaded::TorsionPiece(p) => {
            doc.kind = Kind::TorsionPiece;
            doc.torsion_piece = Some(piece_to_doc(p));
        }
        Loaded::Tower { config, .. } => {
            doc.kind = Kind::Tower;
            doc.tower = Some(config.clone());
        }
    }
    doc
}

pub fn to_json(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}
