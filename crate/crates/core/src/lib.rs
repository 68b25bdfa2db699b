//! Exact-arithmetic workbench for graphs of free groups with cyclic edge
//! groups.
//!
//! The crate covers free-group words ([`words`]), finite-index subgroups as
//! coset tables ([`cosets`]), the graph-of-groups model ([`gog`]), covers and
//! precovers with the surgery used to assemble torsion-rich covers
//! ([`covers`]), and integer homology ([`homology`]).

pub mod cosets;
pub mod covers;
pub mod error;
pub mod fixtures;
pub mod gog;
pub mod homology;
pub mod words;

pub use cosets::{CosetTable, Elevation, Pair};
pub use covers::{HangingSlot, Precover, TorsionPiece};
pub use error::{Error, Report, Result};
pub use gog::{GogWord, GraphOfGroups, OrientedEdge, VertexKind};
pub use homology::{AbelianGroup, IntMatrix, TowerLedger};
pub use words::{ConjClass, Word};
