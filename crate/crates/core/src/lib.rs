//! Symbolic engine for Kato graphs of finite subgroups of PGL2 over
//! p-adic fields: group symbols, elementary trees, gluing and analysis.

pub mod analysis;
pub mod catalog;
pub mod fuzz;
pub mod graph;
pub mod group;

pub use catalog::{AttachmentTrace, Catalog, CatalogError, ElementaryTree, Location, TraceKind};
pub use graph::{
    genus, irreducible_components, realize, realize_unchecked, validate_input, CheckedInput, Cusp,
    FiniteEdge, GenusLoop, GraphVertex, InputGraphOfGroups, InputViolation, KatoGraph,
    RealizeError,
};
pub use group::{FieldContext, GroupError, GroupKind, GroupSymbol, PlVariant};
