//! Film surfaces and cyclic foams.

mod cut;
mod film;
mod foam;

pub use cut::{apply_cut, CutResult, CutSpec, InsertionDescriptor, InsertionKind, PatchPart};
pub use film::{
    bipartitions, compose, compose_exhaustive, graph_cut, graph_cut_named, try_compose,
    validate_cyclic, vertex_graph, ComponentKey, CyclicReport, Disk, FilmKey, FilmSurface,
    GraphCut, Split,
};
pub use foam::{underlying_film, CyclicFoam, FoamComponent, GluedCircle, Mark, Patch, Sign};
