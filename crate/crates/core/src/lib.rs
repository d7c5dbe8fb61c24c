//! Finite point-line incidence structures and binomial configurations.
//!
//! The crate builds the standard families of binomial configurations
//! (combinatorial Grassmannians, Veronesians and their duals), finds their
//! hyperplanes, splits a configuration at a hyperplane into a reduct and a
//! restriction, and glues such pairs back together along a map from the lines
//! of the first part to the points of the second. Isomorphism testing and
//! canonical forms back the classification of gluings, and [`triangle`]
//! arranges whole families into Pascal-style triangles where every interior
//! entry is the gluing of its two neighbours.

mod bitmatrix;

pub mod binomial;
pub mod families;
pub mod format;
pub mod glue;
pub mod hyperplane;
pub mod iso;
pub mod multiset;
pub mod structure;
pub mod triangle;

pub use families::FamilySpec;
pub use glue::{Decomposition, GluingMap};
pub use hyperplane::HyperplaneView;
pub use iso::CanonicalForm;
pub use multiset::{KSubset, Multiset};
pub use structure::{
    BinomialSignature, ConfigurationType, IncidenceStructure, Line, Point, StructureError,
};
pub use triangle::ConfigTriangle;
