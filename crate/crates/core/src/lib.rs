//! Two-dimensional variation, PIC decompositions and their norms.
//!
//! Core library: exact-leaning geometry primitives, plane functions,
//! variation factors and variation brackets, sampled convex curves,
//! polygonal mosaics and PIC sets, their graph view and homeomorphisms,
//! the PIC norm with BV equivalence constants, and constructive
//! function builders.

pub mod error;
pub mod geom;
pub mod func;
pub mod variation;
pub mod curve;
pub mod mosaic;
pub mod picgraph;
pub mod picnorm;
pub mod acfun;
pub mod specfile;

pub use error::{Error, Result};
pub use func::{PlaneFunction, Poly2, SampleTable};
pub use geom::{Affine, ConvexPolygon, Line, Point};
pub use variation::{NormBracket, PointList, SearchBudget};
pub use curve::{Curve, CurveKind};
pub use mosaic::{Mosaic, PicSet, ValidationReport};
pub use picgraph::{GraphMatching, HomeoMap, MatchedPair, PicGraph};
pub use picnorm::EquivalenceConstants;
pub use specfile::{LoadedSpec, SpecFile};
