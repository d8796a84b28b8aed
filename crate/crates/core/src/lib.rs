//! Exact weak-mixing classification of rational billiards and translation
//! surfaces, with numerical flow diagnostics.

pub mod error;
pub mod field;
pub mod geom;
pub mod linalg;
pub mod polygon;
pub mod surface;
pub mod unfold;
pub mod homology;
pub mod classify;
pub mod flow;
pub mod diagnostics;
pub mod io;
pub mod corpus;

pub use classify::{classify_polygon, classify_polygon_with, classify_surface, ClassifyOptions, Reason, Verdict};
pub use error::{Error, Result};
pub use field::{FieldElement, NumberField};
pub use geom::PlanarVector;
pub use homology::{homology_basis, period_matrix, HomologyBasis, PeriodMatrix};
pub use polygon::{RationalAngle, RationalPolygon};
pub use surface::{Edge, TranslationSurface};
pub use unfold::unfold;
