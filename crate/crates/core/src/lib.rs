//! Boundary calculus of proper CAT(-1) spaces for two concrete families:
//! the hyperbolic spaces `KH^n` over R, C, H (plus metric evaluation on the
//! octonion plane) and regular thick trees. The [`reconstruction`] module
//! rebuilds the space from cross ratios on the boundary and certifies the
//! result against the model metric.

pub mod algebra;
pub mod boundary;
pub mod error;
pub mod hyperbolic;
pub mod reconstruction;
pub mod sample;
pub mod suites;
pub mod tree;

pub use algebra::{hermitian_form, is_associative_triple, Field, FormVector, Scalar};
pub use boundary::{BoundaryModel, ChartElement, Coord, OPlus};
pub use error::{GeometryError, Result};
pub use hyperbolic::{HBoundaryPoint, HPoint, HyperbolicSpace, TangentVector};
pub use reconstruction::{IntersectionSet, TreeCaseLabel};
pub use suites::{SpaceSpec, SuiteName, SuiteReport};
pub use tree::{TreeEnd, TreePoint, TreeSpace, TreeVertex};
