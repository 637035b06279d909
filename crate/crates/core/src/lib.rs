//! Computational machinery for probabilistic metric spaces: distribution
//! functions under the modified Lévy metric, triangle functions, finite PM
//! spaces, the probabilistic Pompeiu-Hausdorff metric and Šerstnev random
//! normed spaces.

pub mod distfn;
pub mod error;
pub mod hausdorff;
pub mod io;
pub mod pmspace;
pub mod random;
pub mod report;
pub mod rnspace;
pub mod triangle;

pub use distfn::{inf_family, left_regularize, leq, levy_distance, sup_family, weak_converges, DistributionFn, RawStep};
pub use error::{Axiom, Error, Result};
pub use hausdorff::{excess, hausdorff_distance, PointSet};
pub use pmspace::{BuildOptions, PMSpace};
pub use report::{Check, CheckReport};
pub use rnspace::RNSpace;
pub use triangle::{TriangleFn, TriangleOp};
