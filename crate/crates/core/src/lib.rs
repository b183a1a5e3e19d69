//! Hyperspace dynamics on stars and intervals: exact Hausdorff geometry,
//! induced maps, symbolic coding of wandering orbits, complexity counts,
//! and separated-set entropy estimates.

pub mod entropy;
pub mod error;
pub mod families;
pub mod growth;
pub mod hyperspace;
pub mod maps;
pub mod spaces;
pub mod symbolic;

pub use error::{Error, Result};
pub use growth::{GrowthFit, GrowthMode, GrowthRow};
pub use hyperspace::{ArcUnion, C2Class, FinitePointSet, HyperElement, Subcontinuum};
pub use maps::{EdgeMap, EdgeMapSpec, OrbitLattice, StarHomeo};
pub use spaces::{StarPoint, StarSpace};
pub use symbolic::{SymbolWindow, SymbolicFamily, WordSet};
pub use entropy::{DynSystem, EntropyEstimate, HyperSystem, PointSystem, PowerSystem, ProductSystem};
pub use families::{LatticePiece, LatticeSet, LatticeSystem};
