//! Classification of elementary abelian p-subgroups of tori in simple
//! algebraic groups, with centralizer data and finite-group transfer.

pub mod arith;
pub mod atlasdata;
pub mod canon;
pub mod cyclotomic;
pub mod error;
pub mod fintransfer;
pub mod fp;
pub mod group;
pub mod lattice;
pub mod mat;
pub mod rootdata;
mod serde_str;
pub mod toralclass;
pub mod weylact;

pub use error::{AtlasError, Result};
pub use fp::SubspaceRep;
pub use rootdata::{build_root_datum, torsion_primes, weight_system, Family, IsogenyKind, LieType, ModuleName, RootDatum, WeightSystem};
pub use toralclass::{classify_toral, classify_toral_with, Classification, ToralClass, ToralOptions};
