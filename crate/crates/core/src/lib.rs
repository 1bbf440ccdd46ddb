//! Finite presheaf toposes `Sets^C`.

pub mod category;
pub mod error;
pub mod exponential;
pub mod finiteness;
pub mod limits;
pub mod logic;
pub mod machines;
pub mod model;
pub mod nat;
pub mod omega;
pub mod presheaf;
pub mod sample;
pub mod subobject;
pub mod suite;

pub use category::{FinCategory, FinMonoid};
pub use error::{Result, ToposError};
pub use nat::{Filter, NatTrans};
pub use omega::OmegaStructure;
pub use presheaf::Presheaf;
pub use subobject::Subfunctor;
