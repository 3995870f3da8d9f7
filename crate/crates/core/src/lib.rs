pub mod error;
pub mod heckeops;
pub mod qexpansion;
pub mod quadmodule;
pub mod report;
pub mod repnums;
pub mod scalars;
mod snf;
pub mod weilaction;

pub use error::{Error, Result};
pub use quadmodule::{EvenLattice, FqModule, ModuleElement};
pub use scalars::{Cyclotomic, CycloContext, Fraction, PhaseSum};
pub use heckeops::{Convention, HeckeConfig, PairData, Projection, UpSelector};
pub use qexpansion::VVExpansion;
pub use report::{CaseReport, Status, VerificationReport};
