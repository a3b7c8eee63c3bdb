//! Non-crossing combinatorics and exact traces on free families.

mod checks;
mod cumulants;
mod expectation;
mod model;
pub mod partition;
pub mod standard;

pub use checks::{
    check_expmorph, check_expmorph_with, check_psi_probabilistic, compressed_moments, conjugate_variable_check,
    conjugate_variable_check_with, markov_check, psi,
    MarkovReport, PairingReport, PsiReport,
};
pub use cumulants::{cumulants_to_moments, moments_to_cumulants};
pub use expectation::{conditional_expectation, expect_onto, Subalgebra, ZPoly};
pub use model::{FreenessModel, DEFAULT_DEGREE};
pub use partition::{catalan, enumerate_nc, enumerate_nc_capped, NCPartition, DEFAULT_NC_CAP};
