//! Closed-form limits, Chebyshev polynomials and limiting densities.

pub mod chebyshev;
pub mod combinatorics;
pub mod density;
pub mod gamma;
pub mod meijer;
pub mod quadrature;

pub use chebyshev::chebyshev_u;
pub use combinatorics::{
    binomial, catalan, catalan_gamma_identity, combmom_check, multiplicity_nm, sym2_multiplicity, theorem1_limit,
    theorem2_limit, theorem3_limit, theorem4_limit,
};
pub use meijer::{meijer_g_t1, meijer_transform_checks, MeijerG22};
