//! Real-analytic machinery: the eta function on the imaginary axis, the
//! saddle point for t-core asymptotics, and the closed-form lower bounds.
//!
//! Every magnitude that can overflow a double is carried as a [`LogReal`].

pub mod bounds;
pub mod eta;
pub mod logreal;
pub mod saddle;

pub use bounds::{
    erdos_lehner_pt, proof_constants, prop32_bound, rademacher_p, theorem12_bound,
    theorem13_bound, BoundContext, BoundReport, ErdosLehner, PSource, ProofConstants, Regime,
};
pub use eta::{eta, mu_k, EtaRegime, EtaValue};
pub use logreal::LogReal;
pub use saddle::{solve_saddle, tyler_ct, SaddleSolution, TyRegime};

/// `C = 2 pi / sqrt 6`, the exponent constant of the partition function.
pub const PARTITION_EXPONENT: f64 = 2.565_099_660_323_728;
