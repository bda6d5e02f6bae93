//! Minimum-variance symmetrizers of Bernoulli variables.
//!
//! - [`dist`]: finite-support laws on exact rational atoms
//! - [`certificate`]: the dual function `rho` and the bound `pq`
//! - [`lp`]: dense two-phase simplex with Bland's rule
//! - [`symmetrizer`]: the symmetrizer LP, its decoding and a brute-force oracle
//! - [`skorokhod`]: first-exit Skorokhod embeddings and Itô identity checks

pub mod certificate;
pub mod dist;
pub mod error;
pub mod lp;
pub mod rational;
pub mod sampling;
pub mod skorokhod;
pub mod symmetrizer;

pub use certificate::{certificate_bound, rho, rho_pp, verify_certificate, CertificateReport};
pub use dist::{Atom, DiscreteDist};
pub use error::{Error, Result};
pub use lp::{solve_lp, LinearProgram, LpSolution, LpStatus};
pub use rational::Rational;
pub use skorokhod::{
    exit_two_point_exact, sample_exit_pair, simulate_embedding, simulate_ito_identity,
    verify_conditioning, ConditioningReport, EmbeddingReport, ExitPair, ExitPairLaw, ItoReport,
    SimConfig,
};
pub use symmetrizer::{
    brute_force_oracle, build_problem, solve_symmetrizer, SymmetrizerProblem, SymmetrizerSolution,
};
