//! Integer relation detection over `Z`, `Z[i]` and imaginary quadratic rings of integers.
//!
//! [`pslq::solve`] runs PSLQ with a pluggable nearest-integer map, which makes it classic
//! PSLQ over `Z` or `Z[i]` and APSLQ over `Z[ω]`. [`reduction::reduction_solve`] instead
//! doubles the input and reassembles a relation found over `Z` or `Z[i]`.

pub mod error;
pub mod harness;
pub mod numerics;
pub mod pslq;
pub mod quadring;
pub mod reduction;
pub mod testgen;

pub use error::{Error, Result};
pub use harness::{
    classify, classify_mixed, format_relation, parse_relation, postprocess_reduction, run_experiment, Classification,
    ExperimentReport, GammaChoice, Method, MethodConfig, RunRecord, Tally, Verdict,
};
pub use numerics::{eval_constant, nearly_zero, BigComplex, BigReal, ConstantSpec, PrecisionContext};
pub use pslq::{
    build_h_matrix, corner_matrix, reducing_matrix, relation_norm_bound, solve, HMatrix, Matrix, SolverConfig,
    SolverOutcome, SolverState, SolverStatus, ThresholdMode,
};
pub use quadring::{
    embed, is_member_of_ring, lattice_params, make_ring, nearest_quadratic_integer, nearest_rational_integer,
    omega_value, AlgebraicInt, GaussianInt, LatticeParams, MixedInt, QuadraticRing, RingContext,
};
pub use reduction::{expand_vector, reconstruct, reduction_solve, ReductionOutcome, ReductionStatus};
pub use testgen::{
    complex_constant_pool, generate_instance, generate_test_set, real_constant_pool, CoeffSize, ConstantPool,
    ProblemInstance, TestSet, TestSetSpec,
};
