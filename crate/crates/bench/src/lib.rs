//! Fixed inputs shared by the benchmarks.

use apslq::{
    generate_test_set, CoeffSize, ConstantPool, GammaChoice, Method, MethodConfig, ProblemInstance, QuadraticRing,
    SolverConfig, TestSetSpec,
};

pub const SEED: u64 = 20;

/// First instance of a seeded set whose planted relation has `k` constants.
pub fn instance(d: i64, pool: ConstantPool, size: CoeffSize, k: usize) -> ProblemInstance {
    let ring = QuadraticRing::from_id(d).expect("valid ring");
    let spec = TestSetSpec::new(ring, pool, size, 64, SEED).expect("valid spec");
    let set = generate_test_set(&spec).expect("generates");
    set.instances.into_iter().find(|i| i.k == k).expect("some instance has the requested k")
}

/// Solver settings the harness would use for `method` at the default `γ`.
pub fn config(method: Method, instance: &ProblemInstance, digits: u32) -> SolverConfig {
    let ctx = apslq::PrecisionContext::new(digits).expect("valid precision");
    let m = MethodConfig::new(method, GammaChoice::Default);
    m.solver_config(m.solving_ring(instance.ring(), &instance.x), &ctx).expect("resolvable gamma")
}
