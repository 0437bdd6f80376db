//! Exact weighted MAX-2-SAT / Ising minimization.
//!
//! Instances are integer Ising Hamiltonians `c0 + sum h_i S_i + sum J_ij S_i
//! S_j` over spins `S_i = +-1`, scaled so that a reduced weighted 2-CNF has
//! energy equal to four times its violated weight. The crate provides the
//! reduction from DIMACS WCNF, instance families with many local minima,
//! exhaustive landscape analysis, the construction of variable sets with weak
//! internal coupling, an exact solver that fixes variables by their
//! effective fields, and exact anti-concentration probes for weighted sign
//! sums.

pub mod error;
pub mod generators;
pub mod ising;
pub mod landscape;
pub mod probe;
pub mod reduce;
pub mod rng;
pub mod scan;
pub mod solver;
pub mod tset;

pub use error::{Error, Result};
pub use generators::{
    gen_column, gen_csse, gen_multicopy, gen_random, gen_random_regular, zero_energy_assignments, ColumnInstance,
    ColumnTargets, RandomSpec,
};
pub use ising::{Assignment, DegreeGraph, InstanceJson, IsingBuilder, IsingInstance};
pub use landscape::{
    count_k_minima, enumerate_k_minima, is_k_minimum, k_basins, min_pairwise_hamming, LandscapeReport, VertexRule,
};
pub use probe::{
    exact_interval_prob, lemma_scaling_report, max_interval_prob, mc_interval_prob, McEstimate, ScalingRow, WeightGen,
    WeightedSum,
};
pub use reduce::{ising_to_maxsat_value, parse_wcnf, parse_wcnf_str, wcnf_to_ising, Clause, Wcnf};
pub use solver::{
    compute_z, effective_view, solve_auto, solve_avg_degree, solve_brute, solve_coloring_baseline, solve_combined,
    solve_effective, Counters, EffectiveView, Method, SolveOptions, SolveResult,
};
pub use tset::{
    check_t, find_t1t2, find_t_constrained, find_t_deterministic, find_t_randomized, good_set_nonsparse,
    verify_certificate, SplitConstraint, SplitSets, TParams, TSetCertificate,
};
