//! The measurement-protocol engine: joint outcome distributions, the
//! invasiveness distance, DNI scheme construction, correlators, LGI
//! evaluation, and the Markovianity/superclassicality checkers.

mod checks;
mod dist;
mod joint;
mod scheme;

pub use checks::{
    default_env_states, default_test_states, discord_condition_norm, lgi_decay, lgi_from_engine,
    markov_factorization_distance, markov_factorization_for, markov_propagator_condition,
    superclassicality_deviation, FactorizationReport, SuperclassicalityReport,
};
pub use dist::{
    correlators, extract_d_ttau, invasiveness, lgi_value, marginal_zx, CorrelatorSet, JointDist2,
    JointDist3, LgiResult, TimePair,
};
pub use joint::{p1, p2, p3};
pub use scheme::{dni_intermediate, dni_scheme, DniChoice, IntermediateSpec, Scheme};
