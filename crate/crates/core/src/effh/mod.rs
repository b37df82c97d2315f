//! Effective-Hamiltonian treatment: polaron dressing of the qubit operators,
//! dressed rates and the closed-form two-level dynamics.

pub mod analytic;
pub mod dawson;
pub mod dressing;
pub mod ratemap;
pub mod rates;

pub use analytic::{analytic_dynamics, AnalyticSolution};
pub use dawson::dawson;
pub use dressing::{kappa_pair, kappa_triple, kappa_triple_quadrature, DressingSet, PairDressing};
pub use ratemap::{rate_map, RateCell, RateMap};
pub use rates::{build_effective_model, effh_rates, EffectiveModel, EffhRates};
