//! Exact finite Markov kernels and the ergodic theory of finite dynamical
//! systems.
//!
//! Spaces are finite sets with a σ-algebra given by its atoms, kernels are
//! stochastic matrices over exact rationals, and the copy/delete structure
//! makes them a Markov category. On top of that sit Bayesian inversion,
//! decompositions of states, invariant σ-algebras of systems driven by
//! arbitrary generators, and the decomposition of invariant states into
//! ergodic ones.
//!
//! ```
//! use std::sync::Arc;
//! use finstoch::{ergodic_decomposition, rational::ratio, DynSystem, FinSpace, Kernel};
//!
//! // a ↔ b swap, c fixed, d falls into c.
//! let x = Arc::new(FinSpace::discrete(["a", "b", "c", "d"]));
//! let sys = DynSystem::from_functions(x.clone(), vec![("t".into(), vec![1, 0, 2, 2])]).unwrap();
//! let p = Kernel::state(x, vec![ratio(1, 4), ratio(1, 4), ratio(1, 2), ratio(0, 1)]).unwrap();
//! let d = ergodic_decomposition(&p, &sys).unwrap();
//! assert_eq!(d.q().probs(), &[ratio(1, 2), ratio(1, 2)]);
//! ```

pub mod cli;
pub mod disintegration;
pub mod dot;
pub mod dynamics;
mod error;
pub mod io;
pub mod kernel;
pub mod laws;
pub mod random;
pub mod rational;
pub mod space;

pub use disintegration::{
    bayes_invert, find_nontrivial_decomposition, inversion_section_check, is_trivial_decomposition,
    positivity_instance, verify_disintegration, Decomposition,
};
pub use dynamics::{
    enumerate_ergodic, ergodic_decomposition, factor_through_quotient, invariant_sigma, is_as_ergodic, is_ergodic,
    is_invariant_set, is_left_invariant, is_right_invariant, zigzag_quotient, zigzag_relation, DynSystem,
    InvariantSigma, ZigZagQuotient,
};
pub use error::{Error, Result};
pub use kernel::{
    as_equal, compose, is_deterministic, is_independent, kernel_from_function, marginal, tensor, Kernel, Side,
    Structural,
};
pub use rational::Rational;
pub use space::{indistinguishability_quotient, product, FinSpace, PointRelation};
