//! Exact enumeration and certification of symmetric equilibria in
//! heterogeneous 2x2 coordination and anti-coordination games, where players
//! observe the type of their opponent but not their own.
//!
//! ```
//! use hetgame_core::{enumerate_all, rational::from_int, GameSpec};
//!
//! let spec = GameSpec::from_counts(&[4, 4, 2], from_int(1), from_int(1)).unwrap();
//! let equilibria = enumerate_all(&spec);
//! assert_eq!(equilibria.len(), 13);
//! assert!(equilibria.iter().all(|e| e.level <= 3));
//! ```

pub mod equilibria;
pub mod model;
pub mod oracle;
pub mod partitions;
pub mod payoff;
pub mod rational;
pub mod report;
pub mod sampling;
pub mod sim;
pub mod sweep;

pub use equilibria::{
    check_equilibrium_conditions, enumerate_all, nondiscriminating_equilibria,
    three_partition_equilibrium, two_partition_equilibrium,
};
pub use model::{
    discrimination_level, validate_spec, EquilibriumRecord, GameClass, GameSpec, OrderedPartition,
    Provenance, StrategyProfile,
};
pub use rational::Rational;
