//! Backhaul resource allocation for small cell networks whose fiber-connected
//! anchor stations lease mmWave and sub-6 GHz resource blocks to stations
//! without fiber, using a one-to-many matching game with budget-limited,
//! demand-driven quotas.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix it to one precision. Prices and budgets are exact fixed-point
//! [`Money`].
//!
//! ```
//! use backhaul::{generate_scenario, realize_channels, run_matching, find_blocking_pairs};
//! use backhaul::{GenerationParams, Scenario};
//! use rand::SeedableRng;
//!
//! let s: Scenario = generate_scenario(&GenerationParams::default(), 42).unwrap();
//! let ch = realize_channels(&s, &mut rand_chacha::ChaCha8Rng::seed_from_u64(42));
//! let m = run_matching(&s, &ch, 1e6);
//! assert!(find_blocking_pairs(&m, &s, &ch, 1e6).unwrap().is_empty());
//! ```

pub mod baselines;
pub mod error;
pub mod experiments;
pub mod matching;
pub mod money;
pub mod num;
pub mod oracle;
pub mod propagation;
pub mod scenario;

pub use baselines::{best_effort_allocate, random_allocate};
pub use error::{Error, Result};
pub use matching::{find_blocking_pairs, run_matching, BlockingPair, Brb, BrbId, Market};
pub use money::Money;
pub use num::Real;
pub use oracle::{brute_force_min_cost, check_constraints, ConstraintReport};
pub use propagation::{realize_channels, LinkTable};
pub use scenario::{generate_scenario, validate_scenario, BandKind, GenerationParams, Role};

/// Double precision instance.
pub type Scenario = scenario::Scenario<f64>;
pub type ChannelRealization = propagation::ChannelRealization<f64>;
pub type Matching = matching::Matching<f64>;
pub type OracleSolution = oracle::OracleSolution<f64>;

/// Single precision instance.
pub type Scenario32 = scenario::Scenario<f32>;
pub type ChannelRealization32 = propagation::ChannelRealization<f32>;
pub type Matching32 = matching::Matching<f32>;
pub type Market32 = matching::Market<f32>;
