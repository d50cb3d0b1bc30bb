//! Finite models of non-Boolean probability: event spaces with orthogonal
//! sums, σ-additive states with unique conditional probabilities, bounded
//! real observables, and the Jordan product built from conditional
//! expectations, together with a seeded property verifier.

pub mod error;
pub mod jordan;
pub mod linalg;
pub mod models;
pub mod observables;
pub mod serial;
pub mod states;
pub mod verifier;

pub use error::{Error, Result};
pub use models::{Event, Model, ModelKind};
pub use observables::{BorelSet, PrimitiveObservable};
pub use states::State;
