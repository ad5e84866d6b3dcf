//! Simulator and analysis library for the two-state swarm contamination game.
//!
//! Agents move in the plane and flip state by local majority over what they can
//! see. The crate covers the visibility model, same-state components and their
//! resilience value (weak-point conquest), dense-circle capacity bounds, the
//! message-passing formation strategies, and a seeded batch harness.

pub mod error;
pub mod geometry;
pub mod graph;
mod spatial;
pub mod wpc;
pub mod bounds;
pub mod sim;
pub mod strategies;
pub mod harness;

pub use error::{Error, Result};
pub use geometry::{Vec2, WorldConfig};
pub use graph::{AgentId, AgentSnapshot, ComponentView, HealthState, ObservationGraph};
