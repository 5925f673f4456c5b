//! Simulator and cryptanalysis toolkit for two-party quantum protocols.
//!
//! Protocols are modeled as two machines exchanging a channel register, each
//! round a unitary on the sender's subsystems and the channel. Randomness is
//! carried by dice subsystems, so honest runs stay globally pure. On top of
//! the simulator the crate constructs EPR-type cheating unitaries against bit
//! commitment, runs the last-round truncation argument against ideal coin
//! tossing, and checks the round bound for two-party computation.
//!
//! Module map:
//!
//! * [`numerics`]: eigen/SVD/square root/polar kernels with a deterministic output convention
//! * [`hilbert`]: labeled product spaces, partial traces, Schmidt forms, entropy
//! * [`fidelity`]: closed-form, purification and POVM fidelities, trace distance
//! * [`protocol`]: protocol model, honest execution, builtins, document format
//! * [`attack`]: cheating unitaries and end-to-end attack simulation
//! * [`cointoss`]: ideal-toss checks, conditioning, truncation, backward induction
//! * [`bounds`]: the round bound `N·ε ≥ 1` and its information ledger
//! * [`report`]: report assembly behind the `eprb` binary

pub mod attack;
pub mod bounds;
pub mod cointoss;
mod error;
pub mod fidelity;
pub mod hilbert;
pub mod numerics;
pub mod protocol;
pub mod random;
pub mod report;
pub mod tolerance;

pub use error::{Error, Result};
