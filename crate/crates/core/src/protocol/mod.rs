//! Two-party protocols as alternating unitaries.
//!
//! Every subsystem label belongs to Alice (`A`, `A.*`), Bob (`B`, `B.*`) or
//! the channel (`C`, `C.*`). A round applies one unitary to the acting
//! party's subsystems followed by the channel subsystems, each group in
//! layout order. Randomness lives in dice subsystems, so honest runs stay pure.

mod builtins;
mod document;
mod exec;
mod model;
pub mod ops;

pub use builtins::{bb84_commit, builtin, builtin_names, coin_from_commit, direct_send, orthogonal_toy, theta_commit};
pub use document::{load_protocol, serialize_protocol, to_json_string};
pub use exec::{
    apply_rounds, claim_switch, commitment_states, final_state, honest_final, run_honest, run_with_claim,
    verify_opening, ExecutionTrace, Snapshot,
};
pub use model::{
    channel_labels, owner_of, party_labels, round_scope, CoinTossProtocol, CommitmentProtocol, Owner, Party,
    Protocol, Round,
};
