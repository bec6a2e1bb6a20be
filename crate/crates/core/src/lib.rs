//! Entanglement purification with stabilizer codes.
//!
//! Bell-pair and GHZ-state distillation simulated through a sign-tracking
//! stabilizer formalism, with a normalized min-sum decoder for quantum LDPC
//! codes and Monte Carlo harnesses for failure-rate curves.

pub mod bits;
pub mod pauli;
pub mod tableau;
pub mod codes;
pub mod logical;
pub mod ghz_map;
pub mod clifford;
pub mod channels;
pub mod decoders;
pub mod oracle;
pub mod protocols;
pub mod walkthrough;
pub mod experiments;
