//! SDP-computable bounds on distillable entanglement.
//!
//! [`matrix`] holds the Hermitian and bipartite-state types, [`sdp`] a
//! self-contained primal-dual interior-point solver, [`measures`] the
//! entanglement quantities built on it and [`states`] the named families,
//! random corpora and local channels used to exercise them.

pub mod cli;
pub mod error;
pub mod matrix;
pub mod measures;
pub mod sdp;
pub mod states;
pub mod verify;
