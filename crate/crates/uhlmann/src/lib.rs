//! Uhlmann parallel transport and anholonomy for the ball class of
//! `N`-qubit density matrices `ρ = (I + u·Γ)/2^N`.
//!
//! Every closed-form expression is paired with a brute-force matrix oracle
//! built on [`matcore`].

pub mod clifford;
pub mod error;
pub mod gates;
pub mod geometry;
pub mod holonomy;
pub mod interference;
pub mod matcore;
pub mod output;
pub mod tfd;
pub mod validate;

pub use error::{Result, UhlError};
