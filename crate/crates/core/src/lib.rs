//! Constructive generator and independent verifier for decompositions of the
//! complete symmetric digraph `K*_v` into oriented heptagons.

pub mod assembly;
pub mod base;
pub mod catalog;
pub mod cert;
pub mod cli;
pub mod design;
mod dlx;
pub mod error;
pub mod hosts;
pub mod ingredients;
pub mod search;
pub mod verifier;

pub use error::{Error, Result};
