//! Exact solving, extremal constructions, and verification checks for
//! Cops and Robbers on directed graphs with protected edges and
//! must-move semantics.

pub mod constructions;
pub mod game;
pub mod graph;
pub mod solver;
pub mod verify;
