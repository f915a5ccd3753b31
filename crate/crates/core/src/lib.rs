//! Redirected-walking simulator with heuristic and PPO-trained redirection
//! controllers.

pub mod controllers;
pub mod geometry;
pub mod harness;
pub mod locomotion;
pub mod pathgen;
pub mod policy;
pub mod ppo;

/// Seeded generator used for every stochastic stream in the simulator.
pub type SimRng = rand_chacha::ChaCha8Rng;
