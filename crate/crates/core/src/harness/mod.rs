//! Seeded generation, randomized verification runs, numeric dimension
//! checks and constrained refinement.

mod dimension;
mod experiment;
mod random;
mod refine;

pub use dimension::*;
pub use experiment::*;
pub use random::*;
pub use refine::*;
