//! Exact rational linear algebra and linear programming.

pub mod lp;
mod matrix;
mod rational;

pub use lp::{lp_optimize, LpOutcome, Sense};
pub use matrix::{
    is_independent, rank, rank_of, solve_affine, solve_unique, solve_unique_many, AffineSolution, RatMatrix,
};
pub use rational::{dot, rat, ParseRationalError, Rational};
