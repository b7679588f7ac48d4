//! Singularity analysis of linear pentapods: the singularity polynomial, its
//! rational parametrization and closest singular configurations.

#![allow(clippy::needless_range_loop)]

pub mod distance;
pub mod error;
pub mod pentapod;
pub mod polyalg;
pub mod ratparam;
pub mod reference;

pub use distance::{Mode, PedalPoint, PedalSet, SolverOptions};
pub use error::{Error, Result};
pub use pentapod::{extract_f, Architecture, Configuration, SingularityModel};
