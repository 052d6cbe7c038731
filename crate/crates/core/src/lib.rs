//! Finite model theory workbench: depth-n theories of structures and
//! two-sorted systems, composition over ordered sums, distorted sums, and a
//! laboratory for random graphs with a linear order.

pub mod compose;
pub mod distorted;
pub mod gen;
pub mod logic;
pub mod rand_lab;
pub mod rng;
pub mod structure;
pub mod system;
pub mod theory;
pub mod verify;

pub use structure::{ordered_sum, Structure, StructureError, Vocabulary};
pub use system::{Dist, DistMatrix, FGrowth, LiftMode, System};
pub use theory::{th, truth_from_theory, Theory, TheoryError};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/structures.md")]
    mod structures {}
    #[doc = include_str!("../../../book/src/logic.md")]
    mod logic {}
    #[doc = include_str!("../../../book/src/theories.md")]
    mod theories {}
    #[doc = include_str!("../../../book/src/composition.md")]
    mod composition {}
    #[doc = include_str!("../../../book/src/systems.md")]
    mod systems {}
    #[doc = include_str!("../../../book/src/random.md")]
    mod random {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}
