//! Depth-n theories: computation, canonical interning, truth extraction,
//! reductions, characteristic formulas and depth-0 enumeration.

pub mod enumerate;
pub mod hintikka;
pub mod intern;
pub mod reduce;
pub mod schema;
pub mod th;
pub mod truth;

pub use enumerate::enumerate_th0;
pub use hintikka::characteristic_formula;
pub use intern::Theory;
pub use reduce::{reduce_depth, reduce_theory};
pub use schema::{SigId, Signature};
pub use th::{sentence_theory, th, Realizer, TheoryError};
pub use truth::truth_from_theory;
