//! Characters, branching links, coherent measures and Markov dynamics for
//! q-deformed classical groups of types B, C and D.

pub mod branching;
pub mod characters;
pub mod coherent;
pub mod error;
pub mod laurent;
pub mod markov;
pub mod numeric;
pub mod param;

pub use error::{Error, Result};
pub use laurent::{Coeff, DominanceCone, ExponentVec, LaurentPoly};
pub use param::{BaseParam, Rational};
pub use characters::{Signature, TypeLabel};
