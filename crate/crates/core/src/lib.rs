//! Representations of classical matrix groups over `Z/p^r` attached to
//! regular adjoint orbits, with exact arithmetic and a brute-force character
//! oracle.

pub mod error;
pub mod groupscheme;
pub mod linalg;
pub mod localring;
pub mod orbitchar;
pub mod paramrep;
pub mod schurcocycle;
pub mod settings;
pub mod weilrep;

pub use error::{Error, Result};
pub use groupscheme::{Family, GroupSpec, Mat, MatAlgebra};
pub use localring::{Elem, LocalRing, QZPhase};
pub use settings::Settings;
