//! Finite-dimensional JB*-triple calculus on Cartan factors of types 1-4:
//! triple products, Peirce decompositions, atomic and spectral decompositions,
//! the minimax and Ky Fan principles, perturbation bounds and a constructive
//! convex splitter, together with randomized checkers for each inequality.

pub mod checks;
pub mod co;
pub mod error;
pub mod factor;
pub mod gram_schmidt;
pub mod lab;
pub mod linalg;
pub mod peirce;
pub mod random;
pub mod realmap;
pub mod spectral;
pub mod tol;

pub use checks::CheckResult;
pub use error::{Error, Result};
pub use factor::{Element, FactorDescriptor};
pub use peirce::{PeirceSystem, Tripotent};
pub use realmap::RealLinearMap;
pub use spectral::{AtomicDecomposition, Frame, SpectralDecomposition};
