//! Exact computation of resolutions, approximate chain homotopies and
//! derived functors over finitely presented modules and class-two nilpotent
//! Lie algebras.

pub mod backends;
pub mod category;
pub mod chains;
pub mod derived;
pub mod diff;
pub mod error;
pub mod functor;
pub mod homotopy;
pub mod linalg;
pub mod matrix;
pub mod resolution;
pub mod ring;
pub mod simplicial;
pub mod suites;

pub use backends::lie2::{Lie2Backend, Lie2Object};
pub use backends::module::{ModBackend, ModObject};
pub use category::{
    Backend, BackendKind, Category, Coproduct, Cover, Fingerprint, FreenessWitness, Morphism,
    MorphismFlags, Normality, Product, Pullback, Search, ShortExactSequence, Subobject,
};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use ring::{CoefficientDomain, Integers, Rationals, ResidueRing, Ring};
