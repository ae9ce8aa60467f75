//! Exact computations with Stokes data of irregular meromorphic connections
//! on curves: algebraic number fields with a chosen complex embedding,
//! Puiseux exponents, sector dominance, masked Hom spaces, glued Stokes data,
//! Galois descent and real forms, and a sampling oracle for enhanced sheaves.

pub mod descent;
pub mod error;
pub mod homspaces;
pub mod json;
pub mod linalg;
pub mod numfield;
pub mod oracle;
pub mod puiseux;
pub mod random;
pub mod sectors;
pub mod stokesdata;

pub use error::{Error, Result};

pub use numfield::{ArithOp, FieldElement, FieldSpec, GaloisAction, Sign};
pub use linalg::Matrix;
pub use puiseux::PuiseuxExponent;
pub use sectors::{Comparison, Direction, Sector, StokesDirection};
pub use homspaces::{ExponentialSum, HomMask, MaskedMatrix};
pub use stokesdata::{DataIsomorphism, StokesData, ValidationReport};
pub use descent::GStructure;
