//! Algebraic number fields with a fixed complex embedding.

mod element;
mod field;
mod galois;
pub mod interval;
pub mod poly;
pub mod roots;

pub use element::{arith, ArithOp, FieldElement, Sign};
pub use field::{q_frac, q_int, FieldSpec, Q};
pub use galois::{automorphisms, conjugation, root_of_unity, GaloisAction};
mod embedding;
pub use embedding::FieldEmbedding;
