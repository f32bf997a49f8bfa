//! Exact computations on multilinear forms and tensors over F2.
//!
//! The crate covers bit-packed linear algebra ([`f2linalg`]), arithmetic in
//! GF(2^k) ([`gf2k`]), dense tensors and their rank-one decompositions
//! ([`tensors`]), exact and sampled bias and correlation ([`bias`]), rank
//! computations and lower bounds ([`rank`]), floating-point checks
//! ([`numerics`]) and a suite of named verification experiments
//! ([`harness`]).

pub mod bias;
pub mod dyadic;
pub mod error;
pub mod f2linalg;
pub mod gf2k;
pub mod harness;
pub mod io;
pub mod numerics;
pub mod poly;
pub mod rank;
pub mod report;
pub mod tensors;

pub use dyadic::DyadicRational;
pub use error::{Error, Result};
pub use f2linalg::{BitMatrix, BitVec, Subspace};
pub use gf2k::{FieldElement, Gf2kField};
pub use poly::Polynomial;
pub use tensors::{DenseTensor, RankDecomposition, RankOneTerm};
