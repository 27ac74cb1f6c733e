//! Exact computations with finite differential graded algebras: cohomology,
//! reduced bar and cobar constructions, Hochschild complexes, and Kraines
//! sequences with integral lifts.

pub mod bar;
pub mod coalgebra;
pub mod cobar;
pub mod complex;
pub mod dga;
pub mod error;
pub mod hochschild;
pub mod io;
pub mod kraines;
pub mod linalg;
pub mod lin;
pub mod presets;
pub mod random;
pub mod reduction;
pub mod ring;
pub mod simplicial;
pub mod uct;

pub use complex::{BettiTable, CochainComplex, Direction};
pub use dga::{BasisElement, DGAlgebra, InvariantCheck, InvariantReport};
pub use error::{Error, Result};
pub use lin::{Lin, Vector};
pub use linalg::{SmithForm, SparseMatrix, SubquotientBasis};
pub use ring::RingTag;
