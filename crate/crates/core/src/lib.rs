//! Exact chain-level homological algebra.
//!
//! The crate builds, over `Q` or a prime field, the complexes that relate the
//! Hochschild homology of commutative (and associative) differential graded
//! algebras to the cohomology of free loop spaces:
//!
//! * [`exactlin`]: sparse matrices, exact rank, kernels, homology dimensions;
//! * [`dgmod`]: graded and differential graded modules with structured labels;
//! * [`simplicial`]: simplicial DG modules, total complexes, normalization and
//!   the Eilenberg-Zilber shuffle map;
//! * [`sset`]: finite simplicial sets, products, normalized (co)chains, the
//!   simplicial circle;
//! * [`operads`]: the associative, commutative and Barratt-Eccles operads;
//! * [`oalg`]: free and almost free commutative/associative algebras;
//! * [`hochschild`]: classical and operadic Hochschild complexes and the
//!   comparison maps between them;
//! * [`loopmodel`]: Jones' cosimplicial model of the free loop space and its
//!   cochain totalization;
//! * [`formats`]: text formats for algebras and simplicial complexes;
//! * [`selftest`]: the invariant suite exposed by the command line tool.

pub mod dgmod;
pub mod error;
pub mod exactlin;
pub mod formats;
pub mod hochschild;
pub mod loopmodel;
pub mod oalg;
pub mod operads;
pub mod selftest;
pub mod simplicial;
pub mod sset;

pub use error::{Error, Result};
pub use exactlin::{Field, Rational, SparseMatrix};
