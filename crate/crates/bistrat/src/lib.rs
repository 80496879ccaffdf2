//! Canonical stratification of simplicial complexes along bisheaves.
//!
//! A bisheaf assigns a stalk, a costalk and a vertical map between them to
//! every simplex of a finite complex, plus restriction and extension maps
//! along face relations, all valued in vector spaces over a prime field
//! GF(p). This crate computes the coarsest stratification of the complex on
//! which the bisheaf is locally constant, verifies candidate stratifications
//! against the defining axioms, transports stalk data along zigzag
//! witnesses, and certifies minimality by brute-force enumeration on small
//! inputs.
//!
//! The hot loops (invertibility checks over all face relations, candidate
//! filtering in the enumeration oracle) run data-parallel under the default
//! `parallel` feature; disabling default features yields a rayon-free
//! sequential build with identical output.

pub mod bisheaf;
pub mod complex;
pub mod corpus;
pub mod field;
pub mod io;
pub mod localize;
pub mod oracle;
pub mod stratify;
#[cfg(test)]
pub(crate) mod testutil;
mod union_find;

pub use bisheaf::{Bisheaf, BisheafError, Violation};
pub use complex::{Complex, ComplexError, Simplex, SubcomplexMask};
pub use field::{FieldMatrix, LinAlgError};
pub use localize::{find_zigzag, monodromy, transport, Transport, ZigzagWitness};
pub use oracle::{certify_canonical, enumerate_stratifications, OracleReport};
pub use stratify::{
    canonical_stratification, canonical_sweep, invertible_relations, refines,
    skeletal_stratification, verify_stratification, AxiomViolation, RelationRole, RelationSet,
    Stratification, StratifyError, Stratum, Sweep,
};
