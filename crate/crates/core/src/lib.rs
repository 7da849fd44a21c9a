//! Computational toolkit for the one-relator groups `Γ_W = ⟨t, a | r⟩` built
//! from a positive word `W`: free-group words and Magnus rewriting, exact
//! `BS(1,m)` arithmetic, a word-problem engine over the amalgam tower,
//! Alexander polynomials with exact positive-root counts, a certificate-emitting
//! prover for non-bi-orderability, and a budgeted generalized-torsion search.

pub mod alexander;
pub mod biorder;
pub mod bsarith;
pub mod gentorsion;
pub mod oracle;
pub mod par;
pub mod sampling;
pub mod tower;
pub mod words;

pub use bsarith::{BsElement, MAdic};
pub use par::Exec;
pub use tower::{Tower, Verdict};
pub use words::{w, Alphabet, Gen, Letter, TowerParams, Word, WordError};
