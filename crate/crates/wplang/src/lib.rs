//! Exact machinery for word problems of finitely generated groups viewed as
//! formal languages: symmetric alphabets and free reduction, finite automata
//! and rational transducers with word labels, exact group-element oracles,
//! Parikh images with semilinear fitting and growth certificates, Schreier
//! subgroup diagrams, graph classification for right-angled Artin groups, and
//! reproducible slice experiments tying these together.

pub mod automata;
pub mod experiments;
pub mod graphs;
pub mod groupspec;
pub mod oracles;
pub mod parikh;
pub mod schreier;
pub mod words;

pub use words::{MonoidHom, SymmetricAlphabet, Word, WordError};
