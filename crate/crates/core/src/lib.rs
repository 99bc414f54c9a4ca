//! Graph-colouring encodings, the FPHP to k-colouring reduction, and three
//! proof systems (Nullstellensatz, polynomial calculus, cutting planes) with
//! searchers, checkers and brute-force oracles.

pub mod algebra;
pub mod cutplanes;
pub mod encodings;
pub mod expander;
pub mod experiment;
pub mod io;
pub mod nullsatz;
pub mod oracle;
pub mod pcsearch;
pub mod reduction;
