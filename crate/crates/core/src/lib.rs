pub mod arith;
pub mod error;
pub mod field;
pub mod residue;
pub mod square_classes;
pub mod hilbert;
pub mod starlight;
pub mod empirics;
pub mod cache;
