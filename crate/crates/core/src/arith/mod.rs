//! Exact arithmetic kernels shared by the number-theoretic modules.

pub mod gf2;
pub mod interval;
pub mod lattice;
pub mod matrix;
pub mod modular;
pub mod poly;
