//! Prime census: generators, spins and their statistics.

pub mod generator;
pub mod primes;
pub mod sample;
pub mod stats;
pub mod units;
