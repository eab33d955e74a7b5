//! Per-prime spin computation and the prime census.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generator::ideal_generator;
use super::primes::{frobenius_degree, primes_above, PrimeDescriptor};
use super::units::{default_unit_radius, make_totally_positive, unit_basis, UnitBasis};
use crate::arith::modular::{legendre, primes_in_range};
use crate::error::{Error, Result};
use crate::field::{CyclicField, FieldElement, Precision};
use crate::hilbert::{published_gram, symbol, GramMatrix};
use crate::residue::Ring8;
use crate::square_classes::{class_of, SquareClassM4};
use crate::starlight::star_of_class;

/// Shared, read-only data for processing primes of one field.
pub struct SampleContext {
    pub field: CyclicField,
    pub ring: Ring8,
    pub gram: GramMatrix,
    pub units: UnitBasis,
    pub precision: Precision,
}

impl SampleContext {
    pub fn new(field: CyclicField) -> Result<Self> {
        let ring = Ring8::from_field(&field)?;
        let gram = published_gram(&ring)?;
        Self::with_gram(field, ring, gram)
    }

    pub fn with_gram(field: CyclicField, ring: Ring8, gram: GramMatrix) -> Result<Self> {
        let precision = Precision::from_env();
        let units = unit_basis(&field, &default_unit_radius(&field), precision)?;
        Ok(SampleContext {
            field,
            ring,
            gram,
            units,
            precision,
        })
    }

    pub fn degree(&self) -> usize {
        self.field.degree()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeRecord {
    pub p: u64,
    /// Inertia degree, 1 or `n`.
    pub f: u64,
    pub class: SquareClassM4,
    pub star: i8,
    /// `spin(sigma^j)` for `j = 1..n-1`; empty for inert primes.
    pub spins: Vec<i8>,
    /// Totally positive generator of `P^h` (split) or `p^h` (inert).
    pub generator: FieldElement,
    /// Root of the period polynomial naming the prime above `p`.
    pub root: Option<u64>,
}

impl PrimeRecord {
    pub fn all_spins_positive(&self) -> bool {
        self.spins.iter().all(|&s| s == 1)
    }

    /// One CSV line: `p,f,class_bits,star,spins,generator`, with spins and
    /// generator coordinates joined by semicolons.
    pub fn csv_line(&self, n: usize) -> String {
        let join = |xs: Vec<String>| xs.join(";");
        format!(
            "{},{},{},{},{},{}",
            self.p,
            self.f,
            self.class.to_bit_string(n),
            self.star,
            join(self.spins.iter().map(ToString::to_string).collect()),
            join(self.generator.coeffs().iter().map(ToString::to_string).collect()),
        )
    }
}

pub const CSV_HEADER: &str = "p,f,class_bits,star,spins,generator";

/// `spin(sigma^j)`: the Legendre symbol of `alpha` modulo `sigma^j` of the
/// prime named by `d`.
pub fn spin(d: &PrimeDescriptor, alpha: &FieldElement, j: usize) -> Result<i8> {
    let r = d.reduce_conjugate(alpha, j);
    if r == 0 {
        return Err(Error::NonUnitResidue { p: d.p, j });
    }
    Ok(legendre(r, d.p))
}

/// Spins, class and star of one prime, with the spin/symbol identity
/// checked for every `j`.
pub fn process_prime(ctx: &SampleContext, p: u64, h: u32) -> Result<PrimeRecord> {
    let f = &ctx.field;
    let r = &ctx.ring;
    let n = f.degree();
    let deg = frobenius_degree(&f.params(), p)?;
    if deg != 1 {
        let ph = num_traits::pow(BigInt::from(p), h as usize);
        let m8 = (&ph % 8u32).to_string().parse::<i64>().expect("small residue");
        let class = class_of(r, &r.from_int(m8))?;
        let star = star_of_class(r, class, &ctx.gram);
        let expected = if m8 % 4 == 1 { 1 } else { -1 };
        if star != expected {
            return Err(Error::Consistency(format!(
                "inert prime {p} has star {star}, expected {expected}"
            )));
        }
        return Ok(PrimeRecord {
            p,
            f: deg,
            class,
            star,
            spins: Vec::new(),
            generator: f.from_int(&ph),
            root: None,
        });
    }
    let d = primes_above(f, p)?
        .into_iter()
        .next()
        .expect("a split prime has primes above it");
    let alpha0 = ideal_generator(f, &d, h)?;
    let alpha = make_totally_positive(f, &alpha0, &ctx.units, ctx.precision)?;
    let a8 = r.reduce(&alpha);
    let class = class_of(r, &a8)?;
    let star = star_of_class(r, class, &ctx.gram);
    let spins = (1..n).map(|j| spin(&d, &alpha, j)).collect::<Result<Vec<i8>>>()?;
    let mut relation_holds = true;
    for j in 1..n {
        let product = spins[j - 1] * spins[n - j - 1];
        let hilbert = symbol(r, &a8, &r.galois_apply(&a8, j as i64), &ctx.gram)?;
        if product != hilbert {
            return Err(Error::SpinSymbolMismatch { p, j });
        }
        relation_holds &= product == 1;
    }
    if relation_holds != (star == 1) {
        return Err(Error::Consistency(format!(
            "prime {p}: star {star} but spin relation {relation_holds}"
        )));
    }
    Ok(PrimeRecord {
        p,
        f: 1,
        class,
        star,
        spins,
        generator: alpha,
        root: Some(d.root),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub p: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleStats {
    pub n: usize,
    pub ell: u64,
    pub h: u32,
    pub bound: u64,
    pub considered: u64,
    pub split: u64,
    pub inert: u64,
    /// Split primes per class, indexed by the class bits.
    pub class_counts: Vec<u64>,
    pub star_split: u64,
    pub star_inert: u64,
    /// Inert primes in the class of `+1`.
    pub inert_plus_one: u64,
    pub all_spins_positive: u64,
    /// Spin/symbol comparisons made (one per split prime and `j`).
    pub flagship_checks: u64,
    pub excluded: Vec<Exclusion>,
}

impl SampleStats {
    pub fn new(n: usize, ell: u64, h: u32, bound: u64) -> Self {
        SampleStats {
            n,
            ell,
            h,
            bound,
            considered: 0,
            split: 0,
            inert: 0,
            class_counts: vec![0; 1 << n],
            star_split: 0,
            star_inert: 0,
            inert_plus_one: 0,
            all_spins_positive: 0,
            flagship_checks: 0,
            excluded: Vec::new(),
        }
    }

    pub fn record(&mut self, rec: &PrimeRecord) {
        self.considered += 1;
        let plus = (rec.star == 1) as u64;
        if rec.f == 1 {
            self.split += 1;
            self.class_counts[rec.class.0 as usize] += 1;
            self.star_split += plus;
            self.all_spins_positive += rec.all_spins_positive() as u64;
            self.flagship_checks += rec.spins.len() as u64;
        } else {
            self.inert += 1;
            self.star_inert += plus;
            self.inert_plus_one += (rec.class.0 == 0) as u64;
        }
    }

    pub fn exclude(&mut self, p: u64, reason: String) {
        self.considered += 1;
        self.excluded.push(Exclusion { p, reason });
    }

    pub fn total(&self) -> u64 {
        self.split + self.inert
    }

    pub fn star_total(&self) -> u64 {
        self.star_split + self.star_inert
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SampleConfig {
    /// Largest prime considered (inclusive).
    pub bound: u64,
    pub h: u32,
    pub workers: usize,
}

pub struct SampleOutcome {
    pub stats: SampleStats,
    pub records: Vec<PrimeRecord>,
}

/// Processes every prime `3 <= p <= bound` other than `ell`. Records come
/// back ordered by `p` whatever the worker count. Per-prime failures are
/// logged and excluded; more than 0.1% of them fails the run, as does any
/// other error.
pub fn sample(ctx: &SampleContext, cfg: SampleConfig) -> Result<SampleOutcome> {
    let ell = ctx.field.conductor();
    let primes: Vec<u64> = primes_in_range(3, cfg.bound.saturating_add(1))
        .into_iter()
        .filter(|&p| p != ell)
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::Consistency(format!("thread pool: {e}")))?;
    let results: Vec<(u64, Result<PrimeRecord>)> = pool.install(|| {
        primes
            .par_iter()
            .map(|&p| (p, process_prime(ctx, p, cfg.h)))
            .collect()
    });
    let mut stats = SampleStats::new(ctx.degree(), ell, cfg.h, cfg.bound);
    let mut records = Vec::with_capacity(results.len());
    for (p, res) in results {
        match res {
            Ok(rec) => {
                stats.record(&rec);
                records.push(rec);
            }
            Err(e) if e.is_per_prime() => {
                log::warn!("excluding p = {p}: {e}");
                stats.exclude(p, e.to_string());
            }
            Err(e) => return Err(e),
        }
    }
    let excluded = stats.excluded.len() as u64;
    if excluded * 1000 > stats.considered {
        return Err(Error::TooManyExclusions {
            excluded,
            total: stats.considered,
        });
    }
    Ok(SampleOutcome { stats, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;

    fn ctx37() -> SampleContext {
        let f = CyclicField::build(FieldParams::new(3, 7, 1).unwrap()).unwrap();
        SampleContext::new(f).unwrap()
    }

    #[test]
    fn split_and_inert_records() {
        let ctx = ctx37();
        let rec = process_prime(&ctx, 13, 1).unwrap();
        assert_eq!(rec.f, 1);
        assert_eq!(rec.spins.len(), 2);
        assert_eq!(ctx.field.norm(&rec.generator), BigInt::from(13));
        assert!(ctx.field.is_totally_positive(&rec.generator).unwrap());
        let rec = process_prime(&ctx, 3, 1).unwrap();
        assert_eq!(rec.f, 3);
        assert_eq!(rec.star, -1);
        let rec = process_prime(&ctx, 5, 1).unwrap();
        assert_eq!(rec.star, 1);
        assert_eq!(rec.class, SquareClassM4(0));
        assert!(matches!(process_prime(&ctx, 7, 1), Err(Error::BadPrime(7))));
    }

    #[test]
    fn squares_of_units_do_not_change_spins() {
        let ctx = ctx37();
        let f = &ctx.field;
        for p in [13u64, 29, 41, 43, 71, 83] {
            let rec = process_prime(&ctx, p, 1).unwrap();
            let d = primes_above(f, p).unwrap().into_iter().next().unwrap();
            for u in &ctx.units.units {
                let twisted = f.mul(&rec.generator, &f.mul(u, u));
                let spins: Vec<i8> = (1..3).map(|j| spin(&d, &twisted, j).unwrap()).collect();
                assert_eq!(spins, rec.spins);
                let c = class_of(&ctx.ring, &ctx.ring.reduce(&twisted)).unwrap();
                assert_eq!(c, rec.class);
            }
        }
    }

    #[test]
    fn square_generator_has_trivial_spins() {
        let ctx = ctx37();
        let f = &ctx.field;
        let d = primes_above(f, 29).unwrap().into_iter().next().unwrap();
        let rec = process_prime(&ctx, 29, 1).unwrap();
        let sq = f.mul(&rec.generator, &rec.generator);
        for j in 1..3 {
            assert_eq!(spin(&d, &sq, j).unwrap(), 1);
        }
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let ctx = ctx37();
        let a = sample(&ctx, SampleConfig { bound: 3000, h: 1, workers: 1 }).unwrap();
        let b = sample(&ctx, SampleConfig { bound: 3000, h: 1, workers: 3 }).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.stats, b.stats);
        assert!(a.stats.excluded.is_empty());
        assert_eq!(a.stats.total(), a.records.len() as u64);
    }

    #[test]
    fn csv_format() {
        let ctx = ctx37();
        let rec = process_prime(&ctx, 3, 1).unwrap();
        assert_eq!(rec.csv_line(3), "3,3,111,-1,,-3;-3;-3");
    }
}
