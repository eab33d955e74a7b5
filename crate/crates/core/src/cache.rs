//! On-disk cache of per-field artifacts: versioned JSON with all integers
//! written as decimal strings and a SHA-256 checksum over the payload.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{CyclicField, FieldParams};
use crate::hilbert::{formula_gate, published_gram, GramMatrix, Provenance};
use crate::residue::Ring8;
use crate::square_classes::SquareClassM4;
use crate::starlight::{starlight_invariant, OrbitStar, StarTable};

pub const SCHEMA_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "SPINLAB_CACHE";
pub const DEFAULT_CACHE_DIR: &str = ".spinlab-cache";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachedGram {
    /// Row `i` as a bit string, entry `(i, j)` at position `j`.
    pub rows: Vec<String>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachedOrbit {
    pub representative: String,
    pub size: String,
    pub star: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachedStarTable {
    pub orbits: Vec<CachedOrbit>,
    pub kernel_size: String,
    pub star_class_count: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachedParams {
    pub n: String,
    pub ell: String,
    pub h: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachePayload {
    pub schema_version: u32,
    pub params: CachedParams,
    /// `mult_table[i][j][k]`: coefficient of `eta_k` in `eta_i * eta_j`.
    pub mult_table: Vec<Vec<Vec<String>>>,
    /// Ascending coefficients.
    pub minpoly: Vec<String>,
    /// Ascending rational coefficients, `a` or `a/b`.
    pub interp_polys: Vec<Vec<String>>,
    pub gram: CachedGram,
    pub star_table: CachedStarTable,
    pub m_k: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub payload: CachePayload,
    /// Hex SHA-256 of the compact JSON of `payload`.
    pub checksum: String,
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn field_part(f: &CyclicField) -> (Vec<Vec<Vec<String>>>, Vec<String>, Vec<Vec<String>>) {
    let mult = f
        .mult_table()
        .iter()
        .map(|row| row.iter().map(|c| strings(c)).collect())
        .collect();
    let minpoly = strings(f.period_minpoly().coeffs());
    let interp = f.interp_polys().iter().map(|p| strings(p.coeffs())).collect();
    (mult, minpoly, interp)
}

impl CachePayload {
    pub fn from_parts(f: &CyclicField, gram: &GramMatrix, star: &StarTable) -> Self {
        let n = f.degree();
        let p = f.params();
        let (mult_table, minpoly, interp_polys) = field_part(f);
        CachePayload {
            schema_version: SCHEMA_VERSION,
            params: CachedParams {
                n: p.n.to_string(),
                ell: p.ell.to_string(),
                h: p.h.to_string(),
            },
            mult_table,
            minpoly,
            interp_polys,
            gram: CachedGram {
                rows: gram
                    .to_rows_of_bits()
                    .iter()
                    .map(|r| r.iter().map(|b| char::from(b'0' + b)).collect())
                    .collect(),
                provenance: gram.provenance,
            },
            star_table: CachedStarTable {
                orbits: star
                    .orbits
                    .iter()
                    .map(|o| CachedOrbit {
                        representative: o.representative.to_bit_string(n),
                        size: o.size.to_string(),
                        star: o.star.to_string(),
                    })
                    .collect(),
                kernel_size: star.kernel_size.to_string(),
                star_class_count: star.star_class_count.to_string(),
            },
            m_k: star.m_k.to_string(),
        }
    }

    fn checksum(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("payload serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

fn parse<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Cache(format!("bad {what}: {s:?}")))
}

impl CacheEntry {
    /// Computes every artifact for `params` from scratch.
    pub fn derive(params: FieldParams) -> Result<Self> {
        let f = CyclicField::build(params)?;
        let r = Ring8::from_field(&f)?;
        let g = published_gram(&r)?;
        let st = starlight_invariant(&r, &g)?;
        Ok(Self::new(CachePayload::from_parts(&f, &g, &st)))
    }

    pub fn new(payload: CachePayload) -> Self {
        let checksum = payload.checksum();
        CacheEntry { payload, checksum }
    }

    pub fn checksum_ok(&self) -> bool {
        self.payload.checksum() == self.checksum
    }

    pub fn params(&self) -> Result<FieldParams> {
        let p = &self.payload.params;
        FieldParams::new(
            parse(&p.n, "n")?,
            parse(&p.ell, "ell")?,
            parse(&p.h, "h")?,
        )
    }

    pub fn m_k(&self) -> Result<u64> {
        parse(&self.payload.m_k, "m_K")
    }

    pub fn gram(&self) -> Result<GramMatrix> {
        let g = &self.payload.gram;
        let mut rows = Vec::with_capacity(g.rows.len());
        for s in &g.rows {
            if s.len() != g.rows.len() || !s.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Error::Cache(format!("bad Gram row {s:?}")));
            }
            rows.push(s.bytes().enumerate().fold(0u64, |m, (j, b)| m | (((b - b'0') as u64) << j)));
        }
        Ok(GramMatrix {
            n: rows.len().saturating_sub(1),
            rows,
            provenance: g.provenance,
        })
    }

    pub fn star_table(&self) -> Result<StarTable> {
        let s = &self.payload.star_table;
        let gram = self.gram()?;
        let orbits = s
            .orbits
            .iter()
            .map(|o| {
                Ok(OrbitStar {
                    representative: SquareClassM4::from_bit_string(&o.representative)
                        .ok_or_else(|| Error::Cache(format!("bad class {:?}", o.representative)))?,
                    size: parse(&o.size, "orbit size")?,
                    star: parse(&o.star, "star")?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StarTable {
            n: gram.n,
            provenance: gram.provenance,
            orbits,
            m_k: self.m_k()?,
            kernel_size: parse(&s.kernel_size, "kernel size")?,
            star_class_count: parse(&s.star_class_count, "star class count")?,
        })
    }

    /// Recomputes everything and compares.
    pub fn matches_rederived(&self) -> Result<bool> {
        Ok(Self::derive(self.params()?)?.payload == self.payload)
    }
}

/// Directory of cache entries, one file per field.
#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// `$SPINLAB_CACHE`, else `./.spinlab-cache`.
    pub fn from_env() -> Self {
        Self::new(std::env::var_os(CACHE_ENV).map_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR), PathBuf::from))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, p: &FieldParams) -> PathBuf {
        self.dir.join(format!("field-n{}-ell{}-h{}.json", p.n, p.ell, p.h))
    }

    /// Writes through a temporary file in the same directory and renames it
    /// into place.
    pub fn store(&self, entry: &CacheEntry) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(&entry.params()?);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        serde_json::to_writer_pretty(&mut tmp, entry)?;
        tmp.write_all(b"\n")?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
        Ok(path)
    }

    /// The entry for `params`, if present. A checksum, schema or parameter
    /// mismatch is an error; the field data is re-derived and compared, and
    /// a formula Gram is only accepted once the formula has been validated in
    /// this process.
    pub fn load(&self, params: &FieldParams) -> Result<Option<CacheEntry>> {
        let path = self.path_for(params);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let entry: CacheEntry = serde_json::from_str(&text)?;
        if entry.payload.schema_version != SCHEMA_VERSION {
            return Err(Error::Cache(format!(
                "{}: schema version {} (expected {SCHEMA_VERSION})",
                path.display(),
                entry.payload.schema_version
            )));
        }
        if !entry.checksum_ok() {
            return Err(Error::Cache(format!("{}: checksum mismatch", path.display())));
        }
        if entry.params()? != *params {
            return Err(Error::Cache(format!("{}: parameters differ", path.display())));
        }
        let f = CyclicField::build(*params)?;
        let (mult, minpoly, interp) = field_part(&f);
        let p = &entry.payload;
        if p.mult_table != mult || p.minpoly != minpoly || p.interp_polys != interp {
            return Err(Error::Cache(format!("{}: field data differs", path.display())));
        }
        if p.gram.provenance == Provenance::Formula {
            formula_gate()?;
        }
        Ok(Some(entry))
    }

    /// Loads the entry, deriving and storing it when absent.
    pub fn get_or_derive(&self, params: &FieldParams) -> Result<CacheEntry> {
        if let Some(e) = self.load(params)? {
            return Ok(e);
        }
        let e = CacheEntry::derive(*params)?;
        self.store(&e)?;
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p37() -> FieldParams {
        FieldParams::new(3, 7, 1).unwrap()
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        assert!(cache.load(&p37()).unwrap().is_none());
        let e = cache.get_or_derive(&p37()).unwrap();
        let back = cache.load(&p37()).unwrap().unwrap();
        assert_eq!(back, e);
        assert!(back.checksum_ok());
        assert!(back.matches_rederived().unwrap());
        assert_eq!(back.m_k().unwrap(), 1);
        assert_eq!(back.payload.minpoly, vec!["-1", "-2", "1", "1"]);
        let g = back.gram().unwrap();
        assert_eq!(g.provenance, Provenance::Oracle);
        let f = CyclicField::build(p37()).unwrap();
        let r = Ring8::from_field(&f).unwrap();
        assert_eq!(back.star_table().unwrap(), starlight_invariant(&r, &g).unwrap());
    }

    #[test]
    fn tampering_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let path = cache.store(&CacheEntry::derive(p37()).unwrap()).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let json: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(json["payload"]["m_k"], "1");
        fs::write(&path, text.replacen("\"m_k\": \"1\"", "\"m_k\": \"2\"", 1)).unwrap();
        assert!(matches!(cache.load(&p37()), Err(Error::Cache(_))));
    }

    #[test]
    fn forged_checksum_still_fails_field_check() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let mut e = CacheEntry::derive(p37()).unwrap();
        e.payload.minpoly[0] = "1".into();
        cache.store(&CacheEntry::new(e.payload)).unwrap();
        assert!(matches!(cache.load(&p37()), Err(Error::Cache(_))));
    }
}
