use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use spinlab_core::cache::{Cache, CacheEntry};
use spinlab_core::empirics::sample::{sample, SampleConfig, SampleContext, CSV_HEADER};
use spinlab_core::empirics::stats::summarize;
use spinlab_core::error::{Error, Result};
use spinlab_core::field::{CyclicField, FieldParams};
use spinlab_core::hilbert::{gram_from_exhaustive_oracle, validate_gram, GramMatrix, GALOIS_TRIALS};
use spinlab_core::residue::Ring8;
use spinlab_core::starlight::{density_report, format_rational, DensityReport};

/// Rows of the published invariant table: `(n, ell, m_K, D_K)`.
const TABLE1: [(u64, u64, u64, &str); 7] = [
    (3, 7, 1, "1/2"),
    (5, 11, 1, "7/16"),
    (7, 43, 3, "29/64"),
    (11, 23, 3, "467/1024"),
    (13, 53, 5, "1893/4096"),
    (17, 103, 17, "30849/65536"),
    (19, 191, 27, "124187/262144"),
];

const EXIT_INTERNAL: u8 = 1;
const EXIT_PARAMS: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(name = "spinlab", version, about = "Starlight invariants and prime spins of cyclic fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FieldArgs {
    /// Degree, an odd prime.
    #[arg(long)]
    n: u64,
    /// Conductor, a prime with n | ell - 1.
    #[arg(long)]
    ell: u64,
    /// Class number, assumed odd.
    #[arg(long, default_value_t = 1)]
    h: u64,
}

impl FieldArgs {
    fn params(&self) -> Result<FieldParams> {
        FieldParams::new(self.n, self.ell, self.h)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parameter checks, period cosets and the period polynomial.
    FieldInfo {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        json: bool,
    },
    /// m_K and the exact densities of one field.
    Starlight {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        json: bool,
        /// Recompute instead of reading the cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Recomputes every row of the invariant table and compares.
    Table1 {
        #[arg(long)]
        json: bool,
        #[arg(long)]
        no_cache: bool,
    },
    /// Checks the closed-form pairing against the conic oracle.
    ValidateHilbert {
        #[arg(long)]
        n: usize,
        /// Also rebuild the Gram matrix with the unnormalized conic search.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        json: bool,
    },
    /// Prime census up to a bound.
    Sample {
        #[command(flatten)]
        field: FieldArgs,
        /// Largest prime considered.
        #[arg(long)]
        bound: u64,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Per-prime CSV output.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// JSON summary output; printed to stdout when absent and --json is set.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Param(_) | Error::DegreeTooLarge { .. } | Error::BadPrime(_) | Error::ReduciblePolynomial(_) => {
            EXIT_PARAMS
        }
        Error::ValidationFailed { .. }
        | Error::FormulaNotValidated
        | Error::StarInconsistency { .. }
        | Error::BoundViolation { .. }
        | Error::WellDefinednessFailure(_)
        | Error::OrbitInvariantViolation(_)
        | Error::SpinSymbolMismatch { .. } => EXIT_MISMATCH,
        _ => EXIT_INTERNAL,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::FieldInfo { field, json } => field_info(&field.params()?, json),
        Command::Starlight { field, json, no_cache } => starlight(&field.params()?, json, no_cache),
        Command::Table1 { json, no_cache } => table1(json, no_cache),
        Command::ValidateHilbert { n, exhaustive, json } => validate_hilbert(n, exhaustive, json),
        Command::Sample {
            field,
            bound,
            jobs,
            csv,
            summary,
            json,
        } => run_sample(&field.params()?, bound, jobs, csv.as_deref(), summary.as_deref(), json),
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json value serializes"));
}

fn field_info(p: &FieldParams, json: bool) -> Result<u8> {
    let f = CyclicField::build(*p)?;
    let n = f.degree();
    let cosets: Vec<Vec<u64>> = (0..n).map(|i| f.coset_members(i)).collect();
    let mut h_group = cosets[0].clone();
    h_group.sort_unstable();
    let minpoly: Vec<String> = f.period_minpoly().coeffs().iter().map(ToString::to_string).collect();
    if json {
        print_json(&json!({
            "n": p.n.to_string(),
            "ell": p.ell.to_string(),
            "h": p.h.to_string(),
            "checks": "ok",
            "primitive_root": f.primitive_root().to_string(),
            "period_length": p.period_length().to_string(),
            "h_subgroup": h_group.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "coset_smallest": cosets.iter().map(|c| c.iter().min().expect("nonempty coset").to_string()).collect::<Vec<_>>(),
            "minpoly": minpoly,
            "minpoly_text": f.period_minpoly().to_string(),
        }));
    } else {
        println!("field (n, ell, h) = ({}, {}, {}): parameters ok", p.n, p.ell, p.h);
        println!("primitive root g = {}", f.primitive_root());
        println!("H = {:?}", h_group);
        println!("{} cosets of size {}", n, p.period_length());
        for (i, c) in cosets.iter().enumerate() {
            println!("  eta_{i}: g^{i} H, smallest member {}", c.iter().min().expect("nonempty coset"));
        }
        println!("period polynomial: {}", f.period_minpoly());
    }
    Ok(0)
}

fn entry_for(p: &FieldParams, no_cache: bool) -> Result<CacheEntry> {
    if no_cache {
        CacheEntry::derive(*p)
    } else {
        Cache::from_env().get_or_derive(p)
    }
}

fn density_json(d: &DensityReport) -> Value {
    json!({
        "m_k": d.m_k.to_string(),
        "d_k": format_rational(&d.d_k),
        "d_rs": format_rational(&d.d_rs),
        "c_k": format_rational(&d.c_k),
        "c_ks": format_rational(&d.c_ks),
    })
}

fn starlight(p: &FieldParams, json: bool, no_cache: bool) -> Result<u8> {
    let e = entry_for(p, no_cache)?;
    let st = e.star_table()?;
    let d = density_report(p.n as usize, st.m_k)?;
    if json {
        let mut v = density_json(&d);
        v["n"] = json!(p.n.to_string());
        v["ell"] = json!(p.ell.to_string());
        v["provenance"] = json!(st.provenance);
        v["kernel_size"] = json!(st.kernel_size.to_string());
        v["star_class_count"] = json!(st.star_class_count.to_string());
        print_json(&v);
    } else {
        println!("(n, ell) = ({}, {}), Gram provenance {}", p.n, p.ell, st.provenance);
        println!("m_K  = {}", d.m_k);
        println!("D_K  = {}", format_rational(&d.d_k));
        println!("d_RS = {}", format_rational(&d.d_rs));
        println!("C_K  = {}", format_rational(&d.c_k));
        println!("C_KS = {}", format_rational(&d.c_ks));
    }
    Ok(0)
}

fn table1(json: bool, no_cache: bool) -> Result<u8> {
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut all_pass = true;
    if !json {
        println!("{:>3} {:>4} {:>12} {:>30} {:>10} {:>9}", "n", "ell", "m_K", "D_K", "provenance", "time");
    }
    for (n, ell, m_k, d_k) in TABLE1 {
        let t = Instant::now();
        let p = FieldParams::new(n, ell, 1)?;
        let st = entry_for(&p, no_cache)?.star_table()?;
        let d = density_report(n as usize, st.m_k)?;
        let got_d = format_rational(&d.d_k);
        let m_ok = st.m_k == m_k;
        let d_ok = got_d == d_k;
        all_pass &= m_ok && d_ok;
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        if json {
            rows.push(json!({
                "n": n.to_string(),
                "ell": ell.to_string(),
                "m_k": {"expected": m_k.to_string(), "computed": st.m_k.to_string(), "pass": m_ok},
                "d_k": {"expected": d_k, "computed": got_d, "pass": d_ok},
                "provenance": st.provenance,
            }));
        } else {
            println!(
                "{n:>3} {ell:>4} {:>7} {} {:>25} {} {:>10} {:>8.2}s",
                st.m_k,
                verdict(m_ok),
                got_d,
                verdict(d_ok),
                st.provenance.to_string(),
                t.elapsed().as_secs_f64()
            );
        }
    }
    if json {
        print_json(&json!({"rows": rows, "pass": all_pass, "seconds": start.elapsed().as_secs_f64()}));
    } else {
        println!("{} in {:.2}s", if all_pass { "all rows PASS" } else { "MISMATCH" }, start.elapsed().as_secs_f64());
    }
    Ok(if all_pass { 0 } else { EXIT_MISMATCH })
}

fn gram_strings(g: &GramMatrix) -> Vec<String> {
    g.to_rows_of_bits()
        .iter()
        .map(|r| r.iter().map(|b| char::from(b'0' + b)).collect())
        .collect()
}

fn validate_hilbert(n: usize, exhaustive: bool, json: bool) -> Result<u8> {
    let modulus = Ring8::default_modulus(n).ok_or(Error::DegreeTooLarge { n, max: 62 })?;
    let v = validate_gram(n, modulus, GALOIS_TRIALS)?;
    let exhaustive_ok = if exhaustive {
        let r = Ring8::synthetic(n, modulus)?;
        Some(gram_from_exhaustive_oracle(&r)?.same_entries(&v.formula))
    } else {
        None
    };
    let pass = exhaustive_ok != Some(false);
    if json {
        print_json(&json!({
            "n": n.to_string(),
            "modulus": format!("{:#b}", modulus.0),
            "oracle": gram_strings(&v.oracle),
            "formula": gram_strings(&v.formula),
            "galois_pairs": v.galois_pairs.to_string(),
            "exhaustive": exhaustive_ok,
            "seconds": v.elapsed.as_secs_f64(),
            "pass": pass,
        }));
    } else {
        println!("synthetic ring of degree {n}, modulus {:#b}", modulus.0);
        for (o, f) in gram_strings(&v.oracle).iter().zip(gram_strings(&v.formula)) {
            println!("  oracle {o}   formula {f}");
        }
        println!("Galois invariance on {} random pairs: ok", v.galois_pairs);
        if let Some(ok) = exhaustive_ok {
            println!("exhaustive conic search: {}", if ok { "agrees" } else { "DISAGREES" });
        }
        println!("{} in {:.2}s", if pass { "PASS" } else { "FAIL" }, v.elapsed.as_secs_f64());
    }
    Ok(if pass { 0 } else { EXIT_MISMATCH })
}

/// Writes `contents` next to `path` and renames it into place.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn run_sample(
    p: &FieldParams,
    bound: u64,
    jobs: usize,
    csv: Option<&Path>,
    summary_path: Option<&Path>,
    json: bool,
) -> Result<u8> {
    let h = u32::try_from(p.h).map_err(|_| Error::Consistency(format!("class number {} too large", p.h)))?;
    let entry = Cache::from_env().get_or_derive(p)?;
    let m_k = entry.m_k()?;
    let f = CyclicField::build(*p)?;
    let ring = Ring8::from_field(&f)?;
    let ctx = SampleContext::with_gram(f, ring, entry.gram()?)?;
    let start = Instant::now();
    let out = sample(&ctx, SampleConfig { bound, h, workers: jobs })?;
    let elapsed = start.elapsed();
    if let Some(path) = csv {
        let n = ctx.degree();
        let mut text = String::with_capacity(64 * out.records.len());
        text.push_str(CSV_HEADER);
        text.push('\n');
        for r in &out.records {
            text.push_str(&r.csv_line(n));
            text.push('\n');
        }
        write_atomic(path, text.as_bytes())?;
    }
    let summary = summarize(&out.stats, m_k)?;
    if let Some(path) = summary_path {
        write_atomic(path, format!("{}\n", summary.to_json()).as_bytes())?;
    }
    if json {
        if summary_path.is_none() {
            println!("{}", summary.to_json());
        }
    } else {
        let s = &summary.stats;
        println!(
            "(n, ell, h) = ({}, {}, {}), primes up to {bound}: {} split, {} inert, {} excluded, {:.2}s",
            p.n,
            p.ell,
            p.h,
            s.split,
            s.inert,
            s.excluded.len(),
            elapsed.as_secs_f64()
        );
        println!("spin/symbol identity checked {} times: ok", s.flagship_checks);
        println!("{:<18} {:>9} {:>9} {:>10} {:>10} {:>8}", "statistic", "hits", "trials", "frequency", "target", "z");
        for c in &summary.checks {
            let verdict = if c.soft {
                if c.flagged() { "FLAG" } else { "soft" }
            } else if c.passes() {
                "ok"
            } else {
                "OUTSIDE 3 sigma"
            };
            println!(
                "{:<18} {:>9} {:>9} {:>10.5} {:>10} {:>8.2} {verdict}",
                c.label, c.successes, c.trials, c.frequency, c.expected, c.z
            );
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Param(spinlab_core::error::ParamCheck::DegreeDoesNotDivide)), 2);
        assert_eq!(exit_code(&Error::SpinSymbolMismatch { p: 13, j: 1 }), 3);
        assert_eq!(exit_code(&Error::Cache("x".into())), 1);
    }

    #[test]
    fn cli_parses() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
