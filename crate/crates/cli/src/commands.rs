use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use paley_km::km::{km_moment, limiting_trace_coefficients, BorelTable, CatalanTable};
use paley_km::randmat::{mean_estimate, monte_carlo_esd, trace_proxy_samples};
use paley_km::verify::{self, CONVERGENCE_MAX_K};
use paley_km::paley_conference;

use crate::{MatrixFormat, SampleArgs};

/// Slack on the spectral norm bound `|λ| <= 1/p`.
const NORM_SLACK: f64 = 1e-9;

/// Per-trial tolerance on the relative gap in `V = (N/(pn)) W`.
const IDENTITY_TOLERANCE: f64 = 1e-12;

fn create(out: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok((path, BufWriter::new(file)))
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let (path, mut w) = create(out, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(path)
}

fn run_tag(sample: &SampleArgs) -> String {
    format!("q{}_p{}_seed{}_trials{}", sample.q, sample.p, sample.seed, sample.trials)
}

pub fn gen(out: &Path, q: u64, format: MatrixFormat) -> Result<bool> {
    let s = paley_conference(q)?;
    let ok = s.verify();
    let path = match format {
        MatrixFormat::Json => {
            let (path, mut w) = create(out, &format!("paley_{q}.json"))?;
            s.write_json(&mut w)?;
            w.flush()?;
            path
        }
        MatrixFormat::Text => {
            let (path, mut w) = create(out, &format!("paley_{q}.txt"))?;
            s.write_text(&mut w)?;
            w.flush()?;
            path
        }
    };
    println!("order\t{}", s.order());
    println!("is_conference\t{ok}");
    println!("wrote\t{}", path.display());
    Ok(ok)
}

pub fn spectrum(out: &Path, sample: &SampleArgs, bins: usize, k_max: u32, ks_max: Option<f64>) -> Result<bool> {
    let s = paley_conference(sample.q)?;
    let run = monte_carlo_esd(&s, sample.p, sample.seed, sample.trials, bins)?;
    let meta = run.metadata(bins, k_max)?;

    let tag = run_tag(sample);
    let (csv_path, mut w) = create(out, &format!("spectrum_{tag}.csv"))?;
    run.histogram.write_csv(&mut w)?;
    w.flush()?;
    let json_path = write_json(out, &format!("spectrum_{tag}.json"), &meta)?;

    let norm = run.pooled.max_abs();
    let norm_ok = norm <= 1.0 / sample.p + NORM_SLACK;
    let ks_ok = match (ks_max, meta.ks_distance) {
        (Some(limit), Some(d)) => d <= limit,
        (Some(_), None) => false,
        (None, _) => true,
    };
    println!("eigenvalues\t{}", meta.total_eigenvalues);
    println!("empty_trials\t{}", meta.empty_trials);
    match meta.ks_distance {
        Some(d) => println!("ks_distance\t{d}"),
        None => println!("ks_distance\tNA"),
    }
    println!("max_abs_eigenvalue\t{norm}\t{}", if norm_ok { "ok" } else { "FAIL" });
    println!("wrote\t{}", csv_path.display());
    println!("wrote\t{}", json_path.display());
    Ok(norm_ok && ks_ok)
}

#[derive(Serialize)]
struct KsReport {
    q: u64,
    n: usize,
    p: f64,
    seed: u64,
    trials: u64,
    total_eigenvalues: usize,
    empty_trials: usize,
    ks_distance: Option<f64>,
    ks_max: Option<f64>,
}

pub fn ks(sample: &SampleArgs, ks_max: Option<f64>) -> Result<bool> {
    let s = paley_conference(sample.q)?;
    let run = monte_carlo_esd(&s, sample.p, sample.seed, sample.trials, 1)?;
    let d = run.ks_distance()?;
    let report = KsReport {
        q: sample.q,
        n: s.order(),
        p: sample.p,
        seed: sample.seed,
        trials: sample.trials,
        total_eigenvalues: run.pooled.len(),
        empty_trials: run.empty_trials(),
        ks_distance: d,
        ks_max,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(match (ks_max, d) {
        (Some(limit), Some(d)) => d <= limit,
        (Some(_), None) => false,
        (None, _) => true,
    })
}

pub fn moments(out: &Path, sample: &SampleArgs, k_max: u32) -> Result<bool> {
    let s = paley_conference(sample.q)?;
    let samples = trace_proxy_samples(&s, sample.p, sample.seed, sample.trials, k_max)?;
    let (path, mut w) = create(out, &format!("moments_{}.tsv", run_tag(sample)))?;
    let header = "k\tmc_mean\tkm_moment\tabs_error\tstd_error";
    writeln!(w, "{header}")?;
    println!("{header}");
    for k in 1..=k_max {
        let est = mean_estimate(&samples.column(k))?;
        // the limit law exists only for p <= 1/2
        let km = if sample.p <= 0.5 {
            km_moment(1.0 / sample.p, k)
        } else {
            f64::NAN
        };
        let row = format!(
            "{k}\t{}\t{km}\t{}\t{}",
            est.mean,
            (est.mean - km).abs(),
            est.std_error
        );
        writeln!(w, "{row}")?;
        println!("{row}");
    }
    w.flush()?;
    let ok = samples.max_identity_gap <= IDENTITY_TOLERANCE;
    eprintln!(
        "max relative gap in V = (N/(pn)) W: {} ({})",
        samples.max_identity_gap,
        if ok { "ok" } else { "FAIL" }
    );
    eprintln!("wrote {}", path.display());
    Ok(ok)
}

pub fn verify(out: &Path, k_max: usize, convergence_k_max: Option<usize>, primes: &[u64]) -> Result<bool> {
    let conv = convergence_k_max.unwrap_or(k_max.min(CONVERGENCE_MAX_K));
    let report = verify::verify(k_max, conv, primes)?;
    for r in &report.counting {
        println!(
            "counting\tk={}\tt={}\tsum={}\texpected={}\tborel={}\tmd={}\t{}",
            r.k,
            r.t,
            r.limit_sum,
            r.expected,
            r.borel.map_or("-".into(), |b| b.to_string()),
            r.marked_dyck_count.map_or("-".into(), |c| c.to_string()),
            if r.pass { "ok" } else { "FAIL" }
        );
    }
    for r in &report.cactus {
        println!(
            "cactus\tk={}\tchecked={}\t{}",
            r.k,
            r.checked,
            if r.pass { "ok" } else { "FAIL" }
        );
    }
    for r in &report.convergence {
        println!(
            "convergence\tk={}\tpartitions={}\tbelow_min_decreases={}\trate_failures={}\t{}",
            r.k,
            r.partitions,
            r.failures.len(),
            r.rate_failures.len(),
            if r.pass { "ok" } else { "FAIL" }
        );
    }
    let path = write_json(out, "verify.json", &report)?;
    println!("wrote\t{}", path.display());
    Ok(report.pass)
}

#[derive(Serialize)]
struct Triangles {
    catalan: Vec<Vec<u128>>,
    borel: Vec<Vec<u128>>,
    /// Limiting coefficient of `p^t` for each moment order `k`.
    limiting_coefficients: BTreeMap<u64, BTreeMap<u64, i128>>,
}

pub fn triangles(out: &Path, n_max: u64) -> Result<bool> {
    let catalan = CatalanTable::new(n_max)?;
    let borel = BorelTable::new(n_max)?;
    println!("n\tk\tcatalan\tborel");
    for (n, row) in catalan.rows.iter().enumerate() {
        for (k, c) in row.iter().enumerate() {
            println!("{n}\t{k}\t{c}\t{}", borel.rows[n][k]);
        }
    }
    let limiting_coefficients = (1..=2 * (n_max + 1))
        .map(|k| Ok((k, limiting_trace_coefficients(k)?)))
        .collect::<Result<_>>()?;
    let path = write_json(
        out,
        "triangles.json",
        &Triangles {
            catalan: catalan.rows,
            borel: borel.rows,
            limiting_coefficients,
        },
    )?;
    eprintln!("wrote {}", path.display());
    Ok(true)
}
