use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "paley-km", version, about = "Paley conference matrices, subsampled spectra and Kesten-McKay checks")]
struct Cli {
    /// Directory that receives output files
    #[arg(long, global = true, env = "PALEY_KM_OUT_DIR", default_value = ".")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the Paley conference matrix for a prime q = 1 mod 4
    Gen {
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value_t = MatrixFormat::Json)]
        format: MatrixFormat,
    },
    /// Histogram of scaled submatrix spectra with the Kesten-McKay overlay
    Spectrum {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long, default_value_t = paley_km::randmat::DEFAULT_BINS)]
        bins: usize,
        /// Highest empirical moment recorded in the metadata
        #[arg(long, default_value_t = 6)]
        k_max: u32,
        /// Fail when the KS distance exceeds this value
        #[arg(long)]
        ks_max: Option<f64>,
    },
    /// KS distance between pooled spectra and the Kesten-McKay law
    Ks {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        ks_max: Option<f64>,
    },
    /// Monte Carlo trace moments against the Kesten-McKay moments
    Moments {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long, default_value_t = 6)]
        k_max: u32,
    },
    /// Exhaustive partition checks and the convergence of partition sums
    Verify {
        #[arg(long, default_value_t = 8)]
        k_max: usize,
        /// Largest k for the convergence check (defaults to min(k_max, 8))
        #[arg(long)]
        convergence_k_max: Option<usize>,
        /// Primes whose Paley orders form the convergence sequence
        #[arg(long, value_delimiter = ',', default_values_t = paley_km::verify::CONVERGENCE_PRIMES)]
        primes: Vec<u64>,
    },
    /// Catalan and Borel triangles with the limiting trace coefficients
    Triangles {
        #[arg(long, default_value_t = 10)]
        n_max: u64,
    },
}

#[derive(Args, Debug, Clone)]
struct SampleArgs {
    #[arg(long)]
    q: u64,
    /// Inclusion probability, strictly between 0 and 1
    #[arg(long, value_parser = parse_probability)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum MatrixFormat {
    Json,
    Text,
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(format!("{p} is not strictly between 0 and 1"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen { q, format } => commands::gen(&cli.out, q, format),
        Command::Spectrum {
            sample,
            bins,
            k_max,
            ks_max,
        } => commands::spectrum(&cli.out, &sample, bins, k_max, ks_max),
        Command::Ks { sample, ks_max } => commands::ks(&sample, ks_max),
        Command::Moments { sample, k_max } => commands::moments(&cli.out, &sample, k_max),
        Command::Verify {
            k_max,
            convergence_k_max,
            primes,
        } => commands::verify(&cli.out, k_max, convergence_k_max, &primes),
        Command::Triangles { n_max } => commands::triangles(&cli.out, n_max),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
