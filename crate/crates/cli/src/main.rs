//! `quadrics` — experiments on integral points of affine quadrics.
//!
//! Exit codes: 0 success, 2 config error, 3 budget exceeded, 4 internal error.

use clap::{Args, Parser, Subcommand};
use quadrics_cli::config::{ExperimentConfig, Kind};
use quadrics_cli::report::ExperimentReport;
use quadrics_cli::{HResult, HarnessError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "quadrics", version, about = "Integral points on affine quadrics: enumeration, densities, sieves")]
struct Cli {
    /// Configuration document (JSON or TOML); CLI flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path for the report (stdout summary is always printed).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for --out.
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Worker threads (default: QUADRICS_THREADS or 1).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Diagonal form literal, e.g. "1,1,1,-1".
    #[arg(long)]
    form: Option<String>,
    /// Target value m of q = m.
    #[arg(long)]
    m: Option<i64>,
    /// Denominator prime p0.
    #[arg(long)]
    p0: Option<u64>,
    /// Adic height exponent h.
    #[arg(long)]
    h: Option<u32>,
    /// Real region "lo:hi,..." (a single pair broadcasts to all axes).
    #[arg(long)]
    region: Option<String>,
    /// Scan cap (candidate tuples) for modular counting.
    #[arg(long)]
    scan_cap: Option<u64>,
    /// Explicit residue-class cap for the lift tree.
    #[arg(long)]
    class_cap: Option<usize>,
}

impl CommonArgs {
    fn into_config(self) -> ExperimentConfig {
        ExperimentConfig {
            form: self.form,
            m: self.m,
            p0: self.p0,
            h: self.h,
            region: self.region,
            scan_cap: self.scan_cap,
            class_cap: self.class_cap,
            ..Default::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate integral or p0-integral points in a height ball or region.
    Enumerate {
        #[command(flatten)]
        common: CommonArgs,
        /// Euclidean (default) or sup-norm radius for integral enumeration.
        #[arg(long)]
        height: Option<i64>,
        /// Use the sup-norm instead of the Euclidean height.
        #[arg(long)]
        sup_norm: bool,
    },
    /// Exact point counts mod p or p^k, optionally for a codimension-two slice.
    CountMod {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        k: Option<u32>,
        /// First slice polynomial (file or inline, with --sub-g).
        #[arg(long)]
        sub_f: Option<String>,
        /// Second slice polynomial.
        #[arg(long)]
        sub_g: Option<String>,
    },
    /// Local densities, archimedean density, and adic ball volumes.
    Density {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        all_primes_upto: Option<u64>,
        /// Also compute the archimedean density over --region.
        #[arg(long)]
        real: bool,
        /// Also compute the p0-adic ball volume at exponent --h.
        #[arg(long)]
        ball: bool,
        /// Quadrature grid (refined once for the error bar).
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Counts in congruence classes against main terms, with a fitted exponent.
    Equidist {
        #[command(flatten)]
        common: CommonArgs,
        /// Congruence modulus (composite allowed; coprime to p0).
        #[arg(long)]
        modulus: Option<u64>,
        /// Residue coordinates "c1,c2,...".
        #[arg(long)]
        residue: Option<String>,
        /// Real height schedule, e.g. "32:2048:x2".
        #[arg(long)]
        schedule: Option<String>,
        /// Adic exponent schedule, e.g. "0:6".
        #[arg(long)]
        h_schedule: Option<String>,
        /// Finite-product truncation.
        #[arg(long)]
        p_cut: Option<u64>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Sifting-function report: main term, Mertens product, remainder ledger.
    Sieve {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        height: Option<i64>,
        /// Value polynomial (file or inline like "x1+x2+3").
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        z: Option<u64>,
        #[arg(long)]
        y: Option<u64>,
        /// Excluded primes "2,3".
        #[arg(long)]
        sprime: Option<String>,
    },
    /// Search for a point whose value has few large prime factors.
    AlmostPrime {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        height: Option<i64>,
        #[arg(long)]
        f: Option<String>,
        /// Lower bound M on admissible prime factors.
        #[arg(long = "M")]
        min_norm: Option<u64>,
        /// Max number r of distinct prime factors.
        #[arg(long = "r")]
        max_places: Option<usize>,
        /// Point budget.
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long)]
        sprime: Option<String>,
    },
    /// Bad-point counts for a codimension-two locus over a prime-range grid.
    GeomSieve {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
        /// Lower cutoffs, e.g. "10,30,100,300".
        #[arg(long = "M-grid")]
        m_grid: Option<String>,
    },
    /// Representability counts for u^2 + a v^2 targets over a box grid.
    Halfdim {
        #[arg(long)]
        a: Option<i64>,
        /// Tail coefficients "1,1".
        #[arg(long)]
        tail: Option<String>,
        /// Fixed target constant.
        #[arg(long)]
        c: Option<i64>,
        /// Target scales as c_per_b2 * B^2 along the grid.
        #[arg(long)]
        c_per_b2: Option<i64>,
        /// Box grid, e.g. "64:4096:x2".
        #[arg(long = "B-grid")]
        b_grid: Option<String>,
    },
    /// Validate and summarize a stored JSON report.
    Report { path: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> HResult<()> {
    let threads = cli
        .threads
        .or_else(|| std::env::var("QUADRICS_THREADS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(1);
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();

    let file_config = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };

    let (kind, flag_config) = match cli.command {
        Command::Report { path } => {
            let rep = ExperimentReport::read_json(&path)?;
            print_summary(&rep);
            return Ok(());
        }
        Command::Enumerate { common, height, sup_norm } => {
            let mut c = common.into_config();
            c.height = height;
            if sup_norm {
                c.sup_norm = Some(true);
            }
            (Kind::Enumerate, c)
        }
        Command::CountMod { common, p, k, sub_f, sub_g } => {
            let mut c = common.into_config();
            c.p = p;
            c.k = k;
            c.sub_f = sub_f;
            c.sub_g = sub_g;
            (Kind::CountMod, c)
        }
        Command::Density { common, p, all_primes_upto, real, ball, grid } => {
            let mut c = common.into_config();
            c.p = p;
            c.all_primes_upto = all_primes_upto;
            if real {
                c.real = Some(true);
            }
            if ball {
                c.ball = Some(true);
            }
            c.grid = grid;
            (Kind::Density, c)
        }
        Command::Equidist { common, modulus, residue, schedule, h_schedule, p_cut, grid } => {
            let mut c = common.into_config();
            c.modulus = modulus;
            c.residue = residue;
            c.schedule = schedule;
            c.h_schedule = h_schedule;
            c.p_cut = p_cut;
            c.grid = grid;
            (Kind::Equidist, c)
        }
        Command::Sieve { common, height, f, z, y, sprime } => {
            let mut c = common.into_config();
            c.height = height;
            c.f = f;
            c.z = z;
            c.y = y;
            c.sprime = sprime;
            (Kind::Sieve, c)
        }
        Command::AlmostPrime { common, height, f, min_norm, max_places, budget, sprime } => {
            let mut c = common.into_config();
            c.height = height;
            c.f = f;
            c.min_norm = min_norm;
            c.max_places = max_places;
            c.budget = budget;
            c.sprime = sprime;
            (Kind::AlmostPrime, c)
        }
        Command::GeomSieve { common, f, g, m_grid } => {
            let mut c = common.into_config();
            c.f = f;
            c.g = g;
            c.m_grid = m_grid;
            (Kind::GeomSieve, c)
        }
        Command::Halfdim { a, tail, c, c_per_b2, b_grid } => {
            let cfg = ExperimentConfig {
                a,
                tail,
                c,
                c_per_b2,
                b_grid,
                ..Default::default()
            };
            (Kind::Halfdim, cfg)
        }
    };

    let merged = file_config.merged_with(flag_config);
    let report = quadrics_cli::commands::run(kind, &merged)?;
    print_summary(&report);

    if let Some(out) = &cli.out {
        let format = cli.format.as_deref().unwrap_or_else(|| {
            if out.extension().map_or(false, |e| e == "json") {
                "json"
            } else {
                "csv"
            }
        });
        match format {
            "json" => report.write_json(out)?,
            "csv" => report.write_csv(out)?,
            other => return Err(HarnessError::Config(format!("unknown format {other:?}"))),
        }
        eprintln!("wrote {}", out.display());
    }
    Ok(())
}

fn print_summary(report: &ExperimentReport) {
    let d = &report.data;
    println!("kind: {}  rows: {}  hash: {}", d.kind, d.rows.len(), &d.config_hash[..16]);
    for (k, v) in &d.summary {
        println!("  {k}: {v}");
    }
    for w in &d.warnings {
        println!("  warning: {w}");
    }
    println!("  wall_ms: {}", report.wall_ms);
}
