use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use switchsim::{check_gas, construct_k, convex_combine, dwell_bound, verify_assumption2};
use switchsim_cli::config::{load_config, LawKind, SchemeKind};
use switchsim_cli::ensemble::{run_ensemble, write_summary};
use switchsim_cli::error::Result;
use switchsim_cli::fixtures::emit_fixtures;
use switchsim_cli::scenario::build_experiment;

#[derive(Parser)]
#[command(
    name = "switchsim",
    version,
    about = "Switched dissipative stabilization of finite-dimensional quantum systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured ensemble and write the CSV summary.
    Run(RunArgs),
    /// Report invariance and asymptotic stability for each generator and for
    /// convex combinations of the family.
    CheckGas {
        #[arg(long)]
        config: PathBuf,
    },
    /// Construct a certificate from the uniform combination, verify its
    /// drift condition, and print the minimum-dwell-time bound.
    Certificate {
        #[arg(long)]
        config: PathBuf,
        /// Fraction of the certificate value guaranteed to be retained over
        /// one dwell interval.
        #[arg(long, default_value_t = 0.5)]
        retention: f64,
    },
    /// Write the bundled example configurations.
    Fixtures {
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum SchemeArg {
    Kraus,
    Euler,
}

#[derive(Copy, Clone, ValueEnum)]
enum LawArg {
    Cyclic,
    State,
    Measurement,
    All,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override run.master_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override run.n_realizations.
    #[arg(long)]
    realizations: Option<usize>,
    /// Override run.output_path.
    #[arg(long)]
    out: Option<String>,
    /// Override run.scheme.
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Restrict to one law, or force all three.
    #[arg(long, value_enum)]
    law: Option<LawArg>,
    /// Worker threads for the ensemble (default: all cores). The output is
    /// identical for any worker count.
    #[arg(long)]
    workers: Option<usize>,
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut cfg = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.run.master_seed = seed;
    }
    if let Some(n) = args.realizations {
        cfg.run.n_realizations = n;
    }
    if let Some(out) = args.out {
        cfg.run.output_path = out;
    }
    if let Some(scheme) = args.scheme {
        cfg.run.scheme = match scheme {
            SchemeArg::Kraus => SchemeKind::Kraus,
            SchemeArg::Euler => SchemeKind::Euler,
        };
    }
    if let Some(law) = args.law {
        cfg.run.laws = match law {
            LawArg::Cyclic => vec![LawKind::Cyclic],
            LawArg::State => vec![LawKind::State],
            LawArg::Measurement => vec![LawKind::Measurement],
            LawArg::All => vec![LawKind::Cyclic, LawKind::State, LawKind::Measurement],
        };
    }
    cfg.validate()?;

    let exp = build_experiment(&cfg)?;
    let summary = run_ensemble(&exp, args.workers)?;
    let path = PathBuf::from(&exp.output_path);
    write_summary(&summary, &path)?;
    println!(
        "wrote {} and {}.meta.toml ({} realizations, seed {})",
        path.display(),
        path.display(),
        summary.n_realizations,
        summary.master_seed
    );
    for law in &summary.laws {
        let last = law.mean_dist.len() - 1;
        println!(
            "law {}: final mean distance {:.6}, final mean V {:.6}",
            law.law, law.mean_dist[last], law.mean_v[last]
        );
    }
    Ok(())
}

fn cmd_check_gas(config: PathBuf) -> Result<()> {
    let cfg = load_config(&config)?;
    let exp = build_experiment(&cfg)?;
    let target = exp.cert.target();
    let tol = exp.invariant_tol;
    let mut any_single = false;
    for gen in &exp.gens {
        let report = check_gas(gen, target, tol)?;
        let slowest = report
            .spectrum
            .eigenvalues
            .iter()
            .map(|e| e.re)
            .fold(f64::NEG_INFINITY, f64::max);
        println!(
            "generator {}: invariant {}, gas {}, slowest complement mode {:+.6}",
            gen.label(),
            yes_no(report.is_invariant),
            yes_no(report.is_gas),
            slowest
        );
        any_single |= report.is_gas;
    }
    let mut any_combo = false;
    if exp.gens.len() == 2 {
        for step in 0..=10 {
            let a = f64::from(step) / 10.0;
            let combo = convex_combine(&exp.gens, &[1.0 - a, a])?;
            let report = check_gas(&combo, target, tol)?;
            println!(
                "combination alpha = ({:.1}, {:.1}): gas {}",
                1.0 - a,
                a,
                yes_no(report.is_gas)
            );
            any_combo |= report.is_gas;
        }
    } else {
        let alpha = vec![1.0 / exp.gens.len() as f64; exp.gens.len()];
        let combo = convex_combine(&exp.gens, &alpha)?;
        let report = check_gas(&combo, target, tol)?;
        println!("uniform combination: gas {}", yes_no(report.is_gas));
        any_combo |= report.is_gas;
    }
    println!(
        "verdict: single-generator stabilization {}, fixed-mixture stabilization {}",
        yes_no(any_single),
        yes_no(any_combo)
    );
    Ok(())
}

fn cmd_certificate(config: PathBuf, retention: f64) -> Result<()> {
    let cfg = load_config(&config)?;
    let exp = build_experiment(&cfg)?;
    let tol = exp.invariant_tol;
    let alpha = vec![1.0 / exp.gens.len() as f64; exp.gens.len()];
    let combo = convex_combine(&exp.gens, &alpha)?;
    let built = construct_k(&combo, exp.cert.target(), tol)?;
    println!(
        "constructed certificate: dominant eigenvalue {:+.6}{:+.6}i, degenerate {}, perturbed {}",
        built.dominant_eigenvalue.re,
        built.dominant_eigenvalue.im,
        yes_no(built.degenerate),
        yes_no(built.perturbation_applied)
    );
    let drift = verify_assumption2(&built.certificate, &exp.gens, 200, 2024, tol)?;
    println!(
        "drift condition over 200 sampled states: {}",
        if drift.holds { "holds" } else { "FAILS" }
    );
    let bound = dwell_bound(&built.certificate, &exp.gens, &alpha, retention, tol)?;
    println!(
        "dwell bound: retention {}, k_c_min {:.6}, k2_max {:.6}, minimum dwell {:.6}",
        bound.r, bound.k_c_min, bound.k2_max, bound.bound
    );
    Ok(())
}

fn cmd_fixtures(out: PathBuf) -> Result<()> {
    let written = emit_fixtures(&out)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::CheckGas { config } => cmd_check_gas(config),
        Command::Certificate { config, retention } => cmd_certificate(config, retention),
        Command::Fixtures { out } => cmd_fixtures(out),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
