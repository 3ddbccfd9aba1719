use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use czlab::commutator::{apply_t, apply_tj, apply_tj_nu, apply_tjn, CommutatorParams};
use czlab::czd::{cz_decompose, exceptional_set};
use czlab::grid::io::{write_grid, write_slice_csv};
use czlab::grid::{norm, GridFunction, Norm};
use czlab::harness::{generate_input, registry, run_experiment, verify_claim, ClaimReport, ExperimentConfig};
use czlab::microlocal::DirectionNet;
use czlab::{CzError, Result};

#[derive(Parser)]
#[command(name = "czlab", version, about = "Commutator and Calderon-Zygmund decomposition workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List registered claims.
    ListClaims,
    /// Verify one claim and print its verdict.
    Verify {
        #[arg(long)]
        claim: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for the JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify every registered claim (or the configured list without `--all`).
    Sweep {
        #[arg(long)]
        all: bool,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full pipeline described by a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decompose the configured input and write the certificate.
    Decompose {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply the truncated commutator to the configured input.
    Apply {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply `T_j`, or `T_j^n` when `--n` is given.
    ApplyDyadic {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        j: i32,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply the sector piece `T_j^{n,nu}` for one net direction.
    ApplySector {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        j: i32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        nu: usize,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the direction net as CSV.
    Net {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(config: Option<&Path>) -> Result<ExperimentConfig> {
    match config {
        Some(p) => ExperimentConfig::load(p),
        None => Ok(ExperimentConfig::default()),
    }
}

fn mkdir(p: &Path) -> Result<()> {
    fs::create_dir_all(p).map_err(|e| CzError::Io { path: p.to_path_buf(), source: e })
}

fn write(p: &Path, s: String) -> Result<()> {
    fs::write(p, s).map_err(|e| CzError::Io { path: p.to_path_buf(), source: e })
}

fn report(rep: &ClaimReport, out: Option<&Path>) -> Result<bool> {
    for line in rep.summary_lines() {
        println!("{line}");
    }
    println!("{} {}", rep.claim_id, if rep.verdict { "PASS" } else { "FAIL" });
    if let Some(dir) = out {
        mkdir(dir)?;
        write(&dir.join(format!("{}.json", rep.claim_id)), rep.to_json()?)?;
    }
    Ok(rep.verdict)
}

fn operator(cfg: &ExperimentConfig) -> Result<(CommutatorParams, GridFunction)> {
    let spec = cfg.grid_spec()?;
    let a = cfg.a_field.sample(&spec)?;
    let op = CommutatorParams::new(cfg.kernel_spec()?, a, cfg.m_s, cfg.r)?.with_mollify(cfg.mollify);
    let f = generate_input(&cfg.input, &spec)?.f;
    Ok((op, f))
}

fn save_output(g: &GridFunction, out: &Path, name: &str) -> Result<()> {
    mkdir(out)?;
    write_grid(&out.join(format!("{name}.toml")), g)?;
    let csv = out.join(format!("{name}_slice_axis0.csv"));
    let file = fs::File::create(&csv).map_err(|e| CzError::Io { path: csv.clone(), source: e })?;
    write_slice_csv(g, 0, 0, file).map_err(|e| CzError::Io { path: csv, source: e })?;
    println!("{name}: L1 {:.6e}, L2 {:.6e}, Linf {:.6e}", norm(g, Norm::L1), norm(g, Norm::L2), norm(g, Norm::Linf));
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::ListClaims => {
            for c in registry() {
                println!("{:<22} {}", c.id, c.description);
            }
            Ok(true)
        }
        Command::Verify { claim, config, out } => {
            let cfg = load(config.as_deref())?;
            report(&verify_claim(&claim, &cfg)?, out.as_deref())
        }
        Command::Sweep { all, config, out } => {
            let cfg = load(config.as_deref())?;
            let ids: Vec<String> =
                if all { registry().iter().map(|c| c.id.to_string()).collect() } else { cfg.claims.clone() };
            let mut ok = true;
            for id in ids {
                ok &= report(&verify_claim(&id, &cfg)?, out.as_deref())?;
            }
            Ok(ok)
        }
        Command::Run { config, out } => {
            let summary = run_experiment(&config, &out)?;
            for (id, pass) in &summary.verdicts {
                println!("{id} {}", if *pass { "PASS" } else { "FAIL" });
            }
            println!("reports written to {}", summary.out_dir.display());
            Ok(summary.all_pass())
        }
        Command::Decompose { config, out } => {
            let cfg = load(config.as_deref())?;
            let spec = cfg.grid_spec()?;
            let gen = generate_input(&cfg.input, &spec)?;
            let lambda = cfg.lambda.or(gen.lambda_hint).unwrap_or(4.0 / spec.volume());
            let dec = cz_decompose(&gen.f, lambda, cfg.dilate)?;
            mkdir(&out)?;
            let path = out.join("decomposition.json");
            let file = fs::File::create(&path).map_err(|e| CzError::Io { path: path.clone(), source: e })?;
            dec.write_certificate(file)?;
            let check = dec.check(&gen.f)?;
            println!(
                "lambda {lambda:.6e}: {} cubes, |E| = {:.6e}, invariants {}",
                dec.atoms.len(),
                exceptional_set(&dec).measure,
                if check.passed() { "hold" } else { "FAIL" }
            );
            for f in &check.failures {
                println!("  {f}");
            }
            Ok(check.passed())
        }
        Command::Apply { config, out } => {
            let cfg = load(config.as_deref())?;
            let (op, f) = operator(&cfg)?;
            save_output(&apply_t(&op, &f)?, &out, "tf")?;
            Ok(true)
        }
        Command::ApplyDyadic { config, j, n, eps, out } => {
            let cfg = load(config.as_deref())?;
            let (op, f) = operator(&cfg)?;
            let g = match n {
                Some(n) => apply_tjn(&op, &f, j, n, eps)?,
                None => apply_tj(&op, &f, j)?,
            };
            save_output(&g, &out, "tjf")?;
            Ok(true)
        }
        Command::ApplySector { config, j, n, nu, eps, out } => {
            let cfg = load(config.as_deref())?;
            let (op, f) = operator(&cfg)?;
            let net = DirectionNet::build(n, cfg.gamma, cfg.grid.d)?;
            save_output(&apply_tj_nu(&op, &f, j, n, eps, &net, nu)?, &out, "tjnuf")?;
            Ok(true)
        }
        Command::Net { n, gamma, d, out } => {
            let net = DirectionNet::build(n, gamma, d)?;
            let file = fs::File::create(&out).map_err(|e| CzError::Io { path: out.clone(), source: e })?;
            net.write_csv(file).map_err(|e| CzError::Io { path: out.clone(), source: e })?;
            println!("{} directions, separation {:.6e}", net.len(), net.min_separation());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
