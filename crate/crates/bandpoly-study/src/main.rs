use bandpoly_study::audit::Status;
use bandpoly_study::study::{write_exact_csv, write_pred_csv, write_rows_csv};
use bandpoly_study::{
    figure_config, figure_file_name, run_audits, run_exact, run_predict, run_study, StudyConfig, StudyError,
    FIGURE_GAMMAS,
};
use clap::{Parser, Subcommand};
use serde::Serialize;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bandpoly", version, about = "Exact and asymptotic recurrence coefficients on several intervals")]
struct Cli {
    /// Output directory; overrides `[output] dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; all cores by default.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for the random audit points.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print the JSON result on stdout instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a config and exit.
    Validate { cfg: PathBuf },
    /// Exact coefficients to exact.csv.
    Exact { cfg: PathBuf },
    /// Predicted coefficients to predict.csv.
    Predict { cfg: PathBuf },
    /// Full comparison to study.csv and report.json.
    Study { cfg: PathBuf },
    /// Invariant audits to audit.json.
    Audit { cfg: PathBuf },
    /// The two perturbed Chebyshev studies (γ = 3/2 and 2) as CSV.
    Figures { cfg: PathBuf },
}

enum Failure {
    Audit,
    Err(StudyError),
}

impl From<StudyError> for Failure {
    fn from(e: StudyError) -> Self {
        Failure::Err(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Audit) => ExitCode::from(2),
        Err(Failure::Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, StudyError::Config(_)) { 3 } else { 1 })
        }
    }
}

fn out_dir(cli: &Cli, cfg: &StudyConfig) -> Result<PathBuf, StudyError> {
    let dir = cli.out.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, StudyError> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn emit_json<T: Serialize>(cli: &Cli, dir: Option<&Path>, name: &str, value: &T) -> Result<(), StudyError> {
    if let Some(dir) = dir {
        serde_json::to_writer_pretty(create(dir, name)?, value)?;
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(value)?);
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.cmd {
        Cmd::Validate { cfg } => {
            let c = StudyConfig::load(cfg)?;
            if cli.json {
                emit_json(cli, None, "", &c)?;
            } else {
                println!(
                    "ok: {} band(s), {} mass(es), n in [{}, {}] step {}, {} nodes per rule",
                    c.measure.bands.len(),
                    c.measure.masses.len(),
                    c.study.n_min,
                    c.study.n_max,
                    c.study.n_step,
                    c.quadrature_size()
                );
            }
        }
        Cmd::Exact { cfg } => {
            let c = StudyConfig::load(cfg)?;
            let dir = out_dir(cli, &c)?;
            let rows = run_exact(&c)?;
            write_exact_csv(&rows, create(&dir, "exact.csv")?)?;
            emit_json(cli, None, "", &rows)?;
            if !cli.json {
                println!("wrote {} rows to {}", rows.len(), dir.join("exact.csv").display());
            }
        }
        Cmd::Predict { cfg } => {
            let c = StudyConfig::load(cfg)?;
            let dir = out_dir(cli, &c)?;
            let rows = run_predict(&c)?;
            write_pred_csv(&rows, create(&dir, "predict.csv")?)?;
            emit_json(cli, None, "", &rows)?;
            if !cli.json {
                let skipped = rows.iter().filter(|r| r.skip_reason.is_some()).count();
                println!("wrote {} rows ({skipped} skipped) to {}", rows.len(), dir.join("predict.csv").display());
            }
        }
        Cmd::Study { cfg } => {
            let c = StudyConfig::load(cfg)?;
            let dir = out_dir(cli, &c)?;
            let rep = run_study(&c, cli.seed)?;
            write_rows_csv(&rep.rows, create(&dir, "study.csv")?)?;
            emit_json(cli, Some(&dir), "report.json", &rep)?;
            if !cli.json {
                println!("wrote {} and {}", dir.join("study.csv").display(), dir.join("report.json").display());
                for (name, f) in [("err_a", &rep.fits.err_a), ("err_b", &rep.fits.err_b)] {
                    match f.fitted() {
                        Some(f) => println!("{name}: slope {:.4} ± {:.4} over {} points", f.slope, f.stderr, f.points),
                        None => println!("{name}: no fit ({f:?})"),
                    }
                }
            }
            if let Some(a) = &rep.audits {
                if !cli.json {
                    print_audits(a);
                }
                if !a.passed() {
                    return Err(Failure::Audit);
                }
            }
        }
        Cmd::Audit { cfg } => {
            let mut c = StudyConfig::load(cfg)?;
            if c.study.audits.is_empty() {
                c.study.audits = bandpoly_study::config::SUITES.iter().map(|s| s.to_string()).collect();
            }
            let dir = out_dir(cli, &c)?;
            let rep = run_audits(&c, None, cli.seed)?;
            emit_json(cli, Some(&dir), "audit.json", &rep)?;
            if !cli.json {
                print_audits(&rep);
            }
            if !rep.passed() {
                return Err(Failure::Audit);
            }
        }
        Cmd::Figures { cfg } => {
            let c = StudyConfig::load(cfg)?;
            let dir = out_dir(cli, &c)?;
            let mut fits = Vec::new();
            for gamma in FIGURE_GAMMAS {
                let fc = figure_config(&c, gamma);
                let rep = run_study(&fc, cli.seed)?;
                let name = figure_file_name(gamma);
                write_rows_csv(&rep.rows, create(&dir, &name)?)?;
                if !cli.json {
                    let slope = rep.fits.err_b.fitted().map(|f| format!("{:.4}", f.slope)).unwrap_or("n/a".into());
                    println!("gamma {gamma}: {} (err_b slope {slope})", dir.join(&name).display());
                }
                fits.push(serde_json::json!({ "gamma": gamma, "csv": name, "fits": rep.fits }));
            }
            emit_json(cli, None, "", &fits)?;
        }
    }
    Ok(())
}

fn print_audits(rep: &bandpoly_study::AuditReport) {
    for s in &rep.suites {
        let tag = match s.status {
            Status::Passed => "PASS",
            Status::Failed => "FAIL",
            Status::Skipped => "SKIP",
        };
        match &s.reason {
            Some(r) => println!("{tag} {} ({r})", s.name),
            None => println!("{tag} {}", s.name),
        }
        for ch in &s.checks {
            let mark = if ch.passed { "ok " } else { "BAD" };
            println!("  {mark} {:<24} {:>10.3e} < {:.1e}", ch.name, ch.residual, ch.tolerance);
        }
    }
}
