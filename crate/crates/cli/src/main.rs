//! Command-line front end: scenario parsing, measurement-file ingestion,
//! and reproducible curve/table emission.
//!
//! Exit codes: 0 success, 1 domain failure (no advantage, no resonance,
//! unreachable root), 2 malformed input.

use bosonbench::advantage;
use bosonbench::charfit;
use bosonbench::interference::LogBase;
use bosonbench::permanent;
use bosonbench::scenario::ScenarioFile;
use bosonbench::table::{format_f64, read_complex_matrix, CsvData, CurveTable};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "bosonbench",
    version,
    about = "Boson-sampling feasibility modeling and single-photon-source characterization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// Scenario JSON file; defaults apply when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Override the scenario's lower photon number.
    #[arg(long)]
    n_min: Option<usize>,
    /// Override the scenario's upper photon number.
    #[arg(long)]
    n_max: Option<usize>,
    /// Override the coupon-collector logarithm base.
    #[arg(long, value_enum)]
    log_base: Option<LogBaseArg>,
    /// Override the provenance seed recorded in outputs.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogBaseArg {
    Ln,
    Log2,
    Log10,
}

impl From<LogBaseArg> for LogBase {
    fn from(v: LogBaseArg) -> Self {
        match v {
            LogBaseArg::Ln => LogBase::Natural,
            LogBaseArg::Log2 => LogBase::Two,
            LogBaseArg::Log10 => LogBase::Ten,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Figure {
    Fig3d,
    Figs7,
    Figs8a,
    Figs8b,
    Figs9,
}

#[derive(Clone, Copy, ValueEnum)]
enum FitKind {
    Hom,
    Beta,
    Lifetime,
    Loss,
}

#[derive(Subcommand)]
enum Command {
    /// Print the permanent of a CSV matrix (complex cells as `a+bi`).
    Perm { matrix_file: PathBuf },
    /// Write figure-reproduction curve tables as CSV.
    Curves {
        #[arg(long, value_enum)]
        figure: Figure,
        /// Output directory (default: $BOSONBENCH_OUT_DIR or `.`).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Locate the quantum-advantage threshold (N*, eta*).
    Threshold {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Fit a measurement file and print the result as JSON.
    Fit {
        #[arg(long, value_enum)]
        kind: FitKind,
        #[arg(long)]
        data: PathBuf,
        /// JSON side parameters (interferometer calibration, fixed rates).
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Evaluate an efficiency-budget CSV.
    Budget { budget_file: PathBuf },
    /// Find cost-model constants that reproduce a target saturation onset.
    Calibrate {
        #[arg(long)]
        target_plateau: usize,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

enum Failure {
    Domain(String),
    Input(String),
}

impl From<bosonbench::Error> for Failure {
    fn from(e: bosonbench::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Perm { matrix_file } => cmd_perm(&matrix_file),
        Command::Curves {
            figure,
            out_dir,
            scenario,
        } => cmd_curves(figure, out_dir, &scenario),
        Command::Threshold { scenario } => cmd_threshold(&scenario),
        Command::Fit { kind, data, params } => cmd_fit(kind, &data, params.as_deref()),
        Command::Budget { budget_file } => cmd_budget(&budget_file),
        Command::Calibrate {
            target_plateau,
            scenario,
        } => cmd_calibrate(target_plateau, &scenario),
    }
}

fn load_scenario(args: &ScenarioArgs) -> Result<ScenarioFile, Failure> {
    let mut file = match &args.scenario {
        Some(path) => ScenarioFile::read(path)?,
        None => ScenarioFile::default(),
    };
    if let Some(n) = args.n_min {
        file.n_min = n;
    }
    if let Some(n) = args.n_max {
        file.n_max = n;
    }
    if let Some(base) = args.log_base {
        file.log_base = base.into();
    }
    if let Some(seed) = args.seed {
        file.seed = seed;
    }
    file.validate()?;
    Ok(file)
}

fn cmd_perm(path: &Path) -> CliResult {
    let text = std::fs::read_to_string(path).map_err(bosonbench::Error::from)?;
    let matrix = read_complex_matrix(&text)?;
    let n = matrix.n();
    let start = std::time::Instant::now();
    let (value, engine) = if n <= permanent::NAIVE_CAP {
        (permanent::perm_naive(&matrix)?, "naive")
    } else {
        (permanent::perm_ryser(&matrix)?, "ryser")
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let magnitude = value.norm();
    let log_normalized = if magnitude == 0.0 {
        f64::NEG_INFINITY
    } else {
        magnitude.ln() - bosonbench::ln_factorial(n)
    };
    println!("n: {n}");
    println!("engine: {engine}");
    println!("perm: {}", bosonbench::matrix::format_complex(value));
    println!(
        "perm/n!: {}",
        bosonbench::matrix::format_complex(value * (-bosonbench::ln_factorial(n)).exp())
    );
    println!("log|perm/n!|: {}", format_f64(log_normalized));
    println!("wall_time_ms: {elapsed_ms:.3}");
    Ok(())
}

fn out_dir_or_default(out_dir: Option<PathBuf>) -> PathBuf {
    out_dir
        .or_else(|| std::env::var_os("BOSONBENCH_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_table(dir: &Path, name: &str, table: &CurveTable) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(dir).map_err(bosonbench::Error::from)?;
    let path = dir.join(name);
    table.write_to(&path)?;
    Ok(path)
}

fn seeded_meta(table: &mut CurveTable, file: &ScenarioFile) {
    table.push_meta("seed", file.seed);
}

fn cmd_curves(figure: Figure, out_dir: Option<PathBuf>, args: &ScenarioArgs) -> CliResult {
    let file = load_scenario(args)?;
    let sc = file.scenario();
    let dir = out_dir_or_default(out_dir);
    let sources = file.sources_or_default();
    let (lo, hi) = (file.n_min, file.n_max);
    let mut written = Vec::new();
    match figure {
        Figure::Figs7 => {
            let mut t = advantage::curve_min_hardness(&sc, lo, hi)?;
            seeded_meta(&mut t, &file);
            written.push(write_table(&dir, "figS7.csv", &t)?);
        }
        Figure::Figs8a => {
            let mut t = advantage::curve_truncation_order(&sc, lo, hi)?;
            seeded_meta(&mut t, &file);
            written.push(write_table(&dir, "figS8a.csv", &t)?);
        }
        Figure::Figs8b => {
            let mut t = advantage::curve_ceiling_vs_experiment(&sc, lo, hi)?;
            seeded_meta(&mut t, &file);
            written.push(write_table(&dir, "figS8b.csv", &t)?);
        }
        Figure::Fig3d => {
            let mut t = advantage::curve_distance_and_floor(&sc, &sources, lo, hi)?;
            seeded_meta(&mut t, &file);
            written.push(write_table(&dir, "fig3d.csv", &t)?);
        }
        Figure::Figs9 => {
            let mut a = advantage::curve_distances(&sc, &sources, lo, hi)?;
            seeded_meta(&mut a, &file);
            written.push(write_table(&dir, "figS9a.csv", &a)?);
            let mut b = advantage::curve_separations(&sc, &sources, lo, hi)?;
            seeded_meta(&mut b, &file);
            written.push(write_table(&dir, "figS9b.csv", &b)?);
        }
    }
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_threshold(args: &ScenarioArgs) -> CliResult {
    let file = load_scenario(args)?;
    let sc = file.scenario();
    let result = advantage::advantage_threshold(&sc, file.n_min, file.n_max)?;
    println!("scenario: {}", sc.to_json_line());
    println!("n_range: [{}, {}]", file.n_min, file.n_max);
    match result.crossing {
        Some(c) => {
            println!("N*: {}", c.n_star);
            println!("eta*: {}", format_f64(c.eta_star));
            println!("classical_ceiling_at_N*: {}", format_f64(c.ceiling_at_star));
            Ok(())
        }
        None => Err(Failure::Domain(
            bosonbench::Error::NoAdvantageInRange(file.n_min, file.n_max).to_string(),
        )),
    }
}

#[derive(serde::Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct FitParams {
    r: Option<f64>,
    t: Option<f64>,
    epsilon: Option<f64>,
    g2: Option<f64>,
    gamma_ghz: Option<f64>,
    irf_sigma_ns: Option<f64>,
}

fn read_params(path: Option<&Path>) -> Result<FitParams, Failure> {
    match path {
        None => Ok(FitParams::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(bosonbench::Error::from)?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::Input(format!("params file: {e}")))
        }
    }
}

fn cmd_fit(kind: FitKind, data: &Path, params: Option<&Path>) -> CliResult {
    let params = read_params(params)?;
    let output = match kind {
        FitKind::Hom => {
            let csv = CsvData::read(data)?;
            let (r, t) = (params.r.unwrap_or(0.5), params.t.unwrap_or(0.5));
            let (eps, g2) = (params.epsilon.unwrap_or(0.0), params.g2.unwrap_or(0.0));
            let scan = charfit::hom_scan_from_csv(&csv, r, t, eps, g2)?;
            let fit = charfit::fit_hom_scan(&scan)?;
            let corrected = charfit::corrected_visibility(fit.v_raw, g2, r, t, eps)?;
            let mut warnings = Vec::new();
            if scan.splitter_imbalanced() {
                warnings.push(format!(
                    "beam splitter R + T = {} deviates more than 1% from 1",
                    r + t
                ));
            }
            if corrected.over_unity {
                warnings.push(format!(
                    "corrected visibility {} exceeds 1; reported unclipped",
                    corrected.value
                ));
            }
            serde_json::json!({
                "kind": "hom",
                "parameters": {
                    "a_m": fit.a_m,
                    "a_c": fit.a_c,
                    "phi_deg": fit.phi_deg,
                    "v_raw": fit.v_raw,
                    "v_corrected": corrected.value,
                },
                "residual_norm": fit.residual_norm,
                "warnings": warnings,
            })
        }
        FitKind::Beta => {
            let gamma = params.gamma_ghz.ok_or_else(|| {
                Failure::Input("beta fit needs `gamma_ghz` in the params file".into())
            })?;
            let csv = CsvData::read(data)?;
            let scan = charfit::transmission_scan_from_csv(&csv)?;
            let fit = charfit::fit_beta(&scan, gamma)?;
            serde_json::json!({
                "kind": "beta",
                "parameters": {
                    "beta": fit.beta,
                    "gamma_d_ghz": fit.gamma_d,
                    "chi": fit.chi,
                    "resonance_offset_ghz": fit.resonance_offset,
                },
                "uncertainties": { "beta": fit.beta_uncertainty },
                "residual_norm": fit.residual_norm,
                "warnings": [],
            })
        }
        FitKind::Lifetime => {
            let csv = CsvData::read(data)?;
            let irf = params.irf_sigma_ns.unwrap_or(0.0);
            let hist = charfit::decay_histogram_from_csv(&csv, irf)?;
            let fit = charfit::fit_lifetime(&hist)?;
            serde_json::json!({
                "kind": "lifetime",
                "parameters": {
                    "gamma_per_ns": fit.gamma_per_ns,
                    "amplitude": fit.amplitude,
                    "offset": fit.offset,
                    "t0_ns": fit.t0_ns,
                },
                "residual_norm": fit.residual_norm,
                "warnings": [],
            })
        }
        FitKind::Loss => {
            let csv = CsvData::read(data)?;
            let points = charfit::loss_points_from_csv(&csv)?;
            let loss = charfit::fit_propagation_loss(&points)?;
            serde_json::json!({
                "kind": "loss",
                "parameters": { "loss_db_per_mm": loss },
                "warnings": [],
            })
        }
    };
    println!("{}", serde_json::to_string_pretty(&output).expect("json"));
    Ok(())
}

fn cmd_budget(path: &Path) -> CliResult {
    let text = std::fs::read_to_string(path).map_err(bosonbench::Error::from)?;
    let budget = charfit::EfficiencyBudget::parse_csv(&text)?;
    let (rate, unc) = budget.expected_rate()?;
    let name_width = budget
        .stages
        .iter()
        .map(|s| s.name.len())
        .max()
        .unwrap_or(5)
        .max(5);
    println!(
        "{:<name_width$}  {:>10}  {:>11}  {:>10}",
        "stage", "efficiency", "uncertainty", "cumulative"
    );
    let mut cumulative = 1.0;
    for s in &budget.stages {
        cumulative *= s.efficiency;
        println!(
            "{:<name_width$}  {:>10}  {:>11}  {:>10.6}",
            s.name, s.efficiency, s.uncertainty, cumulative
        );
    }
    println!("rep_rate_hz: {}", format_f64(budget.rep_rate_hz));
    println!(
        "expected_rate_hz: {} +- {}",
        format_f64(rate),
        format_f64(unc)
    );
    println!(
        "expected_rate_mhz: {:.2} +- {:.2}",
        rate / 1e6,
        unc / 1e6
    );
    Ok(())
}

fn cmd_calibrate(target: usize, args: &ScenarioArgs) -> CliResult {
    let file = load_scenario(args)?;
    let sc = file.scenario();
    let cal = advantage::calibrate_cost(&sc, target, file.n_max.max(target + 20))?;
    println!("target_onset: {target}");
    println!("cost_a: {}", format_f64(sc.cost_model.a));
    println!("cost_c: {}", format_f64(cal.c));
    println!(
        "cost_c_range: ({}, {}]",
        format_f64(cal.c_lo),
        format_f64(cal.c_hi)
    );
    println!("achieved_onset: {}", cal.achieved_onset);
    Ok(())
}
