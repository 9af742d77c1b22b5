//! `phipsim` command-line front end.
//!
//! Exit codes: 0 success, 1 a reproduction row missed its tolerance,
//! 2 usage, input or I/O error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use phipsim::analysis::{effective_conditions, EntanglementReport};
use phipsim::seq::{compile, parse};
use phipsim::spectro::{
    calibrate_ratio, fourier, j_double, multiplet_regions, render_svg, simulate_calibration, synthesize_fid,
    NoiseSpec, Panel, ReadoutConfig,
};
use phipsim::state::{make_named_state, make_pseudo_pure, make_singlet, make_thermal, StateDump};
use phipsim::{DensityMatrix, SpinSystemParams, ThermalMode};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] phipsim::Error),
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "phipsim", version, about = "Two-spin parahydrogen state simulator")]
struct Cli {
    #[command(flatten)]
    globals: Globals,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Globals {
    /// Larmor frequency (Hz)
    #[arg(long, global = true)]
    nu_hz: Option<f64>,
    /// Chemical-shift difference between the two spins (Hz)
    #[arg(long, global = true)]
    delta_nu_hz: Option<f64>,
    /// Scalar coupling (Hz)
    #[arg(long, global = true)]
    j_hz: Option<f64>,
    /// Sample temperature (K)
    #[arg(long, global = true)]
    temp_k: Option<f64>,
    #[arg(long, global = true)]
    t1_s: Option<f64>,
    #[arg(long, global = true)]
    t2_s: Option<f64>,
    /// Fraction of the sample inside the coil
    #[arg(long, global = true)]
    f_active: Option<f64>,
    /// Seed for every random draw
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Globals {
    fn params(&self) -> CliResult<SpinSystemParams> {
        let mut p = SpinSystemParams::default();
        let overrides = [
            (&mut p.nu_hz, self.nu_hz),
            (&mut p.delta_nu_hz, self.delta_nu_hz),
            (&mut p.j_hz, self.j_hz),
            (&mut p.temp_k, self.temp_k),
            (&mut p.t1_s, self.t1_s),
            (&mut p.t2_s, self.t2_s),
            (&mut p.f_active, self.f_active),
        ];
        for (field, value) in overrides {
            if let Some(v) = value {
                *field = v;
            }
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a state as JSON: a name, `pseudo:EPS`, `thermal` or `thermal-exact`
    State { spec: String },
    /// Run a .pseq file on an initial state and write the results to --out
    Run {
        sequence: PathBuf,
        /// State spec (as for `state`) or a state JSON file
        #[arg(long, default_value = "singlet")]
        initial: String,
        /// Rounds of J-doubling applied before the transform
        #[arg(long, default_value_t = 0)]
        j_double: u32,
        /// Exponential line broadening (Hz)
        #[arg(long, default_value_t = 0.0)]
        apodize_hz: f64,
        /// Standard deviation of added complex FID noise
        #[arg(long, default_value_t = 0.0)]
        noise_sigma: f64,
    },
    /// Entanglement report for a state JSON file
    Analyze { state: PathBuf },
    /// Polarization from a measured enhancement ratio or a simulated readout
    Calibrate {
        /// Measured raw enhancement ratio
        #[arg(long, conflicts_with = "simulate")]
        ratio: Option<f64>,
        /// Simulate the readout of a pseudo-pure singlet of this polarization
        #[arg(long)]
        simulate: Option<f64>,
        /// Number of thermal scans the reference is normalized to
        #[arg(long, default_value_t = 3072e3)]
        scan_norm: f64,
        #[arg(long, default_value_t = 0.0)]
        noise_sigma: f64,
    },
    /// Recompute the reference table and compare within tolerance
    PaperRepro,
}

fn initial_state(spec: &str, params: &SpinSystemParams) -> CliResult<DensityMatrix> {
    if spec.ends_with(".json") {
        let text = read(Path::new(spec))?;
        return Ok(StateDump::from_json(&text)?.to_state()?);
    }
    if let Some(eps) = spec.strip_prefix("pseudo:") {
        let eps: f64 = eps
            .parse()
            .map_err(|_| CliError::Usage(format!("bad polarization in `{spec}`")))?;
        return Ok(make_pseudo_pure(eps, &make_singlet())?);
    }
    match spec {
        "thermal" => Ok(make_thermal(params, ThermalMode::Linearized)?),
        "thermal-exact" => Ok(make_thermal(params, ThermalMode::Exact)?),
        name => Ok(make_named_state(name)?),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io { path: path.clone(), source })?;
    info!("wrote {}", path.display());
    Ok(())
}

fn out_dir(globals: &Globals) -> CliResult<Option<PathBuf>> {
    let Some(dir) = &globals.out else { return Ok(None) };
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
    Ok(Some(dir.clone()))
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn cmd_state(globals: &Globals, spec: &str) -> CliResult<ExitCode> {
    let rho = initial_state(spec, &globals.params()?)?;
    let text = pretty(&rho.to_dump());
    match out_dir(globals)? {
        Some(dir) => write(&dir, "state.json", &text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_analyze(globals: &Globals, path: &Path) -> CliResult<ExitCode> {
    let rho = StateDump::from_json(&read(path)?)?.to_state()?;
    let text = pretty(&EntanglementReport::from_state(&rho));
    if let Some(dir) = out_dir(globals)? {
        write(&dir, "report.json", &text)?;
    }
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}

struct RunOptions<'a> {
    sequence: &'a Path,
    initial: &'a str,
    j_double: u32,
    apodize_hz: f64,
    noise_sigma: f64,
}

fn cmd_run(globals: &Globals, opts: &RunOptions) -> CliResult<ExitCode> {
    let dir = out_dir(globals)?.ok_or_else(|| CliError::Usage("run needs --out DIR".into()))?;
    if !(opts.noise_sigma >= 0.0 && opts.noise_sigma.is_finite()) {
        return Err(CliError::Usage(format!("noise sigma {} must be ≥ 0", opts.noise_sigma)));
    }
    let base = globals.params()?;
    let source = read(opts.sequence)?;
    let ast = parse(&source).map_err(|e| CliError::Usage(format!("{}: {e}", opts.sequence.display())))?;
    let compiled = compile(&ast, &base)?;
    let params = compiled.program.params;
    let rho0 = initial_state(opts.initial, &params)?;
    let rho = compiled.program.apply(&rho0)?;

    let default_cfg = ReadoutConfig::for_params(&params);
    let (n, dwell) = compiled
        .acquisition
        .map_or((default_cfg.n_points, default_cfg.dwell_s), |a| (a.n_points, a.dwell_s));
    let mut fid = synthesize_fid(&rho, &params, n, dwell)?;
    if opts.noise_sigma > 0.0 {
        fid = fid.with_noise(opts.noise_sigma, &mut phipsim::random::seeded(globals.seed))?;
    }
    if opts.j_double > 0 {
        fid = j_double(&fid, params.j_hz, opts.j_double)?;
    }
    let spectrum = fourier(&fid, opts.apodize_hz);
    let (lo, hi) = spectrum.axis_range();
    let mut panels = vec![Panel { title: "full spectrum".into(), lo_hz: lo, hi_hz: hi }];
    for ((a, b), name) in multiplet_regions(&params).into_iter().zip(["spin I", "spin S"]) {
        let pad = 0.1 * (b - a);
        panels.push(Panel {
            title: name.into(),
            lo_hz: (a - pad).max(lo),
            hi_hz: (b + pad).min(hi),
        });
    }

    let report = EntanglementReport::from_state(&rho);
    let mut hasher = Sha256::new();
    hasher.update(source.as_bytes());
    hasher.update(opts.initial.as_bytes());
    hasher.update(serde_json::to_vec(&params).expect("serializable"));
    hasher.update(globals.seed.to_le_bytes());
    hasher.update(opts.j_double.to_le_bytes());
    hasher.update(opts.apodize_hz.to_le_bytes());
    hasher.update(opts.noise_sigma.to_le_bytes());
    let run_id = hex(&hasher.finalize()[..8]);

    let manifest = json!({
        "run_id": run_id,
        "version": env!("CARGO_PKG_VERSION"),
        "sequence": opts.sequence.display().to_string(),
        "sequence_sha256": hex(&Sha256::digest(source.as_bytes())),
        "initial": opts.initial,
        "seed": globals.seed,
        "params": params,
        "acquisition": { "n_points": n, "dwell_s": dwell, "from_sequence": compiled.acquisition.is_some() },
        "processing": {
            "j_doubling_rounds": opts.j_double,
            "apodize_hz": opts.apodize_hz,
            "noise_sigma": opts.noise_sigma,
        },
        "derived": {
            "trace": rho.trace(),
            "purity": rho.purity(),
            "bell": report.bell,
            "off_bell": report.off_bell,
            "min_pt_eigenvalue": report.min_pt_eigenvalue,
            "entangled": report.entangled,
            "concurrence": report.concurrence,
            "eof": report.eof,
            "peak_hz": spectrum.peak_hz(),
        },
        "files": ["final_state.json", "fid.csv", "spectrum.csv", "spectrum.svg", "manifest.json"],
    });

    write(&dir, "final_state.json", &pretty(&rho.to_dump()))?;
    write(&dir, "fid.csv", &fid.to_csv())?;
    write(&dir, "spectrum.csv", &spectrum.to_csv())?;
    write(&dir, "spectrum.svg", &render_svg(&spectrum, &panels, params.nu_hz, 0.0))?;
    write(&dir, "manifest.json", &pretty(&manifest))?;
    println!("run {run_id}: wrote {}", dir.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_calibrate(
    globals: &Globals,
    ratio: Option<f64>,
    simulate: Option<f64>,
    scan_norm: f64,
    noise_sigma: f64,
) -> CliResult<ExitCode> {
    let params = globals.params()?;
    let result = match (ratio, simulate) {
        (Some(r), None) => calibrate_ratio(r, params.f_active, 2.0 / params.b_factor())?,
        (None, Some(eps)) => {
            let noise = (noise_sigma > 0.0).then_some(NoiseSpec { sigma: noise_sigma, seed: globals.seed });
            simulate_calibration(eps, &params, &ReadoutConfig::for_params(&params), scan_norm, noise)?
        }
        _ => return Err(CliError::Usage("calibrate needs exactly one of --ratio or --simulate".into())),
    };
    let conditions = effective_conditions(result.epsilon, &params).ok();
    let text = pretty(&json!({ "calibration": result, "conditions": conditions }));
    if let Some(dir) = out_dir(globals)? {
        write(&dir, "calibration.json", &text)?;
    }
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_paper_repro(globals: &Globals) -> CliResult<ExitCode> {
    let table = phipsim::repro::run(&globals.params()?)?;
    let text = table.to_text();
    if let Some(dir) = out_dir(globals)? {
        write(&dir, "repro.json", &pretty(&table))?;
        write(&dir, "repro.txt", &text)?;
    }
    print!("{text}");
    Ok(if table.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn dispatch(cli: &Cli) -> CliResult<ExitCode> {
    let g = &cli.globals;
    match &cli.command {
        Command::State { spec } => cmd_state(g, spec),
        Command::Run { sequence, initial, j_double, apodize_hz, noise_sigma } => cmd_run(
            g,
            &RunOptions {
                sequence,
                initial,
                j_double: *j_double,
                apodize_hz: *apodize_hz,
                noise_sigma: *noise_sigma,
            },
        ),
        Command::Analyze { state } => cmd_analyze(g, state),
        Command::Calibrate { ratio, simulate, scan_norm, noise_sigma } => {
            cmd_calibrate(g, *ratio, *simulate, *scan_norm, *noise_sigma)
        }
        Command::PaperRepro => cmd_paper_repro(g),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
