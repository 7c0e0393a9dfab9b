use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use enteff_core::choi::{choi_gate_model, load_choi};
use enteff_core::measures::{analyze, negativity, MeasureReport, SearchConfig};
use enteff_core::qmath::{density_from_vector, product_state_vector, ComplexMatrix, DensityMatrix, ProductStateParams};
use enteff_core::sweep::{
    fmt_f64, run_state_sweep, run_sweep, write_state_csv, write_sweep_csv, GateKind, StateSweepRequest, SweepRequest,
    SweepVariable,
};
use enteff_core::Error;
use num_complex::Complex64 as C64;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "enteff", version, about = "Entangling power and efficiency of probabilistic two-qubit gates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep a gate parameter and emit E_p, E_eff and argmax states as CSV
    Sweep(SweepArgs),
    /// Fix a gate and vary the first qubit's theta1
    StateSweep(StateSweepArgs),
    /// Negativity of a two-qubit state
    Negativity(NegativityArgs),
    /// Entangling power and efficiency of a channel given as a Choi file
    ChoiAnalyze(ChoiArgs),
}

#[derive(Args, Debug, Clone)]
struct SearchArgs {
    /// Grid points per angle
    #[arg(long, default_value_t = 15)]
    grid: usize,
    /// Skip local refinement of the grid optimum
    #[arg(long)]
    no_refine: bool,
    /// Search real amplitudes only (phi1 = phi2 = 0)
    #[arg(long)]
    reduced: bool,
    /// Evaluate the grid on the calling thread
    #[arg(long)]
    serial: bool,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            grid_points_per_angle: self.grid,
            refine: !self.no_refine,
            reduced_phase_search: self.reduced,
            parallel: !self.serial,
            ..SearchConfig::default()
        }
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// bs, cphase, generalized or choi:<path>
    #[arg(long)]
    gate: String,
    /// transmittance, phase or theta1
    #[arg(long)]
    var: String,
    /// lo:hi, angles may use pi (e.g. 0:pi, pi/4:3pi/4)
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    range: (f64, f64),
    #[arg(long, default_value_t = 51)]
    steps: usize,
    #[command(flatten)]
    search: SearchArgs,
    /// Write CSV here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StateSweepArgs {
    /// bs, cphase, generalized or choi:<path>
    #[arg(long)]
    gate: String,
    #[arg(long, value_parser = parse_angle, default_value = "pi", allow_hyphen_values = true)]
    phase: f64,
    #[arg(long, default_value_t = 0.5)]
    transmittance: f64,
    #[arg(long, value_parser = parse_angle, default_value = "pi/4", allow_hyphen_values = true)]
    theta2: f64,
    #[arg(long, value_parser = parse_angle, default_value = "0", allow_hyphen_values = true)]
    phi1: f64,
    #[arg(long, value_parser = parse_angle, default_value = "0", allow_hyphen_values = true)]
    phi2: f64,
    /// theta1 range lo:hi within [0, pi/2]
    #[arg(long, value_parser = parse_range, default_value = "0:pi/2", allow_hyphen_values = true)]
    range: (f64, f64),
    #[arg(long, default_value_t = 91)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct NegativityArgs {
    /// theta1 phi1 theta2 phi2 of a product input
    #[arg(long, num_args = 4, value_parser = parse_angle, allow_hyphen_values = true)]
    angles: Option<Vec<f64>>,
    /// 16 row-major density entries, each re or re,im
    #[arg(long, num_args = 16, value_parser = parse_entry, allow_hyphen_values = true)]
    density: Option<Vec<C64>>,
}

#[derive(Args, Debug)]
struct ChoiArgs {
    path: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
    /// Also write the report as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.as_str()),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let bad = || format!("invalid angle '{s}'");
    let num = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            if coef.is_empty() {
                PI
            } else {
                coef.parse::<f64>().map_err(|_| bad())? * PI
            }
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let value = match den {
        Some(d) => num / d.parse::<f64>().map_err(|_| bad())?,
        None => num,
    };
    if value.is_finite() {
        Ok(sign * value)
    } else {
        Err(bad())
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("range '{s}' must be lo:hi"))?;
    Ok((parse_angle(lo)?, parse_angle(hi)?))
}

fn parse_entry(s: &str) -> Result<C64, String> {
    let bad = || format!("invalid density entry '{s}'");
    match s.split_once(',') {
        Some((re, im)) => Ok(C64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        None => Ok(C64::new(s.trim().parse().map_err(|_| bad())?, 0.0)),
    }
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidRequest(msg) => Failure::Usage(msg),
            Error::Choi(c) => Failure::Data(format!("[{}] {c}", c.code())),
            e => Failure::Data(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(format!("[E_IO] {e}"))
    }
}

fn gate_kind(name: &str) -> Result<GateKind, Failure> {
    Ok(match name {
        "bs" => GateKind::BeamSplitter,
        "cphase" => GateKind::CPhase,
        "generalized" => GateKind::Generalized,
        other => match other.strip_prefix("choi:") {
            Some(path) => GateKind::Choi(choi_gate_model(load_choi(path)?).with_label(path)),
            None => return Err(Failure::Usage(format!("unknown gate '{other}'"))),
        },
    })
}

fn sweep_variable(name: &str) -> Result<SweepVariable, Failure> {
    match name {
        "transmittance" => Ok(SweepVariable::Transmittance),
        "phase" => Ok(SweepVariable::Phase),
        "theta1" => Ok(SweepVariable::Theta1),
        other => Err(Failure::Usage(format!("unknown sweep variable '{other}'"))),
    }
}

/// Twelve significant digits in fixed notation; values below 1e-13 print as zero.
fn sig12(x: f64) -> String {
    if x.abs() < 1e-13 {
        return format!("{:.11}", 0.0);
    }
    let decimals = (11 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

fn emit(out: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let req = SweepRequest {
        gate: gate_kind(&args.gate)?,
        variable: sweep_variable(&args.var)?,
        range: args.range,
        steps: args.steps,
        search: args.search.config(),
    };
    req.validate()?;
    let rows = run_sweep(&req)?;
    emit(args.out.as_deref(), |w| write_sweep_csv(&req, &rows, w))
}

fn cmd_state_sweep(args: StateSweepArgs) -> Result<(), Failure> {
    let req = StateSweepRequest {
        phase: args.phase,
        transmittance: args.transmittance,
        theta2: args.theta2,
        phi1: args.phi1,
        phi2: args.phi2,
        range: args.range,
        steps: args.steps,
        ..StateSweepRequest::new(gate_kind(&args.gate)?)
    };
    req.validate()?;
    let rows = run_state_sweep(&req)?;
    emit(args.out.as_deref(), |w| write_state_csv(&rows, w))
}

fn cmd_negativity(args: NegativityArgs) -> Result<(), Failure> {
    let rho: DensityMatrix = match (args.angles, args.density) {
        (Some(a), _) => {
            let p = ProductStateParams::new(a[0], a[1], a[2], a[3])?;
            density_from_vector(&product_state_vector(&p), false)?.0
        }
        (None, Some(d)) => DensityMatrix::new(ComplexMatrix::new(4, 4, d)?)?,
        (None, None) => unreachable!("clap requires one of --angles or --density"),
    };
    println!("{}", sig12(negativity(&rho)?));
    Ok(())
}

fn report_line(name: &str, r: &MeasureReport) -> String {
    let a = &r.argmax;
    format!(
        "{name} = {}\n{name} argmax: theta1={} phi1={} theta2={} phi2={} success_probability={} negativity={}",
        sig12(r.value),
        sig12(a.theta1),
        sig12(a.phi1),
        sig12(a.theta2),
        sig12(a.phi2),
        sig12(r.success_at_argmax),
        sig12(r.negativity_at_argmax),
    )
}

fn write_report_csv(ep: &MeasureReport, eeff: &MeasureReport, w: &mut dyn Write) -> io::Result<()> {
    writeln!(
        w,
        "measure,value,theta1_rad,phi1_rad,theta2_rad,phi2_rad,success_probability,negativity,evaluations"
    )?;
    for (name, r) in [("e_p", ep), ("e_eff", eeff)] {
        let a = &r.argmax;
        writeln!(
            w,
            "{name},{},{},{},{},{},{},{},{}",
            fmt_f64(r.value),
            fmt_f64(a.theta1),
            fmt_f64(a.phi1),
            fmt_f64(a.theta2),
            fmt_f64(a.phi2),
            fmt_f64(r.success_at_argmax),
            fmt_f64(r.negativity_at_argmax),
            r.evaluations
        )?;
    }
    Ok(())
}

fn cmd_choi_analyze(args: ChoiArgs) -> Result<(), Failure> {
    let cfg = args.search.config();
    cfg.validate()?;
    let gate = choi_gate_model(load_choi(&args.path)?).with_label(args.path.display().to_string());
    let a = analyze(&gate, &cfg)?;
    println!("{}", report_line("E_p", &a.entangling_power));
    println!("{}", report_line("E_eff", &a.entangling_efficiency));
    println!("P_s^maxN * E_p = {}", sig12(a.ps_maxn_times_ep()));
    println!(
        "evaluations = {}",
        a.entangling_power.evaluations + a.entangling_efficiency.evaluations
    );
    if let Some(path) = args.csv.as_deref() {
        emit(Some(path), |w| {
            write_report_csv(&a.entangling_power, &a.entangling_efficiency, w)
        })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::StateSweep(a) => cmd_state_sweep(a),
        Command::Negativity(a) => cmd_negativity(a),
        Command::ChoiAnalyze(a) => cmd_choi_analyze(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DATA)
        }
    }
}
