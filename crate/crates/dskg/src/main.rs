//! Command-line interface: kernel evaluation, the identity suite as CSV,
//! and transform-vs-solver comparisons. Exit codes: 0 on success, 1 when a
//! verification suite reports failures, 2 on usage or domain errors.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use dskg::kernels::{kernel_e, kernel_k0, kernel_k1, KernelPoint};
use dskg::transform::{transform_full, QuadratureConfig};
use dskg::verify::{run_kernel_identity_suite, SuiteReport};
use dskg::wave::{
    dalembert_v, extend_profile, fd_direct_solver, ode_oracle, Boundary, GridProblem1D,
    ModeProblem, ODE_ORACLE_TOL,
};
use dskg::Mass;

const DEFAULT_MASS_LIST: &str = "0,0.25,0.5,1,0.3i,1.7i";

#[derive(Parser)]
#[command(
    name = "dskg",
    version,
    about = "Evaluate and verify the integral-transform kernels of the damped wave equation u_tt - e^{-2t} u_xx - M^2 u = f"
)]
struct Cli {
    /// Defaults file with one key=value pair per line ('#' starts a
    /// comment); keys are the long flag names, explicit flags win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one kernel at a point and print its value.
    #[command(allow_negative_numbers = true)]
    Eval(EvalArgs),
    /// Run the kernel identity suite and emit its CSV report.
    Identities(IdentitiesArgs),
    /// Compare the transform with the mode ODE oracle; emit CSV rows.
    #[command(allow_negative_numbers = true)]
    Mode(ModeArgs),
    /// Compare the transform with the finite-difference solver; emit CSV.
    #[command(allow_negative_numbers = true)]
    Compare(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelKind {
    /// Source kernel E(r, t; 0, b)
    #[value(name = "E", alias = "e")]
    E,
    /// Displacement kernel K0(z, t)
    #[value(name = "K0", alias = "k0")]
    K0,
    /// Velocity kernel K1(z, t)
    #[value(name = "K1", alias = "k1")]
    K1,
}

#[derive(Args)]
struct MassArgs {
    /// Real part of the mass parameter M
    #[arg(long)]
    mass: Option<f64>,
    /// Imaginary part of the mass parameter M
    #[arg(long)]
    mass_imag: Option<f64>,
    /// Physical mass m, entered as M = -i m (conflicts with --mass/--mass-imag)
    #[arg(long)]
    physical_mass: Option<f64>,
}

#[derive(Args)]
struct EvalArgs {
    /// Which kernel to evaluate
    #[arg(long, value_enum)]
    kernel: Option<KernelKind>,
    /// Radius r (kernel E) or data lag z (kernels K0, K1)
    #[arg(long)]
    r: Option<f64>,
    /// Observation time t
    #[arg(long)]
    t: Option<f64>,
    /// Emission time b (kernel E only)
    #[arg(long)]
    b: Option<f64>,
    #[command(flatten)]
    mass: MassArgs,
}

#[derive(Args)]
struct IdentitiesArgs {
    /// Low-discrepancy sample points per mass
    #[arg(long)]
    samples: Option<usize>,
    /// Comma-separated masses; imaginary entries end in 'i' (e.g. 0.3i)
    #[arg(long)]
    masses: Option<String>,
    /// Write the CSV report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ForcingKind {
    /// No forcing
    None,
    /// g(t) = e^{-t}
    ExpDecay,
    /// g(t) = cos(t)
    Cosine,
}

#[derive(Args)]
struct ModeArgs {
    /// Spatial eigenvalue mu <= 0 of the operator A
    #[arg(long)]
    mu: Option<f64>,
    #[command(flatten)]
    mass: MassArgs,
    /// Initial displacement coefficient
    #[arg(long)]
    c0: Option<f64>,
    /// Initial velocity coefficient
    #[arg(long)]
    c1: Option<f64>,
    /// Forcing profile g(t)
    #[arg(long, value_enum)]
    forcing: Option<ForcingKind>,
    /// Final time of the comparison
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of output rows after t = 0
    #[arg(long)]
    steps: Option<usize>,
    /// Write the CSV to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryKind {
    Periodic,
    Dirichlet,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    x_min: Option<f64>,
    #[arg(long)]
    x_max: Option<f64>,
    /// Grid nodes
    #[arg(long)]
    n_x: Option<usize>,
    /// Final time of the comparison
    #[arg(long)]
    t_max: Option<f64>,
    /// Width of the Gaussian displacement profile
    #[arg(long)]
    sigma: Option<f64>,
    /// Center of the Gaussian displacement profile
    #[arg(long)]
    center: Option<f64>,
    /// Amplitude of the Gaussian displacement profile
    #[arg(long)]
    amplitude: Option<f64>,
    #[command(flatten)]
    mass: MassArgs,
    /// Time step as a fraction of the grid spacing
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long, value_enum)]
    boundary: Option<BoundaryKind>,
    /// Write the CSV to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(message) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<i32, String> {
    let cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Eval(args) => cmd_eval(args, &cfg),
        Command::Identities(args) => cmd_identities(args, &cfg),
        Command::Mode(args) => cmd_mode(args, &cfg),
        Command::Compare(args) => cmd_compare(args, &cfg),
    }
}

type ConfigMap = HashMap<String, String>;

fn load_config(path: Option<&Path>) -> Result<ConfigMap, String> {
    let Some(path) = path else {
        return Ok(ConfigMap::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut map = ConfigMap::new();
    for (index, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!(
                "config line {}: expected key=value, got {line:?}",
                index + 1
            ));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn resolve<T>(flag: Option<T>, cfg: &ConfigMap, key: &str, default: T) -> Result<T, String>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    match flag {
        Some(value) => Ok(value),
        None => match cfg.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|e| format!("config key {key} = {raw:?}: {e}")),
            None => Ok(default),
        },
    }
}

fn resolve_opt<T>(flag: Option<T>, cfg: &ConfigMap, key: &str) -> Result<Option<T>, String>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    match flag {
        Some(value) => Ok(Some(value)),
        None => cfg
            .get(key)
            .map(|raw| {
                raw.parse()
                    .map_err(|e| format!("config key {key} = {raw:?}: {e}"))
            })
            .transpose(),
    }
}

fn resolve_mass(args: &MassArgs, cfg: &ConfigMap) -> Result<Mass, String> {
    let re = resolve_opt(args.mass, cfg, "mass")?;
    let im = resolve_opt(args.mass_imag, cfg, "mass-imag")?;
    let physical = resolve_opt(args.physical_mass, cfg, "physical-mass")?;
    if let Some(m) = physical {
        if re.is_some() || im.is_some() {
            return Err("--physical-mass conflicts with --mass/--mass-imag".into());
        }
        return Ok(Mass::physical(m));
    }
    Ok(Mass::curved(Complex64::new(
        re.unwrap_or(0.0),
        im.unwrap_or(0.0),
    )))
}

/// Parse a comma-separated mass list; entries ending in 'i' are imaginary.
fn parse_mass_list(spec: &str) -> Result<Vec<Mass>, String> {
    let mut masses = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let mass = if let Some(imag) = token.strip_suffix('i') {
            let im: f64 = imag
                .parse()
                .map_err(|e| format!("bad imaginary mass {token:?}: {e}"))?;
            Mass::curved(Complex64::new(0.0, im))
        } else {
            let re: f64 = token
                .parse()
                .map_err(|e| format!("bad mass {token:?}: {e}"))?;
            Mass::real(re)
        };
        masses.push(mass);
    }
    Ok(masses)
}

fn emit(path: Option<&PathBuf>, content: &str) -> Result<(), String> {
    match path {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn suite_csv(report: &SuiteReport) -> String {
    let mut out = String::from("suite,case_id,r,t,b,mass_re,mass_im,residual,tol,pass\n");
    for case in &report.cases {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            report.suite,
            case.case_id,
            case.r,
            case.t,
            case.b,
            case.mass.re,
            case.mass.im,
            case.residual,
            case.tol,
            case.pass
        ));
    }
    out
}

fn cmd_eval(args: EvalArgs, cfg: &ConfigMap) -> Result<i32, String> {
    let kernel = match args.kernel {
        Some(kind) => kind,
        None => match cfg.get("kernel") {
            Some(raw) => <KernelKind as ValueEnum>::from_str(raw, true)
                .map_err(|e| format!("config key kernel = {raw:?}: {e}"))?,
            None => return Err("--kernel is required".into()),
        },
    };
    let r = resolve(args.r, cfg, "r", 0.0)?;
    let t = match resolve_opt(args.t, cfg, "t")? {
        Some(t) => t,
        None => return Err("--t is required".into()),
    };
    let b = resolve(args.b, cfg, "b", 0.0)?;
    let mass = resolve_mass(&args.mass, cfg)?;
    let value = match kernel {
        KernelKind::E => {
            let point = KernelPoint::new(r, t, b).map_err(|e| e.to_string())?;
            kernel_e(point, mass).map_err(|e| e.to_string())?
        }
        KernelKind::K0 | KernelKind::K1 => {
            if b != 0.0 {
                return Err("kernels K0 and K1 take no --b".into());
            }
            match kernel {
                KernelKind::K0 => kernel_k0(r, t, mass).map_err(|e| e.to_string())?,
                _ => kernel_k1(r, t, mass).map_err(|e| e.to_string())?,
            }
        }
    };
    if value.im == 0.0 {
        println!("{:.15e}", value.re);
    } else {
        println!("{:.15e} {:.15e}", value.re, value.im);
    }
    Ok(0)
}

fn cmd_identities(args: IdentitiesArgs, cfg: &ConfigMap) -> Result<i32, String> {
    let samples = resolve(args.samples, cfg, "samples", 200usize)?;
    let spec = match args.masses {
        Some(spec) => spec,
        None => cfg
            .get("masses")
            .cloned()
            .unwrap_or_else(|| DEFAULT_MASS_LIST.to_string()),
    };
    let masses = parse_mass_list(&spec)?;
    let report = run_kernel_identity_suite(samples, &masses);
    emit(args.out.as_ref(), &suite_csv(&report))?;
    Ok(exit_code_for(&report))
}

fn exit_code_for(report: &SuiteReport) -> i32 {
    if report.all_pass() {
        0
    } else {
        1
    }
}

fn forcing_fn(kind: ForcingKind) -> Option<Box<dyn Fn(f64) -> f64>> {
    match kind {
        ForcingKind::None => None,
        ForcingKind::ExpDecay => Some(Box::new(|t: f64| (-t).exp())),
        ForcingKind::Cosine => Some(Box::new(|t: f64| t.cos())),
    }
}

fn cmd_mode(args: ModeArgs, cfg: &ConfigMap) -> Result<i32, String> {
    let mu = resolve(args.mu, cfg, "mu", -1.0)?;
    if mu > 0.0 {
        return Err(format!("mu must be <= 0, got {mu}"));
    }
    let mass = resolve_mass(&args.mass, cfg)?;
    let c0 = resolve(args.c0, cfg, "c0", 1.0)?;
    let c1 = resolve(args.c1, cfg, "c1", 0.0)?;
    let forcing = match args.forcing {
        Some(kind) => kind,
        None => match cfg.get("forcing") {
            Some(raw) => <ForcingKind as ValueEnum>::from_str(raw, true)
                .map_err(|e| format!("config key forcing = {raw:?}: {e}"))?,
            None => ForcingKind::None,
        },
    };
    let t_max = resolve(args.t_max, cfg, "t-max", 2.0)?;
    let steps = resolve(args.steps, cfg, "steps", 8usize)?;
    if steps == 0 || !(t_max.is_finite() && t_max > 0.0) {
        return Err(format!(
            "need steps >= 1 and t-max > 0, got steps = {steps}, t-max = {t_max}"
        ));
    }
    let problem = ModeProblem {
        mu,
        mass,
        c0,
        c1,
        forcing: forcing_fn(forcing),
    };
    let oracle = ode_oracle(&problem, t_max, ODE_ORACLE_TOL).map_err(|e| e.to_string())?;
    let lambda = problem.lambda();
    let factor = move |s: f64| (lambda * s).cos();
    let quad = QuadratureConfig::default();
    let mut csv = String::from("t,u_transform,u_oracle,abs_err\n");
    for k in 0..=steps {
        let t = t_max * k as f64 / steps as f64;
        let source = problem
            .forcing
            .as_ref()
            .map(|g| move |_x: f64, r: f64, b: f64| g(b) * factor(r));
        let u = transform_full(
            source,
            |_x, s| c0 * factor(s),
            |_x, s| c1 * factor(s),
            0.0,
            t,
            mass,
            &quad,
        )
        .map_err(|e| e.to_string())?
        .re;
        let y = oracle.eval(t)[0];
        csv.push_str(&format!("{t},{u},{y},{}\n", (u - y).abs()));
    }
    emit(args.out.as_ref(), &csv)?;
    Ok(0)
}

fn cmd_compare(args: CompareArgs, cfg: &ConfigMap) -> Result<i32, String> {
    let x_min = resolve(args.x_min, cfg, "x-min", -2.65)?;
    let x_max = resolve(args.x_max, cfg, "x-max", 2.65)?;
    let n_x = resolve(args.n_x, cfg, "n-x", 401usize)?;
    let t_max = resolve(args.t_max, cfg, "t-max", 1.0)?;
    let sigma = resolve(args.sigma, cfg, "sigma", 0.3)?;
    let center = resolve(args.center, cfg, "center", 0.0)?;
    let amplitude = resolve(args.amplitude, cfg, "amplitude", 1.0)?;
    let cfl = resolve(args.cfl, cfg, "cfl", 0.45)?;
    let mass = resolve_mass(&args.mass, cfg)?;
    let boundary = match args.boundary {
        Some(kind) => kind,
        None => match cfg.get("boundary") {
            Some(raw) => <BoundaryKind as ValueEnum>::from_str(raw, true)
                .map_err(|e| format!("config key boundary = {raw:?}: {e}"))?,
            None => BoundaryKind::Periodic,
        },
    };
    let boundary = match boundary {
        BoundaryKind::Periodic => Boundary::Periodic,
        BoundaryKind::Dirichlet => Boundary::Dirichlet,
    };
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(format!("sigma must be positive, got {sigma}"));
    }
    let profile =
        move |x: f64| amplitude * (-(x - center) * (x - center) / (2.0 * sigma * sigma)).exp();
    let shell = GridProblem1D {
        x_min,
        x_max,
        n_x,
        phi0: Vec::new(),
        phi1: Vec::new(),
        forcing: None,
        boundary,
    };
    let (xs, dx) = shell.grid();
    let problem = GridProblem1D {
        phi0: xs.iter().map(|&x| profile(x)).collect(),
        phi1: vec![0.0; n_x],
        ..shell
    };
    let dt = cfl * dx;
    let fd = fd_direct_solver(&problem, mass, t_max, dt).map_err(|e| e.to_string())?;
    let extended = extend_profile(boundary, x_min, x_max, profile);
    let quad = QuadratureConfig::default();
    let mut csv = String::from("x,t,u_transform,u_fd,diff\n");
    for (i, &x) in fd.xs.iter().enumerate() {
        let u = transform_full(
            None::<fn(f64, f64, f64) -> f64>,
            |x, s| dalembert_v(&extended, x, s),
            |_, _| 0.0,
            x,
            t_max,
            mass,
            &quad,
        )
        .map_err(|e| e.to_string())?
        .re;
        let v = fd.final_row()[i];
        csv.push_str(&format!("{x},{t_max},{u},{v},{}\n", (u - v).abs()));
    }
    emit(args.out.as_ref(), &csv)?;
    Ok(0)
}
