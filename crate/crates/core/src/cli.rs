//! Command-line front end.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::checks::run_suite;
use crate::dynamics::{
    cross_validate, evolve_moyal, evolve_schrodinger, HamiltonianSpec, CROSS_VALIDATION_TOLERANCE,
    RK4_STABILITY_LIMIT,
};
use crate::error::{Error, Result};
use crate::grid::{
    Grid, WavefunctionGrid, COMPLEX_SHIFT_PRUNE, DEFAULT_RAMP_GUARD, EDGE_TOLERANCE,
};
use crate::io::{
    read_opm, read_psf, read_wavefunction, write_atomic, write_json, write_opm, write_psf,
    write_wavefunction,
};
use crate::moments::{
    analytic_first_moment, analytic_second_moment, classical_limit_scan, conditional_moment,
    MomentProfile, BOUNDARY_FRACTION, DEFAULT_DENSITY_FLOOR, MAX_PHASE_STEP, SCAN_DENSITY_FRACTION,
};
use crate::star::{commutator_symbol, moyal_bracket, star_product};
use crate::states::{gaussian_state, ho_eigenstate, wkb_state, WkbFields};
use crate::symbol::{operator_to_symbol, projector_symbol, symbol_to_operator, OperatorMatrix};
use crate::transform::{
    format_complex, s_wigner, s_wigner_kirkwood, s_wigner_momentum, SParameter,
};

#[derive(Debug, Parser)]
#[command(
    name = "sweyl",
    version,
    about = "s-ordered phase-space quantum mechanics on periodic grids"
)]
pub struct Cli {
    /// Grid as `N,qmin,qmax`.
    #[arg(
        long,
        global = true,
        default_value = "256,-12,12",
        allow_hyphen_values = true
    )]
    pub grid: String,

    #[arg(long, global = true, default_value_t = 1.0)]
    pub hbar: f64,

    /// Treat states that do not decay at the box edges as errors.
    #[arg(long, global = true)]
    pub strict: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// s-Wigner function of a state.
    Wigner(WignerArgs),
    /// Operator to symbol, or symbol back to operator.
    Symbol(SymbolArgs),
    /// Star product, commutator or Moyal bracket of two symbol files.
    Star(StarArgs),
    /// Time evolution.
    Evolve(EvolveArgs),
    /// Space-conditional momentum moments.
    Moments(MomentsArgs),
    /// Classical-limit scan over ħ for a WKB family.
    Scan(ScanArgs),
    /// Run invariant suites.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WignerRoute {
    Position,
    Momentum,
    Kirkwood,
    Projector,
}

#[derive(Debug, Args)]
pub struct WignerArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub s: String,
    #[arg(long, value_enum, default_value = "position")]
    pub route: WignerRoute,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SymbolArgs {
    /// `identity`, `position`, `momentum`, `hamiltonian:SPEC`, `projector:STATE` or `file:PATH`.
    #[arg(long, conflicts_with = "from_symbol")]
    pub operator: Option<String>,
    /// Symbol file to map back to an operator.
    #[arg(long)]
    pub from_symbol: Option<PathBuf>,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub s: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StarOperation {
    Product,
    Commutator,
    Bracket,
}

#[derive(Debug, Args)]
pub struct StarArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, value_enum, default_value = "product")]
    pub operation: StarOperation,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EvolveRoute {
    Moyal,
    Schrodinger,
    Cross,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub state: String,
    /// `free:m=..` or `harmonic:m=..,omega=..`.
    #[arg(long, default_value = "harmonic")]
    pub hamiltonian: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub s: String,
    #[arg(long, default_value_t = crate::dynamics::DEFAULT_DT)]
    pub dt: f64,
    #[arg(long)]
    pub steps: usize,
    /// Snapshot interval in steps; defaults to the final step only.
    #[arg(long)]
    pub every: Option<usize>,
    #[arg(long, value_enum, default_value = "moyal")]
    pub route: EvolveRoute,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MomentRoute {
    Grid,
    Analytic,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub s: String,
    #[arg(long, default_value_t = 1)]
    pub order: u32,
    #[arg(long, value_enum, default_value = "grid")]
    pub route: MomentRoute,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// `free:q0=..,w=..,p0=..,m=..,t=..` or `quadratic:q0=..,w=..,c1=..,c2=..,m=..`.
    #[arg(long)]
    pub wkb: String,
    #[arg(long, default_value = "-0.5,0,0.5", allow_hyphen_values = true)]
    pub s_samples: String,
    #[arg(long, default_value = "0.4,0.2,0.1")]
    pub hbar_samples: String,
    /// JSON report; a CSV summary is written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Optional JSON file with every result.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `argv`, runs the command and returns the process exit code:
/// 0 on success, 1 when a check fails, 2 on invalid input, 3 when a
/// numerical guard trips.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            eprintln!(
                "{}",
                json!({"error": "usage", "message": e.kind().to_string(), "exit_code": 2})
            );
            return 2;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            let code = if e.is_numerical() { 3 } else { 2 };
            eprintln!("{}", error_payload(&e, code));
            code
        }
    }
}

fn error_payload(e: &Error, code: i32) -> Value {
    let mut payload = json!({"error": e.kind(), "message": e.to_string(), "exit_code": code});
    match e {
        Error::OverflowGuard {
            exponent,
            guard,
            max_imag,
        } => {
            payload["exponent"] = json!(exponent);
            payload["guard"] = json!(guard);
            payload["max_admissible_imag_s"] = json!(max_imag);
        }
        Error::Stability { dt, product, limit } => {
            payload["dt"] = json!(dt);
            payload["product"] = json!(product);
            payload["limit"] = json!(limit);
        }
        Error::NonFinite { step } => payload["step"] = json!(step),
        _ => {}
    }
    payload
}

pub fn parse_grid(spec: &str, hbar: f64) -> Result<Grid> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::invalid(format!(
            "grid must be N,qmin,qmax, got `{spec}`"
        )));
    }
    let n = parts[0]
        .parse::<usize>()
        .map_err(|e| Error::invalid(format!("grid size `{}`: {e}", parts[0])))?;
    let real = |x: &str| {
        x.parse::<f64>()
            .map_err(|e| Error::invalid(format!("grid bound `{x}`: {e}")))
    };
    Grid::new(n, real(parts[1])?, real(parts[2])?, hbar)
}

/// `name:key=value,...` → (name, map).
fn parse_spec(spec: &str) -> Result<(String, BTreeMap<String, String>)> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut map = BTreeMap::new();
    for field in rest.split(',').map(str::trim).filter(|f| !f.is_empty()) {
        let (k, v) = field.split_once('=').ok_or_else(|| {
            Error::invalid(format!("expected key=value in `{spec}`, got `{field}`"))
        })?;
        if map
            .insert(k.trim().to_string(), v.trim().to_string())
            .is_some()
        {
            return Err(Error::invalid(format!("duplicate key `{k}` in `{spec}`")));
        }
    }
    Ok((name.trim().to_string(), map))
}

struct Fields {
    spec: String,
    map: BTreeMap<String, String>,
}

impl Fields {
    fn real(&mut self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.map.remove(key) {
            Some(v) => v
                .parse::<f64>()
                .map_err(|e| Error::invalid(format!("`{key}` in `{}`: {e}", self.spec))),
            None => default.ok_or_else(|| Error::invalid(format!("`{}` needs `{key}`", self.spec))),
        }
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(Error::invalid(format!(
                "unknown key `{k}` in `{}`",
                self.spec
            ))),
            None => Ok(()),
        }
    }
}

fn fields(spec: &str) -> Result<(String, Fields)> {
    let (name, map) = parse_spec(spec)?;
    Ok((
        name,
        Fields {
            spec: spec.to_string(),
            map,
        },
    ))
}

pub fn parse_wkb(spec: &str) -> Result<WkbFields> {
    let (name, mut f) = fields(spec)?;
    let out = match name.as_str() {
        "free" => WkbFields::free_particle(
            f.real("q0", Some(0.0))?,
            f.real("w", Some(1.0))?,
            f.real("p0", Some(1.0))?,
            f.real("m", Some(1.0))?,
            f.real("t", Some(0.0))?,
        )?,
        "quadratic" => WkbFields::static_quadratic_action(
            f.real("q0", Some(0.0))?,
            f.real("w", Some(1.0))?,
            f.real("c1", Some(0.0))?,
            f.real("c2", Some(1.0))?,
            f.real("m", Some(1.0))?,
        )?,
        other => return Err(Error::invalid(format!("unknown WKB family `{other}`"))),
    };
    f.finish()?;
    Ok(out)
}

/// `gaussian:q0=..,p0=..,w=..`, `ho:n=..`, `wkb:FAMILY;key=..` or `file:PATH`.
pub fn parse_state(spec: &str, grid: &Grid, strict: bool) -> Result<WavefunctionGrid> {
    let psi = if let Some(path) = spec.strip_prefix("file:") {
        read_wavefunction(Path::new(path))?
    } else if let Some(rest) = spec.strip_prefix("wkb:") {
        let family = rest.replacen(';', ":", 1);
        wkb_state(grid, &parse_wkb(&family)?, grid.hbar())?
    } else {
        let (name, mut f) = fields(spec)?;
        let psi = match name.as_str() {
            "gaussian" => gaussian_state(
                grid,
                f.real("q0", Some(0.0))?,
                f.real("p0", Some(0.0))?,
                f.real("w", Some(1.0))?,
            )?,
            "ho" => {
                let n = f.real("n", None)?;
                if n < 0.0 || n.fract() != 0.0 {
                    return Err(Error::invalid(format!(
                        "ho level must be a nonnegative integer, got {n}"
                    )));
                }
                ho_eigenstate(grid, n as usize)?
            }
            other => return Err(Error::invalid(format!("unknown state kind `{other}`"))),
        };
        f.finish()?;
        psi
    };
    // The constructors already warn; files have not been checked yet.
    if strict || spec.starts_with("file:") {
        psi.check_support(strict)?;
    }
    Ok(psi)
}

pub fn parse_hamiltonian(spec: &str) -> Result<HamiltonianSpec> {
    let (name, mut f) = fields(spec)?;
    let h = match name.as_str() {
        "free" => HamiltonianSpec::free(f.real("m", Some(1.0))?)?,
        "harmonic" => {
            HamiltonianSpec::harmonic(f.real("m", Some(1.0))?, f.real("omega", Some(1.0))?)?
        }
        other => return Err(Error::invalid(format!("unknown Hamiltonian `{other}`"))),
    };
    f.finish()?;
    Ok(h)
}

fn parse_operator(spec: &str, grid: &Grid, strict: bool) -> Result<OperatorMatrix> {
    if let Some(path) = spec.strip_prefix("file:") {
        return read_opm(Path::new(path));
    }
    if let Some(h) = spec.strip_prefix("hamiltonian:") {
        return parse_hamiltonian(h)?.matrix(grid);
    }
    if let Some(state) = spec.strip_prefix("projector:") {
        return Ok(OperatorMatrix::projector(&parse_state(
            state, grid, strict,
        )?));
    }
    match spec {
        "identity" => Ok(OperatorMatrix::identity(grid)),
        "position" => Ok(OperatorMatrix::position(grid)),
        "momentum" => Ok(OperatorMatrix::momentum(grid)),
        other => Err(Error::invalid(format!("unknown operator `{other}`"))),
    }
}

fn parse_s(text: &str) -> Result<SParameter> {
    text.parse()
}

fn parse_list<T>(text: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(f)
        .collect()
}

fn grid_json(grid: &Grid) -> Value {
    json!({"n": grid.n(), "qmin": grid.q_min(), "qmax": grid.q_max(), "hbar": grid.hbar()})
}

fn manifest(
    cli: &Cli,
    command: &str,
    parameters: Value,
    grid: Option<&Grid>,
    outputs: &[&Path],
    results: Value,
) -> Value {
    json!({
        "tool": "sweyl",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "global": {"grid": cli.grid, "hbar": cli.hbar, "strict": cli.strict},
        "parameters": parameters,
        "grid": grid.map(grid_json),
        "constants": {
            "ramp_guard": DEFAULT_RAMP_GUARD,
            "complex_shift_prune": COMPLEX_SHIFT_PRUNE,
            "edge_tolerance": EDGE_TOLERANCE,
            "rk4_stability_limit": RK4_STABILITY_LIMIT,
            "cross_validation_tolerance": CROSS_VALIDATION_TOLERANCE,
            "density_floor": DEFAULT_DENSITY_FLOOR,
            "boundary_fraction": BOUNDARY_FRACTION,
            "max_phase_step": MAX_PHASE_STEP,
            "scan_density_fraction": SCAN_DENSITY_FRACTION,
        },
        "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "results": results,
    })
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn execute(cli: &Cli) -> Result<i32> {
    let grid = parse_grid(&cli.grid, cli.hbar)?;
    match &cli.command {
        Command::Wigner(args) => wigner(cli, &grid, args),
        Command::Symbol(args) => symbol(cli, &grid, args),
        Command::Star(args) => star(cli, args),
        Command::Evolve(args) => evolve(cli, &grid, args),
        Command::Moments(args) => moments(cli, &grid, args),
        Command::Scan(args) => scan(cli, &grid, args),
        Command::Check(args) => check(cli, args),
    }
}

fn wigner(cli: &Cli, grid: &Grid, args: &WignerArgs) -> Result<i32> {
    let s = parse_s(&args.s)?;
    let psi = parse_state(&args.state, grid, cli.strict)?;
    let a = match args.route {
        WignerRoute::Position => s_wigner(&psi, s)?,
        WignerRoute::Momentum => s_wigner_momentum(&psi.to_momentum()?, s)?,
        WignerRoute::Kirkwood => s_wigner_kirkwood(&psi, s)?,
        WignerRoute::Projector => projector_symbol(&psi, s)?,
    };
    write_psf(&args.out, &a)?;
    let integral = a.integral();
    let results = json!({"integral": format_complex(integral), "max_imag": a.max_imag()});
    let params = json!({"state": args.state, "s": s.to_string(), "route": format!("{:?}", args.route).to_lowercase()});
    write_json(
        &manifest_path(&args.out),
        &manifest(
            cli,
            "wigner",
            params,
            Some(&psi.grid),
            &[&args.out],
            results,
        ),
    )?;
    println!(
        "wrote {} (integral {}, max |Im| {:.3e})",
        args.out.display(),
        format_complex(integral),
        a.max_imag()
    );
    Ok(0)
}

fn symbol(cli: &Cli, grid: &Grid, args: &SymbolArgs) -> Result<i32> {
    let (command, params, used_grid) = match (&args.operator, &args.from_symbol) {
        (Some(spec), None) => {
            let s = parse_s(&args.s)?;
            let op = parse_operator(spec, grid, cli.strict)?;
            let sym = operator_to_symbol(&op, s)?;
            write_psf(&args.out, &sym)?;
            (
                "symbol",
                json!({"operator": spec, "s": s.to_string()}),
                op.grid,
            )
        }
        (None, Some(path)) => {
            let sym = read_psf(path)?;
            let op = symbol_to_operator(&sym)?;
            write_opm(&args.out, &op)?;
            (
                "symbol-inverse",
                json!({"from_symbol": path.display().to_string(), "s": sym.s.to_string()}),
                op.grid,
            )
        }
        _ => {
            return Err(Error::invalid(
                "give exactly one of --operator or --from-symbol",
            ))
        }
    };
    write_json(
        &manifest_path(&args.out),
        &manifest(
            cli,
            command,
            params,
            Some(&used_grid),
            &[&args.out],
            Value::Null,
        ),
    )?;
    println!("wrote {}", args.out.display());
    Ok(0)
}

fn star(cli: &Cli, args: &StarArgs) -> Result<i32> {
    let a = read_psf(&args.a)?;
    let b = read_psf(&args.b)?;
    let out = match args.operation {
        StarOperation::Product => star_product(&a, &b)?,
        StarOperation::Commutator => commutator_symbol(&a, &b)?,
        StarOperation::Bracket => moyal_bracket(&a, &b)?,
    };
    write_psf(&args.out, &out)?;
    let params = json!({
        "a": args.a.display().to_string(),
        "b": args.b.display().to_string(),
        "operation": format!("{:?}", args.operation).to_lowercase(),
        "s": a.s.to_string(),
    });
    write_json(
        &manifest_path(&args.out),
        &manifest(
            cli,
            "star",
            params,
            Some(&a.grid),
            &[&args.out],
            Value::Null,
        ),
    )?;
    println!("wrote {}", args.out.display());
    Ok(0)
}

fn evolve(cli: &Cli, grid: &Grid, args: &EvolveArgs) -> Result<i32> {
    let s = parse_s(&args.s)?;
    let psi = parse_state(&args.state, grid, cli.strict)?;
    let h = parse_hamiltonian(&args.hamiltonian)?;
    let every = args.every.unwrap_or(args.steps.max(1));
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Error::Io {
        path: args.out_dir.display().to_string(),
        source: e,
    })?;
    let params = json!({
        "state": args.state,
        "hamiltonian": args.hamiltonian,
        "hamiltonian_kind": h.kind,
        "mass": h.mass,
        "s": s.to_string(),
        "dt": args.dt,
        "steps": args.steps,
        "every": every,
        "route": format!("{:?}", args.route).to_lowercase(),
    });
    let mut outputs = Vec::new();
    let results = match args.route {
        EvolveRoute::Moyal => {
            let rho0 = s_wigner(&psi, s)?;
            let run = evolve_moyal(&rho0, &h, args.dt, args.steps, every)?;
            for (i, snap) in run.snapshots.iter().enumerate() {
                let path = args.out_dir.join(format!("snapshot_{i:05}.csv"));
                write_psf(&path, snap)?;
                outputs.push(path);
            }
            json!({"times": run.times, "mass_drift": run.mass_drift(), "diagnostics": run.diagnostics})
        }
        EvolveRoute::Schrodinger => {
            let run = evolve_schrodinger(&psi, &h, args.dt, args.steps, every)?;
            for (i, snap) in run.snapshots.iter().enumerate() {
                let path = args.out_dir.join(format!("snapshot_{i:05}.wfn"));
                write_wavefunction(&path, snap)?;
                outputs.push(path);
            }
            json!({"times": run.times, "norm_drift": run.mass_drift(), "diagnostics": run.diagnostics})
        }
        EvolveRoute::Cross => {
            let report = cross_validate(&psi, &h, s, args.steps as f64 * args.dt, args.dt)?;
            println!(
                "{} max deviation {:.3e} (tolerance {:.0e})",
                if report.passed { "PASS" } else { "FAIL" },
                report.max_deviation,
                report.tolerance
            );
            serde_json::to_value(&report).map_err(|e| Error::Parse(e.to_string()))?
        }
    };
    let refs: Vec<&Path> = outputs.iter().map(PathBuf::as_path).collect();
    let manifest_file = args.out_dir.join("manifest.json");
    write_json(
        &manifest_file,
        &manifest(cli, "evolve", params, Some(&psi.grid), &refs, results),
    )?;
    println!(
        "wrote {} snapshot(s) and {}",
        outputs.len(),
        manifest_file.display()
    );
    Ok(0)
}

fn profile_csv(profile: &MomentProfile) -> String {
    let mut out = format!("# moments v1\n# order={},s={}\n", profile.order, profile.s);
    for (q, v) in profile.q_values.iter().zip(&profile.values) {
        let v = v.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        out.push_str(&format!("{q:.16e},{:.16e},{:.16e}\n", v.re, v.im));
    }
    out
}

fn moments(cli: &Cli, grid: &Grid, args: &MomentsArgs) -> Result<i32> {
    let s = parse_s(&args.s)?;
    let psi = parse_state(&args.state, grid, cli.strict)?;
    let profile = match args.route {
        MomentRoute::Grid => conditional_moment(&s_wigner(&psi, s)?, args.order)?,
        MomentRoute::Analytic => match args.order {
            1 => analytic_first_moment(&psi, s),
            2 => analytic_second_moment(&psi, s),
            n => {
                return Err(Error::invalid(format!(
                    "the analytic route covers orders 1 and 2, not {n}"
                )))
            }
        },
    };
    write_atomic(&args.out, profile_csv(&profile).as_bytes())?;
    let params = json!({
        "state": args.state,
        "s": s.to_string(),
        "order": args.order,
        "route": format!("{:?}", args.route).to_lowercase(),
    });
    let results = json!({"defined_points": profile.defined_count()});
    write_json(
        &manifest_path(&args.out),
        &manifest(
            cli,
            "moments",
            params,
            Some(&psi.grid),
            &[&args.out],
            results,
        ),
    )?;
    println!(
        "wrote {} ({} defined points)",
        args.out.display(),
        profile.defined_count()
    );
    Ok(0)
}

fn scan(cli: &Cli, grid: &Grid, args: &ScanArgs) -> Result<i32> {
    let fields = parse_wkb(&args.wkb)?;
    let s_samples = parse_list(&args.s_samples, parse_s)?;
    let hbars = parse_list(&args.hbar_samples, |x| {
        x.parse::<f64>()
            .map_err(|e| Error::invalid(format!("hbar sample `{x}`: {e}")))
    })?;
    let report = classical_limit_scan(grid, &fields, &s_samples, &hbars)?;
    let value = serde_json::to_value(&report).map_err(|e| Error::Parse(e.to_string()))?;
    write_json(&args.out, &value)?;
    let mut csv = String::from("hbar,max_abs_second_s2,max_abs_first_s1,second_s2_ratio\n");
    for (i, t) in report.tables.iter().enumerate() {
        let ratio = if i == 0 {
            f64::NAN
        } else {
            report.second_s2_ratios[i - 1]
        };
        csv.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            t.hbar,
            t.max_abs_second_s2(),
            t.max_abs_first_s1(),
            ratio
        ));
    }
    let summary = args.out.with_extension("csv");
    write_atomic(&summary, csv.as_bytes())?;
    let params =
        json!({"wkb": args.wkb, "s_samples": args.s_samples, "hbar_samples": args.hbar_samples});
    let results = json!({"second_s2_ratios": report.second_s2_ratios, "second_s2_rates": report.second_s2_rates});
    write_json(
        &manifest_path(&args.out),
        &manifest(
            cli,
            "scan",
            params,
            Some(grid),
            &[&args.out, &summary],
            results,
        ),
    )?;
    println!(
        "s^2 coefficient ratios per hbar step: {:?}",
        report.second_s2_ratios
    );
    Ok(0)
}

fn check(cli: &Cli, args: &CheckArgs) -> Result<i32> {
    let results = run_suite(&args.suite)?;
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in &results {
        println!(
            "{}  {:<9} {:<width$}  {:.3e} < {:.0e}",
            if r.passed { "PASS" } else { "FAIL" },
            r.suite,
            r.name,
            r.value,
            r.tolerance
        );
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} checks, {} failed", results.len(), failed);
    if let Some(out) = &args.out {
        let value = serde_json::to_value(&results).map_err(|e| Error::Parse(e.to_string()))?;
        write_json(
            out,
            &manifest(
                cli,
                "check",
                json!({"suite": args.suite}),
                None,
                &[out],
                value,
            ),
        )?;
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_parsing() {
        let (name, map) = parse_spec("gaussian:q0=1,p0=-2,w=0.5").unwrap();
        assert_eq!(name, "gaussian");
        assert_eq!(map["p0"], "-2");
        assert!(parse_spec("gaussian:q0").is_err());
        assert!(parse_spec("gaussian:q0=1,q0=2").is_err());
        let g = parse_grid("64,-6,6", 1.0).unwrap();
        assert_eq!(g.n(), 64);
        assert!(parse_grid("64,-6", 1.0).is_err());
        assert!(parse_state("gaussian:q0=0,zz=1", &g, false).is_err());
        assert!(parse_state("ho:n=1.5", &g, false).is_err());
        assert!(parse_hamiltonian("harmonic:m=2,omega=3").is_ok());
        assert!(parse_wkb("free:p0=2,t=0.5").is_ok());
        assert!(parse_state("wkb:quadratic;c2=0.5", &g, false).is_ok());
    }
}
