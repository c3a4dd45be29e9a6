//! Command-line front end: point evaluation, figure-data sweeps, built-in
//! verification suites and Cramér–Rao estimation runs.
//!
//! Angles are radians; the tokens `pi`, `pi/4`, `3pi/20`, ... parse exactly
//! so rational-multiple grids carry no decimal drift. An optional config
//! file of `key=value` lines mirrors every flag; explicit flags win. All
//! numeric output uses 12 significant digits and CSV files are reproducible
//! byte for byte. Exit codes: 0 success, 1 check failure, 2 usage error.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::closed_forms::{
    delta_f_phi_scalar, dirac_f_phi, dirac_f_phi_dr, dirac_f_phi_limit, dirac_f_theta_parts,
    dirac_subsystem_qfi, inertial_qfi, scalar_f_phi_hyper, scalar_f_phi_series,
    scalar_f_theta_parts,
};
use crate::error::{Error, Result};
use crate::estimation::{classical_fisher, optimal_povm, simulate_crb, EstimationRun};
use crate::linalg::trace_product;
use crate::qfi::{qfi_from_bures, qfi_spectral, sld, ParametrizedState, QfiBreakdown};
use crate::real::Real;
use crate::unruh::{
    channel_state, channel_state_derivative, dirac_channel, dirac_eigensystem, reduced_state,
    scalar_channel_with_tol, ChannelParams, FieldKind, InputParams, Parameter, Party,
};

type F = f64;

#[derive(Parser)]
#[command(
    name = "unruh-qfi",
    version,
    about = "Quantum Fisher information of entangled qubit pairs under Unruh noise"
)]
struct Cli {
    /// Config file of key=value lines mirroring the flags; flags override.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one point: closed form vs spectral oracle plus breakdown.
    Compute {
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        r: Option<String>,
        /// Target parameter: theta | phi.
        #[arg(long)]
        param: Option<String>,
        #[arg(long = "tail-tol")]
        tail_tol: Option<String>,
    },
    /// Bosonic phase QFI over an r grid, one column per θ in
    /// {pi/20, pi/10, 3pi/20, pi/5, pi/4}.
    Fig1a {
        #[arg(long)]
        out: Option<String>,
        #[arg(long = "grid-r-start")]
        grid_r_start: Option<String>,
        #[arg(long = "grid-r-stop")]
        grid_r_stop: Option<String>,
        #[arg(long = "grid-r-count")]
        grid_r_count: Option<String>,
        #[arg(long = "tail-tol")]
        tail_tol: Option<String>,
    },
    /// Symmetry probe ΔF_φ = F_φ(pi/3) − F_φ(pi/6) over an r grid.
    Fig1b {
        #[arg(long)]
        out: Option<String>,
        #[arg(long = "grid-r-start")]
        grid_r_start: Option<String>,
        #[arg(long = "grid-r-stop")]
        grid_r_stop: Option<String>,
        #[arg(long = "grid-r-count")]
        grid_r_count: Option<String>,
        #[arg(long = "tail-tol")]
        tail_tol: Option<String>,
    },
    /// Fermionic phase QFI on a (θ, r) grid in long format.
    Fig2 {
        #[arg(long)]
        out: Option<String>,
        #[arg(long = "grid-theta-start")]
        grid_theta_start: Option<String>,
        #[arg(long = "grid-theta-stop")]
        grid_theta_stop: Option<String>,
        #[arg(long = "grid-theta-count")]
        grid_theta_count: Option<String>,
        #[arg(long = "grid-r-start")]
        grid_r_start: Option<String>,
        #[arg(long = "grid-r-stop")]
        grid_r_stop: Option<String>,
        #[arg(long = "grid-r-count")]
        grid_r_count: Option<String>,
    },
    /// Run the named invariant checks: quick (Dirac grid) or full
    /// (adds scalar truncation and hypergeometric cross-checks).
    Verify {
        #[arg(long)]
        level: Option<String>,
    },
    /// Monte Carlo Cramér–Rao run in the optimal measurement.
    Estimate {
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        param: Option<String>,
        #[arg(long)]
        samples: Option<String>,
        #[arg(long)]
        trials: Option<String>,
        #[arg(long)]
        seed: Option<String>,
    },
}

/// Entry point of the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Domain(_) | Error::DimensionMismatch(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let cfg = ConfigMap::load(cli.config.as_deref())?;
    match cli.command {
        Command::Compute {
            field,
            theta,
            phi,
            r,
            param,
            tail_tol,
        } => cmd_compute(
            cfg.field(&field)?,
            cfg.angle("theta", &theta, None)?,
            cfg.angle("phi", &phi, Some(0.0))?,
            cfg.angle("r", &r, None)?,
            cfg.param(&param)?,
            cfg.float("tail-tol", &tail_tol, 1e-12)?,
        ),
        Command::Fig1a {
            out,
            grid_r_start,
            grid_r_stop,
            grid_r_count,
            tail_tol,
        } => cmd_fig1a(
            &cfg.path("out", &out, "fig1a.csv"),
            &cfg.grid(
                ("grid-r-start", &grid_r_start, 0.0),
                ("grid-r-stop", &grid_r_stop, 3.0),
                ("grid-r-count", &grid_r_count, 121),
            )?,
            cfg.float("tail-tol", &tail_tol, 1e-12)?,
        ),
        Command::Fig1b {
            out,
            grid_r_start,
            grid_r_stop,
            grid_r_count,
            tail_tol,
        } => cmd_fig1b(
            &cfg.path("out", &out, "fig1b.csv"),
            &cfg.grid(
                ("grid-r-start", &grid_r_start, 0.0),
                ("grid-r-stop", &grid_r_stop, 3.0),
                ("grid-r-count", &grid_r_count, 121),
            )?,
            cfg.float("tail-tol", &tail_tol, 1e-12)?,
        ),
        Command::Fig2 {
            out,
            grid_theta_start,
            grid_theta_stop,
            grid_theta_count,
            grid_r_start,
            grid_r_stop,
            grid_r_count,
        } => cmd_fig2(
            &cfg.path("out", &out, "fig2.csv"),
            &cfg.grid(
                ("grid-theta-start", &grid_theta_start, 0.0),
                (
                    "grid-theta-stop",
                    &grid_theta_stop,
                    std::f64::consts::FRAC_PI_2,
                ),
                ("grid-theta-count", &grid_theta_count, 41),
            )?,
            &cfg.grid(
                ("grid-r-start", &grid_r_start, 0.0),
                (
                    "grid-r-stop",
                    &grid_r_stop,
                    std::f64::consts::FRAC_PI_4 - 1e-6,
                ),
                ("grid-r-count", &grid_r_count, 41),
            )?,
        ),
        Command::Verify { level } => {
            let level = cfg.level(&level)?;
            let checks = run_checks(level);
            Ok(render_checks(&checks))
        }
        Command::Estimate {
            field,
            theta,
            phi,
            r,
            param,
            samples,
            trials,
            seed,
        } => cmd_estimate(EstimationRun {
            field: cfg.field(&field)?,
            theta: cfg.angle("theta", &theta, None)?,
            phi: cfg.angle("phi", &phi, Some(0.0))?,
            r: cfg.angle("r", &r, None)?,
            n_max: None,
            target: cfg.param(&param)?,
            samples: cfg.integer("samples", &samples, 10_000)? as usize,
            trials: cfg.integer("trials", &trials, 200)? as usize,
            seed: cfg.integer("seed", &seed, 42)?,
        }),
    }
}

// ---------------------------------------------------------------------------
// Flag/config resolution
// ---------------------------------------------------------------------------

struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    fn load(path: Option<&Path>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::Domain(format!("cannot read config {}: {e}", path.display()))
            })?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((k, v)) = line.split_once('=') else {
                    return Err(Error::Domain(format!(
                        "config line {} is not key=value: {line:?}",
                        lineno + 1
                    )));
                };
                entries.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(Self { entries })
    }

    fn resolve<'a>(&'a self, key: &str, flag: &'a Option<String>) -> Option<&'a str> {
        flag.as_deref()
            .or_else(|| self.entries.get(key).map(String::as_str))
    }

    fn angle(&self, key: &str, flag: &Option<String>, default: Option<F>) -> Result<F> {
        match self.resolve(key, flag) {
            Some(s) => parse_angle(s),
            None => default.ok_or_else(|| Error::Domain(format!("missing required --{key}"))),
        }
    }

    fn float(&self, key: &str, flag: &Option<String>, default: F) -> Result<F> {
        match self.resolve(key, flag) {
            Some(s) => s
                .parse::<F>()
                .map_err(|_| Error::Domain(format!("--{key}: not a number: {s:?}"))),
            None => Ok(default),
        }
    }

    fn integer(&self, key: &str, flag: &Option<String>, default: u64) -> Result<u64> {
        match self.resolve(key, flag) {
            Some(s) => s
                .parse::<u64>()
                .map_err(|_| Error::Domain(format!("--{key}: not a nonnegative integer: {s:?}"))),
            None => Ok(default),
        }
    }

    fn path(&self, key: &str, flag: &Option<String>, default: &str) -> PathBuf {
        PathBuf::from(
            self.resolve(key, flag)
                .map(str::to_string)
                .unwrap_or_else(|| default.to_string()),
        )
    }

    fn field(&self, flag: &Option<String>) -> Result<FieldKind> {
        match self.resolve("field", flag) {
            Some(s) => match s.to_ascii_lowercase().as_str() {
                "scalar" => Ok(FieldKind::Scalar),
                "dirac" => Ok(FieldKind::Dirac),
                other => Err(Error::Domain(format!(
                    "--field must be scalar or dirac, got {other:?}"
                ))),
            },
            None => Err(Error::Domain("missing required --field".into())),
        }
    }

    fn param(&self, flag: &Option<String>) -> Result<Parameter> {
        match self.resolve("param", flag) {
            Some(s) => match s.to_ascii_lowercase().as_str() {
                "theta" => Ok(Parameter::Theta),
                "phi" => Ok(Parameter::Phi),
                other => Err(Error::Domain(format!(
                    "--param must be theta or phi, got {other:?}"
                ))),
            },
            None => Err(Error::Domain("missing required --param".into())),
        }
    }

    fn level(&self, flag: &Option<String>) -> Result<VerifyLevel> {
        match self.resolve("level", flag) {
            None => Ok(VerifyLevel::Quick),
            Some(s) => match s.to_ascii_lowercase().as_str() {
                "quick" => Ok(VerifyLevel::Quick),
                "full" => Ok(VerifyLevel::Full),
                other => Err(Error::Domain(format!(
                    "--level must be quick or full, got {other:?}"
                ))),
            },
        }
    }

    fn grid(
        &self,
        start: (&str, &Option<String>, F),
        stop: (&str, &Option<String>, F),
        count: (&str, &Option<String>, u64),
    ) -> Result<Vec<F>> {
        let a = self.angle(start.0, start.1, Some(start.2))?;
        let b = self.angle(stop.0, stop.1, Some(stop.2))?;
        let n = self.integer(count.0, count.1, count.2)?;
        if n < 2 {
            return Err(Error::Domain(format!("--{} must be at least 2", count.0)));
        }
        let n = n as usize;
        let step = (b - a) / (n - 1) as F;
        Ok((0..n).map(|i| a + step * i as F).collect())
    }
}

/// Radians with exact rational-multiple-of-π tokens: `0.7`, `pi`, `pi/20`,
/// `3pi/20`, `0.5pi`.
pub fn parse_angle(s: &str) -> Result<F> {
    let t = s.trim();
    if let Some(idx) = t.find("pi") {
        let coef_str = &t[..idx];
        let coef = if coef_str.is_empty() {
            1.0
        } else {
            coef_str
                .parse::<F>()
                .map_err(|_| Error::Domain(format!("bad angle coefficient in {s:?}")))?
        };
        let rest = &t[idx + 2..];
        let den = if rest.is_empty() {
            1.0
        } else if let Some(d) = rest.strip_prefix('/') {
            let den = d
                .parse::<F>()
                .map_err(|_| Error::Domain(format!("bad angle denominator in {s:?}")))?;
            if den == 0.0 {
                return Err(Error::Domain(format!("zero denominator in {s:?}")));
            }
            den
        } else {
            return Err(Error::Domain(format!("cannot parse angle {s:?}")));
        };
        Ok(coef * std::f64::consts::PI / den)
    } else {
        t.parse::<F>()
            .map_err(|_| Error::Domain(format!("cannot parse angle {s:?}")))
    }
}

/// 12 significant digits, with negative zero normalized for byte-stable files.
fn fmt12(x: F) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

fn write_csv(
    path: &Path,
    meta: &[(&str, String)],
    header: &[String],
    rows: &[Vec<F>],
) -> Result<()> {
    let mut buf = String::new();
    for (k, v) in meta {
        buf.push_str(&format!("# {k}={v}\n"));
    }
    buf.push_str(&header.join(","));
    buf.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt12(x)).collect();
        buf.push_str(&cells.join(","));
        buf.push('\n');
    }
    let mut file = std::fs::File::create(path)
        .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))?;
    file.write_all(buf.as_bytes())?;
    Ok(())
}

// ---------------------------------------------------------------------------
// compute
// ---------------------------------------------------------------------------

/// Closed-form value of the requested QFI.
fn closed_form_value(field: FieldKind, theta: F, r: F, param: Parameter, tail_tol: F) -> F {
    match (field, param) {
        (FieldKind::Scalar, Parameter::Theta) => crate::closed_forms::scalar_f_theta(theta, r),
        (FieldKind::Scalar, Parameter::Phi) => scalar_f_phi_series(theta, r, tail_tol).value,
        (FieldKind::Dirac, Parameter::Theta) => crate::closed_forms::dirac_f_theta(theta, r),
        (FieldKind::Dirac, Parameter::Phi) => dirac_f_phi(theta, r),
    }
}

/// Breakdown through the support formula where the analytic eigen-data is
/// cheap, falling back to the closed-form split at parameterization edges.
fn breakdown_at(
    field: FieldKind,
    input: &InputParams<F>,
    r: F,
    param: Parameter,
    tail_tol: F,
) -> Result<QfiBreakdown<F>> {
    let interior = input.theta > 0.0 && input.theta < std::f64::consts::FRAC_PI_2;
    match field {
        FieldKind::Dirac if interior && r > 0.0 => {
            let sys = dirac_eigensystem(input, r)?;
            crate::qfi::qfi_support(
                &sys.probabilities,
                &sys.vectors,
                &sys.d_probabilities(param),
                sys.d_vectors(param),
            )
        }
        FieldKind::Scalar if interior => {
            let state = scalar_channel_with_tol(input, r, None, tail_tol)?;
            if state.blocks.len() <= 512 {
                let p: Vec<F> = state.blocks.iter().map(|b| b.weight).collect();
                let dp: Vec<F> = match param {
                    Parameter::Theta => state.blocks.iter().map(|b| b.d_weight_dtheta).collect(),
                    Parameter::Phi => vec![0.0; p.len()],
                };
                let psis: Vec<_> = (0..p.len()).map(|n| state.embedded_vector(n)).collect();
                let dpsis: Vec<_> = (0..p.len())
                    .map(|n| state.embedded_vector_derivative(n, param))
                    .collect();
                return crate::qfi::qfi_support(&p, &psis, &dp, &dpsis);
            }
            closed_breakdown(field, input.theta, r, param, tail_tol)
        }
        _ => closed_breakdown(field, input.theta, r, param, tail_tol),
    }
}

fn closed_breakdown(
    field: FieldKind,
    theta: F,
    r: F,
    param: Parameter,
    tail_tol: F,
) -> Result<QfiBreakdown<F>> {
    let (classical, quantum_avg) = match (field, param) {
        (FieldKind::Scalar, Parameter::Theta) => scalar_f_theta_parts(theta, r, tail_tol),
        (FieldKind::Dirac, Parameter::Theta) => dirac_f_theta_parts(theta, r),
        (FieldKind::Scalar, Parameter::Phi) => (0.0, scalar_f_phi_series(theta, r, tail_tol).value),
        (FieldKind::Dirac, Parameter::Phi) => (0.0, dirac_f_phi(theta, r)),
    };
    Ok(QfiBreakdown {
        total: classical + quantum_avg,
        classical,
        quantum_avg,
        mixing: 0.0,
    })
}

fn cmd_compute(
    field: FieldKind,
    theta: F,
    phi: F,
    r: F,
    param: Parameter,
    tail_tol: F,
) -> Result<i32> {
    let input = InputParams::new(theta, phi)?;
    let channel = ChannelParams::new(field, r, None)?;
    let closed = closed_form_value(field, theta, r, param, tail_tol);
    let rho = channel_state(&channel, &input)?;
    let drho = channel_state_derivative(&channel, &input, param)?;
    let spectral = qfi_spectral(&rho, &drho, f64::SUPPORT_EPS)?;
    let diff = (closed - spectral).abs();
    let breakdown = breakdown_at(field, &input, r, param, tail_tol)?;

    let field_name = match field {
        FieldKind::Scalar => "scalar",
        FieldKind::Dirac => "dirac",
    };
    let param_name = match param {
        Parameter::Theta => "theta",
        Parameter::Phi => "phi",
    };
    println!(
        "# compute field={field_name} theta={} phi={} r={} param={param_name}",
        fmt12(theta),
        fmt12(phi),
        fmt12(r)
    );
    println!("closed_form = {}", fmt12(closed));
    println!("spectral    = {}", fmt12(spectral));
    println!("abs_diff    = {}", fmt12(diff));
    println!("classical   = {}", fmt12(breakdown.classical));
    println!("quantum_avg = {}", fmt12(breakdown.quantum_avg));
    println!("mixing      = {}", fmt12(breakdown.mixing));
    println!("total       = {}", fmt12(breakdown.total));
    Ok(if diff <= 1e-8 { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// figure sweeps
// ---------------------------------------------------------------------------

const FIG1A_THETAS: [(&str, F); 5] = [
    ("pi/20", std::f64::consts::PI / 20.0),
    ("pi/10", std::f64::consts::PI / 10.0),
    ("3pi/20", 3.0 * std::f64::consts::PI / 20.0),
    ("pi/5", std::f64::consts::PI / 5.0),
    ("pi/4", std::f64::consts::PI / 4.0),
];

fn check_scalar_r_grid(r_grid: &[F]) -> Result<()> {
    match r_grid.iter().find(|&&r| !(r >= 0.0 && r.is_finite())) {
        Some(&r) => Err(Error::Domain(format!(
            "scalar r grid must stay finite and nonnegative, got {r}"
        ))),
        None => Ok(()),
    }
}

fn cmd_fig1a(out: &Path, r_grid: &[F], tail_tol: F) -> Result<i32> {
    check_scalar_r_grid(r_grid)?;
    let rows: Vec<Vec<F>> = r_grid
        .par_iter()
        .map(|&r| {
            let mut row = Vec::with_capacity(1 + FIG1A_THETAS.len());
            row.push(r);
            for &(_, theta) in &FIG1A_THETAS {
                row.push(scalar_f_phi_series(theta, r, tail_tol).value);
            }
            row
        })
        .collect();
    let mut header = vec!["r".to_string()];
    header.extend(
        FIG1A_THETAS
            .iter()
            .map(|(name, _)| format!("f_phi_theta_{}", name.replace('/', "_"))),
    );
    write_csv(
        out,
        &[
            ("command", "fig1a".into()),
            ("field", "scalar".into()),
            (
                "theta-columns",
                FIG1A_THETAS
                    .iter()
                    .map(|(n, _)| *n)
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("tail-tol", fmt12(tail_tol)),
            ("grid-r", grid_meta(r_grid)),
        ],
        &header,
        &rows,
    )?;
    println!("wrote {} ({} rows)", out.display(), rows.len());
    Ok(0)
}

fn cmd_fig1b(out: &Path, r_grid: &[F], tail_tol: F) -> Result<i32> {
    check_scalar_r_grid(r_grid)?;
    let rows: Vec<Vec<F>> = r_grid
        .par_iter()
        .map(|&r| vec![r, delta_f_phi_scalar(r, tail_tol)])
        .collect();
    write_csv(
        out,
        &[
            ("command", "fig1b".into()),
            ("field", "scalar".into()),
            ("delta", "f_phi(pi/3) - f_phi(pi/6)".into()),
            ("tail-tol", fmt12(tail_tol)),
            ("grid-r", grid_meta(r_grid)),
        ],
        &["r".into(), "delta_f_phi".into()],
        &rows,
    )?;
    println!("wrote {} ({} rows)", out.display(), rows.len());
    Ok(0)
}

fn cmd_fig2(out: &Path, theta_grid: &[F], r_grid: &[F]) -> Result<i32> {
    for &r in r_grid {
        if !(0.0..std::f64::consts::FRAC_PI_4).contains(&r) {
            return Err(Error::Domain(format!(
                "fig2 r grid must stay in [0, pi/4), got {r}"
            )));
        }
    }
    for &theta in theta_grid {
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
            return Err(Error::Domain(format!(
                "fig2 theta grid must stay in [0, pi/2], got {theta}"
            )));
        }
    }
    let points: Vec<(F, F)> = theta_grid
        .iter()
        .flat_map(|&theta| r_grid.iter().map(move |&r| (theta, r)))
        .collect();
    let rows: Vec<Vec<F>> = points
        .par_iter()
        .map(|&(theta, r)| vec![theta, r, dirac_f_phi(theta, r)])
        .collect();
    write_csv(
        out,
        &[
            ("command", "fig2".into()),
            ("field", "dirac".into()),
            ("grid-theta", grid_meta(theta_grid)),
            ("grid-r", grid_meta(r_grid)),
        ],
        &["theta".into(), "r".into(), "f_phi".into()],
        &rows,
    )?;
    println!("wrote {} ({} rows)", out.display(), rows.len());
    Ok(0)
}

fn grid_meta(grid: &[F]) -> String {
    format!(
        "{}:{}:{}",
        fmt12(grid[0]),
        fmt12(*grid.last().unwrap()),
        grid.len()
    )
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

fn cmd_estimate(run: EstimationRun<F>) -> Result<i32> {
    let report = simulate_crb(&run)?;
    println!(
        "# estimate field={} param={} theta={} phi={} r={}",
        match run.field {
            FieldKind::Scalar => "scalar",
            FieldKind::Dirac => "dirac",
        },
        match run.target {
            Parameter::Theta => "theta",
            Parameter::Phi => "phi",
        },
        fmt12(run.theta),
        fmt12(run.phi),
        fmt12(run.r)
    );
    println!("samples   = {}", report.samples);
    println!("trials    = {}", report.trials);
    println!("seed      = {}", report.seed);
    println!("qfi       = {}", fmt12(report.qfi));
    println!("mean      = {}", fmt12(report.mean));
    println!("variance  = {}", fmt12(report.variance));
    println!("crb_ratio = {}", fmt12(report.crb_ratio));
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyLevel {
    Quick,
    Full,
}

/// One named invariant check with its measured defect and threshold.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub measured: F,
    pub tolerance: F,
    pub pass: bool,
}

impl Check {
    fn bounded(name: &'static str, measured: F, tolerance: F) -> Self {
        Self {
            name,
            measured,
            tolerance,
            pass: measured.is_finite() && measured <= tolerance,
        }
    }
}

/// Render the report and map it to the exit-code contract.
pub fn render_checks(checks: &[Check]) -> i32 {
    let mut failed = 0usize;
    for c in checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {:<38} measured={} tolerance={}",
            c.name,
            fmt12(c.measured),
            fmt12(c.tolerance)
        );
        if !c.pass {
            failed += 1;
        }
    }
    println!("SUMMARY: {} checks, {} failed", checks.len(), failed);
    if failed == 0 {
        0
    } else {
        1
    }
}

fn dirac_grid(nt: usize, nr: usize) -> Vec<(F, F)> {
    let t0 = 0.05;
    let t1 = std::f64::consts::FRAC_PI_2 - 0.05;
    let r1 = std::f64::consts::FRAC_PI_4 - 0.01;
    let mut pts = Vec::with_capacity(nt * nr);
    for i in 0..nt {
        for j in 0..nr {
            pts.push((
                t0 + (t1 - t0) * i as F / (nt - 1) as F,
                r1 * j as F / (nr - 1) as F,
            ));
        }
    }
    pts
}

/// Evaluate the named invariant suite.
pub fn run_checks(level: VerifyLevel) -> Vec<Check> {
    let eps = f64::SUPPORT_EPS;
    let mut checks = Vec::new();
    let phi = 0.7;

    // Dirac weight invariance and closed-vs-spectral phase agreement
    let grid = dirac_grid(21, 21);
    let (mut worst_theta, mut worst_phi) = (0.0f64, 0.0f64);
    let mut worst_eig = 0.0f64;
    for &(theta, r) in &grid {
        let input = InputParams::new(theta, phi).unwrap();
        let rho = dirac_channel(&input, r).unwrap();
        let dt = channel_state_derivative(
            &ChannelParams::new(FieldKind::Dirac, r, None).unwrap(),
            &input,
            Parameter::Theta,
        )
        .unwrap();
        let ft = qfi_spectral(&rho, &dt, eps).unwrap();
        worst_theta = worst_theta.max((ft - 4.0).abs());

        let dp = channel_state_derivative(
            &ChannelParams::new(FieldKind::Dirac, r, None).unwrap(),
            &input,
            Parameter::Phi,
        )
        .unwrap();
        let fp = qfi_spectral(&rho, &dp, eps).unwrap();
        worst_phi = worst_phi.max((fp - dirac_f_phi(theta, r)).abs());

        if r > 0.0 {
            let sys = dirac_eigensystem(&input, r).unwrap();
            let spec = crate::linalg::eig_hermitian(rho.matrix()).unwrap();
            let mut probs = sys.probabilities;
            probs.sort_by(|a, b| b.partial_cmp(a).unwrap());
            worst_eig = worst_eig
                .max((spec.eigenvalues[0] - probs[0]).abs())
                .max((spec.eigenvalues[1] - probs[1]).abs());
        }
    }
    checks.push(Check::bounded(
        "dirac-weight-invariance",
        worst_theta,
        1e-10,
    ));
    checks.push(Check::bounded(
        "dirac-phase-closed-vs-spectral",
        worst_phi,
        1e-10,
    ));
    checks.push(Check::bounded("dirac-eigensystem-route", worst_eig, 1e-10));

    // subsystem distribution and additivity margins
    let mut worst_sub = 0.0f64;
    let mut worst_additivity = 0.0f64;
    for &(theta, r) in &dirac_grid(9, 9) {
        let input = InputParams::new(theta, phi).unwrap();
        let rho = dirac_channel(&input, r).unwrap();
        let sub = dirac_subsystem_qfi(theta, r);
        let rob = reduced_state(&rho, Party::Rob).unwrap();
        let drob = {
            let h = 1e-6;
            let plus = reduced_state(
                &dirac_channel(&InputParams::new(theta + h, phi).unwrap(), r).unwrap(),
                Party::Rob,
            )
            .unwrap();
            let minus = reduced_state(
                &dirac_channel(&InputParams::new(theta - h, phi).unwrap(), r).unwrap(),
                Party::Rob,
            )
            .unwrap();
            plus.matrix()
                .sub(minus.matrix())
                .scale(num_complex::Complex::new(1.0 / (2.0 * h), 0.0))
        };
        let f_rob = qfi_spectral(&rob, &drob, eps).unwrap();
        worst_sub = worst_sub.max((f_rob - sub.f_theta_rob).abs());
        // F_θ ≤ F_θ^A + F_θ^R and F_φ ≥ F_φ^A + F_φ^R
        let sub_violation = (4.0 - (sub.f_theta_alice + sub.f_theta_rob)).max(0.0);
        let super_violation = ((sub.f_phi_alice + sub.f_phi_rob) - dirac_f_phi(theta, r)).max(0.0);
        worst_additivity = worst_additivity.max(sub_violation).max(super_violation);
    }
    // finite-difference reduced derivative carries O(h²) ≈ 1e-12 error
    checks.push(Check::bounded("dirac-subsystem-formulas", worst_sub, 1e-8));
    checks.push(Check::bounded(
        "dirac-additivity-margins",
        worst_additivity,
        1e-8,
    ));

    // infinite-acceleration limit and monotonic decay
    let mut worst_limit = 0.0f64;
    let mut worst_slope = f64::NEG_INFINITY;
    let mut worst_increase = 0.0f64;
    for i in 1..20 {
        let theta = std::f64::consts::FRAC_PI_2 * i as F / 20.0;
        worst_limit = worst_limit.max(
            (dirac_f_phi(theta, std::f64::consts::FRAC_PI_4 - 1e-6) - dirac_f_phi_limit(theta))
                .abs(),
        );
        let mut prev = dirac_f_phi(theta, 0.0);
        for j in 1..40 {
            let r = (std::f64::consts::FRAC_PI_4 - 1e-4) * j as F / 39.0;
            worst_slope = worst_slope.max(dirac_f_phi_dr(theta, r));
            let v = dirac_f_phi(theta, r);
            worst_increase = worst_increase.max(v - prev);
            prev = v;
        }
    }
    checks.push(Check::bounded(
        "dirac-infinite-acceleration-limit",
        worst_limit,
        1e-5,
    ));
    checks.push(Check::bounded(
        "dirac-phase-slope-nonpositive",
        worst_slope,
        0.0,
    ));
    checks.push(Check::bounded(
        "dirac-phase-grid-nonincreasing",
        worst_increase,
        1e-12,
    ));

    // SLD residual on the support
    let mut worst_sld = 0.0f64;
    for &(theta, r) in &dirac_grid(5, 5) {
        let input = InputParams::new(theta, phi).unwrap();
        let rho = dirac_channel(&input, r).unwrap();
        for param in [Parameter::Theta, Parameter::Phi] {
            let drho = channel_state_derivative(
                &ChannelParams::new(FieldKind::Dirac, r, None).unwrap(),
                &input,
                param,
            )
            .unwrap();
            let l = sld(&rho, &drho, eps).unwrap();
            let recon = rho
                .matrix()
                .matmul(&l)
                .add(&l.matmul(rho.matrix()))
                .scale(num_complex::Complex::new(0.5, 0.0));
            worst_sld = worst_sld.max(recon.max_abs_diff(&drho));
        }
    }
    checks.push(Check::bounded(
        "sld-defining-relation-residual",
        worst_sld,
        1e-9,
    ));

    // channels at rest match the inertial values
    let mut worst_rest = 0.0f64;
    for i in 0..=8 {
        let theta = std::f64::consts::FRAC_PI_2 * i as F / 8.0;
        let input = InputParams::new(theta, phi).unwrap();
        let (ft_expect, fp_expect) = inertial_qfi(theta);
        for field in [FieldKind::Scalar, FieldKind::Dirac] {
            let ch = ChannelParams::new(field, 0.0, None).unwrap();
            let rho = channel_state(&ch, &input).unwrap();
            let ft = qfi_spectral(
                &rho,
                &channel_state_derivative(&ch, &input, Parameter::Theta).unwrap(),
                eps,
            )
            .unwrap();
            let fp = qfi_spectral(
                &rho,
                &channel_state_derivative(&ch, &input, Parameter::Phi).unwrap(),
                eps,
            )
            .unwrap();
            worst_rest = worst_rest
                .max((ft - ft_expect).abs())
                .max((fp - fp_expect).abs());
        }
    }
    checks.push(Check::bounded(
        "channels-at-rest-are-inertial",
        worst_rest,
        1e-10,
    ));

    if level == VerifyLevel::Quick {
        return checks;
    }

    // scalar block identities and mass normalization
    let mut worst_block = 0.0f64;
    for &theta in &[0.3, std::f64::consts::FRAC_PI_4, 1.2] {
        for &r in &[0.2, 0.8, 1.5] {
            let input = InputParams::new(theta, phi).unwrap();
            let s = scalar_channel_with_tol(&input, r, None, 1e-12).unwrap();
            let t = r.tanh().powi(2);
            let ch2 = r.cosh().powi(2);
            let mut tpow = 1.0;
            for b in &s.blocks {
                worst_block = worst_block.max((b.weight - tpow / ch2 * b.norm_sq).abs());
                let tangent = crate::linalg::inner(&b.amps, &b.d_amps_dtheta).norm();
                worst_block = worst_block.max(tangent);
                tpow *= t;
            }
            worst_block = worst_block.max((s.total_weight() - 1.0).abs());
        }
    }
    checks.push(Check::bounded(
        "scalar-block-identities",
        worst_block,
        1e-12,
    ));

    // scalar weight invariance via the dense spectral oracle
    let mut worst_scalar_theta = 0.0f64;
    for &theta in &[
        std::f64::consts::FRAC_PI_8,
        std::f64::consts::FRAC_PI_4,
        1.2,
    ] {
        for &r in &[0.0, 0.5, 1.0, 1.5] {
            let input = InputParams::new(theta, phi).unwrap();
            let s = scalar_channel_with_tol(&input, r, None, 1e-12).unwrap();
            let rho = s.as_matrix().unwrap();
            let drho = s.derivative_matrix(Parameter::Theta).unwrap();
            let f = qfi_spectral(&rho, &drho, eps).unwrap();
            worst_scalar_theta = worst_scalar_theta.max((f - 4.0).abs());
        }
    }
    checks.push(Check::bounded(
        "scalar-weight-invariance",
        worst_scalar_theta,
        1e-8,
    ));

    // series vs hypergeometric
    let mut worst_hyper = 0.0f64;
    for i in 1..=9 {
        let theta = std::f64::consts::PI * i as F / 20.0;
        for j in 0..8 {
            let r = 0.1 + 2.9 * j as F / 7.0;
            let series = scalar_f_phi_series(theta, r, 1e-13).value;
            let hyper = scalar_f_phi_hyper(theta, r).unwrap();
            worst_hyper = worst_hyper.max((series - hyper).abs());
        }
    }
    checks.push(Check::bounded(
        "scalar-phase-series-vs-hyper",
        worst_hyper,
        1e-9,
    ));

    // series vs dense spectral oracle
    let mut worst_series_spectral = 0.0f64;
    for &theta in &[
        std::f64::consts::PI / 20.0,
        std::f64::consts::FRAC_PI_4,
        1.3,
    ] {
        for &r in &[0.1, 0.7, 1.5] {
            let input = InputParams::new(theta, phi).unwrap();
            let s = scalar_channel_with_tol(&input, r, None, 1e-12).unwrap();
            let rho = s.as_matrix().unwrap();
            let drho = s.derivative_matrix(Parameter::Phi).unwrap();
            let f = qfi_spectral(&rho, &drho, eps).unwrap();
            worst_series_spectral =
                worst_series_spectral.max((f - scalar_f_phi_series(theta, r, 1e-13).value).abs());
        }
    }
    checks.push(Check::bounded(
        "scalar-phase-series-vs-spectral",
        worst_series_spectral,
        1e-8,
    ));

    // analytic channel derivatives vs central finite differences
    let mut worst_fd = 0.0f64;
    for &(field, r) in &[(FieldKind::Scalar, 0.9), (FieldKind::Dirac, 0.5)] {
        let ch = ChannelParams::new(field, r, None).unwrap();
        for param in [Parameter::Theta, Parameter::Phi] {
            let h = 1e-6;
            let analytic =
                channel_state_derivative(&ch, &InputParams::new(0.8, phi).unwrap(), param).unwrap();
            let (tp, tm, pp, pm) = (
                InputParams::new(0.8 + h, phi).unwrap(),
                InputParams::new(0.8 - h, phi).unwrap(),
                InputParams::new(0.8, phi + h).unwrap(),
                InputParams::new(0.8, phi - h).unwrap(),
            );
            let (plus, minus) = match param {
                Parameter::Theta => (channel_state(&ch, &tp), channel_state(&ch, &tm)),
                Parameter::Phi => (channel_state(&ch, &pp), channel_state(&ch, &pm)),
            };
            let fd = plus
                .unwrap()
                .matrix()
                .sub(minus.unwrap().matrix())
                .scale(num_complex::Complex::new(1.0 / (2.0 * h), 0.0));
            worst_fd = worst_fd.max(fd.max_abs_diff(&analytic));
        }
    }
    checks.push(Check::bounded("channel-derivative-vs-fd", worst_fd, 1e-8));

    // Bures route against the spectral value
    let mut worst_bures = 0.0f64;
    for &(field, theta, r) in &[
        (FieldKind::Dirac, 0.6, 0.3),
        (FieldKind::Dirac, 1.1, 0.6),
        (FieldKind::Scalar, 0.5, 0.4),
        (FieldKind::Scalar, 1.0, 0.9),
    ] {
        let ch = ChannelParams::new(field, r, None).unwrap();
        let input = InputParams::new(theta, phi).unwrap();
        let rho = channel_state(&ch, &input).unwrap();
        let drho = channel_state_derivative(&ch, &input, Parameter::Phi).unwrap();
        let f_ref = qfi_spectral(&rho, &drho, eps).unwrap();
        let family = ParametrizedState::new(move |x: f64| {
            channel_state(&ch, &InputParams::with_wrapped_phi(theta, x)?)
        });
        let f_bures = qfi_from_bures(&family, phi, 1e-4).unwrap();
        worst_bures = worst_bures.max((f_bures.value - f_ref).abs() / f_ref);
    }
    checks.push(Check::bounded(
        "bures-route-relative-agreement",
        worst_bures,
        1e-3,
    ));

    // optimal measurement saturation at seeded points
    let mut worst_povm = 0.0f64;
    {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for _ in 0..10 {
            let theta = 0.1 + 1.3 * rng.random::<f64>();
            let r = 0.05 + 0.6 * rng.random::<f64>();
            let input = InputParams::new(theta, phi).unwrap();
            let rho = dirac_channel(&input, r).unwrap();
            for param in [Parameter::Theta, Parameter::Phi] {
                let drho = channel_state_derivative(
                    &ChannelParams::new(FieldKind::Dirac, r, None).unwrap(),
                    &input,
                    param,
                )
                .unwrap();
                let f_ref = qfi_spectral(&rho, &drho, eps).unwrap();
                let povm = optimal_povm(&rho, &drho, eps).unwrap();
                let probs: Vec<F> = povm
                    .iter()
                    .map(|e| trace_product(e, rho.matrix()).re)
                    .collect();
                let dprobs: Vec<F> = povm.iter().map(|e| trace_product(e, &drho).re).collect();
                let cfi = classical_fisher(&probs, &dprobs, eps);
                worst_povm = worst_povm.max((cfi - f_ref).abs());
            }
        }
    }
    checks.push(Check::bounded(
        "optimal-measurement-saturation",
        worst_povm,
        1e-8,
    ));

    // symmetry probe signs
    let at_rest: F = delta_f_phi_scalar(0.0, 1e-12);
    let at_rest = at_rest.abs();
    let small_r: F = delta_f_phi_scalar(0.2, 1e-12);
    let large_r: F = delta_f_phi_scalar(5.0, 1e-10);
    checks.push(Check::bounded(
        "symmetry-probe-zero-at-rest",
        at_rest,
        1e-12,
    ));
    checks.push(Check {
        name: "symmetry-probe-sign-structure",
        measured: small_r.min(-large_r),
        tolerance: 0.0,
        pass: small_r > 0.0 && large_r < 0.0,
    });

    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_tokens_parse_exactly() {
        assert_eq!(parse_angle("pi").unwrap(), std::f64::consts::PI);
        assert_eq!(parse_angle("pi/4").unwrap(), std::f64::consts::PI / 4.0);
        assert_eq!(
            parse_angle("3pi/20").unwrap(),
            3.0 * std::f64::consts::PI / 20.0
        );
        assert_eq!(parse_angle("0.5pi").unwrap(), 0.5 * std::f64::consts::PI);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert_eq!(parse_angle(" 2 ").unwrap(), 2.0);
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("").is_err());
    }

    #[test]
    fn twelve_digit_format_is_stable() {
        assert_eq!(fmt12(6.0 / 7.0), "8.57142857143e-1");
        assert_eq!(fmt12(0.0), "0.00000000000e0");
        assert_eq!(fmt12(-0.0), "0.00000000000e0");
        assert_eq!(fmt12(4.0), "4.00000000000e0");
    }

    #[test]
    fn config_fills_gaps_and_flags_override() {
        let dir = std::env::temp_dir().join("unruh-qfi-cfg-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "theta=pi/8\nfield=dirac\n# comment\n\nseed=42\n").unwrap();
        let cfg = ConfigMap::load(Some(&path)).unwrap();

        let from_cfg = cfg.angle("theta", &None, None).unwrap();
        assert_eq!(from_cfg, std::f64::consts::PI / 8.0);
        let overridden = cfg.angle("theta", &Some("pi/4".to_string()), None).unwrap();
        assert_eq!(overridden, std::f64::consts::PI / 4.0);
        assert_eq!(cfg.field(&None).unwrap(), FieldKind::Dirac);
        assert_eq!(cfg.integer("seed", &None, 7).unwrap(), 42);
        assert_eq!(cfg.integer("samples", &None, 7).unwrap(), 7);
    }

    #[test]
    fn malformed_config_is_a_usage_error() {
        let dir = std::env::temp_dir().join("unruh-qfi-cfg-bad");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.cfg");
        std::fs::write(&path, "just words\n").unwrap();
        assert!(matches!(
            ConfigMap::load(Some(&path)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn failed_checks_exit_nonzero() {
        let tampered = vec![
            Check::bounded("real-check", 1e-12, 1e-10),
            Check::bounded("tampered-check", 1.0, 1e-10),
        ];
        assert_eq!(render_checks(&tampered), 1);
        let clean = vec![Check::bounded("real-check", 1e-12, 1e-10)];
        assert_eq!(render_checks(&clean), 0);
    }

    #[test]
    fn quick_checks_pass() {
        let checks = run_checks(VerifyLevel::Quick);
        for c in &checks {
            assert!(
                c.pass,
                "{} measured {} tol {}",
                c.name, c.measured, c.tolerance
            );
        }
    }
}
