use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use shrinker_core::geometry::{make_shape, Chart, ProductShape, ShapeKind, SHRINKER_RADIUS};
use shrinker_core::measure::default_resolution;
use shrinker_core::spectral::BasisSpec;
use shrinker_core::tolerances as tol;
use shrinker_core::variations::Mode;

pub const DEFAULT_SEED: u64 = 20240101;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_FD_TRIALS: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "shrinker", version, about = "Stability checks for Lagrangian self-shrinkers in C^n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Shrinker equation, Lagrangian condition, growth of |A|^2 and F
    Check(CommonArgs),
    /// Drifted Laplacian spectrum and the characterization verdict
    Spectrum(CommonArgs),
    /// Scalar and vector identity residuals
    Identities(CommonArgs),
    /// F'' of one normal field, raw and optimized over (h, y)
    SecondVariation(CommonArgs),
    /// Hamiltonian or Lagrangian stability verdict
    Stability(CommonArgs),
    /// First and second variation against finite differences
    FdValidate(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check(_) => "check",
            Command::Spectrum(_) => "spectrum",
            Command::Identities(_) => "identities",
            Command::SecondVariation(_) => "second-variation",
            Command::Stability(_) => "stability",
            Command::FdValidate(_) => "fd-validate",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Check(a)
            | Command::Spectrum(a)
            | Command::Identities(a)
            | Command::SecondVariation(a)
            | Command::Stability(a)
            | Command::FdValidate(a) => a,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// plane, circle-product, clifford-torus or cylinder
    #[arg(long)]
    pub shape: String,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Number of circle factors (defaults per shape)
    #[arg(long)]
    pub k: Option<usize>,
    /// Circle radius; anything but sqrt(2) is not a shrinker
    #[arg(long)]
    pub radius: Option<f64>,
    /// hamiltonian or lagrangian
    #[arg(long, default_value = "hamiltonian")]
    pub mode: String,
    /// Number of eigenpairs to keep
    #[arg(long, default_value_t = 16)]
    pub count: usize,
    /// Sampled candidates (stability: 100, fd-validate: 10)
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Per-axis resolution, AXIS=N with AXIS a label (theta1, t2) or 1-based index
    #[arg(long = "res", value_name = "AXIS=N")]
    pub res: Vec<String>,
    /// Basis truncation, e.g. K=6,M=8
    #[arg(long, value_name = "K=..,M=..")]
    pub basis: Option<String>,
    /// Normal field: H, nu3-nu4, 2*nu3, cos2*nu3, jgrad:cos1, jgrad:x3, perp:1,0,0,0
    #[arg(long)]
    pub field: Option<String>,
    /// Dilation speed h
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub h: f64,
    /// Translation speed y, comma separated
    #[arg(long, allow_negative_numbers = true)]
    pub y: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Tolerance override NAME=VALUE
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Include wall-clock timings (makes reports run-dependent)
    #[arg(long)]
    pub timings: bool,
}

/// Thresholds applied by the report layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub shrinker_residual: f64,
    pub lagrangian: f64,
    pub lagrangian_variation: f64,
    pub identity: f64,
    pub self_adjoint: f64,
    pub eigen_residual: f64,
    pub rayleigh: f64,
    pub fd_first: f64,
    pub fd_second: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            shrinker_residual: tol::SHRINKER_RESIDUAL,
            lagrangian: tol::LAGRANGIAN,
            lagrangian_variation: tol::LAGRANGIAN_VARIATION,
            identity: tol::IDENTITY,
            self_adjoint: tol::SELF_ADJOINT,
            eigen_residual: tol::EIGEN_RESIDUAL,
            rayleigh: tol::RAYLEIGH_BOUND,
            fd_first: tol::FD_FIRST_ORDER,
            fd_second: tol::FD_SECOND_ORDER,
        }
    }
}

impl Tolerances {
    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "shrinker_residual" => &mut self.shrinker_residual,
            "lagrangian" => &mut self.lagrangian,
            "lagrangian_variation" => &mut self.lagrangian_variation,
            "identity" => &mut self.identity,
            "self_adjoint" => &mut self.self_adjoint,
            "eigen_residual" => &mut self.eigen_residual,
            "rayleigh" => &mut self.rayleigh,
            "fd_first" => &mut self.fd_first,
            "fd_second" => &mut self.fd_second,
            _ => return None,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "shrinker_residual": self.shrinker_residual,
            "lagrangian": self.lagrangian,
            "lagrangian_variation": self.lagrangian_variation,
            "identity": self.identity,
            "self_adjoint": self.self_adjoint,
            "eigen_residual": self.eigen_residual,
            "rayleigh": self.rayleigh,
            "fd_first": self.fd_first,
            "fd_second": self.fd_second,
        })
    }
}

/// Validated configuration of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub shape: ShapeKind,
    pub n: usize,
    pub k: usize,
    pub radius: f64,
    pub mode: Mode,
    pub count: usize,
    pub trials: usize,
    pub seed: u64,
    pub resolution: Vec<usize>,
    pub basis: BasisSpec,
    pub field: Option<String>,
    pub h: f64,
    pub y: Option<Vec<f64>>,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub tolerances: Tolerances,
    pub timings: bool,
}

fn split_pair(s: &str, what: &str) -> Result<(String, String), String> {
    let (a, b) = s
        .split_once('=')
        .ok_or_else(|| format!("{what} `{s}` is not of the form NAME=VALUE"))?;
    Ok((a.trim().to_string(), b.trim().to_string()))
}

fn parse_basis(s: &str) -> Result<BasisSpec, String> {
    let mut spec = BasisSpec::default();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = split_pair(part, "basis entry")?;
        let v: usize = v.parse().map_err(|_| format!("basis value `{v}` is not a count"))?;
        match k.as_str() {
            "K" | "k" => spec.fourier = v,
            "M" | "m" => spec.hermite = v,
            other => return Err(format!("unknown basis key `{other}` (expected K or M)")),
        }
    }
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

impl RunConfig {
    pub fn from_command(cmd: &Command) -> Result<Self, String> {
        let a = cmd.args();
        let shape = ShapeKind::parse(&a.shape).map_err(|e| e.to_string())?;
        let k = a.k.unwrap_or_else(|| shape.default_k(a.n));
        let radius = a.radius.unwrap_or(SHRINKER_RADIUS);
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(format!("radius {radius} must be positive"));
        }
        let chart = make_shape(&a.shape, a.n, k).map_err(|e| e.to_string())?;
        let mode = Mode::parse(&a.mode).map_err(|e| e.to_string())?;
        if a.count == 0 {
            return Err("--count must be positive".into());
        }
        let trials = a.trials.unwrap_or(match cmd {
            Command::FdValidate(_) => DEFAULT_FD_TRIALS,
            _ => DEFAULT_TRIALS,
        });
        if trials == 0 {
            return Err("--trials must be positive".into());
        }

        let mut resolution = default_resolution(&chart);
        for r in &a.res {
            let (axis, value) = split_pair(r, "--res")?;
            let count: usize = value
                .parse()
                .map_err(|_| format!("resolution `{value}` is not a count"))?;
            let idx = chart
                .axes()
                .iter()
                .position(|ax| ax.label == axis)
                .or_else(|| axis.parse::<usize>().ok().filter(|&i| i >= 1 && i <= a.n).map(|i| i - 1))
                .ok_or_else(|| format!("unknown axis `{axis}`"))?;
            resolution[idx] = count;
        }

        let basis = match &a.basis {
            Some(s) => parse_basis(s)?,
            None => BasisSpec::default(),
        };

        let mut tolerances = Tolerances::default();
        for t in &a.tol {
            let (name, value) = split_pair(t, "--tol")?;
            let v: f64 = value
                .parse()
                .map_err(|_| format!("tolerance `{value}` is not a number"))?;
            if !(v >= 0.0) {
                return Err(format!("tolerance {name} = {v} must be non-negative"));
            }
            *tolerances
                .slot(&name)
                .ok_or_else(|| format!("unknown tolerance `{name}`"))? = v;
        }

        let y = match &a.y {
            Some(s) => {
                let v: Result<Vec<f64>, _> = s.split(',').map(|c| c.trim().parse::<f64>()).collect();
                let v = v.map_err(|_| format!("--y `{s}` is not a comma-separated vector"))?;
                if v.len() != 2 * a.n {
                    return Err(format!("--y needs {} components, got {}", 2 * a.n, v.len()));
                }
                Some(v)
            }
            None => None,
        };

        Ok(RunConfig {
            command: cmd.name(),
            shape,
            n: a.n,
            k,
            radius,
            mode,
            count: a.count,
            trials,
            seed: a.seed,
            resolution,
            basis,
            field: a.field.clone(),
            h: a.h,
            y,
            json: a.json.clone(),
            csv: a.csv.clone(),
            tolerances,
            timings: a.timings,
        })
    }

    pub fn chart(&self) -> Chart {
        if self.radius == SHRINKER_RADIUS {
            make_shape(self.shape.id(), self.n, self.k).expect("validated shape")
        } else {
            ProductShape {
                n: self.n,
                k: self.k,
                radius: self.radius,
            }
            .chart(format!("{}(r={})", self.shape.id(), self.radius))
        }
    }

    /// Echo of the configuration; output paths are left out so that
    /// reports do not depend on where they are written.
    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "shape": self.shape.id(),
            "n": self.n,
            "k": self.k,
            "radius": self.radius,
            "mode": self.mode.id(),
            "count": self.count,
            "trials": self.trials,
            "seed": self.seed,
            "resolution": self.resolution,
            "basis": { "K": self.basis.fourier, "M": self.basis.hermite },
            "field": self.field,
            "h": self.h,
            "y": self.y,
            "tolerances": self.tolerances.to_json(),
        })
    }
}
