use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "diracshell", version, about = "Boundary-integral runs for Dirac delta-shell interactions")]
pub struct Cli {
    /// Flat `key = value` file; values apply where no flag or environment
    /// variable is given.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Clifford relations of the Dirac matrices.
    VerifyAlgebra(VerifyAlgebraArgs),
    /// Adjoint symmetry and Fourier inverse of the kernel.
    VerifyKernel(VerifyKernelArgs),
    /// Clifford identity -4 (C N)^2 = I over a list of meshes.
    VerifyIdentity(VerifyIdentityArgs),
    /// Eigenvalues of K and the critical couplings.
    Spectrum(SpectrumArgs),
    /// Minima of the smallest singular value of I + lambda C.
    ZeroModes(ZeroModesArgs),
    /// Unit-sphere closed forms.
    OracleSphere(OracleSphereArgs),
    /// Plane Fourier symbols and the energy identity.
    OraclePlane(OraclePlaneArgs),
    /// Same as oracle-sphere / oracle-plane.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
    /// Off-surface single layer against the trace operators.
    FieldCheck(FieldCheckArgs),
    /// Assemble a self-adjointness operator Lambda.
    LambdaBuild(LambdaBuildArgs),
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    Sphere(OracleSphereArgs),
    Plane(OraclePlaneArgs),
}

#[derive(Args, Debug)]
pub struct MassArg {
    #[arg(long, env = "DIRACSHELL_M", default_value_t = 1.0, allow_hyphen_values = true)]
    pub m: f64,
}

#[derive(Args, Debug)]
pub struct VerifyAlgebraArgs {
    #[arg(long, env = "DIRACSHELL_SAMPLES", default_value_t = 100)]
    pub samples: usize,
    #[arg(long, env = "DIRACSHELL_SEED", default_value_t = 7)]
    pub seed: u64,
    #[arg(long, env = "DIRACSHELL_TOL", default_value_t = 1e-14)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct VerifyKernelArgs {
    /// Comma-separated masses.
    #[arg(long, env = "DIRACSHELL_MASSES", value_delimiter = ',', default_value = "0.5,1,2")]
    pub masses: Vec<f64>,
    #[arg(long, env = "DIRACSHELL_SAMPLES", default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, env = "DIRACSHELL_SEED", default_value_t = 7)]
    pub seed: u64,
    #[arg(long, env = "DIRACSHELL_TOL", default_value_t = 1e-13)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct VerifyIdentityArgs {
    /// Comma-separated mesh specs, e.g. `sphere:1,sphere:2,sphere:3`.
    #[arg(long, env = "DIRACSHELL_MESH", default_value = "sphere:1,sphere:2")]
    pub mesh: String,
    #[command(flatten)]
    pub mass: MassArg,
    /// Required reduction factor between consecutive meshes.
    #[arg(long, env = "DIRACSHELL_FACTOR", default_value_t = 1.0)]
    pub factor: f64,
    /// CSV of (mesh, panels, residual).
    #[arg(long, env = "DIRACSHELL_CSV")]
    pub csv: Option<PathBuf>,
    /// Dump the Cauchy operator of the last mesh.
    #[arg(long, env = "DIRACSHELL_DUMP_OPERATOR")]
    pub dump_operator: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long, env = "DIRACSHELL_MESH")]
    pub mesh: String,
    #[command(flatten)]
    pub mass: MassArg,
    /// Skip eigenvectors and per-eigenvalue residuals.
    #[arg(long, env = "DIRACSHELL_NO_RESIDUALS")]
    pub no_residuals: bool,
    /// CSV of (a, lambda, residual).
    #[arg(long, env = "DIRACSHELL_CSV")]
    pub csv: Option<PathBuf>,
    /// Dump the assembled K.
    #[arg(long, env = "DIRACSHELL_DUMP_OPERATOR")]
    pub dump_operator: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ZeroModesArgs {
    #[arg(long, env = "DIRACSHELL_MESH")]
    pub mesh: String,
    #[command(flatten)]
    pub mass: MassArg,
    /// `lo,hi`.
    #[arg(long, env = "DIRACSHELL_LAMBDA_RANGE", value_delimiter = ',', default_value = "1,3", allow_hyphen_values = true)]
    pub lambda_range: Vec<f64>,
    #[arg(long, env = "DIRACSHELL_STEPS", default_value_t = 401)]
    pub steps: usize,
    /// `s_min` below this marks a zero mode; defaults to 10x the Clifford residual.
    #[arg(long, env = "DIRACSHELL_THRESHOLD")]
    pub threshold: Option<f64>,
    /// CSV of the scanned curve (lambda, s_min).
    #[arg(long, env = "DIRACSHELL_CSV")]
    pub csv: Option<PathBuf>,
    /// Write the best density as N x 8 CSV.
    #[arg(long, env = "DIRACSHELL_DENSITY_OUT")]
    pub density_out: Option<PathBuf>,
    /// Dump the Cauchy operator.
    #[arg(long, env = "DIRACSHELL_DUMP_OPERATOR")]
    pub dump_operator: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleSphereArgs {
    #[command(flatten)]
    pub mass: MassArg,
    /// CSV of the radial profile for both roots.
    #[arg(long, env = "DIRACSHELL_CSV")]
    pub csv: Option<PathBuf>,
    #[arg(long, env = "DIRACSHELL_TABLE_POINTS", default_value_t = 16)]
    pub table_points: usize,
}

#[derive(Args, Debug)]
pub struct OraclePlaneArgs {
    #[command(flatten)]
    pub mass: MassArg,
    /// `xi1,xi2`.
    #[arg(long, env = "DIRACSHELL_XI", value_delimiter = ',', default_value = "0.5,0.5", allow_hyphen_values = true)]
    pub xi: Vec<f64>,
    /// Trial vector, 8 reals (re/im interleaved).
    #[arg(long, env = "DIRACSHELL_H", value_delimiter = ',', default_value = "1,0,0,0,0,0,0,0", allow_hyphen_values = true)]
    pub h: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct FieldCheckArgs {
    #[arg(long, env = "DIRACSHELL_MESH", default_value = "sphere:3")]
    pub mesh: String,
    #[command(flatten)]
    pub mass: MassArg,
    /// `constant`, `zero-mode`, or a CSV path (N rows x 8 reals).
    #[arg(long, env = "DIRACSHELL_DENSITY", default_value = "constant")]
    pub density: String,
    /// Scan range used by `--density zero-mode`.
    #[arg(long, env = "DIRACSHELL_LAMBDA_RANGE", value_delimiter = ',', default_value = "1.5,3", allow_hyphen_values = true)]
    pub lambda_range: Vec<f64>,
    #[arg(long, env = "DIRACSHELL_SAMPLES", default_value_t = 8)]
    pub samples: usize,
    /// Interior point for the reproducing-formula check (spheres only).
    #[arg(long, env = "DIRACSHELL_POINT", value_delimiter = ',', default_value = "0.2,0,0", allow_hyphen_values = true)]
    pub point: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    T4,
    T3,
}

#[derive(Args, Debug)]
pub struct LambdaBuildArgs {
    #[arg(long, env = "DIRACSHELL_MESH", default_value = "sphere:1")]
    pub mesh: String,
    #[command(flatten)]
    pub mass: MassArg,
    #[arg(long, env = "DIRACSHELL_CONSTRUCTION", value_enum, default_value = "t4")]
    pub construction: Construction,
    /// scalar-lambda, normal-alpha, cauchy-combo or neumann-small.
    #[arg(long, env = "DIRACSHELL_KIND", default_value = "scalar-lambda")]
    pub kind: String,
    #[arg(long, env = "DIRACSHELL_LAMBDA", default_value_t = 1.0, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, env = "DIRACSHELL_R", default_value_t = 1.0, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long, env = "DIRACSHELL_S", default_value_t = 1.0, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, env = "DIRACSHELL_DELTA", default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta: f64,
    /// `re,im`.
    #[arg(long, env = "DIRACSHELL_C", value_delimiter = ',', default_value = "0.5,0", allow_hyphen_values = true)]
    pub c: Vec<f64>,
    #[arg(long, env = "DIRACSHELL_DUMP_OPERATOR")]
    pub dump_operator: Option<PathBuf>,
}
