//! Boundary-integral toolkit for the free 3D Dirac operator with delta-shell
//! interactions: kernel, surface meshes, discretized Cauchy operator, critical
//! couplings, zero modes, and analytic sphere/plane benchmarks.

pub mod algebra;
pub mod error;
pub mod kernel;
pub mod mesh;

pub use algebra::{alpha, alpha_dot, alpha_dot_complex, alphas, beta, pauli, swap_tau, Spinor, SpinorMatrix};
pub use error::{Error, Result};
pub use kernel::{anticommutator_kernel, kernel_split, phi, phi_symbol, KernelParams, KernelSplit, KernelValue};
pub use mesh::{load_off, make_flat_patch, make_sphere, MeshSpec, Panel, SurfaceMesh};
pub use num_complex::Complex64;

pub mod boundary;
mod dense;
pub mod field;
pub mod plane;
pub mod quad;
pub mod spectra;
pub mod sphere;

pub use boundary::{
    assemble_anticommutator, assemble_anticommutator_direct, assemble_cauchy, assemble_k, assemble_normal_mult,
    clifford_identity_residual, factorization_residual, jump_operators, BoundaryOperator, DiscreteDensity,
};
pub use spectra::{
    build_lambda_t3, build_lambda_t4, critical_couplings, potential_residual, zero_mode_scan, PotentialKind, PotentialSpec,
    ScanOptions, SpectrumReport, ZeroModeResult, ZeroModeScanner,
};
