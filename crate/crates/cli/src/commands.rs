use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use diracshell::field::{field_check, reproducing_check, FieldOptions};
use diracshell::mesh::parse_mesh_list;
use diracshell::plane::{cauchy_symbol, energy_identity_check, lambda_symbol, s_symbol, symbol_modulus};
use diracshell::spectra::{
    critical_couplings_with, lambda_t4_scalar_closed_form, scan_with, SpectrumOptions, NORM_ITERATIONS,
};
use diracshell::sphere::{
    critical_lambda_roots, f_lambda, f_lambda_derivative, f_lambda_limits, quadratic_residual, SphereSolution,
};
use diracshell::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::exit::{ToleranceFailure, UsageError};
use crate::output::{read_density, write_csv, write_density};

/// A finished command: its JSON body and whether a declared tolerance failed.
pub struct Outcome {
    pub name: &'static str,
    pub body: Value,
    pub failure: Option<ToleranceFailure>,
}

impl Outcome {
    fn ok(name: &'static str, body: Value) -> Self {
        Self { name, body, failure: None }
    }
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::VerifyAlgebra(a) => verify_algebra(a),
        Command::VerifyKernel(a) => verify_kernel(a),
        Command::VerifyIdentity(a) => verify_identity(a),
        Command::Spectrum(a) => spectrum(a),
        Command::ZeroModes(a) => zero_modes(a),
        Command::OracleSphere(a) | Command::Oracle { which: OracleCommand::Sphere(a) } => oracle_sphere(a),
        Command::OraclePlane(a) | Command::Oracle { which: OracleCommand::Plane(a) } => oracle_plane(a),
        Command::FieldCheck(a) => field_check_cmd(a),
        Command::LambdaBuild(a) => lambda_build(a),
    }
}

fn params(m: &MassArg) -> Result<KernelParams> {
    Ok(KernelParams::new(m.m)?)
}

fn load_mesh(spec: &str) -> Result<(MeshSpec, SurfaceMesh)> {
    let spec: MeshSpec = spec.parse()?;
    let mesh = spec.load().with_context(|| format!("loading mesh {spec}"))?;
    Ok((spec, mesh))
}

fn range(v: &[f64], flag: &str) -> Result<(f64, f64)> {
    match v {
        [lo, hi] => Ok((*lo, *hi)),
        _ => Err(UsageError(format!("--{flag} expects two values `lo,hi`")).into()),
    }
}

fn dump(op: &BoundaryOperator, path: Option<&Path>) -> Result<()> {
    if let Some(p) = path {
        op.dump(p).with_context(|| format!("dumping operator to {}", p.display()))?;
        log::info!("wrote {}x{} operator to {}", op.dim(), op.dim(), p.display());
    }
    Ok(())
}

fn timed<T>(what: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t = Instant::now();
    let r = f();
    log::info!("{what}: {:.2?}", t.elapsed());
    r
}

fn rel_residual(a: &SpinorMatrix, b: &SpinorMatrix) -> f64 {
    (*a - *b).max_abs() / b.max_abs().max(1.0)
}

fn verify_algebra(a: &VerifyAlgebraArgs) -> Result<Outcome> {
    let al = alphas();
    let id = SpinorMatrix::identity();
    let mut anticomm = 0.0f64;
    for j in 0..3 {
        for k in 0..3 {
            let want = if j == k { id.scale_real(2.0) } else { SpinorMatrix::zero() };
            anticomm = anticomm.max((al[j].anticommutator(&al[k]) - want).max_abs());
        }
        anticomm = anticomm.max(al[j].anticommutator(&beta()).max_abs());
    }
    let beta_sq = (beta() * beta() - id).max_abs();
    let mut integer = 0.0f64;
    for v in [[1.0, 2.0, 2.0], [0.0, 0.0, 1.0], [-3.0, 4.0, 0.0], [2.0, -1.0, 7.0]] {
        let n2: f64 = v.iter().map(|c| c * c).sum();
        integer = integer.max((alpha_dot(v) * alpha_dot(v) - id.scale_real(n2)).max_abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut random = 0.0f64;
    for _ in 0..a.samples {
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-10.0..10.0));
        let n2: f64 = v.iter().map(|c| c * c).sum();
        random = random.max(rel_residual(&(alpha_dot(v) * alpha_dot(v)), &id.scale_real(n2)));
    }
    let exact_ok = anticomm == 0.0 && beta_sq == 0.0 && integer == 0.0;
    let pass = exact_ok && random <= a.tol;
    let body = json!({
        "anticommutation_residual": anticomm,
        "beta_square_residual": beta_sq,
        "integer_square_residual": integer,
        "random_samples": a.samples,
        "random_square_residual": random,
        "seed": a.seed,
        "tolerance": a.tol,
        "pass": pass,
    });
    let failure = (!pass).then(|| ToleranceFailure(format!("algebra residuals exact={exact_ok}, random={random:e}")));
    Ok(Outcome {
        name: "verify-algebra",
        body,
        failure,
    })
}

fn verify_kernel(a: &VerifyKernelArgs) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut per_mass = Vec::new();
    let mut pass = true;
    for &m in &a.masses {
        let p = KernelParams::new(m)?;
        let mut sym = 0.0f64;
        let mut inv = 0.0f64;
        for _ in 0..a.samples {
            let d = loop {
                let d: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-3.0..3.0));
                if d.iter().map(|c| c * c).sum::<f64>() > 1e-6 {
                    break d;
                }
            };
            let fwd = phi(d, p)?;
            let back = phi(d.map(|c| -c), p)?;
            sym = sym.max(rel_residual(&fwd, &back.adjoint()));
            let xi: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-10.0..10.0));
            let s = alpha_dot(xi.map(|c| 2.0 * std::f64::consts::PI * c)) + beta().scale_real(m);
            inv = inv.max((s * phi_symbol(xi, p) - SpinorMatrix::identity()).max_abs());
        }
        let ok = sym <= a.tol && inv <= a.tol;
        pass &= ok;
        per_mass.push(json!({"m": m, "symmetry_residual": sym, "fourier_inverse_residual": inv, "pass": ok}));
    }
    let failure = (!pass).then(|| ToleranceFailure("kernel residual above tolerance".into()));
    Ok(Outcome {
        name: "verify-kernel",
        body: json!({
            "masses": per_mass,
            "samples": a.samples,
            "seed": a.seed,
            "tolerance": a.tol,
            "pass": pass,
        }),
        failure,
    })
}

#[derive(Serialize)]
struct IdentityRow {
    mesh: String,
    level: Option<u32>,
    panels: usize,
    residual: f64,
}

fn verify_identity(a: &VerifyIdentityArgs) -> Result<Outcome> {
    let p = params(&a.mass)?;
    let specs = parse_mesh_list(&a.mesh)?;
    if specs.is_empty() {
        return Err(UsageError("--mesh lists no meshes".into()).into());
    }
    let mut rows = Vec::new();
    let mut last_c = None;
    for spec in &specs {
        let mesh = spec.load().with_context(|| format!("loading mesh {spec}"))?;
        let c = assemble_cauchy(&mesh, p)?;
        let m = assemble_normal_mult(&mesh)?;
        let residual = timed(&format!("clifford residual on {spec}"), || Ok(clifford_identity_residual(&c, &m)?))?;
        rows.push(IdentityRow {
            mesh: spec.to_string(),
            level: match spec {
                MeshSpec::Sphere { level, .. } => Some(*level),
                _ => None,
            },
            panels: mesh.len(),
            residual,
        });
        last_c = Some(c);
    }
    if let Some(c) = &last_c {
        dump(c, a.dump_operator.as_deref())?;
    }
    let ratios: Vec<f64> = rows.windows(2).map(|w| w[0].residual / w[1].residual).collect();
    let decreasing = rows.windows(2).all(|w| w[1].residual < w[0].residual);
    let pass = decreasing && ratios.iter().all(|&r| r >= a.factor);
    if let Some(path) = &a.csv {
        write_csv(path, &rows)?;
    }
    let body = json!({
        "m": p.m(),
        "rows": rows,
        "ratios": ratios,
        "required_factor": a.factor,
        "monotone_decreasing": decreasing,
        "pass": pass,
    });
    let failure = (!pass).then(|| {
        let list: Vec<String> = rows.iter().map(|r| format!("{}={:.4}", r.mesh, r.residual)).collect();
        ToleranceFailure(format!(
            "Clifford residual not decreasing by factor {} ({})",
            a.factor,
            list.join(", ")
        ))
    });
    Ok(Outcome {
        name: "verify-identity",
        body,
        failure,
    })
}

fn spectrum(a: &SpectrumArgs) -> Result<Outcome> {
    let p = params(&a.mass)?;
    let (spec, mesh) = load_mesh(&a.mesh)?;
    let c = assemble_cauchy(&mesh, p)?;
    let m = assemble_normal_mult(&mesh)?;
    let k = timed("assemble K", || Ok(assemble_k(&c, &m)?))?;
    dump(&k, a.dump_operator.as_deref())?;
    let opts = SpectrumOptions {
        residuals: !a.no_residuals,
    };
    let mut report = timed("eigen K", || Ok(critical_couplings_with(&k, opts)?))?;
    report.m = Some(p.m());
    let entries = report.entries();
    if let Some(path) = &a.csv {
        write_csv(path, &entries)?;
    }
    Ok(Outcome::ok(
        "spectrum",
        json!({
            "mesh": spec.to_string(),
            "panels": mesh.len(),
            "m": p.m(),
            "excluded": report.excluded,
            "lambda_values": report.lambda_values,
            "entries": entries,
        }),
    ))
}

#[derive(Serialize)]
struct CurveRow {
    lambda: f64,
    s_min: f64,
}

fn zero_modes(a: &ZeroModesArgs) -> Result<Outcome> {
    let p = params(&a.mass)?;
    let lr = range(&a.lambda_range, "lambda-range")?;
    let (spec, mesh) = load_mesh(&a.mesh)?;
    let c = assemble_cauchy(&mesh, p)?;
    dump(&c, a.dump_operator.as_deref())?;
    let (threshold, clifford) = match a.threshold {
        Some(t) => (t, None),
        None => {
            let m = assemble_normal_mult(&mesh)?;
            let r = timed("clifford residual", || Ok(clifford_identity_residual(&c, &m)?))?;
            (10.0 * r, Some(r))
        }
    };
    let scanner = timed("eigen C", || Ok(ZeroModeScanner::new(&c)?))?;
    let opts = ScanOptions {
        steps: a.steps,
        zero_threshold: Some(threshold),
        ..Default::default()
    };
    let rep = scan_with(&scanner, lr, opts)?;
    if let Some(path) = &a.csv {
        write_csv(path, rep.curve.iter().map(|&(lambda, s_min)| CurveRow { lambda, s_min }))?;
    }
    if let Some(path) = &a.density_out {
        match rep.results.first() {
            Some(best) => write_density(path, &best.density)?,
            None => log::warn!("no interior minimum in the range; {} not written", path.display()),
        }
    }
    Ok(Outcome::ok(
        "zero-modes",
        json!({
            "mesh": spec.to_string(),
            "panels": mesh.len(),
            "m": p.m(),
            "lambda_range": [lr.0, lr.1],
            "steps": a.steps,
            "threshold": threshold,
            "clifford_residual": clifford,
            "hermitian_route": rep.hermitian_route,
            "results": rep.results,
        }),
    ))
}

#[derive(Serialize)]
struct ProfileRow {
    r: f64,
    f_low: f64,
    f_high: f64,
    df_low: f64,
    df_high: f64,
}

fn oracle_sphere(a: &OracleSphereArgs) -> Result<Outcome> {
    let p = params(&a.mass)?;
    let sol = SphereSolution::new(p);
    let (lo, hi) = critical_lambda_roots(p);
    let n = a.table_points.max(1);
    let mut table = Vec::with_capacity(n);
    for k in 0..n {
        let r = 3.0 * (k as f64 + 0.5) / n as f64;
        if r == 1.0 {
            continue;
        }
        table.push(ProfileRow {
            r,
            f_low: f_lambda(r, lo, p)?,
            f_high: f_lambda(r, hi, p)?,
            df_low: f_lambda_derivative(r, lo, p)?,
            df_high: f_lambda_derivative(r, hi, p)?,
        });
    }
    if let Some(path) = &a.csv {
        write_csv(path, &table)?;
    }
    let limits = |l: f64| {
        let (inside, outside) = f_lambda_limits(l, p);
        json!({"inside": inside, "outside": outside})
    };
    Ok(Outcome::ok(
        "oracle-sphere",
        json!({
            "m": p.m(),
            "roots": [lo, hi],
            "quadratic_residuals": [quadratic_residual(p, lo), quadratic_residual(p, hi)],
            "vieta_product": lo * hi,
            "f_inside_coeff": sol.f_inside_coeff,
            "f_outside_coeff": sol.f_outside_coeff,
            "limits_at_shell": [limits(lo), limits(hi)],
            "table": table,
        }),
    ))
}

fn oracle_plane(a: &OraclePlaneArgs) -> Result<Outcome> {
    let p = params(&a.mass)?;
    let xi: [f64; 2] = match a.xi.as_slice() {
        [x, y] => [*x, *y],
        _ => return Err(UsageError("--xi expects `xi1,xi2`".into()).into()),
    };
    if a.h.len() != 8 {
        return Err(UsageError("--h expects 8 reals".into()).into());
    }
    let h = Spinor::new(std::array::from_fn(|k| Complex64::new(a.h[2 * k], a.h[2 * k + 1])));
    let lam = lambda_symbol(xi, p);
    let cs = cauchy_symbol(xi, p);
    let (sh, pp, pm) = s_symbol(xi, p);
    let s = symbol_modulus(xi, p.m());
    let id = SpinorMatrix::identity();
    let s_square = (sh.value * sh.value - id.scale_real(s * s)).max_abs() / (s * s).max(1.0);
    let projector = (pp.value * pp.value - pp.value).max_abs().max((pm.value * pm.value - pm.value).max_abs());
    let e = energy_identity_check(xi, p, h)?;
    Ok(Outcome::ok(
        "oracle-plane",
        json!({
            "m": p.m(),
            "xi": xi,
            "symbol_modulus": s,
            "lambda_eigenvalues": lam.eigenvalues()?,
            "cauchy_eigenvalues": cs.eigenvalues()?,
            "residuals": {
                "lambda_hermiticity": lam.hermiticity_defect(),
                "s_square": s_square,
                "projector": projector,
            },
            "energy_identity": {
                "lhs": e.lhs,
                "rhs": e.rhs,
                "relative_gap": e.relative_gap(),
                "leakage": e.leakage,
                "quadrature_error": e.quadrature_error,
            },
        }),
    ))
}

fn field_check_cmd(a: &FieldCheckArgs) -> Result<Outcome> {
    let p = params(&a.mass)?;
    let (spec, mesh) = load_mesh(&a.mesh)?;
    let c = assemble_cauchy(&mesh, p)?;
    let m = assemble_normal_mult(&mesh)?;
    let (g, source) = match a.density.as_str() {
        "constant" => (DiscreteDensity::constant(&mesh, Spinor::from_real([1.0, 0.0, 0.0, 0.0])), json!("constant")),
        "zero-mode" => {
            let lr = range(&a.lambda_range, "lambda-range")?;
            let scanner = timed("eigen C", || Ok(ZeroModeScanner::new(&c)?))?;
            let rep = scan_with(&scanner, lr, ScanOptions::default())?;
            let best = rep
                .results
                .into_iter()
                .next()
                .ok_or_else(|| UsageError(format!("no s_min minimum inside --lambda-range {},{}", lr.0, lr.1)))?;
            let lambda = best.lambda_star;
            (best.density, json!({"zero_mode": lambda}))
        }
        path => (read_density(Path::new(path), &mesh)?, json!({"file": path})),
    };
    let report = timed("field check", || {
        Ok(field_check(&mesh, &c, &m, &g, p, &[1.0, 0.5, 0.25], a.samples, &FieldOptions::default())?)
    })?;
    let reproducing = match spec {
        MeshSpec::Sphere { radius, .. } if radius == 1.0 => {
            let x: [f64; 3] = match a.point.as_slice() {
                [x, y, z] => [*x, *y, *z],
                _ => return Err(UsageError("--point expects `x,y,z`".into()).into()),
            };
            let (_, hi) = critical_lambda_roots(p);
            Some(reproducing_check(&mesh, x, hi, p)?)
        }
        _ => None,
    };
    Ok(Outcome::ok(
        "field-check",
        json!({
            "mesh": spec.to_string(),
            "panels": mesh.len(),
            "m": p.m(),
            "density": source,
            "h": report.h,
            "sampled_panels": report.sampled_panels,
            "rows": report.rows,
            "deviations_decrease": report.deviations_decrease(),
            "reproducing": reproducing,
        }),
    ))
}

fn lambda_build(a: &LambdaBuildArgs) -> Result<Outcome> {
    let p = params(&a.mass)?;
    let (mesh_spec, mesh) = load_mesh(&a.mesh)?;
    let kind: PotentialKind = a.kind.parse()?;
    let cc = match a.c.as_slice() {
        [re, im] => Complex64::new(*re, *im),
        _ => return Err(UsageError("--c expects `re,im`".into()).into()),
    };
    let spec = match kind {
        PotentialKind::ScalarLambda => PotentialSpec::scalar(a.lambda, cc),
        PotentialKind::NormalAlpha => PotentialSpec::normal_alpha(a.lambda, cc),
        PotentialKind::CauchyCombo => PotentialSpec::cauchy_combo(a.r, a.s, cc),
        PotentialKind::NeumannSmall => PotentialSpec::neumann_small(a.lambda, a.delta, cc),
    };
    let c = assemble_cauchy(&mesh, p)?;
    let m = assemble_normal_mult(&mesh)?;
    let c_sym = c.w_symmetry_residual();
    let mut body = json!({
        "mesh": mesh_spec.to_string(),
        "panels": mesh.len(),
        "m": p.m(),
        "potential": spec,
        "cauchy_w_symmetry_residual": c_sym,
    });
    let extra = match a.construction {
        Construction::T4 => {
            let op = timed("build t4", || Ok(build_lambda_t4(&c, &m, &spec)?))?;
            let closed = if kind == PotentialKind::ScalarLambda && cc == Complex64::new(0.5, 0.0) {
                let cf = lambda_t4_scalar_closed_form(&c, &m, a.lambda)?;
                let diff = op.combine(Complex64::new(1.0, 0.0), &cf, Complex64::new(-1.0, 0.0))?;
                Some(diff.frobenius_norm() / cf.frobenius_norm().max(f64::MIN_POSITIVE))
            } else {
                None
            };
            dump(&op, a.dump_operator.as_deref())?;
            json!({
                "construction": "t4",
                "frobenius_norm": op.frobenius_norm(),
                "hermiticity_residual": op.w_symmetry_residual(),
                "closed_form_residual": closed,
            })
        }
        Construction::T3 => {
            let out = timed("build t3", || Ok(build_lambda_t3(&c, &m, &spec)?))?;
            dump(&out.operator, a.dump_operator.as_deref())?;
            json!({
                "construction": "t3",
                "frobenius_norm": out.operator.frobenius_norm(),
                "hermiticity_residual": out.hermiticity_residual,
                "omega_norm": out.omega_norm,
                "cauchy_norm": out.cauchy_norm,
                "norm_iterations": NORM_ITERATIONS,
                "neumann_factor": out.neumann_factor,
                "neumann_product": out.neumann_product,
            })
        }
    };
    if let (Value::Object(b), Value::Object(e)) = (&mut body, extra) {
        b.extend(e);
    }
    Ok(Outcome::ok("lambda-build", body))
}
