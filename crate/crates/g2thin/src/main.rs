//! Command-line harness for the numerical experiments: exact algebra
//! self-checks, thin-cylinder spectral gap reports, inverse-norm scaling
//! studies, linearization agreement, and quantitative Newton runs.
//!
//! Configuration comes from flags or a plain-text key=value file (flags
//! override the file). Exit codes: 0 pass, 1 invariant failure, 2 numerical
//! non-convergence, 3 admissibility failure, 64 usage error.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use g2thin::calibration::{cayley_dickson_frame, structure_constant_residual, Frame};
use g2thin::cylinder::{
    DiscreteOperator, Scheme, SpinorGrid, ThinCylinderGrid, TwistedBundle, WarpProfile,
};
use g2thin::linearization::{
    dolbeault_agreement, fd_linearization, fd_linearization_order, twisted_dirac_flat, FieldMode,
    JetSample, NormalField,
};
use g2thin::newton::toy_instanton;
use g2thin::octonion::{cross_exact, tau_formula, tau_table, ImOcton, IVec7};
use g2thin::report::{scaling_csv, spectrum_csv, write_snapshot, write_text, Envelope};
use g2thin::spectral::{
    inverse_scaling_experiment, kernel_dimension, lambda_d, verify_lambda_bound, BoundaryClass,
};
use g2thin::Error;

#[derive(Parser)]
#[command(name = "g2thin", version, about = "Thin-cylinder Dirac laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the exact cross-product and form tables
    AlgebraSelfcheck(AlgebraArgs),
    /// Spectral gap of the assembled operator against the closed-form bound
    Spectrum(SpectrumArgs),
    /// Inverse sup-norm growth across a thickness sweep
    Scaling(ScalingArgs),
    /// Agreement of the three linearization routes
    Linearize(LinearizeArgs),
    /// Quantitative Newton solve of the toy quadratic perturbation
    Newton(NewtonArgs),
}

#[derive(Args)]
struct AlgebraArgs {
    /// emit a machine-readable JSON record instead of the summary table
    #[arg(long)]
    json: bool,
    /// fault-injection hook: corrupt the table entry for triple "i,j,k"
    #[arg(long, value_name = "I,J,K")]
    corrupt_entry: Option<String>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    n3: Option<usize>,
    /// twist angles alpha beta
    #[arg(long, num_args = 2, value_names = ["ALPHA", "BETA"])]
    twist: Option<Vec<f64>>,
    /// warp profile: "const:c" or "cosine:c0,c1,K"
    #[arg(long)]
    warp: Option<String>,
    /// pass tolerance on the bound margin
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    json_out: Option<PathBuf>,
    #[arg(long)]
    csv_out: Option<PathBuf>,
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// comma-separated strictly decreasing thickness list
    #[arg(long)]
    epsilons: Option<String>,
    /// axial resolution at the largest thickness
    #[arg(long)]
    m0: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    n3: Option<usize>,
    #[arg(long, num_args = 2, value_names = ["ALPHA", "BETA"])]
    twist: Option<Vec<f64>>,
    #[arg(long)]
    warp_const: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    alpha_holder: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json_out: Option<PathBuf>,
    #[arg(long)]
    csv_out: Option<PathBuf>,
}

#[derive(Args)]
struct LinearizeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// number of random seed frames and jets
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct NewtonArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    n3: Option<usize>,
    #[arg(long, num_args = 2, value_names = ["ALPHA", "BETA"])]
    twist: Option<Vec<f64>>,
    #[arg(long)]
    warp_const: Option<f64>,
    /// quadratic coupling strength
    #[arg(long)]
    gamma: Option<f64>,
    /// sup-norm amplitude of the right-hand side
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    json_out: Option<PathBuf>,
    /// write the solution field as a binary snapshot
    #[arg(long)]
    snapshot: Option<PathBuf>,
}

enum CliFail {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliFail {
    fn from(e: Error) -> Self {
        CliFail::Lib(e)
    }
}

impl From<String> for CliFail {
    fn from(s: String) -> Self {
        CliFail::Usage(s)
    }
}

type CmdResult = Result<u8, CliFail>;

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::NonConvergence(_) | Error::GridInvalid(_) | Error::ZeroTwistSingular { .. } => 2,
        Error::Inadmissible { .. } => 3,
        Error::Underdetermined(_) => 64,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                0
            } else {
                64
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = match cli.command {
        Command::AlgebraSelfcheck(a) => cmd_algebra(&a),
        Command::Spectrum(a) => cmd_spectrum(&a),
        Command::Scaling(a) => cmd_scaling(&a),
        Command::Linearize(a) => cmd_linearize(&a),
        Command::Newton(a) => cmd_newton(&a),
    };
    match out {
        Ok(code) => ExitCode::from(code),
        Err(CliFail::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(64)
        }
        Err(CliFail::Lib(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_for(&err))
        }
    }
}

fn file_map(path: &Option<PathBuf>) -> Result<HashMap<String, String>, String> {
    let mut map = HashMap::new();
    if let Some(p) = path {
        let text =
            std::fs::read_to_string(p).map_err(|e| format!("config {}: {e}", p.display()))?;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("config line is not key=value: {line:?}"))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok(map)
}

fn resolve<T: FromStr>(
    flag: Option<T>,
    map: &HashMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, String> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match map.get(key) {
        Some(s) => s
            .parse()
            .map_err(|_| format!("config key {key}: cannot parse {s:?}")),
        None => Ok(default),
    }
}

fn resolve_twist(
    flag: &Option<Vec<f64>>,
    map: &HashMap<String, String>,
    default: (f64, f64),
) -> Result<(f64, f64), String> {
    if let Some(t) = flag {
        return Ok((t[0], t[1]));
    }
    let a = resolve(None, map, "alpha", default.0)?;
    let b = resolve(None, map, "beta", default.1)?;
    Ok((a, b))
}

fn parse_warp(spec: &str, n2: usize, n3: usize) -> Result<WarpProfile, CliFail> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| format!("warp spec {spec:?}: expected const:c or cosine:c0,c1,K"))?;
    let nums: Vec<f64> = rest
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("warp spec {spec:?}: bad number {s:?}"))
        })
        .collect::<Result<_, String>>()?;
    match (kind, nums.as_slice()) {
        ("const", [c]) => Ok(WarpProfile::constant(n2, n3, *c)?),
        ("cosine", [c0, c1, k]) => Ok(WarpProfile::cosine(n2, n3, *c0, *c1, *k)?),
        _ => Err(CliFail::Usage(format!(
            "warp spec {spec:?}: expected const:c or cosine:c0,c1,K"
        ))),
    }
}

fn emit(json_out: &Option<PathBuf>, json: &str) -> Result<(), CliFail> {
    if let Some(path) = json_out {
        write_text(path, json)?;
    }
    Ok(())
}

// ---------------------------------------------------------------- algebra

#[derive(Serialize)]
struct AlgebraRecord {
    triples_checked: usize,
    failed_triple: Option<[usize; 3]>,
    cross_orthogonality_max: f64,
    cross_norm_identity_max: f64,
    frame_closure_residual: f64,
}

fn cmd_algebra(args: &AlgebraArgs) -> CmdResult {
    let corrupt: Option<[usize; 3]> = match &args.corrupt_entry {
        Some(s) => {
            let parts: Vec<usize> = s
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| format!("corrupt-entry {s:?}: expected i,j,k"))
                })
                .collect::<Result<_, String>>()?;
            if parts.len() != 3 {
                return Err(CliFail::Usage(format!(
                    "corrupt-entry {s:?}: expected three indices"
                )));
            }
            Some([parts[0], parts[1], parts[2]])
        }
        None => None,
    };
    let table = tau_table();
    let mut checked = 0usize;
    let mut failed: Option<[usize; 3]> = None;
    'outer: for i in 1..=7usize {
        for j in (i + 1)..=7 {
            for k in (j + 1)..=7 {
                let formula = tau_formula(
                    &ImOcton::basis(i),
                    &ImOcton::basis(j),
                    &ImOcton::basis(k),
                );
                let mut entry = table.eval_basis(i, j, k);
                if corrupt == Some([i, j, k]) {
                    for x in entry.iter_mut() {
                        if *x != 0.0 {
                            *x = -*x;
                            break;
                        }
                    }
                    if entry.iter().all(|&x| x == 0.0) {
                        entry[0] = 1.0;
                    }
                }
                checked += 1;
                if formula.c != entry {
                    failed = Some([i, j, k]);
                    break 'outer;
                }
            }
        }
    }
    // cross-product axioms on a seeded random sample, exact on integer pairs
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut ortho_max: f64 = 0.0;
    let mut norm_max: f64 = 0.0;
    for _ in 0..1000 {
        let a: IVec7 = std::array::from_fn(|_| rng.gen_range(-4i64..=4));
        let b: IVec7 = std::array::from_fn(|_| rng.gen_range(-4i64..=4));
        let c = cross_exact(&a, &b);
        let dot = |x: &IVec7, y: &IVec7| x.iter().zip(y.iter()).map(|(p, q)| p * q).sum::<i64>();
        ortho_max = ortho_max.max(dot(&c, &a).abs() as f64).max(dot(&c, &b).abs() as f64);
        let lhs = dot(&c, &c);
        let rhs = dot(&a, &a) * dot(&b, &b) - dot(&a, &b) * dot(&a, &b);
        norm_max = norm_max.max((lhs - rhs).abs() as f64);
    }
    let closure = structure_constant_residual(&Frame::standard());
    let record = AlgebraRecord {
        triples_checked: checked,
        failed_triple: failed,
        cross_orthogonality_max: ortho_max,
        cross_norm_identity_max: norm_max,
        frame_closure_residual: closure,
    };
    if args.json {
        println!("{}", Envelope::new((), record).to_json()?);
    } else {
        println!("table triples checked   {checked}");
        println!("cross orthogonality max {ortho_max:.3e}");
        println!("cross norm identity max {norm_max:.3e}");
        println!("frame closure residual  {closure:.3e}");
        match failed {
            Some([i, j, k]) => println!("FAILED at triple ({i},{j},{k})"),
            None => println!("all identities verified"),
        }
    }
    if let Some([i, j, k]) = failed {
        eprintln!("table mismatch at triple ({i},{j},{k})");
        return Ok(1);
    }
    if ortho_max != 0.0 || norm_max != 0.0 || closure > 1e-12 {
        return Ok(1);
    }
    Ok(0)
}

// --------------------------------------------------------------- spectrum

#[derive(Serialize, Clone)]
struct SpectrumCfg {
    epsilon: f64,
    m: usize,
    n2: usize,
    n3: usize,
    alpha: f64,
    beta: f64,
    warp: String,
    tol: f64,
}

#[derive(Serialize)]
struct ZeroTwistRecord {
    lambda_d: f64,
    kernel_dim_minus: usize,
    kernel_dim_plus: usize,
}

fn cmd_spectrum(args: &SpectrumArgs) -> CmdResult {
    let map = file_map(&args.config)?;
    let cfg = SpectrumCfg {
        epsilon: resolve(args.epsilon, &map, "epsilon", 0.25)?,
        m: resolve(args.m, &map, "m", 24)?,
        n2: resolve(args.n2, &map, "n2", 8)?,
        n3: resolve(args.n3, &map, "n3", 8)?,
        alpha: resolve_twist(&args.twist, &map, (0.5, 0.5))?.0,
        beta: resolve_twist(&args.twist, &map, (0.5, 0.5))?.1,
        warp: resolve(args.warp.clone(), &map, "warp", "const:1".into())?,
        tol: resolve(args.tol, &map, "tol", 1e-6)?,
    };
    let warp = parse_warp(&cfg.warp, cfg.n2, cfg.n3)?;
    let grid = ThinCylinderGrid::new(cfg.epsilon, cfg.m, cfg.n2, cfg.n3)?;
    let twist = TwistedBundle::new(cfg.alpha, cfg.beta)?;
    let op = DiscreteOperator::assemble(grid, twist, warp, Scheme::Box2)?;
    if op.twist.is_zero() {
        let lam = lambda_d(&op)?;
        let minus = kernel_dimension(&op, 1e-8, BoundaryClass::Minus)?;
        let plus = kernel_dimension(&op, 1e-8, BoundaryClass::Plus)?;
        let record = ZeroTwistRecord {
            lambda_d: lam,
            kernel_dim_minus: minus,
            kernel_dim_plus: plus,
        };
        let json = Envelope::new(cfg.clone(), &record).to_json()?;
        emit(&args.json_out, &json)?;
        println!(
            "zero twist: lambda_D = {lam:.3e}, kernel dim (minus class) = {minus}, (plus class) = {plus}"
        );
        return Ok(if minus == 2 { 0 } else { 1 });
    }
    let rep = verify_lambda_bound(&op)?;
    let json = Envelope::new(cfg.clone(), &rep).to_json()?;
    emit(&args.json_out, &json)?;
    if let Some(path) = &args.csv_out {
        write_text(path, &spectrum_csv(cfg.epsilon, cfg.alpha, cfg.beta, &rep))?;
    }
    println!(
        "lambda_surface = {:.6}  lambda_D = {:.6}  bound = {:.6}  margin = {:+.3e}",
        rep.lambda_surface_minus, rep.lambda_d, rep.bound, rep.margin
    );
    Ok(if rep.margin >= -cfg.tol { 0 } else { 1 })
}

// ---------------------------------------------------------------- scaling

#[derive(Serialize, Clone)]
struct ScalingCfg {
    epsilons: Vec<f64>,
    m0: usize,
    n2: usize,
    n3: usize,
    alpha: f64,
    beta: f64,
    warp_const: f64,
    p: f64,
    alpha_holder: f64,
    seed: u64,
}

fn cmd_scaling(args: &ScalingArgs) -> CmdResult {
    let map = file_map(&args.config)?;
    let eps_spec = resolve(
        args.epsilons.clone(),
        &map,
        "epsilons",
        "0.4,0.2,0.1,0.05,0.025".into(),
    )?;
    let epsilons: Vec<f64> = eps_spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("epsilon list: bad number {s:?}"))
        })
        .collect::<Result<_, String>>()?;
    let (alpha, beta) = resolve_twist(&args.twist, &map, (0.5, 0.5))?;
    let cfg = ScalingCfg {
        epsilons,
        m0: resolve(args.m0, &map, "m0", 16)?,
        n2: resolve(args.n2, &map, "n2", 8)?,
        n3: resolve(args.n3, &map, "n3", 8)?,
        alpha,
        beta,
        warp_const: resolve(args.warp_const, &map, "warp_const", 1.0)?,
        p: resolve(args.p, &map, "p", 12.0)?,
        alpha_holder: resolve(args.alpha_holder, &map, "alpha_holder", 1.0 / 12.0)?,
        seed: resolve(args.seed, &map, "seed", 0)?,
    };
    let twist = TwistedBundle::new(cfg.alpha, cfg.beta)?;
    let rep = inverse_scaling_experiment(
        &cfg.epsilons,
        cfg.m0,
        &twist,
        cfg.n2,
        cfg.n3,
        cfg.warp_const,
        cfg.p,
        cfg.alpha_holder,
        cfg.seed,
    )?;
    let json = Envelope::new(cfg.clone(), &rep).to_json()?;
    emit(&args.json_out, &json)?;
    if let Some(path) = &args.csv_out {
        write_text(path, &scaling_csv(&rep))?;
    }
    for i in 0..rep.epsilons.len() {
        println!(
            "epsilon {:7.4}  inverse-norm {:10.4}  sigma_min {:.6}",
            rep.epsilons[i], rep.inverse_sup_norms[i], rep.sigma_mins[i]
        );
    }
    println!(
        "fitted exponent {:.4} (target {:.4})",
        rep.fitted_exponent, rep.target_exponent
    );
    Ok(if rep.fitted_exponent <= rep.target_exponent + 0.1 {
        0
    } else {
        1
    })
}

// -------------------------------------------------------------- linearize

#[derive(Serialize, Clone)]
struct LinearizeCfg {
    samples: usize,
    seed: u64,
}

#[derive(Serialize)]
struct LinearizeRecord {
    max_route_deviation: f64,
    fd_max_deviation: f64,
    fd_order: f64,
}

fn random_unit(rng: &mut ChaCha8Rng) -> ImOcton {
    loop {
        let v = ImOcton::new(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        if v.norm() > 0.3 {
            return v.scale(1.0 / v.norm());
        }
    }
}

fn random_frame(rng: &mut ChaCha8Rng) -> Frame {
    loop {
        let w1 = random_unit(rng);
        let mut w2 = random_unit(rng);
        w2 = w2.sub(&w1.scale(w1.dot(&w2)));
        if w2.norm() < 0.3 {
            continue;
        }
        w2 = w2.scale(1.0 / w2.norm());
        let w3 = w1.cross(&w2);
        let mut w4 = random_unit(rng);
        for b in [&w1, &w2, &w3] {
            w4 = w4.sub(&b.scale(b.dot(&w4)));
        }
        if w4.norm() < 0.3 {
            continue;
        }
        w4 = w4.scale(1.0 / w4.norm());
        if let Ok(f) = cayley_dickson_frame(&w1, &w2, &w4) {
            return f;
        }
    }
}

fn cmd_linearize(args: &LinearizeArgs) -> CmdResult {
    let map = file_map(&args.config)?;
    let cfg = LinearizeCfg {
        samples: resolve(args.samples, &map, "samples", 100)?,
        seed: resolve(args.seed, &map, "seed", 0)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut max_dev: f64 = 0.0;
    for _ in 0..cfg.samples {
        let frame = random_frame(&mut rng);
        if structure_constant_residual(&frame) > 1e-10 {
            continue;
        }
        let jet = JetSample {
            v: std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0))),
        };
        max_dev = max_dev.max(dolbeault_agreement(&frame, &jet)?);
    }
    // finite-difference route against the closed form on a band-limited field
    let field = NormalField::band_limited(
        8,
        &[
            FieldMode {
                component: 0,
                k: [1, 0, 0],
                amplitude: 0.7,
                phase: 0.3,
            },
            FieldMode {
                component: 2,
                k: [0, 1, 1],
                amplitude: 0.5,
                phase: 1.1,
            },
            FieldMode {
                component: 3,
                k: [1, -1, 0],
                amplitude: 0.4,
                phase: 2.0,
            },
        ],
    );
    let fd = fd_linearization(&field);
    let exact = twisted_dirac_flat(&field);
    let fd_dev = fd
        .iter()
        .zip(&exact)
        .map(|(a, b)| a.sub(b).norm())
        .fold(0.0f64, f64::max);
    let order = fd_linearization_order(&field, 0.05);
    let record = LinearizeRecord {
        max_route_deviation: max_dev,
        fd_max_deviation: fd_dev,
        fd_order: order,
    };
    let json = Envelope::new(cfg.clone(), &record).to_json()?;
    emit(&args.json_out, &json)?;
    println!(
        "route agreement max deviation {max_dev:.3e}; finite-difference deviation {fd_dev:.3e} (order {order:.2})"
    );
    Ok(if max_dev <= 1e-9 && fd_dev <= 1e-6 { 0 } else { 1 })
}

// ----------------------------------------------------------------- newton

#[derive(Serialize, Clone)]
struct NewtonCfg {
    epsilon: f64,
    m: usize,
    n2: usize,
    n3: usize,
    alpha: f64,
    beta: f64,
    warp_const: f64,
    gamma: f64,
    amplitude: f64,
}

fn cmd_newton(args: &NewtonArgs) -> CmdResult {
    let map = file_map(&args.config)?;
    let (alpha, beta) = resolve_twist(&args.twist, &map, (0.5, 0.5))?;
    let cfg = NewtonCfg {
        epsilon: resolve(args.epsilon, &map, "epsilon", 0.25)?,
        m: resolve(args.m, &map, "m", 16)?,
        n2: resolve(args.n2, &map, "n2", 4)?,
        n3: resolve(args.n3, &map, "n3", 4)?,
        alpha,
        beta,
        warp_const: resolve(args.warp_const, &map, "warp_const", 1.0)?,
        gamma: resolve(args.gamma, &map, "gamma", 0.1)?,
        amplitude: resolve(args.amplitude, &map, "amplitude", 0.01)?,
    };
    let grid = ThinCylinderGrid::new(cfg.epsilon, cfg.m, cfg.n2, cfg.n3)?;
    let twist = TwistedBundle::new(cfg.alpha, cfg.beta)?;
    let warp = WarpProfile::constant(cfg.n2, cfg.n3, cfg.warp_const)?;
    let op = DiscreteOperator::assemble(grid, twist, warp, Scheme::Box2)?;
    let amp = cfg.amplitude;
    let w0 = SpinorGrid::from_profiles(
        &op.grid,
        move |x1, x2, _| C::new(0.0, x2).exp() * C::new(amp, 0.0) * (1.0 + x1),
        |_, _, _| C::ZERO,
    );
    let (root, report) = toy_instanton(&op, cfg.gamma, &w0)?;
    if let Some(path) = &args.snapshot {
        write_snapshot(path, cfg.epsilon, (cfg.alpha, cfg.beta), &root)?;
    }
    let json = Envelope::new(cfg.clone(), &report).to_json()?;
    emit(&args.json_out, &json)?;
    println!(
        "constants: A = {:.3e}  B = {:.3e}  kappa = {:.3e}  2*kappa*A*B = {:.3e}",
        report.config.a,
        report.config.b,
        report.config.kappa,
        2.0 * report.config.kappa * report.config.a * report.config.b
    );
    for (k, r) in report.trace.residuals.iter().enumerate() {
        println!("iter {k}: residual {r:.6e}");
    }
    println!(
        "root sup-norm {:.6e} (ball radius 2A = {:.6e})",
        report.root_sup,
        2.0 * report.config.a
    );
    Ok(0)
}
