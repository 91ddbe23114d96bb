//! Eigenvalue computations and quantitative experiments for the
//! thin-cylinder model: the surface spectrum, the first eigenvalue of the
//! cylinder operator against its warped lower bound, kernel counting, the
//! mean-free property of the w2 = 0 solve, discrete Hoelder norms, and the
//! thin-limit scaling of the inverse.
//!
//! The lower bound under test is
//!
//! ```text
//!     lambda_D >= (1/K) min{ lambda_surface, 2/(K eps^2) - K c1^2 },
//! ```
//!
//! with 1/K <= h <= K and c1 the C^1 norm of h^{-1/2} on the cross section;
//! the surface eigenvalues are (kappa2^2 + kappa3^2)/4 over twisted modes.
//! The margin lambda_D - bound is reported as measured, never clamped.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cylinder::{
    signed_freq, DiscreteOperator, Scheme, SpinorGrid, ThinCylinderGrid, TwistedBundle,
    WarpProfile,
};
use crate::{Error, Result};

const CELL: f64 = 1.0; // constant surface cell factors cancel in every quotient

/// Closed-form eigenvalues of d+ d- on the n2 x n3 mode grid, ascending.
pub fn surface_spectrum(twist: &TwistedBundle, n2: usize, n3: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n2 * n3);
    for i2 in 0..n2 {
        let k2 = signed_freq(i2, n2) as f64 + twist.alpha;
        for i3 in 0..n3 {
            let k3 = signed_freq(i3, n3) as f64 + twist.beta;
            out.push((k2 * k2 + k3 * k3) / 4.0);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Eigenvalues of the numerically assembled d+ d- (physical-space matrix
/// built through the FFT route, then a realified Hermitian solve), ascending.
pub fn surface_spectrum_numeric(twist: &TwistedBundle, n2: usize, n3: usize) -> Result<Vec<f64>> {
    let grid = ThinCylinderGrid::new(0.5, 4, n2, n3)?;
    let warp = WarpProfile::constant(n2, n3, 1.0)?;
    let op = DiscreteOperator::assemble(grid, *twist, warp, Scheme::Box2)?;
    let nz = n2 * n3;
    let mut a = DMatrix::<C>::zeros(nz, nz);
    let mut col = vec![C::ZERO; nz];
    for c in 0..nz {
        col.iter_mut().for_each(|x| *x = C::ZERO);
        col[c] = C::ONE;
        // d+ d- via the symbol |s|^2 in Fourier space
        op.fft().forward(&mut col, 1);
        for (x, s) in col.iter_mut().zip(op.mode_symbols()) {
            *x *= s.norm_sqr();
        }
        op.fft().inverse(&mut col, 1);
        for r in 0..nz {
            a[(r, c)] = col[r];
        }
    }
    let re = realify_hermitian(&a);
    let mut eig: Vec<f64> = SymmetricEigen::new(re).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    // realification doubles every eigenvalue's multiplicity
    Ok(eig.into_iter().step_by(2).collect())
}

/// [[X, -Y], [Y, X]] for H = X + iY Hermitian; symmetric, eigenvalues of H
/// each doubled.
fn realify_hermitian(h: &DMatrix<C>) -> DMatrix<f64> {
    let n = h.nrows();
    let mut out = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            out[(r, c)] = h[(r, c)].re;
            out[(r, c + n)] = -h[(r, c)].im;
            out[(r + n, c)] = h[(r, c)].im;
            out[(r + n, c + n)] = h[(r, c)].re;
        }
    }
    out
}

/// Trapezoid x1 weight at slice j.
fn trap_weight(grid: &ThinCylinderGrid, j: usize) -> f64 {
    let dx = grid.dx();
    if j == 0 || j == grid.m {
        dx / 2.0
    } else {
        dx
    }
}

/// Indices of the minus-class unknowns within the per-mode unknown vector
/// (u_0..u_m, v_0..v_m): everything except v_0 and v_m.
fn minus_indices(m: usize) -> Vec<usize> {
    (0..2 * (m + 1))
        .filter(|&i| i != m + 1 && i != 2 * m + 1)
        .collect()
}

/// Per-mode weighted normal matrix E^H A^H W A E on the minus class, for
/// constant warp values.
fn mode_g_minus(op: &DiscreteOperator, s: C, hinv: f64, hsqrt: f64) -> DMatrix<C> {
    let m = op.grid.m;
    let rows = op.pde_rows_x1();
    let mut a = op.mode_pde_matrix(s, hinv);
    for r in 0..2 * rows {
        let w = (op.pde_row_weight(r % rows) * hsqrt * CELL).sqrt();
        for c in 0..a.ncols() {
            a[(r, c)] *= w;
        }
    }
    let g = a.adjoint() * &a;
    let keep = minus_indices(m);
    DMatrix::from_fn(keep.len(), keep.len(), |r, c| g[(keep[r], keep[c])])
}

/// Per-mode mass diagonal on the minus class.
fn mode_b_minus(op: &DiscreteOperator, hsqrt: f64) -> Vec<f64> {
    let m = op.grid.m;
    minus_indices(m)
        .iter()
        .map(|&i| {
            let j = if i <= m { i } else { i - (m + 1) };
            trap_weight(&op.grid, j) * hsqrt * CELL
        })
        .collect()
}

fn mode_lambda_min(op: &DiscreteOperator, s: C, hinv: f64, hsqrt: f64) -> f64 {
    let g = mode_g_minus(op, s, hinv, hsqrt);
    let b = mode_b_minus(op, hsqrt);
    let n = g.nrows();
    let scaled = DMatrix::from_fn(n, n, |r, c| g[(r, c)] / (b[r] * b[c]).sqrt());
    let re = realify_hermitian(&scaled);
    SymmetricEigen::new(re)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Smallest Rayleigh quotient <DV, DV>_h / <V, V>_h over nonzero minus-class
/// fields. Constant warp: exact per-mode Hermitian eigensolve. Variable
/// warp: inverse power iteration with a preconditioned conjugate-gradient
/// inner solve (mean-warp per-mode preconditioner), relative tolerance 1e-9.
pub fn lambda_d(op: &DiscreteOperator) -> Result<f64> {
    if op.is_constant_h() {
        let hinv = op.hinv_sqrt()[0];
        let hsqrt = op.h_sqrt()[0];
        Ok(op
            .mode_symbols()
            .iter()
            .map(|&s| mode_lambda_min(op, s, hinv, hsqrt))
            .fold(f64::INFINITY, f64::min))
    } else {
        if op.twist.is_zero() {
            return Err(Error::NonConvergence(
                "inverse iteration needs a nonzero twist for a variable warp".into(),
            ));
        }
        lambda_d_iterative(op)
    }
}

fn row_weights(op: &DiscreteOperator) -> (usize, Vec<f64>) {
    let rows = op.pde_rows_x1();
    let nz = op.grid.nz();
    let mut w = vec![0.0; rows * nz];
    for j in 0..rows {
        for p in 0..nz {
            w[j * nz + p] = op.pde_row_weight(j) * op.h_sqrt()[p] * CELL;
        }
    }
    (rows, w)
}

/// E^H A^H W A E, matrix-free on minus-class fields.
fn apply_g(op: &DiscreteOperator, w: &[f64], x: &SpinorGrid) -> SpinorGrid {
    let (mut r1, mut r2) = op.apply_pde(x);
    for (a, ww) in r1.iter_mut().zip(w) {
        *a *= *ww;
    }
    for (a, ww) in r2.iter_mut().zip(w) {
        *a *= *ww;
    }
    let mut y = op.apply_pde_adjoint(&r1, &r2);
    y.project_minus_class();
    y
}

/// Weighted mass on minus-class fields.
fn apply_b(op: &DiscreteOperator, x: &SpinorGrid) -> SpinorGrid {
    let nz = op.grid.nz();
    let mut y = x.clone();
    for j in 0..=op.grid.m {
        for p in 0..nz {
            let w = trap_weight(&op.grid, j) * op.h_sqrt()[p] * CELL;
            y.u[j * nz + p] *= w;
            y.v[j * nz + p] *= w;
        }
    }
    y.project_minus_class();
    y
}

fn sdot(a: &SpinorGrid, b: &SpinorGrid) -> C {
    a.u.iter()
        .zip(&b.u)
        .chain(a.v.iter().zip(&b.v))
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// Per-mode LU factors of the mean-warp normal matrix; preconditioner for
/// the conjugate-gradient solve.
struct ModePrecond {
    lus: Vec<nalgebra::LU<C, nalgebra::Dyn, nalgebra::Dyn>>,
    keep: Vec<usize>,
}

impl ModePrecond {
    fn build(op: &DiscreteOperator) -> Self {
        let hbar = op.warp.mean();
        let hinv = hbar.powf(-0.5);
        let hsqrt = hbar.sqrt();
        let lus = op
            .mode_symbols()
            .iter()
            .map(|&s| mode_g_minus(op, s, hinv, hsqrt).lu())
            .collect();
        ModePrecond {
            lus,
            keep: minus_indices(op.grid.m),
        }
    }

    fn apply(&self, op: &DiscreteOperator, r: &SpinorGrid) -> SpinorGrid {
        let m = op.grid.m;
        let nz = op.grid.nz();
        let mut hat_u = r.u.clone();
        let mut hat_v = r.v.clone();
        op.fft().forward(&mut hat_u, m + 1);
        op.fft().forward(&mut hat_v, m + 1);
        let dim = self.keep.len();
        let mut rhs = DMatrix::<C>::zeros(dim, 1);
        for p in 0..nz {
            for (row, &i) in self.keep.iter().enumerate() {
                rhs[(row, 0)] = if i <= m {
                    hat_u[i * nz + p]
                } else {
                    hat_v[(i - (m + 1)) * nz + p]
                };
            }
            let x = self.lus[p]
                .solve(&rhs)
                .expect("mean-warp normal matrix is positive definite");
            for (row, &i) in self.keep.iter().enumerate() {
                if i <= m {
                    hat_u[i * nz + p] = x[(row, 0)];
                } else {
                    hat_v[(i - (m + 1)) * nz + p] = x[(row, 0)];
                }
            }
        }
        op.fft().inverse(&mut hat_u, m + 1);
        op.fft().inverse(&mut hat_v, m + 1);
        let mut out = SpinorGrid {
            m,
            n2: op.grid.n2,
            n3: op.grid.n3,
            u: hat_u,
            v: hat_v,
        };
        out.project_minus_class();
        out
    }
}

fn pcg(
    op: &DiscreteOperator,
    w: &[f64],
    pre: &ModePrecond,
    b: &SpinorGrid,
    tol: f64,
    max_iter: usize,
) -> Result<SpinorGrid> {
    let mut x = SpinorGrid::zeros(&op.grid);
    let mut r = b.clone();
    let bnorm = sdot(b, b).re.sqrt();
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut z = pre.apply(op, &r);
    let mut p = z.clone();
    let mut rz = sdot(&r, &z).re;
    for _ in 0..max_iter {
        let gp = apply_g(op, w, &p);
        let alpha = rz / sdot(&p, &gp).re;
        x.axpy(alpha, &p);
        r.axpy(-alpha, &gp);
        if sdot(&r, &r).re.sqrt() <= tol * bnorm {
            return Ok(x);
        }
        z = pre.apply(op, &r);
        let rz_new = sdot(&r, &z).re;
        let beta = rz_new / rz;
        rz = rz_new;
        let mut pnew = z.clone();
        pnew.axpy(beta, &p);
        p = pnew;
    }
    Err(Error::NonConvergence(format!(
        "pcg stalled after {max_iter} iterations"
    )))
}

fn lambda_d_iterative(op: &DiscreteOperator) -> Result<f64> {
    let (_, w) = row_weights(op);
    let pre = ModePrecond::build(op);
    // deterministic start: all-ones minus-class field
    let mut x = SpinorGrid::zeros(&op.grid);
    for c in x.u.iter_mut().chain(x.v.iter_mut()) {
        *c = C::ONE;
    }
    x.project_minus_class();
    let mut rho_prev = f64::INFINITY;
    for _ in 0..200 {
        let bx = apply_b(op, &x);
        let y = pcg(op, &w, &pre, &bx, 1e-11, 2000)?;
        let by = apply_b(op, &y);
        let rho = sdot(&y, &bx).re / sdot(&y, &by).re;
        let scale = 1.0 / sdot(&y, &by).re.sqrt();
        x = y.scale(scale);
        if (rho - rho_prev).abs() <= 1e-9 * rho.abs().max(1e-30) {
            return Ok(rho);
        }
        rho_prev = rho;
    }
    Err(Error::NonConvergence(
        "inverse power iteration did not stabilize in 200 steps".into(),
    ))
}

/// First-eigenvalue report: surface eigenvalues, measured lambda_D, the
/// warped lower bound, and the (unclamped) margin.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub lambda_surface_minus: f64,
    pub lambda_surface_plus: f64,
    pub lambda_d: f64,
    pub bound: f64,
    pub margin: f64,
}

/// Right-hand side of the lower bound for this operator's warp and length.
pub fn theorem_bound(op: &DiscreteOperator) -> f64 {
    let k = op.warp.k_bound;
    let c1 = op.warp.c1_hinv_sqrt;
    let lam = op.lambda_surface();
    let interval = 2.0 / (k * op.grid.epsilon.powi(2)) - k * c1 * c1;
    lam.min(interval) / k
}

pub fn verify_lambda_bound(op: &DiscreteOperator) -> Result<SpectrumReport> {
    let lam_surface = op.lambda_surface();
    let lambda = lambda_d(op)?;
    let bound = theorem_bound(op);
    Ok(SpectrumReport {
        lambda_surface_minus: lam_surface,
        lambda_surface_plus: lam_surface,
        lambda_d: lambda,
        bound,
        margin: lambda - bound,
    })
}

/// Boundary class for kernel counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryClass {
    /// v = 0 on the walls.
    Minus,
    /// u = 0 on the walls.
    Plus,
}

/// Real dimension of the numerical kernel: twice the number of per-mode
/// singular values below threshold * sigma_max. Constant warp only (the
/// modes decouple there); the plus class is handled through the exact
/// relabeling (u, v, s) -> (v, u, conj s).
pub fn kernel_dimension(
    op: &DiscreteOperator,
    threshold: f64,
    class: BoundaryClass,
) -> Result<usize> {
    if !op.is_constant_h() {
        return Err(Error::Underdetermined(
            "kernel counting is implemented for constant warp only".into(),
        ));
    }
    let hinv = op.hinv_sqrt()[0];
    let mut all = Vec::new();
    for &s in op.mode_symbols() {
        let sym = match class {
            BoundaryClass::Minus => s,
            BoundaryClass::Plus => s.conj(),
        };
        let a = op.mode_system_matrix(sym, hinv);
        let sv = a.svd(false, false).singular_values;
        all.extend(sv.iter().copied());
    }
    let smax = all.iter().copied().fold(0.0f64, f64::max);
    Ok(2 * all.iter().filter(|&&x| x < threshold * smax).count())
}

/// sup over torus points of |trapezoid x1-integral of u|: the mean-free
/// defect of the w2 = 0 solve.
pub fn mean_free_check(op: &DiscreteOperator, v: &SpinorGrid) -> f64 {
    let nz = op.grid.nz();
    let mut worst = 0.0f64;
    for p in 0..nz {
        let mut acc = C::ZERO;
        for j in 0..=op.grid.m {
            acc += trap_weight(&op.grid, j) * v.u[j * nz + p];
        }
        worst = worst.max(acc.norm());
    }
    worst
}

/// Discrete norms of a spinor field: sup, weighted L^2, L^p, and the
/// Hoelder seminorm for the warped distance
/// sqrt(hbar(z, z') dx1^2 (j - j')^2 + d_torus(z, z')^2), with hbar the
/// average of the warp at the two feet. All point pairs are used up to
/// 4096 grid points; beyond that a seeded random subsample of pairs is
/// drawn and flagged in the report.
#[derive(Debug, Clone, Serialize)]
pub struct DiscreteNorms {
    pub sup: f64,
    pub l2_weighted: f64,
    pub lp: f64,
    pub p: f64,
    pub alpha: f64,
    pub holder: f64,
    pub holder_x1: f64,
    pub holder_z: f64,
    pub subsampled: bool,
}

impl DiscreteNorms {
    pub fn c0_alpha(&self) -> f64 {
        self.sup + self.holder
    }

    pub fn compute(op: &DiscreteOperator, f: &SpinorGrid, p: f64, alpha: f64, seed: u64) -> Self {
        let grid = &op.grid;
        let nz = grid.nz();
        let n = grid.npoints();
        let dx = grid.dx();
        let val = |i: usize| -> (f64, f64, f64, f64) {
            (f.u[i].re, f.u[i].im, f.v[i].re, f.v[i].im)
        };
        let diff = |a: usize, b: usize| -> f64 {
            let (a0, a1, a2, a3) = val(a);
            let (b0, b1, b2, b3) = val(b);
            ((a0 - b0).powi(2) + (a1 - b1).powi(2) + (a2 - b2).powi(2) + (a3 - b3).powi(2)).sqrt()
        };
        let mag = |i: usize| -> f64 {
            let (a0, a1, a2, a3) = val(i);
            (a0 * a0 + a1 * a1 + a2 * a2 + a3 * a3).sqrt()
        };
        let torus_d = |p1: usize, p2: usize| -> f64 {
            let (i2a, i3a) = (p1 / grid.n3, p1 % grid.n3);
            let (i2b, i3b) = (p2 / grid.n3, p2 % grid.n3);
            let w2 = i2a.abs_diff(i2b).min(grid.n2 - i2a.abs_diff(i2b)) as f64;
            let w3 = i3a.abs_diff(i3b).min(grid.n3 - i3a.abs_diff(i3b)) as f64;
            let d2 = std::f64::consts::TAU * w2 / grid.n2 as f64;
            let d3 = std::f64::consts::TAU * w3 / grid.n3 as f64;
            (d2 * d2 + d3 * d3).sqrt()
        };
        let dist = |a: usize, b: usize| -> f64 {
            let (ja, pa) = (a / nz, a % nz);
            let (jb, pb) = (b / nz, b % nz);
            let hbar = 0.5 * (op.warp.h[pa] + op.warp.h[pb]);
            let d1 = dx * ja.abs_diff(jb) as f64;
            let dz = torus_d(pa, pb);
            (hbar * d1 * d1 + dz * dz).sqrt()
        };
        let ratio = |a: usize, b: usize| -> f64 {
            let d = dist(a, b);
            if d == 0.0 {
                0.0
            } else {
                diff(a, b) / d.powf(alpha)
            }
        };

        let mut sup = 0.0f64;
        let mut l2 = 0.0;
        let mut lp_acc = 0.0;
        for j in 0..=grid.m {
            for pz in 0..nz {
                let i = j * nz + pz;
                let m = mag(i);
                sup = sup.max(m);
                let w = trap_weight(grid, j) * op.h_sqrt()[pz] * CELL;
                l2 += w * m * m;
                lp_acc += w * m.powf(p);
            }
        }

        // directionwise seminorms: exact, the pair counts are small
        let mut holder_x1 = 0.0f64;
        for pz in 0..nz {
            for ja in 0..=grid.m {
                for jb in ja + 1..=grid.m {
                    holder_x1 = holder_x1.max(ratio(ja * nz + pz, jb * nz + pz));
                }
            }
        }
        let mut holder_z = 0.0f64;
        for j in 0..=grid.m {
            for pa in 0..nz {
                for pb in pa + 1..nz {
                    holder_z = holder_z.max(ratio(j * nz + pa, j * nz + pb));
                }
            }
        }

        let mut holder = holder_x1.max(holder_z);
        let subsampled = n > 4096;
        if !subsampled {
            for a in 0..n {
                for b in a + 1..n {
                    holder = holder.max(ratio(a, b));
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..4_000_000usize {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                if a != b {
                    holder = holder.max(ratio(a, b));
                }
            }
        }

        DiscreteNorms {
            sup,
            l2_weighted: l2.sqrt(),
            lp: lp_acc.powf(1.0 / p),
            p,
            alpha,
            holder,
            holder_x1,
            holder_z,
            subsampled,
        }
    }
}

/// Thin-limit scaling of the inverse: per epsilon, solve for probe
/// right-hand sides, record Hoelder-norm ratios and sigma_min = sqrt of the
/// measured first eigenvalue, and fit the log-log growth exponent. The
/// experiment asserts conformance to the upper bound only.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub epsilons: Vec<f64>,
    /// max over probes of ||V||_{C^{0,alpha}} / ||W||_{C^alpha}
    pub inverse_sup_norms: Vec<f64>,
    pub sigma_mins: Vec<f64>,
    pub fitted_exponent: f64,
    pub target_exponent: f64,
    pub p: f64,
    pub alpha: f64,
    pub subsampled: bool,
}

pub fn inverse_scaling_experiment(
    eps_list: &[f64],
    m0: usize,
    twist: &TwistedBundle,
    n2: usize,
    n3: usize,
    warp_const: f64,
    p: f64,
    alpha: f64,
    seed: u64,
) -> Result<ScalingReport> {
    if eps_list.len() < 3 {
        return Err(Error::Underdetermined(format!(
            "log-log fit needs at least 3 epsilon values, got {}",
            eps_list.len()
        )));
    }
    if !eps_list.windows(2).all(|w| w[1] < w[0]) {
        return Err(Error::Underdetermined(
            "epsilon list must be strictly decreasing".into(),
        ));
    }
    // The standing assumption is 3/p + 3 alpha < 1/2; the default pair
    // (p, alpha) = (12, 1/12) sits exactly on the boundary and is admitted,
    // since only the growth target 3/p + 2 alpha enters the experiment.
    if 3.0 / p + 3.0 * alpha > 0.5 + 1e-12 {
        return Err(Error::Inadmissible {
            name: "3/p + 3*alpha".into(),
            value: 3.0 / p + 3.0 * alpha,
            need: "< 1/2".into(),
        });
    }
    let mut ratios = Vec::new();
    let mut sigma_mins = Vec::new();
    let mut subsampled = false;
    for (i, &eps) in eps_list.iter().enumerate() {
        // keep dx1 roughly constant across the sweep
        let m = ((m0 as f64) * eps / eps_list[0]).round().max(8.0) as usize;
        let grid = ThinCylinderGrid::new(eps, m, n2, n3)?;
        let warp = WarpProfile::constant(n2, n3, warp_const)?;
        let op = DiscreteOperator::assemble(grid, *twist, warp, Scheme::Box2)?;
        let mut worst = 0.0f64;
        for probe in 0..2 {
            let w = match probe {
                // the hard case: w1 supported on the lowest mode, constant
                // in x1, nonvanishing on the boundary; w2 = 0
                0 => SpinorGrid::from_profiles(&grid, |_, _, _| C::ONE, |_, _, _| C::ZERO),
                // a generic smooth probe
                _ => SpinorGrid::from_profiles(
                    &grid,
                    |x1, x2, x3| {
                        C::new(0.0, x2 + x3).exp()
                            * (1.0 + 0.5 * (std::f64::consts::TAU * x1 / eps).cos())
                    },
                    |x1, _, x3| {
                        C::new(0.0, x3).exp() * (std::f64::consts::PI * x1 / eps).cos()
                    },
                ),
            };
            let v = op.solve(&w)?;
            let nv = DiscreteNorms::compute(&op, &v, p, alpha, seed.wrapping_add(probe));
            let nw = DiscreteNorms::compute(&op, &w, p, alpha, seed.wrapping_add(10 + probe));
            subsampled |= nv.subsampled || nw.subsampled;
            worst = worst.max(nv.c0_alpha() / nw.c0_alpha());
        }
        ratios.push(worst);
        sigma_mins.push(lambda_d(&op)?.max(0.0).sqrt());
        let _ = i;
    }
    let xs: Vec<f64> = eps_list.iter().map(|&e| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = ratios.iter().map(|&r| r.ln()).collect();
    let fitted_exponent = least_squares_slope(&xs, &ys);
    Ok(ScalingReport {
        epsilons: eps_list.to_vec(),
        inverse_sup_norms: ratios,
        sigma_mins,
        fitted_exponent,
        target_exponent: 3.0 / p + 2.0 * alpha,
        p,
        alpha,
        subsampled,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
