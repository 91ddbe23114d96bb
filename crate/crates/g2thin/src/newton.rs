//! Quantitative simplified-Newton solver with explicit admissibility
//! constants, and a toy quadratic perturbation of the cylinder operator.
//!
//! The contraction framework: if A bounds the first Newton step
//! |DF(0)^{-1} F(0)|, B bounds |DF(0)^{-1}|, kappa is a Lipschitz constant
//! for DF on the ball of radius r, and
//!
//! ```text
//!     2 kappa A B < 1    and    2 A < r,
//! ```
//!
//! then the iteration x_{k+1} = x_k - DF(0)^{-1} F(x_k) started at 0 stays in
//! the ball of radius 2A and converges to the unique zero there, with
//! asymptotic residual contraction factor at most 2 kappa B * 2A.
//!
//! The toy problem is F(V) = D V + gamma Q(V) - W0 with the pointwise
//! quadratic Q(u, v) = (u v, u^2); its derivative deviation is exactly
//! bilinear, so kappa = 2 gamma holds with equality cases, and
//! DF(0)^{-1} = solve.

use num_complex::Complex64 as C;
use serde::Serialize;

use crate::cylinder::{DiscreteOperator, SpinorGrid};
use crate::{Error, Result};

/// Admissibility constants for the simplified Newton iteration.
#[derive(Debug, Clone, Serialize)]
pub struct NewtonConfig {
    /// bound on the first step |DF(0)^{-1} F(0)|
    pub a: f64,
    /// bound on |DF(0)^{-1}|
    pub b: f64,
    /// Lipschitz constant of DF on the ball of radius r
    pub kappa: f64,
    /// working ball radius
    pub r: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl NewtonConfig {
    pub fn is_admissible(&self) -> bool {
        self.check().is_ok()
    }

    pub fn check(&self) -> Result<()> {
        for (name, v) in [("B", self.b), ("r", self.r), ("tol", self.tol)] {
            if !(v > 0.0) {
                return Err(Error::Inadmissible {
                    name: name.into(),
                    value: v,
                    need: "> 0".into(),
                });
            }
        }
        for (name, v) in [("A", self.a), ("kappa", self.kappa)] {
            if !(v >= 0.0) {
                return Err(Error::Inadmissible {
                    name: name.into(),
                    value: v,
                    need: ">= 0".into(),
                });
            }
        }
        let q = 2.0 * self.kappa * self.a * self.b;
        if q >= 1.0 {
            return Err(Error::Inadmissible {
                name: "2*kappa*A*B".into(),
                value: q,
                need: "< 1".into(),
            });
        }
        if 2.0 * self.a >= self.r {
            return Err(Error::Inadmissible {
                name: "2*A".into(),
                value: 2.0 * self.a,
                need: format!("< r = {}", self.r),
            });
        }
        Ok(())
    }

    /// Predicted asymptotic residual contraction factor 2 kappa B * 2A.
    pub fn predicted_contraction(&self) -> f64 {
        4.0 * self.kappa * self.b * self.a
    }
}

/// Residual history of a Newton run.
#[derive(Debug, Clone, Serialize)]
pub struct NewtonTrace {
    pub residuals: Vec<f64>,
    /// residual ratios between consecutive iterations (after the first)
    pub contraction: Vec<f64>,
    pub iterations: usize,
}

/// Iterate vector: sup norm and difference are all the iteration needs.
pub trait NewtonVector: Clone {
    fn sup(&self) -> f64;
    fn minus(&self, other: &Self) -> Self;
}

impl NewtonVector for f64 {
    fn sup(&self) -> f64 {
        self.abs()
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
}

impl NewtonVector for SpinorGrid {
    fn sup(&self) -> f64 {
        self.sup_norm()
    }
    fn minus(&self, other: &Self) -> Self {
        self.sub(other)
    }
}

/// Simplified Newton with frozen derivative: x_{k+1} = x_k - inv_df0(F(x_k))
/// from the given start (the framework's origin). Refuses inadmissible
/// configurations; errors if the iterate leaves the ball of radius r or the
/// residual fails to reach tol within max_iter steps.
pub fn quantitative_newton<X: NewtonVector, R>(
    x0: X,
    f: impl Fn(&X) -> Result<R>,
    inv_df0: impl Fn(&R) -> Result<X>,
    res_norm: impl Fn(&R) -> f64,
    cfg: &NewtonConfig,
) -> Result<(X, NewtonTrace)> {
    cfg.check()?;
    let mut x = x0;
    let mut residuals = Vec::new();
    let mut contraction = Vec::new();
    for k in 0..cfg.max_iter {
        let fx = f(&x)?;
        let res = res_norm(&fx);
        if let Some(&prev) = residuals.last() {
            if prev > 0.0 {
                contraction.push(res / prev);
            }
        }
        residuals.push(res);
        if res <= cfg.tol {
            return Ok((
                x,
                NewtonTrace {
                    residuals,
                    contraction,
                    iterations: k,
                },
            ));
        }
        let step = inv_df0(&fx)?;
        x = x.minus(&step);
        if x.sup() > cfg.r {
            return Err(Error::NonConvergence(format!(
                "iterate left the ball: |x| = {:.3e} > r = {:.3e} at step {k} \
                 (residual trace {residuals:?})",
                x.sup(),
                cfg.r
            )));
        }
    }
    Err(Error::NonConvergence(format!(
        "residual {:.3e} above tol {:.3e} after {} iterations",
        residuals.last().copied().unwrap_or(f64::NAN),
        cfg.tol,
        cfg.max_iter
    )))
}

/// The fixed pointwise quadratic Q(u, v) = (u v, u^2).
pub fn quadratic_q(v: &SpinorGrid) -> SpinorGrid {
    let mut q = v.clone();
    for i in 0..v.u.len() {
        q.u[i] = v.u[i] * v.v[i];
        q.v[i] = v.u[i] * v.u[i];
    }
    q
}

/// Derivative of Q at v0 in direction v (exactly bilinear).
fn quadratic_dq(v0: &SpinorGrid, v: &SpinorGrid) -> SpinorGrid {
    let mut q = v.clone();
    for i in 0..v.u.len() {
        q.u[i] = v0.u[i] * v.v[i] + v.u[i] * v0.v[i];
        q.v[i] = 2.0 * v0.u[i] * v.u[i];
    }
    q
}

/// Run report of the toy solve: the measured constants and the trace.
#[derive(Debug, Clone, Serialize)]
pub struct NewtonReport {
    pub config: NewtonConfig,
    pub inv_norm_measured: f64,
    pub w0_sup: f64,
    pub gamma: f64,
    pub root_sup: f64,
    pub trace: NewtonTrace,
}

/// Empirical sup-norm bound of the inverse, from deterministic probe solves.
pub fn measure_inverse_norm(op: &DiscreteOperator) -> Result<f64> {
    let probes = [
        SpinorGrid::from_profiles(&op.grid, |_, _, _| C::ONE, |_, _, _| C::ZERO),
        SpinorGrid::from_profiles(&op.grid, |_, _, _| C::ZERO, |_, _, _| C::ONE),
        SpinorGrid::from_profiles(
            &op.grid,
            |x1, x2, _| C::new(0.0, x2).exp() * (1.0 + x1),
            |x1, _, x3| C::new(0.0, x3).exp() * x1,
        ),
    ];
    let mut worst: f64 = 0.0;
    for w in &probes {
        let v = op.solve(w)?;
        worst = worst.max(v.sup_norm() / w.sup_norm());
    }
    Ok(worst)
}

/// Solve F(V) = D V + gamma Q(V) - W0 = 0 by simplified Newton with
/// DF(0)^{-1} = solve. The constants are measured, not assumed:
/// B from probe solves, A = B |W0|_sup, kappa = 2 gamma.
pub fn toy_instanton(
    op: &DiscreteOperator,
    gamma: f64,
    w0: &SpinorGrid,
) -> Result<(SpinorGrid, NewtonReport)> {
    let b = measure_inverse_norm(op)?;
    let w0_sup = w0.sup_norm();
    let a = b * w0_sup;
    let cfg = NewtonConfig {
        a,
        b,
        kappa: 2.0 * gamma,
        r: (4.0 * a).max(1e-6),
        tol: 1e-12,
        max_iter: 60,
    };
    let rows0 = op.rows_from_field(w0);
    let f = |v: &SpinorGrid| -> Result<Vec<C>> {
        let mut rows = op.apply_system(v);
        if gamma != 0.0 {
            let q_rows = op.rows_from_field(&quadratic_q(v));
            for (r, q) in rows.iter_mut().zip(&q_rows) {
                *r += gamma * q;
            }
        }
        for (r, w) in rows.iter_mut().zip(&rows0) {
            *r -= w;
        }
        Ok(rows)
    };
    let inv = |r: &Vec<C>| op.solve_rows(r);
    let res_norm = |r: &Vec<C>| r.iter().fold(0.0f64, |m, x| m.max(x.norm()));
    let (root, trace) = quantitative_newton(SpinorGrid::zeros(&op.grid), f, inv, res_norm, &cfg)?;
    let root_sup = root.sup_norm();
    if root_sup > 2.0 * a + 1e-12 {
        return Err(Error::NonConvergence(format!(
            "root norm {root_sup:.3e} outside the 2A ball ({:.3e})",
            2.0 * a
        )));
    }
    Ok((
        root,
        NewtonReport {
            config: cfg,
            inv_norm_measured: b,
            w0_sup,
            gamma,
            root_sup,
            trace,
        },
    ))
}

/// |F'(V0) V - F'(0) V|_sup for the toy F, together with the bilinear bound
/// 2 gamma |V0|_sup |V|_sup it must satisfy (constant independent of the
/// cylinder length by construction).
pub fn quadratic_deviation(gamma: f64, v0: &SpinorGrid, v: &SpinorGrid) -> (f64, f64) {
    let dev = quadratic_dq(v0, v).sup_norm() * gamma.abs();
    let bound = 2.0 * gamma.abs() * v0.sup_norm() * v.sup_norm();
    (dev, bound)
}
