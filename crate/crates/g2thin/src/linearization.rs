//! Flat-space verification that the linearization of the graph-deformation
//! map is the twisted Dirac operator.
//!
//! A normal field V on the associative plane span{e1,e2,e3} deforms the plane
//! to the graph x -> (x, tV(x)). Pulling the associator form back along the
//! graph gives a nonlinear map F(tV); its t-derivative at 0 is computed two
//! ways and compared:
//! * by Richardson-extrapolated central differences of the pullback,
//! * by the closed-form twisted Dirac operator
//!   DV = -(V15+V26+V37) e4 + (V14+V36-V27) e5 + (V24-V35+V17) e6
//!        + (V34+V25-V16) e7,  V_i^k = d V^k / d x_i,
//!   which itself is cross-checked against the frame form sum_i e_i x grad_i V.
//!
//! The module also verifies, pointwise at a frame origin, that the Dolbeault
//! Dirac operator of the surface complex matches the two-direction twisted
//! Dirac operator under the conjugate-linear bundle identification.

use crate::calibration::Frame;
use crate::octonion::{tau, ImOcton};
use crate::{Error, Result};

/// Quaternion-valued field sampled on a periodic n x n x n lattice over the
/// unit cube; values are the 4 normal components (against e4..e7) and grads
/// the 3 x 4 first-derivative table, exact for the band-limited constructor.
#[derive(Debug, Clone)]
pub struct NormalField {
    pub n: usize,
    pub spacing: f64,
    /// values[p][k]: component k (0 -> e4 .. 3 -> e7) at lattice point p.
    pub values: Vec<[f64; 4]>,
    /// grads[p][i][k]: d V^k / d x_{i+1} at lattice point p.
    pub grads: Vec<[[f64; 4]; 3]>,
}

/// One Fourier mode of a NormalField component: cos(2 pi k.x + phase).
#[derive(Debug, Clone, Copy)]
pub struct FieldMode {
    pub component: usize,
    pub k: [i64; 3],
    pub amplitude: f64,
    pub phase: f64,
}

impl NormalField {
    /// Sample an arbitrary field with caller-supplied exact gradient.
    pub fn from_fn_with_grad(
        n: usize,
        value: impl Fn(f64, f64, f64) -> [f64; 4],
        grad: impl Fn(f64, f64, f64) -> [[f64; 4]; 3],
    ) -> Self {
        let spacing = 1.0 / n as f64;
        let mut values = Vec::with_capacity(n * n * n);
        let mut grads = Vec::with_capacity(n * n * n);
        for ix in 0..n {
            for iy in 0..n {
                for iz in 0..n {
                    let (x, y, z) = (
                        ix as f64 * spacing,
                        iy as f64 * spacing,
                        iz as f64 * spacing,
                    );
                    values.push(value(x, y, z));
                    grads.push(grad(x, y, z));
                }
            }
        }
        NormalField {
            n,
            spacing,
            values,
            grads,
        }
    }

    /// Band-limited periodic field from an explicit mode list; derivatives
    /// are the exact analytic ones (spectral differentiation is exact here).
    pub fn band_limited(n: usize, modes: &[FieldMode]) -> Self {
        let two_pi = std::f64::consts::TAU;
        NormalField::from_fn_with_grad(
            n,
            |x, y, z| {
                let mut v = [0.0; 4];
                for m in modes {
                    let arg =
                        two_pi * (m.k[0] as f64 * x + m.k[1] as f64 * y + m.k[2] as f64 * z)
                            + m.phase;
                    v[m.component] += m.amplitude * arg.cos();
                }
                v
            },
            |x, y, z| {
                let mut g = [[0.0; 4]; 3];
                for m in modes {
                    let arg =
                        two_pi * (m.k[0] as f64 * x + m.k[1] as f64 * y + m.k[2] as f64 * z)
                            + m.phase;
                    let s = -m.amplitude * arg.sin();
                    for i in 0..3 {
                        g[i][m.component] += two_pi * m.k[i] as f64 * s;
                    }
                }
                g
            },
        )
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Pull the associator form back along the graph x -> (x, tV(x)): at each
/// lattice point the tangent frame of the graph is T_i = e_i + t dV(e_i), and
/// the coefficient of the pulled-back form against dx1^dx2^dx3 is
/// tau(T1,T2,T3) (parallel transport is trivial in flat space).
pub fn pullback_tau_graph(v: &NormalField, t: f64) -> Vec<ImOcton> {
    let mut out = Vec::with_capacity(v.len());
    for g in &v.grads {
        let mut frame = [ImOcton::ZERO; 3];
        for i in 0..3 {
            let mut ti = ImOcton::basis(i + 1);
            for k in 0..4 {
                ti = ti.add(&ImOcton::basis(k + 4).scale(t * g[i][k]));
            }
            frame[i] = ti;
        }
        out.push(tau(&frame[0], &frame[1], &frame[2]));
    }
    out
}

/// Central difference of the pullback in t, Richardson-extrapolated over the
/// steps (T_STEP, T_STEP/2): the O(t^2) error term cancels, leaving O(t^4).
pub fn fd_linearization(v: &NormalField) -> Vec<ImOcton> {
    const T_STEP: f64 = 1e-2;
    let d1 = central_difference(v, T_STEP);
    let d2 = central_difference(v, T_STEP / 2.0);
    d1.iter()
        .zip(&d2)
        .map(|(c, f)| f.scale(4.0 / 3.0).sub(&c.scale(1.0 / 3.0)))
        .collect()
}

fn central_difference(v: &NormalField, t: f64) -> Vec<ImOcton> {
    let plus = pullback_tau_graph(v, t);
    let minus = pullback_tau_graph(v, -t);
    plus.iter()
        .zip(&minus)
        .map(|(p, m)| p.sub(m).scale(0.5 / t))
        .collect()
}

/// Observed convergence order of the raw central difference in t, from the
/// three steps (t, t/2, t/4) in max norm. Should sit near 2 for fields whose
/// pullback has a nonvanishing cubic term.
pub fn fd_linearization_order(v: &NormalField, t: f64) -> f64 {
    let d1 = central_difference(v, t);
    let d2 = central_difference(v, t / 2.0);
    let d4 = central_difference(v, t / 4.0);
    let max_diff = |a: &[ImOcton], b: &[ImOcton]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.sub(y).norm())
            .fold(0.0, f64::max)
    };
    let coarse = max_diff(&d1, &d2);
    let fine = max_diff(&d2, &d4);
    (coarse / fine).log2()
}

/// Twisted Dirac operator in closed form from the jet table.
pub fn twisted_dirac_jet(g: &[[f64; 4]; 3]) -> ImOcton {
    // V_i^k with i in 1..3 (tangent), k in 4..7 (normal): g[i-1][k-4].
    let v = |i: usize, k: usize| g[i - 1][k - 4];
    ImOcton::new([
        0.0,
        0.0,
        0.0,
        -(v(1, 5) + v(2, 6) + v(3, 7)),
        v(1, 4) + v(3, 6) - v(2, 7),
        v(2, 4) - v(3, 5) + v(1, 7),
        v(3, 4) + v(2, 5) - v(1, 6),
    ])
}

/// Twisted Dirac operator of the field, closed-form coefficients per point.
pub fn twisted_dirac_flat(v: &NormalField) -> Vec<ImOcton> {
    v.grads.iter().map(twisted_dirac_jet).collect()
}

/// The same operator as the frame sum e1 x grad_1 V + e2 x grad_2 V +
/// e3 x grad_3 V, evaluated with actual cross products.
pub fn twisted_dirac_cross_form(v: &NormalField) -> Vec<ImOcton> {
    v.grads
        .iter()
        .map(|g| {
            let mut out = ImOcton::ZERO;
            for i in 0..3 {
                let mut grad_i = ImOcton::ZERO;
                for k in 0..4 {
                    grad_i = grad_i.add(&ImOcton::basis(k + 4).scale(g[i][k]));
                }
                out = out.add(&ImOcton::basis(i + 1).cross(&grad_i));
            }
            out
        })
        .collect()
}

/// First-derivative table of a normal section at a point: rows are the
/// tangent directions W1..W3, columns the normal components against W4..W7.
#[derive(Debug, Clone, Copy)]
pub struct JetSample {
    pub v: [[f64; 4]; 3],
}

/// Pointwise agreement of the surface Dolbeault Dirac operator with the
/// two-direction twisted Dirac operator, on an arbitrary Cayley-Dickson
/// frame. Returns the max residual over three independent routes:
///
/// * A: D V = W2 x (sum_k V2^k W_k) + W3 x (sum_k V3^k W_k), raw cross
///   products;
/// * B: the closed-form coefficients -(V26+V37) W4 + (V36-V27) W5 +
///   (V24-V35) W6 + (V34+V25) W7;
/// * C: the Dolbeault side assembled from Clifford multiplication and the
///   complex structure J = W1 x . , then pushed through the conjugate-linear
///   identification f(W (x) Zbar*) = -(W x W2 - (W1 x W) x W3)/2.
pub fn dolbeault_agreement(seed: &Frame, jet: &JetSample) -> Result<f64> {
    if seed.vectors.len() != 7 {
        return Err(Error::InvalidSeed("expected a 7-frame".into()));
    }
    let res = crate::calibration::structure_constant_residual(seed);
    if res > 1e-10 {
        return Err(Error::InvalidSeed(format!(
            "frame does not satisfy the multiplication table (residual {res:.3e})"
        )));
    }
    let w = &seed.vectors;
    let v = |i: usize, k: usize| jet.v[i - 1][k - 4]; // i in {2,3}, k in 4..7

    // Route A: cross products against the section's derivative vectors.
    let mut route_a = ImOcton::ZERO;
    for i in [2usize, 3] {
        let mut grad = ImOcton::ZERO;
        for k in 4..8 {
            grad = grad.add(&w[k - 1].scale(v(i, k)));
        }
        route_a = route_a.add(&w[i - 1].cross(&grad));
    }

    // Route B: closed-form coefficients.
    let route_b = w[3]
        .scale(-(v(2, 6) + v(3, 7)))
        .add(&w[4].scale(v(3, 6) - v(2, 7)))
        .add(&w[5].scale(v(2, 4) - v(3, 5)))
        .add(&w[6].scale(v(3, 4) + v(2, 5)));

    // Route C: Dolbeault side. The complex structure on the rank-2 pieces is
    // J = W1 x . ; sections are U = V^4 W4 + V^5 W5 (degree 0) plus
    // V^6 W4 (x) Zbar* + V^7 W5 (x) Zbar* (degree (0,1)).
    let jn = |x: &ImOcton| w[0].cross(x);

    // Degree-0 part: nabla along (W2 + i W3)/sqrt(2) followed by wedging with
    // sqrt(2) Zbar*; net effect is the coefficient pair below on the
    // (W4 (x) Zbar*, W5 (x) Zbar*) basis.
    let mut d0 = ImOcton::ZERO; // lives in span{W4, W5}
    for (i, coeff_j) in [(2usize, false), (3usize, true)] {
        for k in [4usize, 5] {
            let base = if coeff_j { jn(&w[k - 1]) } else { w[k - 1] };
            d0 = d0.add(&base.scale(v(i, k)));
        }
    }
    let zbar_coeffs = [d0.dot(&w[3]), d0.dot(&w[4])];

    // Degree-(0,1) part: nabla along (W2 - i W3)/sqrt(2) with i acting as J
    // on the W factor, then contraction by Zbar with the -sqrt(2) factor.
    let mut d1 = ImOcton::ZERO; // W-factor coefficients, span{W4, W5}
    for k in [4usize, 5] {
        let w_base = w[k - 1];
        // + W2-derivative, - i * W3-derivative
        d1 = d1.add(&w_base.scale(v(2, k + 2)));
        d1 = d1.sub(&jn(&w_base).scale(v(3, k + 2)));
    }
    let plain_coeffs = [-d1.dot(&w[3]), -d1.dot(&w[4])];

    // Push through Phi: identity on the plain part, f on the Zbar* part.
    let f = |x: &ImOcton| -> ImOcton {
        x.cross(&w[1])
            .sub(&w[0].cross(x).cross(&w[2]))
            .scale(-0.5)
    };
    let route_c = w[3]
        .scale(plain_coeffs[0])
        .add(&w[4].scale(plain_coeffs[1]))
        .add(&f(&w[3]).scale(zbar_coeffs[0]))
        .add(&f(&w[4]).scale(zbar_coeffs[1]));

    let r_ab = route_a.sub(&route_b).norm();
    let r_ac = route_a.sub(&route_c).norm();
    let r_bc = route_b.sub(&route_c).norm();
    Ok(r_ab.max(r_ac).max(r_bc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::cayley_dickson_frame;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn constant_field(c: [f64; 4]) -> NormalField {
        NormalField::from_fn_with_grad(4, move |_, _, _| c, |_, _, _| [[0.0; 4]; 3])
    }

    /// V^4 = x1 as an exact-jet field (linear, so the gradient is constant;
    /// periodicity is irrelevant because only values/jets enter pointwise).
    fn linear_field(component: usize) -> NormalField {
        NormalField::from_fn_with_grad(
            4,
            move |x, _, _| {
                let mut v = [0.0; 4];
                v[component] = x;
                v
            },
            move |_, _, _| {
                let mut g = [[0.0; 4]; 3];
                g[0][component] = 1.0;
                g
            },
        )
    }

    fn random_band_limited(seed: u64, amplitude: f64) -> NormalField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::new();
        for component in 0..4 {
            for _ in 0..3 {
                modes.push(FieldMode {
                    component,
                    k: [
                        rng.gen_range(-3i64..=3),
                        rng.gen_range(-3i64..=3),
                        rng.gen_range(-3i64..=3),
                    ],
                    amplitude: amplitude * rng.gen_range(0.2..1.0),
                    phase: rng.gen_range(0.0..std::f64::consts::TAU),
                });
            }
        }
        NormalField::band_limited(8, &modes)
    }

    fn max_norm(xs: &[ImOcton]) -> f64 {
        xs.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    fn max_diff(a: &[ImOcton], b: &[ImOcton]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.sub(y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn pullback_vanishes_for_constant_fields() {
        for c in [[0.0; 4], [0.3, -0.1, 0.7, 0.2]] {
            let f = constant_field(c);
            for t in [0.0, 0.01, 0.1] {
                assert_abs_diff_eq!(max_norm(&pullback_tau_graph(&f, t)), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn pullback_linear_field_first_order() {
        // V^4 = x1 tilts T1 to e1 + t e4; tau(e1 + t e4, e2, e3) = t e5
        // exactly (the quadratic terms cancel for a single tilted leg).
        let f = linear_field(0);
        let t = 0.01;
        let vals = pullback_tau_graph(&f, t);
        for val in &vals {
            assert_abs_diff_eq!(
                val.sub(&ImOcton::basis(5).scale(t)).norm(),
                0.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn fd_linearization_linear_fields() {
        // V^4 = x1 -> e5 per point; V^5 = x1 -> -e4 per point.
        let d = fd_linearization(&linear_field(0));
        for x in &d {
            assert_abs_diff_eq!(x.sub(&ImOcton::basis(5)).norm(), 0.0, epsilon = 1e-10);
        }
        let d = fd_linearization(&linear_field(1));
        for x in &d {
            assert_abs_diff_eq!(
                x.add(&ImOcton::basis(4)).norm(),
                0.0,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn fd_matches_twisted_dirac_on_band_limited_fields() {
        for seed in 0..5 {
            let f = random_band_limited(seed, 0.05);
            let fd = fd_linearization(&f);
            let dirac = twisted_dirac_flat(&f);
            let diff = max_diff(&fd, &dirac);
            assert!(diff <= 1e-6, "seed {seed}: deviation {diff:.3e}");
        }
    }

    #[test]
    fn fd_order_is_quadratic() {
        let f = random_band_limited(42, 0.3);
        let order = fd_linearization_order(&f, 1e-2);
        assert!(
            (order - 2.0).abs() <= 0.2,
            "observed t-order {order:.3} outside 2.0 +/- 0.2"
        );
    }

    #[test]
    fn dirac_closed_form_equals_cross_form() {
        let f = random_band_limited(7, 1.0);
        let a = twisted_dirac_flat(&f);
        let b = twisted_dirac_cross_form(&f);
        assert!(max_diff(&a, &b) <= 1e-12);
    }

    #[test]
    fn dirac_annihilates_constants() {
        let f = constant_field([0.4, 0.1, -0.2, 0.9]);
        assert_abs_diff_eq!(max_norm(&twisted_dirac_flat(&f)), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn dolbeault_agreement_standard_frame() {
        let frame = crate::calibration::Frame::standard();
        let zero = JetSample { v: [[0.0; 4]; 3] };
        assert_abs_diff_eq!(
            dolbeault_agreement(&frame, &zero).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let mut v = [[0.0; 4]; 3];
            for row in &mut v {
                for x in row.iter_mut() {
                    *x = rng.gen_range(-1.0..1.0);
                }
            }
            let r = dolbeault_agreement(&frame, &JetSample { v }).unwrap();
            assert!(r <= 1e-12, "residual {r:.3e}");
        }
    }

    #[test]
    fn dolbeault_agreement_random_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let random_unit = |rng: &mut ChaCha8Rng| -> ImOcton {
            let mut c = [0.0; 7];
            for x in &mut c {
                *x = rng.gen_range(-1.0..1.0);
            }
            let v = ImOcton::new(c);
            v.scale(1.0 / v.norm())
        };
        for case in 0..100 {
            // random valid Cayley-Dickson seed
            let w1 = random_unit(&mut rng);
            let mut w2 = random_unit(&mut rng);
            w2 = w2.sub(&w1.scale(w2.dot(&w1)));
            w2 = w2.scale(1.0 / w2.norm());
            let w3 = w1.cross(&w2);
            let mut w4 = random_unit(&mut rng);
            for t in [&w1, &w2, &w3] {
                w4 = w4.sub(&t.scale(w4.dot(t)));
            }
            w4 = w4.scale(1.0 / w4.norm());
            let frame = cayley_dickson_frame(&w1, &w2, &w4).unwrap();
            let mut v = [[0.0; 4]; 3];
            for row in &mut v {
                for x in row.iter_mut() {
                    *x = rng.gen_range(-1.0..1.0);
                }
            }
            let r = dolbeault_agreement(&frame, &JetSample { v }).unwrap();
            assert!(r <= 1e-10, "case {case}: residual {r:.3e}");
        }
    }

    #[test]
    fn dolbeault_rejects_invalid_frame() {
        let mut f = crate::calibration::Frame::standard();
        f.vectors[6] = f.vectors[6].scale(-1.0); // break the table
        let jet = JetSample { v: [[0.1; 4]; 3] };
        assert!(dolbeault_agreement(&f, &jet).is_err());
    }
}
