//! Calibration tests for linear subspaces of R^7.
//!
//! A 3-plane is associative exactly when the associator form vanishes on it;
//! a 4-plane is coassociative when the calibration 3-form restricts to zero.
//! This module measures both residuals, extends a tangent/normal seed to a
//! full multiplication-table frame, evaluates the normal component of the
//! dualized associator on tilted 3-planes together with its Jacobian in the
//! tilt parameters, and builds the almost complex structure J_n with its
//! compatible self-dual 2-form on a coassociative 4-plane.

use crate::octonion::{g2_form, tau, ImOcton};
use crate::{Error, Result};
use nalgebra::{Matrix4, Vector4};

const ORTHONORMAL_TOL: f64 = 1e-12;

/// An ordered list of vectors in R^7, usually orthonormal.
#[derive(Debug, Clone)]
pub struct Frame {
    pub vectors: Vec<ImOcton>,
}

impl Frame {
    pub fn new(vectors: Vec<ImOcton>) -> Self {
        Frame { vectors }
    }

    /// Standard basis frame e1..e7.
    pub fn standard() -> Self {
        Frame::new((1..=7).map(ImOcton::basis).collect())
    }

    /// Max deviation of pairwise inner products from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut res: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                res = res.max((a.dot(b) - target).abs());
            }
        }
        res
    }

    fn require_orthonormal(&self, tol: f64) -> Result<()> {
        let residual = self.orthonormality_residual();
        if residual > tol {
            Err(Error::NonOrthonormalFrame { residual })
        } else {
            Ok(())
        }
    }
}

/// Associativity residual of an orthonormal 3-plane: (|tau(W1,W2,W3)|, the
/// vector itself). Zero iff the plane is closed under the cross product.
pub fn associative_residual(f: &Frame) -> Result<(f64, ImOcton)> {
    if f.vectors.len() != 3 {
        return Err(Error::InvalidSeed("expected a 3-frame".into()));
    }
    f.require_orthonormal(ORTHONORMAL_TOL)?;
    let t = tau(&f.vectors[0], &f.vectors[1], &f.vectors[2]);
    Ok((t.norm(), t))
}

/// Coassociativity residual of an orthonormal 4-plane: the largest
/// |Omega(Wa,Wb,Wc)| over the four frame triples.
pub fn coassociative_residual(f: &Frame) -> Result<f64> {
    if f.vectors.len() != 4 {
        return Err(Error::InvalidSeed("expected a 4-frame".into()));
    }
    f.require_orthonormal(ORTHONORMAL_TOL)?;
    let mut res: f64 = 0.0;
    for a in 0..4 {
        for b in (a + 1)..4 {
            for c in (b + 1)..4 {
                res = res.max(g2_form(&f.vectors[a], &f.vectors[b], &f.vectors[c]).abs());
            }
        }
    }
    Ok(res)
}

/// Extend an orthonormal tangent pair {W1,W2} and a unit normal W4 to the
/// unique 7-frame with the standard multiplication table:
/// W3 = W1 x W2, W5 = W1 x W4, W6 = W2 x W4, W7 = W3 x W4.
///
/// W4 must be orthogonal to W1, W2 and W1 x W2, otherwise the products do not
/// close up and the seed is rejected with the offending residual.
pub fn cayley_dickson_frame(w1: &ImOcton, w2: &ImOcton, w4: &ImOcton) -> Result<Frame> {
    let pair = Frame::new(vec![*w1, *w2]);
    pair.require_orthonormal(1e-10)?;
    let w3 = w1.cross(w2);
    if (w4.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidSeed(format!(
            "W4 is not unit (|W4| = {:.12})",
            w4.norm()
        )));
    }
    for (name, t) in [("W1", w1), ("W2", w2), ("W3=W1xW2", &w3)] {
        let d = w4.dot(t);
        if d.abs() > 1e-10 {
            return Err(Error::InvalidSeed(format!(
                "W4 not orthogonal to {name} (inner product {d:.3e})"
            )));
        }
    }
    let w5 = w1.cross(w4);
    let w6 = w2.cross(w4);
    let w7 = w3.cross(w4);
    let frame = Frame::new(vec![*w1, *w2, w3, *w4, w5, w6, w7]);
    frame.require_orthonormal(1e-10)?;
    Ok(frame)
}

/// Max deviation of the frame's cross-product structure constants from the
/// standard basis table, over all 49 ordered products.
pub fn structure_constant_residual(f: &Frame) -> f64 {
    let mut res: f64 = 0.0;
    for i in 0..7 {
        for j in 0..7 {
            let prod = f.vectors[i].cross(&f.vectors[j]);
            let std_prod = crate::octonion::cross_basis(i, j);
            for (k, wk) in f.vectors.iter().enumerate() {
                res = res.max((prod.dot(wk) - std_prod[k] as f64).abs());
            }
        }
    }
    res
}

/// Normal component of the dualized associator on the tilted 3-plane
/// A(t) = span{e1, e2, e3 + t4 e4 + t5 e5 + t6 e6 + t7 e7}, expressed against
/// the orthonormalized normal basis obtained from the projections of e4..e7.
fn tilted_normal_component(t: &[f64; 4]) -> (ImOcton, Vector4<f64>) {
    // Orthonormal tangent frame: e1, e2 and the normalized tilted vector.
    let mut third = ImOcton::basis(3);
    for (a, &ta) in t.iter().enumerate() {
        third = third.add(&ImOcton::basis(4 + a).scale(ta));
    }
    let tangent = [
        ImOcton::basis(1),
        ImOcton::basis(2),
        third.scale(1.0 / third.norm()),
    ];
    // Dualized restriction of the associator: tau on the oriented orthonormal
    // tangent frame is the coefficient against the plane's volume form.
    let full = tau(&tangent[0], &tangent[1], &tangent[2]);
    // Subtract tangential components, then expand in a Gram-Schmidt basis of
    // the normal space seeded by the projections of e4..e7.
    let mut normal_part = full;
    for tv in &tangent {
        normal_part = normal_part.sub(&tv.scale(full.dot(tv)));
    }
    let mut nbasis: Vec<ImOcton> = Vec::with_capacity(4);
    for a in 0..4 {
        let mut cand = ImOcton::basis(4 + a);
        for tv in &tangent {
            cand = cand.sub(&tv.scale(cand.dot(tv)));
        }
        for nv in &nbasis {
            cand = cand.sub(&nv.scale(cand.dot(nv)));
        }
        nbasis.push(cand.scale(1.0 / cand.norm()));
    }
    let coords = Vector4::new(
        normal_part.dot(&nbasis[0]),
        normal_part.dot(&nbasis[1]),
        normal_part.dot(&nbasis[2]),
        normal_part.dot(&nbasis[3]),
    );
    (normal_part, coords)
}

/// Evaluate the tilt-to-normal-component map and its 4x4 Jacobian at t = 0.
///
/// The Jacobian is computed by Richardson-extrapolated central differences
/// (steps delta and delta/2), which removes the O(delta^2) term and leaves
/// the entries accurate to O(delta^4); this is what makes the smallest
/// singular value stable under further step halving.
pub fn almost_instanton_map(t: &[f64; 4]) -> Result<(ImOcton, Matrix4<f64>)> {
    let tnorm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
    if tnorm > 0.2 {
        return Err(Error::InvalidSeed(format!(
            "tilt magnitude {tnorm:.3} exceeds the small-tilt range 0.2"
        )));
    }
    let (normal, _) = tilted_normal_component(t);
    Ok((normal, almost_instanton_jacobian(5e-3)))
}

/// Central-difference Jacobian of the tilt map at t = 0 with Richardson
/// extrapolation from steps delta and delta/2.
pub fn almost_instanton_jacobian(delta: f64) -> Matrix4<f64> {
    let diff = |step: f64| -> Matrix4<f64> {
        let mut j = Matrix4::zeros();
        for col in 0..4 {
            let mut tp = [0.0; 4];
            let mut tm = [0.0; 4];
            tp[col] = step;
            tm[col] = -step;
            let (_, fp) = tilted_normal_component(&tp);
            let (_, fm) = tilted_normal_component(&tm);
            let d = (fp - fm) / (2.0 * step);
            j.set_column(col, &d);
        }
        j
    };
    let coarse = diff(delta);
    let fine = diff(delta / 2.0);
    (fine * 4.0 - coarse) / 3.0
}

/// Almost complex structure on a coassociative 4-plane with normal n:
/// u -> |n|^{-1} n x u.
pub fn jn_apply(n: &ImOcton, u: &ImOcton) -> Result<ImOcton> {
    let norm = n.norm();
    if norm == 0.0 {
        return Err(Error::SingularNormal);
    }
    Ok(n.cross(u).scale(1.0 / norm))
}

/// 2-form on a 4-plane, coefficients against the six oriented frame pairs
/// (a<b) in the order (12),(13),(14),(23),(24),(34) of frame indices.
#[derive(Debug, Clone)]
pub struct SelfDualForm {
    pub coeff: [f64; 6],
    pub basis_frame: Frame,
    /// Orientation sign of the 4-plane, fixed so the form is self-dual.
    pub orientation: f64,
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl SelfDualForm {
    /// Hodge star on the 4-plane for the given orientation sign; pairs map to
    /// their complements with the permutation sign.
    pub fn hodge(&self) -> [f64; 6] {
        let c = &self.coeff;
        // star(w_ab) = sign(a,b,c,d) w_cd with (c,d) the complement.
        [
            self.orientation * c[5],
            -self.orientation * c[4],
            self.orientation * c[3],
            self.orientation * c[2],
            -self.orientation * c[1],
            self.orientation * c[0],
        ]
    }

    /// Max |coeff - hodge(coeff)|; zero for a self-dual form.
    pub fn self_duality_residual(&self) -> f64 {
        let h = self.hodge();
        (0..6).fold(0.0f64, |m, i| m.max((self.coeff[i] - h[i]).abs()))
    }

    /// Frobenius norm of the 2-form (coefficients against an orthonormal
    /// frame, each unordered pair counted once).
    pub fn norm(&self) -> f64 {
        self.coeff.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Evaluate on two vectors expressed in the frame's span.
    pub fn eval(&self, u: &ImOcton, v: &ImOcton) -> f64 {
        let uc: Vec<f64> = self.basis_frame.vectors.iter().map(|w| u.dot(w)).collect();
        let vc: Vec<f64> = self.basis_frame.vectors.iter().map(|w| v.dot(w)).collect();
        PAIRS
            .iter()
            .enumerate()
            .map(|(idx, &(a, b))| self.coeff[idx] * (uc[a] * vc[b] - uc[b] * vc[a]))
            .sum()
    }
}

/// Contraction of the calibration form by a unit normal n on a coassociative
/// 4-plane C: eta0(u,v) = Omega(n,u,v) against C's frame pairs.
///
/// The orientation of C is chosen so that eta0 ^ eta0 > 0, which makes eta0
/// self-dual; |eta0| = sqrt(2) for unit n, so eta0 itself is the Hermitian
/// form of J_n (eta0(u,v) = g(J_n u, v) on C).
pub fn eta_from_normal(n: &ImOcton, c: &Frame) -> Result<SelfDualForm> {
    if c.vectors.len() != 4 {
        return Err(Error::InvalidSeed("expected a 4-frame".into()));
    }
    let coa = coassociative_residual(c)?;
    if coa > 1e-10 {
        return Err(Error::InvalidSeed(format!(
            "frame is not coassociative (residual {coa:.3e})"
        )));
    }
    if (n.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidSeed("normal vector must be unit".into()));
    }
    let mut coeff = [0.0; 6];
    for (idx, &(a, b)) in PAIRS.iter().enumerate() {
        coeff[idx] = g2_form(n, &c.vectors[a], &c.vectors[b]);
    }
    // eta ^ eta = 2 (c12 c34 - c13 c24 + c14 c23) vol; orient so it is > 0.
    let wedge = coeff[0] * coeff[5] - coeff[1] * coeff[4] + coeff[2] * coeff[3];
    let orientation = if wedge >= 0.0 { 1.0 } else { -1.0 };
    Ok(SelfDualForm {
        coeff,
        basis_frame: c.clone(),
        orientation,
    })
}

/// Holomorphicity residual of a 2-plane T with respect to J_n: the size of
/// the components of J_n T1, J_n T2 sticking out of T. Zero iff T is
/// J_n-invariant.
pub fn j_holomorphic_residual(t: &Frame, n: &ImOcton) -> Result<f64> {
    if t.vectors.len() != 2 {
        return Err(Error::InvalidSeed("expected a 2-frame".into()));
    }
    t.require_orthonormal(1e-10)?;
    let mut total = 0.0;
    for tv in &t.vectors {
        let image = jn_apply(n, tv)?;
        let mut out_of_plane = image;
        for basis in &t.vectors {
            out_of_plane = out_of_plane.sub(&basis.scale(image.dot(basis)));
        }
        total += out_of_plane.dot(&out_of_plane);
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(i: usize) -> ImOcton {
        ImOcton::basis(i)
    }

    fn random_unit(rng: &mut ChaCha8Rng) -> ImOcton {
        loop {
            let mut c = [0.0; 7];
            for x in &mut c {
                *x = rng.gen_range(-1.0..1.0);
            }
            let v = ImOcton::new(c);
            if v.norm() > 1e-2 {
                return v.scale(1.0 / v.norm());
            }
        }
    }

    /// Random orthonormal pair via Gram-Schmidt.
    fn random_pair(rng: &mut ChaCha8Rng) -> (ImOcton, ImOcton) {
        let w1 = random_unit(rng);
        loop {
            let mut w2 = random_unit(rng);
            w2 = w2.sub(&w1.scale(w2.dot(&w1)));
            if w2.norm() > 1e-2 {
                return (w1, w2.scale(1.0 / w2.norm()));
            }
        }
    }

    /// Random valid Cayley-Dickson seed: orthonormal (W1,W2) plus a unit W4
    /// orthogonal to W1, W2 and W1 x W2.
    fn random_seed(rng: &mut ChaCha8Rng) -> (ImOcton, ImOcton, ImOcton) {
        let (w1, w2) = random_pair(rng);
        let w3 = w1.cross(&w2);
        loop {
            let mut w4 = random_unit(rng);
            for t in [&w1, &w2, &w3] {
                w4 = w4.sub(&t.scale(w4.dot(t)));
            }
            if w4.norm() > 1e-2 {
                return (w1, w2, w4.scale(1.0 / w4.norm()));
            }
        }
    }

    #[test]
    fn associative_residual_examples() {
        let (r, v) = associative_residual(&Frame::new(vec![e(1), e(2), e(3)])).unwrap();
        assert_eq!(r, 0.0);
        assert_eq!(v.norm(), 0.0);

        let (r, _) = associative_residual(&Frame::new(vec![e(1), e(4), e(5)])).unwrap();
        assert_abs_diff_eq!(r, 0.0, epsilon = 1e-14);

        let (r, v) = associative_residual(&Frame::new(vec![e(1), e(2), e(4)])).unwrap();
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.sub(&e(7)).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn associative_rejects_non_orthonormal() {
        let f = Frame::new(vec![e(1), e(2).scale(2.0), e(3)]);
        assert!(matches!(
            associative_residual(&f),
            Err(Error::NonOrthonormalFrame { .. })
        ));
    }

    #[test]
    fn coassociative_examples() {
        let r = coassociative_residual(&Frame::new(vec![e(4), e(5), e(6), e(7)])).unwrap();
        assert_eq!(r, 0.0);
        let r = coassociative_residual(&Frame::new(vec![e(1), e(2), e(3), e(4)])).unwrap();
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn coassociative_plane_survives_cross_preserving_rotation() {
        // Cross-product-preserving maps come from Cayley-Dickson frames:
        // e_i -> W_i is an isometry preserving all structure constants.
        // Composing two such maps keeps the coassociative plane {W4..W7}
        // coassociative.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let (w1, w2, w4) = random_seed(&mut rng);
            let f = cayley_dickson_frame(&w1, &w2, &w4).unwrap();
            let rot = |v: &ImOcton| -> ImOcton {
                let mut out = ImOcton::ZERO;
                for (i, w) in f.vectors.iter().enumerate() {
                    out = out.add(&w.scale(v.c[i]));
                }
                out
            };
            let plane = Frame::new(vec![rot(&e(4)), rot(&e(5)), rot(&e(6)), rot(&e(7))]);
            let r = coassociative_residual(&plane).unwrap();
            assert!(r < 1e-10, "rotated coassociative residual {r:.3e}");
        }
    }

    #[test]
    fn cayley_dickson_standard_seed() {
        let f = cayley_dickson_frame(&e(1), &e(2), &e(4)).unwrap();
        for (i, v) in f.vectors.iter().enumerate() {
            assert_abs_diff_eq!(v.sub(&e(i + 1)).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn cayley_dickson_random_seeds_match_structure_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let (w1, w2, w4) = random_seed(&mut rng);
            let f = cayley_dickson_frame(&w1, &w2, &w4).unwrap();
            assert!(f.orthonormality_residual() < 1e-10);
            assert!(structure_constant_residual(&f) < 1e-10);
        }
    }

    #[test]
    fn cayley_dickson_rejects_bad_normal() {
        // W4 = e3 = e1 x e2 violates the orthogonality precondition.
        assert!(matches!(
            cayley_dickson_frame(&e(1), &e(2), &e(3)),
            Err(Error::InvalidSeed(_))
        ));
    }

    #[test]
    fn associative_closure_of_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let (w1, w2) = random_pair(&mut rng);
            let w3 = w1.cross(&w2);
            let (r, _) = associative_residual(&Frame::new(vec![w1, w2, w3])).unwrap();
            assert!(r < 1e-10);
        }
    }

    #[test]
    fn almost_instanton_zero_tilt() {
        let (normal, j0) = almost_instanton_map(&[0.0; 4]).unwrap();
        assert!(normal.norm() < 1e-14);
        let svd = j0.svd(false, false);
        let smin = svd.singular_values.iter().cloned().fold(f64::MAX, f64::min);
        assert!(smin >= 0.5, "sigma_min = {smin}");
    }

    #[test]
    fn almost_instanton_jacobian_stable_under_step_halving() {
        let j1 = almost_instanton_jacobian(5e-3);
        let j2 = almost_instanton_jacobian(2.5e-3);
        let diff = (j1 - j2).norm();
        assert!(diff < 1e-8, "Jacobian step sensitivity {diff:.3e}");
    }

    #[test]
    fn almost_instanton_single_tilt_dominant_component() {
        let (normal, _) = almost_instanton_map(&[0.0, 0.1, 0.0, 0.0]).unwrap();
        let mags: Vec<f64> = normal.c.iter().map(|x| x.abs()).collect();
        let mut sorted = mags.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        // One dominant component of size |t| up to O(t^2), rest second order.
        assert!((sorted[0] - 0.1).abs() < 5e-3, "dominant {:.4}", sorted[0]);
        assert!(sorted[1] < 2e-2, "subdominant {:.4}", sorted[1]);
    }

    #[test]
    fn jn_examples() {
        let img = jn_apply(&e(1), &e(4)).unwrap();
        assert_abs_diff_eq!(img.sub(&e(5)).norm(), 0.0, epsilon = 1e-14);
        // scale invariance in n
        let img2 = jn_apply(&e(1).scale(2.0), &e(4)).unwrap();
        assert_abs_diff_eq!(img.sub(&img2).norm(), 0.0, epsilon = 1e-14);
        assert!(matches!(
            jn_apply(&ImOcton::ZERO, &e(4)),
            Err(Error::SingularNormal)
        ));
    }

    #[test]
    fn jn_squares_to_minus_id_on_coassociative_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..1000 {
            // Random vector in the coassociative plane {e4..e7}, normal e1.
            let mut c = [0.0; 7];
            for x in c.iter_mut().skip(3) {
                *x = rng.gen_range(-1.0..1.0);
            }
            let u = ImOcton::new(c);
            let jju = jn_apply(&e(1), &jn_apply(&e(1), &u).unwrap()).unwrap();
            assert!(jju.add(&u).norm() < 1e-10);
        }
    }

    #[test]
    fn eta_standard_example() {
        let c = Frame::new(vec![e(4), e(5), e(6), e(7)]);
        let eta = eta_from_normal(&e(1), &c).unwrap();
        // eta0 = W4* ^ W5* - W6* ^ W7* in the pair order
        // (45),(46),(47),(56),(57),(67).
        let expected = [1.0, 0.0, 0.0, 0.0, 0.0, -1.0];
        for i in 0..6 {
            assert_abs_diff_eq!(eta.coeff[i], expected[i], epsilon = 1e-14);
        }
        assert_abs_diff_eq!(eta.norm(), 2.0f64.sqrt(), epsilon = 1e-14);
        assert!(eta.self_duality_residual() <= 1e-12);
    }

    #[test]
    fn eta_matches_jn_hermitian_form() {
        let c = Frame::new(vec![e(4), e(5), e(6), e(7)]);
        let eta = eta_from_normal(&e(1), &c).unwrap();
        for u in &c.vectors {
            for v in &c.vectors {
                let lhs = eta.eval(u, v);
                let rhs = jn_apply(&e(1), u).unwrap().dot(v);
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn eta_self_dual_on_random_coassociative_planes() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let (w1, w2, w4) = random_seed(&mut rng);
            let f = cayley_dickson_frame(&w1, &w2, &w4).unwrap();
            let plane = Frame::new(vec![
                f.vectors[3],
                f.vectors[4],
                f.vectors[5],
                f.vectors[6],
            ]);
            // normal: W1 plays the role of e1 for this plane.
            let eta = eta_from_normal(&f.vectors[0], &plane).unwrap();
            assert!(eta.self_duality_residual() <= 1e-12);
            assert_abs_diff_eq!(eta.norm(), 2.0f64.sqrt(), epsilon = 1e-10);
            for u in &plane.vectors {
                for v in &plane.vectors {
                    let lhs = eta.eval(u, v);
                    let rhs = jn_apply(&f.vectors[0], u).unwrap().dot(v);
                    assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn j_holomorphic_examples() {
        let r = j_holomorphic_residual(&Frame::new(vec![e(4), e(5)]), &e(1)).unwrap();
        assert_abs_diff_eq!(r, 0.0, epsilon = 1e-14);
        let r = j_holomorphic_residual(&Frame::new(vec![e(4), e(6)]), &e(1)).unwrap();
        assert_abs_diff_eq!(r, 2.0f64.sqrt(), epsilon = 1e-12);
        // T2 = J_n T1 is invariant by construction.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..50 {
            let mut c = [0.0; 7];
            for x in c.iter_mut().skip(3) {
                *x = rng.gen_range(-1.0..1.0);
            }
            let t1 = ImOcton::new(c);
            let t1 = t1.scale(1.0 / t1.norm());
            let t2 = jn_apply(&e(1), &t1).unwrap();
            let r = j_holomorphic_residual(&Frame::new(vec![t1, t2]), &e(1)).unwrap();
            assert!(r < 1e-10);
        }
    }
}
