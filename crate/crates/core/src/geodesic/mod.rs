//! Geodesic compatibility of an operator with a metric, the projectively
//! equivalent metric it generates, and the curvature identities that follow.
//!
//! Metrics are `n×n` matrices `g_{ij}`; operators are `L^i_j`. The
//! compatibility equation is
//! `∇_k L_{ij} = λ_i g_{jk} + λ_j g_{ik}` with `L_{ij} = g_{is}L^s_j` and
//! `λ = ½ tr L`.

pub mod chain;
pub mod conify;
pub mod maximal;
pub mod pencil;

pub use chain::{flatness_chain, metric_power, metric_through, ChainEntry, ChainReport};
pub use conify::{conify, Conification};
pub use maximal::{fit_form, fn_constant_commutation, FormFit, Membership, NonCommutation};
pub use pencil::{build_pencil_operator, PencilData, PencilOperator};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::nijenhuis::lambda_data_with_inverse;
use crate::ratfun::{Mat, RatFun};
use crate::tensor::{
    christoffel_unchecked, curvature_class, hessian, riemann,
    CurvatureVerdict, TensorField, Variance,
};

/// `g·L` must be symmetric.
pub fn check_self_adjoint(g: &Mat, l: &Mat) -> Result<()> {
    match g.mul_ref(l).asymmetry_witness() {
        Some((i, j)) => Err(Error::NotSelfAdjoint(vec![i, j])),
        None => Ok(()),
    }
}

/// First component `(i, j, k)` where `∇_k L_{ij} ≠ λ_i g_{jk} + λ_j g_{ik}`.
pub fn compatibility_witness(g: &Mat, l: &Mat) -> Result<Option<[usize; 3]>> {
    Ok(compatibility_residual(g, l)?.map(|(w, _)| w))
}

/// The first failing component together with `∇_k L_{ij} − λ_i g_{jk} − λ_j g_{ik}`.
pub fn compatibility_residual(g: &Mat, l: &Mat) -> Result<Option<([usize; 3], RatFun)>> {
    check_self_adjoint(g, l)?;
    let ginv = g.inverse().ok_or(Error::DegenerateMetric)?;
    let c = christoffel_unchecked(g)?;
    let lam = lambda_data_with_inverse(l, &ginv);
    let lower = TensorField::from_mat(&g.mul_ref(l), [Variance::Down, Variance::Down]);
    let d = lower.covariant_derivative(&c)?;
    let n = g.rows();
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                let rhs = lam.lower[i]
                    .mul_ref(g.get(j, k))
                    .add_ref(&lam.lower[j].mul_ref(g.get(i, k)));
                if *d.get(&[i, j, k]) != rhs {
                    return Ok(Some(([i, j, k], d.get(&[i, j, k]).sub_ref(&rhs))));
                }
            }
        }
    }
    Ok(None)
}

/// Exact check of the compatibility equation. A non-self-adjoint `L`
/// yields [`Error::NotSelfAdjoint`] rather than `false`.
pub fn is_geodesically_compatible(g: &Mat, l: &Mat) -> Result<bool> {
    Ok(compatibility_witness(g, l)?.is_none())
}

fn require_compatible(g: &Mat, l: &Mat) -> Result<()> {
    if let Some(w) = compatibility_witness(g, l)? {
        return Err(Error::Precondition(format!(
            "operator is not geodesically compatible with the metric (component ∇_{}L_{}{})",
            w[2] + 1,
            w[0] + 1,
            w[1] + 1
        )));
    }
    Ok(())
}

/// Outcome of reconstructing `L` from `(g, g̃)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Roundtrip {
    Verified,
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TildeMetric {
    pub metric: Mat,
    pub roundtrip: Roundtrip,
}

/// `g̃ = (sign / det L)·g·L⁻¹`, where `sign` is the sign of `det L` on the
/// working domain, so that `sign/det L = 1/|det L|`.
///
/// The inverse direction `L = (|det g̃|/|det g|)^{1/(n+1)} g̃⁻¹g` is checked
/// when the root is rational, i.e. when `|det g̃/det g| = (sign·det L)^{−n−1}`.
pub fn tilde_metric(g: &Mat, l: &Mat, sign: i32) -> Result<TildeMetric> {
    assert!(sign == 1 || sign == -1, "sign must be ±1");
    let n = g.rows();
    let det = l.det();
    let linv = l.inverse().ok_or(Error::SingularOperator)?;
    let abs_det = det.scale_int(sign as i64);
    let factor = abs_det.inv().ok_or(Error::SingularOperator)?;
    let metric = g.mul_ref(&linv).scale(&factor);

    let ratio = metric
        .det()
        .div_ref(&g.det())
        .ok_or(Error::DegenerateMetric)?;
    let power = factor.pow(n as u32 + 1);
    let roundtrip = if ratio == power || ratio == power.neg_ref() {
        let back = metric
            .inverse()
            .ok_or(Error::DegenerateMetric)?
            .mul_ref(g)
            .scale(&factor);
        assert_eq!(&back, l, "operator reconstruction from (g, g̃) failed");
        Roundtrip::Verified
    } else {
        Roundtrip::Skipped("determinant ratio has no rational (n+1)-th root".into())
    };
    Ok(TildeMetric { metric, roundtrip })
}

/// Checks that `ḡ = gL⁻¹` has `Γ̄^i_{jk} = Γ^i_{jk} − λ^i ḡ_{jk}` and is again
/// geodesically compatible with `L`.
pub fn sinjukov_swap(g: &Mat, l: &Mat) -> Result<bool> {
    require_compatible(g, l)?;
    let n = g.rows();
    let ginv = g.inverse().ok_or(Error::DegenerateMetric)?;
    let linv = l.inverse().ok_or(Error::SingularOperator)?;
    let gbar = g.mul_ref(&linv);
    let lam = lambda_data_with_inverse(l, &ginv);
    let c = christoffel_unchecked(g)?;
    let cbar = christoffel_unchecked(&gbar)?;
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let expected = c.get(i, j, k).sub_ref(&lam.upper[i].mul_ref(gbar.get(j, k)));
                if *cbar.get(i, j, k) != expected {
                    return Ok(false);
                }
            }
        }
    }
    is_geodesically_compatible(&gbar, l)
}

/// `M^i_j = ∇^i∇_jλ` for `λ = ½ tr L`.
pub fn hessian_operator(g: &Mat, l: &Mat) -> Result<Mat> {
    let ginv = g.inverse().ok_or(Error::DegenerateMetric)?;
    let c = christoffel_unchecked(g)?;
    let lambda = l
        .trace()
        .scale(&BigRational::new(BigInt::from(1), BigInt::from(2)));
    Ok(ginv.mul_ref(&hessian(&lambda, &c)))
}

/// Curvature data of a compatible pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatCurvature {
    /// `K` with `∇^i∇_jλ = −Kδ^i_j`; present when `g` is flat.
    pub k: Option<RatFun>,
    /// `[R(v,u), L] = [u⊗g(v) − v⊗g(u), M]` on every basis pair.
    pub magic_holds: bool,
    /// First basis pair `(v, u)` violating it.
    pub magic_witness: Option<(usize, usize)>,
}

/// Verifies `[R(v,u), L] = [u⊗g(v) − v⊗g(u), M]` for all basis pairs and,
/// for flat `g`, extracts `K` from `∇^i∇_jλ + Kδ^i_j = 0` and cross-checks it
/// against the curvature of `gL⁻¹`.
pub fn compat_curvature_identities(g: &Mat, l: &Mat) -> Result<CompatCurvature> {
    require_compatible(g, l)?;
    let n = g.rows();
    let nv = g.nvars();
    let c = christoffel_unchecked(g)?;
    let r = riemann(&c);
    let m = hessian_operator(g, l)?;

    let mut magic_witness = None;
    'pairs: for v in 0..n {
        for u in v + 1..n {
            // R(e_v, e_u) as a matrix: (·)^ℓ_i = R^ℓ_{i v u}.
            let rvu = Mat::from_fn(n, n, nv, |a, i| r.get(&[a, i, v, u]).clone());
            // u⊗g(v) − v⊗g(u): (·)^a_j = δ^a_u g_{vj} − δ^a_v g_{uj}.
            let x = Mat::from_fn(n, n, nv, |a, j| {
                if a == u {
                    g.get(v, j).clone()
                } else if a == v {
                    g.get(u, j).neg_ref()
                } else {
                    RatFun::zero(nv)
                }
            });
            if rvu.commutator(l) != x.commutator(&m) {
                magic_witness = Some((v, u));
                break 'pairs;
            }
        }
    }

    let k = if r.is_zero() {
        let rho = m.get(0, 0).clone();
        let residual = m.sub_ref(&Mat::identity(n, nv).scale(&rho));
        if !residual.is_zero() || !rho.is_constant_in(n) {
            return Err(Error::Precondition(
                "∇^i∇_jλ is not a constant multiple of the identity".into(),
            ));
        }
        let k = rho.neg_ref();
        if let Some(linv) = l.inverse() {
            let verdict = curvature_class(&g.mul_ref(&linv))?;
            if verdict.constant(nv).as_ref() != Some(&k) {
                return Err(Error::CurvatureMismatch {
                    expected: CurvatureVerdict::from_constant(k).to_string(),
                    found: verdict.to_string(),
                });
            }
        }
        Some(k)
    } else {
        None
    };
    Ok(CompatCurvature {
        k,
        magic_holds: magic_witness.is_none(),
        magic_witness,
    })
}

/// For `g` of constant curvature `K`, solves
/// `∇^iλ_j = (−K tr L + C)δ^i_j − K L^i_j` for `C` and checks that the
/// identity holds with `C` constant.
pub fn verify_vnb(g: &Mat, l: &Mat, k: &RatFun) -> Result<RatFun> {
    require_compatible(g, l)?;
    let n = g.rows();
    let nv = g.nvars();
    let verdict = curvature_class(g)?;
    match verdict.constant(nv) {
        None => {
            return Err(Error::Precondition(format!(
                "metric is not of constant curvature: {verdict}"
            )))
        }
        Some(found) if &found != k => {
            return Err(Error::CurvatureMismatch {
                expected: k.to_string(),
                found: found.to_string(),
            })
        }
        Some(_) => {}
    }
    let m = hessian_operator(g, l)?;
    let shifted = m
        .add_ref(&l.scale(k))
        .add_ref(&Mat::identity(n, nv).scale(&k.mul_ref(&l.trace())));
    let c = shifted.get(0, 0).clone();
    if let Some((i, j)) = first_nonzero(&shifted.sub_ref(&Mat::identity(n, nv).scale(&c))) {
        return Err(Error::Precondition(format!(
            "identity fails at component ({}, {})",
            i + 1,
            j + 1
        )));
    }
    if !c.is_constant_in(n) {
        return Err(Error::Precondition(format!("C = {c} is not constant")));
    }
    Ok(c)
}

fn first_nonzero(m: &Mat) -> Option<(usize, usize)> {
    let n = m.cols();
    m.entries()
        .iter()
        .position(|e| !e.is_zero())
        .map(|p| (p / n, p % n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> RatFun {
        RatFun::var(i, 2)
    }

    fn lc2() -> (Mat, Mat) {
        let d = &x(0) - &x(1);
        (
            Mat::diagonal(vec![d.clone(), d.neg_ref()], 2),
            Mat::diagonal(vec![x(0), x(1)], 2),
        )
    }

    #[test]
    fn identity_is_compatible_with_anything() {
        let (g, _) = lc2();
        assert!(is_geodesically_compatible(&g, &Mat::identity(2, 2)).unwrap());
    }

    #[test]
    fn diagonal_coordinates_not_compatible_with_euclidean() {
        let l = Mat::diagonal(vec![x(0), x(1)], 2);
        assert!(!is_geodesically_compatible(&Mat::identity(2, 2), &l).unwrap());
    }

    #[test]
    fn non_self_adjoint_reported() {
        let l = Mat::from_rows(
            vec![vec![RatFun::one(2), x(0)], vec![RatFun::zero(2), RatFun::one(2)]],
            2,
        );
        assert!(matches!(
            is_geodesically_compatible(&Mat::identity(2, 2), &l),
            Err(Error::NotSelfAdjoint(_))
        ));
    }

    #[test]
    fn lc_pair_identities() {
        let (g, l) = lc2();
        assert!(is_geodesically_compatible(&g, &l).unwrap());
        assert!(sinjukov_swap(&g, &l).unwrap());
        let cc = compat_curvature_identities(&g, &l).unwrap();
        assert!(cc.magic_holds);
        assert_eq!(cc.k, Some(RatFun::zero(2)));
    }

    #[test]
    fn tilde_of_identity() {
        let (g, _) = lc2();
        let t = tilde_metric(&g, &Mat::identity(2, 2), 1).unwrap();
        assert_eq!(t.metric, g);
        assert_eq!(t.roundtrip, Roundtrip::Verified);
    }
}
