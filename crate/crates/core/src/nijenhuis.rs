//! Nijenhuis torsion, Frölicher–Nijenhuis bracket and the algebraic
//! identities of operator fields.
//!
//! Operators are `n×n` matrices `L^i_j` over the first `n` variables.
//! Vector-valued 2-forms are rank-3 tensors `T^i_{jk}` antisymmetric in
//! `(j, k)`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::ratfun::{Mat, RatFun};
use crate::tensor::{TensorField, Variance};

fn two_form(n: usize, nvars: usize) -> TensorField {
    TensorField::zeros(n, nvars, vec![Variance::Up, Variance::Down, Variance::Down])
}

/// `N^i_{jk} = L^s_j ∂_s L^i_k − L^s_k ∂_s L^i_j − L^i_s(∂_j L^s_k − ∂_k L^s_j)`.
pub fn torsion(l: &Mat) -> TensorField {
    let n = l.rows();
    let nv = l.nvars();
    let dl: Vec<Mat> = (0..n).map(|v| l.derivative(v)).collect();
    let mut out = two_form(n, nv);
    for i in 0..n {
        for j in 0..n {
            for k in j + 1..n {
                let mut acc = RatFun::zero(nv);
                for s in 0..n {
                    let t1 = l.get(s, j).mul_ref(dl[s].get(i, k));
                    let t2 = l.get(s, k).mul_ref(dl[s].get(i, j));
                    let t3 = l
                        .get(i, s)
                        .mul_ref(&dl[j].get(s, k).sub_ref(dl[k].get(s, j)));
                    acc = acc.add_ref(&t1).sub_ref(&t2).sub_ref(&t3);
                }
                out.set(&[i, k, j], acc.neg_ref());
                out.set(&[i, j, k], acc);
            }
        }
    }
    out
}

pub fn is_nijenhuis(l: &Mat) -> bool {
    torsion(l).is_zero()
}

/// `[[L1, L2]] = 𝒩_{L1+L2} − 𝒩_{L1} − 𝒩_{L2}`, so `[[L, L]] = 2𝒩_L`.
pub fn fn_bracket(l1: &Mat, l2: &Mat) -> TensorField {
    torsion(&l1.add_ref(l2))
        .sub_ref(&torsion(l1))
        .sub_ref(&torsion(l2))
}

/// Result of the quotient identity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientIdentity {
    /// The identity holds in every component.
    pub holds: bool,
    /// First failing component `(i, j, k)` (0-based), if any.
    pub witness: Option<Vec<usize>>,
    /// `𝒩_{M}(L2·, L2·)` vanishes, with `M = L1 L2⁻¹`.
    pub quotient_torsion_vanishes: bool,
}

/// Checks, on coordinate basis vectors `v, w`,
/// `𝒩_{L1}(v,w) + M²𝒩_{L2}(v,w) − 𝒩_M(L2v, L2w) = M[[L1,L2]](v,w)`
/// with `M = L1 L2⁻¹`.
pub fn verify_quotient_identity(l1: &Mat, l2: &Mat) -> Result<QuotientIdentity> {
    let n = l1.rows();
    let nv = l1.nvars();
    let l2inv = l2.inverse().ok_or(Error::SingularOperator)?;
    let m = l1.mul_ref(&l2inv);
    let m2 = m.mul_ref(&m);
    let n1 = torsion(l1);
    let n2 = torsion(l2);
    let nm = torsion(&m);
    let br = fn_bracket(l1, l2);
    // 𝒩_M(L2 e_j, L2 e_k)^i = N_M^i_{ab} L2^a_j L2^b_k
    let pulled = TensorField::from_fn(
        n,
        nv,
        vec![Variance::Up, Variance::Down, Variance::Down],
        |idx| {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            let mut acc = RatFun::zero(nv);
            for a in 0..n {
                let la = l2.get(a, j);
                if la.is_zero() {
                    continue;
                }
                for b in 0..n {
                    let lb = l2.get(b, k);
                    let t = nm.get(&[i, a, b]);
                    if lb.is_zero() || t.is_zero() {
                        continue;
                    }
                    acc = acc.add_ref(&t.mul_ref(la).mul_ref(lb));
                }
            }
            acc
        },
    );
    let apply = |op: &Mat, t: &TensorField, i: usize, j: usize, k: usize| {
        let mut acc = RatFun::zero(nv);
        for s in 0..n {
            let e = t.get(&[s, j, k]);
            if !e.is_zero() {
                acc = acc.add_ref(&op.get(i, s).mul_ref(e));
            }
        }
        acc
    };
    let mut witness = None;
    'outer: for i in 0..n {
        for j in 0..n {
            for k in j + 1..n {
                let lhs = n1
                    .get(&[i, j, k])
                    .add_ref(&apply(&m2, &n2, i, j, k))
                    .sub_ref(pulled.get(&[i, j, k]));
                let rhs = apply(&m, &br, i, j, k);
                if lhs != rhs {
                    witness = Some(vec![i, j, k]);
                    break 'outer;
                }
            }
        }
    }
    Ok(QuotientIdentity {
        holds: witness.is_none(),
        witness,
        quotient_torsion_vanishes: pulled.is_zero(),
    })
}

/// `λ = ½ tr L`, its differential `λ_i` and `λ^i = g^{is}λ_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaData {
    pub lambda: RatFun,
    pub lower: Vec<RatFun>,
    pub upper: Vec<RatFun>,
}

pub fn lambda_data(l: &Mat, g: &Mat) -> Result<LambdaData> {
    let ginv = g.inverse().ok_or(Error::DegenerateMetric)?;
    Ok(lambda_data_with_inverse(l, &ginv))
}

pub(crate) fn lambda_data_with_inverse(l: &Mat, ginv: &Mat) -> LambdaData {
    let n = l.rows();
    let lambda = l
        .trace()
        .scale(&BigRational::new(BigInt::from(1), BigInt::from(2)));
    let lower: Vec<RatFun> = (0..n).map(|i| lambda.derivative(i)).collect();
    let upper = ginv.mul_vec(&lower);
    LambdaData {
        lambda,
        lower,
        upper,
    }
}

/// `L^* d(det L) = 2 det L dλ`, i.e. `∂_i(det L) L^i_j = det L ∂_j tr L`.
/// Requires `L` to be Nijenhuis.
pub fn verify_trace_det_identity(l: &Mat) -> Result<bool> {
    if let Some((idx, e)) = torsion(l).first_nonzero() {
        return Err(Error::Precondition(format!(
            "operator is not Nijenhuis: N^{}_{}{} = {e}",
            idx[0] + 1,
            idx[1] + 1,
            idx[2] + 1
        )));
    }
    let n = l.rows();
    let det = l.det();
    let tr = l.trace();
    let ddet: Vec<RatFun> = (0..n).map(|i| det.derivative(i)).collect();
    let lhs = l.transpose().mul_vec(&ddet);
    Ok((0..n).all(|j| lhs[j] == det.mul_ref(&tr.derivative(j))))
}
