//! Closed forms for diagonal metrics `g = diag(g_1..g_n)` and their
//! rescalings `ḡ = g·diag(h_1..h_n)⁻¹` with `h_k = h_k(x^k)`.
//!
//! These are independent of the generic Christoffel/Riemann pipeline and
//! serve as its cross-check.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Connection, TensorField, Variance};
use crate::error::{Error, Result};
use crate::ratfun::RatFun;

#[derive(Clone, Debug)]
pub struct DiagonalOracle {
    pub gamma: Connection,
    pub gamma_bar: Connection,
    /// `R^ℓ_{ijk}` of `g`.
    pub riemann: TensorField,
    /// `R̄^ℓ_{ijk}` of `ḡ`.
    pub riemann_bar: TensorField,
    /// `ḡ^{ii} R̄^j_{iji}` for `i ≠ j`, as `(i, j, value)`.
    pub sectional_bar: Vec<(usize, usize, RatFun)>,
}

/// Closed-form connection and curvature of a diagonal metric and its
/// rescaling by per-axis multipliers.
pub fn diagonal_oracle(g: &[RatFun], h: &[RatFun]) -> Result<DiagonalOracle> {
    let n = g.len();
    assert_eq!(h.len(), n, "one multiplier per axis");
    let nv = g[0].nvars();
    for (k, hk) in h.iter().enumerate() {
        if hk.is_zero() {
            return Err(Error::SingularOperator);
        }
        if let Some(v) = (0..n).find(|&v| v != k && hk.depends_on(v)) {
            return Err(Error::ForeignVariable {
                index: k,
                var: format!("x{}", v + 1),
            });
        }
    }
    if g.iter().any(RatFun::is_zero) {
        return Err(Error::DegenerateMetric);
    }
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let ginv: Vec<RatFun> = g.iter().map(|e| e.inv().unwrap()).collect();
    let hinv: Vec<RatFun> = h.iter().map(|e| e.inv().unwrap()).collect();
    let dh: Vec<RatFun> = h.iter().enumerate().map(|(k, e)| e.derivative(k)).collect();

    let gamma_fn = |k: usize, i: usize, j: usize| -> RatFun {
        if k == i {
            ginv[k].mul_ref(&g[k].derivative(j)).scale(&half)
        } else if k == j {
            ginv[k].mul_ref(&g[k].derivative(i)).scale(&half)
        } else if i == j {
            ginv[k].mul_ref(&g[i].derivative(k)).scale(&half).neg_ref()
        } else {
            RatFun::zero(nv)
        }
    };
    let gamma = Connection::from_fn(n, nv, gamma_fn)?;
    let gamma_bar = Connection::from_fn(n, nv, |k, i, j| {
        if k == i && k == j {
            gamma.get(k, k, k).sub_ref(&hinv[k].mul_ref(&dh[k]).scale(&half))
        } else if k == i || k == j {
            gamma.get(k, i, j).clone()
        } else if i == j {
            h[k].mul_ref(&hinv[j]).mul_ref(gamma.get(k, j, j))
        } else {
            RatFun::zero(nv)
        }
    })?;

    let gm = |a: usize, b: usize, c: usize| gamma.get(a, b, c);
    // R^j_{ijk}, pairwise distinct i, j, k.
    let r_jijk = |i: usize, j: usize, k: usize| -> RatFun {
        gm(j, i, j)
            .derivative(k)
            .neg_ref()
            .add_ref(&gm(j, j, i).mul_ref(gm(i, i, k)))
            .add_ref(&gm(j, j, k).mul_ref(gm(k, i, k)))
            .sub_ref(&gm(j, k, j).mul_ref(gm(j, i, j)))
    };
    // R^j_{iji}, i ≠ j.
    let r_jiji = |i: usize, j: usize| -> RatFun {
        let mut acc = gm(j, i, i).derivative(j).sub_ref(&gm(j, i, j).derivative(i));
        for a in 0..n {
            acc = acc.add_ref(&gm(j, j, a).mul_ref(gm(a, i, i)));
        }
        acc.sub_ref(&gm(j, i, i).mul_ref(gm(i, i, j)))
            .sub_ref(&gm(j, i, j).mul_ref(gm(j, i, j)))
    };
    // R^k_{iji}, k ∉ {i, j}, i ≠ j.
    let r_kiji = |k: usize, i: usize, j: usize| -> RatFun {
        gm(k, i, i)
            .derivative(j)
            .add_ref(&gm(k, j, j).mul_ref(gm(j, i, i)))
            .add_ref(&gm(k, j, k).mul_ref(gm(k, i, i)))
            .sub_ref(&gm(k, i, i).mul_ref(gm(i, i, j)))
    };
    // Barred R̄^j_{iji}: the rescaled form of r_jiji.
    let r_bar_jiji = |i: usize, j: usize| -> RatFun {
        let hj_hi = h[j].mul_ref(&hinv[i]);
        let mut acc = hj_hi
            .mul_ref(&gm(j, i, i).derivative(j))
            .sub_ref(&gm(j, i, j).derivative(i));
        for a in 0..n {
            acc = acc.add_ref(
                &h[a]
                    .mul_ref(&hinv[i])
                    .mul_ref(gm(j, j, a))
                    .mul_ref(gm(a, i, i)),
            );
        }
        acc.sub_ref(&hj_hi.mul_ref(gm(j, i, i)).mul_ref(gm(i, i, j)))
            .sub_ref(&gm(j, i, j).mul_ref(gm(j, i, j)))
            .sub_ref(&hinv[i].mul_ref(&dh[i]).mul_ref(gm(j, i, j)).scale(&half))
            .add_ref(&hinv[i].mul_ref(&dh[j]).mul_ref(gm(j, i, i)).scale(&half))
    };

    let fill = |bar: bool| -> TensorField {
        let rank4 = vec![Variance::Up, Variance::Down, Variance::Down, Variance::Down];
        TensorField::from_fn(n, nv, rank4, |idx| {
            let (l, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
            if l == i || j == k {
                return RatFun::zero(nv);
            }
            // Patterns up to antisymmetry in (j, k).
            let (sign, j, k) = if k == l || (j != l && j == i) {
                (-1, k, j)
            } else {
                (1, j, k)
            };
            let value = if j == l && k == i {
                if bar {
                    r_bar_jiji(i, l)
                } else {
                    r_jiji(i, l)
                }
            } else if j == l {
                // R^j_{ijk} with i, j, k distinct; unchanged by the rescaling.
                r_jijk(i, l, k)
            } else if k == i {
                // R^l_{iji} with l ∉ {i, j}.
                let r = r_kiji(l, i, j);
                if bar {
                    h[l].mul_ref(&hinv[i]).mul_ref(&r)
                } else {
                    r
                }
            } else {
                RatFun::zero(nv)
            };
            if sign < 0 {
                value.neg_ref()
            } else {
                value
            }
        })
    };
    let riemann = fill(false);
    let riemann_bar = fill(true);

    // Sectional components with the index i raised by ḡ (a factor h_i/g_i),
    // written out term by term.
    let mut sectional_bar = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let over = |f: &RatFun| f.mul_ref(&ginv[i]);
            let mut acc = over(&h[j])
                .mul_ref(&gm(j, i, i).derivative(j))
                .sub_ref(&over(&h[i]).mul_ref(&gm(j, i, j).derivative(i)));
            for a in 0..n {
                acc = acc.add_ref(&over(&h[a]).mul_ref(gm(j, j, a)).mul_ref(gm(a, i, i)));
            }
            let v = acc
                .sub_ref(&over(&h[j]).mul_ref(gm(j, i, i)).mul_ref(gm(i, i, j)))
                .sub_ref(&over(&h[i]).mul_ref(gm(j, i, j)).mul_ref(gm(j, i, j)))
                .sub_ref(&over(&dh[i]).mul_ref(gm(j, i, j)).scale(&half))
                .add_ref(&over(&dh[j]).mul_ref(gm(j, i, i)).scale(&half));
            sectional_bar.push((i, j, v));
        }
    }
    Ok(DiagonalOracle {
        gamma,
        gamma_bar,
        riemann,
        riemann_bar,
        sectional_bar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_is_trivial() {
        let one = RatFun::one(2);
        let o = diagonal_oracle(&[one.clone(), one.clone()], &[one.clone(), one]).unwrap();
        assert!(o.gamma.is_zero() && o.gamma_bar.is_zero());
        assert!(o.riemann.is_zero() && o.riemann_bar.is_zero());
    }

    #[test]
    fn foreign_dependence_rejected() {
        let one = RatFun::one(2);
        let err = diagonal_oracle(&[one.clone(), one.clone()], &[RatFun::var(1, 2), one]);
        assert!(matches!(err, Err(Error::ForeignVariable { index: 0, .. })));
    }
}
