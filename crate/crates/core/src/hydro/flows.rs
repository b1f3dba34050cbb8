//! Flow operators `A_k` from the α-expansion of
//! `det(Id − αL)^{−1/2}(Id − αL)^{−1}`, conserved densities from
//! `√det(Id − αL)`, and the pointwise commutation test for two systems
//! `u_t = A(u)u_x`, `u_s = B(u)u_x`.
//!
//! Cross-differentiating gives
//! `u_{ts} = (D_{Bu_x}A)u_x + A(D_{u_x}B)u_x + AB u_{xx}` and the same with
//! `A`, `B` swapped. The flows commute for all profiles iff the `u_{xx}`
//! coefficients agree, `[A, B] = 0`, and the quadratic parts agree:
//! `(D_{Bξ}A)ξ + A(D_ξB)ξ = (D_{Aξ}B)ξ + B(D_ξA)ξ` for a free vector `ξ`,
//! with `(D_ηM)^i_j = η^s∂_sM^i_j`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::ratfun::series::{det_series, power_series};
use crate::ratfun::{char_coeffs, series_expand, Mat, RatFun};

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// `σ_k`, zero beyond the dimension.
fn sigma(s: &[RatFun], k: usize, nv: usize) -> RatFun {
    s.get(k - 1).cloned().unwrap_or_else(|| RatFun::zero(nv))
}

/// Coefficients of `L^k, L^{k−1}, …, Id` in the closed forms printed for
/// `A_1`, `A_2`, `A_3`.
pub fn printed_flow_coeffs(k: usize, sigmas: &[RatFun], nv: usize) -> Option<Vec<RatFun>> {
    let s = |i| sigma(sigmas, i, nv);
    let c1 = s(1).scale(&q(1, 2));
    let c2 = s(2).scale(&q(1, 2)).add_ref(&s(1).scale(&q(3, 8)));
    let c3 = s(3)
        .scale(&q(1, 2))
        .add_ref(&s(1).mul_ref(&s(2)).scale(&q(3, 4)))
        .add_ref(&s(1).pow(3).scale(&q(5, 16)));
    let one = RatFun::one(nv);
    match k {
        1 => Some(vec![one, c1]),
        2 => Some(vec![one, c1, c2]),
        3 => Some(vec![one, c1, c2, c3]),
        _ => None,
    }
}

/// Printed closed forms of `F_1`, `F_2`, `F_3`.
pub fn printed_density(k: usize, sigmas: &[RatFun], nv: usize) -> Option<RatFun> {
    let s = |i| sigma(sigmas, i, nv);
    let half = q(-1, 2);
    match k {
        1 => Some(s(1).scale(&half)),
        2 => Some(s(2).scale(&half).sub_ref(&s(1).pow(2).scale(&q(1, 8)))),
        3 => Some(
            s(3).scale(&half)
                .sub_ref(&s(1).mul_ref(&s(2)).scale(&q(1, 4)))
                .sub_ref(&s(1).pow(3).scale(&q(1, 16))),
        ),
        _ => None,
    }
}

/// One coefficient where the series and a printed form differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermDiff {
    /// The term is `coefficient · L^power`.
    pub power: usize,
    pub series: RatFun,
    pub printed: RatFun,
}

/// Series operator `A_k` against its printed closed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrintedComparison {
    pub k: usize,
    /// The two matrices coincide (possible despite coefficient
    /// differences when powers of `L` are dependent).
    pub matrix_equal: bool,
    pub diffs: Vec<TermDiff>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowOperators {
    /// `A_1..A_N`.
    pub operators: Vec<Mat>,
    /// Scalar coefficients `f_j` with `A_k = Σ_j f_j L^{k−j}`.
    pub coefficients: Vec<RatFun>,
    /// `A_1 = L + ½σ_1 Id` exactly.
    pub first_verbatim: bool,
    /// Comparisons with the printed `A_2`, `A_3` (as far as computed).
    pub printed: Vec<PrintedComparison>,
}

/// `A_1..A_N` with the closed-form cross-checks.
pub fn flow_operators(l: &Mat, order: usize) -> FlowOperators {
    assert!(order >= 1, "at least one flow");
    let n = l.rows();
    let nv = l.nvars();
    let series = series_expand(l, order);
    let sigmas = char_coeffs(l);
    let coefficients = power_series(&det_series(&sigmas, nv), &q(-1, 2), order, nv);
    let operators: Vec<Mat> = series.coeffs()[1..].to_vec();
    let mut powers = vec![Mat::identity(n, nv)];
    for k in 1..=order.min(3) {
        let next = powers[k - 1].mul_ref(l);
        powers.push(next);
    }
    let assemble = |c: &[RatFun]| {
        let k = c.len() - 1;
        c.iter()
            .enumerate()
            .fold(Mat::zeros(n, n, nv), |acc, (j, cj)| acc.add_ref(&powers[k - j].scale(cj)))
    };
    let first = printed_flow_coeffs(1, &sigmas, nv).expect("closed form");
    let first_verbatim = operators[0] == assemble(&first);
    let printed = (2..=order.min(3))
        .map(|k| {
            let pc = printed_flow_coeffs(k, &sigmas, nv).expect("closed form");
            let diffs = (0..=k)
                .filter(|&j| coefficients[j] != pc[j])
                .map(|j| TermDiff {
                    power: k - j,
                    series: coefficients[j].clone(),
                    printed: pc[j].clone(),
                })
                .collect();
            PrintedComparison {
                k,
                matrix_equal: operators[k - 1] == assemble(&pc),
                diffs,
            }
        })
        .collect();
    FlowOperators {
        operators,
        coefficients,
        first_verbatim,
        printed,
    }
}

/// `F_1..F_N` from `√det(Id − αL) = 1 + Σ F_k α^k`.
pub fn conservation_densities(l: &Mat, order: usize) -> Vec<RatFun> {
    let nv = l.nvars();
    let sigmas = char_coeffs(l);
    let mut f = power_series(&det_series(&sigmas, nv), &q(1, 2), order, nv);
    f.remove(0);
    f
}

/// `d/dα √det(Id − αL) = −½ det(Id − αL) · tr(L·A(α))`, compared
/// coefficientwise up to `α^{N−1}`.
pub fn density_flow_identity(l: &Mat, order: usize) -> bool {
    let nv = l.nvars();
    let f = conservation_densities(l, order);
    let a = series_expand(l, order);
    let p = det_series(&char_coeffs(l), nv);
    let traces: Vec<RatFun> = a.coeffs().iter().map(|m| l.mul_ref(m).trace()).collect();
    (0..order).all(|m| {
        let lhs = f[m].scale(&BigRational::from_integer(BigInt::from(m + 1)));
        let mut rhs = RatFun::zero(nv);
        for j in 0..=m.min(p.len() - 1) {
            rhs = rhs.add_ref(&p[j].mul_ref(&traces[m - j]));
        }
        lhs == rhs.scale(&q(-1, 2))
    })
}

/// The two parts of the commutation condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommuteReport {
    pub bracket_zero: bool,
    /// Quadratic residual; the free vector `ξ` occupies the variables
    /// after those of the operators.
    pub residual: Vec<RatFun>,
}

impl CommuteReport {
    pub fn holds(&self) -> bool {
        self.bracket_zero && self.residual.iter().all(RatFun::is_zero)
    }
}

/// `(D_ηM)ξ` for a vector `η` and matrix `M` over the coordinates.
fn directional(m: &Mat, eta: &[RatFun], xi: &[RatFun]) -> Vec<RatFun> {
    let n = m.rows();
    let nv = m.nvars();
    let mut dm = Mat::zeros(n, n, nv);
    for (s, es) in eta.iter().enumerate() {
        if !es.is_zero() {
            dm = dm.add_ref(&m.derivative(s).scale(es));
        }
    }
    dm.mul_vec(xi)
}

pub fn commute_report(a: &Mat, b: &Mat) -> CommuteReport {
    assert_eq!(a.nvars(), b.nvars(), "operators over different variable sets");
    let n = a.rows();
    let nv = a.nvars();
    let ext = nv + n;
    let (a, b) = (a.extend(ext), b.extend(ext));
    let xi: Vec<RatFun> = (0..n).map(|i| RatFun::var(nv + i, ext)).collect();
    let axi = a.mul_vec(&xi);
    let bxi = b.mul_vec(&xi);
    let t1 = directional(&a, &bxi, &xi);
    let t2 = a.mul_vec(&directional(&b, &xi, &xi));
    let t3 = directional(&b, &axi, &xi);
    let t4 = b.mul_vec(&directional(&a, &xi, &xi));
    let residual = (0..n)
        .map(|i| t1[i].add_ref(&t2[i]).sub_ref(&t3[i]).sub_ref(&t4[i]))
        .collect();
    CommuteReport {
        bracket_zero: a.commutator(&b).is_zero(),
        residual,
    }
}

/// Whether `u_t = A u_x` and `u_s = B u_x` commute for all profiles.
pub fn flows_commute(a: &Mat, b: &Mat) -> bool {
    commute_report(a, b).holds()
}
