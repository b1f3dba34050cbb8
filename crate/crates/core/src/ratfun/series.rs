//! Characteristic coefficients and truncated power series in a parameter.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::matrix::Mat;
use super::rat::RatFun;

/// `(σ_1, …, σ_n)` with `det(t·Id − L) = tⁿ − σ_1tⁿ⁻¹ − … − σ_n`,
/// equivalently `det(Id − αL) = 1 − σ_1α − … − σ_nαⁿ`.
///
/// Faddeev–LeVerrier: `M_k = L·M_{k−1} + c_{n−k+1}·Id`,
/// `c_{n−k} = −tr(L·M_k)/k`.
pub fn char_coeffs(l: &Mat) -> Vec<RatFun> {
    assert!(l.is_square(), "characteristic polynomial of non-square matrix");
    let n = l.rows();
    let nv = l.nvars();
    let id = Mat::identity(n, nv);
    let mut sigmas = Vec::with_capacity(n);
    let mut m = Mat::zeros(n, n, nv);
    let mut c_prev = RatFun::one(nv);
    for k in 1..=n {
        m = l.mul_ref(&m).add_ref(&id.scale(&c_prev));
        let lm = l.mul_ref(&m);
        let c = lm.trace().scale(&BigRational::new((-1).into(), BigInt::from(k)));
        sigmas.push(c.neg_ref());
        c_prev = c;
    }
    sigmas
}

/// Coefficients `q_0..q_N` of `p(α)^r` for a series `p` with `p_0 = 1`,
/// by the J.C.P. Miller recurrence
/// `q_k = (1/k) Σ_{j=1..k} ((r+1)j − k) p_j q_{k−j}`.
pub fn power_series(p: &[RatFun], r: &BigRational, order: usize, nvars: usize) -> Vec<RatFun> {
    assert!(p.first().is_none_or(RatFun::is_one), "series must start with 1");
    let one = BigRational::from_integer(1.into());
    let mut q = vec![RatFun::one(nvars)];
    for k in 1..=order {
        let mut acc = RatFun::zero(nvars);
        for j in 1..=k.min(p.len().saturating_sub(1)) {
            if p[j].is_zero() || q[k - j].is_zero() {
                continue;
            }
            let w = (r + &one) * BigRational::from_integer(j.into())
                - BigRational::from_integer(k.into());
            acc = acc.add_ref(&p[j].mul_ref(&q[k - j]).scale(&w));
        }
        q.push(acc.scale(&BigRational::new(1.into(), BigInt::from(k))));
    }
    q
}

/// Coefficients of `det(Id − αL) = 1 − Σ σ_k α^k`.
pub fn det_series(sigmas: &[RatFun], nvars: usize) -> Vec<RatFun> {
    let mut p = vec![RatFun::one(nvars)];
    p.extend(sigmas.iter().map(RatFun::neg_ref));
    p
}

/// Truncated matrix series `C_0 + αC_1 + … + α^N C_N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixSeries {
    coeffs: Vec<Mat>,
}

impl MatrixSeries {
    pub fn new(coeffs: Vec<Mat>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        let (r, c) = (coeffs[0].rows(), coeffs[0].cols());
        assert!(coeffs.iter().all(|m| m.rows() == r && m.cols() == c));
        MatrixSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Mat {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Mat] {
        &self.coeffs
    }

    /// Product truncated to the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|k| {
                let mut acc = self.coeffs[0].mul_ref(&other.coeffs[k]);
                for j in 1..=k {
                    acc = acc.add_ref(&self.coeffs[j].mul_ref(&other.coeffs[k - j]));
                }
                acc
            })
            .collect();
        MatrixSeries { coeffs }
    }

    /// Scalar series times this series.
    pub fn scale_series(&self, s: &[RatFun]) -> Self {
        let order = self.order().min(s.len() - 1);
        let coeffs = (0..=order)
            .map(|k| {
                let mut acc = self.coeffs[k].scale(&s[0]);
                for j in 1..=k {
                    acc = acc.add_ref(&self.coeffs[k - j].scale(&s[j]));
                }
                acc
            })
            .collect();
        MatrixSeries { coeffs }
    }
}

/// α-expansion of `det(Id − αL)^(−1/2) · (Id − αL)^(−1)` to order `N`:
/// `C_k = Σ_j f_j L^{k−j}` with `f` the binomial series of the determinant.
pub fn series_expand(l: &Mat, order: usize) -> MatrixSeries {
    let n = l.rows();
    let nv = l.nvars();
    let sigmas = char_coeffs(l);
    let f = power_series(
        &det_series(&sigmas, nv),
        &BigRational::new((-1).into(), 2.into()),
        order,
        nv,
    );
    let mut powers = vec![Mat::identity(n, nv)];
    for k in 1..=order {
        let next = powers[k - 1].mul_ref(l);
        powers.push(next);
    }
    let coeffs = (0..=order)
        .map(|k| {
            let mut acc = powers[k].clone();
            for j in 1..=k {
                if !f[j].is_zero() {
                    acc = acc.add_ref(&powers[k - j].scale(&f[j]));
                }
            }
            acc
        })
        .collect();
    MatrixSeries { coeffs }
}
