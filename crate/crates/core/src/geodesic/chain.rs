//! Flatness of the chain `g, gL⁻¹, gL⁻², …` computed directly and through
//! the criterion: all of `g, …, gL^{−k}` (`k ≥ 2`) are flat iff `λ_i` is
//! parallel and `(gL^{−m})^{ij}λ_iλ_j = 0` for `m = 0..k−2`.

use super::{require_compatible, Error, Result};
use crate::nijenhuis::lambda_data_with_inverse;
use crate::ratfun::{Mat, RatFun};
use crate::tensor::{christoffel_unchecked, curvature_class, hessian, CurvatureVerdict};

/// `g·L^{−k}`.
pub fn metric_power(g: &Mat, l: &Mat, k: u32) -> Result<Mat> {
    let linv = l.inverse().ok_or(Error::SingularOperator)?;
    Ok(g.mul_ref(&linv.pow(k)))
}

/// `g·f(L)⁻¹` for a polynomial `f` with coefficients listed low to high.
pub fn metric_through(g: &Mat, l: &Mat, coeffs: &[RatFun]) -> Result<Mat> {
    let inv = l.poly_eval(coeffs).inverse().ok_or(Error::SingularOperator)?;
    Ok(g.mul_ref(&inv))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainEntry {
    pub k: usize,
    pub verdict: CurvatureVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainReport {
    pub entries: Vec<ChainEntry>,
    /// `∇_iλ_j = 0` for the background metric.
    pub lambda_parallel: bool,
    /// `(gL^{−m})^{ij}λ_iλ_j` for `m = 0..kmax−2`.
    pub null_values: Vec<RatFun>,
    /// Criterion prediction that all of `g, …, gL^{−k}` are flat.
    pub criterion_flat: Vec<bool>,
}

impl ChainReport {
    /// Largest `k` such that all metrics up to `gL^{−k}` are flat.
    pub fn flat_length(&self) -> usize {
        self.entries
            .iter()
            .take_while(|e| e.verdict.is_flat())
            .count()
            .saturating_sub(1)
    }

    pub fn verdicts(&self) -> Vec<&CurvatureVerdict> {
        self.entries.iter().map(|e| &e.verdict).collect()
    }
}

/// Classifies `g·L^{−k}` for `k = 0..=kmax` and checks the result against
/// the parallel/null criterion. Any disagreement is an error.
pub fn flatness_chain(g: &Mat, l: &Mat, kmax: usize) -> Result<ChainReport> {
    require_compatible(g, l)?;
    let n = g.rows();
    let nv = g.nvars();
    let ginv = g.inverse().ok_or(Error::DegenerateMetric)?;
    let linv = l.inverse().ok_or(Error::SingularOperator)?;

    let mut entries = Vec::with_capacity(kmax + 1);
    let mut metric = g.clone();
    for k in 0..=kmax {
        if k > 0 {
            metric = metric.mul_ref(&linv);
        }
        entries.push(ChainEntry {
            k,
            verdict: curvature_class(&metric)?,
        });
    }

    let lam = lambda_data_with_inverse(l, &ginv);
    let c = christoffel_unchecked(g)?;
    let lambda_parallel = hessian(&lam.lambda, &c).is_zero();
    let mut null_values = Vec::new();
    let mut contra = ginv.clone();
    for _ in 0..kmax.saturating_sub(1) {
        let w = contra.mul_vec(&lam.lower);
        let mut acc = RatFun::zero(nv);
        for i in 0..n {
            acc = acc.add_ref(&lam.lower[i].mul_ref(&w[i]));
        }
        null_values.push(acc);
        contra = l.mul_ref(&contra);
    }
    let criterion_flat: Vec<bool> = (0..=kmax)
        .map(|k| match k {
            0 => true,
            _ => lambda_parallel && null_values[..k.saturating_sub(1)].iter().all(RatFun::is_zero),
        })
        .collect();

    let mut all_flat = true;
    for e in &entries {
        all_flat &= e.verdict.is_flat();
        if all_flat != criterion_flat[e.k] {
            return Err(Error::ChainDisagreement {
                k: e.k,
                direct: e.verdict.to_string(),
                criterion: if criterion_flat[e.k] { "flat" } else { "not flat" }.into(),
            });
        }
    }
    Ok(ChainReport {
        entries,
        lambda_parallel,
        null_values,
        criterion_flat,
    })
}
