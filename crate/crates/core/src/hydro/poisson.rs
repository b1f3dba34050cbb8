//! Poisson compatibility of two constant-curvature metrics and curvature
//! additivity along the pencil `g(α Id + βL)⁻¹`, with `α`, `β` symbolic.

use crate::error::{Error, Result};
use crate::nijenhuis::torsion;
use crate::ratfun::{Mat, RatFun};
use crate::tensor::{
    christoffel, curvature_class, raise_second, riemann, CurvatureVerdict, TensorField,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonReport {
    pub k1: RatFun,
    pub k2: RatFun,
    /// First nonzero torsion component of `L = g2⁻¹g1`.
    pub torsion_witness: Option<[usize; 3]>,
    /// Curvature of `g1(α Id + βL)⁻¹`; absent when condition (A) fails.
    pub pencil_verdict: Option<CurvatureVerdict>,
    /// The pencil has constant curvature `αK1 + βK2`.
    pub condition_b: bool,
}

impl PoissonReport {
    pub fn condition_a(&self) -> bool {
        self.torsion_witness.is_none()
    }

    pub fn holds(&self) -> bool {
        self.condition_a() && self.condition_b
    }
}

fn constant_curvature(g: &Mat, which: &str) -> Result<RatFun> {
    curvature_class(g)?
        .constant(g.nvars())
        .ok_or_else(|| Error::Precondition(format!("{which} metric is not of constant curvature")))
}

/// `g(α Id + βL)⁻¹` over two extra parameters `α`, `β`.
fn pencil_metric(g: &Mat, l: &Mat) -> Result<(Mat, RatFun, RatFun)> {
    let n = g.rows();
    let nv = g.nvars();
    let ext = nv + 2;
    let alpha = RatFun::var(nv, ext);
    let beta = RatFun::var(nv + 1, ext);
    let m = Mat::identity(n, ext)
        .scale(&alpha)
        .add_ref(&l.extend(ext).scale(&beta));
    let inv = m.inverse().ok_or(Error::SingularOperator)?;
    Ok((g.extend(ext).mul_ref(&inv), alpha, beta))
}

pub fn poisson_report(g1: &Mat, g2: &Mat) -> Result<PoissonReport> {
    let k1 = constant_curvature(g1, "first")?;
    let k2 = constant_curvature(g2, "second")?;
    let l = g2.inverse().ok_or(Error::DegenerateMetric)?.mul_ref(g1);
    let torsion_witness = torsion(&l)
        .first_nonzero()
        .map(|(idx, _)| [idx[0], idx[1], idx[2]]);
    if torsion_witness.is_some() {
        return Ok(PoissonReport {
            k1,
            k2,
            torsion_witness,
            pencil_verdict: None,
            condition_b: false,
        });
    }
    let (gh, alpha, beta) = pencil_metric(g1, &l)?;
    let ext = gh.nvars();
    let expected = alpha.mul_ref(&k1.extend(ext)).add_ref(&beta.mul_ref(&k2.extend(ext)));
    let verdict = curvature_class(&gh)?;
    let condition_b = verdict == CurvatureVerdict::from_constant(expected);
    Ok(PoissonReport {
        k1,
        k2,
        torsion_witness,
        pencil_verdict: Some(verdict),
        condition_b,
    })
}

/// Conditions (A) and (B) for two constant-curvature metrics.
pub fn poisson_compatible(g1: &Mat, g2: &Mat) -> Result<bool> {
    Ok(poisson_report(g1, g2)?.holds())
}

fn raised_curvature(g: &Mat) -> Result<TensorField> {
    let ginv = g.inverse().ok_or(Error::DegenerateMetric)?;
    Ok(raise_second(&riemann(&christoffel(g)?), &ginv))
}

/// First component where `R̂^{ij}_{kℓ} = αR^{ij}_{kℓ} + βR̄^{ij}_{kℓ}` fails,
/// each tensor raised by its own metric.
pub fn additivity_witness(g: &Mat, gbar: &Mat) -> Result<Option<[usize; 4]>> {
    let l = gbar.inverse().ok_or(Error::DegenerateMetric)?.mul_ref(g);
    if let Some((idx, _)) = torsion(&l).first_nonzero() {
        return Err(Error::Precondition(format!(
            "quotient operator is not Nijenhuis (component N^{}_{}{})",
            idx[0] + 1,
            idx[1] + 1,
            idx[2] + 1
        )));
    }
    let (gh, alpha, beta) = pencil_metric(g, &l)?;
    let ext = gh.nvars();
    let r = raised_curvature(g)?.extend(ext);
    let rbar = raised_curvature(gbar)?.extend(ext);
    let rhat = raised_curvature(&gh)?;
    let combo = r.scale(&alpha).add_ref(&rbar.scale(&beta));
    Ok(rhat.first_difference(&combo).map(|d| [d[0], d[1], d[2], d[3]]))
}

pub fn curvature_additivity(g: &Mat, gbar: &Mat) -> Result<bool> {
    Ok(additivity_witness(g, gbar)?.is_none())
}
