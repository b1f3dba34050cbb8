//! Hamiltonian operators of hydrodynamic type, Casimirs, commuting flows
//! and Poisson compatibility of constant-curvature metrics.
//!
//! Densities are elements of the quadratic extension [`RadExt`] so that
//! `√det L` is handled exactly; rational densities are embedded with a
//! trivial radicand.

mod flows;
mod poisson;

pub use flows::{
    commute_report, conservation_densities, density_flow_identity, flow_operators, flows_commute,
    printed_density, printed_flow_coeffs, CommuteReport, FlowOperators, PrintedComparison,
    TermDiff,
};
pub use poisson::{
    additivity_witness, curvature_additivity, poisson_compatible, poisson_report, PoissonReport,
};

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geodesic::is_geodesically_compatible;
use crate::nijenhuis::lambda_data;
use crate::ratfun::{rad_is_zero, Mat, RadExt, RatFun};
use crate::tensor::{christoffel, curvature_class, Connection};

/// Seed for the witness points drawn by the radical zero test.
const WITNESS_SEED: u64 = 0x5eed;

/// `h` as an element of the extension with radicand `1`.
pub fn rational_density(h: &RatFun) -> RadExt {
    RadExt::rational(h.clone(), &Arc::new(RatFun::one(h.nvars())))
}

fn rad_zero(nv: usize, d: &Arc<RatFun>) -> RadExt {
    RadExt::rational(RatFun::zero(nv), d)
}

fn is_zero(e: &RadExt) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED);
    rad_is_zero(e, &mut rng).is_zero()
}

/// Re-embeds a density over the radicand `d` when it has no radical part.
fn over_radicand(h: &RadExt, d: &Arc<RatFun>) -> Result<RadExt> {
    if h.radicand() == d {
        Ok(h.clone())
    } else if h.b().is_zero() {
        Ok(RadExt::rational(h.a().clone(), d))
    } else {
        Err(Error::Precondition(
            "density involves a square root other than the one required here".into(),
        ))
    }
}

fn gradient(h: &RadExt, n: usize) -> Vec<RadExt> {
    (0..n).map(|s| h.derivative(s)).collect()
}

/// `∇_s∇_j h = ∂_s∂_j h − Γ^p_{sj}∂_p h`.
fn covariant_hessian(h: &RadExt, c: &Connection) -> Vec<RadExt> {
    let n = c.dim();
    let dh = gradient(h, n);
    let mut out = Vec::with_capacity(n * n);
    for s in 0..n {
        for j in 0..n {
            let mut acc = dh[s].derivative(j);
            for (p, dp) in dh.iter().enumerate() {
                let g = c.get(p, s, j);
                if !g.is_zero() {
                    acc = acc.sub_ref(&dp.scale(g));
                }
            }
            out.push(acc);
        }
    }
    out
}

/// `Σ_s m^{is} v_{sj}` for a rational matrix `m` and an extension-valued grid.
fn mat_times(m: &Mat, v: &[RadExt], d: &Arc<RatFun>) -> Vec<RadExt> {
    let n = m.rows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = rad_zero(m.nvars(), d);
            for s in 0..n {
                let c = m.get(i, s);
                if !c.is_zero() {
                    acc = acc.add_ref(&v[s * n + j].scale(c));
                }
            }
            out.push(acc);
        }
    }
    out
}

/// Where a density and its operator came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HamSource {
    pub metric: Mat,
    pub k: RatFun,
    pub density: RadExt,
}

/// `A^i_j = ∇^i∇_j h + K h δ^i_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HamOp {
    dim: usize,
    entries: Vec<RadExt>,
    pub source: HamSource,
}

impl HamOp {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &RadExt {
        &self.entries[i * self.dim + j]
    }

    /// First nonzero entry under the radical zero test.
    pub fn first_nonzero(&self) -> Option<(usize, usize)> {
        let k = self.entries.iter().position(|e| !is_zero(e))?;
        Some((k / self.dim, k % self.dim))
    }

    pub fn is_zero(&self) -> bool {
        self.first_nonzero().is_none()
    }

    /// The operator as a rational matrix when no entry has a radical part.
    pub fn rational(&self) -> Option<Mat> {
        if self.entries.iter().any(|e| !e.b().is_zero()) {
            return None;
        }
        let nv = self.source.metric.nvars();
        Some(Mat::from_fn(self.dim, self.dim, nv, |i, j| self.get(i, j).a().clone()))
    }

    /// `g·A`, symmetric for every density.
    pub fn is_self_adjoint(&self) -> bool {
        let g = &self.source.metric;
        let d = self.entries[0].radicand().clone();
        let lowered = mat_times(g, &self.entries, &d);
        let n = self.dim;
        (0..n).all(|i| (0..i).all(|j| lowered[i * n + j] == lowered[j * n + i]))
    }
}

/// Hamiltonian operator of the density `h` for a metric of constant
/// curvature `k`; the curvature is checked.
pub fn hamiltonian_operator(g: &Mat, k: &RatFun, h: &RadExt) -> Result<HamOp> {
    let n = g.rows();
    let nv = g.nvars();
    let verdict = curvature_class(g)?;
    if verdict.constant(nv).as_ref() != Some(k) {
        return Err(Error::CurvatureMismatch {
            expected: format!("constant curvature {k}"),
            found: verdict.to_string(),
        });
    }
    let ginv = g.inverse().ok_or(Error::DegenerateMetric)?;
    let c = christoffel(g)?;
    let d = h.radicand().clone();
    let mut entries = mat_times(&ginv, &covariant_hessian(h, &c), &d);
    let kh = h.scale(k);
    for i in 0..n {
        entries[i * n + i] = entries[i * n + i].add_ref(&kh);
    }
    Ok(HamOp {
        dim: n,
        entries,
        source: HamSource {
            metric: g.clone(),
            k: k.clone(),
            density: h.clone(),
        },
    })
}

/// Result of testing a density against the Casimir equation of `g0·L⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CasimirVerdict {
    pub is_casimir: bool,
    /// `c_h` with `ρ = c_h/√det L`; present for Casimirs.
    pub c_h: Option<RatFun>,
    /// First failing component `(i, j)` of `L^{si}∇_s∇_j h = ρδ^i_j`.
    pub witness: Option<(usize, usize)>,
}

/// `λ^i` and the constant `K` with `∇_jλ^i = −Kδ^i_j` for a compatible
/// pair over a flat metric.
fn flat_pencil_constant(g: &Mat, l: &Mat, c: &Connection) -> Result<(Vec<RatFun>, RatFun)> {
    let n = g.rows();
    let lam = lambda_data(l, g)?.upper;
    let nabla = |i: usize, j: usize| {
        let mut acc = lam[i].derivative(j);
        for (k, lk) in lam.iter().enumerate() {
            let gm = c.get(i, j, k);
            if !gm.is_zero() && !lk.is_zero() {
                acc = acc.add_ref(&gm.mul_ref(lk));
            }
        }
        acc
    };
    let k = nabla(0, 0).neg_ref();
    if !k.is_constant_in(n) {
        return Err(Error::Precondition("∇λ is not a constant multiple of the identity".into()));
    }
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j { k.neg_ref() } else { RatFun::zero(g.nvars()) };
            if nabla(i, j) != expected {
                return Err(Error::Precondition(
                    "∇λ is not a constant multiple of the identity".into(),
                ));
            }
        }
    }
    Ok((lam, k))
}

fn require_compatible(g: &Mat, l: &Mat) -> Result<()> {
    if !is_geodesically_compatible(g, l)? {
        return Err(Error::Precondition(
            "operator is not geodesically compatible with the metric".into(),
        ));
    }
    Ok(())
}

/// Decides whether `h` is a Casimir of `ḡ = g0·L⁻¹` for a constant flat
/// `g0` and extracts `c_h = ρ√det L`, `ρ = −λ^s∇_s h − Kh`. For Casimirs
/// the identity `∇^i∇_j h = c_h/√det L · (L⁻¹)^i_j` is verified as well.
pub fn casimir_classify(g0: &Mat, l: &Mat, h: &RadExt) -> Result<CasimirVerdict> {
    let n = g0.rows();
    let nv = g0.nvars();
    if g0.entries().iter().any(|e| !e.is_constant_in(n)) {
        return Err(Error::Precondition("background metric must have constant entries".into()));
    }
    require_compatible(g0, l)?;
    let det = l.det();
    if det.is_zero() {
        return Err(Error::SingularOperator);
    }
    let d = Arc::new(det);
    let h = over_radicand(h, &d)?;
    let c = Connection::zero(n, nv);
    let (lam, k) = flat_pencil_constant(g0, l, &c)?;
    let g0inv = g0.inverse().ok_or(Error::DegenerateMetric)?;
    let dh = gradient(&h, n);
    let mut rho = h.scale(&k).neg_ref();
    for (s, ds) in dh.iter().enumerate() {
        rho = rho.sub_ref(&ds.scale(&lam[s]));
    }
    let hess = covariant_hessian(&h, &c);
    // L^{si} = L^s_r g^{ri}; the equation reads (L^{si})ᵀ·∇∇h = ρ·Id.
    let upper_t = l.mul_ref(&g0inv).transpose();
    let lhs = mat_times(&upper_t, &hess, &d);
    let mut witness = None;
    'outer: for i in 0..n {
        for j in 0..n {
            let mut e = lhs[i * n + j].clone();
            if i == j {
                e = e.sub_ref(&rho);
            }
            if !is_zero(&e) {
                witness = Some((i, j));
                break 'outer;
            }
        }
    }
    if witness.is_some() {
        return Ok(CasimirVerdict {
            is_casimir: false,
            c_h: None,
            witness,
        });
    }
    let c_rad = rho.mul_ref(&RadExt::sqrt((*d).clone()));
    if !c_rad.b().is_zero() || !c_rad.a().is_constant_in(n) {
        return Err(Error::Precondition("ρ·√det L is not constant".into()));
    }
    let c_h = c_rad.a().clone();
    let linv = l.inverse().ok_or(Error::SingularOperator)?;
    let raised = mat_times(&g0inv, &hess, &d);
    let coeff = RadExt::new(RatFun::zero(nv), c_h.div_ref(&d).expect("nonzero determinant"), d.clone());
    for i in 0..n {
        for j in 0..n {
            let rhs = coeff.scale(linv.get(i, j));
            if !is_zero(&raised[i * n + j].sub_ref(&rhs)) {
                return Err(Error::Precondition(format!(
                    "Casimir Hessian identity fails at component ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(CasimirVerdict {
        is_casimir: true,
        c_h: Some(c_h),
        witness: None,
    })
}

/// First failing component of
/// `∇_j(L^{si}∇_s h) − λ^i∇_j h + K h δ^i_j = 0` for `h = √det L`.
fn sqrtdet_identity(g: &Mat, c: &Connection, l: &Mat) -> Result<Option<(usize, usize)>> {
    let n = g.rows();
    let det = l.det();
    if det.is_zero() {
        return Err(Error::SingularOperator);
    }
    let (lam, k) = flat_pencil_constant(g, l, c)?;
    let h = RadExt::sqrt(det);
    let d = h.radicand().clone();
    let dh = gradient(&h, n);
    let upper = l.mul_ref(&g.inverse().ok_or(Error::DegenerateMetric)?);
    // V^i = L^{si}∂_s h.
    let v: Vec<RadExt> = (0..n)
        .map(|i| {
            (0..n).fold(rad_zero(g.nvars(), &d), |acc, s| {
                let u = upper.get(s, i);
                if u.is_zero() {
                    acc
                } else {
                    acc.add_ref(&dh[s].scale(u))
                }
            })
        })
        .collect();
    let kh = h.scale(&k);
    for i in 0..n {
        for j in 0..n {
            let mut e = v[i].derivative(j);
            for (m, vm) in v.iter().enumerate() {
                let gm = c.get(i, j, m);
                if !gm.is_zero() {
                    e = e.add_ref(&vm.scale(gm));
                }
            }
            e = e.sub_ref(&dh[j].scale(&lam[i]));
            if i == j {
                e = e.add_ref(&kh);
            }
            if !is_zero(&e) {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// Outcome of the `√det` Casimir checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtDetCheck {
    /// `h = √det L` for `gL⁻¹`.
    pub det: bool,
    /// `h_α = √det(Id − αL)` for `g(Id − αL)⁻¹`, `α` symbolic.
    pub family: bool,
    pub witness: Option<(usize, usize)>,
}

impl SqrtDetCheck {
    pub fn holds(&self) -> bool {
        self.det && self.family
    }
}

/// Verifies that `√det L` is a Casimir of `gL⁻¹` and that `√det(Id − αL)`
/// is a Casimir of `g(Id − αL)⁻¹` with `α` an extra parameter, for a flat
/// `g` compatible with `L`.
pub fn sqrtdet_casimir_check(g: &Mat, l: &Mat) -> Result<SqrtDetCheck> {
    let n = g.rows();
    let nv = g.nvars();
    if !curvature_class(g)?.is_flat() {
        return Err(Error::Precondition("background metric is not flat".into()));
    }
    require_compatible(g, l)?;
    let c = christoffel(g)?;
    let w_det = sqrtdet_identity(g, &c, l)?;
    let alpha = RatFun::var(nv, nv + 1);
    let ge = g.extend(nv + 1);
    let la = Mat::identity(n, nv + 1).sub_ref(&l.extend(nv + 1).scale(&alpha));
    let ce = christoffel(&ge)?;
    let w_family = sqrtdet_identity(&ge, &ce, &la)?;
    Ok(SqrtDetCheck {
        det: w_det.is_none(),
        family: w_family.is_none(),
        witness: w_det.or(w_family),
    })
}
