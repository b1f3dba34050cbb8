//! Operators whose Frölicher–Nijenhuis bracket with every constant
//! `g0`-symmetric operator vanishes, and the explicit form they take:
//! `L·g0⁻¹ = A + x bᵀ + c xᵀ + K x xᵀ` (plus a skew block in dimension 2).

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Error, Result};
use crate::nijenhuis::fn_bracket;
use crate::ratfun::{Mat, RatFun};

/// Coefficients of the fitted form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormFit {
    pub a: Mat,
    pub b: Vec<RatFun>,
    pub c: Vec<RatFun>,
    pub k: RatFun,
    /// Dimension 2 only: `f` in the additional block `[[0, f], [−f, 0]]`.
    pub skew: Option<RatFun>,
}

impl FormFit {
    /// `b = c`, `A` symmetric and no skew block: a `g0`-symmetric member.
    pub fn is_symmetric(&self) -> bool {
        self.b == self.c
            && self.a.is_symmetric()
            && self.skew.as_ref().is_none_or(RatFun::is_zero)
    }
}

/// First nonvanishing bracket `[[L, A]]` found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonCommutation {
    /// Basis element `g0⁻¹(E_{ij} + E_{ji})` (or `g0⁻¹E_{ii}`).
    pub basis: (usize, usize),
    pub component: [usize; 3],
    pub value: RatFun,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    InPencil(FormFit),
    NotInPencil(NonCommutation),
}

impl Membership {
    pub fn is_in_pencil(&self) -> bool {
        matches!(self, Membership::InPencil(_))
    }
}

fn at_origin(f: &RatFun, n: usize) -> Option<RatFun> {
    let nv = f.nvars();
    let images: Vec<RatFun> = (0..nv)
        .map(|v| {
            if v < n {
                RatFun::zero(nv)
            } else {
                RatFun::var(v, nv)
            }
        })
        .collect();
    f.substitute(&images)
}

fn assemble(n: usize, nv: usize, a: &Mat, b: &[RatFun], c: &[RatFun], k: &RatFun) -> Mat {
    let x = |i: usize| RatFun::var(i, nv);
    Mat::from_fn(n, n, nv, |i, j| {
        a.get(i, j)
            .add_ref(&x(i).mul_ref(&b[j]))
            .add_ref(&c[i].mul_ref(&x(j)))
            .add_ref(&k.mul_ref(&x(i).mul_ref(&x(j))))
    })
}

/// Reads the coefficients off derivatives at the origin and verifies the
/// reconstruction exactly. With `tied`, `b = c` is imposed.
fn fit(p: &Mat, tied: bool) -> Option<(Mat, Vec<RatFun>, Vec<RatFun>, RatFun)> {
    let n = p.rows();
    let nv = p.nvars();
    let a = Mat::from_rows(
        (0..n)
            .map(|i| (0..n).map(|j| at_origin(p.get(i, j), n)).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?,
        nv,
    );
    let k = at_origin(&p.get(0, 1).derivative(0).derivative(1), n)?;
    let b = (0..n)
        .map(|j| at_origin(&p.get((j + 1) % n, j).derivative((j + 1) % n), n))
        .collect::<Option<Vec<_>>>()?;
    let c = if tied {
        b.clone()
    } else {
        (0..n)
            .map(|i| at_origin(&p.get(i, (i + 1) % n).derivative((i + 1) % n), n))
            .collect::<Option<Vec<_>>>()?
    };
    if assemble(n, nv, &a, &b, &c, &k) != *p {
        return None;
    }
    Some((a, b, c, k))
}

/// Fits `L` to the form, routing dimension 2 through the extended form
/// with a skew block.
pub fn fit_form(l: &Mat, g0: &Mat) -> Result<Option<FormFit>> {
    let n = l.rows();
    let p = l.mul_ref(&g0.inverse().ok_or(Error::DegenerateMetric)?);
    if n > 2 {
        return Ok(fit(&p, false).map(|(a, b, c, k)| FormFit {
            a,
            b,
            c,
            k,
            skew: None,
        }));
    }
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let sym = p.add_ref(&p.transpose()).scale(&RatFun::from_rational(half, p.nvars()));
    let skew = p.get(0, 1).sub_ref(sym.get(0, 1));
    Ok(fit(&sym, true).map(|(a, b, c, k)| FormFit {
        a,
        b,
        c,
        k,
        skew: Some(skew),
    }))
}

/// Constant `g0`-symmetric operators `g0⁻¹E_{ii}`, `g0⁻¹(E_{ij}+E_{ji})`.
pub fn constant_symmetric_basis(g0: &Mat) -> Result<Vec<((usize, usize), Mat)>> {
    let n = g0.rows();
    let nv = g0.nvars();
    let ginv = g0.inverse().ok_or(Error::DegenerateMetric)?;
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            let s = Mat::from_fn(n, n, nv, |a, b| {
                if (a == i && b == j) || (a == j && b == i) {
                    RatFun::one(nv)
                } else {
                    RatFun::zero(nv)
                }
            });
            out.push(((i, j), ginv.mul_ref(&s)));
        }
    }
    Ok(out)
}

/// Decides whether `[[L, A]] = 0` for every constant `g0`-symmetric `A`,
/// and independently fits `L` to the explicit form; the two answers must
/// agree.
pub fn fn_constant_commutation(l: &Mat, g0: &Mat) -> Result<Membership> {
    let mut witness = None;
    for (basis, a) in constant_symmetric_basis(g0)? {
        if let Some((idx, v)) = fn_bracket(l, &a).first_nonzero() {
            witness = Some(NonCommutation {
                basis,
                component: [idx[0], idx[1], idx[2]],
                value: v.clone(),
            });
            break;
        }
    }
    let fitted = fit_form(l, g0)?;
    match (witness, fitted) {
        (None, Some(f)) => Ok(Membership::InPencil(f)),
        (Some(w), None) => Ok(Membership::NotInPencil(w)),
        (w, f) => Err(Error::Precondition(format!(
            "bracket test ({}) and form fit ({}) disagree",
            if w.is_none() { "commutes" } else { "does not commute" },
            if f.is_some() { "fits" } else { "does not fit" }
        ))),
    }
}
