//! Tensor transformation under rational coordinate changes.

use super::{TensorField, Variance};
use crate::error::{Error, Result};
use crate::ratfun::{Mat, RatFun};

/// `J^a_i = ∂y^a/∂x^i` for `y = fwd(x)`.
pub fn jacobian(fwd: &[RatFun]) -> Mat {
    let n = fwd.len();
    let nv = fwd[0].nvars();
    Mat::from_fn(n, n, nv, |a, i| fwd[a].derivative(i))
}

/// Components of the transformed tensor, still written as functions of
/// the old coordinates `x`.
pub fn pushforward_components(t: &TensorField, fwd: &[RatFun]) -> Result<TensorField> {
    let n = t.dim();
    if fwd.len() != n {
        return Err(Error::ChartMismatch(format!(
            "map has {} components on a {n}-dimensional chart",
            fwd.len()
        )));
    }
    let j = jacobian(fwd);
    let needs_inverse = t.variance().contains(&Variance::Down);
    let jinv = if needs_inverse {
        Some(j.inverse().ok_or(Error::SingularOperator)?)
    } else {
        None
    };
    let mut cur = t.clone();
    for (slot, var) in t.variance().iter().enumerate() {
        let prev = cur.clone();
        cur = TensorField::from_fn(n, t.nvars(), t.variance().to_vec(), |idx| {
            let mut tmp = idx.to_vec();
            let mut acc = RatFun::zero(t.nvars());
            for s in 0..n {
                let w = match var {
                    Variance::Up => j.get(idx[slot], s),
                    Variance::Down => jinv.as_ref().unwrap().get(s, idx[slot]),
                };
                if w.is_zero() {
                    continue;
                }
                tmp[slot] = s;
                let e = prev.get(&tmp);
                if !e.is_zero() {
                    acc = acc.add_ref(&w.mul_ref(e));
                }
            }
            acc
        });
    }
    Ok(cur)
}

/// Pushes `t` along `y = fwd(x)`, expressing the result in `y` through
/// `x = inv(y)`. The composition `fwd ∘ inv = id` is verified first.
pub fn pushforward(t: &TensorField, fwd: &[RatFun], inv: &[RatFun]) -> Result<TensorField> {
    let n = t.dim();
    let nv = t.nvars();
    if inv.len() != n {
        return Err(Error::ChartMismatch("inverse map has wrong arity".into()));
    }
    let images: Vec<RatFun> = inv
        .iter()
        .cloned()
        .chain((n..nv).map(|v| RatFun::var(v, nv)))
        .collect();
    for (a, f) in fwd.iter().enumerate() {
        let composed = f.substitute(&images).ok_or(Error::InverseCheckFailed)?;
        if composed != RatFun::var(a, nv) {
            return Err(Error::InverseCheckFailed);
        }
    }
    let comps = pushforward_components(t, fwd)?;
    let data = comps
        .entries()
        .iter()
        .map(|e| e.substitute(&images))
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::InverseCheckFailed)?;
    TensorField::from_data(n, nv, t.variance().to_vec(), data)
}
