//! Lift of pencil data to `ℝ_{>0}×ℝⁿ` with the flat connection
//! `Γ̂^i_{j0} = Γ̂^i_{0j} = δ^i_j/x⁰`, on which the pencil tensor is parallel.
//!
//! Variable `0` is `x⁰`; variables `1..=n` are `x¹..xⁿ`.

use super::{PencilData, Result};
use crate::ratfun::{Mat, RatFun};
use crate::tensor::{pushforward, riemann, Connection, TensorField, Variance};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conification {
    pub connection: Connection,
    /// `A^{αβ}` in the `x` coordinates.
    pub tensor: TensorField,
    /// `A^{αβ}` after `y⁰ = x⁰, yⁱ = x⁰xⁱ`.
    pub image: TensorField,
    pub connection_flat: bool,
    pub tensor_parallel: bool,
    /// The image equals `[[−K, −bᵀ], [−b, a]]`.
    pub image_matches: bool,
}

impl Conification {
    pub fn holds(&self) -> bool {
        self.connection_flat && self.tensor_parallel && self.image_matches
    }
}

pub fn conify(p: &PencilData) -> Result<Conification> {
    let n = p.dim();
    let m = n + 1;
    let nv = m;
    let x0 = RatFun::var(0, nv);
    let inv_x0 = x0.inv().expect("variable is nonzero");
    let connection = Connection::from_fn(m, nv, |i, j, k| {
        if i > 0 && ((j == 0 && k == i) || (k == 0 && j == i)) {
            inv_x0.clone()
        } else {
            RatFun::zero(nv)
        }
    })?;

    let upper = p.upper_form(nv, 1);
    let lam = p.lambda_upper(nv, 1);
    let inv_x0_sq = inv_x0.mul_ref(&inv_x0);
    let k = RatFun::from_rational(p.k().clone(), nv);
    let a = Mat::from_fn(m, m, nv, |al, be| match (al, be) {
        (0, 0) => k.neg_ref(),
        (0, i) | (i, 0) => lam[i - 1].mul_ref(&inv_x0).neg_ref(),
        (i, j) => upper.get(i - 1, j - 1).mul_ref(&inv_x0_sq),
    });
    let tensor = TensorField::from_mat(&a, [Variance::Up, Variance::Up]);

    let connection_flat = riemann(&connection).is_zero();
    let tensor_parallel = tensor.covariant_derivative(&connection)?.is_zero();

    let fwd: Vec<RatFun> = (0..m)
        .map(|i| match i {
            0 => x0.clone(),
            _ => x0.mul_ref(&RatFun::var(i, nv)),
        })
        .collect();
    let inv: Vec<RatFun> = (0..m)
        .map(|i| match i {
            0 => x0.clone(),
            _ => RatFun::var(i, nv).mul_ref(&inv_x0),
        })
        .collect();
    let image = pushforward(&tensor, &fwd, &inv)?;
    let c = |v: &num_rational::BigRational| RatFun::from_rational(v.clone(), nv);
    let expected = Mat::from_fn(m, m, nv, |al, be| match (al, be) {
        (0, 0) => k.neg_ref(),
        (0, i) | (i, 0) => c(&p.b()[i - 1]).neg_ref(),
        (i, j) => c(&p.a()[i - 1][j - 1]),
    });
    let image_matches = image.to_mat() == expected;
    Ok(Conification {
        connection,
        tensor,
        image,
        connection_flat,
        tensor_parallel,
        image_matches,
    })
}
