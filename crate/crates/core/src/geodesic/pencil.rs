//! The pencil of operators compatible with a flat metric in flat
//! coordinates: `L^{ij} = a^{ij} + b^i x^j + b^j x^i − K x^i x^j`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

use super::{is_geodesically_compatible, Error, Result};
use crate::nijenhuis::lambda_data;
use crate::ratfun::{Mat, RatFun};

/// Constant data of a pencil member over a constant metric `g0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilData {
    g0: Vec<Vec<BigRational>>,
    a: Vec<Vec<BigRational>>,
    b: Vec<BigRational>,
    k: BigRational,
}

fn symmetric(m: &[Vec<BigRational>]) -> bool {
    (0..m.len()).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn int_rows(rows: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
}

impl PencilData {
    pub fn new(
        g0: Vec<Vec<BigRational>>,
        a: Vec<Vec<BigRational>>,
        b: Vec<BigRational>,
        k: BigRational,
    ) -> Result<Self> {
        let n = g0.len();
        if n < 2
            || g0.iter().any(|r| r.len() != n)
            || a.len() != n
            || a.iter().any(|r| r.len() != n)
            || b.len() != n
        {
            return Err(Error::ChartMismatch(format!(
                "pencil data must be {n}×{n} with a length-{n} vector"
            )));
        }
        if !symmetric(&g0) {
            return Err(Error::Precondition("g0 is not symmetric".into()));
        }
        if !symmetric(&a) {
            return Err(Error::Precondition("a is not symmetric".into()));
        }
        let data = PencilData { g0, a, b, k };
        if data.g0_mat(n).det().is_zero() {
            return Err(Error::DegenerateMetric);
        }
        Ok(data)
    }

    pub fn from_ints(g0: &[Vec<i64>], a: &[Vec<i64>], b: &[i64], k: i64) -> Result<Self> {
        Self::new(
            int_rows(g0),
            int_rows(a),
            b.iter().map(|&v| int(v)).collect(),
            int(k),
        )
    }

    /// Euclidean background with integer data drawn from `[-3, 3]`.
    pub fn random<R: Rng>(rng: &mut R, n: usize) -> Self {
        let mut a = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-3..=3);
                a[i][j] = v;
                a[j][i] = v;
            }
        }
        let b: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        let k = rng.gen_range(-3..=3);
        let id: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        Self::from_ints(&id, &a, &b, k).expect("identity background")
    }

    pub fn dim(&self) -> usize {
        self.g0.len()
    }

    pub fn g0(&self) -> &[Vec<BigRational>] {
        &self.g0
    }

    pub fn a(&self) -> &[Vec<BigRational>] {
        &self.a
    }

    pub fn b(&self) -> &[BigRational] {
        &self.b
    }

    pub fn k(&self) -> &BigRational {
        &self.k
    }

    /// Componentwise sum over the same background.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.g0 != other.g0 {
            return Err(Error::Precondition("pencil data over different backgrounds".into()));
        }
        let n = self.dim();
        let a = (0..n)
            .map(|i| (0..n).map(|j| &self.a[i][j] + &other.a[i][j]).collect())
            .collect();
        let b = (0..n).map(|i| &self.b[i] + &other.b[i]).collect();
        Self::new(self.g0.clone(), a, b, &self.k + &other.k)
    }

    pub fn g0_mat(&self, nvars: usize) -> Mat {
        let n = self.dim();
        Mat::from_fn(n, n, nvars, |i, j| {
            RatFun::from_rational(self.g0[i][j].clone(), nvars)
        })
    }

    /// `L^{ij}` with coordinate `x^i` taken as variable `offset + i`.
    pub fn upper_form(&self, nvars: usize, offset: usize) -> Mat {
        let n = self.dim();
        let x = |i: usize| RatFun::var(offset + i, nvars);
        let c = |v: &BigRational| RatFun::from_rational(v.clone(), nvars);
        Mat::from_fn(n, n, nvars, |i, j| {
            let mut e = c(&self.a[i][j]);
            if !self.b[i].is_zero() {
                e = e.add_ref(&x(j).scale(&self.b[i]));
            }
            if !self.b[j].is_zero() {
                e = e.add_ref(&x(i).scale(&self.b[j]));
            }
            if !self.k.is_zero() {
                e = e.sub_ref(&x(i).mul_ref(&x(j)).scale(&self.k));
            }
            e
        })
    }

    /// `λ^i = b^i − K x^i`.
    pub fn lambda_upper(&self, nvars: usize, offset: usize) -> Vec<RatFun> {
        (0..self.dim())
            .map(|i| {
                RatFun::from_rational(self.b[i].clone(), nvars)
                    .sub_ref(&RatFun::var(offset + i, nvars).scale(&self.k))
            })
            .collect()
    }
}

/// A pencil member in both index placements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilOperator {
    /// `L^{ij}`.
    pub upper: Mat,
    /// `L^i_j = L^{is}(g0)_{sj}`.
    pub operator: Mat,
}

/// Builds the pencil member for `p`; compatibility with `g0` and
/// `λ^i = b^i − Kx^i` are asserted.
pub fn build_pencil_operator(p: &PencilData, nvars: usize) -> PencilOperator {
    assert!(nvars >= p.dim(), "chart smaller than pencil data");
    let upper = p.upper_form(nvars, 0);
    let g0 = p.g0_mat(nvars);
    let operator = upper.mul_ref(&g0);
    assert!(
        is_geodesically_compatible(&g0, &operator).expect("g0 is nondegenerate"),
        "pencil member failed compatibility"
    );
    let lam = lambda_data(&operator, &g0).expect("g0 is nondegenerate");
    assert_eq!(
        lam.upper,
        p.lambda_upper(nvars, 0),
        "pencil member has unexpected gradient of half-trace"
    );
    PencilOperator { upper, operator }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_background_gives_identity() {
        let p = PencilData::from_ints(
            &[vec![2, 1], vec![1, 1]],
            &[vec![1, -1], vec![-1, 2]],
            &[0, 0],
            0,
        )
        .unwrap();
        assert_eq!(build_pencil_operator(&p, 2).operator, Mat::identity(2, 2));
    }

    #[test]
    fn asymmetric_data_rejected() {
        let id = [vec![1, 0], vec![0, 1]];
        assert!(PencilData::from_ints(&id, &[vec![0, 1], vec![0, 0]], &[0, 0], 0).is_err());
        assert!(matches!(
            PencilData::from_ints(&[vec![1, 1], vec![1, 1]], &id, &[0, 0], 0),
            Err(Error::DegenerateMetric)
        ));
    }
}
