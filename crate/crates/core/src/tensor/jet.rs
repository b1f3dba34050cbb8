//! Exact second-order jets of rational functions at rational points, used
//! to certify non-constant curvature without symbolic differentiation.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::ratfun::{Mat, MultiPoly, RatFun};

/// Value, gradient and Hessian in the first `n` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet2 {
    pub v: BigRational,
    pub d: Vec<BigRational>,
    pub h: Vec<BigRational>,
}

impl Jet2 {
    fn constant(v: BigRational, n: usize) -> Self {
        Jet2 {
            v,
            d: vec![BigRational::zero(); n],
            h: vec![BigRational::zero(); n * n],
        }
    }

    fn variable(v: BigRational, i: usize, n: usize) -> Self {
        let mut j = Self::constant(v, n);
        j.d[i] = BigRational::one();
        j
    }

    fn n(&self) -> usize {
        self.d.len()
    }

    fn add(&self, o: &Self) -> Self {
        Jet2 {
            v: &self.v + &o.v,
            d: self.d.iter().zip(&o.d).map(|(a, b)| a + b).collect(),
            h: self.h.iter().zip(&o.h).map(|(a, b)| a + b).collect(),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let n = self.n();
        let d = (0..n).map(|a| &self.v * &o.d[a] + &o.v * &self.d[a]).collect();
        let mut h = vec![BigRational::zero(); n * n];
        for a in 0..n {
            for b in 0..n {
                h[a * n + b] = &self.v * &o.h[a * n + b]
                    + &o.v * &self.h[a * n + b]
                    + &self.d[a] * &o.d[b]
                    + &self.d[b] * &o.d[a];
            }
        }
        Jet2 { v: &self.v * &o.v, d, h }
    }

    fn inv(&self) -> Option<Self> {
        if self.v.is_zero() {
            return None;
        }
        let n = self.n();
        let r = self.v.recip();
        let r2 = &r * &r;
        let r3 = &r2 * &r;
        let two = BigRational::from_integer(2.into());
        let d = self.d.iter().map(|x| -(x * &r2)).collect();
        let mut h = vec![BigRational::zero(); n * n];
        for a in 0..n {
            for b in 0..n {
                h[a * n + b] =
                    -(&self.h[a * n + b] * &r2) + &two * &self.d[a] * &self.d[b] * &r3;
            }
        }
        Some(Jet2 { v: r, d, h })
    }
}

fn poly_jet(p: &MultiPoly, point: &[BigRational], n: usize) -> Jet2 {
    let nv = point.len();
    let mut powers: Vec<Vec<Jet2>> = (0..nv)
        .map(|v| {
            let base = if v < n {
                Jet2::variable(point[v].clone(), v, n)
            } else {
                Jet2::constant(point[v].clone(), n)
            };
            vec![Jet2::constant(BigRational::one(), n), base]
        })
        .collect();
    let mut acc = Jet2::constant(BigRational::zero(), n);
    for (m, c) in p.terms() {
        let mut t = Jet2::constant(c.clone(), n);
        for (v, &e) in m.exps().iter().enumerate() {
            let e = e as usize;
            if e == 0 {
                continue;
            }
            while powers[v].len() <= e {
                let next = powers[v].last().unwrap().mul(&powers[v][1]);
                powers[v].push(next);
            }
            t = t.mul(&powers[v][e]);
        }
        acc = acc.add(&t);
    }
    acc
}

/// 2-jet of `f` at `point` (all variables, parameters included).
pub fn jet(f: &RatFun, point: &[BigRational], n: usize) -> Option<Jet2> {
    let num = poly_jet(f.numer(), point, n);
    let den = poly_jet(f.denom(), point, n);
    Some(num.mul(&den.inv()?))
}

fn invert(m: &[BigRational], n: usize) -> Option<Vec<BigRational>> {
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row = m[i * n..(i + 1) * n].to_vec();
            row.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let sub = &f * &a[col][c];
                    a[r][c] = &a[r][c] - sub;
                }
            }
        }
    }
    Some(a.into_iter().flat_map(|r| r[n..].to_vec()).collect())
}

/// `R^{12}_{12}` of the metric `g` evaluated exactly at `point`.
pub fn sectional_at(g: &Mat, point: &[BigRational]) -> Option<BigRational> {
    let n = g.rows();
    let jets: Vec<Jet2> = g
        .entries()
        .iter()
        .map(|e| jet(e, point, n))
        .collect::<Option<_>>()?;
    let val: Vec<BigRational> = jets.iter().map(|j| j.v.clone()).collect();
    let gi = invert(&val, n)?;
    let dg = |a: usize, i: usize, j: usize| &jets[i * n + j].d[a];
    let ddg = |a: usize, b: usize, i: usize, j: usize| &jets[i * n + j].h[a * n + b];
    let half = BigRational::new(1.into(), 2.into());
    let idx3 = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    // First kind Γ_{s,jk} and its derivatives.
    let mut first = vec![BigRational::zero(); n * n * n];
    let mut dfirst = vec![BigRational::zero(); n * n * n * n];
    for s in 0..n {
        for j in 0..n {
            for k in 0..n {
                first[idx3(s, j, k)] = (dg(j, s, k) + dg(k, s, j) - dg(s, j, k)) * &half;
                for a in 0..n {
                    dfirst[idx3(s, j, k) * n + a] =
                        (ddg(a, j, s, k) + ddg(a, k, s, j) - ddg(a, s, j, k)) * &half;
                }
            }
        }
    }
    // ∂_a g^{is} = −g^{ip} ∂_a g_{pq} g^{qs}.
    let dgi = |a: usize, i: usize, s: usize| {
        let mut acc = BigRational::zero();
        for p in 0..n {
            for q in 0..n {
                acc -= &gi[i * n + p] * dg(a, p, q) * &gi[q * n + s];
            }
        }
        acc
    };
    let mut gamma = vec![BigRational::zero(); n * n * n];
    let mut dgamma = vec![BigRational::zero(); n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = BigRational::zero();
                for s in 0..n {
                    acc += &gi[i * n + s] * &first[idx3(s, j, k)];
                }
                gamma[idx3(i, j, k)] = acc;
                for a in 0..n {
                    let mut acc = BigRational::zero();
                    for s in 0..n {
                        acc += dgi(a, i, s) * &first[idx3(s, j, k)]
                            + &gi[i * n + s] * &dfirst[idx3(s, j, k) * n + a];
                    }
                    dgamma[idx3(i, j, k) * n + a] = acc;
                }
            }
        }
    }
    let riem = |l: usize, i: usize, j: usize, k: usize| {
        let mut acc = &dgamma[idx3(l, i, k) * n + j] - &dgamma[idx3(l, i, j) * n + k];
        for s in 0..n {
            acc += &gamma[idx3(l, j, s)] * &gamma[idx3(s, i, k)]
                - &gamma[idx3(l, k, s)] * &gamma[idx3(s, i, j)];
        }
        acc
    };
    let mut k = BigRational::zero();
    for s in 0..n {
        k += &gi[n + s] * riem(0, s, 0, 1);
    }
    Some(k)
}

/// Sample points for the non-constancy certificate; parameters share one
/// value across all points.
pub(crate) fn sample_points(n: usize, nvars: usize, count: usize) -> Vec<Vec<BigRational>> {
    (0..count)
        .map(|t| {
            (0..nvars)
                .map(|v| {
                    let (num, den) = if v < n {
                        (3 + 5 * v as i64 + 7 * t as i64, 5 + v as i64 + 2 * t as i64)
                    } else {
                        (11 + 2 * v as i64, 3)
                    };
                    BigRational::new(num.into(), den.into())
                })
                .collect()
        })
        .collect()
}

/// Exact certificate that `R^{12}_{12}` depends on the coordinates: two
/// sample points where its values differ.
pub fn nonconstant_certificate(g: &Mat) -> bool {
    let n = g.rows();
    let mut first: Option<BigRational> = None;
    for p in sample_points(n, g.nvars(), 4) {
        if let Some(v) = sectional_at(g, &p) {
            match &first {
                None => first = Some(v),
                Some(f) if *f != v => return true,
                Some(_) => {}
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_has_unit_sectional_value_everywhere() {
        let x = |i| RatFun::var(i, 2);
        let r2 = &(&x(0) * &x(0)) + &(&x(1) * &x(1));
        let conf = RatFun::from_int(4, 2)
            .div_ref(&(&RatFun::one(2) + &r2).pow(2))
            .unwrap();
        let g = Mat::identity(2, 2).scale(&conf);
        for p in sample_points(2, 2, 3) {
            assert_eq!(sectional_at(&g, &p), Some(BigRational::one()));
        }
        assert!(!nonconstant_certificate(&g));
    }

    #[test]
    fn jet_of_quotient() {
        // f = x0 / x1 at (1, 2): f = 1/2, ∂f = (1/2, −1/4), ∂²f_{11} = 2·1/8.
        let f = RatFun::var(0, 2).div_ref(&RatFun::var(1, 2)).unwrap();
        let p = [BigRational::one(), BigRational::from_integer(2.into())];
        let j = jet(&f, &p, 2).unwrap();
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(j.v, q(1, 2));
        assert_eq!(j.d, vec![q(1, 2), q(-1, 4)]);
        assert_eq!(j.h, vec![q(0, 1), q(-1, 4), q(-1, 4), q(1, 4)]);
    }
}
