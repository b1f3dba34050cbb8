//! Quadratic extension `a + b·√D` over the rational-function field.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

use super::rat::RatFun;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadExt {
    a: RatFun,
    b: RatFun,
    d: Arc<RatFun>,
}

impl RadExt {
    pub fn new(a: RatFun, b: RatFun, d: Arc<RatFun>) -> Self {
        RadExt { a, b, d }
    }

    /// `√D` itself.
    pub fn sqrt(d: RatFun) -> Self {
        let n = d.nvars();
        RadExt {
            a: RatFun::zero(n),
            b: RatFun::one(n),
            d: Arc::new(d),
        }
    }

    /// Embeds a rational function with the given radicand.
    pub fn rational(a: RatFun, d: &Arc<RatFun>) -> Self {
        let n = a.nvars();
        RadExt {
            a,
            b: RatFun::zero(n),
            d: d.clone(),
        }
    }

    pub fn a(&self) -> &RatFun {
        &self.a
    }

    pub fn b(&self) -> &RatFun {
        &self.b
    }

    pub fn radicand(&self) -> &Arc<RatFun> {
        &self.d
    }

    pub fn nvars(&self) -> usize {
        self.a.nvars()
    }

    fn check(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.d, &other.d) || self.d == other.d,
            "radical extension elements with different radicands"
        );
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        self.check(other);
        RadExt {
            a: self.a.add_ref(&other.a),
            b: self.b.add_ref(&other.b),
            d: self.d.clone(),
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.check(other);
        RadExt {
            a: self.a.sub_ref(&other.a),
            b: self.b.sub_ref(&other.b),
            d: self.d.clone(),
        }
    }

    pub fn neg_ref(&self) -> Self {
        RadExt {
            a: self.a.neg_ref(),
            b: self.b.neg_ref(),
            d: self.d.clone(),
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        self.check(other);
        let a = self
            .a
            .mul_ref(&other.a)
            .add_ref(&self.b.mul_ref(&other.b).mul_ref(&self.d));
        let b = self.a.mul_ref(&other.b).add_ref(&self.b.mul_ref(&other.a));
        RadExt {
            a,
            b,
            d: self.d.clone(),
        }
    }

    pub fn scale(&self, f: &RatFun) -> Self {
        RadExt {
            a: self.a.mul_ref(f),
            b: self.b.mul_ref(f),
            d: self.d.clone(),
        }
    }

    /// `a − b√D`.
    pub fn conjugate(&self) -> Self {
        RadExt {
            a: self.a.clone(),
            b: self.b.neg_ref(),
            d: self.d.clone(),
        }
    }

    /// `(a + b√D)(a − b√D) = a² − b²D`.
    pub fn norm(&self) -> RatFun {
        self.a
            .mul_ref(&self.a)
            .sub_ref(&self.b.mul_ref(&self.b).mul_ref(&self.d))
    }

    /// Inverse via the conjugate; `None` when the norm vanishes.
    pub fn inv(&self) -> Option<Self> {
        let n = self.norm().inv()?;
        Some(self.conjugate().scale(&n))
    }

    /// `∂(a + b√D) = ∂a + (∂b + b·∂D/(2D))·√D`.
    pub fn derivative(&self, v: usize) -> Self {
        let a = self.a.derivative(v);
        let mut b = self.b.derivative(v);
        if !self.b.is_zero() {
            let dd = self.d.derivative(v);
            if !dd.is_zero() {
                let half = BigRational::new(BigInt::from(1), BigInt::from(2));
                let t = self.b.mul_ref(&dd).div_ref(&self.d).expect("nonzero radicand");
                b = b.add_ref(&t.scale(&half));
            }
        }
        RadExt {
            a,
            b,
            d: self.d.clone(),
        }
    }

    /// Formal zero test: `a = 0` and `b = 0`.
    pub fn is_formally_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact pointwise vanishing test at a rational point with `D ≥ 0`.
    /// Returns `None` if a denominator vanishes or `D < 0` there.
    pub fn vanishes_at(&self, point: &[BigRational]) -> Option<bool> {
        let a = self.a.eval(point)?;
        let b = self.b.eval(point)?;
        let d = self.d.eval(point)?;
        if d.is_negative() {
            return None;
        }
        if b.is_zero() {
            return Some(a.is_zero());
        }
        // a + b√D = 0  ⟺  a² = b²D with a, b of opposite signs (or a = 0 = D).
        Some(&a * &a == &b * &b * &d && (&a * &b).signum() <= BigRational::zero())
    }

    pub fn eval_f64(&self, point: &[BigRational]) -> Option<f64> {
        let a = self.a.eval(point)?.to_f64()?;
        let b = self.b.eval(point)?.to_f64()?;
        let d = self.d.eval(point)?.to_f64()?;
        if d < 0.0 {
            return None;
        }
        Some(a + b * d.sqrt())
    }
}

/// Outcome of the radical zero test.
#[derive(Clone, Debug, PartialEq)]
pub enum RadZero {
    Zero,
    /// Formally nonzero. `certified` is set when some sample point gives an
    /// exactly nonzero value; otherwise the expression vanished at every
    /// sample (typically a perfect-square radicand).
    NonZero {
        certified: bool,
        samples: Vec<(Vec<BigRational>, f64)>,
    },
}

impl RadZero {
    pub fn is_zero(&self) -> bool {
        matches!(self, RadZero::Zero)
    }
}

const WITNESS_POINTS: usize = 8;

/// Zero test backing every radical identity check.
pub fn rad_is_zero<R: Rng>(e: &RadExt, rng: &mut R) -> RadZero {
    if e.is_formally_zero() {
        return RadZero::Zero;
    }
    let mut samples = Vec::new();
    let mut certified = false;
    let mut attempts = 0;
    while samples.len() < WITNESS_POINTS && attempts < 50 * WITNESS_POINTS {
        attempts += 1;
        let point: Vec<BigRational> = (0..e.nvars())
            .map(|_| {
                let num: i64 = rng.gen_range(-40..=40);
                let den: i64 = rng.gen_range(1..=7);
                BigRational::new(num.into(), den.into())
            })
            .collect();
        if !matches!(e.d.eval(&point), Some(d) if d.is_positive()) {
            continue;
        }
        let Some(vanishes) = e.vanishes_at(&point) else {
            continue;
        };
        let value = e.eval_f64(&point).unwrap_or(f64::NAN);
        certified |= !vanishes;
        samples.push((point, value));
    }
    RadZero::NonZero { certified, samples }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn x(i: usize) -> RatFun {
        RatFun::var(i, 2)
    }

    #[test]
    fn square_of_root_is_radicand() {
        let d = &x(0) * &x(1);
        let s = RadExt::sqrt(d.clone());
        let sq = s.mul_ref(&s);
        assert_eq!(sq.a(), &d);
        assert!(sq.b().is_zero());
    }

    #[test]
    fn derivative_of_root() {
        let s = RadExt::sqrt(&x(0) * &x(1));
        let ds = s.derivative(0);
        assert!(ds.a().is_zero());
        assert_eq!(ds.b(), &(&RatFun::from_int(2, 2) * &x(0)).inv().unwrap());
    }

    #[test]
    fn perfect_square_radicand_is_formally_nonzero() {
        let d = Arc::new(&x(0) * &x(0));
        let e = RadExt::new(x(0).neg_ref(), RatFun::one(2), d);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        match rad_is_zero(&e, &mut rng) {
            RadZero::NonZero { samples, .. } => assert_eq!(samples.len(), WITNESS_POINTS),
            RadZero::Zero => panic!("formal test must report nonzero"),
        }
    }
}
