//! Reduced rational functions: the scalar field of the engine.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gcd::gcd;
use super::poly::MultiPoly;

/// `num / den` with `gcd(num, den) = 1` and `den` monic in grlex order.
///
/// The normal form is unique, so equality is structural and the zero test
/// is `num = 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFun {
    num: MultiPoly,
    den: MultiPoly,
}

impl RatFun {
    pub fn zero(nvars: usize) -> Self {
        RatFun {
            num: MultiPoly::zero(nvars),
            den: MultiPoly::one(nvars),
        }
    }

    pub fn one(nvars: usize) -> Self {
        RatFun {
            num: MultiPoly::one(nvars),
            den: MultiPoly::one(nvars),
        }
    }

    pub fn from_int(c: i64, nvars: usize) -> Self {
        Self::from_poly(MultiPoly::from_int(c, nvars))
    }

    pub fn from_rational(c: BigRational, nvars: usize) -> Self {
        Self::from_poly(MultiPoly::constant(c, nvars))
    }

    pub fn from_ratio(n: i64, d: i64, nvars: usize) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)), nvars)
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        Self::from_poly(MultiPoly::var(i, nvars))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let nvars = p.nvars();
        RatFun {
            num: p,
            den: MultiPoly::one(nvars),
        }
    }

    /// Builds and normalizes `num / den`; `None` when `den` is zero.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Self::reduce(num, den))
    }

    fn reduce(num: MultiPoly, den: MultiPoly) -> Self {
        let nvars = num.nvars();
        if num.is_zero() {
            return Self::zero(nvars);
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        Self::normalize_lc(num, den)
    }

    fn normalize_lc(num: MultiPoly, den: MultiPoly) -> Self {
        let lc = den.lc();
        if lc.is_one() {
            RatFun { num, den }
        } else {
            let inv = lc.recip();
            RatFun {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn numer(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denom(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// A rational number (no variables at all).
    pub fn constant_value(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// Free of the first `ncoords` variables (parameters may remain).
    pub fn is_constant_in(&self, ncoords: usize) -> bool {
        (0..ncoords).all(|v| !self.num.depends_on(v) && !self.den.depends_on(v))
    }

    pub fn depends_on(&self, v: usize) -> bool {
        self.num.depends_on(v) || self.den.depends_on(v)
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.add_ref(&other.num));
        }
        if self.den == other.den {
            return Self::reduce(self.num.add_ref(&other.num), self.den.clone());
        }
        if self.den.is_one() {
            let n = self.num.mul_ref(&other.den).add_ref(&other.num);
            return Self::normalize_lc(n, other.den.clone());
        }
        if other.den.is_one() {
            let n = self.num.add_ref(&other.num.mul_ref(&self.den));
            return Self::normalize_lc(n, self.den.clone());
        }
        // Henrici: with g = gcd(b, d), b = g b', d = g d', the sum
        // (a d' + c b') / (g b' d') can only share factors with g.
        let g = gcd(&self.den, &other.den);
        if g.is_constant() {
            let n = self
                .num
                .mul_ref(&other.den)
                .add_ref(&other.num.mul_ref(&self.den));
            return Self::normalize_lc(n, self.den.mul_ref(&other.den));
        }
        let b1 = self.den.div_exact(&g).unwrap();
        let d1 = other.den.div_exact(&g).unwrap();
        let n = self.num.mul_ref(&d1).add_ref(&other.num.mul_ref(&b1));
        if n.is_zero() {
            return Self::zero(self.nvars());
        }
        let h = gcd(&n, &g);
        let (n, g) = if h.is_constant() {
            (n, g)
        } else {
            (n.div_exact(&h).unwrap(), g.div_exact(&h).unwrap())
        };
        Self::normalize_lc(n, g.mul_ref(&b1).mul_ref(&d1))
    }

    pub fn neg_ref(&self) -> Self {
        RatFun {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.nvars());
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.mul_ref(&other.num));
        }
        // Cross-cancel: (a/b)(c/d) with g1 = gcd(a, d), g2 = gcd(c, b).
        let (a, d) = cancel(&self.num, &other.den);
        let (c, b) = cancel(&other.num, &self.den);
        Self::normalize_lc(a.mul_ref(&c), b.mul_ref(&d))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        RatFun {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&BigRational::from_integer(c.into()))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::normalize_lc(self.den.clone(), self.num.clone()))
    }

    pub fn div_ref(&self, other: &Self) -> Option<Self> {
        Some(self.mul_ref(&other.inv()?))
    }

    pub fn pow(&self, e: u32) -> Self {
        RatFun {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    pub fn powi(&self, e: i32) -> Option<Self> {
        if e >= 0 {
            Some(self.pow(e as u32))
        } else {
            Some(self.inv()?.pow((-e) as u32))
        }
    }

    pub fn derivative(&self, v: usize) -> Self {
        if self.den.is_one() {
            return Self::from_poly(self.num.derivative(v));
        }
        if !self.den.depends_on(v) {
            // ∂n may share factors with d even though n does not.
            return Self::reduce(self.num.derivative(v), self.den.clone());
        }
        // (n/d)' = (n' d - n d') / d^2; with g = gcd(d, d') the result is
        // (n' (d/g) - n (d'/g)) / (d (d/g)) up to remaining cancellation with d.
        let dd = self.den.derivative(v);
        let g = gcd(&self.den, &dd);
        let d1 = self.den.div_exact(&g).unwrap();
        let dd1 = dd.div_exact(&g).unwrap();
        let n = self
            .num
            .derivative(v)
            .mul_ref(&d1)
            .sub_ref(&self.num.mul_ref(&dd1));
        if n.is_zero() {
            return Self::zero(self.nvars());
        }
        // gcd(n, d1) = 1 already; only factors of g can cancel.
        let h = gcd(&n, &g);
        let (n, gg) = if h.is_constant() {
            (n, g)
        } else {
            (n.div_exact(&h).unwrap(), g.div_exact(&h).unwrap())
        };
        Self::normalize_lc(n, gg.mul_ref(&d1).mul_ref(&d1))
    }

    pub fn extend(&self, nvars: usize) -> Self {
        RatFun {
            num: self.num.extend(nvars),
            den: self.den.extend(nvars),
        }
    }

    /// Substitutes rational functions for every variable.
    pub fn substitute(&self, images: &[RatFun]) -> Option<Self> {
        let target = images.first().map(|r| r.nvars()).unwrap_or(self.nvars());
        let n = subst_poly(&self.num, images, target);
        let d = subst_poly(&self.den, images, target);
        n.div_ref(&d)
    }

    /// Exact evaluation; `None` when the denominator vanishes.
    pub fn eval(&self, point: &[BigRational]) -> Option<BigRational> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(point) / d)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.num.eval_f64(point) / self.den.eval_f64(point)
    }

    /// Canonical text form, reparseable by the expression parser.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.den.is_one() {
            return self.num.display_with(names);
        }
        let n = self.num.display_with(names);
        let d = self.den.display_with(names);
        let n = if self.num.len() > 1 { format!("({n})") } else { n };
        let d = if self.den.len() > 1 || !self.den.is_monomial() || d.contains('*') {
            format!("({d})")
        } else {
            d
        };
        format!("{n}/{d}")
    }
}

fn cancel(n: &MultiPoly, d: &MultiPoly) -> (MultiPoly, MultiPoly) {
    if d.is_one() || n.is_constant() {
        return (n.clone(), d.clone());
    }
    let g = gcd(n, d);
    if g.is_constant() {
        (n.clone(), d.clone())
    } else {
        (n.div_exact(&g).unwrap(), d.div_exact(&g).unwrap())
    }
}

fn subst_poly(p: &MultiPoly, images: &[RatFun], target: usize) -> RatFun {
    // Fast path: all images polynomial.
    if images.iter().all(|r| r.is_polynomial()) {
        let polys: Vec<MultiPoly> = images.iter().map(|r| r.num.clone()).collect();
        return RatFun::from_poly(p.substitute(&polys, target));
    }
    let mut powers: Vec<Vec<RatFun>> = images
        .iter()
        .map(|r| vec![RatFun::one(target), r.clone()])
        .collect();
    let mut acc = RatFun::zero(target);
    for (m, c) in p.terms() {
        let mut t = RatFun::from_rational(c.clone(), target);
        for (v, &e) in m.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let pw = &mut powers[v];
            while pw.len() <= e as usize {
                let next = pw.last().unwrap().mul_ref(&pw[1]);
                pw.push(next);
            }
            t = t.mul_ref(&pw[e as usize]);
        }
        acc = acc.add_ref(&t);
    }
    acc
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars()).map(|i| format!("v{i}")).collect();
        write!(f, "{}", self.display_with(&names))
    }
}

impl Add for &RatFun {
    type Output = RatFun;
    fn add(self, rhs: &RatFun) -> RatFun {
        self.add_ref(rhs)
    }
}

impl Sub for &RatFun {
    type Output = RatFun;
    fn sub(self, rhs: &RatFun) -> RatFun {
        self.sub_ref(rhs)
    }
}

impl Mul for &RatFun {
    type Output = RatFun;
    fn mul(self, rhs: &RatFun) -> RatFun {
        self.mul_ref(rhs)
    }
}

impl Div for &RatFun {
    type Output = RatFun;
    /// Panics on division by zero; use [`RatFun::div_ref`] to handle it.
    fn div(self, rhs: &RatFun) -> RatFun {
        self.div_ref(rhs).expect("division by zero rational function")
    }
}

impl Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        self.neg_ref()
    }
}

/// Sums many terms sharing (mostly) the same denominator with one reduction
/// at the end.
pub fn sum<'a, I: IntoIterator<Item = &'a RatFun>>(items: I, nvars: usize) -> RatFun {
    let mut acc = RatFun::zero(nvars);
    for it in items {
        acc = acc.add_ref(it);
    }
    acc
}
