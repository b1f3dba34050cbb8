//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept sorted in descending graded-lexicographic order with no
//! zero coefficients, so two polynomials are equal iff their term lists are.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

pub type Exps = SmallVec<[u16; 8]>;

/// A monomial `x^e` with its total degree cached.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono {
    deg: u32,
    exps: Exps,
}

impl Mono {
    pub fn one(nvars: usize) -> Self {
        Mono {
            deg: 0,
            exps: SmallVec::from_elem(0, nvars),
        }
    }

    pub fn from_exps(exps: Exps) -> Self {
        let deg = exps.iter().map(|&e| e as u32).sum();
        Mono { deg, exps }
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        let mut m = Self::one(nvars);
        m.exps[i] = 1;
        m.deg = 1;
        m
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let exps: Exps = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| a + b)
            .collect();
        Mono {
            deg: self.deg + other.deg,
            exps,
        }
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        if other.deg > self.deg {
            return None;
        }
        let mut exps = Exps::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(other.exps.iter()) {
            if b > a {
                return None;
            }
            exps.push(a - b);
        }
        Some(Mono {
            deg: self.deg - other.deg,
            exps,
        })
    }

    pub fn gcd(&self, other: &Mono) -> Mono {
        let exps: Exps = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| *a.min(b))
            .collect();
        Mono::from_exps(exps)
    }

    pub fn extend(&self, nvars: usize) -> Mono {
        let mut exps = self.exps.clone();
        exps.resize(nvars, 0);
        Mono { deg: self.deg, exps }
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg
            .cmp(&other.deg)
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial over the rationals.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiPoly {
    nvars: usize,
    terms: Vec<(Mono, BigRational)>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(BigRational::one(), nvars)
    }

    pub fn constant(c: BigRational, nvars: usize) -> Self {
        if c.is_zero() {
            return Self::zero(nvars);
        }
        MultiPoly {
            nvars,
            terms: vec![(Mono::one(nvars), c)],
        }
    }

    pub fn from_int(c: i64, nvars: usize) -> Self {
        Self::constant(BigRational::from_integer(c.into()), nvars)
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        MultiPoly {
            nvars,
            terms: vec![(Mono::var(i, nvars), BigRational::one())],
        }
    }

    pub fn monomial(m: Mono, c: BigRational) -> Self {
        let nvars = m.nvars();
        if c.is_zero() {
            return Self::zero(nvars);
        }
        MultiPoly {
            nvars,
            terms: vec![(m, c)],
        }
    }

    /// Builds a polynomial from arbitrary (possibly repeated, unsorted) terms.
    pub fn from_terms(nvars: usize, mut raw: Vec<(Mono, BigRational)>) -> Self {
        raw.sort_by(|a, b| b.0.cmp(&a.0));
        let mut terms: Vec<(Mono, BigRational)> = Vec::with_capacity(raw.len());
        for (m, c) in raw {
            debug_assert_eq!(m.nvars(), nvars);
            match terms.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => terms.push((m, c)),
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        MultiPoly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Mono, BigRational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    /// Leading term in grlex order.
    pub fn leading(&self) -> Option<&(Mono, BigRational)> {
        self.terms.first()
    }

    pub fn lc(&self) -> BigRational {
        self.terms
            .first()
            .map(|t| t.1.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|t| t.0.degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.exps[v] as u32)
            .max()
            .unwrap_or(0)
    }

    pub fn min_degree_in(&self, v: usize) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.exps[v] as u32)
            .min()
            .unwrap_or(0)
    }

    /// Indices of the variables that actually occur.
    pub fn support(&self) -> Vec<bool> {
        let mut s = vec![false; self.nvars];
        for (m, _) in &self.terms {
            for (i, e) in m.exps.iter().enumerate() {
                if *e > 0 {
                    s[i] = true;
                }
            }
        }
        s
    }

    pub fn depends_on(&self, v: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.exps[v] > 0)
    }

    /// Componentwise minimum exponent over all terms.
    pub fn monomial_content(&self) -> Mono {
        let mut it = self.terms.iter();
        match it.next() {
            None => Mono::one(self.nvars),
            Some((first, _)) => it.fold(first.clone(), |acc, (m, _)| acc.gcd(m)),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul_term(&self, mono: &Mono, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.mul(mono), a * c))
                .collect(),
        }
    }

    /// Exact division by a monomial; panics if it does not divide.
    pub fn div_mono(&self, mono: &Mono) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.div(mono).expect("monomial divides"), a.clone()))
                .collect(),
        }
    }

    fn merge(a: &[(Mono, BigRational)], b: &[(Mono, BigRational)], sign: bool) -> Vec<(Mono, BigRational)> {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if sign { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if sign { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        for t in &b[j..] {
            let c = if sign { -&t.1 } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        out
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        MultiPoly {
            nvars: self.nvars,
            terms: Self::merge(&self.terms, &other.terms, false),
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        MultiPoly {
            nvars: self.nvars,
            terms: Self::merge(&self.terms, &other.terms, true),
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.nvars);
        }
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        // Each partial product stays sorted (grlex is a monomial order); merge pairwise.
        let mut parts: Vec<Vec<(Mono, BigRational)>> = small
            .terms
            .iter()
            .map(|(m, c)| big.mul_term(m, c).terms)
            .collect();
        while parts.len() > 1 {
            let mut next = Vec::with_capacity(parts.len().div_ceil(2));
            let mut it = parts.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(Self::merge(&a, &b, false)),
                    None => next.push(a),
                }
            }
            parts = next;
        }
        MultiPoly {
            nvars: self.nvars,
            terms: parts.pop().unwrap_or_default(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        result
    }

    pub fn derivative(&self, v: usize) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let e = m.exps[v];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps.clone();
            exps[v] -= 1;
            terms.push((
                Mono {
                    deg: m.deg - 1,
                    exps,
                },
                c * BigRational::from_integer(BigInt::from(e)),
            ));
        }
        // Lowering one exponent can reorder terms only across different
        // original exponents of v, so re-sort.
        Self::from_terms(self.nvars, terms)
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero(self.nvars));
        }
        if d.is_constant() {
            return Some(self.scale(&d.lc().recip()));
        }
        let (dm, dc) = d.leading().cloned().unwrap();
        if d.is_monomial() {
            let inv = dc.recip();
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                terms.push((m.div(&dm)?, c * &inv));
            }
            return Some(MultiPoly {
                nvars: self.nvars,
                terms,
            });
        }
        // Quick degree rejections.
        for v in 0..self.nvars {
            if d.degree_in(v) > self.degree_in(v) {
                return None;
            }
        }
        let inv = dc.recip();
        let mut rem = self.clone();
        let mut quot: Vec<(Mono, BigRational)> = Vec::new();
        while let Some((rm, rc)) = rem.leading().cloned() {
            let qm = rm.div(&dm)?;
            let qc = &rc * &inv;
            rem = rem.sub_ref(&d.mul_term(&qm, &qc));
            quot.push((qm, qc));
        }
        // Quotient terms are produced in strictly decreasing order.
        Some(MultiPoly {
            nvars: self.nvars,
            terms: quot,
        })
    }

    /// Coefficients with respect to variable `v`, indexed by power; each
    /// coefficient has `v` eliminated.
    pub fn coeffs_in(&self, v: usize) -> Vec<MultiPoly> {
        let d = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Mono, BigRational)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let e = m.exps[v];
            let mut exps = m.exps.clone();
            exps[v] = 0;
            buckets[e as usize].push((
                Mono {
                    deg: m.deg - e as u32,
                    exps,
                },
                c.clone(),
            ));
        }
        buckets
            .into_iter()
            .map(|terms| MultiPoly {
                nvars: self.nvars,
                terms,
            })
            .collect()
    }

    /// Inverse of [`coeffs_in`](Self::coeffs_in).
    pub fn from_coeffs_in(v: usize, coeffs: &[MultiPoly], nvars: usize) -> Self {
        let mut acc = Self::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut m = Mono::one(nvars);
            m.exps[v] = k as u16;
            m.deg = k as u32;
            acc = acc.add_ref(&c.mul_term(&m, &BigRational::one()));
        }
        acc
    }

    /// Leading coefficient with respect to `v` (a polynomial free of `v`).
    pub fn lc_in(&self, v: usize) -> MultiPoly {
        let d = self.degree_in(v);
        let terms: Vec<(Mono, BigRational)> = self
            .terms
            .iter()
            .filter(|(m, _)| m.exps[v] as u32 == d)
            .map(|(m, c)| {
                let mut exps = m.exps.clone();
                exps[v] = 0;
                (
                    Mono {
                        deg: m.deg - d,
                        exps,
                    },
                    c.clone(),
                )
            })
            .collect();
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
    }

    /// Gcd of numerators over lcm of denominators: the rational content.
    pub fn rational_content(&self) -> BigRational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return BigRational::one();
        }
        BigRational::new(num, den)
    }

    /// Primitive integer polynomial with positive leading coefficient that
    /// is a rational multiple of `self`.
    pub fn primitive_int(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.rational_content();
        if self.lc().is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// Rescales so the leading coefficient is one.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().recip())
    }

    /// Embeds into a polynomial ring with more trailing variables.
    pub fn extend(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        MultiPoly {
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.extend(nvars), c.clone()))
                .collect(),
        }
    }

    /// Substitutes `images[v]` for each variable `v`; the images live in a
    /// (possibly different) ring with `target_nvars` variables.
    pub fn substitute(&self, images: &[MultiPoly], target_nvars: usize) -> MultiPoly {
        assert_eq!(images.len(), self.nvars);
        let mut powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|p| vec![MultiPoly::one(target_nvars), p.clone()])
            .collect();
        let mut acc = MultiPoly::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(c.clone(), target_nvars);
            for (v, &e) in m.exps.iter().enumerate() {
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

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[v].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (v, &e) in m.exps.iter().enumerate() {
                    if e > 0 {
                        t *= point[v].powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Maximum absolute value of the coefficients (as integers if integral).
    pub fn max_coeff_abs(&self) -> BigRational {
        self.terms
            .iter()
            .map(|(_, c)| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// Formats with the given variable names.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(abs.to_string());
            }
            for (v, &e) in m.exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[v].clone()),
                    _ => factors.push(format!("{}^{}", names[v], e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("v{i}")).collect();
        write!(f, "{}", self.display_with(&names))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.add_ref(rhs)
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.sub_ref(rhs)
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.mul_ref(rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}
