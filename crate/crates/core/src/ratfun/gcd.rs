//! Multivariate polynomial gcd over the rationals.
//!
//! Recursive primitive PRS in a chosen main variable, preceded by a handful
//! of cheap reductions (monomial content, variables present in only one
//! argument, trial division). Results are normalized to primitive integer
//! polynomials with positive leading coefficient.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{Mono, MultiPoly};

/// Greatest common divisor, normalized to a primitive integer polynomial
/// with positive leading coefficient (`1` for coprime inputs).
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let nvars = a.nvars();
    if a.is_zero() {
        return b.primitive_int();
    }
    if b.is_zero() {
        return a.primitive_int();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(nvars);
    }
    let a = a.primitive_int();
    let b = b.primitive_int();
    if a == b {
        return a;
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let m = ma.gcd(&mb);
    let a = if ma.is_one() { a } else { a.div_mono(&ma) };
    let b = if mb.is_one() { b } else { b.div_mono(&mb) };
    let g = gcd_monomial_free(&a, &b);
    let g = if m.is_one() {
        g
    } else {
        g.mul_term(&m, &num_rational::BigRational::one())
    };
    g.primitive_int()
}

/// Both arguments primitive integer and free of monomial factors.
fn gcd_monomial_free(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let nvars = a.nvars();
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(nvars);
    }
    if a == b {
        return a.clone();
    }
    let sa = a.support();
    let sb = b.support();
    // A variable occurring in only one argument cannot occur in the gcd:
    // gcd(a, b) = gcd(b, coefficients of a with respect to that variable).
    if let Some(v) = (0..nvars).find(|&v| sa[v] && !sb[v]) {
        return gcd_with_coeffs(b, a, v);
    }
    if let Some(v) = (0..nvars).find(|&v| sb[v] && !sa[v]) {
        return gcd_with_coeffs(a, b, v);
    }
    // Trial division: one argument frequently divides the other.
    if a.len() <= b.len() {
        if b.div_exact(a).is_some() {
            return a.clone();
        }
    } else if a.div_exact(b).is_some() {
        return b.clone();
    }
    if let Some(g) = heu_gcd(a, b) {
        return g;
    }
    // Main variable: smallest maximal degree among shared variables.
    let v = (0..nvars)
        .filter(|&v| sa[v])
        .min_by_key(|&v| (a.degree_in(v).max(b.degree_in(v)), a.degree_in(v) + b.degree_in(v)))
        .expect("non-constant polynomial has a variable");
    prs_gcd(a, b, v)
}

fn gcd_with_coeffs(base: &MultiPoly, other: &MultiPoly, v: usize) -> MultiPoly {
    let mut g = base.clone();
    let mut coeffs = other.coeffs_in(v);
    coeffs.retain(|c| !c.is_zero());
    // Small coefficients first: they shrink the running gcd fastest.
    coeffs.sort_by_key(|c| (c.total_degree(), c.len()));
    for c in coeffs {
        g = gcd(&g, &c);
        if g.is_constant() {
            return MultiPoly::one(base.nvars());
        }
    }
    g
}

/// Content with respect to `v`: gcd of the coefficients.
fn content_in(p: &MultiPoly, v: usize) -> MultiPoly {
    let mut coeffs = p.coeffs_in(v);
    coeffs.retain(|c| !c.is_zero());
    coeffs.sort_by_key(|c| (c.total_degree(), c.len()));
    let mut it = coeffs.into_iter();
    let mut g = match it.next() {
        Some(c) => c.primitive_int(),
        None => return MultiPoly::one(p.nvars()),
    };
    for c in it {
        if g.is_constant() {
            break;
        }
        g = gcd(&g, &c);
    }
    if g.is_constant() {
        MultiPoly::one(p.nvars())
    } else {
        g
    }
}

fn primitive_part_in(p: &MultiPoly, v: usize) -> MultiPoly {
    let c = content_in(p, v);
    let q = if c.is_one() {
        p.clone()
    } else {
        p.div_exact(&c).expect("content divides")
    };
    q.primitive_int()
}

/// Pseudo-remainder of `a` by `b` with respect to `v` (without the final
/// power of the leading coefficient, which primitive parts discard anyway).
fn pseudo_rem(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let db = b.degree_in(v);
    let lb = b.lc_in(v);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.lc_in(v);
        let mut shift = super::poly::Mono::one(r.nvars());
        let mut exps = shift.exps().to_vec();
        exps[v] = (dr - db) as u16;
        shift = super::poly::Mono::from_exps(exps.into_iter().collect());
        let t = lr.mul_ref(b).mul_term(&shift, &num_rational::BigRational::one());
        r = lb.mul_ref(&r).sub_ref(&t);
        if !r.is_zero() {
            // Keeping coefficients small is worth one integer-content pass.
            r = r.primitive_int();
        }
    }
    r
}

fn prs_gcd(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd(&ca, &cb);
    let mut p = if ca.is_one() { a.clone() } else { a.div_exact(&ca).unwrap() };
    let mut q = if cb.is_one() { b.clone() } else { b.div_exact(&cb).unwrap() };
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    let g = loop {
        if q.degree_in(v) == 0 {
            break MultiPoly::one(a.nvars());
        }
        let r = pseudo_rem(&p, &q, v);
        if r.is_zero() {
            break primitive_part_in(&q, v);
        }
        if r.degree_in(v) == 0 {
            break MultiPoly::one(a.nvars());
        }
        p = q;
        q = primitive_part_in(&r, v);
    };
    c.mul_ref(&g).primitive_int()
}

/// Heuristic gcd: evaluate a variable at a large integer, recurse, and
/// lift the result back by balanced ξ-adic expansion. A candidate is only
/// accepted after exact trial division, so a `None` merely means the
/// heuristic gave up.
fn heu_gcd(a: &MultiPoly, b: &MultiPoly) -> Option<MultiPoly> {
    let (h, _, _) = heu_rec(a, b)?;
    Some(h.primitive_int())
}

const HEU_ATTEMPTS: usize = 6;

/// Returns `(h, a/h, b/h)` for integer polynomials.
fn heu_rec(a: &MultiPoly, b: &MultiPoly) -> Option<(MultiPoly, MultiPoly, MultiPoly)> {
    let nvars = a.nvars();
    if a.is_zero() || b.is_zero() {
        return None;
    }
    let ca = int_content(a);
    let cb = int_content(b);
    let gc = ca.gcd(&cb);
    if a.is_constant() || b.is_constant() {
        let h = MultiPoly::constant(BigRational::from_integer(gc.clone()), nvars);
        return Some((h, scale_int_div(a, &gc), scale_int_div(b, &gc)));
    }
    let a = scale_int_div(a, &gc);
    let b = scale_int_div(b, &gc);
    let sa = a.support();
    let sb = b.support();
    let v = (0..nvars).rev().find(|&v| sa[v] || sb[v])?;
    let na = max_norm(&a);
    let nb = max_norm(&b);
    let bound: BigInt = BigInt::from(2) * na.clone().min(nb.clone()) + 29;
    let la = int_abs(&a.lc());
    let lb = int_abs(&b.lc());
    let mut x: BigInt = (bound.clone().min(BigInt::from(99) * bound.sqrt()))
        .max(BigInt::from(2) * (na / la).min(nb / lb) + 2);
    for _ in 0..HEU_ATTEMPTS {
        let fa = eval_var(&a, v, &x);
        let fb = eval_var(&b, v, &x);
        if !fa.is_zero() && !fb.is_zero() {
            if let Some((h, cfa, cfb)) = heu_rec(&fa, &fb) {
                let hh = interpolate(&h, v, &x).primitive_int_keep_sign();
                if let (Some(qa), Some(qb)) = (a.div_exact(&hh), b.div_exact(&hh)) {
                    let g = scale_int_mul(&hh, &gc);
                    return Some((g, qa, qb));
                }
                let qa = interpolate(&cfa, v, &x);
                if !qa.is_zero() {
                    if let Some(hh) = a.div_exact(&qa) {
                        if let Some(qb) = b.div_exact(&hh) {
                            if is_integral(&hh) {
                                return Some((scale_int_mul(&hh, &gc), qa, qb));
                            }
                        }
                    }
                }
                let qb = interpolate(&cfb, v, &x);
                if !qb.is_zero() {
                    if let Some(hh) = b.div_exact(&qb) {
                        if let Some(qa) = a.div_exact(&hh) {
                            if is_integral(&hh) {
                                return Some((scale_int_mul(&hh, &gc), qa, qb));
                            }
                        }
                    }
                }
            }
        }
        // x ← ⌊73794·x·x^{1/4} / 27011⌋, the usual growth schedule.
        x = BigInt::from(73794) * &x * x.nth_root(4) / BigInt::from(27011);
    }
    None
}

fn is_integral(p: &MultiPoly) -> bool {
    p.terms().iter().all(|(_, c)| c.is_integer())
}

fn int_abs(c: &BigRational) -> BigInt {
    c.numer().abs()
}

fn int_content(p: &MultiPoly) -> BigInt {
    let mut g = BigInt::zero();
    for (_, c) in p.terms() {
        g = g.gcd(c.numer());
    }
    if g.is_zero() {
        BigInt::one()
    } else {
        g
    }
}

fn max_norm(p: &MultiPoly) -> BigInt {
    p.terms()
        .iter()
        .map(|(_, c)| c.numer().abs())
        .max()
        .unwrap_or_default()
}

fn scale_int_div(p: &MultiPoly, c: &BigInt) -> MultiPoly {
    if c.is_one() {
        p.clone()
    } else {
        p.scale(&BigRational::new(BigInt::one(), c.clone()))
    }
}

fn scale_int_mul(p: &MultiPoly, c: &BigInt) -> MultiPoly {
    if c.is_one() {
        p.clone()
    } else {
        p.scale(&BigRational::from_integer(c.clone()))
    }
}

/// Substitutes the integer `x` for variable `v` (the slot stays, at degree 0).
fn eval_var(p: &MultiPoly, v: usize, x: &BigInt) -> MultiPoly {
    let nvars = p.nvars();
    let mut powers: Vec<BigInt> = vec![BigInt::one()];
    let raw = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let e = m.exps()[v] as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap() * x;
                powers.push(next);
            }
            let mut exps = m.exps().to_vec();
            exps[v] = 0;
            (
                Mono::from_exps(exps.into_iter().collect()),
                c * BigRational::from_integer(powers[e].clone()),
            )
        })
        .collect();
    MultiPoly::from_terms(nvars, raw)
}

/// Balanced `x`-adic expansion of the integer coefficients of `h` into
/// powers of variable `v`.
fn interpolate(h: &MultiPoly, v: usize, x: &BigInt) -> MultiPoly {
    let nvars = h.nvars();
    let half = x / BigInt::from(2);
    let mut rest = h.clone();
    let mut raw: Vec<(Mono, BigRational)> = Vec::new();
    let mut k: u16 = 0;
    while !rest.is_zero() {
        let mut digit_terms = Vec::new();
        let mut next_terms = Vec::new();
        for (m, c) in rest.terms() {
            let n = c.numer();
            let mut r = n.mod_floor(x);
            if r > half {
                r -= x;
            }
            let q = (n - &r) / x;
            if !r.is_zero() {
                digit_terms.push((m.clone(), r));
            }
            if !q.is_zero() {
                next_terms.push((m.clone(), BigRational::from_integer(q)));
            }
        }
        for (m, r) in digit_terms {
            let mut exps = m.exps().to_vec();
            exps[v] = k;
            raw.push((Mono::from_exps(exps.into_iter().collect()), BigRational::from_integer(r)));
        }
        rest = MultiPoly::from_terms(nvars, next_terms);
        k += 1;
    }
    MultiPoly::from_terms(nvars, raw)
}

trait KeepSign {
    fn primitive_int_keep_sign(&self) -> MultiPoly;
}

impl KeepSign for MultiPoly {
    fn primitive_int_keep_sign(&self) -> MultiPoly {
        let c = int_content(self);
        scale_int_div(self, &c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> MultiPoly {
        MultiPoly::var(i, 3)
    }

    fn c(k: i64) -> MultiPoly {
        MultiPoly::from_int(k, 3)
    }

    #[test]
    fn gcd_of_products_recovers_common_factor() {
        let f = &(&x(0) - &x(1)) * &(&x(2) + &c(2));
        let a = &f * &(&x(0) + &x(1));
        let b = &f * &(&(&x(0) * &x(2)) - &c(3));
        assert_eq!(gcd(&a, &b), f.primitive_int());
    }

    #[test]
    fn coprime_inputs_give_one() {
        let a = &(&x(0) * &x(0)) + &c(1);
        let b = &x(0) + &x(1);
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn monomial_factors_are_kept() {
        let a = &(&x(0) * &x(0)) * &(&x(1) + &c(1));
        let b = &(&x(0) * &x(2)) * &(&x(1) + &c(1));
        assert_eq!(gcd(&a, &b), (&x(0) * &(&x(1) + &c(1))).primitive_int());
    }

    #[test]
    fn repeated_factors() {
        let f = &x(0) - &x(1);
        let a = f.pow(3);
        let b = &f.pow(2) * &(&x(2) - &c(1));
        assert_eq!(gcd(&a, &b), f.pow(2).primitive_int());
    }

    #[test]
    fn heuristic_agrees_with_subresultant_route() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let random_poly = |rng: &mut rand_chacha::ChaCha8Rng| {
            let raw = (0..rng.gen_range(1..=4))
                .map(|_| {
                    let e: Vec<u16> = (0..3).map(|_| rng.gen_range(0..=2)).collect();
                    (
                        Mono::from_exps(e.into_iter().collect()),
                        BigRational::from_integer(rng.gen_range(-5i64..=5).into()),
                    )
                })
                .collect();
            MultiPoly::from_terms(3, raw)
        };
        for _ in 0..200 {
            let (a, b, h) = (random_poly(&mut rng), random_poly(&mut rng), random_poly(&mut rng));
            if a.is_zero() || b.is_zero() || h.is_zero() {
                continue;
            }
            let (ah, bh) = (&a * &h, &b * &h);
            let g = gcd(&ah, &bh);
            assert!(ah.div_exact(&g).is_some() && bh.div_exact(&g).is_some());
            assert!(g.div_exact(&h).is_some(), "common factor lost");
            let pa = ah.primitive_int();
            let pb = bh.primitive_int();
            let v = (0..3).find(|&v| pa.depends_on(v) && pb.depends_on(v));
            if let Some(v) = v {
                assert_eq!(prs_gcd(&pa, &pb, v).primitive_int(), g);
            }
        }
    }
}
