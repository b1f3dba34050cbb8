//! Double-precision evaluation of rational functions and operators.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::ratfun::{Mat, MultiPoly, RatFun};

/// Denominators smaller than this in magnitude abort the evaluation.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(Vec<(usize, i32)>, f64)>,
}

impl CompiledPoly {
    fn new(p: &MultiPoly) -> Self {
        let terms = p
            .terms()
            .iter()
            .map(|(m, c)| {
                let powers = m
                    .exps()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(v, &e)| (v, e as i32))
                    .collect();
                (powers, c.to_f64().unwrap_or(f64::NAN))
            })
            .collect();
        CompiledPoly { terms }
    }

    fn eval(&self, u: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(powers, c)| powers.iter().fold(*c, |t, &(v, e)| t * u[v].powi(e)))
            .sum()
    }

    fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_empty() && self.terms[0].1 == 1.0
    }
}

/// A rational function of the coordinates compiled to floating point.
#[derive(Clone, Debug)]
pub struct CompiledFun {
    num: CompiledPoly,
    den: Option<CompiledPoly>,
}

impl CompiledFun {
    /// Fails when `f` depends on more than `ncoords` variables.
    pub fn new(f: &RatFun, ncoords: usize) -> Result<Self> {
        if (ncoords..f.nvars()).any(|v| f.depends_on(v)) {
            return Err(Error::Precondition(
                "function depends on parameters; substitute them first".into(),
            ));
        }
        let den = CompiledPoly::new(f.denom());
        Ok(CompiledFun {
            num: CompiledPoly::new(f.numer()),
            den: (!den.is_one()).then_some(den),
        })
    }

    /// Value at `u`; `Err(denominator)` near the singular locus.
    pub fn eval(&self, u: &[f64]) -> std::result::Result<f64, f64> {
        let n = self.num.eval(u);
        match &self.den {
            None => Ok(n),
            Some(d) => {
                let d = d.eval(u);
                if d.abs() < SINGULAR_THRESHOLD {
                    Err(d)
                } else {
                    Ok(n / d)
                }
            }
        }
    }
}

/// A square operator `A(u)` compiled entrywise.
#[derive(Clone, Debug)]
pub struct CompiledOperator {
    dim: usize,
    entries: Vec<CompiledFun>,
    diagonal: bool,
}

impl CompiledOperator {
    pub fn new(a: &Mat) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Precondition("operator is not square".into()));
        }
        let n = a.rows();
        let entries = a
            .entries()
            .iter()
            .map(|e| CompiledFun::new(e, n))
            .collect::<Result<Vec<_>>>()?;
        let diagonal = (0..n * n).all(|k| k / n == k % n || a.entries()[k].is_zero());
        Ok(CompiledOperator {
            dim: n,
            entries,
            diagonal,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    /// Writes `A(u)` row-major into `out`; `Err(denominator)` near the
    /// singular locus.
    pub fn eval_into(&self, u: &[f64], out: &mut [f64]) -> std::result::Result<(), f64> {
        for (o, e) in out.iter_mut().zip(&self.entries) {
            *o = e.eval(u)?;
        }
        Ok(())
    }
}

/// Upper estimate of the spectral radius, `‖A^{2^k}‖^{1/2^k}` in the
/// row-sum norm.
pub fn spectral_radius(a: &[f64], n: usize) -> f64 {
    let norm = |m: &[f64]| {
        (0..n)
            .map(|i| m[i * n..(i + 1) * n].iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let mut m = a.to_vec();
    let mut log_scale = 0.0;
    let mut best = norm(&m);
    for k in 1..=5 {
        let s = norm(&m);
        if s == 0.0 {
            return 0.0;
        }
        for x in m.iter_mut() {
            *x /= s;
        }
        log_scale = 2.0 * (log_scale + s.ln());
        let mut sq = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                sq[i * n + j] = (0..n).map(|s| m[i * n + s] * m[s * n + j]).sum();
            }
        }
        m = sq;
        let p = 2f64.powi(k);
        let est = ((log_scale + norm(&m).ln()) / p).exp();
        best = best.min(est);
    }
    best
}
