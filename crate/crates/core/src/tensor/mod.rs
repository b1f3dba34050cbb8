//! Charts, tensor fields, connections and the coordinate calculus on them.
//!
//! Coordinates are always the first `n` variables of the underlying
//! [`VarSet`]; any further variables are parameters and are never
//! differentiated.

pub mod curvature;
pub mod diagonal;
pub mod jet;
pub mod transform;

pub use curvature::{
    christoffel, christoffel_unchecked, classify_raised, curvature_class, raise_second, ricci,
    ricci_einstein, riemann, riemann_entry, CurvatureVerdict,
    EinsteinVerdict,
};
pub use diagonal::{diagonal_oracle, DiagonalOracle};
pub use transform::{jacobian, pushforward, pushforward_components};

use crate::error::{Error, Result};
use crate::ratfun::{Mat, RatFun, VarSet};

/// Coordinate chart with an optional open-domain description
/// (`expr > 0` for every listed expression).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    vars: VarSet,
    domain: Vec<RatFun>,
}

impl Chart {
    pub fn new(vars: VarSet, domain: Vec<RatFun>) -> Result<Self> {
        if vars.ncoords() < 2 {
            return Err(Error::ChartMismatch(format!(
                "chart dimension must be at least 2, got {}",
                vars.ncoords()
            )));
        }
        Ok(Chart { vars, domain })
    }

    pub fn standard(n: usize) -> Result<Self> {
        Self::new(VarSet::standard(n), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.vars.ncoords()
    }

    pub fn nvars(&self) -> usize {
        self.vars.nvars()
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn domain(&self) -> &[RatFun] {
        &self.domain
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variance {
    Up,
    Down,
}

/// Dense tensor field; entries stored row-major over the index tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorField {
    dim: usize,
    nvars: usize,
    variance: Vec<Variance>,
    data: Vec<RatFun>,
}

impl TensorField {
    pub fn zeros(dim: usize, nvars: usize, variance: Vec<Variance>) -> Self {
        let len = dim.pow(variance.len() as u32);
        TensorField {
            dim,
            nvars,
            variance,
            data: vec![RatFun::zero(nvars); len],
        }
    }

    pub fn from_fn(
        dim: usize,
        nvars: usize,
        variance: Vec<Variance>,
        mut f: impl FnMut(&[usize]) -> RatFun,
    ) -> Self {
        let mut t = Self::zeros(dim, nvars, variance);
        let mut idx = vec![0; t.rank()];
        for k in 0..t.data.len() {
            t.unflatten(k, &mut idx);
            t.data[k] = f(&idx);
        }
        t
    }

    pub fn from_data(dim: usize, nvars: usize, variance: Vec<Variance>, data: Vec<RatFun>) -> Result<Self> {
        let len = dim.pow(variance.len() as u32);
        if data.len() != len {
            return Err(Error::Document(format!(
                "tensor needs {len} entries, got {}",
                data.len()
            )));
        }
        Ok(TensorField {
            dim,
            nvars,
            variance,
            data,
        })
    }

    pub fn scalar(f: RatFun, dim: usize) -> Self {
        let nvars = f.nvars();
        TensorField {
            dim,
            nvars,
            variance: Vec::new(),
            data: vec![f],
        }
    }

    /// Rank-2 tensor from a matrix with the given variance pair.
    pub fn from_mat(m: &Mat, variance: [Variance; 2]) -> Self {
        assert!(m.is_square());
        TensorField {
            dim: m.rows(),
            nvars: m.nvars(),
            variance: variance.to_vec(),
            data: m.entries().to_vec(),
        }
    }

    pub fn to_mat(&self) -> Mat {
        assert_eq!(self.rank(), 2, "only rank-2 tensors convert to matrices");
        Mat::from_fn(self.dim, self.dim, self.nvars, |i, j| self.get(&[i, j]).clone())
    }

    pub fn vector(v: Vec<RatFun>, variance: Variance) -> Self {
        let nvars = v[0].nvars();
        TensorField {
            dim: v.len(),
            nvars,
            variance: vec![variance],
            data: v,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn entries(&self) -> &[RatFun] {
        &self.data
    }

    fn flatten(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    fn unflatten(&self, mut k: usize, idx: &mut [usize]) {
        for slot in idx.iter_mut().rev() {
            *slot = k % self.dim;
            k /= self.dim;
        }
    }

    pub fn get(&self, idx: &[usize]) -> &RatFun {
        &self.data[self.flatten(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: RatFun) {
        let k = self.flatten(idx);
        self.data[k] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(RatFun::is_zero)
    }

    /// First nonzero component, with its index tuple.
    pub fn first_nonzero(&self) -> Option<(Vec<usize>, &RatFun)> {
        let k = self.data.iter().position(|e| !e.is_zero())?;
        let mut idx = vec![0; self.rank()];
        self.unflatten(k, &mut idx);
        Some((idx, &self.data[k]))
    }

    /// First component where the two tensors differ.
    pub fn first_difference(&self, other: &Self) -> Option<Vec<usize>> {
        assert_eq!(self.data.len(), other.data.len());
        let k = (0..self.data.len()).find(|&k| self.data[k] != other.data[k])?;
        let mut idx = vec![0; self.rank()];
        self.unflatten(k, &mut idx);
        Some(idx)
    }

    /// Same components over `nvars ≥ self.nvars()` variables.
    pub fn extend(&self, nvars: usize) -> Self {
        TensorField {
            dim: self.dim,
            nvars,
            variance: self.variance.clone(),
            data: self.data.iter().map(|e| e.extend(nvars)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&RatFun) -> RatFun) -> Self {
        TensorField {
            dim: self.dim,
            nvars: self.nvars,
            variance: self.variance.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        assert_eq!(self.variance, other.variance);
        TensorField {
            dim: self.dim,
            nvars: self.nvars,
            variance: self.variance.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.add_ref(b))
                .collect(),
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        assert_eq!(self.variance, other.variance);
        TensorField {
            dim: self.dim,
            nvars: self.nvars,
            variance: self.variance.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.sub_ref(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &RatFun) -> Self {
        self.map(|e| e.mul_ref(c))
    }

    /// Checks symmetry in slots `a` and `b`.
    pub fn is_symmetric_in(&self, a: usize, b: usize) -> bool {
        let mut idx = vec![0; self.rank()];
        (0..self.data.len()).all(|k| {
            self.unflatten(k, &mut idx);
            let mut swapped = idx.clone();
            swapped.swap(a, b);
            self.data[k] == *self.get(&swapped)
        })
    }

    pub fn is_antisymmetric_in(&self, a: usize, b: usize) -> bool {
        let mut idx = vec![0; self.rank()];
        (0..self.data.len()).all(|k| {
            self.unflatten(k, &mut idx);
            let mut swapped = idx.clone();
            swapped.swap(a, b);
            self.data[k] == self.get(&swapped).neg_ref()
        })
    }

    /// Covariant derivative; the new index is appended as a final Down slot.
    pub fn covariant_derivative(&self, c: &Connection) -> Result<TensorField> {
        if c.dim != self.dim || c.nvars != self.nvars {
            return Err(Error::ChartMismatch(format!(
                "tensor on {}-dimensional chart with {} variables, connection on {} with {}",
                self.dim, self.nvars, c.dim, c.nvars
            )));
        }
        let n = self.dim;
        let mut variance = self.variance.clone();
        variance.push(Variance::Down);
        let rank = self.rank();
        let mut out = TensorField::zeros(n, self.nvars, variance);
        let mut full = vec![0; rank + 1];
        for k in 0..out.data.len() {
            out.unflatten(k, &mut full);
            let (idx, d) = (&full[..rank], full[rank]);
            let mut acc = self.get(idx).derivative(d);
            let mut tmp = idx.to_vec();
            for (slot, var) in self.variance.iter().enumerate() {
                let orig = idx[slot];
                for s in 0..n {
                    let gamma = match var {
                        Variance::Up => c.get(orig, d, s),
                        Variance::Down => c.get(s, d, orig),
                    };
                    if gamma.is_zero() {
                        continue;
                    }
                    tmp[slot] = s;
                    let t = self.get(&tmp);
                    if !t.is_zero() {
                        let term = gamma.mul_ref(t);
                        acc = match var {
                            Variance::Up => acc.add_ref(&term),
                            Variance::Down => acc.sub_ref(&term),
                        };
                    }
                }
                tmp[slot] = orig;
            }
            out.data[k] = acc;
        }
        Ok(out)
    }
}

/// Affine connection `Γ^i_{jk}`, symmetric in the lower indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    dim: usize,
    nvars: usize,
    gamma: Vec<RatFun>,
}

impl Connection {
    pub fn zero(dim: usize, nvars: usize) -> Self {
        Connection {
            dim,
            nvars,
            gamma: vec![RatFun::zero(nvars); dim * dim * dim],
        }
    }

    /// Builds from a function of `(i, j, k)`; symmetry in `(j, k)` is checked.
    pub fn from_fn(
        dim: usize,
        nvars: usize,
        mut f: impl FnMut(usize, usize, usize) -> RatFun,
    ) -> Result<Self> {
        let mut c = Self::zero(dim, nvars);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    c.gamma[(i * dim + j) * dim + k] = f(i, j, k);
                }
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..j {
                    if c.get(i, j, k) != c.get(i, k, j) {
                        return Err(Error::Precondition(format!(
                            "connection not symmetric: Γ^{}_{{{}{}}} ≠ Γ^{}_{{{}{}}}",
                            i + 1,
                            j + 1,
                            k + 1,
                            i + 1,
                            k + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &RatFun {
        &self.gamma[(i * self.dim + j) * self.dim + k]
    }

    pub fn is_zero(&self) -> bool {
        self.gamma.iter().all(RatFun::is_zero)
    }

    pub fn as_tensor(&self) -> TensorField {
        TensorField {
            dim: self.dim,
            nvars: self.nvars,
            variance: vec![Variance::Up, Variance::Down, Variance::Down],
            data: self.gamma.clone(),
        }
    }

    /// First `(i, j, k)` where the connections differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize, usize)> {
        let n = self.dim;
        let k = (0..self.gamma.len()).find(|&k| self.gamma[k] != other.gamma[k])?;
        Some((k / (n * n), (k / n) % n, k % n))
    }
}

/// Covariant Hessian `∇_i∇_j f = ∂_i∂_j f − Γ^s_{ij}∂_s f`.
pub fn hessian(f: &RatFun, c: &Connection) -> Mat {
    let n = c.dim();
    let nv = c.nvars();
    let df: Vec<RatFun> = (0..n).map(|v| f.derivative(v)).collect();
    let mut h = Mat::zeros(n, n, nv);
    for i in 0..n {
        for j in i..n {
            let mut acc = df[i].derivative(j);
            for (s, ds) in df.iter().enumerate() {
                let g = c.get(s, i, j);
                if !g.is_zero() && !ds.is_zero() {
                    acc = acc.sub_ref(&g.mul_ref(ds));
                }
            }
            h.set(j, i, acc.clone());
            h.set(i, j, acc);
        }
    }
    h
}

/// Kronecker delta as a rational function.
pub(crate) fn delta(i: usize, j: usize, nvars: usize) -> RatFun {
    if i == j {
        RatFun::one(nvars)
    } else {
        RatFun::zero(nvars)
    }
}
