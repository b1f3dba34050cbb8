//! Dense matrices over the rational-function field.

use std::fmt;

use super::gcd::gcd;
use super::poly::MultiPoly;
use super::rat::RatFun;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    nvars: usize,
    data: Vec<RatFun>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        Mat {
            rows,
            cols,
            nvars,
            data: vec![RatFun::zero(nvars); rows * cols],
        }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        Self::from_fn(n, n, nvars, |i, j| {
            if i == j {
                RatFun::one(nvars)
            } else {
                RatFun::zero(nvars)
            }
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        nvars: usize,
        mut f: impl FnMut(usize, usize) -> RatFun,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat {
            rows,
            cols,
            nvars,
            data,
        }
    }

    pub fn from_rows(rows: Vec<Vec<RatFun>>, nvars: usize) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Mat {
            rows: r,
            cols: c,
            nvars,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_ints(rows: &[Vec<i64>], nvars: usize) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| RatFun::from_int(v, nvars)).collect())
                .collect(),
            nvars,
        )
    }

    pub fn diagonal(entries: Vec<RatFun>, nvars: usize) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n, nvars);
        for (i, e) in entries.into_iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFun {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RatFun) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[RatFun] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[RatFun] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map(&self, f: impl Fn(&RatFun) -> RatFun) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(RatFun::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// First `(i, j)` where the matrix differs from its transpose.
    pub fn asymmetry_witness(&self) -> Option<(usize, usize)> {
        (0..self.rows)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) != self.get(j, i))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.nvars, |i, j| self.get(j, i).clone())
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.add_ref(b))
                .collect(),
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
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

    pub fn mul_ref(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        Self::from_fn(self.rows, other.cols, self.nvars, |i, j| {
            let mut acc = RatFun::zero(self.nvars);
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = other.get(k, j);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.add_ref(&a.mul_ref(b));
                }
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[RatFun]) -> Vec<RatFun> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = RatFun::zero(self.nvars);
                for (k, vk) in v.iter().enumerate() {
                    let a = self.get(i, k);
                    if !a.is_zero() && !vk.is_zero() {
                        acc = acc.add_ref(&a.mul_ref(vk));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul_ref(other).sub_ref(&other.mul_ref(self))
    }

    pub fn trace(&self) -> RatFun {
        let mut acc = RatFun::zero(self.nvars);
        for i in 0..self.rows.min(self.cols) {
            acc = acc.add_ref(self.get(i, i));
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::identity(self.rows, self.nvars);
        for _ in 0..e {
            result = result.mul_ref(self);
        }
        result
    }

    /// Integer power; negative exponents need an invertible matrix.
    pub fn powi(&self, e: i32) -> Option<Self> {
        if e >= 0 {
            Some(self.pow(e as u32))
        } else {
            Some(self.inverse()?.pow((-e) as u32))
        }
    }

    /// Evaluates `Σ c_k M^k` by Horner's rule, coefficients from low degree.
    pub fn poly_eval(&self, coeffs: &[RatFun]) -> Self {
        let n = self.rows;
        let mut acc = Self::zeros(n, n, self.nvars);
        for c in coeffs.iter().rev() {
            acc = acc.mul_ref(self).add_ref(&Self::identity(n, self.nvars).scale(c));
        }
        acc
    }

    pub fn derivative(&self, v: usize) -> Self {
        self.map(|e| e.derivative(v))
    }

    pub fn extend(&self, nvars: usize) -> Self {
        let mut m = self.map(|e| e.extend(nvars));
        m.nvars = nvars;
        m
    }

    pub fn substitute(&self, images: &[RatFun]) -> Option<Self> {
        let nvars = images.first().map_or(self.nvars, RatFun::nvars);
        let data = self
            .data
            .iter()
            .map(|e| e.substitute(images))
            .collect::<Option<Vec<_>>>()?;
        Some(Mat {
            rows: self.rows,
            cols: self.cols,
            nvars,
            data,
        })
    }

    pub fn eval_f64(&self, point: &[f64]) -> Vec<f64> {
        self.data.iter().map(|e| e.eval_f64(point)).collect()
    }

    /// Rows scaled to polynomial entries: returns `(P, d)` with
    /// `self = diag(1/d_i) · P`.
    fn clear_row_denominators(&self) -> (Vec<Vec<MultiPoly>>, Vec<MultiPoly>) {
        let mut rows = Vec::with_capacity(self.rows);
        let mut dens = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut l = MultiPoly::one(self.nvars);
            for e in self.row(i) {
                let d = e.denom();
                if d.is_one() {
                    continue;
                }
                let g = gcd(&l, d);
                l = l.mul_ref(&d.div_exact(&g).unwrap());
            }
            let row = self
                .row(i)
                .iter()
                .map(|e| {
                    if e.is_zero() {
                        MultiPoly::zero(self.nvars)
                    } else {
                        e.numer().mul_ref(&l.div_exact(e.denom()).unwrap())
                    }
                })
                .collect();
            rows.push(row);
            dens.push(l);
        }
        (rows, dens)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> RatFun {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return RatFun::one(self.nvars);
        }
        if n == 1 {
            return self.get(0, 0).clone();
        }
        if n == 2 {
            return self
                .get(0, 0)
                .mul_ref(self.get(1, 1))
                .sub_ref(&self.get(0, 1).mul_ref(self.get(1, 0)));
        }
        let (rows, dens) = self.clear_row_denominators();
        let det = bareiss_det(rows, self.nvars);
        let mut den = MultiPoly::one(self.nvars);
        for d in &dens {
            den = den.mul_ref(d);
        }
        RatFun::new(det, den).expect("nonzero row denominators")
    }

    /// Inverse via adjugate and determinant; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse of non-square matrix");
        let n = self.rows;
        let det = self.det();
        let inv_det = det.inv()?;
        if n == 1 {
            return Some(Self::from_fn(1, 1, self.nvars, |_, _| inv_det.clone()));
        }
        Some(Self::from_fn(n, n, self.nvars, |i, j| {
            // (M⁻¹)_{ij} = (−1)^{i+j} det(M without row j, column i) / det M
            let minor = Self::from_fn(n - 1, n - 1, self.nvars, |r, c| {
                let rr = if r < j { r } else { r + 1 };
                let cc = if c < i { c } else { c + 1 };
                self.get(rr, cc).clone()
            });
            let cof = minor.det().mul_ref(&inv_det);
            if (i + j) % 2 == 0 {
                cof
            } else {
                cof.neg_ref()
            }
        }))
    }

    /// Rank over the rational-function field.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<RatFun>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let pivot_inv = m[rank][col].inv().unwrap();
            for r in rank + 1..self.rows {
                if m[r][col].is_zero() {
                    continue;
                }
                let f = m[r][col].mul_ref(&pivot_inv);
                for c in col..self.cols {
                    let t = f.mul_ref(&m[rank][c]);
                    m[r][c] = m[r][c].sub_ref(&t);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let cells: Vec<String> =
                    self.row(i).iter().map(|e| e.display_with(names)).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

fn bareiss_det(mut m: Vec<Vec<MultiPoly>>, nvars: usize) -> MultiPoly {
    let n = m.len();
    let mut sign = false;
    let mut prev = MultiPoly::one(nvars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return MultiPoly::zero(nvars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = m[i][j]
                    .mul_ref(&m[k][k])
                    .sub_ref(&m[i][k].mul_ref(&m[k][j]));
                m[i][j] = if prev.is_one() {
                    t
                } else {
                    t.div_exact(&prev).expect("Bareiss division is exact")
                };
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        -&d
    } else {
        d
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("v{i}")).collect();
        write!(f, "{}", self.display_with(&names))
    }
}
