//! Levi-Civita connection, Riemann and Ricci tensors, constant-curvature test.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{delta, Connection, TensorField, Variance};
use crate::error::{Error, Result};
use crate::ratfun::{Mat, MultiPoly, RatFun};

/// `Γ^i_{jk} = ½ g^{is}(∂_j g_{sk} + ∂_k g_{sj} − ∂_s g_{jk})`.
///
/// Metricity `∇g = 0` is asserted on the result.
pub fn christoffel(g: &Mat) -> Result<Connection> {
    let c = christoffel_unchecked(g)?;
    let t = TensorField::from_mat(g, [Variance::Down, Variance::Down]);
    assert!(
        t.covariant_derivative(&c)?.is_zero(),
        "Levi-Civita connection failed metricity"
    );
    Ok(c)
}

/// Same as [`christoffel`] without the metricity postcondition.
pub fn christoffel_unchecked(g: &Mat) -> Result<Connection> {
    if !g.is_symmetric() {
        return Err(Error::Precondition("metric is not symmetric".into()));
    }
    let ginv = g.inverse().ok_or(Error::DegenerateMetric)?;
    let n = g.rows();
    let nv = g.nvars();
    if ginv.entries().iter().all(RatFun::is_polynomial) {
        return Ok(christoffel_polynomial(&ginv));
    }
    let dg: Vec<Mat> = (0..n).map(|v| g.derivative(v)).collect();
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    // First kind: Γ_{s,jk}.
    let mut first = vec![RatFun::zero(nv); n * n * n];
    for s in 0..n {
        for j in 0..n {
            for k in j..n {
                let v = dg[j]
                    .get(s, k)
                    .add_ref(dg[k].get(s, j))
                    .sub_ref(dg[s].get(j, k))
                    .scale(&half);
                first[(s * n + j) * n + k] = v.clone();
                first[(s * n + k) * n + j] = v;
            }
        }
    }
    let mut gamma = vec![RatFun::zero(nv); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let mut acc = RatFun::zero(nv);
                for s in 0..n {
                    let a = ginv.get(i, s);
                    let b = &first[(s * n + j) * n + k];
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add_ref(&a.mul_ref(b));
                    }
                }
                gamma[(i * n + j) * n + k] = acc.clone();
                gamma[(i * n + k) * n + j] = acc;
            }
        }
    }
    Ok(Connection {
        dim: n,
        nvars: nv,
        gamma,
    })
}

/// Numerators of a matrix with polynomial entries.
fn poly_entries(m: &Mat) -> Vec<MultiPoly> {
    m.entries().iter().map(|e| e.numer().clone()).collect()
}

fn neg(p: &MultiPoly) -> MultiPoly {
    p.scale(&BigRational::from_integer(BigInt::from(-1)))
}

/// Adjugate and determinant of a polynomial matrix, row-major.
fn poly_adjugate(m: &Mat) -> (Vec<MultiPoly>, MultiPoly) {
    let n = m.rows();
    let nv = m.nvars();
    let adj: Vec<MultiPoly> = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let minor = Mat::from_fn(n - 1, n - 1, nv, |r, c| {
                let rr = if r < j { r } else { r + 1 };
                let cc = if c < i { c } else { c + 1 };
                m.get(rr, cc).clone()
            });
            let d = minor.det().numer().clone();
            if (i + j) % 2 == 0 {
                d
            } else {
                neg(&d)
            }
        })
        .collect();
    let p = poly_entries(m);
    let det = (0..n).fold(MultiPoly::zero(nv), |acc, j| acc.add_ref(&p[j].mul_ref(&adj[j * n])));
    (adj, det)
}

/// Constant-curvature test for a metric with polynomial inverse `P`,
/// carried out on polynomial numerators only.
///
/// With `Γ^{ij}_k = −P^{is}Γ^j_{sk} = ½∂_kP^{ij} + ½(P^{is}∂_sP^{ja} − P^{js}∂_sP^{ia})g_{ak}`
/// the tensor
/// `T^{ijk}_l = P^{is}(∂_sΓ^{jk}_l − ∂_lΓ^{jk}_s) − Γ^{ij}_sΓ^{sk}_l + Γ^{ik}_sΓ^{sj}_l`
/// equals `−P^{is}P^{jt}R^k_{tsl}`, which for constant curvature `K` is
/// `K(δ^k_l P^{ij} − δ^j_l P^{ik})`. Writing `g = A/D` with `A = adj P`,
/// `Γ^{ij}_k = G^{ij}_k/(2D)` and `4D²·T` is a polynomial.
///
/// Returns the verdict when the curvature is constant and `None` otherwise.
fn polynomial_inverse_class(ginv: &Mat) -> Option<CurvatureVerdict> {
    let n = ginv.rows();
    let nv = ginv.nvars();
    let p = poly_entries(ginv);
    let (adj, det) = poly_adjugate(ginv);
    let dp: Vec<Vec<MultiPoly>> = (0..n)
        .map(|v| p.iter().map(|e| e.derivative(v)).collect())
        .collect();
    let idx3 = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    // C^{ija} = P^{is}∂_sP^{ja} − P^{js}∂_sP^{ia}.
    let mut c = vec![MultiPoly::zero(nv); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for a in 0..n {
                let mut acc = MultiPoly::zero(nv);
                for s in 0..n {
                    if !p[i * n + s].is_zero() && !dp[s][j * n + a].is_zero() {
                        acc = acc.add_ref(&p[i * n + s].mul_ref(&dp[s][j * n + a]));
                    }
                    if !p[j * n + s].is_zero() && !dp[s][i * n + a].is_zero() {
                        acc = acc.sub_ref(&p[j * n + s].mul_ref(&dp[s][i * n + a]));
                    }
                }
                c[idx3(i, j, a)] = acc;
            }
        }
    }
    let mut gg = vec![MultiPoly::zero(nv); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = det.mul_ref(&dp[k][i * n + j]);
                for a in 0..n {
                    if !c[idx3(i, j, a)].is_zero() && !adj[a * n + k].is_zero() {
                        acc = acc.add_ref(&c[idx3(i, j, a)].mul_ref(&adj[a * n + k]));
                    }
                }
                gg[idx3(i, j, k)] = acc;
            }
        }
    }
    let ddet: Vec<MultiPoly> = (0..n).map(|v| det.derivative(v)).collect();
    let dgg: Vec<Vec<MultiPoly>> = (0..n)
        .map(|v| gg.iter().map(|e| e.derivative(v)).collect())
        .collect();
    let two = BigRational::from_integer(BigInt::from(2));
    let numerator = |i: usize, j: usize, k: usize, l: usize| {
        let mut acc = MultiPoly::zero(nv);
        for s in 0..n {
            let pis = &p[i * n + s];
            if !pis.is_zero() {
                let inner = det
                    .mul_ref(&dgg[s][idx3(j, k, l)].sub_ref(&dgg[l][idx3(j, k, s)]))
                    .sub_ref(&gg[idx3(j, k, l)].mul_ref(&ddet[s]))
                    .add_ref(&gg[idx3(j, k, s)].mul_ref(&ddet[l]));
                acc = acc.add_ref(&pis.mul_ref(&inner).scale(&two));
            }
            acc = acc
                .sub_ref(&gg[idx3(i, j, s)].mul_ref(&gg[idx3(s, k, l)]))
                .add_ref(&gg[idx3(i, k, s)].mul_ref(&gg[idx3(s, j, l)]));
        }
        acc
    };
    let four_d2 = det.mul_ref(&det).scale(&BigRational::from_integer(BigInt::from(4)));
    // K from (i, j, k, l) = (i, 1, 0, 0), where the shape is P^{i1}.
    let i0 = (0..n).find(|&i| !p[i * n + 1].is_zero())?;
    let k = RatFun::new(numerator(i0, 1, 0, 0), four_d2.mul_ref(&p[i0 * n + 1]))?;
    if !k.is_constant_in(n) {
        return None;
    }
    let (kn, kd) = (k.numer(), k.denom());
    let scaled = four_d2.mul_ref(kn);
    for i in 0..n {
        for j in 0..n {
            for kk in 0..n {
                for l in 0..n {
                    let mut shape = MultiPoly::zero(nv);
                    if kk == l {
                        shape = shape.add_ref(&p[i * n + j]);
                    }
                    if j == l {
                        shape = shape.sub_ref(&p[i * n + kk]);
                    }
                    let lhs = numerator(i, j, kk, l).mul_ref(kd);
                    let rhs = if shape.is_zero() { shape } else { scaled.mul_ref(&shape) };
                    if lhs != rhs {
                        return None;
                    }
                }
            }
        }
    }
    Some(CurvatureVerdict::from_constant(k))
}

/// Connection of a metric whose inverse `P = g⁻¹` is polynomial. With
/// `A = adj P` and `D = det P`, `∂g = −g(∂P)g` gives
/// `Γ^i_{jk} = (−D(∂_jP·A)^i_k − D(∂_kP·A)^i_j + P^{is}(A·∂_sP·A)_{jk}) / (2D²)`,
/// so every component needs a single reduction.
fn christoffel_polynomial(ginv: &Mat) -> Connection {
    let n = ginv.rows();
    let nv = ginv.nvars();
    let p = poly_entries(ginv);
    let (adj, det) = poly_adjugate(ginv);
    let mat_mul = |a: &[MultiPoly], b: &[MultiPoly]| -> Vec<MultiPoly> {
        (0..n * n)
            .map(|idx| {
                let (i, k) = (idx / n, idx % n);
                (0..n).fold(MultiPoly::zero(nv), |acc, s| {
                    let (x, y) = (&a[i * n + s], &b[s * n + k]);
                    if x.is_zero() || y.is_zero() {
                        acc
                    } else {
                        acc.add_ref(&x.mul_ref(y))
                    }
                })
            })
            .collect()
    };
    let dp: Vec<Vec<MultiPoly>> = (0..n)
        .map(|v| p.iter().map(|e| e.derivative(v)).collect())
        .collect();
    let b: Vec<Vec<MultiPoly>> = dp.iter().map(|d| mat_mul(d, &adj)).collect();
    let m: Vec<Vec<MultiPoly>> = dp.iter().map(|d| mat_mul(&mat_mul(&adj, d), &adj)).collect();
    let den = det.mul_ref(&det).scale(&BigRational::from_integer(BigInt::from(2)));
    let mut gamma = vec![RatFun::zero(nv); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let num = b[j][i * n + k].add_ref(&b[k][i * n + j]).mul_ref(&det);
                let mut num = neg(&num);
                for s in 0..n {
                    if !p[i * n + s].is_zero() {
                        num = num.add_ref(&p[i * n + s].mul_ref(&m[s][j * n + k]));
                    }
                }
                let v = RatFun::new(num, den.clone()).expect("nondegenerate metric");
                gamma[(i * n + k) * n + j] = v.clone();
                gamma[(i * n + j) * n + k] = v;
            }
        }
    }
    Connection {
        dim: n,
        nvars: nv,
        gamma,
    }
}

/// Single component `R^ℓ_{ijk}`.
pub fn riemann_entry(c: &Connection, l: usize, i: usize, j: usize, k: usize) -> RatFun {
    let mut acc = c.get(l, i, k).derivative(j).sub_ref(&c.get(l, i, j).derivative(k));
    for s in 0..c.dim() {
        let (a, b) = (c.get(l, j, s), c.get(s, i, k));
        if !a.is_zero() && !b.is_zero() {
            acc = acc.add_ref(&a.mul_ref(b));
        }
        let (a, b) = (c.get(l, k, s), c.get(s, i, j));
        if !a.is_zero() && !b.is_zero() {
            acc = acc.sub_ref(&a.mul_ref(b));
        }
    }
    acc
}

/// `R^ℓ_{ijk} = ∂_jΓ^ℓ_{ik} − ∂_kΓ^ℓ_{ij} + Γ^ℓ_{js}Γ^s_{ik} − Γ^ℓ_{ks}Γ^s_{ij}`.
pub fn riemann(c: &Connection) -> TensorField {
    let n = c.dim();
    let nv = c.nvars();
    let mut r = TensorField::zeros(
        n,
        nv,
        vec![Variance::Up, Variance::Down, Variance::Down, Variance::Down],
    );
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in j + 1..n {
                    let v = riemann_entry(c, l, i, j, k);
                    r.set(&[l, i, k, j], v.neg_ref());
                    r.set(&[l, i, j, k], v);
                }
            }
        }
    }
    r
}

/// `R^{ℓi}_{jk} = g^{is} R^ℓ_{sjk}`.
pub fn raise_second(r: &TensorField, ginv: &Mat) -> TensorField {
    let n = r.dim();
    TensorField::from_fn(
        n,
        r.nvars(),
        vec![Variance::Up, Variance::Up, Variance::Down, Variance::Down],
        |idx| {
            let (l, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
            let mut acc = RatFun::zero(r.nvars());
            for s in 0..n {
                let a = ginv.get(i, s);
                let b = r.get(&[l, s, j, k]);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.add_ref(&a.mul_ref(b));
                }
            }
            acc
        },
    )
}

/// Classification of a metric's curvature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurvatureVerdict {
    Flat,
    /// Constant curvature `K ≠ 0` (free of coordinates; parameters allowed).
    ConstantCurvature(RatFun),
    /// Not of constant curvature; `witness` is a raised component
    /// `(i, j, k, m)` (0-based) violating the constant-curvature form.
    NonConstant { witness: [usize; 4] },
}

impl CurvatureVerdict {
    /// `Flat` for zero, `ConstantCurvature(k)` otherwise.
    pub fn from_constant(k: RatFun) -> Self {
        if k.is_zero() {
            CurvatureVerdict::Flat
        } else {
            CurvatureVerdict::ConstantCurvature(k)
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, CurvatureVerdict::Flat)
    }

    pub fn is_constant(&self) -> bool {
        !matches!(self, CurvatureVerdict::NonConstant { .. })
    }

    /// `K` for constant-curvature verdicts (zero when flat).
    pub fn constant(&self, nvars: usize) -> Option<RatFun> {
        match self {
            CurvatureVerdict::Flat => Some(RatFun::zero(nvars)),
            CurvatureVerdict::ConstantCurvature(k) => Some(k.clone()),
            CurvatureVerdict::NonConstant { .. } => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            CurvatureVerdict::Flat => "flat",
            CurvatureVerdict::ConstantCurvature(_) => "constant",
            CurvatureVerdict::NonConstant { .. } => "non-constant",
        }
    }
}

impl fmt::Display for CurvatureVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvatureVerdict::Flat => write!(f, "flat"),
            CurvatureVerdict::ConstantCurvature(k) => write!(f, "constant curvature {k}"),
            CurvatureVerdict::NonConstant { witness } => write!(
                f,
                "non-constant (component R^{}{}_{}{})",
                witness[0] + 1,
                witness[1] + 1,
                witness[2] + 1,
                witness[3] + 1
            ),
        }
    }
}

/// Classifies the curvature of `g` against
/// `R^{ij}_{km} = K(δ^i_kδ^j_m − δ^i_mδ^j_k)`, reading `K` off `R^{12}_{12}`.
pub fn curvature_class(g: &Mat) -> Result<CurvatureVerdict> {
    if !g.is_symmetric() {
        return Err(Error::Precondition("metric is not symmetric".into()));
    }
    if super::jet::nonconstant_certificate(g) {
        return Ok(CurvatureVerdict::NonConstant {
            witness: [0, 1, 0, 1],
        });
    }
    let ginv = g.inverse().ok_or(Error::DegenerateMetric)?;
    if ginv.entries().iter().all(RatFun::is_polynomial) {
        if let Some(v) = polynomial_inverse_class(&ginv) {
            return Ok(v);
        }
    }
    let c = christoffel_unchecked(g)?;
    // A non-constant R^{12}_{12} settles the verdict without the full tensor.
    let mut k = RatFun::zero(g.nvars());
    for s in 0..g.rows() {
        let a = ginv.get(1, s);
        if !a.is_zero() {
            k = k.add_ref(&a.mul_ref(&riemann_entry(&c, 0, s, 0, 1)));
        }
    }
    if !k.is_constant_in(g.rows()) {
        return Ok(CurvatureVerdict::NonConstant {
            witness: [0, 1, 0, 1],
        });
    }
    Ok(classify_raised(&raise_second(&riemann(&c), &ginv)))
}

/// Classification from an already raised curvature tensor.
pub fn classify_raised(r: &TensorField) -> CurvatureVerdict {
    let n = r.dim();
    let nv = r.nvars();
    let k = r.get(&[0, 1, 0, 1]).clone();
    if !k.is_constant_in(n) {
        return CurvatureVerdict::NonConstant {
            witness: [0, 1, 0, 1],
        };
    }
    for i in 0..n {
        for j in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let shape = delta(i, a, nv)
                        .mul_ref(&delta(j, b, nv))
                        .sub_ref(&delta(i, b, nv).mul_ref(&delta(j, a, nv)));
                    if *r.get(&[i, j, a, b]) != shape.mul_ref(&k) {
                        return CurvatureVerdict::NonConstant {
                            witness: [i, j, a, b],
                        };
                    }
                }
            }
        }
    }
    if k.is_zero() {
        CurvatureVerdict::Flat
    } else {
        CurvatureVerdict::ConstantCurvature(k)
    }
}

/// Ricci tensor `R_{ik} = R^j_{ijk}`.
pub fn ricci(r: &TensorField) -> Mat {
    let n = r.dim();
    Mat::from_fn(n, n, r.nvars(), |i, k| {
        let mut acc = RatFun::zero(r.nvars());
        for j in 0..n {
            acc = acc.add_ref(r.get(&[j, i, j, k]));
        }
        acc
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EinsteinVerdict {
    /// `Ric = (S/n) g`; `constant` records whether `S` is free of coordinates.
    Einstein { scalar: RatFun, constant: bool },
    NotEinstein { witness: (usize, usize) },
}

impl EinsteinVerdict {
    pub fn is_einstein(&self) -> bool {
        matches!(self, EinsteinVerdict::Einstein { .. })
    }
}

/// Einstein test `R_{ij} − (S/n) g_{ij} = 0` with `S = g^{ij}R_{ij}`.
pub fn ricci_einstein(g: &Mat) -> Result<EinsteinVerdict> {
    let ginv = g.inverse().ok_or(Error::DegenerateMetric)?;
    let c = christoffel_unchecked(g)?;
    let ric = ricci(&riemann(&c));
    let n = g.rows();
    let s = ginv.mul_ref(&ric).trace();
    let factor = s.scale(&BigRational::new(1.into(), BigInt::from(n)));
    let resid = ric.sub_ref(&g.scale(&factor));
    for i in 0..n {
        for j in 0..n {
            if !resid.get(i, j).is_zero() {
                return Ok(EinsteinVerdict::NotEinstein { witness: (i, j) });
            }
        }
    }
    let constant = s.is_constant_in(n);
    Ok(EinsteinVerdict::Einstein { scalar: s, constant })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> RatFun {
        RatFun::var(i, 2)
    }

    #[test]
    fn constant_metric_is_flat() {
        let g = Mat::from_ints(&[vec![2, 1], vec![1, 3]], 2);
        assert!(christoffel(&g).unwrap().is_zero());
        assert_eq!(curvature_class(&g).unwrap(), CurvatureVerdict::Flat);
    }

    #[test]
    fn round_sphere_has_unit_curvature() {
        // Stereographic sphere: g = 4/(1 + x² + y²)² · Id.
        let r2 = &(&x(0) * &x(0)) + &(&x(1) * &x(1));
        let conf = RatFun::from_int(4, 2)
            .div_ref(&(&RatFun::one(2) + &r2).pow(2))
            .unwrap();
        let g = Mat::identity(2, 2).scale(&conf);
        assert_eq!(
            curvature_class(&g).unwrap(),
            CurvatureVerdict::ConstantCurvature(RatFun::one(2))
        );
        match ricci_einstein(&g).unwrap() {
            EinsteinVerdict::Einstein { scalar, constant } => {
                assert!(constant);
                assert_eq!(scalar, RatFun::from_int(2, 2));
            }
            other => panic!("{other:?}"),
        }
    }

    fn slow_class(g: &Mat) -> CurvatureVerdict {
        let ginv = g.inverse().unwrap();
        classify_raised(&raise_second(&riemann(&christoffel(g).unwrap()), &ginv))
    }

    #[test]
    fn polynomial_inverse_path_agrees_with_full_tensor() {
        let y = RatFun::var(1, 2);
        // Half-plane: g⁻¹ = y² Id, curvature −1.
        let half = Mat::identity(2, 2).scale(&y.pow(2).inv().unwrap());
        // Sphere in three stereographic coordinates: g⁻¹ = (1 + |x|²)²/4 Id.
        let r2 = (0..3).fold(RatFun::one(3), |acc, i| acc.add_ref(&RatFun::var(i, 3).pow(2)));
        let sphere = Mat::identity(3, 3).scale(&RatFun::from_int(4, 3).div_ref(&r2.pow(2)).unwrap());
        for (g, k) in [(half, -1), (sphere, 1)] {
            let fast = polynomial_inverse_class(&g.inverse().unwrap()).unwrap();
            assert_eq!(fast, CurvatureVerdict::ConstantCurvature(RatFun::from_int(k, g.nvars())));
            assert_eq!(fast, slow_class(&g));
        }
        // g⁻¹ = diag(1 + y², 1) is not of constant curvature.
        let ginv = Mat::diagonal(vec![&RatFun::one(2) + &x(1).pow(2), RatFun::one(2)], 2);
        assert_eq!(polynomial_inverse_class(&ginv), None);
        assert!(!slow_class(&ginv.inverse().unwrap()).is_constant());
    }
}
