//! Catalog of concrete compatible pairs with their expected curvature
//! chains, plus the structural checks tied to them.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geodesic::{
    build_pencil_operator, compat_curvature_identities, is_geodesically_compatible,
    sinjukov_swap, PencilData,
};
use crate::nijenhuis::{is_nijenhuis, verify_trace_det_identity};
use crate::ratfun::gcd::gcd;
use crate::ratfun::{char_coeffs, Mat, MultiPoly, RatFun};
use crate::tensor::{jacobian, pushforward_components, CurvatureVerdict, TensorField, Variance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExampleId {
    /// `g = Σ ∏_{j≠i}(xⁱ−xʲ)(dxⁱ)²`, `L = diag(x¹..xⁿ)`.
    LiouvilleLC(usize),
    /// Hankel-type `g⁻¹` with the companion operator.
    Companion(usize),
    /// Antidiagonal `g0`, shifted antidiagonal `a`, `b = e_m`, `K = 0`.
    JordanFamily(usize, usize),
    /// Euclidean `g0`, `a = Id`, `b = e_1`, `K = 0`.
    SinjukovChain(usize),
    /// Euclidean `g0` with random small integer data.
    PencilRandom(u64, usize),
}

impl ExampleId {
    pub fn dim(&self) -> usize {
        match *self {
            ExampleId::LiouvilleLC(n)
            | ExampleId::Companion(n)
            | ExampleId::JordanFamily(n, _)
            | ExampleId::SinjukovChain(n)
            | ExampleId::PencilRandom(_, n) => n,
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n < 2 {
            return Err(Error::Precondition(format!("{self}: dimension must be at least 2")));
        }
        if let ExampleId::JordanFamily(_, m) = *self {
            if m < 1 || m > n {
                return Err(Error::Precondition(format!("{self}: need 1 ≤ m ≤ n")));
            }
        }
        Ok(())
    }

    /// The members exercised by the default corpus run.
    pub fn standard() -> Vec<ExampleId> {
        vec![
            ExampleId::LiouvilleLC(2),
            ExampleId::LiouvilleLC(3),
            ExampleId::Companion(2),
            ExampleId::Companion(3),
            ExampleId::JordanFamily(2, 1),
            ExampleId::JordanFamily(3, 1),
            ExampleId::JordanFamily(4, 3),
            ExampleId::SinjukovChain(2),
            ExampleId::SinjukovChain(3),
            ExampleId::PencilRandom(1, 2),
            ExampleId::PencilRandom(2, 3),
        ]
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleId::LiouvilleLC(n) => write!(f, "LiouvilleLC({n})"),
            ExampleId::Companion(n) => write!(f, "Companion({n})"),
            ExampleId::JordanFamily(n, m) => write!(f, "JordanFamily({n},{m})"),
            ExampleId::SinjukovChain(n) => write!(f, "SinjukovChain({n})"),
            ExampleId::PencilRandom(s, n) => write!(f, "PencilRandom({s},{n})"),
        }
    }
}

impl FromStr for ExampleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Document(format!("unknown example `{s}`"));
        let s = s.trim();
        let open = s.find('(').ok_or_else(bad)?;
        let name = &s[..open];
        let args = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let nums: Vec<u64> = args
            .split(',')
            .map(|a| a.trim().parse::<u64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let id = match (name, nums.as_slice()) {
            ("LiouvilleLC", [n]) => ExampleId::LiouvilleLC(*n as usize),
            ("Companion", [n]) => ExampleId::Companion(*n as usize),
            ("JordanFamily", [n, m]) => ExampleId::JordanFamily(*n as usize, *m as usize),
            ("SinjukovChain", [n]) => ExampleId::SinjukovChain(*n as usize),
            ("PencilRandom", [seed, n]) => ExampleId::PencilRandom(*seed, *n as usize),
            _ => return Err(bad()),
        };
        id.validate()?;
        Ok(id)
    }
}

/// Expected curvature class of one chain metric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expected {
    Flat,
    /// Nonzero constant curvature, with its value when known exactly.
    Constant(Option<BigRational>),
    NonConstant,
}

impl Expected {
    pub fn matches(&self, v: &CurvatureVerdict) -> bool {
        match (self, v) {
            (Expected::Flat, CurvatureVerdict::Flat) => true,
            (Expected::NonConstant, CurvatureVerdict::NonConstant { .. }) => true,
            (Expected::Constant(None), CurvatureVerdict::ConstantCurvature(_)) => true,
            (Expected::Constant(Some(k)), CurvatureVerdict::ConstantCurvature(f)) => {
                f.constant_value().as_ref() == Some(k)
            }
            _ => false,
        }
    }
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Flat => write!(f, "flat"),
            Expected::Constant(Some(k)) => write!(f, "constant curvature {k}"),
            Expected::Constant(None) => write!(f, "nonzero constant curvature"),
            Expected::NonConstant => write!(f, "non-constant"),
        }
    }
}

/// A catalog member: the pair, its pencil data when it has any, and the
/// expected verdicts for `g·L^{−k}`, `k = 0, 1, …`.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub id: ExampleId,
    pub g: Mat,
    pub l: Mat,
    pub pencil: Option<PencilData>,
    pub expected: Option<Vec<Expected>>,
}

fn x(i: usize, nv: usize) -> RatFun {
    RatFun::var(i, nv)
}

fn antidiagonal(n: usize, shift: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i + j + 1 == n + shift)).collect())
        .collect()
}

fn unit(n: usize, m: usize) -> Vec<i64> {
    (0..n).map(|i| i64::from(i + 1 == m)).collect()
}

fn identity_rows(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

fn chain_shape(flat: usize, tail: Expected) -> Vec<Expected> {
    let mut v = vec![Expected::Flat; flat];
    v.push(tail);
    v.push(Expected::NonConstant);
    v
}

/// Liouville-type diagonal pair.
pub fn liouville(n: usize) -> (Mat, Mat) {
    let g = Mat::diagonal(
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i)
                    .fold(RatFun::one(n), |acc, j| acc.mul_ref(&x(i, n).sub_ref(&x(j, n))))
            })
            .collect(),
        n,
    );
    (g, Mat::diagonal((0..n).map(|i| x(i, n)).collect(), n))
}

/// Companion operator with the Hankel-type contravariant metric.
pub fn companion(n: usize) -> (Mat, Mat) {
    let ginv = Mat::from_fn(n, n, n, |i, j| {
        let s = i + j + 2;
        if s == n + 1 {
            RatFun::from_int(-1, n)
        } else if s > n + 1 {
            x(s - n - 2, n)
        } else {
            RatFun::zero(n)
        }
    });
    let l = Mat::from_fn(n, n, n, |i, j| {
        if j == 0 {
            x(i, n)
        } else if j == i + 1 {
            RatFun::one(n)
        } else {
            RatFun::zero(n)
        }
    });
    (ginv.inverse().expect("Hankel matrix is invertible"), l)
}

pub fn build(id: ExampleId) -> Result<CorpusEntry> {
    id.validate()?;
    let n = id.dim();
    let quarter = BigRational::new(BigInt::from(-1), BigInt::from(4));
    let from_pencil = |p: PencilData, expected| {
        let op = build_pencil_operator(&p, n);
        CorpusEntry {
            id,
            g: p.g0_mat(n),
            l: op.operator,
            pencil: Some(p),
            expected,
        }
    };
    Ok(match id {
        ExampleId::LiouvilleLC(_) => {
            let (g, l) = liouville(n);
            CorpusEntry {
                id,
                g,
                l,
                pencil: None,
                expected: Some(chain_shape(n + 1, Expected::Constant(Some(quarter)))),
            }
        }
        ExampleId::Companion(_) => {
            let (g, l) = companion(n);
            CorpusEntry {
                id,
                g,
                l,
                pencil: None,
                expected: Some(chain_shape(n + 1, Expected::Constant(None))),
            }
        }
        ExampleId::JordanFamily(_, m) => {
            let p = PencilData::from_ints(&antidiagonal(n, 0), &antidiagonal(n, 1), &unit(n, m), 0)?;
            let expected = if 2 * m >= n + 2 {
                Some(vec![Expected::Flat; 7])
            } else if m == 1 {
                Some(chain_shape(n + 1, Expected::Constant(None)))
            } else {
                None
            };
            from_pencil(p, expected)
        }
        ExampleId::SinjukovChain(_) => {
            let id_rows = identity_rows(n);
            let p = PencilData::from_ints(&id_rows, &id_rows, &unit(n, 1), 0)?;
            from_pencil(p, Some(chain_shape(2, Expected::Constant(None))))
        }
        ExampleId::PencilRandom(seed, _) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = loop {
                let p = PencilData::random(&mut rng, n);
                let op = build_pencil_operator(&p, n);
                if !op.operator.det().is_zero() {
                    break p;
                }
            };
            from_pencil(p, None)
        }
    })
}

/// Exact structural checks of one member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberChecks {
    pub compatible: bool,
    pub nijenhuis: bool,
    pub trace_det_identity: bool,
    pub swap: bool,
    /// `K` from the Hessian of `λ`, already matched against `gL⁻¹`.
    pub k: Option<RatFun>,
    pub magic: bool,
}

impl MemberChecks {
    pub fn all_pass(&self) -> bool {
        self.compatible
            && self.nijenhuis
            && self.trace_det_identity
            && self.swap
            && self.magic
            && self.k.is_some()
    }
}

pub fn verify_member(e: &CorpusEntry) -> Result<MemberChecks> {
    let compatible = is_geodesically_compatible(&e.g, &e.l)?;
    let nijenhuis = is_nijenhuis(&e.l);
    let trace_det_identity = nijenhuis && verify_trace_det_identity(&e.l)?;
    let swap = compatible && sinjukov_swap(&e.g, &e.l)?;
    let (k, magic) = if compatible {
        let cc = compat_curvature_identities(&e.g, &e.l)?;
        (cc.k, cc.magic_holds)
    } else {
        (None, false)
    };
    Ok(MemberChecks {
        compatible,
        nijenhuis,
        trace_det_identity,
        swap,
        k,
        magic,
    })
}

/// `σ_k(x)` for `det(t − diag(x)) = tⁿ − σ_1tⁿ⁻¹ − … − σ_n`.
pub fn sigma_map(n: usize) -> Vec<RatFun> {
    char_coeffs(&liouville(n).1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaTransform {
    pub metric_sign: Option<i32>,
    pub operator_sign: Option<i32>,
    /// `char_coeffs` of the pushed operator equals `σ(x)`.
    pub sigma_consistent: bool,
}

impl SigmaTransform {
    pub fn holds(&self) -> bool {
        self.metric_sign.is_some() && self.operator_sign.is_some() && self.sigma_consistent
    }
}

fn sign_match(a: &Mat, b: &Mat) -> Option<i32> {
    if a == b {
        Some(1)
    } else if *a == b.scale(&RatFun::from_int(-1, a.nvars())) {
        Some(-1)
    } else {
        None
    }
}

/// Pushes the Liouville pair along `x ↦ σ(x)` and compares with the
/// companion pair up to one global sign per tensor.
pub fn verify_sigma_transform(n: usize) -> Result<SigmaTransform> {
    if !(2..=3).contains(&n) {
        return Err(Error::Precondition(format!("sigma transform supported for n = 2, 3, got {n}")));
    }
    let (g, l) = liouville(n);
    let sigma = sigma_map(n);
    if jacobian(&sigma).det().is_zero() {
        return Err(Error::SingularOperator);
    }
    let pg = pushforward_components(&TensorField::from_mat(&g, [Variance::Down, Variance::Down]), &sigma)?
        .to_mat();
    let pl = pushforward_components(&TensorField::from_mat(&l, [Variance::Up, Variance::Down]), &sigma)?
        .to_mat();
    let (cg, cl) = companion(n);
    let at_sigma = |m: &Mat| m.substitute(&sigma).ok_or(Error::DivisionByZero);
    let cg = at_sigma(&cg)?;
    let cl = at_sigma(&cl)?;
    Ok(SigmaTransform {
        metric_sign: sign_match(&pg, &cg),
        operator_sign: sign_match(&pl, &cl),
        sigma_consistent: char_coeffs(&pl) == sigma,
    })
}

/// `dσ_1 ∧ … ∧ dσ_n ≠ 0` for the characteristic coefficients of `L`.
pub fn differentially_nondegenerate(l: &Mat) -> bool {
    !jacobian(&char_coeffs(l)).det().is_zero()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanReport {
    /// `σ_1..σ_n`.
    pub sigmas: Vec<RatFun>,
    /// Degree in `t` of `gcd(p, ∂_t p)`: eigenvalue repetitions counted.
    pub repeated: u32,
    /// Degree of the square-free part `q`: distinct eigenvalues.
    pub distinct: u32,
    /// `rank q(L)`; equals the number of 2×2 Jordan blocks when
    /// `q(L)² = 0`.
    pub defect: usize,
    pub max_block_two: bool,
    /// Some coefficient of `q` depends on the coordinates.
    pub nonconstant_eigenvalues: bool,
}

impl JordanReport {
    pub fn diagonalizable(&self) -> bool {
        self.defect == 0
    }

    /// Number of 2×2 blocks, when no larger block occurs.
    pub fn jordan_two_blocks(&self) -> Option<usize> {
        self.max_block_two.then_some(self.defect)
    }
}

/// Eigenvalue multiplicities and Jordan structure of a polynomial operator,
/// from the characteristic polynomial `p(t)` and its square-free part.
pub fn jordan_structure(l: &Mat) -> Result<JordanReport> {
    let n = l.rows();
    let nv = l.nvars();
    let sigmas = char_coeffs(l);
    let tv = nv;
    let t = RatFun::var(tv, nv + 1);
    let mut p = t.pow(n as u32);
    for (k, s) in sigmas.iter().enumerate() {
        p = p.sub_ref(&s.extend(nv + 1).mul_ref(&t.pow((n - k - 1) as u32)));
    }
    if !p.is_polynomial() {
        return Err(Error::Precondition("operator is not polynomial".into()));
    }
    let pp: &MultiPoly = p.numer();
    let dp = pp.derivative(tv);
    let h = gcd(pp, &dp);
    let q = pp.div_exact(&h).expect("gcd divides");
    let repeated = h.degree_in(tv);
    let distinct = q.degree_in(tv);
    let drop_t: Vec<MultiPoly> = (0..=nv)
        .map(|v| if v < nv { MultiPoly::var(v, nv) } else { MultiPoly::zero(nv) })
        .collect();
    let qcoeffs: Vec<RatFun> = q
        .coeffs_in(tv)
        .into_iter()
        .map(|c| RatFun::from_poly(c.substitute(&drop_t, nv)))
        .collect();
    let nonconstant_eigenvalues = qcoeffs.iter().any(|c| !c.is_constant_in(n));
    let ql = l.poly_eval(&qcoeffs);
    let defect = ql.rank();
    let max_block_two = ql.mul_ref(&ql).is_zero();
    Ok(JordanReport {
        sigmas,
        repeated,
        distinct,
        defect,
        max_block_two,
        nonconstant_eigenvalues,
    })
}

pub fn jordan_structure_check(n: usize, m: usize) -> Result<JordanReport> {
    let e = build(ExampleId::JordanFamily(n, m))?;
    jordan_structure(&e.l)
}

/// The block-diagonal chart of `JordanFamily(4, 3)`.
pub fn jordan_4_3_normal_form() -> (Mat, Mat) {
    let nv = 4;
    let v = |i| x(i, nv);
    let c = |k| RatFun::from_int(k, nv);
    let z = || RatFun::zero(nv);
    let d31 = v(2).sub_ref(&v(0));
    let g = Mat::from_rows(
        vec![
            vec![
                c(2).mul_ref(&c(-2).mul_ref(&v(1)).sub_ref(&c(1))).mul_ref(&d31),
                d31.pow(2),
                z(),
                z(),
            ],
            vec![d31.pow(2), z(), z(), z()],
            vec![
                z(),
                z(),
                c(2).mul_ref(&c(-2).mul_ref(&v(3)).sub_ref(&c(1))).mul_ref(&d31.neg_ref()),
                d31.pow(2),
            ],
            vec![z(), z(), d31.pow(2), z()],
        ],
        nv,
    );
    let l = Mat::from_rows(
        vec![
            vec![v(0), z(), z(), z()],
            vec![c(2).mul_ref(&v(1)).add_ref(&c(1)), v(0), z(), z()],
            vec![z(), z(), v(2), z()],
            vec![z(), z(), c(2).mul_ref(&v(3)).add_ref(&c(1)), v(2)],
        ],
        nv,
    );
    (g, l)
}
