//! Documents, check execution and verification reports.

mod document;
mod report;

pub use document::{Inequality, NamedTensor, TensorDocument};
pub use report::{emit_report, CheckResult, Format, Report, Summary, Verdict, Witness};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{build, verify_member, ExampleId};
use crate::error::{Error, Result};
use crate::geodesic::{compatibility_residual, conify, flatness_chain};
use crate::hydro::{
    casimir_classify, commute_report, conservation_densities, density_flow_identity,
    flow_operators, poisson_report, rational_density, sqrtdet_casimir_check,
};
use crate::nijenhuis::torsion;
use crate::ratfun::{Mat, RatFun};
use crate::sim::{
    conservation_drift, evolve, max_speed, CompiledFun, CompiledOperator, Grid1D, Profile, Scheme,
};
use crate::tensor::{christoffel_unchecked, curvature_class, riemann_entry, CurvatureVerdict};

/// Grid size, horizon and CFL fraction of the `sim:` check.
const SIM_CELLS: usize = 256;
const SIM_HORIZON: f64 = 0.5;
const SIM_CFL: f64 = 0.5;
/// Relative drift tolerated by the `sim:` check.
pub const SIM_DRIFT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckId {
    Geodesic,
    Nijenhuis,
    Curvature,
    Chain(usize),
    Casimir,
    Flows(usize),
    Poisson,
    Conify,
    Corpus(String),
    Sim(String),
}

impl CheckId {
    /// Checks that need a compatible pair.
    fn needs_compatibility(&self) -> bool {
        matches!(self, CheckId::Chain(_) | CheckId::Casimir)
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckId::Geodesic => write!(f, "geodesic"),
            CheckId::Nijenhuis => write!(f, "nijenhuis"),
            CheckId::Curvature => write!(f, "curvature"),
            CheckId::Chain(k) => write!(f, "chain:{k}"),
            CheckId::Casimir => write!(f, "casimir"),
            CheckId::Flows(n) => write!(f, "flows:{n}"),
            CheckId::Poisson => write!(f, "poisson"),
            CheckId::Conify => write!(f, "conify"),
            CheckId::Corpus(name) => write!(f, "corpus:{name}"),
            CheckId::Sim(profile) => write!(f, "sim:{profile}"),
        }
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let unknown = || Error::UnknownCheck(s.to_string());
        let count = |arg: &str| arg.trim().parse::<usize>().map_err(|_| unknown());
        Ok(match s.split_once(':') {
            None => match s {
                "geodesic" => CheckId::Geodesic,
                "nijenhuis" => CheckId::Nijenhuis,
                "curvature" => CheckId::Curvature,
                "casimir" => CheckId::Casimir,
                "poisson" => CheckId::Poisson,
                "conify" => CheckId::Conify,
                _ => return Err(unknown()),
            },
            Some(("chain", k)) => CheckId::Chain(count(k)?),
            Some(("flows", n)) => match count(n)? {
                0 => return Err(unknown()),
                n => CheckId::Flows(n),
            },
            Some(("corpus", name)) => {
                let id: ExampleId = name.parse()?;
                CheckId::Corpus(id.to_string())
            }
            Some(("sim", profile)) => {
                Profile::named(profile.trim(), 1).map_err(|_| unknown())?;
                CheckId::Sim(profile.trim().to_string())
            }
            _ => return Err(unknown()),
        })
    }
}

/// Splits a comma-separated check list, keeping commas inside parentheses.
pub fn parse_check_list(s: &str) -> Result<Vec<CheckId>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out.into_iter()
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Dependency order with duplicates removed.
pub fn plan(checks: &[CheckId]) -> Vec<CheckId> {
    let mut v = checks.to_vec();
    v.sort();
    v.dedup();
    v
}

fn rational_point(rng: &mut ChaCha8Rng, nv: usize) -> Vec<BigRational> {
    (0..nv)
        .map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(-5i64..=5))))
        .collect()
}

/// `f` at a seeded sample point avoiding its poles.
fn sample(f: &RatFun, names: &[String], seed: u64) -> Option<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..32 {
        let p = rational_point(&mut rng, f.nvars());
        let d = f.denom().eval(&p);
        if d.is_zero() {
            continue;
        }
        let at: Vec<String> = names.iter().zip(&p).map(|(n, v)| format!("{n}={v}")).collect();
        return Some(format!("{} at ({})", f.numer().eval(&p) / d, at.join(", ")));
    }
    None
}

struct Ctx<'a> {
    doc: &'a TensorDocument,
    names: Vec<String>,
    seed: u64,
}

impl Ctx<'_> {
    fn witness(&self, component: Vec<usize>, f: &RatFun) -> Witness {
        Witness {
            component,
            expression: f.display_with(&self.names),
            sample: sample(f, &self.names, self.seed),
        }
    }

    fn show(&self, f: &RatFun) -> String {
        f.display_with(&self.names)
    }
}

fn described(component: Vec<usize>, text: impl Into<String>) -> Witness {
    Witness {
        component,
        expression: text.into(),
        sample: None,
    }
}

fn one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|i| i + 1).collect()
}

fn engine_failure(id: &str, e: &Error) -> CheckResult {
    CheckResult::fail(id, "the check could not be completed", described(Vec::new(), e.to_string()))
}

fn verdict_text(v: &CurvatureVerdict, ctx: &Ctx) -> String {
    match v {
        CurvatureVerdict::ConstantCurvature(k) => format!("constant curvature {}", ctx.show(k)),
        other => other.to_string(),
    }
}

/// `R^{ij}_{km}` of `g` at one component.
fn raised_component(g: &Mat, w: [usize; 4]) -> Result<RatFun> {
    let ginv = g.inverse().ok_or(Error::DegenerateMetric)?;
    let c = christoffel_unchecked(g)?;
    let mut acc = RatFun::zero(g.nvars());
    for s in 0..g.rows() {
        let a = ginv.get(w[1], s);
        if !a.is_zero() {
            acc = acc.add_ref(&a.mul_ref(&riemann_entry(&c, w[0], s, w[2], w[3])));
        }
    }
    Ok(acc)
}

/// The early-exit result is boxed to keep the `Ok` path small.
fn need<T>(v: Result<Option<T>>, id: &str, what: &str) -> std::result::Result<T, Box<CheckResult>> {
    match v {
        Ok(Some(t)) => Ok(t),
        Ok(None) => Err(Box::new(CheckResult::skip(id, format!("document has no {what}")))),
        Err(e) => Err(Box::new(engine_failure(id, &e))),
    }
}

fn check_geodesic(ctx: &Ctx, id: &str, g: &Mat, l: &Mat) -> Result<CheckResult> {
    Ok(match compatibility_residual(g, l)? {
        None => CheckResult::pass(id, "∇_kL_ij = λ_i g_jk + λ_j g_ik holds"),
        Some((w, r)) => CheckResult::fail(
            id,
            format!("compatibility fails at ∇_{}L_{}{}", w[2] + 1, w[0] + 1, w[1] + 1),
            ctx.witness(vec![w[0] + 1, w[1] + 1, w[2] + 1], &r),
        ),
    })
}

fn check_nijenhuis(ctx: &Ctx, id: &str, l: &Mat) -> CheckResult {
    let t = torsion(l);
    match t.first_nonzero() {
        None => CheckResult::pass(id, "Nijenhuis torsion vanishes"),
        Some((idx, v)) => CheckResult::fail(
            id,
            format!("N^{}_{}{} ≠ 0", idx[0] + 1, idx[1] + 1, idx[2] + 1),
            ctx.witness(one_based(&idx), v),
        ),
    }
}

fn check_curvature(ctx: &Ctx, id: &str, g: &Mat) -> Result<CheckResult> {
    let v = curvature_class(g)?;
    Ok(match v {
        CurvatureVerdict::NonConstant { witness } => {
            let r = raised_component(g, witness)?;
            CheckResult::fail(id, v.to_string(), ctx.witness(one_based(&witness), &r))
        }
        _ => CheckResult::pass(id, verdict_text(&v, ctx)),
    })
}

fn check_chain(ctx: &Ctx, id: &str, g: &Mat, l: &Mat, kmax: usize) -> Result<CheckResult> {
    match flatness_chain(g, l, kmax) {
        Ok(r) => {
            let parts: Vec<String> = r
                .entries
                .iter()
                .map(|e| format!("k={}: {}", e.k, verdict_text(&e.verdict, ctx)))
                .collect();
            Ok(CheckResult::pass(id, parts.join("; ")))
        }
        Err(Error::ChainDisagreement {
            k,
            direct,
            criterion,
        }) => Ok(CheckResult::fail(
            id,
            format!("direct verdict and flatness criterion disagree at k = {k}"),
            described(vec![k], format!("direct {direct}, criterion {criterion}")),
        )),
        Err(e) => Err(e),
    }
}

fn check_casimir(ctx: &Ctx, id: &str, g: &Mat, l: &Mat) -> Result<CheckResult> {
    match ctx.doc.density()? {
        Some(h) => {
            let v = casimir_classify(g, l, &rational_density(&h))?;
            Ok(match (v.is_casimir, v.witness) {
                (true, _) => CheckResult::pass(
                    id,
                    format!(
                        "h is a Casimir of g·L⁻¹ with c_h = {}",
                        v.c_h.map(|c| ctx.show(&c)).unwrap_or_default()
                    ),
                ),
                (false, w) => {
                    let comp = w.map(|(i, j)| vec![i + 1, j + 1]).unwrap_or_default();
                    CheckResult::fail(
                        id,
                        "h is not a Casimir of g·L⁻¹",
                        described(comp, "L^{si}∇_s∇_j h ≠ ρδ^i_j"),
                    )
                }
            })
        }
        None => {
            let c = sqrtdet_casimir_check(g, l)?;
            Ok(if c.holds() {
                CheckResult::pass(id, "√det L and √det(Id − αL) are Casimirs")
            } else {
                let comp = c.witness.map(|(i, j)| vec![i + 1, j + 1]).unwrap_or_default();
                let which = if c.det { "√det(Id − αL)" } else { "√det L" };
                CheckResult::fail(
                    id,
                    format!("{which} is not a Casimir"),
                    described(comp, "∇_j(L^{si}∂_s h) − λ^i∂_j h + Khδ^i_j ≠ 0"),
                )
            })
        }
    }
}

fn check_flows(ctx: &Ctx, id: &str, l: &Mat, order: usize) -> CheckResult {
    let f = flow_operators(l, order);
    let mut notes = Vec::new();
    for p in &f.printed {
        for d in &p.diffs {
            notes.push(format!(
                "A_{}: coefficient of L^{} is {} by the series, printed closed form gives {}{}",
                p.k,
                d.power,
                ctx.show(&d.series),
                ctx.show(&d.printed),
                if p.matrix_equal { " (matrices still agree)" } else { "" }
            ));
        }
    }
    let mut result = if !f.first_verbatim {
        CheckResult::fail(id, "A_1 differs from L + ½σ_1 Id", described(vec![1], "A_1"))
    } else if !density_flow_identity(l, order) {
        CheckResult::fail(
            id,
            "densities and flow operators are inconsistent",
            described(Vec::new(), "d/dα √det(Id − αL) ≠ −½ det(Id − αL) tr(L A(α))"),
        )
    } else {
        let mut failure = None;
        'pairs: for a in 0..order {
            for b in a + 1..order {
                let r = commute_report(&f.operators[a], &f.operators[b]);
                if !r.bracket_zero {
                    failure = Some(CheckResult::fail(
                        id,
                        format!("[A_{}, A_{}] ≠ 0", a + 1, b + 1),
                        described(vec![a + 1, b + 1], "commutator"),
                    ));
                    break 'pairs;
                }
                if let Some((i, res)) = r.residual.iter().enumerate().find(|(_, x)| !x.is_zero()) {
                    let mut names = ctx.names.clone();
                    names.extend((1..=l.rows()).map(|k| format!("xi{k}")));
                    failure = Some(CheckResult::fail(
                        id,
                        format!("flows A_{} and A_{} do not commute", a + 1, b + 1),
                        Witness {
                            component: vec![a + 1, b + 1, i + 1],
                            expression: res.display_with(&names),
                            sample: None,
                        },
                    ));
                    break 'pairs;
                }
            }
        }
        failure.unwrap_or_else(|| {
            CheckResult::pass(
                id,
                format!("A_1 = L + ½σ_1 Id; densities F_1..F_{order} consistent; all pairs commute"),
            )
        })
    };
    result.notes = notes;
    result
}

fn check_poisson(ctx: &Ctx, id: &str, g: &Mat, l: Option<Mat>) -> Result<CheckResult> {
    let g2 = match (ctx.doc.second_metric()?, l) {
        (Some(g2), _) => g2,
        (None, Some(l)) => g.mul_ref(&l.inverse().ok_or(Error::SingularOperator)?),
        (None, None) => return Ok(CheckResult::skip(id, "document has neither g2 nor L")),
    };
    let r = poisson_report(g, &g2)?;
    let ks = format!("K1 = {}, K2 = {}", ctx.show(&r.k1), ctx.show(&r.k2));
    Ok(if let Some(w) = r.torsion_witness {
        let l = g2.inverse().ok_or(Error::DegenerateMetric)?.mul_ref(g);
        let v = torsion(&l).get(&w).clone();
        CheckResult::fail(id, format!("{ks}; quotient operator is not Nijenhuis"), ctx.witness(one_based(&w), &v))
    } else if r.condition_b {
        CheckResult::pass(id, format!("{ks}; g1(αId + βL)⁻¹ has curvature αK1 + βK2"))
    } else {
        let v = r.pencil_verdict.expect("computed when torsion vanishes");
        let mut names = ctx.names.clone();
        names.extend(["alpha".to_string(), "beta".to_string()]);
        let found = match &v {
            CurvatureVerdict::ConstantCurvature(k) => format!("constant curvature {}", k.display_with(&names)),
            other => other.to_string(),
        };
        CheckResult::fail(id, format!("{ks}; pencil curvature is not αK1 + βK2"), described(Vec::new(), found))
    })
}

fn check_conify(id: &str, doc: &TensorDocument) -> Result<CheckResult> {
    let Some(p) = &doc.pencil else {
        return Ok(CheckResult::skip(id, "document has no pencil block"));
    };
    let c = conify(p)?;
    Ok(if c.holds() {
        CheckResult::pass(id, "flat lifted connection, parallel A, image [[−K, −bᵀ], [−b, a]]")
    } else {
        let failed: Vec<&str> = [
            (c.connection_flat, "connection not flat"),
            (c.tensor_parallel, "A not parallel"),
            (c.image_matches, "image mismatch"),
        ]
        .iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, m)| *m)
        .collect();
        CheckResult::fail(id, "conification postconditions fail", described(Vec::new(), failed.join(", ")))
    })
}

fn check_corpus(id: &str, name: &str) -> Result<CheckResult> {
    let ex: ExampleId = name.parse()?;
    let e = build(ex)?;
    let m = verify_member(&e)?;
    if !m.all_pass() {
        return Ok(CheckResult::fail(id, "structural checks fail", described(Vec::new(), format!("{m:?}"))));
    }
    let Some(exp) = &e.expected else {
        return Ok(CheckResult::pass(id, "structural checks pass; no chain expectation recorded"));
    };
    let r = flatness_chain(&e.g, &e.l, exp.len() - 1)?;
    for (k, (x, v)) in exp.iter().zip(r.verdicts()).enumerate() {
        if !x.matches(v) {
            return Ok(CheckResult::fail(
                id,
                format!("chain verdict at k = {k} differs from the catalog"),
                described(vec![k], format!("expected {x}, got {v}")),
            ));
        }
    }
    let shown: Vec<String> = r.verdicts().iter().map(|v| v.to_string()).collect();
    Ok(CheckResult::pass(id, format!("structural checks pass; chain {}", shown.join(", "))))
}

fn check_sim(id: &str, l: &Mat, profile: &str) -> Result<CheckResult> {
    let n = l.rows();
    let a = CompiledOperator::new(&flow_operators(l, 1).operators[0])?;
    let dens = conservation_densities(l, 2)
        .iter()
        .map(|f| CompiledFun::new(f, n))
        .collect::<Result<Vec<_>>>()?;
    let grid = Grid1D::periodic(SIM_CELLS, 2.0 * PI)?;
    let u0 = Profile::named(profile, n)?.sample(&grid);
    let speed = max_speed(&a, &u0)?;
    let dt = if speed > 0.0 { SIM_CFL * grid.spacing() / speed } else { grid.spacing() };
    let traj = evolve(&a, &u0, &grid, dt, SIM_HORIZON, Scheme::Rk4Central)?;
    let drift = conservation_drift(&traj, &dens)?;
    let detail = format!(
        "A_1 flow, M = {SIM_CELLS}, T = {SIM_HORIZON}, CFL {:.2}: drift F_1 {:.3e}, F_2 {:.3e}",
        traj.cfl, drift[0], drift[1]
    );
    Ok(match drift.iter().position(|&d| d > SIM_DRIFT_TOL) {
        None => CheckResult::pass(id, detail),
        Some(k) => CheckResult::fail(id, detail, described(vec![k + 1], format!("drift {:.3e}", drift[k]))),
    })
}

fn run_one(ctx: &Ctx, check: &CheckId) -> CheckResult {
    let id = check.to_string();
    let id = id.as_str();
    let doc = ctx.doc;
    let out = (|| -> std::result::Result<CheckResult, Box<CheckResult>> {
        let wrap = |r: Result<CheckResult>| r.unwrap_or_else(|e| engine_failure(id, &e));
        Ok(match check {
            CheckId::Geodesic => {
                let g = need(doc.metric(), id, "metric g")?;
                let l = need(doc.operator(), id, "operator L")?;
                wrap(check_geodesic(ctx, id, &g, &l))
            }
            CheckId::Nijenhuis => check_nijenhuis(ctx, id, &need(doc.operator(), id, "operator L")?),
            CheckId::Curvature => wrap(check_curvature(ctx, id, &need(doc.metric(), id, "metric g")?)),
            CheckId::Chain(k) => {
                let g = need(doc.metric(), id, "metric g")?;
                let l = need(doc.operator(), id, "operator L")?;
                wrap(check_chain(ctx, id, &g, &l, *k))
            }
            CheckId::Casimir => {
                let g = need(doc.metric(), id, "metric g")?;
                let l = need(doc.operator(), id, "operator L")?;
                wrap(check_casimir(ctx, id, &g, &l))
            }
            CheckId::Flows(n) => check_flows(ctx, id, &need(doc.operator(), id, "operator L")?, *n),
            CheckId::Poisson => {
                let g = need(doc.metric(), id, "metric g")?;
                let l = doc.operator().map_err(|e| Box::new(engine_failure(id, &e)))?;
                wrap(check_poisson(ctx, id, &g, l))
            }
            CheckId::Conify => wrap(check_conify(id, doc)),
            CheckId::Corpus(name) => wrap(check_corpus(id, name)),
            CheckId::Sim(profile) => {
                let l = need(doc.operator(), id, "operator L")?;
                wrap(check_sim(id, &l, profile))
            }
        })
    })();
    out.unwrap_or_else(|r| *r)
}

#[cfg(not(target_arch = "wasm32"))]
fn timed(ctx: &Ctx, check: &CheckId) -> CheckResult {
    let start = std::time::Instant::now();
    let mut r = run_one(ctx, check);
    r.elapsed_ms = start.elapsed().as_millis();
    r
}

// No monotonic clock on wasm32-unknown-unknown.
#[cfg(target_arch = "wasm32")]
fn timed(ctx: &Ctx, check: &CheckId) -> CheckResult {
    run_one(ctx, check)
}

/// Runs the checks in dependency order, sequentially.
pub fn run_document(doc: &TensorDocument, checks: &[CheckId], seed: u64) -> Report {
    run_document_with(doc, checks, seed, |jobs, f| jobs.iter().map(f).collect())
}

/// Like [`run_document`], with the independent checks handed to `exec`,
/// which must return one result per job in order. A failing `geodesic`
/// check is run first and turns the checks that need compatibility into
/// skips.
pub fn run_document_with<E>(doc: &TensorDocument, checks: &[CheckId], seed: u64, exec: E) -> Report
where
    E: Fn(&[CheckId], &(dyn Fn(&CheckId) -> CheckResult + Sync)) -> Vec<CheckResult>,
{
    let ctx = Ctx {
        doc,
        names: doc.vars.names(),
        seed,
    };
    let planned = plan(checks);
    let mut results: Vec<Option<CheckResult>> = vec![None; planned.len()];
    let mut compatible = true;
    if let Some(pos) = planned.iter().position(|c| *c == CheckId::Geodesic) {
        let r = timed(&ctx, &CheckId::Geodesic);
        compatible = r.verdict == Verdict::Pass;
        results[pos] = Some(r);
    }
    let rest: Vec<CheckId> = planned
        .iter()
        .enumerate()
        .filter(|(i, c)| results[*i].is_none() && (compatible || !c.needs_compatibility()))
        .map(|(_, c)| c.clone())
        .collect();
    let run = |c: &CheckId| timed(&ctx, c);
    let mut done = exec(&rest, &run).into_iter();
    for (i, c) in planned.iter().enumerate() {
        if results[i].is_some() {
            continue;
        }
        results[i] = Some(if compatible || !c.needs_compatibility() {
            done.next().expect("one result per job")
        } else {
            CheckResult::skip(&c.to_string(), "skipped: geodesic check failed")
        });
    }
    Report::new(seed, results.into_iter().map(|r| r.expect("filled")).collect())
}
