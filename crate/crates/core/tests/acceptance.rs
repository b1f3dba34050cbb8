//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pencil_core::corpus::*;
use pencil_core::geodesic::*;
use pencil_core::hydro::*;
use pencil_core::nijenhuis::is_nijenhuis;
use pencil_core::ratfun::{char_coeffs, Mat, RatFun};
use pencil_core::sim::*;
use pencil_core::tensor::{curvature_class, CurvatureVerdict};

/// Drift bound for the conserved densities.
const DRIFT_TOL: f64 = 1e-6;
/// Round-off bound for densities the stencil conserves exactly.
const ROUNDOFF_TOL: f64 = 1e-12;
/// Required error reduction per refinement.
const MIN_RATIO: f64 = 4.0;
/// Largest relative change that still counts as a plateau.
const PLATEAU_TOL: f64 = 0.05;
/// Smallest witness residual that counts as non-commuting.
const WITNESS_FLOOR: f64 = 1e-3;
const SIM_CELLS: usize = 256;
const SIM_HORIZON: f64 = 0.5;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: pencil_core::Error) -> String {
    e.to_string()
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn x(i: usize, nv: usize) -> RatFun {
    RatFun::var(i, nv)
}

/// Pencil data with an invertible operator.
fn invertible_draws(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<(PencilData, Mat)> {
    let mut out = Vec::new();
    while out.len() < count {
        let p = PencilData::random(rng, n);
        let l = build_pencil_operator(&p, n).operator;
        if !l.det().is_zero() {
            out.push((p, l));
        }
    }
    out
}

fn chains() -> Outcome {
    for n in [2, 3] {
        for id in [ExampleId::LiouvilleLC(n), ExampleId::Companion(n)] {
            let e = build(id).map_err(err)?;
            let r = flatness_chain(&e.g, &e.l, n + 2).map_err(err)?;
            let v = r.verdicts();
            ensure(v[..=n].iter().all(|v| v.is_flat()), || format!("{id}: not flat through k = {n}"))?;
            match v[n + 1] {
                CurvatureVerdict::ConstantCurvature(k) => {
                    ensure(!k.is_zero(), || format!("{id}: zero curvature at k = {}", n + 1))?;
                    if matches!(id, ExampleId::LiouvilleLC(_)) {
                        ensure(*k == RatFun::from_ratio(-1, 4, n), || format!("{id}: K = {k}"))?;
                    }
                }
                other => return Err(format!("{id}: k = {} is {other}", n + 1)),
            }
            ensure(matches!(v[n + 2], CurvatureVerdict::NonConstant { .. }), || {
                format!("{id}: k = {} is {}", n + 2, v[n + 2])
            })?;
        }
    }
    Ok("flat through n, K ≠ 0 at n+1 (-1/4 for Liouville), non-constant at n+2".into())
}

fn structural() -> Outcome {
    let ids = ExampleId::standard();
    for &id in &ids {
        let e = build(id).map_err(err)?;
        let m = verify_member(&e).map_err(err)?;
        ensure(m.all_pass(), || format!("{id}: {m:?}"))?;
        let gl = metric_power(&e.g, &e.l, 1).map_err(err)?;
        let k = curvature_class(&gl).map_err(err)?.constant(e.g.nvars());
        ensure(k == m.k, || format!("{id}: K from λ {:?} vs gL⁻¹ {k:?}", m.k))?;
    }
    Ok(format!("{} members", ids.len()))
}

fn sqrtdet() -> Outcome {
    for n in [2, 3] {
        for id in [ExampleId::LiouvilleLC(n), ExampleId::SinjukovChain(n)] {
            let e = build(id).map_err(err)?;
            let r = sqrtdet_casimir_check(&e.g, &e.l).map_err(err)?;
            ensure(r.det && r.family, || format!("{id}: {r:?}"))?;
        }
    }
    Ok("√det L and the α family on 4 members".into())
}

fn flows() -> Outcome {
    let l = Mat::diagonal(vec![x(0, 1)], 1);
    let f = flow_operators(&l, 3);
    ensure(f.operators[1].get(0, 0) == &x(0, 1).pow(2).scale(&q(15, 8)), || "C_2".into())?;
    ensure(f.operators[2].get(0, 0) == &x(0, 1).pow(3).scale(&q(35, 16)), || "C_3".into())?;
    let mut diffs = 0;
    for id in ExampleId::standard().into_iter().filter(|id| id.dim() <= 3) {
        let e = build(id).map_err(err)?;
        let f = flow_operators(&e.l, 3);
        ensure(f.first_verbatim, || format!("{id}: A_1"))?;
        let s = char_coeffs(&e.l);
        let dens = conservation_densities(&e.l, 3);
        for k in 1..=3 {
            ensure(Some(&dens[k - 1]) == printed_density(k, &s, e.l.nvars()).as_ref(), || {
                format!("{id}: F_{k}")
            })?;
        }
        // Printed forms either agree or every deviation is itemised.
        for p in &f.printed {
            ensure(p.matrix_equal || !p.diffs.is_empty(), || format!("{id}: A_{} silent", p.k))?;
            diffs += p.diffs.len();
        }
    }
    ensure(diffs > 0, || "printed A_2/A_3 deviation not reported".into())?;
    Ok(format!("A_1, C_2 = 15/8, C_3 = 35/16, F_1..F_3 verbatim; {diffs} printed-form diffs reported"))
}

fn commuting() -> Outcome {
    let mut pairs = 0;
    for id in ExampleId::standard().into_iter().filter(|id| id.dim() <= 3) {
        let e = build(id).map_err(err)?;
        let a = flow_operators(&e.l, 3).operators;
        for i in 0..3 {
            for j in i + 1..3 {
                ensure(flows_commute(&a[i], &a[j]), || format!("{id}: A_{} vs A_{}", i + 1, j + 1))?;
                pairs += 1;
            }
        }
    }
    let w1 = Mat::diagonal(vec![x(0, 2), x(1, 2)], 2);
    let w2 = Mat::diagonal(vec![x(1, 2), x(0, 2)], 2);
    ensure(!flows_commute(&w1, &w2), || "witness commutes".into())?;
    Ok(format!("{pairs} pairs commute, witness does not"))
}

fn poisson() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let per_dim = 10;
    for n in [2, 3] {
        let draws = invertible_draws(&mut rng, n, per_dim + 1);
        let g0 = Mat::identity(n, n);
        for w in draws.windows(2) {
            let g1 = metric_power(&g0, &w[0].1, 1).map_err(err)?;
            let g2 = metric_power(&g0, &w[1].1, 1).map_err(err)?;
            let r = poisson_report(&g0, &g1).map_err(err)?;
            ensure(r.holds(), || format!("n = {n}: (g0, g0L⁻¹) {r:?}"))?;
            let r = poisson_report(&g1, &g2).map_err(err)?;
            ensure(r.holds(), || format!("n = {n}: (g0L₁⁻¹, g0L₂⁻¹) {r:?}"))?;
        }
    }
    let (g, l) = liouville(2);
    let c = |k| RatFun::from_int(k, 2);
    let gp = metric_through(&g, &l, &[c(1), c(0), c(1)]).map_err(err)?;
    let gq = metric_through(&g, &l, &[c(0), c(1)]).map_err(err)?;
    ensure(curvature_additivity(&gp, &gq).map_err(err)?, || "P = t²+1, Q = t".into())?;
    Ok(format!("{per_dim} pairs per dimension n = 2, 3; additivity for P = t²+1, Q = t"))
}

fn conification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let per_dim = 20;
    for n in [2, 3] {
        for i in 0..per_dim {
            let p = PencilData::random(&mut rng, n);
            let c = conify(&p).map_err(err)?;
            ensure(c.connection_flat && c.tensor_parallel && c.image_matches, || {
                format!("n = {n}, draw {i}: {p:?}")
            })?;
        }
    }
    Ok(format!("{per_dim} draws per dimension n = 2, 3"))
}

fn jordan() -> Outcome {
    let e = build(ExampleId::JordanFamily(4, 3)).map_err(err)?;
    let r = flatness_chain(&e.g, &e.l, 6).map_err(err)?;
    ensure(r.verdicts().iter().all(|v| v.is_flat()), || "chain not flat through k = 6".into())?;
    let c = |v: i64| RatFun::from_int(v, 4);
    for coeffs in [vec![c(1), c(0), c(1)], vec![c(2), c(1), c(0), c(1)]] {
        let m = metric_through(&e.g, &e.l, &coeffs).map_err(err)?;
        ensure(curvature_class(&m).map_err(err)?.is_flat(), || format!("g·f(L)⁻¹ curved for {coeffs:?}"))?;
    }
    let j = jordan_structure_check(4, 3).map_err(err)?;
    ensure(j.jordan_two_blocks() == Some(2) && j.nonconstant_eigenvalues, || format!("{j:?}"))?;
    Ok("flat through k = 6, two f(L), two 2×2 blocks".into())
}

fn maximality() -> Outcome {
    let mut members: Vec<PencilData> = ExampleId::standard()
        .into_iter()
        .filter_map(|id| build(id).ok().and_then(|e| e.pencil))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in [2, 3] {
        members.extend((0..5).map(|_| PencilData::random(&mut rng, n)));
    }
    for p in &members {
        let n = p.dim();
        let op = build_pencil_operator(p, n);
        match fn_constant_commutation(&op.operator, &p.g0_mat(n)).map_err(err)? {
            Membership::InPencil(fit) => {
                let b: Vec<RatFun> = p.b().iter().map(|v| RatFun::from_rational(v.clone(), n)).collect();
                let a = Mat::from_fn(n, n, n, |i, j| RatFun::from_rational(p.a()[i][j].clone(), n));
                let k = RatFun::from_rational(-p.k().clone(), n);
                ensure(fit.a == a && fit.b == b && fit.c == b && fit.k == k, || format!("{p:?}: {fit:?}"))?;
                ensure(fit.skew.as_ref().is_none_or(RatFun::is_zero), || format!("{p:?}: skew block"))?;
            }
            Membership::NotInPencil(w) => return Err(format!("{p:?}: {w:?}")),
        }
    }
    let l = Mat::diagonal(vec![x(1, 2), RatFun::zero(2)], 2);
    ensure(!is_nijenhuis(&l), || "witness is Nijenhuis".into())?;
    let outside = fn_constant_commutation(&l, &Mat::identity(2, 2)).map_err(err)?;
    ensure(!outside.is_in_pencil(), || "witness classified InPencil".into())?;
    Ok(format!("{} members InPencil with matching a, b, K; witness NotInPencil", members.len()))
}

fn numerics() -> Outcome {
    let e = build(ExampleId::LiouvilleLC(2)).map_err(err)?;
    let f = flow_operators(&e.l, 2);
    let a1 = CompiledOperator::new(&f.operators[0]).map_err(err)?;
    let a2 = CompiledOperator::new(&f.operators[1]).map_err(err)?;
    let dens = conservation_densities(&e.l, 2)
        .iter()
        .map(|d| CompiledFun::new(d, 2))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let p = Profile::named("smooth", 2).map_err(err)?;
    let grid = |m| Grid1D::periodic(m, 2.0 * PI).map_err(err);

    // Δτ halves together with the spacing, at a fixed CFL number.
    let drift = |m: usize| -> Result<Vec<f64>, String> {
        let g = grid(m)?;
        let u0 = p.sample(&g);
        let dt = 0.5 * g.spacing() / max_speed(&a1, &u0).map_err(err)?;
        let traj = evolve(&a1, &u0, &g, dt, SIM_HORIZON, Scheme::Rk4Central).map_err(err)?;
        conservation_drift(&traj, &dens).map_err(err)
    };
    let (coarse, fine) = (drift(SIM_CELLS)?, drift(2 * SIM_CELLS)?);
    ensure(coarse.iter().all(|&d| d <= DRIFT_TOL), || format!("drift {coarse:?}"))?;
    ensure(coarse[0] <= ROUNDOFF_TOL && fine[0] <= ROUNDOFF_TOL, || format!("F_1 drift {coarse:?} {fine:?}"))?;
    let ratio = coarse[1] / fine[1];
    ensure(ratio >= MIN_RATIO, || format!("F_2 drift ratio {ratio:.2}"))?;

    let w1 = CompiledOperator::new(&Mat::diagonal(vec![x(0, 2), x(1, 2)], 2)).map_err(err)?;
    let w2 = CompiledOperator::new(&Mat::diagonal(vec![x(1, 2), x(0, 2)], 2)).map_err(err)?;
    let mut pair = Vec::new();
    let mut witness = Vec::new();
    for m in [SIM_CELLS / 2, SIM_CELLS, 2 * SIM_CELLS] {
        let g = grid(m)?;
        let u0 = p.sample(&g);
        let dt = 0.25 * g.spacing() / max_speed(&a2, &u0).map_err(err)?;
        pair.push(commute_numeric(&a1, &a2, &u0, &g, dt, SIM_HORIZON).map_err(err)?);
        witness.push(commute_numeric(&w1, &w2, &u0, &g, dt, SIM_HORIZON).map_err(err)?);
    }
    let pair_ratios: Vec<f64> = pair.windows(2).map(|w| w[0] / w[1]).collect();
    ensure(pair_ratios.iter().all(|&r| r >= MIN_RATIO), || format!("(A_1, A_2) residuals {pair:?}"))?;
    ensure(
        witness.iter().all(|&w| w > WITNESS_FLOOR)
            && witness.windows(2).all(|w| (w[0] / w[1] - 1.0).abs() < PLATEAU_TOL),
        || format!("witness residuals {witness:?}"),
    )?;
    Ok(format!(
        "drift F_1 {:.1e}, F_2 {:.1e} (ratio {ratio:.1}); (A_1, A_2) ratios {:.1}, {:.1}; witness ≈ {:.2e}",
        coarse[0], coarse[1], pair_ratios[0], pair_ratios[1], witness[2]
    ))
}

fn sigma() -> Outcome {
    let mut signs = Vec::new();
    for n in [2, 3] {
        let s = verify_sigma_transform(n).map_err(err)?;
        ensure(s.holds(), || format!("n = {n}: {s:?}"))?;
        signs.push(format!("n = {n}: metric {:+}", s.metric_sign.unwrap_or(0)));
    }
    Ok(format!("global signs {}", signs.join(", ")))
}

#[test]
fn acceptance() {
    let criteria: [(usize, fn() -> Outcome); 11] = [
        (1, chains),
        (2, structural),
        (3, sqrtdet),
        (4, flows),
        (5, commuting),
        (6, poisson),
        (7, conification),
        (8, jordan),
        (9, maximality),
        (10, numerics),
        (11, sigma),
    ];
    let results: Vec<(usize, Outcome, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(id, f)| {
                s.spawn(move || {
                    let start = Instant::now();
                    let out = std::panic::catch_unwind(f)
                        .unwrap_or_else(|_| Err("panicked".to_string()));
                    (id, out, start.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion thread")).collect()
    });
    let mut failed = Vec::new();
    for (id, out, secs) in &results {
        match out {
            Ok(detail) => println!("criterion {id:>2}: PASS ({secs:.1} s) {detail}"),
            Err(why) => {
                println!("criterion {id:>2}: FAIL ({secs:.1} s) {why}");
                failed.push(*id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
