use std::f64::consts::PI;

use pencil_core::corpus::{build, ExampleId};
use pencil_core::hydro::{conservation_densities, flow_operators};
use pencil_core::ratfun::{Mat, RatFun};
use pencil_core::sim::*;
use pencil_core::Error;
use proptest::prelude::*;

fn x(i: usize) -> RatFun {
    RatFun::var(i, 2)
}

fn grid(m: usize) -> Grid1D {
    Grid1D::periodic(m, 2.0 * PI).unwrap()
}

fn op(m: Mat) -> CompiledOperator {
    CompiledOperator::new(&m).unwrap()
}

fn max_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

/// `u = u0(τ + u t)` per component, by fixed-point iteration.
fn hopf_exact(p: &Profile, g: &Grid1D, t: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for tau in g.nodes() {
        for (i, b) in p.base.iter().enumerate() {
            let u0 = |s: f64| b + p.amplitude * (2.0 * PI * s / g.length + i as f64 * PI / 3.0).sin();
            let mut u = u0(tau);
            for _ in 0..200 {
                u = u0(tau + u * t);
            }
            out.push(u);
        }
    }
    out
}

#[test]
fn identity_operator_translates() {
    let a = op(Mat::identity(2, 2));
    let p = Profile::named("smooth", 2).unwrap();
    let t = 0.7;
    let errs: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&m| {
            let g = grid(m);
            let traj = evolve(&a, &p.sample(&g), &g, 0.5 * g.spacing(), t, Scheme::Rk4Central).unwrap();
            let p = &p;
            let shifted: Vec<f64> = g
                .nodes()
                .iter()
                .flat_map(|tau| {
                    (0..2).map(move |i| {
                        p.base[i] + p.amplitude * (tau + t + i as f64 * PI / 3.0).sin()
                    })
                })
                .collect();
            max_err(traj.last(), &shifted)
        })
        .collect();
    assert!(errs[2] < 1e-8, "{errs:?}");
    for w in errs.windows(2) {
        assert!(w[0] / w[1] >= 4.0, "{errs:?}");
    }
}

#[test]
fn decoupled_hopf_matches_characteristics() {
    let a = op(Mat::diagonal(vec![x(0), x(1)], 2));
    let p = Profile::named("small", 2).unwrap();
    let t = 1.0;
    let mut central = Vec::new();
    let mut upwind = Vec::new();
    for m in [128, 256] {
        let g = grid(m);
        let u0 = p.sample(&g);
        let exact = hopf_exact(&p, &g, t);
        let dt = 0.4 * g.spacing() / max_speed(&a, &u0).unwrap();
        central.push(max_err(evolve(&a, &u0, &g, dt, t, Scheme::Rk4Central).unwrap().last(), &exact));
        upwind.push(max_err(evolve(&a, &u0, &g, dt, t, Scheme::Upwind).unwrap().last(), &exact));
    }
    assert!(central[1] < 1e-7 && central[0] / central[1] >= 4.0, "{central:?}");
    assert!(upwind[1] < 1e-2 && upwind[0] / upwind[1] >= 1.6, "{upwind:?}");
}

#[test]
fn upwind_rejects_coupled_operators() {
    let a = op(Mat::from_rows(vec![vec![x(0), x(1)], vec![x(1), x(0)]], 2));
    let g = grid(32);
    let u0 = Profile::named("smooth", 2).unwrap().sample(&g);
    assert!(matches!(
        evolve(&a, &u0, &g, 0.01, 0.1, Scheme::Upwind),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn liouville_first_flow_conserves_densities() {
    let e = build(ExampleId::LiouvilleLC(2)).unwrap();
    let a = op(flow_operators(&e.l, 1).operators[0].clone());
    let dens: Vec<CompiledFun> = conservation_densities(&e.l, 2)
        .iter()
        .map(|f| CompiledFun::new(f, 2).unwrap())
        .collect();
    let p = Profile::named("smooth", 2).unwrap();
    let drift = |m: usize| {
        let g = grid(m);
        let u0 = p.sample(&g);
        let dt = 0.5 * g.spacing() / max_speed(&a, &u0).unwrap();
        let traj = evolve(&a, &u0, &g, dt, 0.5, Scheme::Rk4Central).unwrap();
        conservation_drift(&traj, &dens).unwrap()
    };
    let (coarse, fine) = (drift(256), drift(512));
    // F_1 is linear, hence conserved by the stencil up to round-off.
    assert!(coarse[0] < 1e-12 && fine[0] < 1e-12, "{coarse:?}");
    assert!(coarse[1] < 1e-6 && coarse[1] / fine[1] >= 4.0, "{coarse:?} {fine:?}");
}

#[test]
fn constant_density_has_no_drift() {
    let a = op(Mat::diagonal(vec![x(0), x(1)], 2));
    let g = grid(64);
    let u0 = Profile::named("smooth", 2).unwrap().sample(&g);
    let traj = evolve(&a, &u0, &g, 0.01, 0.2, Scheme::Rk4Central).unwrap();
    let one = CompiledFun::new(&RatFun::from_int(3, 2), 2).unwrap();
    assert!(conservation_drift(&traj, &[one]).unwrap()[0] < 1e-14);
}

#[test]
fn commuting_and_noncommuting_pairs() {
    let e = build(ExampleId::LiouvilleLC(2)).unwrap();
    let f = flow_operators(&e.l, 2);
    let (a1, a2) = (op(f.operators[0].clone()), op(f.operators[1].clone()));
    let w1 = op(Mat::diagonal(vec![x(0), x(1)], 2));
    let w2 = op(Mat::diagonal(vec![x(1), x(0)], 2));
    let p = Profile::named("smooth", 2).unwrap();
    let mut pair = Vec::new();
    let mut same = Vec::new();
    let mut witness = Vec::new();
    for m in [128, 256, 512] {
        let g = grid(m);
        let u0 = p.sample(&g);
        let dt = 0.25 * g.spacing() / max_speed(&a2, &u0).unwrap();
        pair.push(commute_numeric(&a1, &a2, &u0, &g, dt, 0.5).unwrap());
        same.push(commute_numeric(&a1, &a1, &u0, &g, dt, 0.5).unwrap());
        witness.push(commute_numeric(&w1, &w2, &u0, &g, dt, 0.5).unwrap());
    }
    for w in pair.windows(2) {
        assert!(w[0] / w[1] >= 4.0, "{pair:?}");
    }
    assert!(same.iter().all(|&d| d < 1e-12), "{same:?}");
    assert!(witness[2] > 1e-3, "{witness:?}");
    for w in witness.windows(2) {
        assert!((w[0] / w[1] - 1.0).abs() < 0.05, "{witness:?}");
    }
}

#[test]
fn cfl_violation_is_reported() {
    let a = op(Mat::identity(2, 2).scale(&RatFun::from_int(10, 2)));
    let g = grid(64);
    let u0 = Profile::named("smooth", 2).unwrap().sample(&g);
    match evolve(&a, &u0, &g, g.spacing(), 1.0, Scheme::Rk4Central) {
        Err(Error::Cfl { cfl, limit }) => assert!(cfl > limit),
        other => panic!("{other:?}"),
    }
}

#[test]
fn singular_locus_aborts() {
    let a = op(Mat::diagonal(vec![x(0).inv().unwrap(), RatFun::one(2)], 2));
    let g = grid(32);
    let p = Profile {
        base: vec![0.0, 2.0],
        amplitude: 0.0,
    };
    assert!(matches!(
        evolve(&a, &p.sample(&g), &g, 0.01, 0.1, Scheme::Rk4Central),
        Err(Error::SingularLocus { .. })
    ));
}

#[test]
fn non_finite_data_is_a_blowup() {
    let a = op(Mat::identity(2, 2));
    let g = grid(16);
    let mut u0 = Profile::named("smooth", 2).unwrap().sample(&g);
    u0[5] = f64::NAN;
    assert!(matches!(
        evolve(&a, &u0, &g, 0.01, 0.1, Scheme::Rk4Central),
        Err(Error::Blowup { .. })
    ));
}

#[test]
fn parameters_must_be_substituted() {
    let a = Mat::identity(1, 2).scale(&RatFun::var(1, 2));
    assert!(matches!(CompiledOperator::new(&a), Err(Error::Precondition(_))));
}

#[test]
fn grid_and_scheme_validation() {
    assert!(Grid1D::periodic(8, 1.0).is_err());
    assert!(Grid1D::periodic(16, 0.0).is_err());
    for s in [Scheme::Rk4Central, Scheme::Upwind] {
        assert_eq!(s.to_string().parse::<Scheme>().unwrap(), s);
    }
    assert!("leapfrog".parse::<Scheme>().is_err());
}

#[test]
fn exports() {
    let a = op(Mat::identity(2, 2));
    let g = grid(16);
    let traj = evolve(&a, &Profile::named("smooth", 2).unwrap().sample(&g), &g, 0.05, 0.1, Scheme::Rk4Central)
        .unwrap();
    let csv = trajectory_csv(&traj);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("time,cell,tau,u1,u2"));
    assert_eq!(lines.count(), traj.times.len() * 16);
    let m = RunManifest::new(&traj, vec![0.0]);
    let back: RunManifest = serde_json::from_str(&m.to_json()).unwrap();
    assert_eq!(back, m);
    assert!(m.to_json().contains("\"rk4-central\""));
}

#[test]
fn spectral_radius_of_a_shear() {
    let r = spectral_radius(&[1.0, 100.0, 0.0, 1.0], 2);
    assert!((1.0..1.3).contains(&r), "{r}");
    assert!((spectral_radius(&[0.0, 1.0, -1.0, 0.0], 2) - 1.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn spectral_radius_bounds_eigenvalues(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, d in -5.0f64..5.0) {
        let tr = a + d;
        let det = a * d - b * c;
        let disc = tr * tr - 4.0 * det;
        let rho = if disc >= 0.0 {
            ((tr.abs() + disc.sqrt()) / 2.0).abs()
        } else {
            det.abs().sqrt()
        };
        let est = spectral_radius(&[a, b, c, d], 2);
        prop_assert!(est >= rho * (1.0 - 1e-9));
        prop_assert!(est <= (a.abs() + b.abs()).max(c.abs() + d.abs()) * (1.0 + 1e-9));
    }
}
