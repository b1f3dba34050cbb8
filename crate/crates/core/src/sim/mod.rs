//! Method-of-lines evolution of `u_t = A(u)u_τ` on a periodic grid, with
//! conservation monitoring and a numerical commutation test.

mod compile;
mod export;

pub use compile::{spectral_radius, CompiledFun, CompiledOperator, SINGULAR_THRESHOLD};
pub use export::{trajectory_csv, RunManifest};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trajectories keep at most this many time samples besides the initial one.
const MAX_SAMPLES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub cells: usize,
    pub length: f64,
    pub periodic: bool,
}

impl Grid1D {
    pub fn periodic(cells: usize, length: f64) -> Result<Self> {
        let g = Grid1D {
            cells,
            length,
            periodic: true,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells < 16 {
            return Err(Error::Precondition(format!(
                "grid needs at least 16 cells, got {}",
                self.cells
            )));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Precondition("grid length must be positive".into()));
        }
        if !self.periodic {
            return Err(Error::Precondition("only periodic grids are supported".into()));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.cells as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.cells).map(|i| i as f64 * h).collect()
    }

    /// The same domain with twice the cells.
    pub fn refined(&self) -> Self {
        Grid1D {
            cells: 2 * self.cells,
            ..*self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Fourth-order central differences with classical Runge–Kutta.
    #[serde(rename = "rk4-central")]
    Rk4Central,
    /// First-order upwinding per local characteristic sign with forward
    /// Euler; diagonal operators only.
    #[serde(rename = "upwind")]
    Upwind,
}

impl Scheme {
    /// Largest admissible `ρ·dt/Δτ`. The stencil's symbol peaks at
    /// `≈1.372/Δτ` and RK4 is stable on the imaginary axis up to `2√2`.
    pub fn cfl_limit(self) -> f64 {
        match self {
            Scheme::Rk4Central => 2.0,
            Scheme::Upwind => 1.0,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Rk4Central => "rk4-central",
            Scheme::Upwind => "upwind",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rk4-central" => Ok(Scheme::Rk4Central),
            "upwind" => Ok(Scheme::Upwind),
            other => Err(Error::Precondition(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Smooth periodic initial data `u^i(τ) = base_i + amplitude·sin(2πτ/ℓ + iπ/3)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub base: Vec<f64>,
    pub amplitude: f64,
}

impl Profile {
    /// Named profiles: `smooth` (amplitude 0.1) and `small` (0.02), both
    /// around `base_i = i + 1`.
    pub fn named(name: &str, dim: usize) -> Result<Self> {
        let amplitude = match name {
            "smooth" => 0.1,
            "small" => 0.02,
            other => return Err(Error::Precondition(format!("unknown profile `{other}`"))),
        };
        Ok(Profile {
            base: (0..dim).map(|i| (i + 1) as f64).collect(),
            amplitude,
        })
    }

    /// Cell values, row-major `cells × dim`.
    pub fn sample(&self, grid: &Grid1D) -> Vec<f64> {
        let n = self.base.len();
        let mut u = Vec::with_capacity(grid.cells * n);
        for tau in grid.nodes() {
            for (i, b) in self.base.iter().enumerate() {
                let phase = 2.0 * PI * tau / grid.length + i as f64 * PI / 3.0;
                u.push(b + self.amplitude * phase.sin());
            }
        }
        u
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub grid: Grid1D,
    pub dim: usize,
    pub scheme: Scheme,
    /// Step actually used (`T` divided by the step count).
    pub dt: f64,
    pub steps: usize,
    pub cfl: f64,
    pub times: Vec<f64>,
    /// One `cells × dim` state per time sample.
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory has the initial state")
    }
}

fn singular(cell: usize, value: f64) -> Error {
    Error::SingularLocus { cell, value }
}

/// `A(u)u_τ` with the fourth-order central stencil
/// `(8(u_{c+1} − u_{c−1}) − (u_{c+2} − u_{c−2}))/(12Δτ)`.
fn central_rhs(
    op: &CompiledOperator,
    u: &[f64],
    h: f64,
    out: &mut [f64],
    a: &mut [f64],
) -> Result<()> {
    let n = op.dim();
    let m = u.len() / n;
    for c in 0..m {
        let (l, r) = ((c + m - 1) % m, (c + 1) % m);
        let (ll, rr) = ((c + m - 2) % m, (c + 2) % m);
        let cell = &u[c * n..(c + 1) * n];
        op.eval_into(cell, a).map_err(|d| singular(c, d))?;
        for i in 0..n {
            out[c * n + i] = (0..n)
                .map(|j| {
                    let near = u[r * n + j] - u[l * n + j];
                    let far = u[rr * n + j] - u[ll * n + j];
                    a[i * n + j] * (8.0 * near - far)
                })
                .sum::<f64>()
                / (12.0 * h);
        }
    }
    Ok(())
}

/// Upwinded `A(u)u_τ` for diagonal `A`: information travels against the
/// sign of the speed.
fn upwind_rhs(
    op: &CompiledOperator,
    u: &[f64],
    h: f64,
    out: &mut [f64],
    a: &mut [f64],
) -> Result<()> {
    let n = op.dim();
    let m = u.len() / n;
    for c in 0..m {
        let (l, r) = ((c + m - 1) % m, (c + 1) % m);
        op.eval_into(&u[c * n..(c + 1) * n], a)
            .map_err(|d| singular(c, d))?;
        for i in 0..n {
            let speed = a[i * n + i];
            let diff = if speed > 0.0 {
                u[r * n + i] - u[c * n + i]
            } else {
                u[c * n + i] - u[l * n + i]
            };
            out[c * n + i] = speed * diff / h;
        }
    }
    Ok(())
}

/// Largest `ρ(A(u))` over the cells of `u`.
pub fn max_speed(op: &CompiledOperator, u: &[f64]) -> Result<f64> {
    let n = op.dim();
    let mut a = vec![0.0; n * n];
    let mut best: f64 = 0.0;
    for (c, cell) in u.chunks(n).enumerate() {
        op.eval_into(cell, &mut a).map_err(|d| singular(c, d))?;
        best = best.max(spectral_radius(&a, n));
    }
    Ok(best)
}

pub fn evolve(
    op: &CompiledOperator,
    u0: &[f64],
    grid: &Grid1D,
    dt: f64,
    t_final: f64,
    scheme: Scheme,
) -> Result<Trajectory> {
    grid.validate()?;
    let n = op.dim();
    if u0.len() != grid.cells * n {
        return Err(Error::Precondition(format!(
            "initial data has {} values, expected {} × {}",
            u0.len(),
            grid.cells,
            n
        )));
    }
    if !(dt > 0.0 && t_final >= 0.0) {
        return Err(Error::Precondition("time step and horizon must be positive".into()));
    }
    if scheme == Scheme::Upwind && !op.is_diagonal() {
        return Err(Error::Precondition("upwind scheme needs a diagonal operator".into()));
    }
    if u0.iter().any(|x| !x.is_finite()) {
        return Err(Error::Blowup { t: 0.0 });
    }
    let h = grid.spacing();
    let steps = ((t_final / dt).ceil() as usize).max(1);
    let dt = t_final / steps as f64;
    let cfl = max_speed(op, u0)? * dt / h;
    if cfl > scheme.cfl_limit() {
        return Err(Error::Cfl {
            cfl,
            limit: scheme.cfl_limit(),
        });
    }
    let stride = steps.div_ceil(MAX_SAMPLES);
    let len = u0.len();
    let mut u = u0.to_vec();
    let mut a = vec![0.0; n * n];
    let mut k = [vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    let mut stage = vec![0.0; len];
    let mut times = vec![0.0];
    let mut states = vec![u.clone()];
    for step in 1..=steps {
        match scheme {
            Scheme::Rk4Central => {
                central_rhs(op, &u, h, &mut k[0], &mut a)?;
                for (coef, (src, dst)) in [(0.5, (0, 1)), (0.5, (1, 2)), (1.0, (2, 3))] {
                    for idx in 0..len {
                        stage[idx] = u[idx] + coef * dt * k[src][idx];
                    }
                    central_rhs(op, &stage, h, &mut k[dst], &mut a)?;
                }
                for idx in 0..len {
                    u[idx] += dt / 6.0 * (k[0][idx] + 2.0 * k[1][idx] + 2.0 * k[2][idx] + k[3][idx]);
                }
            }
            Scheme::Upwind => {
                upwind_rhs(op, &u, h, &mut k[0], &mut a)?;
                for idx in 0..len {
                    u[idx] += dt * k[0][idx];
                }
            }
        }
        let t = step as f64 * dt;
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::Blowup { t });
        }
        if step % stride == 0 || step == steps {
            times.push(t);
            states.push(u.clone());
        }
    }
    Ok(Trajectory {
        grid: *grid,
        dim: n,
        scheme,
        dt,
        steps,
        cfl,
        times,
        states,
    })
}

/// Periodic trapezoidal rule for `∫F dτ` over one state.
pub fn integrate(f: &CompiledFun, state: &[f64], dim: usize, h: f64) -> Result<f64> {
    let vals = state
        .chunks(dim)
        .enumerate()
        .map(|(c, u)| f.eval(u).map_err(|d| singular(c, d)))
        .collect::<Result<Vec<f64>>>()?;
    let m = vals.len();
    Ok((0..m).map(|c| 0.5 * (vals[c] + vals[(c + 1) % m])).sum::<f64>() * h)
}

/// Maximum over the samples of `|I(t) − I(0)|`, relative to `|I(0)|` or,
/// when that vanishes, to `∫|F| dτ` at the start.
pub fn conservation_drift(traj: &Trajectory, densities: &[CompiledFun]) -> Result<Vec<f64>> {
    let h = traj.grid.spacing();
    densities
        .iter()
        .map(|f| {
            let series = traj
                .states
                .iter()
                .map(|s| integrate(f, s, traj.dim, h))
                .collect::<Result<Vec<f64>>>()?;
            let i0 = series[0];
            let mut scale = i0.abs();
            if scale < 1e-300 {
                scale = traj.states[0]
                    .chunks(traj.dim)
                    .map(|u| f.eval(u).map(f64::abs).unwrap_or(0.0))
                    .sum::<f64>()
                    * h;
            }
            let worst = series.iter().map(|v| (v - i0).abs()).fold(0.0, f64::max);
            Ok(if scale > 0.0 { worst / scale } else { worst })
        })
        .collect()
}

/// `‖Φ_A^T Φ_B^T u0 − Φ_B^T Φ_A^T u0‖∞` with the rk4-central scheme.
pub fn commute_numeric(
    a: &CompiledOperator,
    b: &CompiledOperator,
    u0: &[f64],
    grid: &Grid1D,
    dt: f64,
    t_final: f64,
) -> Result<f64> {
    let s = Scheme::Rk4Central;
    let ab = evolve(a, evolve(b, u0, grid, dt, t_final, s)?.last(), grid, dt, t_final, s)?;
    let ba = evolve(b, evolve(a, u0, grid, dt, t_final, s)?.last(), grid, dt, t_final, s)?;
    Ok(ab
        .last()
        .iter()
        .zip(ba.last())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}
