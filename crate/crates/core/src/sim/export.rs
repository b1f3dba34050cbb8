use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{Grid1D, Scheme, Trajectory};

/// One row per time sample and cell: `time,cell,tau,u1,…,un`.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("time,cell,tau");
    for i in 1..=traj.dim {
        let _ = write!(out, ",u{i}");
    }
    out.push('\n');
    let h = traj.grid.spacing();
    for (t, state) in traj.times.iter().zip(&traj.states) {
        for (c, u) in state.chunks(traj.dim).enumerate() {
            let _ = write!(out, "{t:.12e},{c},{:.12e}", c as f64 * h);
            for x in u {
                let _ = write!(out, ",{x:.12e}");
            }
            out.push('\n');
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scheme: Scheme,
    pub grid: Grid1D,
    pub dt: f64,
    pub t_final: f64,
    pub steps: usize,
    pub cfl: f64,
    /// Relative drift per monitored density.
    pub drifts: Vec<f64>,
}

impl RunManifest {
    pub fn new(traj: &Trajectory, drifts: Vec<f64>) -> Self {
        RunManifest {
            scheme: traj.scheme,
            grid: traj.grid,
            dt: traj.dt,
            t_final: traj.times.last().copied().unwrap_or(0.0),
            steps: traj.steps,
            cfl: traj.cfl,
            drifts,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}
