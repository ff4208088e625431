use serde::Serialize;

use crate::camera::{CameraRig, ProjectivePoint};
use crate::error::{Error, Result};
use crate::linalg::{solve, Mat};
use crate::tolerance::Tolerances;
use crate::triangulate::initial_world_point;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefineOptions {
    pub max_iterations: usize,
    pub initial_damping: f64,
    /// Stop once a step is shorter than this.
    pub step_tol: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions {
            max_iterations: 200,
            initial_damping: 1e-3,
            step_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Refinement {
    pub x: [f64; 3],
    pub y: [f64; 3],
    /// Sum of squared affine reprojection errors of both points.
    pub residual: f64,
    /// The same for the initial estimate after moving it onto the constraint.
    pub initial_residual: f64,
    pub iterations: usize,
    /// False when the iteration cap was hit; the best iterate is returned
    /// either way.
    pub converged: bool,
    /// `|X - Y|^2 - 1`.
    pub distance_residual: f64,
}

type V3 = [f64; 3];

fn norm(v: &V3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn unit(v: &V3) -> V3 {
    let n = norm(v);
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Orthonormal basis of the plane orthogonal to the unit vector `d`.
fn tangent_basis(d: &V3) -> (V3, V3) {
    let helper = if d[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let cross = |a: &V3, b: &V3| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let e1 = unit(&cross(d, &helper));
    let e2 = cross(d, &e1);
    (e1, e2)
}

/// State: a point and a unit direction; the second point is `x + d`.
#[derive(Clone, Copy)]
struct State {
    x: V3,
    d: V3,
}

impl State {
    fn y(&self) -> V3 {
        [
            self.x[0] + self.d[0],
            self.x[1] + self.d[1],
            self.x[2] + self.d[2],
        ]
    }

    /// Move by `p = (dx, a, b)` in the chart at `self`.
    fn step(&self, p: &[f64], basis: &(V3, V3)) -> State {
        let (e1, e2) = basis;
        let d = std::array::from_fn(|k| self.d[k] + p[3] * e1[k] + p[4] * e2[k]);
        State {
            x: std::array::from_fn(|k| self.x[k] + p[k]),
            d: unit(&d),
        }
    }
}

fn residuals(
    rig: &CameraRig<f64>,
    s: &State,
    u: &[ProjectivePoint<f64>],
    v: &[ProjectivePoint<f64>],
) -> Vec<f64> {
    let mut out = Vec::with_capacity(4 * rig.n());
    for (pt, tuple) in [(s.x, u), (s.y(), v)] {
        for (cam, img) in rig.cameras().iter().zip(tuple) {
            let a = cam.matrix();
            let h: Vec<f64> = (0..3)
                .map(|i| a[(i, 0)] * pt[0] + a[(i, 1)] * pt[1] + a[(i, 2)] * pt[2] + a[(i, 3)])
                .collect();
            let c = img.coords();
            out.push(h[0] / h[2] - c[0] / c[2]);
            out.push(h[1] / h[2] - c[1] / c[2]);
        }
    }
    out
}

fn cost(r: &[f64]) -> f64 {
    let c: f64 = r.iter().map(|v| v * v).sum();
    if c.is_finite() {
        c
    } else {
        f64::INFINITY
    }
}

/// Least-squares world pair at distance one from noisy images, by damped
/// Gauss-Newton over a point and a unit direction. Only steps that lower
/// the cost are taken, so the result is never worse than the start.
pub fn rigid_triangulate_refine(
    rig: &CameraRig<f64>,
    u: &[ProjectivePoint<f64>],
    v: &[ProjectivePoint<f64>],
    opts: &RefineOptions,
) -> Result<Refinement> {
    if u.len() != rig.n() || v.len() != rig.n() {
        return Err(Error::Shape(format!(
            "image tuples must hold {} points",
            rig.n()
        )));
    }
    let tol = Tolerances::default();
    let start = |t: &[ProjectivePoint<f64>]| -> Result<V3> {
        let p = initial_world_point(rig, &t.to_vec(), &tol)
            .ok_or_else(|| Error::Infeasible("no initial world point".into()))?;
        Ok([p[0], p[1], p[2]])
    };
    let (x0, y0) = (start(u)?, start(v)?);
    // move both points symmetrically onto the constraint
    let diff = [y0[0] - x0[0], y0[1] - x0[1], y0[2] - x0[2]];
    let d = if norm(&diff) > 1e-12 {
        unit(&diff)
    } else {
        [0.0, 0.0, 1.0]
    };
    let mid: V3 = std::array::from_fn(|k| 0.5 * (x0[k] + y0[k]));
    let mut state = State {
        x: std::array::from_fn(|k| mid[k] - 0.5 * d[k]),
        d,
    };
    let mut r = residuals(rig, &state, u, v);
    let mut current = cost(&r);
    let initial = current;
    let mut damping = opts.initial_damping;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        if current == 0.0 {
            converged = true;
            break;
        }
        iterations += 1;
        let basis = tangent_basis(&state.d);
        // central-difference Jacobian, 5 parameters
        let m = r.len();
        let mut jac = vec![[0.0; 5]; m];
        for j in 0..5 {
            let h = 1e-7
                * if j < 3 {
                    state.x[j].abs().max(1.0)
                } else {
                    1.0
                };
            let mut p = [0.0; 5];
            p[j] = h;
            let rp = residuals(rig, &state.step(&p, &basis), u, v);
            p[j] = -h;
            let rm = residuals(rig, &state.step(&p, &basis), u, v);
            for i in 0..m {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let mut jtj = [[0.0; 5]; 5];
        let mut jtr = [0.0; 5];
        for i in 0..m {
            for a in 0..5 {
                jtr[a] += jac[i][a] * r[i];
                for b in 0..5 {
                    jtj[a][b] += jac[i][a] * jac[i][b];
                }
            }
        }
        // try increasing damping until the cost drops
        let mut accepted = None;
        while damping < 1e12 {
            let rows: Vec<Vec<f64>> = (0..5)
                .map(|a| {
                    (0..5)
                        .map(|b| {
                            jtj[a][b]
                                + if a == b {
                                    damping * (jtj[a][a] + 1e-12)
                                } else {
                                    0.0
                                }
                        })
                        .collect()
                })
                .collect();
            let rhs: Vec<f64> = jtr.iter().map(|g| -g).collect();
            if let Ok(step) = solve(&Mat::from_rows(rows).expect("5x5"), &rhs) {
                let cand = state.step(&step, &basis);
                let rc = residuals(rig, &cand, u, v);
                let cc = cost(&rc);
                if cc < current {
                    state = cand;
                    r = rc;
                    current = cc;
                    accepted = Some(step.iter().map(|s| s * s).sum::<f64>().sqrt());
                    damping = (damping / 3.0).max(1e-12);
                    break;
                }
            }
            damping *= 4.0;
        }
        match accepted {
            // no descent left at working precision
            None => {
                converged = true;
                break;
            }
            Some(len) if len < opts.step_tol => {
                converged = true;
                break;
            }
            Some(_) => {}
        }
    }
    let y = state.y();
    let dist2: f64 = (0..3).map(|k| (y[k] - state.x[k]).powi(2)).sum();
    Ok(Refinement {
        x: state.x,
        y,
        residual: current,
        initial_residual: initial,
        iterations,
        converged,
        distance_residual: dist2 - 1.0,
    })
}
