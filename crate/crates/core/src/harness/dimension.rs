use std::fmt;

use rand::Rng;
use serde::Serialize;

use super::random::{rng, Rng8, MAX_REDRAWS};
use crate::camera::CameraRig;
use crate::error::{Error, Result};
use crate::linalg::{rank_report, Mat};

/// Constrained world configurations whose image variety is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "scenario", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Scenario {
    /// Two points at distance one.
    RigidPair,
    /// Four coplanar points.
    #[serde(rename = "COPLANAR_4")]
    Coplanar4,
    /// Three points with prescribed pairwise distances.
    #[serde(rename = "PAIRWISE_3")]
    Pairwise3 { d12: f64, d13: f64, d23: f64 },
}

impl Scenario {
    /// `RIGID_PAIR`, `COPLANAR_4` or `PAIRWISE_3:d12,d13,d23`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown scenario {s:?}"));
        match s.to_ascii_uppercase().as_str() {
            "RIGID_PAIR" => return Ok(Scenario::RigidPair),
            "COPLANAR_4" => return Ok(Scenario::Coplanar4),
            _ => {}
        }
        let rest = s
            .strip_prefix("PAIRWISE_3")
            .or_else(|| s.strip_prefix("pairwise_3"))
            .ok_or_else(bad)?;
        let rest = rest.trim_start_matches([':', '(']).trim_end_matches(')');
        let d: Vec<f64> = rest
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [d12, d13, d23] = d[..] else {
            return Err(bad());
        };
        Ok(Scenario::Pairwise3 { d12, d13, d23 })
    }

    pub fn parameters(&self) -> usize {
        match self {
            Scenario::RigidPair => 5,
            Scenario::Coplanar4 => 11,
            Scenario::Pairwise3 { .. } => 6,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::RigidPair => f.write_str("RIGID_PAIR"),
            Scenario::Coplanar4 => f.write_str("COPLANAR_4"),
            Scenario::Pairwise3 { d12, d13, d23 } => write!(f, "PAIRWISE_3:{d12},{d13},{d23}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionOptions {
    pub base_points: usize,
    /// Central-difference step.
    pub step: f64,
    /// Rank tolerance relative to the largest pivot.
    pub rank_tol: f64,
    pub seed: u64,
}

impl Default for DimensionOptions {
    fn default() -> Self {
        DimensionOptions {
            base_points: 5,
            step: 1e-6,
            rank_tol: 1e-6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionReport {
    pub scenario: Scenario,
    /// The common rank, or the largest one seen when the ranks disagree.
    pub dimension: usize,
    pub ranks: Vec<usize>,
    pub stable: bool,
    pub parameters: usize,
}

type Point3 = [f64; 3];

/// Rotation `exp([w]_x)` by Rodrigues' formula.
fn rotation(w: &[f64]) -> [[f64; 3]; 3] {
    let theta = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let k = [[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]];
    let (a, b) = if theta < 1e-12 {
        (1.0, 0.5)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    };
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let k2: f64 = (0..3).map(|m| k[i][m] * k[m][j]).sum();
            r[i][j] = if i == j { 1.0 } else { 0.0 } + a * k[i][j] + b * k2;
        }
    }
    r
}

fn rotate(r: &[[f64; 3]; 3], p: &Point3) -> Point3 {
    std::array::from_fn(|i| (0..3).map(|j| r[i][j] * p[j]).sum())
}

/// Triangle with the given side lengths in the plane `z = 0`.
fn planar_triangle(d12: f64, d13: f64, d23: f64) -> Result<[Point3; 3]> {
    if [d12, d13, d23].iter().any(|d| !d.is_finite() || *d <= 0.0) {
        return Err(Error::InvalidParameter("distances must be positive".into()));
    }
    let x = (d12 * d12 + d13 * d13 - d23 * d23) / (2.0 * d12);
    let y2 = d13 * d13 - x * x;
    let scale = d12.max(d13).max(d23).powi(2);
    if y2 < -1e-12 * scale {
        return Err(Error::Infeasible(format!(
            "distances ({d12}, {d13}, {d23}) violate the triangle inequality"
        )));
    }
    Ok([[0.0; 3], [d12, 0.0, 0.0], [x, y2.max(0.0).sqrt(), 0.0]])
}

/// A base configuration and its local parametrization.
struct Chart {
    base: Vec<f64>,
    map: Box<dyn Fn(&[f64]) -> Vec<Point3>>,
}

fn uniform(r: &mut Rng8) -> Point3 {
    std::array::from_fn(|_| r.random_range(-5.0..5.0))
}

fn chart(scenario: Scenario, r: &mut Rng8) -> Result<Chart> {
    Ok(match scenario {
        Scenario::RigidPair => {
            let x = uniform(r);
            let theta = r.random_range(0.3..std::f64::consts::PI - 0.3);
            let phi = r.random_range(0.0..std::f64::consts::TAU);
            Chart {
                base: vec![x[0], x[1], x[2], theta, phi],
                map: Box::new(|p: &[f64]| {
                    let d = [p[3].sin() * p[4].cos(), p[3].sin() * p[4].sin(), p[3].cos()];
                    vec![[p[0], p[1], p[2]], [p[0] + d[0], p[1] + d[1], p[2] + d[2]]]
                }),
            }
        }
        Scenario::Coplanar4 => {
            let mut base: Vec<f64> = (0..3).flat_map(|_| uniform(r)).collect();
            base.push(r.random_range(-1.0..1.0));
            base.push(r.random_range(-1.0..1.0));
            Chart {
                base,
                map: Box::new(|p: &[f64]| {
                    let pt = |i: usize| [p[3 * i], p[3 * i + 1], p[3 * i + 2]];
                    let (a, b, c) = (pt(0), pt(1), pt(2));
                    let (s, t) = (p[9], p[10]);
                    let d = std::array::from_fn(|k| a[k] + s * (b[k] - a[k]) + t * (c[k] - a[k]));
                    vec![a, b, c, d]
                }),
            }
        }
        Scenario::Pairwise3 { d12, d13, d23 } => {
            let tri = planar_triangle(d12, d13, d23)?;
            let w0: Point3 = std::array::from_fn(|_| r.random_range(-3.0..3.0));
            let r0 = rotation(&w0);
            let t0 = uniform(r);
            Chart {
                base: vec![0.0; 6],
                map: Box::new(move |p: &[f64]| {
                    let rot = rotation(&p[..3]);
                    tri.iter()
                        .map(|q| {
                            let v = rotate(&rot, &rotate(&r0, q));
                            std::array::from_fn(|k| v[k] + t0[k] + p[3 + k])
                        })
                        .collect()
                }),
            }
        }
    })
}

/// Affine image coordinates of all points in all cameras, or `None` if some
/// point is too close to a camera's plane at infinity.
fn image_coords(rig: &CameraRig<f64>, pts: &[Point3]) -> Option<Vec<f64>> {
    let mut out = Vec::with_capacity(pts.len() * rig.n() * 2);
    for p in pts {
        for cam in rig.cameras() {
            let a = cam.matrix();
            let h: Vec<f64> = (0..3)
                .map(|i| a[(i, 0)] * p[0] + a[(i, 1)] * p[1] + a[(i, 2)] * p[2] + a[(i, 3)])
                .collect();
            let norm = (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt();
            if h[2].abs() < 1e-3 * norm {
                return None;
            }
            out.push(h[0] / h[2]);
            out.push(h[1] / h[2]);
        }
    }
    Some(out)
}

fn jacobian_rank(rig: &CameraRig<f64>, c: &Chart, opts: &DimensionOptions) -> Option<usize> {
    let f = |p: &[f64]| image_coords(rig, &(c.map)(p));
    let rows = f(&c.base)?.len();
    let k = c.base.len();
    let mut jac = Mat::zeros(rows, k);
    for j in 0..k {
        let h = opts.step * c.base[j].abs().max(1.0);
        let mut plus = c.base.clone();
        let mut minus = c.base.clone();
        plus[j] += h;
        minus[j] -= h;
        let (fp, fm) = (f(&plus)?, f(&minus)?);
        let col: Vec<f64> = fp
            .iter()
            .zip(&fm)
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect();
        // column scaling does not change the rank but evens out the pivots
        let norm = col
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
            .max(f64::MIN_POSITIVE);
        for (i, v) in col.iter().enumerate() {
            jac[(i, j)] = v / norm;
        }
    }
    Some(rank_report(&jac, opts.rank_tol).rank)
}

/// Dimension of the image of a constrained configuration space under the
/// rig, as the Jacobian rank of the composed parametrization at several
/// random feasible points.
pub fn numeric_dimension(
    rig: &CameraRig<f64>,
    scenario: Scenario,
    opts: &DimensionOptions,
) -> Result<DimensionReport> {
    if opts.base_points == 0 {
        return Err(Error::InvalidParameter(
            "need at least one base point".into(),
        ));
    }
    let mut r = rng(opts.seed);
    let mut ranks = Vec::with_capacity(opts.base_points);
    let mut attempts = 0;
    while ranks.len() < opts.base_points {
        attempts += 1;
        if attempts > MAX_REDRAWS {
            return Err(Error::Infeasible(format!(
                "no admissible base point for {scenario}"
            )));
        }
        let c = chart(scenario, &mut r)?;
        if let Some(rk) = jacobian_rank(rig, &c, opts) {
            ranks.push(rk);
        }
    }
    let dimension = *ranks.iter().max().expect("nonempty");
    Ok(DimensionReport {
        scenario,
        dimension,
        stable: ranks.iter().all(|&r| r == dimension),
        ranks,
        parameters: scenario.parameters(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_scenarios() {
        assert_eq!(Scenario::parse("RIGID_PAIR").unwrap(), Scenario::RigidPair);
        assert_eq!(Scenario::parse("coplanar_4").unwrap(), Scenario::Coplanar4);
        assert_eq!(
            Scenario::parse("PAIRWISE_3:1,1,2").unwrap(),
            Scenario::Pairwise3 {
                d12: 1.0,
                d13: 1.0,
                d23: 2.0
            }
        );
        assert_eq!(
            Scenario::parse("PAIRWISE_3(3, 4, 5)").unwrap(),
            Scenario::Pairwise3 {
                d12: 3.0,
                d13: 4.0,
                d23: 5.0
            }
        );
        assert!(Scenario::parse("PAIRWISE_3:1,2").is_err());
        let s = Scenario::Pairwise3 {
            d12: 1.0,
            d13: 2.0,
            d23: 2.5,
        };
        assert_eq!(Scenario::parse(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn rodrigues_is_orthogonal() {
        let r = rotation(&[0.3, -1.2, 0.7]);
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = (0..3).map(|k| r[i][k] * r[j][k]).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn triangles() {
        let t = planar_triangle(3.0, 4.0, 5.0).unwrap();
        let dist =
            |a: Point3, b: Point3| ((0..3).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>()).sqrt();
        assert!((dist(t[1], t[2]) - 5.0).abs() < 1e-12);
        assert!((dist(t[0], t[2]) - 4.0).abs() < 1e-12);
        assert!(planar_triangle(1.0, 1.0, 2.0).is_ok());
        assert!(matches!(
            planar_triangle(1.0, 2.0, 5.0),
            Err(Error::Infeasible(_))
        ));
        assert!(planar_triangle(0.0, 1.0, 1.0).is_err());
    }
}
