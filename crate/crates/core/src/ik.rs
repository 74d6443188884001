//! Inverse geometric model.
//!
//! For a section point `(ρ, z)` put `R² = ρ² + z²`. Eliminating θ₂ from
//!
//! ```text
//! R² = 1 + F² + G² + 2 F cos θ₂,    z = −F sin θ₂
//! ```
//!
//! leaves the univariate residual
//!
//! ```text
//! f(θ₃) = (R² − 1 − F² − G²)² + 4 z² − 4 F²
//! ```
//!
//! whose real roots are exactly the θ₃ of the solutions; each root fixes θ₂
//! through `cos θ₂ = (R² − 1 − F² − G²)/(2F)`, `sin θ₂ = −z/F`. `f` is a
//! trigonometric polynomial of degree two, so it has at most four roots. They
//! are located by a dense periodic scan and refined by bisection.

use serde::{Deserialize, Serialize};

use crate::model::{
    angle_diff, det_j_section, fk, CartesianPoint, JointConfig, Params, SectionPoint,
};
use crate::roots::{bisect, scan_brackets, Bracket, PeriodicGrid};

/// Default number of θ₃ samples of the residual scan.
pub const DEFAULT_SAMPLES: usize = 2048;

/// Two solutions closer than this in every joint are the same posture.
pub const DEDUP_THRESHOLD: f64 = 1e-6;

/// One `(θ₂, θ₃)` solution of the section problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionSolution {
    pub theta2: f64,
    pub theta3: f64,
    /// The solution sits on (or numerically next to) a singular curve:
    /// `|det J|` below the singularity tolerance, a root pair closer than one
    /// scan step, or the effector on axis 2 where θ₂ is indeterminate.
    pub boundary: bool,
}

/// All postures reaching one Cartesian target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostureSet {
    pub solutions: Vec<JointConfig>,
    pub target: CartesianPoint,
    /// Largest `‖fk(q) − target‖` over the solutions.
    pub residual_max: f64,
    /// Some solution lies on a singular curve.
    pub boundary: bool,
    /// Target on the Z axis: θ₁ is indeterminate and reported as 0.
    pub on_axis: bool,
}

impl PostureSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// Inverse-kinematics solver with the per-manipulator θ₃ tables cached, for
/// repeated queries on one manipulator.
#[derive(Debug, Clone)]
pub struct IkSolver {
    params: Params,
    grid: PeriodicGrid,
    /// `1 + F² + G²` at each sample
    k: Vec<f64>,
    /// `4 F²` at each sample
    four_f2: Vec<f64>,
}

impl IkSolver {
    pub fn new(p: &Params) -> Self {
        Self::with_samples(p, DEFAULT_SAMPLES)
    }

    pub fn with_samples(p: &Params, samples: usize) -> Self {
        let samples = samples.max(16);
        let grid = PeriodicGrid::new(samples);
        let mut k = Vec::with_capacity(samples);
        let mut four_f2 = Vec::with_capacity(samples);
        for &t in &grid.thetas {
            let (f, g) = p.fg(t);
            k.push(1.0 + f * f + g * g);
            four_f2.push(4.0 * f * f);
        }
        IkSolver {
            params: *p,
            grid,
            k,
            four_f2,
        }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    fn residual(&self, r2: f64, z: f64, theta3: f64) -> f64 {
        let (f, g) = self.params.fg(theta3);
        let d = r2 - 1.0 - f * f - g * g;
        d * d + 4.0 * z * z - 4.0 * f * f
    }

    fn brackets(&self, rho: f64, z: f64) -> Vec<Bracket> {
        let r2 = rho * rho + z * z;
        let z2 = 4.0 * z * z;
        let ys: Vec<f64> = self
            .k
            .iter()
            .zip(&self.four_f2)
            .map(|(&k, &f2)| {
                let d = r2 - k;
                d * d + z2 - f2
            })
            .collect();
        let mut out = Vec::with_capacity(4);
        scan_brackets(&self.grid, &ys, |t| self.residual(r2, z, t), &mut out);
        out
    }

    /// Normalized section coordinates of a physical point.
    fn normalize(&self, s: &SectionPoint) -> (f64, f64) {
        let l = self.params.scale();
        (s.rho.abs() / l, s.z / l)
    }

    /// Number of distinct solutions at `s`, without refining them. A tangent
    /// (double) root on a singular curve counts once, so odd counts only occur
    /// on singular curves.
    pub fn count(&self, s: &SectionPoint) -> usize {
        let (rho, z) = self.normalize(s);
        let reach = self.params.normalized_reach();
        if rho * rho + z * z > reach * reach * (1.0 + 1e-12) {
            return 0;
        }
        self.brackets(rho, z).len()
    }

    /// All real `(θ₂, θ₃)` solutions at `s`, sorted by θ₃.
    pub fn solve_section(&self, s: &SectionPoint) -> Vec<SectionSolution> {
        let (rho, z) = self.normalize(s);
        let reach = self.params.normalized_reach();
        if rho * rho + z * z > reach * reach * (1.0 + 1e-12) {
            return Vec::new();
        }
        let r2 = rho * rho + z * z;
        let p = &self.params;
        let tol = p.det_tolerance();
        let mut out: Vec<SectionSolution> = Vec::with_capacity(4);
        for b in self.brackets(rho, z) {
            let theta3 = crate::model::wrap_angle(bisect(|t| self.residual(r2, z, t), b.lo, b.hi));
            let (f, g) = p.fg(theta3);
            let mut boundary = b.paired;
            let theta2 = if f.abs() < 1e-12 {
                boundary = true;
                0.0
            } else {
                let c2 = (r2 - 1.0 - f * f - g * g) / (2.0 * f);
                let s2 = -z / f;
                s2.atan2(c2)
            };
            if det_j_section(p, theta2, theta3).abs() < tol {
                boundary = true;
            }
            let dup = out.iter_mut().find(|o| {
                angle_diff(o.theta3, theta3).abs() < DEDUP_THRESHOLD
                    && angle_diff(o.theta2, theta2).abs() < DEDUP_THRESHOLD
            });
            match dup {
                Some(o) => o.boundary = true,
                None => out.push(SectionSolution {
                    theta2,
                    theta3,
                    boundary,
                }),
            }
        }
        out.sort_by(|a, b| a.theta3.total_cmp(&b.theta3));
        out
    }

    /// All postures reaching a Cartesian target.
    pub fn solve(&self, target: &CartesianPoint) -> PostureSet {
        let l = self.params.scale();
        let section = SectionPoint::new(target.x.hypot(target.y), target.z);
        let on_axis = section.rho / l < 1e-12;
        let heading = if on_axis {
            0.0
        } else {
            target.y.atan2(target.x)
        };
        let mut solutions = Vec::new();
        let mut boundary = on_axis;
        let mut residual_max = 0.0f64;
        for sol in self.solve_section(&section) {
            let (f, g) = self.params.fg(sol.theta3);
            let a = 1.0 + f * sol.theta2.cos();
            let theta1 = if on_axis { 0.0 } else { heading - g.atan2(a) };
            let q = JointConfig::new(theta1, sol.theta2, sol.theta3);
            residual_max = residual_max.max(fk(&self.params, &q).distance(target));
            boundary |= sol.boundary;
            solutions.push(q);
        }
        PostureSet {
            solutions,
            target: *target,
            residual_max,
            boundary,
            on_axis,
        }
    }
}

/// `(θ₂, θ₃)` solutions for a section point.
pub fn ik_section(p: &Params, s: &SectionPoint) -> Vec<SectionSolution> {
    IkSolver::new(p).solve_section(s)
}

/// Full inverse kinematics of a Cartesian target.
pub fn ik_full(p: &Params, target: &CartesianPoint) -> PostureSet {
    IkSolver::new(p).solve(target)
}

/// Number of inverse-kinematic solutions (postures) at a section point.
pub fn count_solutions(p: &Params, s: &SectionPoint) -> usize {
    IkSolver::new(p).count(s)
}
