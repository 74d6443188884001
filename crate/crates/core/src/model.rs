//! Geometry of the orthogonal 3R family: parameters, forward kinematics,
//! Jacobian, the factored singularity determinant and the reach.
//!
//! The chain uses the modified Denavit–Hartenberg convention:
//!
//! | joint | α    | d  | θ  | r  |
//! |-------|------|----|----|----|
//! | 1     | 0    | 0  | θ₁ | 0  |
//! | 2     | −90° | d₂ | θ₂ | r₂ |
//! | 3     | +90° | d₃ | θ₃ | 0  |
//!
//! and the end point sits at distance d₄ along the x-axis of frame 3.
//! All lengths are stored normalized by d₂; `scale` restores physical units.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalized geometric parameters of one manipulator (d₂ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    d3: f64,
    d4: f64,
    r2: f64,
    scale: f64,
}

impl Params {
    pub fn new(d3: f64, d4: f64, r2: f64) -> Result<Self> {
        Self::with_scale(d3, d4, r2, 1.0)
    }

    /// Parameters with a physical d₂ length; `d3`, `d4` and `r2` stay
    /// normalized by it.
    pub fn with_scale(d3: f64, d4: f64, r2: f64, d2_scale: f64) -> Result<Self> {
        for (name, value) in [("d3", d3), ("d4", d4), ("r2", r2), ("d2", d2_scale)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(Params {
            d3,
            d4,
            r2,
            scale: d2_scale,
        })
    }

    /// Builds normalized parameters from four physical lengths.
    pub fn from_lengths(d2: f64, d3: f64, d4: f64, r2: f64) -> Result<Self> {
        if !(d2.is_finite() && d2 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "d2",
                value: d2,
            });
        }
        Self::with_scale(d3 / d2, d4 / d2, r2 / d2, d2)
    }

    pub fn d3(&self) -> f64 {
        self.d3
    }

    pub fn d4(&self) -> f64 {
        self.d4
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    /// Physical length of d₂.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Same manipulator with d₂ = 1.
    pub fn normalized(&self) -> Params {
        Params {
            scale: 1.0,
            ..*self
        }
    }

    /// `F = d₃ + d₄ cos θ₃` and `G = d₄ sin θ₃ + r₂`, normalized.
    #[inline]
    pub(crate) fn fg(&self, theta3: f64) -> (f64, f64) {
        let (s3, c3) = theta3.sin_cos();
        (self.d3 + self.d4 * c3, self.d4 * s3 + self.r2)
    }

    /// Singularity tolerance on |det J| for this manipulator, in normalized
    /// units: `1e-9 · d₄ · reach²`.
    pub(crate) fn det_tolerance(&self) -> f64 {
        let reach = self.normalized_reach();
        1e-9 * self.d4 * reach * reach
    }

    #[inline]
    pub(crate) fn normalized_reach(&self) -> f64 {
        self.d4 + self.r2.hypot(self.d3 + 1.0)
    }
}

/// Wraps an angle to `[-π, π)`.
#[inline]
pub fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let w = theta - two_pi * ((theta + PI) / two_pi).floor();
    // floor can land exactly on the upper bound through rounding
    if w >= PI {
        w - two_pi
    } else {
        w
    }
}

/// Joint angles, each wrapped to `[-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointConfig {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl JointConfig {
    pub fn new(theta1: f64, theta2: f64, theta3: f64) -> Self {
        JointConfig {
            theta1: wrap_angle(theta1),
            theta2: wrap_angle(theta2),
            theta3: wrap_angle(theta3),
        }
    }

    /// Largest per-joint angular distance to `other`, respecting wraparound.
    pub fn angular_distance(&self, other: &JointConfig) -> f64 {
        angle_diff(self.theta1, other.theta1)
            .abs()
            .max(angle_diff(self.theta2, other.theta2).abs())
            .max(angle_diff(self.theta3, other.theta3).abs())
    }
}

/// Signed difference `a - b` wrapped to `[-π, π)`.
#[inline]
pub fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_angle(a - b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CartesianPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        CartesianPoint { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &CartesianPoint) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// A point of the half cross-section `(ρ, z)` of the axially symmetric
/// workspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub rho: f64,
    pub z: f64,
}

impl SectionPoint {
    /// Negative `rho` is folded back onto the half plane.
    pub fn new(rho: f64, z: f64) -> Self {
        SectionPoint { rho: rho.abs(), z }
    }
}

pub fn fk(p: &Params, q: &JointConfig) -> CartesianPoint {
    let (s1, c1) = q.theta1.sin_cos();
    let (s2, c2) = q.theta2.sin_cos();
    let (f, g) = p.fg(q.theta3);
    let a = 1.0 + f * c2;
    let l = p.scale;
    CartesianPoint {
        x: l * (a * c1 - g * s1),
        y: l * (a * s1 + g * c1),
        z: l * (-f * s2),
    }
}

/// Position Jacobian `∂(x, y, z)/∂(θ₁, θ₂, θ₃)`.
pub fn jacobian(p: &Params, q: &JointConfig) -> Matrix3<f64> {
    let (s1, c1) = q.theta1.sin_cos();
    let (s2, c2) = q.theta2.sin_cos();
    let (s3, c3) = q.theta3.sin_cos();
    let (f, g) = p.fg(q.theta3);
    let a = 1.0 + f * c2;
    let d4 = p.d4;

    // d/dθ₃ of (a, G, z) along the chain
    let da3 = -d4 * s3 * c2;
    let dg3 = d4 * c3;

    let m = Matrix3::new(
        -(a * s1 + g * c1),
        -f * s2 * c1,
        da3 * c1 - dg3 * s1,
        a * c1 - g * s1,
        -f * s2 * s1,
        da3 * s1 + dg3 * c1,
        0.0,
        -f * c2,
        d4 * s3 * s2,
    );
    m * p.scale
}

/// `det J = d₄ (d₃ + d₄ c₃) [d₂ s₃ + (d₃ s₃ − r₂ c₃) c₂]`, independent of θ₁.
pub fn det_j_closed(p: &Params, q: &JointConfig) -> f64 {
    det_j_section(p, q.theta2, q.theta3) * p.scale.powi(3)
}

/// Normalized `det J` as a function of `(θ₂, θ₃)` only.
#[inline]
pub(crate) fn det_j_section(p: &Params, theta2: f64, theta3: f64) -> f64 {
    let (s3, c3) = theta3.sin_cos();
    let c2 = theta2.cos();
    p.d4 * (p.d3 + p.d4 * c3) * (s3 + (p.d3 * s3 - p.r2 * c3) * c2)
}

/// Radius of the smallest origin-centred sphere containing the workspace:
/// `ρ_max = d₄ + √(r₂² + (d₃ + 1)²)`.
pub fn reach(p: &Params) -> f64 {
    p.normalized_reach() * p.scale
}

pub fn to_section(pt: &CartesianPoint) -> SectionPoint {
    SectionPoint {
        rho: pt.x.hypot(pt.y),
        z: pt.z,
    }
}

/// Normalized section image `(ρ, z)` of a joint configuration; θ₁ plays no
/// role.
#[inline]
pub(crate) fn section_of(p: &Params, theta2: f64, theta3: f64) -> (f64, f64) {
    let (s2, c2) = theta2.sin_cos();
    let (f, g) = p.fg(theta3);
    let a = 1.0 + f * c2;
    (a.hypot(g), -f * s2)
}
