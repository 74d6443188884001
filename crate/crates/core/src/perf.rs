//! Performance indices.
//!
//! * the inverse condition number `K⁻¹ = σ_min / σ_max` of the position
//!   Jacobian, averaged and maximized over a uniform `(θ₂, θ₃)` grid;
//! * the proportions of the 2- and 4-solution regions of the workspace
//!   section, with their revolved volume counterparts.
//!
//! Singular values do not depend on θ₁, which is therefore left out of every
//! sweep.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ik::IkSolver;
use crate::model::{jacobian, JointConfig, Params, SectionPoint};

pub const DEFAULT_KINV_RESOLUTION: usize = 720;
pub const MIN_KINV_RESOLUTION: usize = 180;
pub const DEFAULT_SECTION_RESOLUTION: usize = 400;
pub const MIN_SECTION_RESOLUTION: usize = 200;

/// Inverse condition number `σ_min / σ_max` of the Jacobian at `q`.
pub fn inv_condition(p: &Params, q: &JointConfig) -> f64 {
    kinv_section(&p.normalized(), q.theta2, q.theta3)
}

#[inline]
fn kinv_section(p: &Params, theta2: f64, theta3: f64) -> f64 {
    let sv = jacobian(p, &JointConfig::new(0.0, theta2, theta3)).singular_values();
    let max = sv.max();
    if max > 0.0 {
        (sv.min() / max).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinvReport {
    pub kinv_mean: f64,
    pub kinv_max: f64,
    /// Configuration attaining `kinv_max` (θ₁ = 0).
    pub argmax: JointConfig,
    /// Grid step in radians.
    pub grid_step: f64,
}

/// Mean and maximum of `K⁻¹` over an `n × n` grid of `(θ₂, θ₃) ∈ [-π, π)²`.
/// The maximum is then polished by a compass search started from the best
/// grid cells.
pub fn kinv_sweep(p: &Params, n: usize) -> Result<KinvReport> {
    if n < MIN_KINV_RESOLUTION {
        return Err(Error::ResolutionTooLow {
            got: n,
            min: MIN_KINV_RESOLUTION,
        });
    }
    let p = p.normalized();
    let h = 2.0 * PI / n as f64;
    let mut sum = 0.0;
    let mut comp = 0.0;
    // a few best cells as ascent seeds
    let mut best: Vec<(f64, f64, f64)> = Vec::with_capacity(5);
    for i in 0..n {
        let t2 = -PI + h * i as f64;
        let mut row = 0.0;
        for j in 0..n {
            let t3 = -PI + h * j as f64;
            let k = kinv_section(&p, t2, t3);
            row += k;
            if best.len() < 4 || k > best[best.len() - 1].0 {
                best.push((k, t2, t3));
                best.sort_by(|a, b| b.0.total_cmp(&a.0));
                best.truncate(4);
            }
        }
        // Kahan summation over rows keeps the mean order-stable
        let y = row - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let mean = sum / (n * n) as f64;

    let mut top = best[0];
    for &(k, t2, t3) in &best {
        let refined = compass_ascent(|a, b| kinv_section(&p, a, b), (t2, t3), k, h);
        if refined.0 > top.0 {
            top = refined;
        }
    }
    Ok(KinvReport {
        kinv_mean: mean,
        kinv_max: top.0,
        argmax: JointConfig::new(0.0, top.1, top.2),
        grid_step: h,
    })
}

/// Derivative-free local ascent: try the four axis moves, halve the step when
/// none improves.
fn compass_ascent<F>(f: F, start: (f64, f64), f0: f64, step: f64) -> (f64, f64, f64)
where
    F: Fn(f64, f64) -> f64,
{
    let (mut x, mut y, mut fx) = (start.0, start.1, f0);
    let mut s = step;
    while s > 1e-10 {
        let mut moved = false;
        for (dx, dy) in [
            (s, 0.0),
            (-s, 0.0),
            (0.0, s),
            (0.0, -s),
            (s, s),
            (-s, -s),
            (s, -s),
            (-s, s),
        ] {
            let v = f(x + dx, y + dy);
            if v > fx {
                x += dx;
                y += dy;
                fx = v;
                moved = true;
                break;
            }
        }
        if !moved {
            s *= 0.5;
        }
    }
    (fx, x, y)
}

/// Region proportions under one measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportions {
    pub p4: f64,
    pub p2: f64,
    pub p_total: f64,
}

impl Proportions {
    fn new(p2: f64, p4: f64) -> Self {
        Proportions {
            p4,
            p2,
            p_total: p2 + p4,
        }
    }
}

/// Workspace index of one manipulator.
///
/// `p4`, `p2` and `p_total` compare the area of the 4-, 2- and all-solution
/// regions of the `(ρ, z)` half-section with the half-disc of radius `ρ_max`.
/// `revolved` weights every cell by its revolution about Z, giving
/// true volume fractions of the sphere of radius `ρ_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeReport {
    pub p4: f64,
    pub p2: f64,
    pub p_total: f64,
    pub revolved: Proportions,
    pub rho_max: f64,
    pub grid: (usize, usize),
}

/// Sweeps the quarter section `[0, ρ_max] × [0, ρ_max]` cell by cell (the
/// other half follows by z-symmetry) and accumulates the 2- and 4-solution
/// cells, both as plain section area and with the revolution weight
/// `2 · 2πρ Δρ Δz`.
pub fn volume_proportions(p: &Params, n_rho: usize, n_z: usize) -> Result<VolumeReport> {
    let min = n_rho.min(n_z);
    if min < MIN_SECTION_RESOLUTION {
        return Err(Error::ResolutionTooLow {
            got: min,
            min: MIN_SECTION_RESOLUTION,
        });
    }
    let norm = p.normalized();
    let solver = IkSolver::new(&norm);
    let rho_max = norm.normalized_reach();
    let d_rho = rho_max / n_rho as f64;
    let d_z = rho_max / n_z as f64;
    let (mut a2, mut a4, mut v2, mut v4) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n_rho {
        let rho = (i as f64 + 0.5) * d_rho;
        let mut c2 = 0usize;
        let mut c4 = 0usize;
        for j in 0..n_z {
            let z = (j as f64 + 0.5) * d_z;
            match solver.count(&SectionPoint::new(rho, z)) {
                2 => c2 += 1,
                4 => c4 += 1,
                _ => {}
            }
        }
        let cell = d_rho * d_z;
        a2 += cell * c2 as f64;
        a4 += cell * c4 as f64;
        let w = 4.0 * PI * rho * cell;
        v2 += w * c2 as f64;
        v4 += w * c4 as f64;
    }
    let quarter_disc = PI * rho_max * rho_max / 4.0;
    let sphere = 4.0 / 3.0 * PI * rho_max.powi(3);
    let section = Proportions::new(a2 / quarter_disc, a4 / quarter_disc);
    Ok(VolumeReport {
        p4: section.p4,
        p2: section.p2,
        p_total: section.p_total,
        revolved: Proportions::new(v2 / sphere, v4 / sphere),
        rho_max: rho_max * p.scale(),
        grid: (n_rho, n_z),
    })
}

/// Scalar plotted by an [`IsoMap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    KinvMean,
    KinvMax,
    P4,
    P2,
    PTotal,
}

impl MapKind {
    pub fn name(&self) -> &'static str {
        match self {
            MapKind::KinvMean => "kinv_mean",
            MapKind::KinvMax => "kinv_max",
            MapKind::P4 => "p4",
            MapKind::P2 => "p2",
            MapKind::PTotal => "p_total",
        }
    }

    pub fn is_kinv(&self) -> bool {
        matches!(self, MapKind::KinvMean | MapKind::KinvMax)
    }
}

impl std::str::FromStr for MapKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "kinv_mean" | "mean" => Ok(MapKind::KinvMean),
            "kinv_max" | "max" => Ok(MapKind::KinvMax),
            "p4" => Ok(MapKind::P4),
            "p2" => Ok(MapKind::P2),
            "p_total" | "total" => Ok(MapKind::PTotal),
            other => Err(format!("unknown map kind `{other}`")),
        }
    }
}

/// Closed sample axis `lo, …, hi` with `n` evenly spaced values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo)
            || n == 0
            || (n > 1 && hi == lo)
        {
            return Err(Error::InvalidRange { lo, hi });
        }
        Ok(Axis { lo, hi, n })
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.n == 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.value(i))
    }
}

/// A scalar field over a `(d₃, d₄)` parameter section at fixed `r₂`.
/// `values[j][i]` belongs to `d4.value(j)` and `d3.value(i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoMap {
    pub schema: String,
    pub kind: MapKind,
    pub d3: Axis,
    pub d4: Axis,
    pub r2: f64,
    pub inner_resolution: usize,
    pub values: Vec<Vec<f64>>,
}

pub const ISOMAP_SCHEMA: &str = "ortho3r.isomap/1";

/// Evaluates `kind` at every `(d₃, d₄)` node. `inner_res` is the `(θ₂, θ₃)`
/// grid of the K⁻¹ sweep or the section grid of the volume sweep.
pub fn iso_map(kind: MapKind, d3: Axis, d4: Axis, r2: f64, inner_res: usize) -> Result<IsoMap> {
    let mut values = Vec::with_capacity(d4.n);
    for b in d4.values() {
        let mut row = Vec::with_capacity(d3.n);
        for a in d3.values() {
            let p = Params::new(a, b, r2)?;
            let v = match kind {
                MapKind::KinvMean => kinv_sweep(&p, inner_res)?.kinv_mean,
                MapKind::KinvMax => kinv_sweep(&p, inner_res)?.kinv_max,
                _ => {
                    let r = volume_proportions(&p, inner_res, inner_res)?;
                    match kind {
                        MapKind::P4 => r.p4,
                        MapKind::P2 => r.p2,
                        _ => r.p_total,
                    }
                }
            };
            row.push(v);
        }
        values.push(row);
    }
    Ok(IsoMap {
        schema: ISOMAP_SCHEMA.to_string(),
        kind,
        d3,
        d4,
        r2,
        inner_resolution: inner_res,
        values,
    })
}

impl IsoMap {
    /// Row-major CSV: comment lines carry the axis metadata, the header row
    /// lists the d₃ values and each following row starts with its d₄ value.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# schema: {}", self.schema);
        let _ = writeln!(out, "# kind: {}", self.kind.name());
        let _ = writeln!(out, "# r2: {}", self.r2);
        let _ = writeln!(out, "# d3: {}:{}:{}", self.d3.lo, self.d3.hi, self.d3.n);
        let _ = writeln!(out, "# d4: {}:{}:{}", self.d4.lo, self.d4.hi, self.d4.n);
        let _ = writeln!(out, "# inner_resolution: {}", self.inner_resolution);
        out.push_str("d4\\d3");
        for a in self.d3.values() {
            let _ = write!(out, ",{a}");
        }
        out.push('\n');
        for (j, row) in self.values.iter().enumerate() {
            let _ = write!(out, "{}", self.d4.value(j));
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("isomap serializes")
    }

    /// `(d₃, d₄, value)` of the largest cell.
    pub fn argmax(&self) -> (f64, f64, f64) {
        let mut best = (self.d3.lo, self.d4.lo, f64::NEG_INFINITY);
        for (j, row) in self.values.iter().enumerate() {
            for (i, &v) in row.iter().enumerate() {
                if v > best.2 {
                    best = (self.d3.value(i), self.d4.value(j), v);
                }
            }
        }
        best
    }
}

/// Result of the search for an isotropic manipulator along `d₄ = d₃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsotropySearch {
    pub d3: f64,
    pub kinv_max: f64,
    pub kinv_mean: f64,
}

/// Scans `d₃ = d₄ ∈ [lo, hi]` at fixed `r₂` and returns the manipulator with
/// the largest `K⁻¹` maximum, golden-refined around the best scan node.
pub fn isotropy_on_e2(
    r2: f64,
    lo: f64,
    hi: f64,
    samples: usize,
    n: usize,
) -> Result<IsotropySearch> {
    let axis = Axis::new(lo, hi, samples.max(2))?;
    let eval = |d: f64| -> Result<KinvReport> { kinv_sweep(&Params::new(d, d, r2)?, n) };
    let mut best = (lo, f64::NEG_INFINITY);
    for d in axis.values() {
        let k = eval(d)?.kinv_max;
        if k > best.1 {
            best = (d, k);
        }
    }
    let step = (hi - lo) / (axis.n - 1) as f64;
    let a = (best.0 - step).max(lo);
    let b = (best.0 + step).min(hi);
    let (d, _) =
        crate::roots::golden_min(|d| eval(d).map(|r| -r.kinv_max).unwrap_or(0.0), a, b, 20);
    let at = eval(d)?;
    let at_best = eval(best.0)?;
    let chosen = if at.kinv_max >= at_best.kinv_max {
        (d, at)
    } else {
        (best.0, at_best)
    };
    Ok(IsotropySearch {
        d3: chosen.0,
        kinv_max: chosen.1.kinv_max,
        kinv_mean: chosen.1.kinv_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn singular_configuration_has_zero_kinv() {
        let p = Params::new(2.0, 1.5, 1.0).unwrap();
        let q = JointConfig::new(0.3, PI / 2.0, 0.0);
        assert_abs_diff_eq!(inv_condition(&p, &q), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn kinv_ignores_theta1_and_scale() {
        let p = Params::new(0.8, 1.9, 0.6).unwrap();
        let s = Params::with_scale(0.8, 1.9, 0.6, 3.7).unwrap();
        for (t2, t3) in [(0.3, -1.0), (2.0, 2.5), (-0.4, 0.1)] {
            let a = inv_condition(&p, &JointConfig::new(-2.0, t2, t3));
            let b = inv_condition(&p, &JointConfig::new(1.3, t2, t3));
            let c = inv_condition(&s, &JointConfig::new(0.0, t2, t3));
            let direct = {
                let sv = jacobian(&s, &JointConfig::new(0.9, t2, t3)).singular_values();
                sv.min() / sv.max()
            };
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            assert_abs_diff_eq!(a, c, epsilon = 1e-9);
            assert_abs_diff_eq!(a, direct, epsilon = 1e-9);
        }
    }

    #[test]
    fn sweep_bounds() {
        let p = Params::new(1.2, 0.7, 0.4).unwrap();
        let r = kinv_sweep(&p, 180).unwrap();
        assert!(0.0 <= r.kinv_mean && r.kinv_mean <= r.kinv_max && r.kinv_max <= 1.0);
        assert_abs_diff_eq!(inv_condition(&p, &r.argmax), r.kinv_max, epsilon = 1e-12);
        assert!(kinv_sweep(&p, 100).is_err());
    }

    #[test]
    fn volume_total_is_sum() {
        let p = Params::new(2.0, 1.5, 1.0).unwrap();
        let r = volume_proportions(&p, 200, 200).unwrap();
        assert_eq!(r.p_total, r.p2 + r.p4);
        assert_eq!(r.revolved.p_total, r.revolved.p2 + r.revolved.p4);
        assert!(r.p_total <= 1.0 && r.p4 > 0.0);
        assert!(r.revolved.p_total <= 1.0 && r.revolved.p4 > 0.0);
        assert!(volume_proportions(&p, 100, 400).is_err());
    }

    #[test]
    fn axis_values_are_inclusive() {
        let a = Axis::new(0.05, 5.0, 100).unwrap();
        assert_abs_diff_eq!(a.value(0), 0.05);
        assert_abs_diff_eq!(a.value(99), 5.0);
        assert!(Axis::new(2.0, 1.0, 3).is_err());
        assert!(Axis::new(0.0, 1.0, 3).is_err());
    }

    #[test]
    fn csv_layout() {
        let m = iso_map(
            MapKind::KinvMean,
            Axis::new(1.0, 2.0, 2).unwrap(),
            Axis::new(1.0, 1.5, 3).unwrap(),
            1.0,
            180,
        )
        .unwrap();
        let csv = m.to_csv();
        let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0], "d4\\d3,1,2");
        assert!(rows[2].starts_with("1.25,"));
        assert_eq!(rows[1].split(',').count(), 3);
        let back: IsoMap = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }
}
