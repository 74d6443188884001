//! Singularities: joint-space branches, their section images, cusps, nodes,
//! aspects and genericity.
//!
//! The second factor of `det J`,
//!
//! ```text
//! s₃ + (d₃ s₃ − r₂ c₃) c₂ = s₃ (1 + d₃ c₂) − r₂ c₂ c₃,
//! ```
//!
//! vanishes exactly on `θ₃ = φ(θ₂)` and `θ₃ = φ(θ₂) + π` with
//! `φ(θ₂) = atan2(r₂ c₂, 1 + d₃ c₂)`. The vector `(1 + d₃ c₂, r₂ c₂)` never
//! vanishes and never winds around the origin, so both sets are smooth closed
//! loops of the torus, parameterized by θ₂. These are the branches S₁ and S₂.
//! The first factor adds the lines `θ₃ = ±arccos(−d₃/d₄)` when `d₃ ≤ d₄`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::components;
use crate::model::{angle_diff, det_j_section, section_of, wrap_angle, Params, SectionPoint};
use crate::roots::{bisect, golden_min};

/// Samples per branch used by the cusp and node detectors.
pub const CURVE_SAMPLES: usize = 4096;
pub const MIN_TRACE_RESOLUTION: usize = 64;
pub const MIN_ASPECT_RESOLUTION: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchId {
    /// Branch whose image is the inner singular curve WS₁.
    S1,
    /// Branch whose image is the outer singular curve WS₂.
    S2,
    /// `θ₃ = sign · arccos(−d₃/d₄)`; the whole line maps to one point.
    AxisLine(i8),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSample {
    pub theta2: f64,
    pub theta3: f64,
    pub rho: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularBranch {
    pub id: BranchId,
    pub samples: Vec<BranchSample>,
    pub closed: bool,
}

/// A cusp or node of the section image, with the joint-space parameters that
/// produced it. Nodes carry both preimages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularPoint {
    pub point: SectionPoint,
    pub branch: BranchId,
    pub theta2: f64,
    pub theta3: f64,
    /// Second preimage `(branch, θ₂, θ₃)` of a node.
    pub other: Option<(BranchId, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularPointSet {
    pub points: Vec<SingularPoint>,
    /// The manipulator lies within the instability band of a separating
    /// surface, where the count may change under tiny perturbations.
    pub unstable: bool,
}

impl SingularPointSet {
    pub fn count(&self) -> usize {
        self.points.len()
    }
}

/// θ₂ values in `[-π, π)` cancelling the second factor of `det J` for a given
/// θ₃: `cos θ₂ = −s₃ / (d₃ s₃ − r₂ c₃)`.
pub fn branch_theta2(p: &Params, theta3: f64) -> Vec<f64> {
    let (s3, c3) = theta3.sin_cos();
    let den = p.d3() * s3 - p.r2() * c3;
    if den == 0.0 {
        // s₃ ≠ 0 here since r₂ > 0, so the factor equals s₃
        return Vec::new();
    }
    let ratio = -s3 / den;
    // allow rounding at the fold points cos θ₂ = ±1
    if ratio.abs() > 1.0 + 1e-12 {
        return Vec::new();
    }
    let t = ratio.clamp(-1.0, 1.0).acos();
    if t == 0.0 || t == PI {
        vec![wrap_angle(t)]
    } else {
        vec![-t, t]
    }
}

/// Closed-form branch loop `θ₃(θ₂)` and its derivative.
#[derive(Debug, Clone, Copy)]
struct Loop {
    p: Params,
    /// 0 for `φ`, 1 for `φ + π`
    sheet: u8,
}

impl Loop {
    fn theta3(&self, theta2: f64) -> f64 {
        let c2 = theta2.cos();
        let phi = (self.p.r2() * c2).atan2(1.0 + self.p.d3() * c2);
        wrap_angle(phi + self.sheet as f64 * PI)
    }

    fn dtheta3(&self, theta2: f64) -> f64 {
        let (s2, c2) = theta2.sin_cos();
        let u = self.p.r2() * c2;
        let v = 1.0 + self.p.d3() * c2;
        -self.p.r2() * s2 / (u * u + v * v)
    }

    fn image(&self, theta2: f64) -> (f64, f64) {
        section_of(&self.p, theta2, self.theta3(theta2))
    }

    /// Image tangent `(d(ρ²)/dθ₂, dz/dθ₂)` along the loop.
    fn image_tangent(&self, theta2: f64) -> (f64, f64) {
        let p = &self.p;
        let theta3 = self.theta3(theta2);
        let (s2, c2) = theta2.sin_cos();
        let (s3, c3) = theta3.sin_cos();
        let (f, g) = p.fg(theta3);
        let a = 1.0 + f * c2;
        let d4 = p.d4();
        let dphi = self.dtheta3(theta2);
        let rr2 = -2.0 * a * f * s2;
        let rr3 = 2.0 * (-a * d4 * s3 * c2 + g * d4 * c3);
        let z2 = -f * c2;
        let z3 = d4 * s3 * s2;
        (rr2 + rr3 * dphi, z2 + z3 * dphi)
    }

    /// Norm of the section Jacobian times the norm of the joint tangent, the
    /// natural scale of `image_tangent`.
    fn tangent_scale(&self, theta2: f64) -> f64 {
        let p = &self.p;
        let theta3 = self.theta3(theta2);
        let (s2, c2) = theta2.sin_cos();
        let (s3, c3) = theta3.sin_cos();
        let (f, g) = p.fg(theta3);
        let a = 1.0 + f * c2;
        let d4 = p.d4();
        let m = [
            -2.0 * a * f * s2,
            2.0 * (-a * d4 * s3 * c2 + g * d4 * c3),
            -f * c2,
            d4 * s3 * s2,
        ];
        let frob = m.iter().map(|x| x * x).sum::<f64>().sqrt();
        frob * (1.0 + self.dtheta3(theta2).powi(2)).sqrt()
    }
}

/// The two loops labelled so that S₂ is the one reaching farthest from the
/// origin (its image bounds the workspace from outside).
fn loops(p: &Params) -> [(BranchId, Loop); 2] {
    let p = p.normalized();
    let a = Loop { p, sheet: 0 };
    let b = Loop { p, sheet: 1 };
    let far = |l: &Loop| {
        (0..256)
            .map(|i| {
                let (rho, z) = l.image(-PI + 2.0 * PI * i as f64 / 256.0);
                rho * rho + z * z
            })
            .fold(0.0f64, f64::max)
    };
    if far(&a) >= far(&b) {
        [(BranchId::S1, b), (BranchId::S2, a)]
    } else {
        [(BranchId::S1, a), (BranchId::S2, b)]
    }
}

/// `θ₃` of the lines where the effector meets axis 2, when `d₃ ≤ d₄`.
pub fn axis_line_angles(p: &Params) -> Option<(f64, f64)> {
    if p.d3() <= p.d4() {
        let t = (-p.d3() / p.d4()).acos();
        Some((wrap_angle(t), wrap_angle(-t)))
    } else {
        None
    }
}

/// Traces S₁, S₂ with `n` samples each, plus the two axis lines when
/// `d₃ ≤ d₄`. Section coordinates are in physical units.
pub fn trace_branches(p: &Params, n: usize) -> Result<Vec<SingularBranch>> {
    if n < MIN_TRACE_RESOLUTION {
        return Err(Error::ResolutionTooLow {
            got: n,
            min: MIN_TRACE_RESOLUTION,
        });
    }
    let l = p.scale();
    let h = 2.0 * PI / n as f64;
    let mut out = Vec::with_capacity(4);
    for (id, lp) in loops(p) {
        let samples = (0..n)
            .map(|i| {
                let theta2 = -PI + h * i as f64;
                let theta3 = lp.theta3(theta2);
                let (rho, z) = lp.image(theta2);
                BranchSample {
                    theta2,
                    theta3,
                    rho: rho * l,
                    z: z * l,
                }
            })
            .collect();
        out.push(SingularBranch {
            id,
            samples,
            closed: true,
        });
    }
    if let Some((pos, neg)) = axis_line_angles(p) {
        let norm = p.normalized();
        for (sign, theta3) in [(1i8, pos), (-1i8, neg)] {
            let (rho, z) = section_of(&norm, 0.0, theta3);
            let samples = (0..n)
                .map(|i| BranchSample {
                    theta2: -PI + h * i as f64,
                    theta3,
                    rho: rho * l,
                    z: z * l,
                })
                .collect();
            out.push(SingularBranch {
                id: BranchId::AxisLine(sign),
                samples,
                closed: true,
            });
        }
    }
    Ok(out)
}

/// Cusps of the section image: points of S₁ or S₂ where the image tangent
/// vanishes. Zeros of each tangent component are bracketed by sign changes,
/// bisected, and kept when the other component vanishes too.
pub fn count_cusps(p: &Params) -> SingularPointSet {
    let norm = p.normalized();
    let n = CURVE_SAMPLES;
    let h = 2.0 * PI / n as f64;
    let mut points: Vec<SingularPoint> = Vec::new();
    for (id, lp) in loops(&norm) {
        let tangents: Vec<(f64, f64)> = (0..n)
            .map(|i| lp.image_tangent(-PI + h * i as f64))
            .collect();
        let mut found: Vec<f64> = Vec::new();
        for comp in 0..2 {
            let pick = |t: (f64, f64)| if comp == 0 { t.0 } else { t.1 };
            for i in 0..n {
                let a = pick(tangents[i]);
                let b = pick(tangents[(i + 1) % n]);
                if (a < 0.0) == (b < 0.0) {
                    continue;
                }
                let lo = -PI + h * i as f64;
                let s = bisect(|x| pick(lp.image_tangent(x)), lo, lo + h);
                let (tr, tz) = lp.image_tangent(s);
                if tr.hypot(tz) > 1e-6 * lp.tangent_scale(s) {
                    continue;
                }
                let s = wrap_angle(s);
                if !found.iter().any(|&f| angle_diff(f, s).abs() < 1e-7) {
                    found.push(s);
                }
            }
        }
        for s in found {
            let (rho, z) = lp.image(s);
            points.push(SingularPoint {
                point: SectionPoint::new(rho * p.scale(), z * p.scale()),
                branch: id,
                theta2: s,
                theta3: lp.theta3(s),
                other: None,
            });
        }
    }
    sort_points(&mut points);
    SingularPointSet {
        points,
        unstable: crate::classify::near_any_surface(p),
    }
}

fn sort_points(points: &mut [SingularPoint]) {
    points.sort_by(|a, b| {
        a.point
            .z
            .total_cmp(&b.point.z)
            .then(a.point.rho.total_cmp(&b.point.rho))
    });
}

struct Polyline {
    id: BranchId,
    lp: Loop,
    pts: Vec<(f64, f64)>,
}

/// Proper crossing of segments `ab` and `cd`, as fractions along each.
fn segment_crossing(
    a: (f64, f64),
    b: (f64, f64),
    c: (f64, f64),
    d: (f64, f64),
) -> Option<(f64, f64)> {
    let r = (b.0 - a.0, b.1 - a.1);
    let s = (d.0 - c.0, d.1 - c.1);
    let den = r.0 * s.1 - r.1 * s.0;
    if den == 0.0 {
        return None;
    }
    let qp = (c.0 - a.0, c.1 - a.1);
    let t = (qp.0 * s.1 - qp.1 * s.0) / den;
    let u = (qp.0 * r.1 - qp.1 * r.0) / den;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some((t, u))
    } else {
        None
    }
}

/// Newton solve of `image_a(s) = image_b(t)` in `(ρ, z)`.
fn refine_node(a: &Loop, b: &Loop, mut s: f64, mut t: f64) -> Option<(f64, f64)> {
    for _ in 0..60 {
        let (ra, za) = a.image(s);
        let (rb, zb) = b.image(t);
        let (fr, fz) = (ra - rb, za - zb);
        if fr.hypot(fz) < 1e-13 {
            return Some((s, t));
        }
        let (dra2, dza) = a.image_tangent(s);
        let (drb2, dzb) = b.image_tangent(t);
        let (dra, drb) = (dra2 / (2.0 * ra), drb2 / (2.0 * rb));
        // [dra  -drb] [ds]   [-fr]
        // [dza  -dzb] [dt] = [-fz]
        let det = -dra * dzb + drb * dza;
        if det.abs() < 1e-14 {
            return None;
        }
        let ds = (-fr * -dzb - -drb * -fz) / det;
        let dt = (dra * -fz - dza * -fr) / det;
        s += ds;
        t += dt;
        if !(s.is_finite() && t.is_finite()) {
            return None;
        }
    }
    let (ra, za) = a.image(s);
    let (rb, zb) = b.image(t);
    ((ra - rb).hypot(za - zb) < 1e-9).then_some((s, t))
}

/// Nodes: transversal crossings of the section images of S₁ and S₂, each
/// with itself and with the other. Candidate crossings come from the sampled
/// polylines and are confirmed by a two-parameter Newton solve; coincident
/// preimages (cusps) and tangential contacts are rejected.
pub fn count_nodes(p: &Params) -> SingularPointSet {
    let norm = p.normalized();
    let n = CURVE_SAMPLES;
    let h = 2.0 * PI / n as f64;
    let lines: Vec<Polyline> = loops(&norm)
        .into_iter()
        .map(|(id, lp)| Polyline {
            id,
            lp,
            pts: (0..n).map(|i| lp.image(-PI + h * i as f64)).collect(),
        })
        .collect();

    // bucket segments on a uniform grid over the common bounding box
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for l in &lines {
        for &(x, y) in &l.pts {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
    }
    let cells = 128usize;
    let cw = ((x1 - x0) / cells as f64).max(1e-12);
    let ch = ((y1 - y0) / cells as f64).max(1e-12);
    let cell_of = |x: f64, y: f64| {
        let i = (((x - x0) / cw) as usize).min(cells - 1);
        let j = (((y - y0) / ch) as usize).min(cells - 1);
        (i, j)
    };
    let mut buckets: Vec<Vec<(usize, usize)>> = vec![Vec::new(); cells * cells];
    for (li, l) in lines.iter().enumerate() {
        for k in 0..n {
            let a = l.pts[k];
            let b = l.pts[(k + 1) % n];
            let (ia, ja) = cell_of(a.0.min(b.0), a.1.min(b.1));
            let (ib, jb) = cell_of(a.0.max(b.0), a.1.max(b.1));
            for i in ia..=ib {
                for j in ja..=jb {
                    buckets[j * cells + i].push((li, k));
                }
            }
        }
    }

    let mut points: Vec<SingularPoint> = Vec::new();
    for (cell, bucket) in buckets.iter().enumerate() {
        for (x, &(la, ka)) in bucket.iter().enumerate() {
            for &(lb, kb) in &bucket[x + 1..] {
                if la == lb {
                    let gap = ka.abs_diff(kb);
                    if gap.min(n - gap) <= 1 {
                        continue;
                    }
                }
                let (pa, pb) = (&lines[la], &lines[lb]);
                let a0 = pa.pts[ka];
                let a1 = pa.pts[(ka + 1) % n];
                let Some((u, v)) = segment_crossing(a0, a1, pb.pts[kb], pb.pts[(kb + 1) % n])
                else {
                    continue;
                };
                // a pair sharing several buckets is handled where it crosses
                let (ci, cj) = cell_of(a0.0 + u * (a1.0 - a0.0), a0.1 + u * (a1.1 - a0.1));
                if cj * cells + ci != cell {
                    continue;
                }
                let s0 = -PI + h * (ka as f64 + u);
                let t0 = -PI + h * (kb as f64 + v);
                let Some((s, t)) = refine_node(&pa.lp, &pb.lp, s0, t0) else {
                    continue;
                };
                let (s, t) = (wrap_angle(s), wrap_angle(t));
                if la == lb && angle_diff(s, t).abs() < 1e-4 {
                    continue;
                }
                // transversality
                let (ar2, az) = pa.lp.image_tangent(s);
                let (br2, bz) = pb.lp.image_tangent(t);
                let (ra, _) = pa.lp.image(s);
                let ta = (ar2 / (2.0 * ra), az);
                let tb = (br2 / (2.0 * ra), bz);
                let cross = ta.0 * tb.1 - ta.1 * tb.0;
                let na = ta.0.hypot(ta.1);
                let nb = tb.0.hypot(tb.1);
                if na < 1e-9 || nb < 1e-9 || cross.abs() < 1e-6 * na * nb {
                    continue;
                }
                let (rho, z) = pa.lp.image(s);
                let dup = points.iter().any(|q| {
                    (q.point.rho - rho * p.scale()).hypot(q.point.z - z * p.scale())
                        < 1e-7 * p.scale()
                });
                if dup {
                    continue;
                }
                points.push(SingularPoint {
                    point: SectionPoint::new(rho * p.scale(), z * p.scale()),
                    branch: pa.id,
                    theta2: s,
                    theta3: pa.lp.theta3(s),
                    other: Some((pb.id, t, pb.lp.theta3(t))),
                });
            }
        }
    }
    sort_points(&mut points);
    SingularPointSet {
        points,
        unstable: crate::classify::near_any_surface(p),
    }
}

/// Number of aspects: connected components of the non-singular part of the
/// `(θ₂, θ₃)` torus, on an `n × n` cell grid. Neighbouring cells join when
/// `det J` keeps its sign and stays above the singularity tolerance.
pub fn count_aspects(p: &Params, n: usize) -> Result<usize> {
    if n < MIN_ASPECT_RESOLUTION {
        return Err(Error::ResolutionTooLow {
            got: n,
            min: MIN_ASPECT_RESOLUTION,
        });
    }
    let norm = p.normalized();
    let tol = norm.det_tolerance();
    let h = 2.0 * PI / n as f64;
    let mut classes = Vec::with_capacity(n * n);
    for j in 0..n {
        let t3 = -PI + h * (j as f64 + 0.5);
        for i in 0..n {
            let t2 = -PI + h * (i as f64 + 0.5);
            let d = det_j_section(&norm, t2, t3);
            classes.push(if d.abs() <= tol { None } else { Some(d > 0.0) });
        }
    }
    Ok(components(&classes, n, n, true, true).len())
}

/// Genericity: no two distinct joint-space singularity
/// branches (S₁, S₂ and the axis lines) meet.
pub fn is_generic(p: &Params) -> bool {
    const THRESHOLD: f64 = 1e-6;
    let norm = p.normalized();
    let ls = loops(&norm);
    let n = 720;
    let h = 2.0 * PI / n as f64;

    // S₁ against S₂: torus distance between the sampled loops
    let a: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = -PI + h * i as f64;
            (t, ls[0].1.theta3(t))
        })
        .collect();
    let b: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = -PI + h * i as f64;
            (t, ls[1].1.theta3(t))
        })
        .collect();
    let mut min_ab = f64::MAX;
    for &(s, u) in &a {
        for &(t, v) in &b {
            min_ab = min_ab.min(angle_diff(s, t).hypot(angle_diff(u, v)));
        }
    }
    if min_ab <= THRESHOLD {
        return false;
    }

    let Some((pos, neg)) = axis_line_angles(&norm) else {
        return true;
    };
    if angle_diff(pos, neg).abs() <= THRESHOLD {
        return false;
    }
    for line in [pos, neg] {
        for (_, lp) in &ls {
            let gap = |t: f64| angle_diff(lp.theta3(t), line);
            let mut prev = gap(-PI);
            let mut best = prev.abs();
            for i in 1..=n {
                let t = -PI + h * i as f64;
                let cur = gap(t);
                if (cur < 0.0) != (prev < 0.0) && (cur - prev).abs() < PI {
                    return false;
                }
                best = best.min(cur.abs());
                prev = cur;
            }
            if best < 0.05 {
                // sampled gap is small: polish the closest approach
                let i_best = (0..n)
                    .min_by(|&i, &j| {
                        gap(-PI + h * i as f64)
                            .abs()
                            .total_cmp(&gap(-PI + h * j as f64).abs())
                    })
                    .unwrap_or(0);
                let c = -PI + h * i_best as f64;
                let (_, g) = golden_min(|t| gap(t).abs(), c - h, c + h, 80);
                if g <= THRESHOLD {
                    return false;
                }
            }
        }
    }
    true
}
