//! Figures: singular curves in joint and workspace section, and iso-value
//! maps over the (d₃, d₄) plane.

use std::f64::consts::PI;

use ortho3r::classify::{surfaces, Surface};
use ortho3r::model::{reach, Params};
use ortho3r::perf::IsoMap;
use ortho3r::singular::{BranchId, SingularBranch, SingularPointSet};

use crate::contour::march;
use crate::svg::{ramp, Document, Frame, Stroke};

pub fn branch_name(id: BranchId) -> &'static str {
    match id {
        BranchId::S1 => "S1",
        BranchId::S2 => "S2",
        BranchId::AxisLine(s) if s > 0 => "L+",
        BranchId::AxisLine(_) => "L-",
    }
}

fn branch_stroke(id: BranchId) -> Stroke<'static> {
    match id {
        BranchId::S1 => Stroke::solid("#1f77b4", 1.5),
        BranchId::S2 => Stroke::solid("#d62728", 1.5),
        BranchId::AxisLine(_) => Stroke::dashed("#2ca02c", 1.2),
    }
}

/// Joint-space branches on the left, their section images on the right,
/// cusps as orange discs and nodes as purple squares.
pub fn curves_svg(
    p: &Params,
    branches: &[SingularBranch],
    cusps: &SingularPointSet,
    nodes: &SingularPointSet,
) -> String {
    let rho_max = reach(p);
    let joint = Frame {
        left: 60.0,
        top: 40.0,
        width: 360.0,
        height: 360.0,
        x: (-PI, PI),
        y: (-PI, PI),
    };
    let section = Frame {
        left: 520.0,
        top: 40.0,
        width: 180.0,
        height: 360.0,
        x: (0.0, rho_max),
        y: (-rho_max, rho_max),
    };
    let mut doc = Document::new(760.0, 450.0);
    joint.axes(&mut doc, "theta2", "theta3", "joint space");
    section.axes(&mut doc, "rho", "z", "workspace section");

    for b in branches {
        let stroke = branch_stroke(b.id);
        let mut pts: Vec<(f64, f64)> = b.samples.iter().map(|s| (s.theta2, s.theta3)).collect();
        if b.closed {
            if let Some(&first) = pts.first() {
                pts.push((first.0 + 2.0 * PI, first.1));
            }
        }
        joint.polyline(&mut doc, &pts, PI, stroke);
        if matches!(b.id, BranchId::AxisLine(_)) {
            continue;
        }
        let mut img: Vec<(f64, f64)> = b.samples.iter().map(|s| (s.rho, s.z)).collect();
        if let Some(&first) = img.first() {
            img.push(first);
        }
        section.polyline(&mut doc, &img, f64::INFINITY, stroke);
    }

    let scale = p.scale();
    for c in &cusps.points {
        doc.circle(
            section.map((c.point.rho * scale, c.point.z * scale)),
            3.5,
            "orange",
        );
        doc.circle(joint.map((c.theta2, c.theta3)), 3.5, "orange");
    }
    for n in &nodes.points {
        doc.square(
            section.map((n.point.rho * scale, n.point.z * scale)),
            3.0,
            "purple",
        );
        doc.square(joint.map((n.theta2, n.theta3)), 3.0, "purple");
        if let Some((_, t2, t3)) = n.other {
            doc.square(joint.map((t2, t3)), 3.0, "purple");
        }
    }

    let legend = format!(
        "d3 = {}, d4 = {}, r2 = {}: {} cusps, {} nodes",
        p.d3(),
        p.d4(),
        p.r2(),
        cusps.count(),
        nodes.count()
    );
    doc.text((380.0, 440.0), 12.0, "middle", &legend);
    doc.finish()
}

/// Evenly spaced levels strictly inside the finite range of the map.
pub fn default_levels(map: &IsoMap, n: usize) -> Vec<f64> {
    let finite = map
        .values
        .iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if lo >= hi {
        return Vec::new();
    }
    (1..=n)
        .map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64)
        .collect()
}

/// Marching-squares contours of `map` at `levels`, with the separating
/// surfaces of the plane dashed and the largest cell marked.
pub fn map_svg(map: &IsoMap, levels: &[f64]) -> String {
    let frame = Frame {
        left: 60.0,
        top: 40.0,
        width: 420.0,
        height: 420.0,
        x: (map.d3.lo, map.d3.hi),
        y: (map.d4.lo, map.d4.hi),
    };
    let mut doc = Document::new(640.0, 510.0);
    let title = format!("{} at r2 = {}", map.kind.name(), map.r2);
    frame.axes(&mut doc, "d3", "d4", &title);

    // surfaces first so the contours paint over them
    let n = 400;
    let mut labels: Vec<(f64, f64)> = Vec::new();
    for s in Surface::ALL {
        let pts: Vec<(f64, f64)> = (0..=n)
            .map(|k| {
                let d3 = map.d3.lo + (map.d3.hi - map.d3.lo) * k as f64 / n as f64;
                let v = surfaces(d3, map.r2)
                    .ok()
                    .and_then(|sv| sv.get(s))
                    .unwrap_or(f64::NAN);
                (d3, v)
            })
            .collect();
        frame.polyline(
            &mut doc,
            &pts,
            f64::INFINITY,
            Stroke::dashed("#888888", 0.8),
        );
        if let Some(&last) = pts.iter().rev().find(|q| frame.contains(**q)) {
            let (x, mut y) = frame.map(last);
            // surfaces leaving through the same edge would stack their labels
            while labels
                .iter()
                .any(|&(lx, ly)| (lx - x).abs() < 16.0 && (ly - y).abs() < 10.0)
            {
                y += 11.0;
            }
            labels.push((x, y));
            doc.text((x + 3.0, y - 3.0), 10.0, "start", &format!("{s:?}"));
        }
    }

    let step = |a: &ortho3r::perf::Axis| {
        if a.n > 1 {
            (a.hi - a.lo) / (a.n - 1) as f64
        } else {
            0.0
        }
    };
    let (sx, sy) = (step(&map.d3), step(&map.d4));
    for (k, &level) in levels.iter().enumerate() {
        let color = ramp(k, levels.len());
        for c in march(&map.values, level) {
            let pts: Vec<(f64, f64)> = c
                .points
                .iter()
                .map(|&(i, j)| (map.d3.lo + i * sx, map.d4.lo + j * sy))
                .collect();
            frame.polyline(&mut doc, &pts, f64::INFINITY, Stroke::solid(&color, 1.2));
        }
        let y = 60.0 + 18.0 * k as f64;
        doc.polyline(
            &[(500.0, y - 4.0), (525.0, y - 4.0)],
            Stroke::solid(&color, 2.0),
        );
        doc.text((530.0, y), 11.0, "start", &format!("{level:.4}"));
    }

    let (d3, d4, v) = map.argmax();
    if v.is_finite() {
        doc.circle(frame.map((d3, d4)), 4.0, "red");
        doc.text(
            (60.0, 500.0),
            12.0,
            "start",
            &format!("max {v:.4} at d3 = {d3:.3}, d4 = {d4:.3}"),
        );
    }
    doc.finish()
}
