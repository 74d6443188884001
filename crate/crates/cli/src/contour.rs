//! Marching squares over a rectangular grid of samples.
//!
//! `values[j][i]` is the sample at column `i`, row `j`. Contours come back in
//! fractional grid coordinates `(i, j)`; the caller maps them to data units.
//! Cells touching a non-finite sample are skipped.

use std::collections::HashMap;

/// Grid edge holding one crossing: the horizontal edge from `(i, j)` to
/// `(i + 1, j)`, or the vertical edge from `(i, j)` to `(i, j + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

/// One contour line. `closed` lines repeat their first point at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
}

/// Iso-lines of `values` at `level`, joined into maximal polylines.
pub fn march(values: &[Vec<f64>], level: f64) -> Vec<Contour> {
    let h = values.len();
    if h < 2 {
        return Vec::new();
    }
    let w = values[0].len();
    if w < 2 || values.iter().any(|r| r.len() != w) {
        return Vec::new();
    }
    let at = |i: usize, j: usize| values[j][i];
    let above = |v: f64| v >= level;
    let crossing = |e: Edge| -> (f64, f64) {
        let ((i0, j0), (i1, j1)) = match e {
            Edge::H(i, j) => ((i, j), (i + 1, j)),
            Edge::V(i, j) => ((i, j), (i, j + 1)),
        };
        let (a, b) = (at(i0, j0), at(i1, j1));
        let t = if a == b {
            0.5
        } else {
            ((level - a) / (b - a)).clamp(0.0, 1.0)
        };
        (
            i0 as f64 + t * (i1 as f64 - i0 as f64),
            j0 as f64 + t * (j1 as f64 - j0 as f64),
        )
    };

    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for j in 0..h - 1 {
        for i in 0..w - 1 {
            let corners = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            if corners.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let case = corners
                .iter()
                .enumerate()
                .fold(0u8, |c, (k, &v)| c | (u8::from(above(v)) << k));
            // edges: bottom, right, top, left
            let (b, r, t, l) = (
                Edge::H(i, j),
                Edge::V(i + 1, j),
                Edge::H(i, j + 1),
                Edge::V(i, j),
            );
            let centre_above = above(corners.iter().sum::<f64>() / 4.0);
            match case {
                0 | 15 => {}
                1 | 14 => segments.push((l, b)),
                2 | 13 => segments.push((b, r)),
                3 | 12 => segments.push((l, r)),
                4 | 11 => segments.push((r, t)),
                6 | 9 => segments.push((b, t)),
                7 | 8 => segments.push((l, t)),
                // saddles: the centre sample decides which corners connect
                5 => {
                    if centre_above {
                        segments.push((l, t));
                        segments.push((b, r));
                    } else {
                        segments.push((l, b));
                        segments.push((r, t));
                    }
                }
                10 => {
                    if centre_above {
                        segments.push((l, b));
                        segments.push((r, t));
                    } else {
                        segments.push((l, t));
                        segments.push((b, r));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    link(&segments)
        .into_iter()
        .map(|(edges, closed)| Contour {
            points: edges.into_iter().map(crossing).collect(),
            closed,
        })
        .collect()
}

/// Chains segments sharing an edge. Open chains are walked from their free
/// ends first, then the remaining closed loops; both in segment order.
fn link(segments: &[(Edge, Edge)]) -> Vec<(Vec<Edge>, bool)> {
    let mut touching: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        touching.entry(a).or_default().push(k);
        touching.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let walk = |start: usize, from: Edge, used: &mut Vec<bool>| -> (Vec<Edge>, bool) {
        let mut chain = vec![from];
        let mut seg = start;
        let mut at = from;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            chain.push(next);
            if next == from {
                return (chain, true);
            }
            match touching[&next].iter().find(|&&k| !used[k]) {
                Some(&k) => {
                    seg = k;
                    at = next;
                }
                None => return (chain, false),
            }
        }
    };
    for k in 0..segments.len() {
        if used[k] {
            continue;
        }
        let (a, b) = segments[k];
        let free = if touching[&a].len() == 1 {
            Some(a)
        } else if touching[&b].len() == 1 {
            Some(b)
        } else {
            None
        };
        if let Some(end) = free {
            out.push(walk(k, end, &mut used));
        }
    }
    for k in 0..segments.len() {
        if !used[k] {
            out.push(walk(k, segments[k].0, &mut used));
        }
    }
    out
}
