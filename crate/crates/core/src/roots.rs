//! Bracketing utilities for smooth periodic scalar functions sampled on a
//! uniform grid over `[-π, π)`.

use std::f64::consts::PI;

/// Uniform periodic sample grid over `[-π, π)`.
#[derive(Debug, Clone)]
pub(crate) struct PeriodicGrid {
    pub thetas: Vec<f64>,
}

impl PeriodicGrid {
    pub fn new(n: usize) -> Self {
        let h = 2.0 * PI / n as f64;
        PeriodicGrid {
            thetas: (0..n).map(|i| -PI + h * i as f64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn step(&self) -> f64 {
        2.0 * PI / self.thetas.len() as f64
    }

    /// Sample `i` and its right neighbour, the last sample wrapping to `π`.
    #[inline]
    fn interval(&self, i: usize) -> (f64, f64) {
        let lo = self.thetas[i];
        (lo, lo + self.step())
    }
}

/// Relative size below which a sampled minimum counts as touching zero.
const TANGENCY: f64 = 1e-13;

/// A sign-change bracket `[lo, hi]`. `paired` marks brackets recovered from a
/// sub-sample dip, i.e. two roots closer than one grid step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub paired: bool,
}

/// Collects every root bracket of the periodic function `f` given its samples
/// `ys` on `grid`.
///
/// Plain sign changes give one bracket each. Discrete local extrema that do
/// not change sign are probed with a golden-section search when the parabola
/// through the three samples predicts a crossing; a hidden crossing yields two
/// brackets.
pub(crate) fn scan_brackets<F>(grid: &PeriodicGrid, ys: &[f64], f: F, out: &mut Vec<Bracket>)
where
    F: Fn(f64) -> f64,
{
    let n = ys.len();
    debug_assert_eq!(n, grid.len());
    let amplitude = ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let slack = 1e-6 * amplitude;
    let h = grid.step();

    for i in 0..n {
        let ya = ys[i];
        let yb = ys[(i + 1) % n];
        if (ya < 0.0) != (yb < 0.0) {
            let (lo, hi) = grid.interval(i);
            out.push(Bracket {
                lo,
                hi,
                paired: false,
            });
            continue;
        }
        // local extremum at sample i, same sign on both sides
        let yp = ys[(i + n - 1) % n];
        if (yp < 0.0) != (ya < 0.0) {
            continue;
        }
        let sign = if ya < 0.0 { -1.0 } else { 1.0 };
        let (a, b, c) = (sign * yp, sign * ya, sign * yb);
        // strict on the left so a flat pair of minimal samples is probed once
        if !(b < a && b <= c) {
            continue;
        }
        let curvature = a - 2.0 * b + c;
        let predicted = if curvature > 0.0 {
            b - (c - a) * (c - a) / (8.0 * curvature)
        } else {
            b
        };
        if predicted > slack {
            continue;
        }
        let centre = grid.thetas[i];
        let g = |x: f64| sign * f(x);
        let (xm, ym) = golden_min(g, centre - h, centre + h, 60);
        if ym.abs() <= TANGENCY * amplitude {
            // the function only touches zero: one double root
            out.push(Bracket {
                lo: xm,
                hi: xm,
                paired: true,
            });
        } else if ym < 0.0 {
            out.push(Bracket {
                lo: centre - h,
                hi: xm,
                paired: true,
            });
            out.push(Bracket {
                lo: xm,
                hi: centre + h,
                paired: true,
            });
        }
    }
}

/// Bisection on a sign-change bracket until the interval stops shrinking.
pub(crate) fn bisect<F>(f: F, mut lo: f64, mut hi: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_min<F>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brackets_of(f: impl Fn(f64) -> f64, n: usize) -> Vec<Bracket> {
        let grid = PeriodicGrid::new(n);
        let ys: Vec<f64> = grid.thetas.iter().map(|&t| f(t)).collect();
        let mut out = Vec::new();
        scan_brackets(&grid, &ys, &f, &mut out);
        out
    }

    #[test]
    fn simple_roots_of_cosine() {
        let b = brackets_of(|t| t.cos(), 64);
        assert_eq!(b.len(), 2);
        let roots: Vec<f64> = b.iter().map(|b| bisect(|t| t.cos(), b.lo, b.hi)).collect();
        assert!(roots.iter().any(|r| (r - PI / 2.0).abs() < 1e-14));
        assert!(roots.iter().any(|r| (r + PI / 2.0).abs() < 1e-14));
    }

    #[test]
    fn hidden_root_pair_is_recovered() {
        // 1 - cos t - 1e-7 dips below zero on a window of width ~9e-4 around 0,
        // far narrower than the 0.01 rad grid step; no sample lands on 0
        let f = |t: f64| 1.0 - t.cos() - 1e-7;
        let b = brackets_of(f, 629);
        assert_eq!(b.len(), 2);
        assert!(b.iter().all(|b| b.paired));
        for br in &b {
            let r = bisect(f, br.lo, br.hi);
            assert!(f(r).abs() < 1e-15);
        }
    }

    #[test]
    fn tangent_without_crossing_has_no_roots() {
        let b = brackets_of(|t: f64| 1.0 - t.cos() + 1e-7, 629);
        assert!(b.is_empty());
    }

    #[test]
    fn touching_minimum_is_one_double_root() {
        let f = |t: f64| 1.0 - t.cos();
        let b = brackets_of(f, 629);
        assert_eq!(b.len(), 1);
        assert!(b[0].paired && b[0].lo.abs() < 1e-6);
    }

    #[test]
    fn root_count_matches_frequency() {
        let b = brackets_of(|t: f64| (3.0 * t + 0.1).sin(), 512);
        assert_eq!(b.len(), 6);
    }

    #[test]
    fn golden_section_finds_minimum() {
        let (x, fx) = golden_min(|x| (x - 0.3) * (x - 0.3), -1.0, 1.0, 80);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(fx < 1e-15);
    }
}
