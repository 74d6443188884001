//! Parameter-space classification: separating surfaces, cusp domains,
//! workspace topologies and region census.
//!
//! With `A = √((d₃+1)² + r₂²)` and `B = √((d₃−1)² + r₂²)` the separating
//! surfaces are graphs `d₄ = f(d₃, r₂)`:
//!
//! ```text
//! C₁: √(½(d₃² + r₂² − ((d₃² + r₂²)² − d₃² + r₂²) / (A B)))
//! C₂: d₃ A / (1 + d₃)
//! C₃: d₃ B / (d₃ − 1)          (d₃ > 1)
//! C₄: d₃ B / (1 − d₃)          (d₃ < 1)
//! E₁: (A − B) / 2
//! E₂: d₃
//! E₃: (A + B) / 2
//! ```
//!
//! C surfaces change the number of cusps, E surfaces change nodes or regions
//! inside a fixed cusp domain. Which side combination is which domain or
//! topology is not hard-coded: it is read from a calibration table built by
//! [`calibrate`] from the numeric oracles in [`crate::singular`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::despeckle;
use crate::ik::IkSolver;
use crate::model::{Params, SectionPoint};
use crate::singular::{count_aspects, count_cusps, count_nodes, is_generic, MIN_ASPECT_RESOLUTION};

/// Half-width, in units of `d₂`, of the band around each surface where a
/// classification is flagged unstable.
pub const INSTABILITY_BAND: f64 = 1e-6;
pub const MIN_CENSUS_RESOLUTION: usize = 200;
pub const DEFAULT_CENSUS_RESOLUTION: usize = 400;

/// Surface values for one `(d₃, r₂)`, normalized by `d₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceValues {
    pub c1: f64,
    pub c2: f64,
    /// Defined for `d₃ > 1`.
    pub c3: Option<f64>,
    /// Defined for `d₃ < 1`.
    pub c4: Option<f64>,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

/// Identifies one separating surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Surface {
    C1,
    C2,
    C3,
    C4,
    E1,
    E2,
    E3,
}

impl Surface {
    pub const ALL: [Surface; 7] = [
        Surface::C1,
        Surface::C2,
        Surface::C3,
        Surface::C4,
        Surface::E1,
        Surface::E2,
        Surface::E3,
    ];
}

impl SurfaceValues {
    pub fn get(&self, s: Surface) -> Option<f64> {
        match s {
            Surface::C1 => Some(self.c1),
            Surface::C2 => Some(self.c2),
            Surface::C3 => self.c3,
            Surface::C4 => self.c4,
            Surface::E1 => Some(self.e1),
            Surface::E2 => Some(self.e2),
            Surface::E3 => Some(self.e3),
        }
    }

    /// Defined surfaces with their values.
    pub fn defined(&self) -> impl Iterator<Item = (Surface, f64)> + '_ {
        Surface::ALL
            .into_iter()
            .filter_map(|s| self.get(s).map(|v| (s, v)))
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}

/// Threshold values of every separating surface at `(d₃, r₂)`, with
/// `d₂ = 1`. C₃ and C₄ are undefined at `d₃ = 1`.
pub fn surfaces(d3: f64, r2: f64) -> Result<SurfaceValues> {
    let d3 = positive("d3", d3)?;
    let r2 = positive("r2", r2)?;
    let a = ((d3 + 1.0).powi(2) + r2 * r2).sqrt();
    let b = ((d3 - 1.0).powi(2) + r2 * r2).sqrt();
    let q = d3 * d3 + r2 * r2;
    let c1_sq = 0.5 * (q - (q * q - d3 * d3 + r2 * r2) / (a * b));
    Ok(SurfaceValues {
        c1: c1_sq.max(0.0).sqrt(),
        c2: d3 * a / (1.0 + d3),
        c3: (d3 > 1.0).then(|| d3 * b / (d3 - 1.0)),
        c4: (d3 < 1.0).then(|| d3 * b / (1.0 - d3)),
        e1: 0.5 * (a - b),
        e2: d3,
        e3: 0.5 * (a + b),
    })
}

/// Position of a manipulator relative to every defined surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideVector {
    /// `d₃ > 1`; selects which of C₃ and C₄ exists.
    pub d3_above_one: bool,
    /// Surfaces lying strictly below `d₄`.
    pub below: Vec<Surface>,
    /// Surface closest to `d₄` and its distance.
    pub nearest: Option<(Surface, f64)>,
}

impl SideVector {
    pub fn of(p: &Params) -> SideVector {
        let n = p.normalized();
        let s = surfaces(n.d3(), n.r2()).expect("params are validated");
        let d4 = n.d4();
        let mut below = Vec::new();
        let mut nearest: Option<(Surface, f64)> = None;
        for (surf, v) in s.defined() {
            if v < d4 {
                below.push(surf);
            }
            let gap = (v - d4).abs();
            if nearest.is_none_or(|(_, g)| gap < g) {
                nearest = Some((surf, gap));
            }
        }
        SideVector {
            d3_above_one: n.d3() > 1.0,
            below,
            nearest,
        }
    }
}

/// Whether `p` lies within [`INSTABILITY_BAND`] of a separating surface, or
/// at `d₃ = 1` where C₃ and C₄ meet at infinity.
pub fn near_any_surface(p: &Params) -> bool {
    let n = p.normalized();
    if (n.d3() - 1.0).abs() <= INSTABILITY_BAND {
        return true;
    }
    SideVector::of(p)
        .nearest
        .is_some_and(|(_, gap)| gap <= INSTABILITY_BAND)
}

/// Region counts of the workspace half-section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    /// Enclosed unreachable regions away from the axis (toroidal cavities).
    pub n_void: usize,
    pub n_2sol: usize,
    pub n_4sol: usize,
    /// Enclosed unreachable regions touching the axis.
    pub n_axial_holes: usize,
}

impl Census {
    pub fn has_cavity(&self) -> bool {
        self.n_void > 0
    }

    pub fn quaternary(&self) -> bool {
        self.n_4sol > 0
    }

    pub fn triple(&self) -> (usize, usize, usize) {
        (self.n_void, self.n_2sol, self.n_4sol)
    }
}

/// Connected regions of equal solution count on a `grid × 2·grid` cell
/// sampling of `[0, ρ_max] × [−ρ_max, ρ_max]`.
///
/// Components of at most `grid / 50` cells (at least 3) are absorbed into
/// their surroundings: they are sampling specks left where a region thins
/// below one cell. Unreachable components touching the outer edges are the
/// exterior. The remaining unreachable components are cavities, or axial
/// holes when they reach the `ρ = 0` column.
pub fn region_census(p: &Params, grid: usize) -> Result<Census> {
    if grid < MIN_CENSUS_RESOLUTION {
        return Err(Error::ResolutionTooLow {
            got: grid,
            min: MIN_CENSUS_RESOLUTION,
        });
    }
    let norm = p.normalized();
    let solver = IkSolver::new(&norm);
    let rho_max = norm.normalized_reach();
    let (w, h) = (grid, 2 * grid);
    let d = rho_max / grid as f64;
    // the section is z-symmetric: solve the upper half and mirror
    let mut classes = vec![None; w * h];
    for j in grid..h {
        let z = (j as f64 + 0.5) * d - rho_max;
        for i in 0..w {
            let rho = (i as f64 + 0.5) * d;
            let c = solver.count(&SectionPoint::new(rho, z)) as u8;
            classes[j * w + i] = Some(c);
            classes[(h - 1 - j) * w + i] = Some(c);
        }
    }
    let mut census = Census {
        n_void: 0,
        n_2sol: 0,
        n_4sol: 0,
        n_axial_holes: 0,
    };
    for comp in despeckle(&mut classes, w, h, (grid / 50).max(3)) {
        match comp.class {
            0 => {
                let outer = comp.cells.iter().any(|&c| {
                    let (i, j) = (c % w, c / w);
                    i == w - 1 || j == 0 || j == h - 1
                });
                if outer {
                    continue;
                }
                if comp.cells.iter().any(|&c| c % w == 0) {
                    census.n_axial_holes += 1;
                } else {
                    census.n_void += 1;
                }
            }
            2 => census.n_2sol += 1,
            4 => census.n_4sol += 1,
            _ => {}
        }
    }
    Ok(census)
}

/// Schema tag of the calibration table.
pub const WT_TABLE_SCHEMA: &str = "ortho3r.wt_table/1";

/// Manipulators whose topology ids are fixed by convention; calibration fails
/// unless its numbering reproduces them.
pub const ANCHORS: [([f64; 3], u8); 4] = [
    ([3.0, 1.7, 1.0], 3),
    ([4.5, 2.9, 1.0], 3),
    ([0.1, 1.2, 1.0], 8),
    ([0.1, 2.25, 1.0], 9),
];

/// Sampling plan of a calibration run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPlan {
    pub r2: Vec<f64>,
    /// `[lo, hi, n]` for d₃ and d₄ (n samples, both ends included).
    pub d3: (f64, f64, usize),
    pub d4: (f64, f64, usize),
    /// Samples closer than this to a surface (in d₄) are skipped.
    pub margin: f64,
    pub census_grid: usize,
    pub aspect_grid: usize,
}

impl Default for CalibrationPlan {
    fn default() -> Self {
        CalibrationPlan {
            r2: vec![0.5, 1.0, 2.0],
            d3: (0.05, 5.0, 60),
            d4: (0.05, 5.0, 60),
            margin: 1e-3,
            census_grid: DEFAULT_CENSUS_RESOLUTION,
            aspect_grid: 256,
        }
    }
}

/// One cusp domain: the set of C surfaces lying below d₄.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainEntry {
    pub domain: u8,
    pub c_below: Vec<Surface>,
    pub n_cusps: usize,
    pub samples: usize,
}

/// One topology cell: the set of all surfaces lying below d₄.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEntry {
    pub wt: u8,
    pub domain: u8,
    pub below: Vec<Surface>,
    pub n_cusps: usize,
    pub n_nodes: usize,
    pub n_aspects: usize,
    /// `(cavities, 2-solution regions, 4-solution regions)`.
    pub census: (usize, usize, usize),
    pub n_axial_holes: usize,
    pub samples: usize,
    /// `[d₃, d₄, r₂]` of the sample farthest, relative to d₄, from every
    /// surface.
    pub representative: [f64; 3],
}

/// Calibrated mapping from surface sides to domain and topology ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WtTable {
    pub schema: String,
    pub plan: CalibrationPlan,
    pub domains: Vec<DomainEntry>,
    pub cells: Vec<CellEntry>,
}

struct Sample {
    p: Params,
    cusps: usize,
    nodes: usize,
    gap: f64,
}

fn linspace((lo, hi, n): (f64, f64, usize)) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn c_part(below: &[Surface]) -> Vec<Surface> {
    below
        .iter()
        .copied()
        .filter(|s| matches!(s, Surface::C1 | Surface::C2 | Surface::C3 | Surface::C4))
        .collect()
}

fn e_count(below: &[Surface]) -> usize {
    below.len() - c_part(below).len()
}

/// Builds the mapping table from the numeric oracles.
///
/// Every sample of `plan` away from the surfaces is keyed by the set of
/// surfaces below its d₄ and measured with [`count_cusps`] and
/// [`count_nodes`]. The counts must be constant on each key. Domains are the
/// distinct C-parts of the keys, numbered by how many C surfaces lie below.
/// Topology ids number the cells by domain, then by how many E surfaces lie
/// below. The census and aspect count of each cell come from its most
/// interior sample. Fails when a key holds inconsistent counts or when the
/// numbering misses an [`ANCHORS`] entry.
pub fn calibrate(plan: &CalibrationPlan) -> Result<WtTable> {
    let mut cells: BTreeMap<Vec<Surface>, Vec<Sample>> = BTreeMap::new();
    for &r2 in &plan.r2 {
        for d3 in linspace(plan.d3) {
            if (d3 - 1.0).abs() <= plan.margin {
                continue;
            }
            for d4 in linspace(plan.d4) {
                let p = Params::new(d3, d4, r2)?;
                let side = SideVector::of(&p);
                let gap = side.nearest.map_or(f64::INFINITY, |(_, g)| g);
                if gap <= plan.margin {
                    continue;
                }
                cells.entry(side.below).or_default().push(Sample {
                    p,
                    cusps: count_cusps(&p).count(),
                    nodes: count_nodes(&p).count(),
                    gap,
                });
            }
        }
    }

    let mut domain_cusps: BTreeMap<Vec<Surface>, (usize, usize)> = BTreeMap::new();
    for (below, samples) in &cells {
        let first = &samples[0];
        if let Some(bad) = samples
            .iter()
            .find(|s| (s.cusps, s.nodes) != (first.cusps, first.nodes))
        {
            return Err(Error::Table(format!(
                "cell {below:?}: counts ({}, {}) at {:?} but ({}, {}) at {:?}",
                first.cusps, first.nodes, first.p, bad.cusps, bad.nodes, bad.p
            )));
        }
        let entry = domain_cusps
            .entry(c_part(below))
            .or_insert((first.cusps, 0));
        if entry.0 != first.cusps {
            return Err(Error::Table(format!(
                "domain {:?}: cusp counts {} and {}",
                c_part(below),
                entry.0,
                first.cusps
            )));
        }
        entry.1 += samples.len();
    }
    let mut domain_keys: Vec<&Vec<Surface>> = domain_cusps.keys().collect();
    domain_keys.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let domains: Vec<DomainEntry> = domain_keys
        .iter()
        .enumerate()
        .map(|(i, k)| DomainEntry {
            domain: i as u8 + 1,
            c_below: (*k).clone(),
            n_cusps: domain_cusps[*k].0,
            samples: domain_cusps[*k].1,
        })
        .collect();
    let domain_of = |below: &[Surface]| {
        let c = c_part(below);
        domains
            .iter()
            .find(|d| d.c_below == c)
            .map(|d| d.domain)
            .unwrap_or(0)
    };

    let mut keys: Vec<&Vec<Surface>> = cells.keys().collect();
    keys.sort_by(|a, b| {
        domain_of(a)
            .cmp(&domain_of(b))
            .then(e_count(a).cmp(&e_count(b)))
            .then(a.cmp(b))
    });
    let mut entries = Vec::with_capacity(keys.len());
    for (i, below) in keys.into_iter().enumerate() {
        let samples = &cells[below];
        let rel = |s: &Sample| s.gap / s.p.normalized().d4();
        let rep = samples.iter().fold(
            &samples[0],
            |best, s| if rel(s) > rel(best) { s } else { best },
        );
        let census = region_census(&rep.p, plan.census_grid)?;
        entries.push(CellEntry {
            wt: i as u8 + 1,
            domain: domain_of(below),
            below: below.clone(),
            n_cusps: rep.cusps,
            n_nodes: rep.nodes,
            n_aspects: count_aspects(&rep.p, plan.aspect_grid.max(MIN_ASPECT_RESOLUTION))?,
            census: census.triple(),
            n_axial_holes: census.n_axial_holes,
            samples: samples.len(),
            representative: [rep.p.d3(), rep.p.d4(), rep.p.r2()],
        });
    }
    let table = WtTable {
        schema: WT_TABLE_SCHEMA.to_string(),
        plan: plan.clone(),
        domains,
        cells: entries,
    };
    for (q, wt) in ANCHORS {
        let p = Params::new(q[0], q[1], q[2])?;
        let got = table.cell(&p).map(|c| c.wt);
        if got != Some(wt) {
            return Err(Error::Table(format!(
                "anchor {q:?} expected WT{wt}, numbering gives {got:?}"
            )));
        }
    }
    Ok(table)
}

impl WtTable {
    /// The table shipped with the crate.
    pub fn builtin() -> &'static WtTable {
        static TABLE: std::sync::OnceLock<WtTable> = std::sync::OnceLock::new();
        TABLE.get_or_init(|| {
            WtTable::from_json(include_str!("../data/wt_table.json"))
                .expect("bundled calibration table is valid")
        })
    }

    pub fn from_json(s: &str) -> Result<WtTable> {
        let t: WtTable = serde_json::from_str(s).map_err(|e| Error::Table(e.to_string()))?;
        if t.schema != WT_TABLE_SCHEMA {
            return Err(Error::Table(format!("unsupported schema {}", t.schema)));
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn domain(&self, p: &Params) -> Option<&DomainEntry> {
        let c = c_part(&SideVector::of(p).below);
        self.domains.iter().find(|d| d.c_below == c)
    }

    pub fn cell(&self, p: &Params) -> Option<&CellEntry> {
        let below = SideVector::of(p).below;
        self.cells.iter().find(|c| c.below == below)
    }
}

fn missing(what: &str, p: &Params) -> Error {
    Error::Table(format!("no calibrated {what} for {p:?}"))
}

/// Cusp domain of a manipulator, from the closed-form surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainReport {
    pub domain: u8,
    pub n_cusps: usize,
    pub unstable: bool,
}

pub fn classify_domain(p: &Params) -> Result<DomainReport> {
    let d = WtTable::builtin()
        .domain(p)
        .ok_or_else(|| missing("domain", p))?;
    Ok(DomainReport {
        domain: d.domain,
        n_cusps: d.n_cusps,
        unstable: near_any_surface(p),
    })
}

/// Topology id from the closed-form surfaces alone.
pub fn topology_id(p: &Params) -> Result<u8> {
    WtTable::builtin()
        .cell(p)
        .map(|c| c.wt)
        .ok_or_else(|| missing("topology cell", p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub domain: u8,
    pub wt: u8,
    pub n_cusps: usize,
    pub n_nodes: usize,
    pub n_aspects: usize,
    pub quaternary: bool,
    pub has_cavity: bool,
    /// `(cavities, 2-solution regions, 4-solution regions)`.
    pub census: (usize, usize, usize),
    pub n_axial_holes: usize,
    /// Within the instability band of a separating surface.
    pub unstable: bool,
    /// Nearest separating surface and its distance in d₄ (units of d₂).
    pub nearest_surface: Option<(Surface, f64)>,
    /// Numeric cusp and node counts match the table entry of `wt`.
    pub consistent: bool,
    pub generic: bool,
}

/// Full classification: table ids plus the numeric counts behind them.
/// `grid` is the census resolution; aspects use at least
/// [`MIN_ASPECT_RESOLUTION`].
pub fn classify_topology(p: &Params, grid: usize) -> Result<TopologyReport> {
    let table = WtTable::builtin();
    let cell = table.cell(p).ok_or_else(|| missing("topology cell", p))?;
    let census = region_census(p, grid)?;
    let n_cusps = count_cusps(p).count();
    let n_nodes = count_nodes(p).count();
    Ok(TopologyReport {
        domain: cell.domain,
        wt: cell.wt,
        n_cusps,
        n_nodes,
        n_aspects: count_aspects(p, grid.max(MIN_ASPECT_RESOLUTION))?,
        quaternary: census.quaternary(),
        has_cavity: census.has_cavity(),
        census: census.triple(),
        n_axial_holes: census.n_axial_holes,
        unstable: near_any_surface(p),
        nearest_surface: SideVector::of(p).nearest,
        consistent: (n_cusps, n_nodes) == (cell.n_cusps, cell.n_nodes),
        generic: is_generic(p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn params(d3: f64, d4: f64, r2: f64) -> Params {
        Params::new(d3, d4, r2).unwrap()
    }

    #[test]
    fn surface_values() {
        let s = surfaces(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(s.c2, 2.0 / 3.0 * 10f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(s.c2, 2.10819, epsilon = 1e-5);
        assert_abs_diff_eq!(s.c3.unwrap(), 2.82843, epsilon = 1e-5);
        assert_abs_diff_eq!(s.e1, 0.87403, epsilon = 1e-5);
        assert_abs_diff_eq!(s.e2, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.e3, 2.28825, epsilon = 1e-5);
        assert!(s.c4.is_none());
        assert_abs_diff_eq!(surfaces(3.0, 1.0).unwrap().c2, 3.09233, epsilon = 1e-5);
        let at_one = surfaces(1.0, 1.0).unwrap();
        assert!(at_one.c3.is_none() && at_one.c4.is_none());
        assert!(surfaces(0.5, 1.0).unwrap().c4.is_some());
        assert!(surfaces(-1.0, 1.0).is_err());
        assert!(surfaces(1.0, 0.0).is_err());
    }

    /// d₄ where the numeric cusp count leaves zero, by bisection.
    fn numeric_c1(d3: f64, r2: f64) -> f64 {
        let cusps = |d4: f64| count_cusps(&params(d3, d4, r2)).count();
        let (mut lo, mut hi) = (1e-3, surfaces(d3, r2).unwrap().c2 * 0.99);
        assert_eq!(cusps(lo), 0);
        assert_eq!(cusps(hi), 4);
        while hi - lo > 1e-9 {
            let mid = 0.5 * (lo + hi);
            if cusps(mid) == 0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn c1_matches_cusp_count_boundary() {
        // cusps are born in close pairs the curve sampling resolves only
        // slightly past the surface, hence the relative tolerance
        for (d3, r2) in [(2.0, 1.0), (3.0, 1.0), (0.1, 1.0), (0.6, 0.5), (4.0, 2.0)] {
            let closed = surfaces(d3, r2).unwrap().c1;
            let numeric = numeric_c1(d3, r2);
            assert_abs_diff_eq!(closed, numeric, epsilon = 1e-4 * closed);
            let count = |k: f64| count_cusps(&params(d3, closed * k, r2)).count();
            assert_eq!(count(1.0 - 1e-4), 0);
            assert_eq!(count(1.0 + 1e-4), 4);
        }
        assert_abs_diff_eq!(surfaces(2.0, 1.0).unwrap().c1, 0.20081, epsilon = 1e-5);
    }

    #[test]
    fn domains() {
        let reference_arm = classify_domain(&params(2.0, 1.5, 1.0)).unwrap();
        assert_eq!(reference_arm.n_cusps, 4);
        assert!(!reference_arm.unstable);
        let p = params(3.0, 1.7, 1.0);
        assert_eq!(
            classify_domain(&p).unwrap().n_cusps,
            count_cusps(&p).count()
        );
        // far above every surface: d₃ < 1 loses its cusps, d₃ > 1 keeps four
        for (d3, domain, cusps) in [(0.5, 5, 0), (2.0, 4, 4)] {
            let far = params(d3, 20.0, 1.0);
            let d = classify_domain(&far).unwrap();
            assert_eq!((d.domain, d.n_cusps), (domain, cusps));
            assert_eq!(d.n_cusps, count_cusps(&far).count());
        }
        // the domain to cusp-count correspondence
        let cusps: Vec<usize> = WtTable::builtin()
            .domains
            .iter()
            .map(|d| d.n_cusps)
            .collect();
        assert_eq!(cusps, [0, 4, 2, 4, 0]);
    }

    #[test]
    fn instability_band() {
        let s = surfaces(2.0, 1.0).unwrap();
        assert!(near_any_surface(&params(2.0, s.c2 + 5e-7, 1.0)));
        assert!(!near_any_surface(&params(2.0, s.c2 + 1e-4, 1.0)));
        assert!(near_any_surface(&params(1.0, 3.0, 1.0)));
        assert!(
            classify_domain(&params(2.0, s.c3.unwrap(), 1.0))
                .unwrap()
                .unstable
        );
    }

    #[test]
    fn census_of_the_reference_manipulators() {
        let reference_arm = region_census(&params(2.0, 1.5, 1.0), 200).unwrap();
        assert!(!reference_arm.has_cavity());
        assert!(reference_arm.quaternary());
        // a thin torus around the axis encloses a toroidal cavity
        let thin = region_census(&params(0.9, 0.05, 0.5), 200).unwrap();
        assert_eq!(thin.triple(), (1, 1, 0));
        assert!(region_census(&reference_params(), 100).is_err());
    }

    fn reference_params() -> Params {
        params(2.0, 1.5, 1.0)
    }

    #[test]
    fn exterior_is_never_a_cavity() {
        // unreachable far field only: a tiny, nearly straight wrist
        for p in [params(0.1, 1.2, 1.0), params(3.0, 4.0, 1.0)] {
            let c = region_census(&p, 200).unwrap();
            assert_eq!(c.n_void, 0, "{p:?}");
        }
    }

    #[test]
    fn builtin_table_is_complete() {
        let t = WtTable::builtin();
        assert_eq!(t.schema, WT_TABLE_SCHEMA);
        let wts: Vec<u8> = t.cells.iter().map(|c| c.wt).collect();
        assert_eq!(wts, (1..=9).collect::<Vec<u8>>());
        for c in &t.cells {
            let d = t.domains.iter().find(|d| d.domain == c.domain).unwrap();
            assert_eq!(d.n_cusps, c.n_cusps);
            assert!(c.n_nodes <= 4);
            // representatives classify back into their own cell
            let [d3, d4, r2] = c.representative;
            assert_eq!(topology_id(&params(d3, d4, r2)).unwrap(), c.wt);
        }
        let back = WtTable::from_json(&t.to_json()).unwrap();
        assert_eq!(&back, t);
        assert!(WtTable::from_json("{}").is_err());
    }

    #[test]
    fn named_topologies() {
        for ([d3, d4, r2], wt) in ANCHORS {
            assert_eq!(topology_id(&params(d3, d4, r2)).unwrap(), wt);
        }
    }

    #[test]
    fn crossing_e2_keeps_cusps() {
        for d3 in [0.5, 0.9, 1.3, 2.0, 3.5] {
            let below = params(d3, d3 * (1.0 - 1e-3), 1.0);
            let above = params(d3, d3 * (1.0 + 1e-3), 1.0);
            assert_eq!(count_cusps(&below).count(), count_cusps(&above).count());
            assert_ne!(count_nodes(&below).count(), count_nodes(&above).count());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn e1_never_exceeds_e3(d3 in 0.01f64..10.0, r2 in 0.01f64..10.0) {
            let s = surfaces(d3, r2).unwrap();
            prop_assert!(s.e1 <= s.e3);
            for (_, v) in s.defined() {
                prop_assert!(v > 0.0);
            }
        }

        #[test]
        fn topology_is_scale_invariant(
            d3 in 0.05f64..5.0,
            d4 in 0.05f64..5.0,
            r2 in 0.5f64..2.0,
            k in 0.1f64..10.0,
        ) {
            let p = params(d3, d4, r2);
            let q = Params::from_lengths(k, k * d3, k * d4, k * r2).unwrap();
            prop_assume!(!near_any_surface(&p) && !near_any_surface(&q));
            prop_assert_eq!(topology_id(&p).ok(), topology_id(&q).ok());
        }
    }
}
