//! Subcommand implementations. Each returns the process exit code.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ortho3r::classify::{
    calibrate as run_calibration, classify_topology, CalibrationPlan, TopologyReport,
};
use ortho3r::ik::ik_full;
use ortho3r::model::{
    det_j_closed, fk as forward, to_section, CartesianPoint, JointConfig, Params, SectionPoint,
};
use ortho3r::perf::{
    inv_condition, iso_map, Axis, MapKind, MIN_KINV_RESOLUTION, MIN_SECTION_RESOLUTION,
};
use ortho3r::singular::{count_cusps, count_nodes, trace_branches, SingularPointSet};
use serde::Serialize;

use crate::plots::{branch_name, curves_svg, default_levels, map_svg};
use crate::{
    schema, CalibrateArgs, ClassifyArgs, CliError, CurvesArgs, FkArgs, IkArgs, Manipulator,
    MapArgs, Range,
};

type Result<T> = std::result::Result<T, CliError>;

const DEFAULT_MAP_SAMPLES: usize = 25;

/// Output directory and report format shared by all commands.
pub struct Output {
    dir: PathBuf,
    json: bool,
}

impl Output {
    pub fn new(dir: PathBuf, json: bool) -> Self {
        Output { dir, json }
    }

    /// Writes `contents` to `name` inside the output directory, creating the
    /// directory when needed.
    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let io = |source| CliError::Io {
            path: path.clone(),
            source,
        };
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io)?;
        }
        fs::write(&path, contents).map_err(io)?;
        Ok(path)
    }

    fn print_json<T: Serialize>(&self, value: &T) {
        println!(
            "{}",
            serde_json::to_string_pretty(value).expect("reports serialize")
        );
    }
}

fn params(m: &Manipulator) -> Result<Params> {
    Ok(Params::with_scale(m.d3, m.d4, m.r2, m.d2)?)
}

fn display_paths(paths: &[PathBuf]) -> Vec<String> {
    paths.iter().map(|p| p.display().to_string()).collect()
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'a str,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct ClassifyJson<'a> {
    params: &'a Params,
    #[serde(flatten)]
    report: &'a TopologyReport,
}

pub fn classify(out: &Output, a: &ClassifyArgs) -> Result<ExitCode> {
    let p = params(&a.m)?;
    let r = classify_topology(&p, a.grid)?;
    if out.json {
        out.print_json(&Envelope {
            schema: schema::TOPOLOGY,
            body: ClassifyJson {
                params: &p,
                report: &r,
            },
        });
    } else {
        let (v, s2, s4) = r.census;
        println!(
            "manipulator   d3 = {}, d4 = {}, r2 = {}",
            p.d3(),
            p.d4(),
            p.r2()
        );
        println!("topology      WT{} (domain {})", r.wt, r.domain);
        println!("cusps         {}", r.n_cusps);
        println!("nodes         {}", r.n_nodes);
        println!("aspects       {}", r.n_aspects);
        println!("quaternary    {}", r.quaternary);
        println!("cavity        {}", r.has_cavity);
        println!("regions       {v} void, {s2} two-solution, {s4} four-solution");
        println!("axial holes   {}", r.n_axial_holes);
        println!("generic       {}", r.generic);
        if let Some((s, gap)) = r.nearest_surface {
            println!("nearest       {s:?} at distance {gap:.3e}");
        }
        if !r.consistent {
            println!(
                "warning       numeric counts differ from the table entry of WT{}",
                r.wt
            );
        }
        println!(
            "status        {}",
            if r.unstable { "unstable" } else { "stable" }
        );
    }
    if r.unstable {
        eprintln!("unstable: within the instability band of a separating surface");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct BranchSummary {
    id: &'static str,
    samples: usize,
    closed: bool,
}

#[derive(Serialize)]
struct CurvesJson<'a> {
    params: &'a Params,
    branches: Vec<BranchSummary>,
    n_cusps: usize,
    n_nodes: usize,
    unstable: bool,
    files: Vec<String>,
}

fn points_csv(p: &Params, cusps: &SingularPointSet, nodes: &SingularPointSet) -> String {
    let l = p.scale();
    let mut s =
        String::from("kind,branch,rho,z,theta2,theta3,other_branch,other_theta2,other_theta3\n");
    for (kind, set) in [("cusp", cusps), ("node", nodes)] {
        for q in &set.points {
            let _ = write!(
                s,
                "{kind},{},{},{},{},{}",
                branch_name(q.branch),
                q.point.rho * l,
                q.point.z * l,
                q.theta2,
                q.theta3
            );
            match q.other {
                Some((b, t2, t3)) => {
                    let _ = writeln!(s, ",{},{t2},{t3}", branch_name(b));
                }
                None => s.push_str(",,,\n"),
            }
        }
    }
    s
}

pub fn curves(out: &Output, a: &CurvesArgs) -> Result<ExitCode> {
    let p = params(&a.m)?;
    let branches = trace_branches(&p, a.samples)?;
    let cusps = count_cusps(&p);
    let nodes = count_nodes(&p);

    let mut csv = String::from("branch,index,theta2,theta3,rho,z\n");
    for b in &branches {
        for (i, s) in b.samples.iter().enumerate() {
            let _ = writeln!(
                csv,
                "{},{i},{},{},{},{}",
                branch_name(b.id),
                s.theta2,
                s.theta3,
                s.rho,
                s.z
            );
        }
    }
    let mut files = vec![
        out.write(&format!("{}_branches.csv", a.out), &csv)?,
        out.write(
            &format!("{}_points.csv", a.out),
            &points_csv(&p, &cusps, &nodes),
        )?,
    ];
    if a.svg {
        files.push(out.write(
            &format!("{}.svg", a.out),
            &curves_svg(&p, &branches, &cusps, &nodes),
        )?);
    }

    let unstable = cusps.unstable || nodes.unstable;
    if out.json {
        out.print_json(&Envelope {
            schema: schema::CURVES,
            body: CurvesJson {
                params: &p,
                branches: branches
                    .iter()
                    .map(|b| BranchSummary {
                        id: branch_name(b.id),
                        samples: b.samples.len(),
                        closed: b.closed,
                    })
                    .collect(),
                n_cusps: cusps.count(),
                n_nodes: nodes.count(),
                unstable,
                files: display_paths(&files),
            },
        });
    } else {
        let names: Vec<&str> = branches.iter().map(|b| branch_name(b.id)).collect();
        println!("branches  {}", names.join(", "));
        println!("cusps     {}", cusps.count());
        println!("nodes     {}", nodes.count());
        if unstable {
            println!("note      counts are unstable near a separating surface");
        }
        for f in &files {
            println!("wrote     {}", f.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn axis(r: &Range) -> Result<Axis> {
    Ok(Axis::new(r.lo, r.hi, r.n.unwrap_or(DEFAULT_MAP_SAMPLES))?)
}

#[derive(Serialize)]
struct Argmax {
    d3: f64,
    d4: f64,
    value: f64,
}

#[derive(Serialize)]
struct MapJson<'a> {
    kind: &'a str,
    r2: f64,
    argmax: Argmax,
    levels: &'a [f64],
    files: Vec<String>,
}

/// `kmap` (`volume == false`) and `volmap`.
pub fn map(out: &Output, a: &MapArgs, volume: bool) -> Result<ExitCode> {
    let kind = a.kind.unwrap_or(if volume {
        MapKind::P4
    } else {
        MapKind::KinvMean
    });
    if kind.is_kinv() == volume {
        let allowed = if volume {
            "p4, p2 or total"
        } else {
            "mean or max"
        };
        return Err(CliError::Usage(format!(
            "--kind {} does not apply here; use {allowed}",
            kind.name()
        )));
    }
    if !(a.r2.is_finite() && a.r2 > 0.0) {
        return Err(ortho3r::error::Error::InvalidParameter {
            name: "r2",
            value: a.r2,
        }
        .into());
    }
    let inner = a.inner.unwrap_or(if volume {
        MIN_SECTION_RESOLUTION
    } else {
        MIN_KINV_RESOLUTION
    });
    let m = iso_map(kind, axis(&a.d3)?, axis(&a.d4)?, a.r2, inner)?;

    let levels = match &a.levels {
        Some(l) => l.clone(),
        None => default_levels(&m, a.nlevels),
    };
    let prefix = a
        .out
        .clone()
        .unwrap_or_else(|| format!("{}_{}", if volume { "volmap" } else { "kmap" }, kind.name()));
    let mut files = vec![out.write(&format!("{prefix}.csv"), &m.to_csv())?];
    if out.json {
        files.push(out.write(&format!("{prefix}.json"), &m.to_json())?);
    }
    if a.svg {
        files.push(out.write(&format!("{prefix}.svg"), &map_svg(&m, &levels))?);
    }

    let (d3, d4, value) = m.argmax();
    if out.json {
        out.print_json(&Envelope {
            schema: schema::MAP_SUMMARY,
            body: MapJson {
                kind: kind.name(),
                r2: a.r2,
                argmax: Argmax { d3, d4, value },
                levels: &levels,
                files: display_paths(&files),
            },
        });
    } else {
        println!(
            "{} over {}x{} manipulators at r2 = {}",
            kind.name(),
            m.d3.n,
            m.d4.n,
            a.r2
        );
        println!("max {value} at d3 = {d3}, d4 = {d4}");
        for f in &files {
            println!("wrote {}", f.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn angle_out(theta: f64, degrees: bool) -> f64 {
    if degrees {
        theta.to_degrees()
    } else {
        theta
    }
}

#[derive(Serialize)]
struct Joints {
    theta1: f64,
    theta2: f64,
    theta3: f64,
}

impl Joints {
    fn of(q: &JointConfig, degrees: bool) -> Self {
        Joints {
            theta1: angle_out(q.theta1, degrees),
            theta2: angle_out(q.theta2, degrees),
            theta3: angle_out(q.theta3, degrees),
        }
    }
}

#[derive(Serialize)]
struct IkJson {
    target: CartesianPoint,
    solution_count: usize,
    solutions: Vec<Joints>,
    residual_max: f64,
    boundary: bool,
    on_axis: bool,
    degrees: bool,
}

pub fn ik(out: &Output, a: &IkArgs) -> Result<ExitCode> {
    let p = params(&a.m)?;
    for (name, value) in [("x", a.x), ("y", a.y), ("z", a.z)] {
        if !value.is_finite() {
            return Err(CliError::Usage(format!("{name} = {value} is not finite")));
        }
    }
    let target = CartesianPoint::new(a.x, a.y, a.z);
    let set = ik_full(&p, &target);
    if out.json {
        out.print_json(&Envelope {
            schema: schema::IK,
            body: IkJson {
                target,
                solution_count: set.len(),
                solutions: set
                    .solutions
                    .iter()
                    .map(|q| Joints::of(q, a.degrees))
                    .collect(),
                residual_max: set.residual_max,
                boundary: set.boundary,
                on_axis: set.on_axis,
                degrees: a.degrees,
            },
        });
        return Ok(ExitCode::SUCCESS);
    }
    let n = set.len();
    println!("{n} solution{}", if n == 1 { "" } else { "s" });
    if n > 0 {
        let unit = if a.degrees { "deg" } else { "rad" };
        println!(
            "{:>3}  {:>14}  {:>14}  {:>14}  {:>10}",
            "#", "theta1", "theta2", "theta3", "residual"
        );
        for (k, q) in set.solutions.iter().enumerate() {
            let j = Joints::of(q, a.degrees);
            let res = forward(&p, q).distance(&target);
            println!(
                "{:>3}  {:>14.9}  {:>14.9}  {:>14.9}  {:>10.2e}",
                k + 1,
                j.theta1,
                j.theta2,
                j.theta3,
                res
            );
        }
        println!("angles in {unit}; max residual {:.2e}", set.residual_max);
        if set.on_axis {
            println!("target on the Z axis: theta1 is arbitrary and reported as 0");
        }
        if set.boundary {
            println!("a solution lies on a singular curve");
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct FkJson {
    joints: Joints,
    point: CartesianPoint,
    section: SectionPoint,
    det_j: f64,
    kinv: f64,
    degrees: bool,
}

pub fn fk(out: &Output, a: &FkArgs) -> Result<ExitCode> {
    let p = params(&a.m)?;
    let angle_in = |t: f64| if a.degrees { t.to_radians() } else { t };
    for (name, value) in [
        ("theta1", a.theta1),
        ("theta2", a.theta2),
        ("theta3", a.theta3),
    ] {
        if !value.is_finite() {
            return Err(CliError::Usage(format!("{name} = {value} is not finite")));
        }
    }
    let q = JointConfig::new(angle_in(a.theta1), angle_in(a.theta2), angle_in(a.theta3));
    let pt = forward(&p, &q);
    let report = FkJson {
        joints: Joints::of(&q, a.degrees),
        point: pt,
        section: to_section(&pt),
        det_j: det_j_closed(&p, &q),
        kinv: inv_condition(&p, &q),
        degrees: a.degrees,
    };
    if out.json {
        out.print_json(&Envelope {
            schema: schema::FK,
            body: report,
        });
    } else {
        println!("x        {}", pt.x);
        println!("y        {}", pt.y);
        println!("z        {}", pt.z);
        println!("rho      {}", report.section.rho);
        println!("det J    {}", report.det_j);
        println!("K^-1     {}", report.kinv);
    }
    Ok(ExitCode::SUCCESS)
}

pub fn calibrate(out: &Output, a: &CalibrateArgs) -> Result<ExitCode> {
    let base = CalibrationPlan::default();
    let plan = CalibrationPlan {
        d3: (base.d3.0, base.d3.1, a.samples),
        d4: (base.d4.0, base.d4.1, a.samples),
        census_grid: a.census_grid,
        aspect_grid: a.aspect_grid,
        ..base
    };
    let table = run_calibration(&plan)?;
    let path = out.write(&a.out, &table.to_json())?;
    if out.json {
        #[derive(Serialize)]
        struct CalibrateJson<'a> {
            domains: usize,
            topologies: usize,
            file: &'a Path,
        }
        out.print_json(&CalibrateJson {
            domains: table.domains.len(),
            topologies: table.cells.len(),
            file: &path,
        });
    } else {
        println!(
            "{} topologies in {} cusp domains; wrote {}",
            table.cells.len(),
            table.domains.len(),
            path.display()
        );
    }
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_csv_rows_have_constant_width() {
        let p = Params::new(2.0, 1.5, 1.0).unwrap();
        let csv = points_csv(&p, &count_cusps(&p), &count_nodes(&p));
        let widths: Vec<usize> = csv.lines().map(|l| l.split(',').count()).collect();
        assert_eq!(widths.len(), 1 + 4);
        assert!(widths.iter().all(|&w| w == 9));
    }

    #[test]
    fn node_rows_carry_the_second_preimage() {
        // WT4 territory has nodes
        let p = Params::new(2.0, 3.0, 1.0).unwrap();
        let nodes = count_nodes(&p);
        assert!(nodes.count() > 0);
        let csv = points_csv(
            &p,
            &SingularPointSet {
                points: vec![],
                unstable: false,
            },
            &nodes,
        );
        assert!(csv
            .lines()
            .skip(1)
            .all(|l| l.starts_with("node,") && !l.ends_with(",,,")));
    }
}
