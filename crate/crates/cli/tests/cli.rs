use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ortho3r::classify::topology_id;
use ortho3r::model::Params;
use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ortho3r"))
        .args(args)
        .env("ORTHO3R_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

fn well_formed_svg(path: &Path) {
    let text = fs::read_to_string(path).unwrap();
    let opts = roxmltree::ParsingOptions {
        allow_dtd: true,
        ..Default::default()
    };
    let doc = roxmltree::Document::parse_with_options(&text, opts).unwrap();
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(
        root.tag_name().namespace(),
        Some("http://www.w3.org/2000/svg")
    );
    assert_eq!(root.attribute("version"), Some("1.1"));
    assert!(root.attribute("viewBox").is_some());
    let allowed = ["svg", "rect", "polyline", "circle", "text"];
    for n in doc.descendants().filter(|n| n.is_element()) {
        assert!(allowed.contains(&n.tag_name().name()), "{:?}", n.tag_name());
    }
}

#[test]
fn classify_reference_manipulator() {
    let d = tmp();
    let o = run(
        d.path(),
        &[
            "classify", "--d3", "2", "--d4", "1.5", "--r2", "1", "--json",
        ],
    );
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["schema"], "ortho3r.topology/1");
    assert_eq!(r["n_cusps"], 4);
    assert_eq!(r["n_nodes"], 0);
    assert_eq!(r["has_cavity"], false);
}

#[test]
fn classify_named_exemplar() {
    let d = tmp();
    let o = run(
        d.path(),
        &[
            "classify", "--d3", "3", "--d4", "1.7", "--r2", "1", "--json",
        ],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["wt"], 3);
    let o = run(d.path(), &["classify", "--d3", "3", "--d4", "1.7"]);
    assert!(stdout(&o).contains("WT3"));
}

#[test]
fn classify_rejects_invalid_lengths() {
    let d = tmp();
    let o = run(
        d.path(),
        &["classify", "--d3", "-1", "--d4", "1", "--r2", "1"],
    );
    assert_eq!(code(&o), 1);
    let o = run(
        d.path(),
        &["classify", "--d3", "2", "--d4", "0", "--r2", "1"],
    );
    assert_eq!(code(&o), 1);
}

#[test]
fn classify_on_a_surface_is_unstable() {
    let d = tmp();
    // d4 = d3 is the surface E2
    let o = run(
        d.path(),
        &["classify", "--d3", "2", "--d4", "2", "--r2", "1", "--json"],
    );
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["unstable"], true);
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    let d = tmp();
    assert_eq!(code(&run(d.path(), &[])), 1);
    assert_eq!(code(&run(d.path(), &["classify", "--d3", "2"])), 1);
    assert_eq!(code(&run(d.path(), &["frobnicate"])), 1);
    assert_eq!(code(&run(d.path(), &["kmap", "--d3", "1:0.5"])), 1);
    assert_eq!(code(&run(d.path(), &["kmap", "--d3", "x"])), 1);
    assert_eq!(code(&run(d.path(), &["--help"])), 0);
}

#[test]
fn schema_flag_lists_every_format() {
    let d = tmp();
    let o = run(d.path(), &["--schema"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    for id in [
        "ortho3r.branches/1",
        "ortho3r.points/1",
        "ortho3r.isomap/1",
        "ortho3r.topology/1",
        "ortho3r.ik/1",
        "ortho3r.fk/1",
        "ortho3r.wt_table/1",
    ] {
        assert!(s.contains(id), "{id} missing");
    }
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn curves_of_the_reference_manipulator() {
    let d = tmp();
    let o = run(
        d.path(),
        &["curves", "--d3", "2", "--d4", "1.5", "--r2", "1", "--svg"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let rows = csv_rows(&d.path().join("curves_branches.csv"));
    assert_eq!(rows[0].join(","), "branch,index,theta2,theta3,rho,z");
    let mut names: Vec<&str> = rows[1..].iter().map(|r| r[0].as_str()).collect();
    names.dedup();
    assert_eq!(names, ["S1", "S2"]);

    let points = csv_rows(&d.path().join("curves_points.csv"));
    assert_eq!(points[1..].iter().filter(|r| r[0] == "cusp").count(), 4);
    assert_eq!(points[1..].iter().filter(|r| r[0] == "node").count(), 0);
    well_formed_svg(&d.path().join("curves.svg"));
}

#[test]
fn curves_include_axis_lines_when_d3_le_d4() {
    let d = tmp();
    let o = run(
        d.path(),
        &[
            "curves", "--d3", "0.5", "--d4", "2", "--r2", "1", "--json", "--svg",
        ],
    );
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let ids: Vec<&str> = r["branches"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["S1", "S2", "L+", "L-"]);
    well_formed_svg(&d.path().join("curves.svg"));

    let o = run(
        d.path(),
        &["curves", "--d3", "3", "--d4", "2", "--r2", "1", "--json"],
    );
    assert_eq!(json(&o)["branches"].as_array().unwrap().len(), 2);
}

#[test]
fn unwritable_output_exits_1() {
    let d = tmp();
    let file = d.path().join("plain_file");
    fs::write(&file, "x").unwrap();
    let blocked = file.join("sub");
    let o = run(
        d.path(),
        &[
            "--out-dir",
            blocked.to_str().unwrap(),
            "curves",
            "--d3",
            "2",
            "--d4",
            "1.5",
        ],
    );
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot write"));
}

#[test]
fn out_dir_comes_from_the_environment() {
    let d = tmp();
    let nested = d.path().join("a/b");
    let o = Command::new(env!("CARGO_BIN_EXE_ortho3r"))
        .args(["curves", "--d3", "2", "--d4", "1.5", "--out", "plot"])
        .env("ORTHO3R_OUT_DIR", &nested)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(nested.join("plot_branches.csv").exists());
}

#[test]
fn maps_are_byte_identical_across_runs() {
    let (a, b) = (tmp(), tmp());
    let args = [
        "kmap", "--kind", "max", "--d3", "0.5:3:4", "--d4", "0.5:3:3", "--svg", "--json",
    ];
    assert_eq!(code(&run(a.path(), &args)), 0);
    assert_eq!(code(&run(b.path(), &args)), 0);
    for f in [
        "kmap_kinv_max.csv",
        "kmap_kinv_max.json",
        "kmap_kinv_max.svg",
    ] {
        let (x, y) = (
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
        );
        assert_eq!(x, y, "{f} differs");
    }
    let args = [
        "volmap", "--kind", "total", "--d3", "1:2:2", "--d4", "1:2:2",
    ];
    assert_eq!(code(&run(a.path(), &args)), 0);
    assert_eq!(code(&run(b.path(), &args)), 0);
    assert_eq!(
        fs::read(a.path().join("volmap_p_total.csv")).unwrap(),
        fs::read(b.path().join("volmap_p_total.csv")).unwrap()
    );
}

#[test]
fn map_csv_layout() {
    let d = tmp();
    let o = run(
        d.path(),
        &[
            "kmap", "--d3", "0.5:3:4", "--d4", "0.5:3:3", "--out", "m", "--svg",
        ],
    );
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(d.path().join("m.csv")).unwrap();
    assert!(text.starts_with("# schema: ortho3r.isomap/1\n# kind: kinv_mean\n"));
    let rows = csv_rows(&d.path().join("m.csv"));
    assert_eq!(rows.len(), 1 + 3);
    assert!(rows.iter().all(|r| r.len() == 1 + 4));
    assert_eq!(rows[0][0], "d4\\d3");
    for r in &rows[1..] {
        for v in &r[1..] {
            let v: f64 = v.parse().unwrap();
            assert!((0.0..=1.0).contains(&v));
        }
    }
    well_formed_svg(&d.path().join("m.svg"));
}

#[test]
fn map_kind_must_match_the_command() {
    let d = tmp();
    assert_eq!(code(&run(d.path(), &["kmap", "--kind", "p4"])), 1);
    assert_eq!(code(&run(d.path(), &["volmap", "--kind", "mean"])), 1);
    assert_eq!(code(&run(d.path(), &["volmap", "--kind", "sideways"])), 1);
}

fn argmax_topology(o: &Output) -> u8 {
    let r = json(o);
    let d3 = r["argmax"]["d3"].as_f64().unwrap();
    let d4 = r["argmax"]["d4"].as_f64().unwrap();
    topology_id(&Params::new(d3, d4, 1.0).unwrap()).unwrap()
}

#[test]
fn mean_kinv_map_peaks_in_wt3() {
    let d = tmp();
    let o = run(
        d.path(),
        &[
            "kmap",
            "--kind",
            "mean",
            "--r2",
            "1",
            "--d3",
            "0.05:5:11",
            "--d4",
            "0.05:5:11",
            "--json",
        ],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(argmax_topology(&o), 3);
}

#[test]
fn four_solution_map_peaks_in_wt9() {
    let d = tmp();
    let o = run(
        d.path(),
        &[
            "volmap", "--kind", "p4", "--r2", "1", "--d3", "0.05:5:8", "--d4", "0.05:5:8", "--json",
        ],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(argmax_topology(&o), 9);
}

#[test]
fn unreachable_target_has_zero_solutions() {
    let d = tmp();
    let o = run(
        d.path(),
        &[
            "ik", "--d3", "2", "--d4", "1.5", "--x", "100", "--y", "0", "--z", "0",
        ],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0 solutions"));
}

#[test]
fn ik_json_reports_the_solution_count() {
    let d = tmp();
    let o = run(
        d.path(),
        &[
            "ik", "--d3", "2", "--d4", "1.5", "--x", "2", "--y", "0.5", "--z", "-0.3", "--json",
        ],
    );
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["schema"], "ortho3r.ik/1");
    let n = r["solution_count"].as_u64().unwrap();
    assert_eq!(n as usize, r["solutions"].as_array().unwrap().len());
    assert!([0, 2, 4].contains(&n));
    assert!(r["residual_max"].as_f64().unwrap() < 1e-9);
}

fn fk_then_ik(angles: [&str; 3], degrees: bool) {
    let d = tmp();
    let mut args = vec![
        "--json", "fk", "--d3", "2", "--d4", "1.5", "--r2", "1", "--d2", "0.4", "--theta1",
        angles[0], "--theta2", angles[1], "--theta3", angles[2],
    ];
    if degrees {
        args.push("--degrees");
    }
    let f = json(&run(d.path(), &args));
    let pt = &f["point"];
    let (x, y, z) = (
        pt["x"].to_string(),
        pt["y"].to_string(),
        pt["z"].to_string(),
    );
    let mut args = vec![
        "--json", "ik", "--d3", "2", "--d4", "1.5", "--r2", "1", "--d2", "0.4", "--x", &x, "--y",
        &y, "--z", &z,
    ];
    if degrees {
        args.push("--degrees");
    }
    let r = json(&run(d.path(), &args));
    let want: Vec<f64> = ["theta1", "theta2", "theta3"]
        .iter()
        .map(|k| f["joints"][k].as_f64().unwrap())
        .collect();
    let tol = if degrees { 1e-6 } else { 1e-8 };
    let found = r["solutions"].as_array().unwrap().iter().any(|s| {
        ["theta1", "theta2", "theta3"]
            .iter()
            .zip(&want)
            .all(|(k, w)| (s[k].as_f64().unwrap() - w).abs() < tol)
    });
    assert!(found, "{want:?} not among {}", r["solutions"]);
}

#[test]
fn fk_then_ik_recovers_the_configuration() {
    fk_then_ik(["0.3", "-1.1", "2.0"], false);
    fk_then_ik(["-2.5", "0.7", "-0.4"], false);
    fk_then_ik(["40", "100", "-75"], true);
}

#[test]
fn fk_reports_section_and_conditioning() {
    let d = tmp();
    let o = run(
        d.path(),
        &[
            "fk", "--d3", "2", "--d4", "1.5", "--theta1", "0", "--theta2", "0", "--theta3", "0",
            "--json",
        ],
    );
    assert_eq!(code(&o), 0);
    let r = json(&o);
    // fully stretched along x: x = 1 + d3 + d4, with the r2 offset along y
    assert!((r["point"]["x"].as_f64().unwrap() - 4.5).abs() < 1e-12);
    assert!((r["point"]["y"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let k = r["kinv"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&k));
}

#[test]
fn coarse_calibration_finds_nine_topologies() {
    let d = tmp();
    let o = run(
        d.path(),
        &[
            "--json",
            "calibrate",
            "--samples",
            "20",
            "--census-grid",
            "200",
            "--out",
            "t.json",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["topologies"], 9);
    assert_eq!(r["domains"], 5);
    let table: Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("t.json")).unwrap()).unwrap();
    assert_eq!(table["schema"], "ortho3r.wt_table/1");
}
