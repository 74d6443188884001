//! Versioned descriptions of every file and report the CLI writes.

pub const BRANCHES: &str = "ortho3r.branches/1";
pub const POINTS: &str = "ortho3r.points/1";
pub const CURVES: &str = "ortho3r.curves/1";
pub const TOPOLOGY: &str = "ortho3r.topology/1";
pub const MAP_SUMMARY: &str = "ortho3r.map_summary/1";
pub const IK: &str = "ortho3r.ik/1";
pub const FK: &str = "ortho3r.fk/1";

/// `(schema id, format, description)` for each output.
pub fn catalogue() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        (
            BRANCHES,
            "csv",
            "Singular branches written by `curves` as <out>_branches.csv.\n\
             columns: branch,index,theta2,theta3,rho,z\n\
             branch is S1, S2, L+ or L- (the axis lines theta3 = +-acos(-d3/d4), present when d3 <= d4);\n\
             index runs over the samples of one branch; angles in radians; rho, z in units of d2 times --d2.",
        ),
        (
            POINTS,
            "csv",
            "Cusps and nodes written by `curves` as <out>_points.csv.\n\
             columns: kind,branch,rho,z,theta2,theta3,other_branch,other_theta2,other_theta3\n\
             kind is cusp or node; the other_* columns hold the second preimage of a node and are empty for cusps.",
        ),
        (
            ortho3r::perf::ISOMAP_SCHEMA,
            "csv, json",
            "Iso-value map written by `kmap` and `volmap` as <out>.csv (and <out>.json with --json).\n\
             csv: comment lines `# schema`, `# kind`, `# r2`, `# d3: lo:hi:n`, `# d4: lo:hi:n`, `# inner_resolution`,\n\
             then a header `d4\\d3,<d3 values>` and one row per d4 value: `<d4>,<values>`.\n\
             json: {schema, kind, d3: {lo, hi, n}, d4: {lo, hi, n}, r2, inner_resolution, values[j][i]} with\n\
             values[j][i] at d4 index j and d3 index i. kind is kinv_mean, kinv_max, p4, p2 or p_total.",
        ),
        (
            MAP_SUMMARY,
            "json",
            "Report printed by `kmap`/`volmap --json`: {schema, kind, r2, argmax: {d3, d4, value}, levels, files}.",
        ),
        (
            CURVES,
            "json",
            "Report printed by `curves --json`: {schema, params, branches: [{id, samples, closed}], n_cusps,\n\
             n_nodes, unstable, files}.",
        ),
        (
            TOPOLOGY,
            "json",
            "Report printed by `classify --json`: {schema, params, domain, wt, n_cusps, n_nodes, n_aspects,\n\
             quaternary, has_cavity, census: [cavities, 2-solution regions, 4-solution regions],\n\
             n_axial_holes, unstable, nearest_surface: [surface, distance] or null, consistent, generic}.",
        ),
        (
            IK,
            "json",
            "Report printed by `ik --json`: {schema, target: {x, y, z}, solution_count,\n\
             solutions: [{theta1, theta2, theta3}], residual_max, boundary, on_axis, degrees}.",
        ),
        (
            FK,
            "json",
            "Report printed by `fk --json`: {schema, joints: {theta1, theta2, theta3}, point: {x, y, z},\n\
             section: {rho, z}, det_j, kinv, degrees}.",
        ),
        (
            ortho3r::classify::WT_TABLE_SCHEMA,
            "json",
            "Calibration table written by `calibrate`: {schema, plan, domains: [{domain, c_below, n_cusps,\n\
             samples}], cells: [{wt, domain, below, n_cusps, n_nodes, n_aspects, census, n_axial_holes,\n\
             samples, representative}]}.",
        ),
    ]
}

pub fn render() -> String {
    let mut out = String::new();
    for (id, format, text) in catalogue() {
        out.push_str(&format!("{id} ({format})\n"));
        for line in text.lines() {
            out.push_str("  ");
            out.push_str(line.trim_start());
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_versioned() {
        let cat = catalogue();
        let mut ids: Vec<&str> = cat.iter().map(|c| c.0).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), cat.len());
        assert!(ids
            .iter()
            .all(|id| id.starts_with("ortho3r.") && id.ends_with("/1")));
    }
}
