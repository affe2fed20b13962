//! Command-line acceptance: deterministic reports across thread counts and
//! the exit-code contract.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ortho2d"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ortho2d-test-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_unit_square_spec(dir: &std::path::Path) -> PathBuf {
    let spec = dir.join("unit.json");
    fs::write(
        &spec,
        r#"{"alpha": 1, "rectangles": [{"x0": 0, "y0": 0, "x1": 1, "y1": 1}]}"#,
    )
    .unwrap();
    spec
}

/// Criterion 11: identical config and seed produce byte-identical energy
/// reports for 1 and 8 worker threads.
#[test]
fn criterion_11_reports_identical_across_thread_counts() {
    let dir = temp_dir("det");
    let spec = write_unit_square_spec(&dir);
    let mut outputs = Vec::new();
    for threads in ["1", "8"] {
        let out = dir.join(format!("energy-t{threads}"));
        let status = bin()
            .args([
                "energy",
                "--domain",
                spec.to_str().unwrap(),
                "--depth",
                "6",
                "--alpha",
                "1",
                "--delta",
                "0,0.05",
                "--h",
                "0,0.01",
                "--threads",
                threads,
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push((
            fs::read(out.join("energy-piece0-rect.json")).unwrap(),
            fs::read(out.join("energy-piece0-rect.csv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "JSON byte-identical");
    assert_eq!(outputs[0].1, outputs[1].1, "CSV byte-identical");
    let json = String::from_utf8_lossy(&outputs[0].0);
    assert!(
        json.contains("\"f1_exact_zero\": true"),
        "skeleton of a single square has no interior part"
    );
    println!(
        "criterion 11 PASS: {} bytes of report identical for 1 and 8 threads",
        outputs[0].0.len()
    );
}

#[test]
fn energy_depth_sweep_is_monotone() {
    let dir = temp_dir("sweep");
    let spec = write_unit_square_spec(&dir);
    let out = dir.join("en");
    let status = bin()
        .args([
            "energy",
            "--domain",
            spec.to_str().unwrap(),
            "--depth-list",
            "4,5,6,7",
            "--alpha",
            "1",
            "--threads",
            "4",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("energy-piece0-rect.csv")).unwrap();
    let mut totals = Vec::new();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        totals.push(cols[9].parse::<f64>().unwrap());
    }
    assert_eq!(totals.len(), 4);
    for w in totals.windows(2) {
        assert!(w[1] > w[0], "monotone F2 column: {totals:?}");
    }
}

#[test]
fn trapezoid_domain_has_finite_certified_energy() {
    let dir = temp_dir("trap");
    let spec = dir.join("trapezoid.json");
    fs::write(
        &spec,
        r#"{
            "alpha": 1,
            "rectangles": [{"x0": -1, "y0": 0, "x1": 0, "y1": 1}],
            "triangles": [{"a": 0, "b": 1, "h": {"linear": {"c0": 1, "c1": -1}}}]
        }"#,
    )
    .unwrap();
    let out = dir.join("en");
    let status = bin()
        .args([
            "energy",
            "--domain",
            spec.to_str().unwrap(),
            "--depth",
            "4",
            "--tri-steps",
            "3",
            "--alpha",
            "1",
            "--certify-tail",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success(), "compatible trapezoid certifies");
    for piece in ["piece0-rect", "piece1-tri"] {
        let json = fs::read_to_string(out.join(format!("energy-{piece}.json"))).unwrap();
        assert!(!json.contains("\"tail_bound\": null"), "{piece} certified");
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        let total: f64 = parsed["reports"][0]["f2_total"]
            .as_str()
            .unwrap()
            .parse()
            .unwrap();
        assert!(total.is_finite() && total > 0.0);
    }
}

#[test]
fn accordion_writes_axis_values() {
    let dir = temp_dir("acc");
    let out = dir.join("a");
    let status = bin()
        .args([
            "accordion",
            "--frames",
            "5",
            "--sequence",
            "harmonic",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("axis-values.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6, "header plus one row per frame");
    // First even axis value is 3/2.
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let even: f64 = row[2].parse().unwrap();
    assert!((even - 1.5).abs() < 1e-12);
    assert!(out.join("accordion.txt").exists());
    assert!(out.join("accordion.svg").exists());
}

#[test]
fn exit_code_contract() {
    let dir = temp_dir("exit");
    let spec = write_unit_square_spec(&dir);
    // 0: success.
    let ok = bin()
        .args([
            "cover",
            "--domain",
            spec.to_str().unwrap(),
            "--out",
            dir.join("cov").to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(ok.code(), Some(0));
    // 2: input error (malformed spec).
    let bad = dir.join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let status = bin()
        .args([
            "cover",
            "--domain",
            bad.to_str().unwrap(),
            "--out",
            dir.join("cov2").to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // 3: mathematical precondition (non-compatible triangle with a
    // certificate request), message names the exponent threshold.
    let steep = dir.join("steep.json");
    fs::write(
        &steep,
        r#"{"triangles": [{"a": 0, "b": 1, "h": {"linear": {"c0": 4, "c1": -4}}}]}"#,
    )
    .unwrap();
    let out = bin()
        .args([
            "energy",
            "--domain",
            steep.to_str().unwrap(),
            "--alpha",
            "0.5",
            "--certify-tail",
            "--out",
            dir.join("en").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("needs alpha >"), "threshold named in: {msg}");
}

#[test]
fn cover_prints_the_expected_counts() {
    let dir = temp_dir("counts");
    let rect = dir.join("rect.json");
    fs::write(
        &rect,
        r#"{"rectangles": [{"x0": 0, "y0": 0, "x1": 3, "y1": 2}]}"#,
    )
    .unwrap();
    let out = bin()
        .args([
            "cover",
            "--domain",
            rect.to_str().unwrap(),
            "--out",
            dir.join("c1").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("3 squares"), "{text}");
    assert!(text.contains("sum of sides 4.0"), "{text}");

    let tri = dir.join("tri.json");
    fs::write(
        &tri,
        r#"{"triangles": [{"a": 0, "b": 1, "h": {"linear": {"c0": 1, "c1": -1}}}]}"#,
    )
    .unwrap();
    let out = bin()
        .args([
            "cover",
            "--domain",
            tri.to_str().unwrap(),
            "--tri-steps",
            "2",
            "--out",
            dir.join("c2").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("7 squares"), "{text}");
}

#[test]
fn plot_emits_svg_with_the_fixed_legend() {
    let dir = temp_dir("plot");
    let spec = write_unit_square_spec(&dir);
    let out = dir.join("figs");
    let status = bin()
        .args([
            "plot",
            "--domain",
            spec.to_str().unwrap(),
            "--depth",
            "3",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let svg = fs::read_to_string(out.join("cells-piece0-rect.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    for (label, color) in [("+A1", "#1f77b4"), ("-A4", "#c5b0d5")] {
        assert!(svg.contains(color), "legend color for {label}");
    }
    assert!(svg.contains("</svg>"));
}
