use std::path::Path;
use std::process::{Command, Output};

use powerslic::bench::CSV_HEADER;
use powerslic::io::{self, quantize_8bit};
use powerslic::synthetic::{random_regions, two_region};
use powerslic::{LabelMap, RgbImage};

fn powerslic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_powerslic"))
        .args(args)
        .env("POWERSLIC_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn bytes(img: &RgbImage) -> Vec<u8> {
    img.pixels().iter().flat_map(|p| p.map(quantize_8bit)).collect()
}

#[test]
fn segment_writes_labels_and_diagram() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.png");
    io::write_rgb(&input, &random_regions(40, 30, 4, 1).image).unwrap();
    let (labels, diagram) = (dir.path().join("labels.png"), dir.path().join("d.json"));
    let out = powerslic(&[
        "segment",
        path(&input),
        "--method",
        "optimal",
        "--k",
        "12",
        "--out",
        path(&labels),
        "--diagram",
        path(&diagram),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("k_out=12 runtime_ms="));
    let lm = io::read_labels(&labels).unwrap();
    assert_eq!((lm.width(), lm.height()), (40, 30));
    assert_eq!(io::read_diagram(&diagram).unwrap().len(), 12);

    // Same config, same bytes.
    let again = dir.path().join("again.png");
    let again_diagram = dir.path().join("again.json");
    let out = powerslic(&[
        "segment",
        path(&input),
        "--method",
        "optimal",
        "--k",
        "12",
        "--out",
        path(&again),
        "--diagram",
        path(&again_diagram),
    ]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&labels).unwrap(), std::fs::read(&again).unwrap());
    assert_eq!(std::fs::read(&diagram).unwrap(), std::fs::read(&again_diagram).unwrap());
}

#[test]
fn slic_with_one_superpixel() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.png");
    io::write_rgb(&input, &two_region(20, 10).image).unwrap();
    let labels = dir.path().join("l.png");
    let out = powerslic(&["segment", path(&input), "--method", "slic", "--k", "1", "--out", path(&labels)]);
    assert!(out.status.success());
    assert_eq!(io::read_labels(&labels).unwrap().num_labels_used(), 1);
}

#[test]
fn noise_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.png");
    let clean = random_regions(100, 100, 6, 2).image;
    io::write_rgb(&input, &clean).unwrap();
    let run = |sigma2: &str, seed: &str, name: &str| {
        let out = dir.path().join(name);
        let status = powerslic(&["noise", path(&input), "--sigma2", sigma2, "--seed", seed, "--out", path(&out)]);
        assert!(status.status.success());
        out
    };

    let zero = run("0", "4", "zero.png");
    assert_eq!(bytes(&io::read_rgb(&zero).unwrap()), bytes(&io::read_rgb(&input).unwrap()));

    let (a, b) = (run("0.05", "9", "a.png"), run("0.05", "9", "b.png"));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = run("0.05", "10", "c.png");
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());

    let heavy = io::read_rgb(run("0.3", "1", "heavy.png")).unwrap();
    let before = io::read_rgb(&input).unwrap();
    let changed = heavy
        .pixels()
        .iter()
        .zip(before.pixels())
        .filter(|(x, y)| x.map(quantize_8bit) != y.map(quantize_8bit))
        .count();
    assert!(changed as f64 > 0.99 * 10_000.0, "{changed} of 10000 changed");
}

#[test]
fn eval_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let s = two_region(30, 20);
    io::write_rgb(dir.path().join("img.png"), &s.image).unwrap();
    let marks = s.ground_truth().bits().iter().map(|&b| i32::from(b)).collect();
    io::write_labels(dir.path().join("img.gt1.png"), &LabelMap::from_labels(30, 20, marks).unwrap()).unwrap();
    let csv = dir.path().join("out.csv");
    let out = powerslic(&["eval", path(dir.path()), "--method", "slic,power", "--k", "10", "--csv", path(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], CSV_HEADER);
    assert!(lines[1].starts_with("img,slic,10,"));
    assert!(lines[2].starts_with("img,power,10,10,0,0,1,"));
}

#[test]
fn upscale_from_stored_diagram() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.png");
    io::write_rgb(&input, &random_regions(24, 16, 3, 5).image).unwrap();
    let (labels, diagram) = (dir.path().join("l.png"), dir.path().join("d.json"));
    let seg = powerslic(&["segment", path(&input), "--k", "6", "--out", path(&labels), "--diagram", path(&diagram)]);
    assert!(seg.status.success());

    let base = dir.path().join("x1.png");
    assert!(powerslic(&["upscale", path(&diagram), "--factor", "1", "--out", path(&base)]).status.success());
    let stored = io::read_diagram(&diagram).unwrap();
    assert_eq!(io::read_labels(&base).unwrap(), stored.rasterize(24, 16));

    let big = dir.path().join("x2.png");
    assert!(powerslic(&["upscale", path(&diagram), "--factor", "2", "--out", path(&big)]).status.success());
    let big = io::read_labels(&big).unwrap();
    assert_eq!((big.width(), big.height()), (48, 32));
    let base = io::read_labels(&base).unwrap();
    assert!((0..16).all(|y| (0..24).all(|x| big.label(2 * x, 2 * y) == base.label(x, y))));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(powerslic(&["--help"]).status.code(), Some(0));
    assert_eq!(powerslic(&["segment"]).status.code(), Some(1));
    assert_eq!(powerslic(&["segment", "x.png", "--method", "kmeans", "--out", "y.png"]).status.code(), Some(1));

    let missing = dir.path().join("missing.png");
    let out = powerslic(&["segment", path(&missing), "--out", path(&dir.path().join("o.png"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("missing.png"));

    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let out = powerslic(&["eval", path(&empty), "--csv", path(&dir.path().join("o.csv"))]);
    assert_eq!(out.status.code(), Some(2));

    let input = dir.path().join("tiny.png");
    io::write_rgb(&input, &two_region(4, 4).image).unwrap();
    let out = powerslic(&["segment", path(&input), "--k", "17", "--out", path(&dir.path().join("o.png"))]);
    assert_eq!(out.status.code(), Some(1));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"cells\": 3}").unwrap();
    let out = powerslic(&["upscale", path(&bad), "--factor", "2", "--out", path(&dir.path().join("o.png"))]);
    assert_eq!(out.status.code(), Some(2));
}
