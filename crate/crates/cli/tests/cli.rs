use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sharpmark::{load_image, BitDepth, ImagePlane, InputImage};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sharpmark"));
    cmd.env_remove("SHARPMARK_THREADS");
    cmd
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin().args(args).current_dir(cwd).output().unwrap()
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .canonicalize()
        .unwrap()
}

fn fixture(rel: &str) -> String {
    fixtures().join(rel).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn uniform_png(dir: &Path) -> String {
    let path = dir.join("flat.png");
    let img = InputImage::gray(ImagePlane::filled(40, 40, 0.5).unwrap()).unwrap();
    img.save_png(&path, BitDepth::Eight).unwrap();
    path.to_string_lossy().into_owned()
}

fn score_of(line: &str) -> f64 {
    line.split('\t').nth(1).unwrap().parse().unwrap()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn score_uniform_image() {
    let dir = tempfile::tempdir().unwrap();
    let flat = uniform_png(dir.path());
    let out = run(&["score", &flat], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), format!("{flat}\t1.00000\thpf\n"));
    let out = run(&["score", "--backend", "uwt", &flat], dir.path());
    assert_eq!(stdout(&out), format!("{flat}\t1.00000\tuwt\n"));
}

#[test]
fn score_orders_sharp_above_blurred() {
    let dir = tempfile::tempdir().unwrap();
    let sharp = fixture("derived/sweep/camera_s000.png");
    let soft = fixture("derived/sweep/camera_s200.png");
    for backend in ["hpf", "uwt"] {
        let out = run(&["score", "--backend", backend, &sharp, &soft], dir.path());
        let text = stdout(&out);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with(&sharp) && lines[1].starts_with(&soft));
        assert!(score_of(lines[0]) > score_of(lines[1]), "{text}");
    }
}

#[test]
fn score_continues_past_unreadable_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let flat = uniform_png(dir.path());
    let out = run(&["score", "missing.png", &flat], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout(&out), format!("{flat}\t1.00000\thpf\n"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.png"));
}

#[test]
fn invalid_flags_fail_before_work() {
    let dir = tempfile::tempdir().unwrap();
    let flat = uniform_png(dir.path());
    for args in [
        vec!["score", "--block", "4", flat.as_str()],
        vec!["score", "--alpha", "0", flat.as_str()],
        vec!["score", "--epsilon", "-1", flat.as_str()],
        vec!["score", "--backend", "dct", flat.as_str()],
        vec!["score", "--gray-mode", "half", flat.as_str()],
        vec!["score"],
        vec!["frobnicate"],
    ] {
        let out = run(&args, dir.path());
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty());
    }
    assert_eq!(run(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn thread_variable_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let flat = uniform_png(dir.path());
    let out = bin()
        .args(["score", &flat])
        .env("SHARPMARK_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    for n in ["0", "1", "3"] {
        let out = bin()
            .args(["score", &flat])
            .env("SHARPMARK_THREADS", n)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
}

fn pgm_pixels(path: &Path) -> Vec<u8> {
    let bytes = fs::read(path).unwrap();
    let header_end = bytes
        .iter()
        .enumerate()
        .filter(|(_, b)| **b == b'\n')
        .nth(2)
        .unwrap()
        .0;
    bytes[header_end + 1..].to_vec()
}

#[test]
fn map_of_uniform_image_is_black() {
    let dir = tempfile::tempdir().unwrap();
    let flat = uniform_png(dir.path());
    let out = run(&["map", &flat, "--out", "maps"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let maps = dir.path().join("maps");
    assert_eq!(listing(&maps), ["flat.lbsmap.pgm", "flat.smap.pgm"]);
    for name in ["flat.lbsmap.pgm", "flat.smap.pgm"] {
        let px = pgm_pixels(&maps.join(name));
        assert_eq!(px.len(), 26 * 26);
        assert!(px.iter().all(|v| *v == 0));
    }
}

#[test]
fn map_highlights_the_sharp_half() {
    let dir = tempfile::tempdir().unwrap();
    let composite = fixture("derived/composite_astronaut.png");
    for backend in ["hpf", "uwt"] {
        let out_dir = dir.path().join(backend);
        let o = out_dir.to_string_lossy().into_owned();
        assert_eq!(
            run(
                &["map", &composite, "--backend", backend, "--out", &o],
                dir.path()
            )
            .status
            .code(),
            Some(0)
        );
        let first = fs::read(out_dir.join("composite_astronaut.smap.pgm")).unwrap();
        let lbs_first = fs::read(out_dir.join("composite_astronaut.lbsmap.pgm")).unwrap();
        run(
            &["map", &composite, "--backend", backend, "--out", &o],
            dir.path(),
        );
        assert_eq!(
            first,
            fs::read(out_dir.join("composite_astronaut.smap.pgm")).unwrap()
        );
        assert_eq!(
            lbs_first,
            fs::read(out_dir.join("composite_astronaut.lbsmap.pgm")).unwrap()
        );

        let map = load_image(out_dir.join("composite_astronaut.smap.pgm")).unwrap();
        let plane = &map.planes()[0];
        let split = 128 - 7;
        let (mut left, mut right) = (0.0, 0.0);
        for r in 0..plane.height() {
            for c in 0..plane.width() {
                if c < split {
                    left += plane.get(r, c);
                } else {
                    right += plane.get(r, c);
                }
            }
        }
        let left = left / (split * plane.height()) as f64;
        let right = right / ((plane.width() - split) * plane.height()) as f64;
        assert!(left > right, "{backend}: {left} vs {right}");
    }
}

#[test]
fn map_reports_unwritable_output() {
    let dir = tempfile::tempdir().unwrap();
    let flat = uniform_png(dir.path());
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let out = run(&["map", &flat, "--out", "file/sub"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let camera = fixture("natural/camera.png");
    let out = run(&["sweep", &camera, "--sigmas", "0,1,1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "sigma,qs_hpf,qs_uwt");
    assert_eq!(lines.len(), 4);
    assert_eq!(
        lines[2].split_once(',').unwrap().1,
        lines[3].split_once(',').unwrap().1
    );

    let hpf = stdout(&run(&["score", &camera], dir.path()));
    let uwt = stdout(&run(&["score", "--backend", "uwt", &camera], dir.path()));
    let row: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(row[1], hpf.split('\t').nth(1).unwrap());
    assert_eq!(row[2], uwt.split('\t').nth(1).unwrap());
}

#[test]
fn sweep_default_ladder_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["sweep", &fixture("natural/grass.png"), "--out", "sw"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(dir.path().join("sw/grass.sweep.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(
        rows.iter().map(|r| r[0]).collect::<Vec<_>>(),
        [0.0, 0.5, 1.0, 2.0, 4.0]
    );
    for col in [1, 2] {
        assert!(rows.windows(2).all(|w| w[1][col] < w[0][col]), "{text}");
    }
}

#[test]
fn sweep_rejects_negative_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "sweep",
            &fixture("natural/camera.png"),
            "--sigmas",
            "1,-0.5",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn eval_self_test_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = fixture("derived/sweep/manifest.csv");
    let out = run(&["eval", &manifest, "--out", "a"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = fs::read_to_string(dir.path().join("a/report.csv")).unwrap();
    assert!(report.starts_with("n,srocc,krocc,plcc,rmse,b1,b2,b3,b4,b5\n7,1.00000,1.00000,"));
    let per_image = fs::read_to_string(dir.path().join("a/per_image.csv")).unwrap();
    assert!(per_image.starts_with("path,objective,subjective,fitted\ncamera_s000.png,"));
    assert_eq!(per_image.lines().count(), 8);

    let again = bin()
        .args(["eval", &manifest, "--out", "b"])
        .current_dir(dir.path())
        .env("SHARPMARK_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(again.status.code(), Some(0));
    for name in ["report.csv", "per_image.csv"] {
        assert_eq!(
            fs::read(dir.path().join("a").join(name)).unwrap(),
            fs::read(dir.path().join("b").join(name)).unwrap()
        );
    }
}

#[test]
fn eval_alpha_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = fixture("derived/sweep/manifest.csv");
    let out = run(
        &["eval", &manifest, "--alphas", "1.5,2,3", "--out", "."],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines[0], "alpha,n,srocc,krocc,plcc,rmse,b1,b2,b3,b4,b5");
    assert_eq!(lines.len(), 4);
    for (line, alpha) in lines[1..].iter().zip(["1.50000", "2.00000", "3.00000"]) {
        assert!(line.starts_with(&format!("{alpha},7,1.00000,")), "{line}");
    }
    assert!(dir.path().join("per_image_alpha_1.5.csv").exists());

    // Tiny alpha collapses every score onto the floor; the sweep still
    // finishes and flags the run as partial.
    let out = run(
        &["eval", &manifest, "--alphas", "0.25,2", "--out", "t"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let report = fs::read_to_string(dir.path().join("t/report.csv")).unwrap();
    assert_eq!(report.lines().count(), 2);
    assert!(report.lines().nth(1).unwrap().starts_with("2.00000,"));
}

fn copy_sweep(dir: &Path) -> PathBuf {
    let sweep = fixtures().join("derived/sweep");
    for entry in fs::read_dir(&sweep).unwrap() {
        let p = entry.unwrap().path();
        fs::copy(&p, dir.join(p.file_name().unwrap())).unwrap();
    }
    dir.join("manifest.csv")
}

#[test]
fn eval_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = copy_sweep(dir.path());
    let mut text = fs::read_to_string(&manifest).unwrap();
    text.push_str("gone.png,-5,camera\n");
    fs::write(&manifest, &text).unwrap();
    let m = manifest.to_string_lossy().into_owned();
    let out = run(&["eval", &m, "--out", "partial"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gone.png"));
    let report = fs::read_to_string(dir.path().join("partial/report.csv")).unwrap();
    assert!(report.lines().nth(1).unwrap().starts_with("7,"));

    for bad in [
        "path,subjective,group\n",
        "image,mos\na.png,1\n",
        "path,subjective,group\na.png,high,g\n",
        "path,subjective,group\na.png,1,\nb.png,2,\n",
    ] {
        fs::write(&manifest, bad).unwrap();
        let out = run(&["eval", &m, "--out", "bad"], dir.path());
        assert_eq!(out.status.code(), Some(3), "{bad:?}");
    }
    let out = run(&["eval", "nowhere.csv", "--out", "bad"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn aggregate_reports() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = fixture("derived/sweep/manifest.csv");
    run(&["eval", &manifest, "--out", "hpf"], dir.path());
    run(
        &["eval", &manifest, "--backend", "uwt", "--out", "uwt"],
        dir.path(),
    );

    let one = run(
        &["aggregate", "hpf/report.csv", "--weights", "1"],
        dir.path(),
    );
    assert_eq!(one.status.code(), Some(0));
    let summary = stdout(&one);
    let report = fs::read_to_string(dir.path().join("hpf/report.csv")).unwrap();
    let stats: Vec<&str> = report
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .skip(1)
        .take(4)
        .collect();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "summary,reports,weight,srocc,krocc,plcc,rmse");
    for (line, label) in lines[1..].iter().zip(["direct", "weighted"]) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[..3], [label, "1", "1"]);
        assert_eq!(fields[3..], stats[..]);
    }

    let two = run(
        &[
            "aggregate",
            "hpf/report.csv",
            "uwt/report.csv",
            "--out",
            "agg",
        ],
        dir.path(),
    );
    assert_eq!(two.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("agg/summary.csv")).unwrap();
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("direct,2,14,1.00000,1.00000,"));

    let mismatch = run(
        &["aggregate", "hpf/report.csv", "--weights", "1,2"],
        dir.path(),
    );
    assert_eq!(mismatch.status.code(), Some(1));
    let zero = run(
        &["aggregate", "hpf/report.csv", "--weights", "0"],
        dir.path(),
    );
    assert_eq!(zero.status.code(), Some(1));
}

#[test]
fn writes_stay_inside_declared_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let flat = uniform_png(dir.path());
    let before = listing(dir.path());
    run(&["score", &flat], dir.path());
    run(&["sweep", &flat, "--sigmas", "0,1"], dir.path());
    assert_eq!(listing(dir.path()), before);
    run(&["map", &flat, "--out", "only_here"], dir.path());
    let mut expected = before.clone();
    expected.push("only_here".into());
    expected.sort();
    assert_eq!(listing(dir.path()), expected);
}
