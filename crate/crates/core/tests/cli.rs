use std::path::Path;
use std::process::{Command, Output};

use ortholoc::gridmap::{load_map, write_map};
use ortholoc::localization::{read_manifest, LocalizationConfig, Trajectory};
use ortholoc::matching::ScoreField;
use ortholoc::synthdata::{gen_global, SceneSpec};

fn ortholoc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ortholoc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn match_finds_planted_crop() {
    let dir = tempfile::tempdir().unwrap();
    let global = gen_global(&SceneSpec {
        width: 128,
        height: 96,
        ..SceneSpec::with_seed(3)
    })
    .unwrap()
    .to_grayscale();
    write_map(&global, dir.path().join("g.pgm")).unwrap();
    write_map(&global.crop_window(70, 31, 24, 24).unwrap(), dir.path().join("t.pgm")).unwrap();

    let out = ortholoc(dir.path(), &["--out", "res/ncc", "match", "--global", "g.pgm", "--template", "t.pgm", "--method", "NCC"]);
    ok(&out);
    let j = json(&dir.path().join("res/ncc.json"));
    assert_eq!((j["best_u"].as_u64(), j["best_v"].as_u64()), (Some(70), Some(31)));
    assert!((j["best_score"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(j["wall_time"].as_f64().unwrap() >= 0.0);
    let text = std::fs::read_to_string(dir.path().join("res/ncc.json")).unwrap();
    let pos: Vec<usize> = ["best_u", "best_v", "best_score", "wall_time"].iter().map(|k| text.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{text}");

    let field = ScoreField::from_raw_bytes(&std::fs::read(dir.path().join("res/ncc.scores.bin")).unwrap()).unwrap();
    assert_eq!((field.placements_w(), field.placements_h()), (105, 73));
    let heat = load_map(dir.path().join("res/ncc.heatmap.pgm"), 0.1).unwrap();
    assert_eq!((heat.width(), heat.height()), (105, 73));
    assert_eq!(heat.get(70, 31), 255);
}

#[test]
fn wncc_defaults_to_corrected_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let global = gen_global(&SceneSpec { width: 96, height: 96, ..SceneSpec::with_seed(8) }).unwrap().to_grayscale();
    write_map(&global, dir.path().join("g.pgm")).unwrap();
    write_map(&global.crop_window(20, 40, 16, 16).unwrap(), dir.path().join("t.pgm")).unwrap();

    let run = |extra: &[&str], out: &str| {
        let mut args = vec!["--out", out, "match", "--global", "g.pgm", "--template", "t.pgm"];
        args.extend_from_slice(extra);
        ok(&ortholoc(dir.path(), &args));
        std::fs::read(dir.path().join(format!("{out}.scores.bin"))).unwrap()
    };
    let default = run(&[], "a");
    assert_eq!(default, run(&["--kernel", "corrected"], "b"));
    assert_ne!(default, run(&["--kernel", "uniform"], "c"));
}

#[test]
fn synth_then_localize() {
    let dir = tempfile::tempdir().unwrap();
    ok(&ortholoc(dir.path(), &["--seed", "5", "--out", "ds", "synth", "--frames", "6", "--noise-free"]));
    let ds = dir.path().join("ds");
    for f in ["global.pgm", "manifest.csv", "truth.csv", "synth.json", "localize.json", "frames/local_0005.pgm", "frames/local_0005.mask.pgm"] {
        assert!(ds.join(f).exists(), "missing {f}");
    }
    assert_eq!(read_manifest(ds.join("manifest.csv")).unwrap().len(), 6);
    let config = LocalizationConfig::load(ds.join("localize.json")).unwrap();
    assert_eq!(config.particles, 1000);

    let args = ["--workers", "2", "--out", "run/a", "localize", "--global", "ds/global.pgm", "--manifest", "ds/manifest.csv", "--config", "ds/localize.json", "--truth", "ds/truth.csv"];
    ok(&ortholoc(dir.path(), &args));
    let traj = Trajectory::read_csv(dir.path().join("run/a.trajectory.csv")).unwrap();
    assert_eq!(traj.len(), 6);
    let rmse = json(&dir.path().join("run/a.rmse.json"));
    assert_eq!(rmse["method"], "WNCC");
    assert_eq!(rmse["per_frame_errors"].as_array().unwrap().len(), 6);
    let spread = std::fs::read_to_string(dir.path().join("run/a.spread.csv")).unwrap();
    assert_eq!(spread.lines().count(), 7);
    assert!(spread.starts_with("frame,spread\n"));

    // same seed, one worker: identical trajectory
    let mut single = args;
    single[1] = "1";
    single[3] = "run/b";
    ok(&ortholoc(dir.path(), &single));
    assert_eq!(
        std::fs::read(dir.path().join("run/a.trajectory.csv")).unwrap(),
        std::fs::read(dir.path().join("run/b.trajectory.csv")).unwrap()
    );

    // missing truth: trajectory written, no report
    let out = ortholoc(dir.path(), &["--out", "run/c", "localize", "--global", "ds/global.pgm", "--manifest", "ds/manifest.csv", "--config", "ds/localize.json", "--truth", "nope.csv"]);
    ok(&out);
    assert!(dir.path().join("run/c.trajectory.csv").exists());
    assert!(!dir.path().join("run/c.rmse.json").exists());
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        ok(&ortholoc(dir.path(), &["--seed", "9", "--out", out, "synth", "--frames", "3", "--size", "256"]));
    }
    for f in ["global.pgm", "manifest.csv", "truth.csv", "synth.json", "localize.json", "frames/local_0002.pgm", "frames/local_0002.mask.pgm"] {
        assert_eq!(
            std::fs::read(dir.path().join("a").join(f)).unwrap(),
            std::fs::read(dir.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = ortholoc(dir.path(), &["--out", "b.csv", "bench", "--sizes", "40x8,32x4", "--methods", "SAD,WNCC", "--workers-list", "1,2", "--repetitions", "3"]);
    ok(&out);
    let text = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "method,map_w,map_h,template_w,template_h,workers,repetitions,wall_time,placements_per_second"
    );
    assert_eq!(lines.count(), 8);
    assert!(!ortholoc(dir.path(), &["bench", "--repetitions", "2"]).status.success());
}

#[test]
fn eval_writes_per_seed_rows() {
    let dir = tempfile::tempdir().unwrap();
    ok(&ortholoc(dir.path(), &["--out", "ev", "eval", "pathology", "--seeds", "1"]));
    let text = std::fs::read_to_string(dir.path().join("ev/pathology.csv")).unwrap();
    assert!(text.starts_with("seed,method,truth_u,truth_v,best_u,best_v,best_score,error_px\n"));
    assert_eq!(text.lines().count(), 5);
    assert!(!ortholoc(dir.path(), &["eval", "nonsense"]).status.success());
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = ortholoc(dir.path(), &["match", "--global", "missing.pgm", "--template", "t.pgm"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.pgm"));
    std::fs::write(dir.path().join("bad.pgm"), b"P5\n4 4\n255\nxx").unwrap();
    let out = ortholoc(dir.path(), &["match", "--global", "bad.pgm", "--template", "bad.pgm"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed pixmap"));
}
