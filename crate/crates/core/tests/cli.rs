use std::path::Path;
use std::process::Command;

use group_odds::cli::{self, Context};
use group_odds::model_file::ModelFile;
use serde_json::Value;

fn run_ctx(ctx: Context, args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run_with(
        std::iter::once("gor").chain(args.iter().copied()),
        ctx,
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn run(args: &[&str]) -> (i32, String, String) {
    run_ctx(Context::default(), args)
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn events_formats() {
    let (code, out, _) = run(&["events", "--n-vars", "2", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "event,number,binary,bits\nE_0,0,00,\"{0,0}\"\nE_1,1,01,\"{0,1}\"\nE_2,2,10,\"{1,0}\"\nE_3,3,11,\"{1,1}\"\n"
    );
    let (code, out, _) = run(&["events", "--n-vars", "2", "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["n_vars"], 2);
    assert_eq!(v["events"][2]["bits"], serde_json::json!([1, 0]));
    assert_eq!(v["events"][2]["name"], "E_2");
}

#[test]
fn events_capacity() {
    let (code, _, err) = run(&["events", "--n-vars", "64"]);
    assert_eq!(code, 2);
    assert!(err.contains("at most 63"), "{err}");

    let (code, _, err) = run(&["events", "--n-vars", "21"]);
    assert_eq!(code, 2);
    assert!(err.contains("cap of 20"), "{err}");

    let small = Context { max_n: 3 };
    let (code, _, _) = run_ctx(small, &["events", "--n-vars", "4"]);
    assert_eq!(code, 2);
    let (code, out, _) = run_ctx(
        small,
        &["events", "--n-vars", "4", "--stream", "--format", "csv"],
    );
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 17);
    let (code, out, _) = run_ctx(
        small,
        &[
            "ratios",
            "--coeffs=0,1,1,1,1",
            "--stream",
            "--format",
            "csv",
        ],
    );
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 16);

    let (code, _, _) = run(&["events", "--n-vars", "0"]);
    assert_eq!(code, 2);
}

#[test]
fn ratios_subset_and_pair() {
    let coeffs = "--coeffs=0.1,0.5,-0.25,1";
    let (code, out, _) = run(&["ratios", coeffs, "--subset", "2,3", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&fields[..4], ["group", "0", "3", "S_3"]);
    let value: f64 = fields.last().unwrap().parse().unwrap();
    assert!((value - 0.75f64.exp()).abs() < 1e-15);

    // E_2 -> E_3 switches x3 with x2 held at 1
    let (code, out, _) = run(&[
        "ratios",
        coeffs,
        "--reference",
        "2",
        "--target",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let rec = &v["records"][0];
    assert_eq!(rec["kind"], "basic");
    assert_eq!(rec["subset"]["members"], serde_json::json!([3]));
    assert_eq!(rec["value"].as_f64().unwrap(), 1f64.exp());

    let (code, _, err) = run(&["ratios", coeffs, "--reference", "3", "--target", "4"]);
    assert_eq!(code, 2);
    assert!(err.contains("x2, x3"), "{err}");

    let (code, _, _) = run(&["ratios", coeffs, "--reference", "3"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["ratios", coeffs, "--subset", "4"]);
    assert_eq!(code, 2);
}

#[test]
fn ratios_json_has_summary_and_inverse() {
    let (code, out, _) = run(&[
        "ratios",
        "--coeffs=0,0.6931471805599453,1.0986122886681098",
        "--include-inverse",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 4);
    assert_eq!(records[3]["kind"], "inverse");
    assert_eq!(records[3]["exponent_symbolic"], "-(b1+b2)");
    assert_eq!(v["summary"]["count"], 3);
    assert_eq!(v["summary"]["above_one"], 3);
}

#[test]
fn ratios_output_is_deterministic() {
    let args = [
        "ratios",
        "--coeffs=-1,0.3,0.2,-0.7,0.05",
        "--include-inverse",
    ];
    let first = run(&args);
    assert_eq!(first.0, 0);
    for _ in 0..3 {
        assert_eq!(run(&args), first);
    }
}

#[test]
fn fit_writes_model_usable_by_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "g.csv", "a,b,outcome,n\n0,0,1,5\n0,0,0,15\n1,0,1,10\n1,0,0,10\n0,1,1,12\n0,1,0,8\n1,1,1,9\n1,1,0,3\n");
    let model = dir.path().join("m.json");
    let (code, out, err) = run(&[
        "fit",
        "--data",
        &data,
        "--response",
        "outcome",
        "--weights",
        "n",
        "--out",
        model.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("a  "), "{out}");
    let m = ModelFile::load(&model).unwrap();
    assert_eq!(m.var_names, ["a", "b"]);
    assert!(m.fit.as_ref().unwrap().converged);

    let (code, out, _) = run(&[
        "ratios",
        "--model",
        model.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("{a,b}"), "{out}");

    let (code, out, _) = run(&["verify", "--model", model.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("all laws hold"));
}

#[test]
fn fit_null_data_gives_unit_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "n.csv", "x1,y\n0,0\n0,1\n1,0\n1,1\n");
    let (code, out, _) = run(&["fit", "--data", &data]);
    assert_eq!(code, 0);
    assert!(out.contains("exp(b1) = 1.000000"), "{out}");
}

#[test]
fn fit_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let sep = write(
        dir.path(),
        "s.csv",
        "x1,x2,y\n0,0,0\n0,1,0\n1,0,1\n1,1,1\n0,1,1\n",
    );
    let (code, out, _) = run(&["fit", "--data", &sep, "--error-json"]);
    assert_eq!(code, 3);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["kind"], "separation");
    assert!(v["error"]["message"].as_str().unwrap().contains("x1"));

    let col = write(dir.path(), "c.csv", "x1,x2,y\n0,0,0\n1,1,1\n0,0,1\n1,1,0\n");
    let (code, _, err) = run(&["fit", "--data", &col]);
    assert_eq!(code, 3);
    assert!(err.contains("x2"), "{err}");

    let flat = write(dir.path(), "d.csv", "x1,y\n0,1\n1,1\n");
    let (code, _, _) = run(&["fit", "--data", &flat]);
    assert_eq!(code, 2);
}

#[test]
fn fit_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run(&[
        "fit",
        "--data",
        dir.path().join("missing.csv").to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    let bad_w = write(dir.path(), "w.csv", "x1,y,w\n0,1,1\n1,0,-2\n");
    let (code, _, err) = run(&["fit", "--data", &bad_w, "--weights", "w"]);
    assert_eq!(code, 2);
    assert!(err.contains("row 2"), "{err}");
    let no_y = write(dir.path(), "r.csv", "x1,z\n0,1\n");
    let (code, _, _) = run(&["fit", "--data", &no_y]);
    assert_eq!(code, 2);
}

#[test]
fn verify_detects_injected_fault() {
    let (code, out, _) = run(&["verify", "--coeffs=0.2,1,-0.5,0.3", "--seeds", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("all laws hold"));
    let (code, out, _) = run(&["verify", "--coeffs=0.2,1,-0.5,0.3", "--inject-fault", "5"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"), "{out}");
    let (code, out, _) = run(&[
        "verify",
        "--coeffs=0.2,1,-0.5,0.3",
        "--inject-fault",
        "5",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 1);
    assert!(out.starts_with("law,passed,checks"));
    assert!(out.contains("oracle-equivalence,false,"), "{out}");
    let (code, _, _) = run(&["verify", "--coeffs=0,1,1,1,1,1,1,1,1,1,1,1,1,1"]);
    assert_eq!(code, 2);
}

#[test]
fn generate_then_fit_through_binary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("syn.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_gor"))
        .args([
            "generate",
            "--coeffs",
            "-0.3,0.5,-0.8,1.2",
            "--rows",
            "500",
            "--seed",
            "7",
            "--out",
        ])
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());
    let again = dir.path().join("syn2.csv");
    Command::new(env!("CARGO_BIN_EXE_gor"))
        .args([
            "generate",
            "--coeffs",
            "-0.3,0.5,-0.8,1.2",
            "--rows",
            "500",
            "--seed",
            "7",
            "--out",
        ])
        .arg(&again)
        .status()
        .unwrap();
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(&again).unwrap());
    let out = Command::new(env!("CARGO_BIN_EXE_gor"))
        .args(["fit", "--data"])
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn env_cap_is_read_by_binary() {
    let out = Command::new(env!("CARGO_BIN_EXE_gor"))
        .args(["events", "--n-vars", "4"])
        .env("GOR_MAX_N", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_gor"))
        .args(["events", "--n-vars", "4"])
        .env("GOR_MAX_N", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
