//! End-to-end checks of the `tsvd` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tsvd_core::cli::tensor_file;
use tsvd_core::Tensor;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsvd")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &Path, dims: &str, rank: &str) -> PathBuf {
    let out = path(dir, "in.tsr");
    assert_eq!(code(&["gen", "--dims", dims, "--rank", rank, "--seed", "1", "--out", s(&out), "--metrics", s(&path(dir, "g.json"))]), 0);
    out
}

#[test]
fn metrics_go_to_stdout_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "6x5x4", "2");
    let out = run(&["info", "--in", s(&input)]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"], "info");
    assert_eq!(v["input_dims"], serde_json::json!([6, 5, 4]));
    assert_eq!(v["results"]["tubal_rank"], 2);
    assert_eq!(v["results"]["multi_rank"].as_array().unwrap().len(), 4);
}

#[test]
fn order_four_generation_and_info() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "5,4,3,2", "1");
    let t = tensor_file::read(&input).unwrap();
    assert_eq!(t.dims(), &[5, 4, 3, 2]);
    let out = run(&["info", "--in", s(&input)]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["tubal_rank"], 1);
    // compression is order-3 only
    assert_eq!(code(&["compress", "--in", s(&input), "--method", "tsvd", "--k", "1"]), 2);
}

#[test]
fn rank_zero_gives_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "3x3x3", "0");
    assert!(tensor_file::read(&input).unwrap().data().iter().all(|&v| v == 0.0));
}

#[test]
fn compress_sweep_and_target_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "10x8x6", "2");
    let m = path(dir.path(), "m.json");
    let c = path(dir.path(), "c.tsc");
    assert_eq!(code(&["compress", "--in", s(&input), "--method", "tsvd", "--k", "1,5,20", "--compressed", s(&c), "--metrics", s(&m)]), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    let records = v["results"]["records"].as_array().unwrap();
    assert_eq!(records.len(), 3);
    assert_eq!(records[2]["stored_scalars"], 20 * (10 + 8 + 1));
    let form = tsvd_core::CompressedForm::from_bytes(&std::fs::read(&c).unwrap()).unwrap();
    assert_eq!(form.k(), 20);

    assert_eq!(code(&["compress", "--in", s(&input), "--method", "tsvd-tubal", "--target-ratio", "2", "--metrics", s(&m)]), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(v["parameters"]["k"], serde_json::json!([2]));
    assert!(v["results"]["records"][0]["ratio"].as_f64().unwrap() >= 2.0);

    // infeasible target and out-of-range k
    assert_eq!(code(&["compress", "--in", s(&input), "--method", "svd", "--target-ratio", "1000"]), 4);
    assert_eq!(code(&["compress", "--in", s(&input), "--method", "tsvd-tubal", "--k", "9"]), 4);
}

#[test]
fn exact_reconstruction_reports_neg_inf_sentinel() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(dir.path(), "e.tsr");
    let mut data = vec![0.0; 8];
    data[0] = 1.0;
    tensor_file::write(&input, &Tensor::new(vec![2, 2, 2], data).unwrap()).unwrap();
    let out = run(&["compress", "--in", s(&input), "--method", "tsvd-tubal", "--k", "2"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["records"][0]["rse_db"], "-inf");
}

#[test]
fn completion_with_coordinate_mask_and_saved_mask() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "3x3x2", "1");
    let coords = path(dir.path(), "mask.txt");
    std::fs::write(&coords, "# observed entries\n1 1 1\n2 2 1\n3 3 2\n1 2 2\n").unwrap();
    let saved = path(dir.path(), "mask.tsr");
    let out = path(dir.path(), "x.tsr");
    let m = path(dir.path(), "m.json");
    assert_eq!(
        code(&["complete", "--in", s(&input), "--mask-coords", s(&coords), "--save-mask", s(&saved), "--max-iter", "20", "--out", s(&out), "--metrics", s(&m)]),
        0
    );
    let mask = tensor_file::read(&saved).unwrap();
    assert_eq!(mask.data().iter().sum::<f64>(), 4.0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(v["results"]["observed"], 4);
    assert!(v["results"]["rse_db"].is_null());

    // the saved mask reproduces the run
    let out2 = path(dir.path(), "x2.tsr");
    assert_eq!(code(&["complete", "--in", s(&input), "--mask", s(&saved), "--max-iter", "20", "--out", s(&out2), "--metrics", s(&m)]), 0);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&out2).unwrap());
}

#[test]
fn input_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = path(dir.path(), "none.tsr");
    assert_eq!(code(&["info", "--in", s(&missing)]), 2);
    let junk = path(dir.path(), "junk.tsr");
    std::fs::write(&junk, b"not a tensor").unwrap();
    assert_eq!(code(&["info", "--in", s(&junk)]), 2);
    assert_eq!(code(&["gen", "--dims", "3x3", "--rank", "1", "--out", s(&junk)]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    let input = gen(dir.path(), "3x3x2", "1");
    assert_eq!(code(&["complete", "--in", s(&input), "--out", s(&junk)]), 2);
    assert_eq!(code(&["complete", "--in", s(&input), "--sample-rate", "0.5", "--rho", "-1", "--out", s(&junk)]), 2);
    assert_eq!(code(&["gen", "--dims", "3x3x2", "--rank", "4", "--out", s(&junk)]), 4);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn pgm_directory_import() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    std::fs::create_dir(&frames).unwrap();
    std::fs::write(frames.join("b.pgm"), "P2\n# second\n3 2\n4\n4 4 4\n4 4 4\n").unwrap();
    std::fs::write(frames.join("a.pgm"), "P2\n3 2\n4\n0 1 2\n3 4 0\n").unwrap();
    std::fs::write(frames.join("notes.txt"), "ignored").unwrap();
    let out = path(dir.path(), "v.tsr");
    assert_eq!(code(&["import-pgm", "--dir", s(&frames), "--out", s(&out), "--metrics", s(&path(dir.path(), "m.json"))]), 0);
    let t = tensor_file::read(&out).unwrap();
    assert_eq!(t.dims(), &[2, 3, 2]);
    // row 1 of frame a is [0 1 2], stored column-major
    assert_eq!(t.get(&[0, 2, 0]), 0.5);
    assert_eq!(t.get(&[1, 0, 0]), 0.75);
    assert!(t.frontal_slice(1).iter().all(|&v| v == 1.0));

    std::fs::write(frames.join("c.pgm"), "P2\n2 2\n4\n0 0\n0 0\n").unwrap();
    assert_eq!(code(&["import-pgm", "--dir", s(&frames), "--out", s(&out)]), 2);
}

fn metrics(dir: &Path, args: &[&str]) -> Value {
    let m = path(dir, "metrics.json");
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--metrics", s(&m)]);
    let out = run(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap()
}

#[test]
fn generated_tensors_have_the_requested_tubal_rank() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "12x9x5", "3");
    let v = metrics(dir.path(), &["info", "--in", s(&input), "--tol", "1e-8"]);
    assert_eq!(v["results"]["tubal_rank"], 3);
}

#[test]
fn info_on_zero_and_identity() {
    let dir = tempfile::tempdir().unwrap();
    let z = path(dir.path(), "z.tsr");
    tensor_file::write(&z, &Tensor::zeros(vec![3, 4, 2]).unwrap()).unwrap();
    let v = metrics(dir.path(), &["info", "--in", s(&z)]);
    assert_eq!(v["results"]["tnn"], 0.0);
    assert_eq!(v["results"]["tubal_rank"], 0);

    let id = path(dir.path(), "id.tsr");
    tensor_file::write(&id, &tsvd_core::identity(4, 3).unwrap()).unwrap();
    let v = metrics(dir.path(), &["info", "--in", s(&id)]);
    assert_eq!(v["results"]["tubal_rank"], 4);
    assert_eq!(v["results"]["multi_rank"], serde_json::json!([4, 4, 4]));
}

#[test]
fn full_tubal_rank_compression_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "7x5x4", "5");
    let v = metrics(dir.path(), &["compress", "--in", s(&input), "--method", "tsvd-tubal", "--k", "5"]);
    assert_eq!(v["results"]["records"][0]["rse_db"], "-inf");
}

#[test]
fn target_ratio_matches_the_formula_scan() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "30x30x10", "2");
    for method in ["svd", "tsvd", "tsvd-tubal"] {
        let v = metrics(dir.path(), &["compress", "--in", s(&input), "--method", method, "--target-ratio", "5"]);
        let k = tsvd_core::compression::k_for_ratio(method.parse().unwrap(), &[30, 30, 10], 5.0).unwrap();
        assert_eq!(v["parameters"]["k"], serde_json::json!([k]));
        assert!(v["results"]["records"][0]["ratio"].as_f64().unwrap() >= 5.0);
    }
}

#[test]
fn sweep_rse_is_nonincreasing() {
    let dir = tempfile::tempdir().unwrap();
    // full tubal rank, so no k in the sweep reaches the roundoff floor
    let input = gen(dir.path(), "8x6x5", "6");
    for method in ["svd", "tsvd", "tsvd-tubal"] {
        let v = metrics(dir.path(), &["compress", "--in", s(&input), "--method", method, "--k", "1,2,3,4,5"]);
        let rse: Vec<f64> = v["results"]["records"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["rse_db"].as_f64().unwrap_or(f64::NEG_INFINITY))
            .collect();
        assert!(rse.windows(2).all(|w| w[1] <= w[0]), "{method}: {rse:?}");
    }
}

#[test]
fn sampling_rate_extremes() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "6x5x4", "2");
    let out = path(dir.path(), "x.tsr");
    let v = metrics(dir.path(), &["complete", "--in", s(&input), "--sample-rate", "1.0", "--out", s(&out)]);
    assert_eq!(v["results"]["iterations"], 1);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&input).unwrap());

    let v = metrics(dir.path(), &["complete", "--in", s(&input), "--sample-rate", "0.0", "--truth", s(&input), "--out", s(&out)]);
    assert!(tensor_file::read(&out).unwrap().data().iter().all(|&x| x == 0.0));
    assert_eq!(v["results"]["rse_db"], 0.0);
}

#[test]
fn positivity_keeps_nonnegative_truth_nonnegative() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen(dir.path(), "8x8x4", "2");
    let t = tensor_file::read(&input).unwrap();
    let nonneg = path(dir.path(), "p.tsr");
    tensor_file::write(&nonneg, &t.map(f64::abs)).unwrap();
    let out = path(dir.path(), "x.tsr");
    metrics(dir.path(), &["complete", "--in", s(&nonneg), "--sample-rate", "0.5", "--positivity", "--max-iter", "100", "--out", s(&out)]);
    assert!(tensor_file::read(&out).unwrap().data().iter().all(|&x| x >= 0.0));
}

#[test]
fn pgm_spec_examples() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("ones");
    std::fs::create_dir(&frames).unwrap();
    for i in 0..3 {
        std::fs::write(frames.join(format!("f{i}.pgm")), "P2 2 2 255\n255 255\n255 255\n").unwrap();
    }
    let out = path(dir.path(), "v.tsr");
    metrics(dir.path(), &["import-pgm", "--dir", s(&frames), "--out", s(&out)]);
    let t = tensor_file::read(&out).unwrap();
    assert_eq!(t.dims(), &[2, 2, 3]);
    assert!(t.data().iter().all(|&v| v == 1.0));

    let single = dir.path().join("single");
    std::fs::create_dir(&single).unwrap();
    std::fs::write(single.join("only.pgm"), "P2\n3 2\n10\n1 2 3\n4 5 6\n").unwrap();
    metrics(dir.path(), &["import-pgm", "--dir", s(&single), "--out", s(&out)]);
    let v = metrics(dir.path(), &["info", "--in", s(&out)]);
    assert_eq!(v["input_dims"], serde_json::json!([2, 3, 1]));
    assert_eq!(v["results"]["tubal_rank"], 2);

    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    assert_eq!(code(&["import-pgm", "--dir", s(&empty), "--out", s(&out)]), 2);
}
