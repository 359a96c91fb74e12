use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn dasim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dasim")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const ZIC: &str = r#"
master_seed = 5
reps = 3
[market]
improvement_rule = true
days = 2
rounds_per_day = 30
[schedule]
kind = "linear"
n_per_side = 5
[[traders]]
strategy = "zic"
count = 5
"#;

#[test]
fn version_and_exit_codes() {
    let o = dasim(&["version"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&o.stdout).trim(),
        format!("dasim {}", env!("CARGO_PKG_VERSION"))
    );
    assert_eq!(dasim(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(dasim(&["run"]).status.code(), Some(2));

    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.toml", "reps = 2\n[market]\nbogus = 1\n");
    let o = dasim(&["run", "--config", &bad, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("PARSE_ERROR(3"), "{err}");

    let missing = dir.path().join("absent.toml");
    assert_eq!(
        dasim(&["run", "--config", missing.to_str().unwrap()]).status.code(),
        Some(4)
    );
}

#[test]
fn equilibrium_command() {
    let o = dasim(&["equilibrium", "--buyers", "10,9,8,7", "--sellers", "5,6,7,8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "q0=3 p0=7.5 interval=[7, 8]");
}

#[test]
fn transactions_csv_round_trips() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "zic.toml", ZIC);
    let out = dir.path().join("out");
    let o = dasim(&["--quiet", "run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());

    let mut rd = csv::Reader::from_path(out.join("transactions.csv")).unwrap();
    let head: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        head,
        [
            "run",
            "day",
            "round",
            "seq",
            "buyer_id",
            "seller_id",
            "price",
            "buyer_value",
            "seller_value"
        ]
    );
    // compare against the in-process simulation
    let parsed = dasim::parse_config(ZIC).unwrap();
    let result = dasim::simulate(&parsed).unwrap();
    let expected: Vec<f64> = result
        .reps
        .iter()
        .flat_map(|r| {
            r.outcome
                .as_ref()
                .unwrap()
                .0
                .transactions()
                .map(|t| t.price)
                .collect::<Vec<_>>()
        })
        .collect();
    let read: Vec<f64> = rd.records().map(|r| r.unwrap()[6].parse().unwrap()).collect();
    assert_eq!(read.len(), expected.len());
    for (a, b) in read.iter().zip(&expected) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
    }
    for f in ["metrics.csv", "summary.csv", "errors.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn single_truthful_pair_trades_once() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "tt.toml",
        r#"
reps = 1
outputs = ["transactions"]
[market]
days = 1
rounds_per_day = 10
[schedule]
kind = "values"
buyers = [120.0]
sellers = [80.0]
[[traders]]
strategy = "tt"
count = 1
"#,
    );
    let out = dir.path().join("out");
    assert_eq!(
        dasim(&["run", "--config", &cfg, "--out", out.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    let mut rd = csv::Reader::from_path(out.join("transactions.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][6], "100");
}

#[test]
fn svg_outputs_parse() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "zic.toml",
        &ZIC.replace("reps = 3", "reps = 1\noutputs = [\"svg\"]"),
    );
    let out = dir.path().join("out");
    assert_eq!(
        dasim(&["run", "--config", &cfg, "--out", out.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    let text = std::fs::read_to_string(out.join("price_series_run0.svg")).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");

    // a market where nothing can trade still yields a valid plot
    let none = ZIC
        .replace("reps = 3", "reps = 1\noutputs = [\"svg\"]")
        .replace(
            "kind = \"linear\"\nn_per_side = 5",
            "kind = \"values\"\nbuyers = [10.0]\nsellers = [90.0]",
        )
        .replace("count = 5", "count = 1");
    let cfg = write(dir.path(), "none.toml", &none);
    let out = dir.path().join("none");
    assert_eq!(
        dasim(&["run", "--config", &cfg, "--out", out.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    let text = std::fs::read_to_string(out.join("price_series_run0.svg")).unwrap();
    roxmltree::Document::parse(&text).unwrap();
}

#[test]
fn egt_writes_simplex_and_tables() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "egt.toml",
        r#"
master_seed = 2
outputs = ["egt", "svg"]
[market]
improvement_rule = true
rounds_per_day = 20
[schedule]
kind = "values"
buyers = [150.0, 110.0]
sellers = [70.0, 110.0]
[egt]
reps = 4
n_starts = 20
strategies = [{ strategy = "tt" }, { strategy = "zic" }, { strategy = "kaplan" }]
"#,
    );
    let out = dir.path().join("out");
    let o = dasim(&["egt", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rd = csv::Reader::from_path(out.join("payoffs.csv")).unwrap();
    assert_eq!(rd.records().count(), 15);
    let text = std::fs::read_to_string(out.join("simplex.svg")).unwrap();
    roxmltree::Document::parse(&text).unwrap();
    let mut rd = csv::Reader::from_path(out.join("equilibria.csv")).unwrap();
    let basin_col = rd.headers().unwrap().iter().position(|h| h == "basin").unwrap();
    let total: f64 = rd
        .records()
        .map(|r| r.unwrap()[basin_col].parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "zic.toml", ZIC);
    let read = |seed: &str| {
        let out = dir.path().join(format!("s{seed}"));
        dasim(&[
            "run",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--seed",
            seed,
            "--reps",
            "1",
        ]);
        std::fs::read(out.join("transactions.csv")).unwrap()
    };
    assert_eq!(read("9"), read("9"));
    assert_ne!(read("9"), read("10"));
}
