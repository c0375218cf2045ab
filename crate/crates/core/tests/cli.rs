//! End-to-end checks of the `transrad` binary: determinism of emitted
//! artifacts, CSV/metadata contents, agreement with the library, and the
//! documented exit codes.

use std::path::Path;
use std::process::{Command, Output};
use transrad::riskbounds::margin_risk_bound;
use transrad::sample::default_p;

fn transrad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_transrad"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn write_arc_dataset(path: &Path, n: usize) {
    let mut text = String::new();
    for i in 0..n {
        let theta = std::f64::consts::FRAC_PI_2 * i as f64 / (n - 1) as f64;
        let label = if i < n / 2 { 1 } else { -1 };
        let wobble = 0.05 * ((7 * i % 5) as f64 - 2.0);
        text.push_str(&format!(
            "{},{},{label}\n",
            1.5 + theta.cos() + wobble,
            1.5 + theta.sin() - wobble,
        ));
    }
    std::fs::write(path, text).unwrap();
}

fn write_config(path: &Path, dataset: &Path, extra: &str) {
    let text = format!(
        "dataset_path = {}\n\
         dataset_schema = generic-csv\n\
         algorithm = cm\n\
         beta = 0.5\n\
         gamma = 0.5\n\
         k_neighbors = 5\n\
         mc_samples = 400\n\
         truncation_grid = 1, 2, 8, 30\n\
         {extra}",
        dataset.display()
    );
    std::fs::write(path, text).unwrap();
}

#[test]
fn run_is_deterministic_in_the_seed_and_writes_both_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = dir.path().join("points.csv");
    write_arc_dataset(&dataset, 30);
    let config = dir.path().join("exp.conf");
    write_config(&config, &dataset, "");

    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let out_c = dir.path().join("c.csv");
    for (out, seed) in [(&out_a, "42"), (&out_b, "42"), (&out_c, "43")] {
        let run = transrad(&[
            "run",
            config.to_str().unwrap(),
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(
            run.status.success(),
            "run failed: {}",
            String::from_utf8_lossy(&run.stderr)
        );
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    let c = std::fs::read(&out_c).unwrap();
    assert_eq!(a, b, "same config and seed must emit byte-identical CSV");
    assert_ne!(a, c, "different seeds must change the Monte-Carlo draws");

    let meta = std::fs::read_to_string(dir.path().join("a.meta.txt")).unwrap();
    for needle in [
        "seed = 42",
        "algorithm = cm",
        "standardized = true",
        "wall_clock_seconds = ",
        "risk_total = ",
        "q_const = ",
    ] {
        assert!(meta.contains(needle), "metadata missing `{needle}`:\n{meta}");
    }
}

#[test]
fn emitted_csv_parses_and_satisfies_the_orderings() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = dir.path().join("points.csv");
    write_arc_dataset(&dataset, 30);
    let config = dir.path().join("exp.conf");
    write_config(&config, &dataset, "");
    let out = dir.path().join("rows.csv");
    let run = transrad(&[
        "run",
        config.to_str().unwrap(),
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success());

    let mut reader = csv::Reader::from_path(&out).unwrap();
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        headers,
        ["t", "mc_lower", "mc_upper", "generic_bound", "kernel_bound", "exact_oracle"]
    );
    let mut expected_t = [1usize, 2, 8, 30].into_iter();
    for record in reader.records() {
        let record = record.unwrap();
        let t: usize = record[0].parse().unwrap();
        assert_eq!(Some(t), expected_t.next());
        let lower: f64 = record[1].parse().unwrap();
        let upper: f64 = record[2].parse().unwrap();
        let generic: f64 = record[3].parse().unwrap();
        let kernel: f64 = record[4].parse().unwrap();
        assert!(lower <= upper);
        assert!(generic <= kernel + 1e-12);
        assert!(record[5].is_empty(), "30 points exceed the exact-oracle cap");
    }
    assert!(expected_t.next().is_none(), "missing truncation rows");
}

#[test]
fn bounds_subcommand_matches_the_library_assembly() {
    let out = transrad(&[
        "bounds", "--m", "10", "--u", "20", "--gamma", "0.5", "--delta", "0.1",
        "--empirical", "0.2", "--complexity", "0.3",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let printed_total: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("total ")?.trim_start_matches([' ', '=']).trim().parse().ok())
        .expect("total line present");
    let complexity = transrad::rademacher::ComplexityEstimate {
        method: transrad::rademacher::ComplexityMethod::Generic,
        value: 0.3,
        mc_mean: None,
        mc_lower: None,
        n_samples: None,
        delta: None,
        p: default_p(10, 20),
    };
    let report = margin_risk_bound(0.2, complexity, 0.5, 10, 20, 0.1).unwrap();
    assert!(
        (printed_total - report.total).abs() <= 1e-12 * report.total,
        "CLI printed {printed_total}, library computed {}",
        report.total
    );
}

#[test]
fn oracle_subcommand_reports_sound_closed_forms() {
    for family in ["ball", "vanilla", "kernel"] {
        let out = transrad(&[
            "oracle", "--m", "2", "--u", "4", "--seed", "3", "--family", family,
        ]);
        assert!(out.status.success(), "family {family} failed");
        let stdout = String::from_utf8(out.stdout).unwrap();
        let ratio: f64 = stdout
            .lines()
            .find_map(|l| l.strip_prefix("ratio closed / exact  =")?.trim().parse().ok())
            .expect("ratio line present");
        assert!(
            ratio >= 1.0 - 1e-12,
            "family {family}: closed form fell below the exact value (ratio {ratio})"
        );
    }
}

#[test]
fn concentration_subcommand_prints_all_three_statistics() {
    let out = transrad(&[
        "validate-concentration", "--m", "8", "--u", "12", "--samples", "300",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    for needle in ["test-train-gap", "train-mean", "serfling"] {
        assert!(stdout.contains(needle), "missing `{needle}` rows:\n{stdout}");
    }
}

#[test]
fn exit_codes_distinguish_config_data_and_numerical_failures() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = dir.path().join("points.csv");
    write_arc_dataset(&dataset, 30);

    // Invalid configuration value → 2.
    let bad_config = dir.path().join("bad.conf");
    write_config(&bad_config, &dataset, "delta = 1.5\n");
    let run = transrad(&["run", bad_config.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(run.status.code(), Some(2), "invalid delta should exit 2");

    // Unreadable dataset → 3.
    let missing_config = dir.path().join("missing.conf");
    write_config(&missing_config, &dir.path().join("nope.csv"), "");
    let run = transrad(&["run", missing_config.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(run.status.code(), Some(3), "missing dataset should exit 3");

    // Malformed dataset row → 3.
    let ragged = dir.path().join("ragged.csv");
    std::fs::write(&ragged, "1.0,2.0,1\n3.0,4.0\n").unwrap();
    let ragged_config = dir.path().join("ragged.conf");
    write_config(&ragged_config, &ragged, "");
    let run = transrad(&["run", ragged_config.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(run.status.code(), Some(3), "ragged dataset should exit 3");

    // Two orthogonal feature clusters split the similarity graph; the
    // spectral transducer requires one component → 4.
    let split = dir.path().join("split.csv");
    let mut text = String::new();
    for i in 0..10 {
        text.push_str(&format!("{},0.0,1\n", 1.0 + i as f64 * 0.01));
    }
    for i in 0..10 {
        text.push_str(&format!("0.0,{},-1\n", 1.0 + i as f64 * 0.01));
    }
    std::fs::write(&split, text).unwrap();
    let split_config = dir.path().join("split.conf");
    std::fs::write(
        &split_config,
        format!(
            "dataset_path = {}\ndataset_schema = generic-csv\nalgorithm = sgt\n\
             c = 2.0\nr = 5\ngamma = 0.5\nk_neighbors = 5\nmc_samples = 200\n",
            split.display()
        ),
    )
    .unwrap();
    let run = transrad(&["run", split_config.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(
        run.status.code(),
        Some(4),
        "disconnected similarity graph should exit 4: {}",
        String::from_utf8_lossy(&run.stderr)
    );

    // Exact-oracle size cap → 2.
    let run = transrad(&["oracle", "--m", "6", "--u", "7"]);
    assert_eq!(run.status.code(), Some(2), "oversized oracle should exit 2");
}
