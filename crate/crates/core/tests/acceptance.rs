//! Acceptance criteria, one pass/fail line per criterion on stdout.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use lca_tfa::experiment::{gaussian_stft_defect, identity_suite, run, ExperimentConfig, Summary, CHECKS};
use lca_tfa::gabor::quotient_independence_residual;
use lca_tfa::group::make_group;
use lca_tfa::random::SeededRng;
use lca_tfa::tfa::gaussian_window;

fn report(line: &str) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
}

fn config(body: &str, dir: &Path) -> ExperimentConfig {
    let text = format!(r#"{{{body}, "output": {{"dir": {:?}}}}}"#, dir.to_str().unwrap());
    ExperimentConfig::from_json(&text).unwrap()
}

fn failed(summary: &Summary) -> String {
    summary
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}={:.3e}>{:.1e}", c.id, c.value, c.tolerance))
        .collect::<Vec<_>>()
        .join(" ")
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn criterion_identities() -> Outcome {
    let start = Instant::now();
    let groups = [
        (vec![4], vec![2]),
        (vec![6], vec![3]),
        (vec![8], vec![4]),
        (vec![6, 2], vec![3, 1]),
    ];
    let mut passed = true;
    let mut detail = Vec::new();
    for (seed, (factors, divisors)) in groups.iter().enumerate() {
        let group = make_group(factors, divisors).unwrap();
        let results = identity_suite(&group, seed as u64, 50).unwrap();
        assert_eq!(gaussian_stft_defect(&group).unwrap(), results[0].1);
        for (id, value) in results {
            let tol = CHECKS.iter().find(|c| c.id == id).unwrap().tolerance;
            if value.is_nan() || value > tol {
                passed = false;
                detail.push(format!("{factors:?} {id}={value:.3e}>{tol:.1e}"));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    passed &= elapsed < 60.0;
    detail.push(format!("{elapsed:.1}s"));
    Outcome { passed, detail: detail.join(" ") }
}

fn criterion_run(body: &str) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let summary = run(&config(body, dir.path())).unwrap();
    let worst: Vec<String> = summary.checks.iter().map(|c| format!("{}={:.2e}", c.id, c.value)).collect();
    Outcome {
        passed: summary.passed,
        detail: if summary.passed { worst.join(" ") } else { failed(&summary) },
    }
}

fn merge(parts: Vec<Outcome>) -> Outcome {
    Outcome {
        passed: parts.iter().all(|o| o.passed),
        detail: parts.iter().map(|o| o.detail.as_str()).collect::<Vec<_>>().join(" | "),
    }
}

fn criterion_discrete_norms() -> Outcome {
    criterion_run(
        r#""experiment": "norms", "group": {"factors": [8], "subgroup_divisors": [8]}, "seed": 1, "trials": 100,
        "exponents": [
            {"p": 0.5, "q": 0.5}, {"p": 0.5, "q": 1}, {"p": 0.5, "q": 2}, {"p": 0.5, "q": "inf"},
            {"p": 1, "q": 0.5}, {"p": 1, "q": 1}, {"p": 1, "q": 2}, {"p": 1, "q": "inf"},
            {"p": 2, "q": 0.5}, {"p": 2, "q": 1}, {"p": 2, "q": 2}, {"p": 2, "q": "inf"},
            {"p": "inf", "q": 0.5}, {"p": "inf", "q": 1}, {"p": "inf", "q": 2}, {"p": "inf", "q": "inf"}
        ]"#,
    )
}

fn criterion_frames() -> Outcome {
    merge(vec![
        criterion_run(r#""experiment": "frames", "group": {"factors": [4], "subgroup_divisors": [2]}, "seed": 3, "trials": 100"#),
        criterion_run(r#""experiment": "frames", "group": {"factors": [6], "subgroup_divisors": [3]}, "seed": 3, "trials": 100"#),
    ])
}

fn criterion_inequalities() -> Outcome {
    merge(vec![
        criterion_run(
            r#""experiment": "young", "group": {"factors": [6], "subgroup_divisors": [3]}, "seed": 2, "trials": 200,
            "weights": [{"kind": "ones"}, {"kind": "polynomial", "s": 1.0}]"#,
        ),
        criterion_run(r#""experiment": "convrel", "group": {"factors": [8], "subgroup_divisors": [2]}, "seed": 4, "trials": 200"#),
    ])
}

fn criterion_decay() -> Outcome {
    let start = Instant::now();
    let mut out = criterion_run(
        r#""experiment": "decay", "group": {"factors": [64], "subgroup_divisors": [8]}, "seed": 2024, "trials": 500,
        "decay": {"percentile_max": 5.0, "control_seeds": 10, "control_top_k": 16,
                  "control_band": [20.0, 80.0], "control_min_in_band": 8}"#,
    );
    let elapsed = start.elapsed().as_secs_f64();
    out.passed &= elapsed < 300.0;
    out.detail.push_str(&format!(" {elapsed:.1}s"));
    out
}

fn criterion_quotient() -> Outcome {
    let mut worst = 0.0f64;
    for d in [1, 2, 4, 8] {
        let group = make_group(&[8], &[d]).unwrap();
        let phi = gaussian_window(&group);
        for t in 0..20 {
            let f = SeededRng::for_trial(6, t).signal(&group);
            worst = worst.max(quotient_independence_residual(&f, &phi).unwrap());
        }
    }
    Outcome { passed: worst == 0.0, detail: format!("max residual {worst:e}") }
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_determinism() -> Outcome {
    let bodies = [
        r#""experiment": "identities", "group": {"factors": [6], "subgroup_divisors": [3]}, "seed": 5, "trials": 20"#,
        r#""experiment": "frames", "group": {"factors": [8], "subgroup_divisors": [4]}, "seed": 5, "trials": 20, "frames": {"perturbation": 0.1, "oversample_shifts": [[0, 0], [0, 2]]}"#,
        r#""experiment": "norms", "group": {"factors": [8], "subgroup_divisors": [2]}, "seed": 5, "trials": 20"#,
        r#""experiment": "locop", "group": {"factors": [16], "subgroup_divisors": [4]}, "seed": 5, "trials": 5"#,
        r#""experiment": "young", "group": {"factors": [4], "subgroup_divisors": [2]}, "seed": 5, "trials": 20"#,
        r#""experiment": "convrel", "group": {"factors": [6], "subgroup_divisors": [2]}, "seed": 5, "trials": 20"#,
        r#""experiment": "decay", "group": {"factors": [16], "subgroup_divisors": [4]}, "seed": 5, "trials": 100, "decay": {"control_seeds": 2}"#,
    ];
    let mut mismatched = Vec::new();
    let mut files = 0;
    for body in bodies {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run(&config(body, a.path())).unwrap();
        run(&config(body, b.path())).unwrap();
        let (fa, fb) = (read_dir_bytes(a.path()), read_dir_bytes(b.path()));
        files += fa.len();
        if fa != fb {
            mismatched.push(config(body, a.path()).experiment.name());
        }
    }
    Outcome {
        passed: mismatched.is_empty(),
        detail: format!("{files} artifacts compared, mismatched: {mismatched:?}"),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 7] = [
        ("1 exact identities", criterion_identities),
        ("2 discrete norm exactness", criterion_discrete_norms),
        ("3 frame suite", criterion_frames),
        ("4 inequality fuzzing", criterion_inequalities),
        ("5 eigenfunction decay", criterion_decay),
        ("6 quotient well-definedness", criterion_quotient),
        ("7 determinism", criterion_determinism),
    ];
    let mut failures = Vec::new();
    for (name, check) in criteria {
        let outcome = check();
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        report(&format!("criterion {name}: {status} ({})", outcome.detail));
        if !outcome.passed {
            failures.push(name);
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
