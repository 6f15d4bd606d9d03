use std::path::PathBuf;
use std::process::Command as Process;

use charsum::verify::{self, CheckKind, CoeffModel, ExperimentConfig, ReportBundle, VerificationReport};
use charsum_cli::*;
use clap::Parser;
use proptest::prelude::*;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("charsum").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn values(csv_text: &str) -> Vec<(f64, f64, f64)> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    r.records()
        .map(|row| {
            let row = row.unwrap();
            let f = |i: usize| row[i].parse::<f64>().unwrap();
            (f(5), f(6), f(7))
        })
        .collect()
}

#[test]
fn compute_examples() {
    let (code, out, _) = call(&["compute", "lambda", "--q", "5", "--chi", "2", "--m", "1", "--n", "1"]);
    assert_eq!(code, EXIT_OK);
    let (re, im, _) = values(&out)[0];
    assert!((re + 2.0).abs() < 1e-12 && im.abs() < 1e-12, "{out}");
    assert!(out.contains(",5:5=2,"), "label printed: {out}");

    let (code, out, _) = call(&["compute", "gauss", "--q", "5", "--chi", "2", "--n", "1"]);
    assert_eq!(code, EXIT_OK);
    assert!((values(&out)[0].2 - 5f64.sqrt()).abs() < 1e-12, "{out}");

    let (code, out, _) = call(&["compute", "lambda", "--q", "5", "--chi", "1", "--m", "1", "--n", "1"]);
    assert_eq!(code, EXIT_OK);
    assert!(values(&out)[0].2 < 1e-12, "{out}");
}

#[test]
fn compute_json_and_all_characters() {
    let (code, out, _) = call(&["compute", "lambda", "--q", "7", "--chi", "all", "--m", "2", "--n", "3", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    assert_eq!(rows.len(), 6);
    for key in ["sum", "q", "chi_index", "chi_label", "inputs", "re", "im", "abs", "strategy"] {
        assert!(rows[0].get(key).is_some(), "missing {key}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["verify", "theorem1", "--q-range", "0..2"]).0, EXIT_USAGE);
    assert_eq!(call(&["verify", "nonsense"]).0, EXIT_USAGE);
    assert_eq!(call(&["compute", "lambda", "--q", "5"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["compute", "k2", "--q", "2000", "--chi", "0", "--strategy", "naive"]).0, EXIT_CAPACITY);
    assert_eq!(call(&["verify", "theorem1", "--q-range", "3..50", "--format", "csv"]).0, EXIT_OK);

    let (code, _, err) = call(&["verify", "bound4", "--q-range", "20..30"]);
    assert_eq!(code, EXIT_FAILED);
    assert!(err.contains("25:"), "witness on stderr: {err}");

    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verify"));
}

#[test]
fn verify_csv_round_trips_against_in_memory_report() {
    let (code, out, _) = call(&["verify", "lemma1", "--q-range", "3..40", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let parsed = verify::read_csv(out.as_bytes()).unwrap();
    let cfg = ExperimentConfig {
        q_min: 3,
        q_max: 40,
        ..Default::default()
    };
    let report = verify::run_check(CheckKind::Lemma1, &cfg).unwrap();
    assert_eq!(parsed, report.cases);
    assert_eq!(out.lines().filter(|l| l.starts_with("check,")).count(), 1);
}

#[test]
fn verify_json_schema() {
    let (code, out, _) = call(&["verify", "theorem2", "--q-range", "5..9", "--format", "json", "--seed", "3"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in ["check", "config", "cases", "summary"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    for key in ["tested", "passed", "max_defect", "max_ratio"] {
        assert!(v["summary"].get(key).is_some(), "missing summary.{key}");
    }
    assert_eq!(v["check"], "theorem2");
    let report = VerificationReport::from_json(&out).unwrap();
    assert_eq!(report.config["seed"], 3);
}

#[test]
fn verify_all_is_a_bundle_and_deterministic() {
    let args = ["verify", "all", "--q-range", "3..12", "--seed", "42", "--format", "json"];
    let (code, a, _) = call(&args);
    let (_, b, _) = call(&args);
    assert_eq!(a, b);
    let bundle = ReportBundle::from_json(&a).unwrap();
    assert_eq!(bundle.reports.len(), CheckKind::ALL.len());
    assert_eq!(code, if bundle.ok() { EXIT_OK } else { EXIT_FAILED });
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let args = ["verify", "lemma4", "--q-range", "3..30", "--seed", "9"];
    let (_, stdout, _) = call(&args);
    let mut with_out: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    let (code, printed, _) = call(&with_out);
    assert_eq!(code, EXIT_OK);
    assert!(printed.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout);
}

#[test]
fn bilinear_examples() {
    let args = ["bilinear", "--q", "101", "--A", "8", "--M", "8", "--N", "8", "--trials", "5", "--seed", "7"];
    let (code, a, _) = call(&args);
    let (_, b, _) = call(&args);
    assert_eq!(code, EXIT_OK);
    assert_eq!(a, b);
    assert_eq!(verify::read_csv(a.as_bytes()).unwrap().len(), 5);

    let (code, out, _) = call(&["bilinear", "--trials", "0"]);
    assert_eq!(code, EXIT_OK);
    assert!(verify::read_csv(out.as_bytes()).unwrap().is_empty());

    let (code, out, _) = call(&["bilinear", "--coeff-model", "zero", "--trials", "3"]);
    assert_eq!(code, EXIT_OK);
    for c in verify::read_csv(out.as_bytes()).unwrap() {
        assert_eq!(c.ratio, 0.0);
        assert_eq!(c.param("ratio_cs").unwrap(), "0");
        assert_eq!(c.param("ratio_sym").unwrap(), "0");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let run_with = |threads: &str| {
        Process::new(env!("CARGO_BIN_EXE_charsum"))
            .args(["verify", "theorem1", "--q-range", "3..60"])
            .env(THREADS_ENV, threads)
            .output()
            .unwrap()
    };
    let one = run_with("1");
    assert_eq!(one.status.code(), Some(EXIT_OK));
    assert_eq!(one.stdout, run_with("5").stdout);
    assert_eq!(one.stdout, run_with("0").stdout);
    assert_eq!(run_with("many").status.code(), Some(EXIT_USAGE));
}

fn chi_selector() -> impl Strategy<Value = ChiSelector> {
    prop_oneof![
        Just(ChiSelector::All),
        (0u64..50).prop_map(ChiSelector::Index),
        Just(ChiSelector::Label("15:3=1;5=2".into())),
    ]
}

fn cli() -> impl Strategy<Value = Cli> {
    let model = prop_oneof![
        Just(CoeffModel::UnitDisc),
        Just(CoeffModel::Signs),
        Just(CoeffModel::Zero),
        Just(CoeffModel::Ones)
    ];
    let format = prop_oneof![Just(Format::Csv), Just(Format::Json)];
    let out = proptest::option::of(Just(PathBuf::from("out dir/r.csv")));
    let small = proptest::option::of(-50i64..50);
    let compute = (
        prop_oneof![
            Just(SumKind::Lambda),
            Just(SumKind::Gauss),
            Just(SumKind::K2),
            Just(SumKind::Quadsum),
            Just(SumKind::Pairsum),
            Just(SumKind::Srsum)
        ],
        1u64..500,
        proptest::option::of(chi_selector()),
        (small.clone(), small.clone(), small.clone()),
        (small.clone(), small.clone(), small, proptest::option::of(0u64..30)),
        any::<bool>(),
        proptest::option::of(prop_oneof![Just(StrategyArg::Naive), Just(StrategyArg::Reduced)]),
        format.clone(),
        out.clone(),
    )
        .prop_map(|(sum, q, chi, (m, n, start), (a, b, y, len), restricted, strategy, format, out)| {
            Command::Compute(ComputeArgs {
                sum,
                q,
                chi,
                m,
                n,
                start,
                len,
                a,
                b,
                restricted,
                y,
                ell: len,
                strategy,
                format,
                out,
            })
        });
    let verify = (
        prop_oneof![Just("theorem1"), Just("all"), Just("bound5")],
        (1u64..100, 0u64..100),
        format.clone(),
        out.clone(),
        (any::<u64>(), 0u32..10, 0u32..1000),
        (0.0f64..1.0, 1.0f64..3.0),
        model.clone(),
    )
        .prop_map(|(check, (lo, w), format, out, (seed, trials, samples), (epsilon, gamma), coeff_model)| {
            Command::Verify(VerifyArgs {
                check: check.into(),
                q_range: QRange { lo, hi: lo + w },
                format,
                out,
                seed,
                trials,
                samples,
                epsilon,
                gamma,
                coeff_model,
            })
        });
    let bilinear = (
        proptest::collection::vec(2u64..400, 1..4),
        (1u64..40, 1u64..40, 1u64..40),
        (0u32..10, any::<u64>()),
        model,
        proptest::option::of(0u64..100),
        (0.0f64..1.0, 1.0f64..3.0),
        format,
        out,
    )
        .prop_map(|(q, (a, m, n), (trials, seed), coeff_model, chi, (epsilon, gamma), format, out)| {
            Command::Bilinear(BilinearArgs {
                q,
                a_scale: a,
                m_scale: m,
                n_scale: n,
                trials,
                seed,
                coeff_model,
                chi,
                epsilon,
                gamma,
                format,
                out,
            })
        });
    prop_oneof![compute, verify, bilinear].prop_map(|command| Cli { command })
}

proptest! {
    #[test]
    fn args_round_trip(c in cli()) {
        let args = c.to_args();
        let parsed = Cli::try_parse_from(std::iter::once("charsum".to_string()).chain(args.clone()))
            .map_err(|e| TestCaseError::fail(format!("{args:?}: {e}")))?;
        prop_assert_eq!(parsed.to_args(), args);
        prop_assert_eq!(parsed, c);
    }
}
