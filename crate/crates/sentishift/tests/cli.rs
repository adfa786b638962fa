//! End-to-end runs of the binary: outputs, overrides and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sentishift_core::econ::simulate::cointegrated_pair;
use sentishift_core::rng::{standard_normal, stream_rng};

const BIN: &str = env!("CARGO_BIN_EXE_sentishift");
const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/synthetic");

struct Project {
    dir: tempfile::TempDir,
}

impl Project {
    fn new(config: &str) -> Self {
        let p = Project {
            dir: tempfile::tempdir().unwrap(),
        };
        p.write("sentishift.toml", &config.replace("$FIXTURE", FIXTURE));
        p
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    fn write(&self, rel: &str, body: &str) -> PathBuf {
        let p = self.path(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(&p, body).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> Output {
        self.run_to("out", args)
    }

    fn run_to(&self, out: &str, args: &[&str]) -> Output {
        Command::new(BIN)
            .args(args)
            .arg("--config")
            .arg(self.path("sentishift.toml"))
            .arg("--out")
            .arg(self.path(out))
            .output()
            .unwrap()
    }

    fn read(&self, rel: &str) -> String {
        fs::read_to_string(self.path(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
    }
}

fn ok(o: &Output) {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

const LEXICON: &str = r#"
[lists]
rss_approach = "$FIXTURE/lists/rss_approach.txt"
rss_avoidance = "$FIXTURE/lists/rss_avoidance.txt"
lm_negative = "$FIXTURE/lists/lm_negative.txt"
hiv_negative = "$FIXTURE/lists/hiv_negative.txt"

[tables]
vad = "$FIXTURE/vad.csv"
binder = "$FIXTURE/binder.csv"
embeddings = "$FIXTURE/embeddings.txt"
"#;

// ---------------------------------------------------------------------------
// configuration errors

#[test]
fn missing_config_exits_2() {
    let o = Command::new(BIN)
        .args(["lexstat", "--config", "/nonexistent/sentishift.toml"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn unknown_key_and_bad_values_exit_2() {
    let p = Project::new("seed = 1\nbogus = 2\n");
    assert_eq!(code(&p.run(&["lexstat"])), 2);
    let p = Project::new(&format!("{LEXICON}\n[features]\nk_folds = 1\n"));
    let o = p.run(&["features", "crossval"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("k_folds"), "{}", stderr(&o));
}

#[test]
fn unknown_subcommand_exits_2() {
    let o = Command::new(BIN).arg("frobnicate").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn predict_without_bundle_exits_2() {
    let p = Project::new(&format!("{LEXICON}\n[features]\npredict = [\"rss_avoidance\"]\n"));
    let o = p.run(&["features", "predict"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("bundle"), "{}", stderr(&o));
}

#[test]
fn irf_before_vecm_exits_2() {
    let p = econ_project("");
    let o = p.run(&["econ", "irf"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("vecm"), "{}", stderr(&o));
}

// ---------------------------------------------------------------------------
// data errors

#[test]
fn malformed_table_exits_3_with_location() {
    let p = Project::new(
        r#"
[lists]
a = "a.txt"
[tables]
vad = "vad.csv"
"#,
    );
    p.write("a.txt", "calm\n");
    p.write("vad.csv", "word,Valence,Arousal,Dominance\ncalm,0.5,high,0.5\n");
    let o = p.run(&["lexstat"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("vad.csv:2"), "{}", stderr(&o));
}

#[test]
fn zero_tag_matches_exit_3_and_echo_the_filter() {
    let p = index_project(1);
    let o = p.run(&["index", "--tags", "TOKYO,SYDNEY"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let e = stderr(&o);
    assert!(e.contains("TOKYO") && e.contains("SYDNEY"), "{e}");
}

#[test]
fn collinear_panel_exits_4() {
    let p = econ_project("collinear");
    let o = p.run(&["econ", "vecm", "--rank", "1"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

// ---------------------------------------------------------------------------
// lexstat

#[test]
fn single_list_reports_means_only() {
    let p = Project::new(&format!("{LEXICON}\n"));
    ok(&p.run(&["lexstat"]));
    let means = p.read("out/lexstat/means.csv");
    assert!(means.starts_with("list,words,rated,coverage,Valence,Arousal,Dominance\n"), "{means}");
    assert_eq!(csv_rows(&means).len(), 4);
    let names: Vec<String> = fs::read_dir(p.path("out/lexstat"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(!names.iter().any(|n| n.starts_with("comparison")), "{names:?}");
}

#[test]
fn seed_flag_changes_resampling_and_is_recorded() {
    let p = Project::new(
        r#"
[lists]
a = "a.txt"
b = "b.txt"
[tables]
vad = "vad.csv"
[lexstat]
resamples = 500
[[lexstat.groups]]
name = "g"
reference = "a"
compare = ["b"]
"#,
    );
    // Overlapping samples, so p-values sit well inside (0, 1).
    let mut vad = String::from("word,Valence,Arousal,Dominance\n");
    for i in 0..20 {
        let v = (i * 7 % 20) as f64 / 20.0;
        vad.push_str(&format!("w{i},{v},{},{}\n", 1.0 - v, (i % 5) as f64 / 5.0));
    }
    p.write("vad.csv", &vad);
    p.write("a.txt", &(0..10).map(|i| format!("w{i}\n")).collect::<String>());
    p.write("b.txt", &(10..20).map(|i| format!("w{i}\n")).collect::<String>());
    ok(&p.run_to("a", &["lexstat", "--seed", "1"]));
    ok(&p.run_to("b", &["lexstat", "--seed", "1"]));
    ok(&p.run_to("c", &["lexstat", "--seed", "2"]));
    let file = "lexstat/comparison_g.csv";
    let (a, b, c) = (p.read(&format!("a/{file}")), p.read(&format!("b/{file}")), p.read(&format!("c/{file}")));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(csv_rows(&a).len(), 3);
    let manifest = |run: &str| -> serde_json::Value {
        serde_json::from_str(&p.read(&format!("{run}/lexstat/manifest.json"))).unwrap()
    };
    assert_eq!(manifest("a"), manifest("b"));
    assert_ne!(manifest("a")["seed"], manifest("c")["seed"]);
    assert!(manifest("c")["files"].get("comparison_g.csv").is_some());
}

#[test]
fn resamples_override_reaches_the_report() {
    let p = Project::new(&format!(
        "{LEXICON}\n[[lexstat.groups]]\nname = \"g\"\nreference = \"lm_negative\"\ncompare = [\"hiv_negative\"]\n"
    ));
    ok(&p.run(&["lexstat", "--resamples", "123"]));
    let rows = csv_rows(&p.read("out/lexstat/comparison_g.csv"));
    assert!(rows.iter().all(|r| r.last().unwrap() == "123"), "{rows:?}");
}

// ---------------------------------------------------------------------------
// features

#[test]
fn crossval_reports_every_feature() {
    let p = Project::new(&format!("{LEXICON}\n[features.network]\nhidden_units = 8\npatience = 2\n"));
    let o = p.run(&["features", "crossval", "--k-folds", "5", "--max-epochs", "3"]);
    ok(&o);
    let report = p.read("out/features/crossval/crossval.csv");
    assert!(report.starts_with("feature,mean_r,fold_1,fold_2,fold_3,fold_4,fold_5\n"), "{}", &report[..80]);
    assert_eq!(csv_rows(&report).len(), 65);
}

#[test]
fn train_then_predict_writes_matrices() {
    let p = Project::new(&format!(
        "{LEXICON}\n[features]\npredict = [\"rss_avoidance\", \"lm_negative\"]\n[features.network]\nhidden_units = 8\nmax_epochs = 3\n"
    ));
    ok(&p.run(&["features", "train"]));
    ok(&p.run(&["features", "predict"]));
    for list in ["rss_avoidance", "lm_negative"] {
        let m = p.read(&format!("out/features/predict/{list}.csv"));
        assert!(m.lines().next().unwrap().split(',').count() == 66, "{list}");
    }
}

// ---------------------------------------------------------------------------
// index

fn index_project(n_indices: usize) -> Project {
    let names = ["plain", "neg_only", "swapped", "lm"];
    let specs = [
        ("pos", "neg", "both"),
        ("pos", "neg", "negative-only"),
        ("neg", "pos", "both"),
        ("pos", "lm", "both"),
    ];
    let mut cfg = String::from(
        "[lists]\npos = \"pos.txt\"\nneg = \"neg.txt\"\nlm = \"lm.txt\"\n\n[index]\ncorpus = \"corpus.jsonl\"\ntags = [\"NY\"]\n",
    );
    for (name, (pos, neg, mode)) in names.iter().zip(specs).take(n_indices) {
        cfg.push_str(&format!(
            "\n[[index.indices]]\nname = \"{name}\"\npositive = \"{pos}\"\nnegative = \"{neg}\"\nmode = \"{mode}\"\n"
        ));
    }
    let p = Project::new(&cfg);
    p.write("pos.txt", "gain\nprofit\n");
    p.write("neg.txt", "loss\nfear\n");
    p.write("lm.txt", "loss\ndecline\n");
    p.write(
        "corpus.jsonl",
        concat!(
            r#"{"id": "a", "date": "2020-01-03", "tags": ["NY"], "text": "Gain in the quarter."}"#,
            "\n",
            r#"{"id": "b", "date": "2020-01-20", "tags": ["ny", "DC"], "text": "Fear, loss."}"#,
            "\n",
            r#"{"id": "c", "date": "2020-02-11T09:30:00Z", "tags": ["NY"], "text": "Gain, profit and more gain offset one loss"}"#,
            "\n",
            r#"{"id": "d", "date": "2020-02-12", "tags": ["LON"], "text": "loss loss loss loss"}"#,
            "\n",
        ),
    );
    p
}

#[test]
fn hand_computed_index_with_tag_filter() {
    let p = index_project(1);
    ok(&p.run(&["index"]));
    // 1/4 and −2/2 in January, 2/8 in February; the LON article is filtered.
    assert_eq!(
        p.read("out/index/plain.csv"),
        "month,value,article_count\n2020-01,-0.375,2\n2020-02,0.25,1\n"
    );
    let meta: serde_json::Value = serde_json::from_str(&p.read("out/index/plain.meta.json")).unwrap();
    assert_eq!(meta["articles_read"], 4);
    assert_eq!(meta["articles_matched"], 3);
}

#[test]
fn every_configured_index_gets_a_series() {
    let p = index_project(4);
    ok(&p.run(&["index"]));
    for name in ["plain", "neg_only", "swapped", "lm"] {
        assert!(p.path(&format!("out/index/{name}.csv")).exists(), "{name}");
        assert!(p.path(&format!("out/index/{name}.meta.json")).exists(), "{name}");
    }
    let values = |name: &str| -> Vec<f64> {
        csv_rows(&p.read(&format!("out/index/{name}.csv"))).iter().map(|r| r[1].parse().unwrap()).collect()
    };
    let neg: Vec<f64> = values("plain").iter().map(|v| -v).collect();
    assert_eq!(values("swapped"), neg);
    // −n/t: January (0 − 1) / 2, February −1/8
    assert_eq!(values("neg_only"), [-0.5, -0.125]);
}

#[test]
fn tags_flag_overrides_config() {
    let p = index_project(1);
    ok(&p.run(&["index", "--tags", "LON"]));
    assert_eq!(p.read("out/index/plain.csv"), "month,value,article_count\n2020-02,-1,1\n");
}

// ---------------------------------------------------------------------------
// econ

/// Three-variable panel: a cointegrated pair and a stationary AR(1). With
/// `collinear`, the third column repeats the first.
fn econ_project(kind: &str) -> Project {
    let mut g = stream_rng(7, 0);
    let pair = cointegrated_pair(180, 0.5, 0.1, &mut g);
    let mut ar = 0.0;
    let mut body = String::from("month,A,B,C\n");
    for t in 0..180 {
        ar = 0.5 * ar + standard_normal(&mut g);
        let c = if kind == "collinear" { pair[(t, 0)] } else { ar };
        body.push_str(&format!("{}-{:02},{},{},{}\n", 2000 + t / 12, 1 + t % 12, pair[(t, 0)], pair[(t, 1)], c));
    }
    let stationary = if kind == "collinear" { "" } else { "\"C\"" };
    let p = Project::new(&format!(
        "[econ]\npanel = \"panel.csv\"\nstationary = [{stationary}]\nlag = 2\nhorizon = 12\nreplications = 100\n"
    ));
    p.write("panel.csv", &body);
    p
}

#[test]
fn adf_covers_levels_and_differences() {
    let p = econ_project("");
    ok(&p.run(&["econ", "adf"]));
    let rows = csv_rows(&p.read("out/econ/adf/adf.csv"));
    assert_eq!(rows.len(), 6);
    // C is white-noise-like and must be rejected in levels.
    let c = rows.iter().find(|r| r[0] == "C" && r[1] == "level").unwrap();
    assert_eq!(c.last().unwrap(), "true");
}

#[test]
fn vecm_irf_fevd_chain() {
    let p = econ_project("");
    ok(&p.run(&["econ", "vecm"]));
    let model: serde_json::Value = serde_json::from_str(&p.read("out/econ/vecm/model.json")).unwrap();
    assert_eq!(model["model"]["lag"], 2);
    assert_eq!(model["model"]["stationary"][0], "C");

    ok(&p.run(&["econ", "irf"]));
    let irf = csv_rows(&p.read("out/econ/irf/irf.csv"));
    assert_eq!(irf.len(), 13 * 9);
    for r in &irf {
        let (point, lo, hi): (f64, f64, f64) = (r[3].parse().unwrap(), r[4].parse().unwrap(), r[5].parse().unwrap());
        assert!(lo <= hi && point.is_finite(), "{r:?}");
    }

    ok(&p.run(&["econ", "fevd"]));
    let fevd = csv_rows(&p.read("out/econ/fevd/fevd.csv"));
    assert_eq!(fevd.len(), 12 * 9);
    let mut sums = std::collections::BTreeMap::<(String, String), f64>::new();
    for r in &fevd {
        *sums.entry((r[0].clone(), r[1].clone())).or_default() += r[3].parse::<f64>().unwrap();
    }
    assert_eq!(sums.len(), 36);
    for (k, s) in sums {
        assert!((s - 1.0).abs() < 1e-8, "{k:?}: {s}");
    }
}

#[test]
fn bootstrap_can_be_disabled() {
    let p = econ_project("");
    ok(&p.run(&["econ", "vecm"]));
    ok(&p.run(&["econ", "irf", "--replications", "0", "--horizon", "3"]));
    let irf = p.read("out/econ/irf/irf.csv");
    assert_eq!(csv_rows(&irf).len(), 4 * 9);
}

#[test]
fn too_few_replications_is_a_config_error() {
    let p = econ_project("");
    ok(&p.run(&["econ", "vecm"]));
    let o = p.run(&["econ", "irf", "--replications", "10"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn stage_output_is_replaced_not_merged() {
    let p = index_project(4);
    ok(&p.run(&["index"]));
    let p2 = index_project(1);
    fs::rename(p.path("out"), p2.path("out")).unwrap();
    ok(&p2.run(&["index"]));
    assert!(!Path::new(&p2.path("out/index/lm.csv")).exists());
}
