//! Writes the synthetic end-to-end fixture (lists, rating tables,
//! embeddings, corpus, macro panel and a run config).
//!
//! ```text
//! cargo run -p sentishift --example make_fixture -- fixtures/synthetic
//! ```
//!
//! Everything is drawn from seeded streams, so the output is reproducible.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sentishift_core::rng::{below, standard_normal, stream_rng, uniform, StreamRng};

pub const BINDER_FEATURES: [&str; 65] = [
    "Vision", "Bright", "Dark", "Color", "Pattern", "Large", "Small", "Motion", "Biomotion", "Fast", "Slow",
    "Shape", "Complexity", "Face", "Body", "Touch", "Temperature", "Texture", "Weight", "Pain", "Audition",
    "Loud", "Low", "High", "Sound", "Music", "Speech", "Taste", "Smell", "Head", "UpperLimb", "LowerLimb",
    "Practice", "Landmark", "Path", "Scene", "Near", "Toward", "Away", "Number", "Time", "Duration", "Long",
    "Short", "Caused", "Consequential", "Social", "Human", "Communication", "Self", "Cognition", "Benefit",
    "Harm", "Pleasant", "Unpleasant", "Happy", "Sad", "Angry", "Disgusted", "Fearful", "Surprised", "Drive",
    "Needs", "Attention", "Arousal",
];

const DIM: usize = 16;
const MONTHS: usize = 120;
const ARTICLES_PER_MONTH: usize = 14;
const FILLER: usize = 1500;

struct Lists {
    names: [&'static str; 6],
    words: Vec<Vec<String>>,
    /// Mean (valence, arousal, dominance) per list.
    vad: [[f64; 3]; 6],
}

fn lists() -> Lists {
    let names = ["rss_approach", "rss_avoidance", "lm_positive", "lm_negative", "hiv_positive", "hiv_negative"];
    let prefix = ["apr", "avd", "lmp", "lmn", "hvp", "hvn"];
    let sizes = [60, 80, 70, 90, 70, 90];
    let mut words: Vec<Vec<String>> = prefix
        .iter()
        .zip(sizes)
        .map(|(p, n)| (0..n).map(|i| format!("{p}{i:03}")).collect())
        .collect();
    // A little overlap between the dictionaries, as with real lists.
    for i in 0..8 {
        let w = words[1][i].clone();
        words[3].push(w);
        let w = words[0][i].clone();
        words[2].push(w);
    }
    Lists {
        names,
        words,
        vad: [
            [0.80, 0.55, 0.70],
            [0.18, 0.73, 0.36],
            [0.76, 0.50, 0.66],
            [0.24, 0.60, 0.40],
            [0.72, 0.45, 0.62],
            [0.30, 0.52, 0.45],
        ],
    }
}

fn clamp(v: f64, lo: f64, hi: f64) -> f64 {
    v.max(lo).min(hi)
}

fn n(g: &mut StreamRng) -> f64 {
    standard_normal(g)
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
}

/// Feature map: ratings = clamp(3.5 + A e, 0, 7). Fearful/Surprised load on
/// embedding axis 0, Cognition/Drive on axis 1; every other feature mixes
/// the remaining axes.
fn feature_map(g: &mut StreamRng) -> Vec<[f64; DIM]> {
    BINDER_FEATURES
        .iter()
        .map(|f| {
            let mut row = [0.0; DIM];
            match *f {
                "Fearful" | "Surprised" => row[0] = 1.2,
                "Cognition" | "Drive" => row[1] = 1.2,
                _ => {
                    for v in row.iter_mut().skip(2) {
                        *v = 0.35 * n(g);
                    }
                }
            }
            row
        })
        .collect()
}

fn rate(a: &[[f64; DIM]], e: &[f64; DIM]) -> Vec<f64> {
    a.iter()
        .map(|row| clamp(3.5 + row.iter().zip(e).map(|(x, y)| x * y).sum::<f64>(), 0.0, 7.0))
        .collect()
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures/synthetic".into()));
    fs::create_dir_all(dir.join("lists")).unwrap();
    let l = lists();

    // Word-lists.
    for (name, words) in l.names.iter().zip(&l.words) {
        let mut s = format!("# synthetic list {name}\n");
        for w in words {
            writeln!(s, "{w}").unwrap();
        }
        write(&dir.join("lists").join(format!("{name}.txt")), &s);
    }

    // VAD table: every list word plus a share of the filler vocabulary.
    let mut g = stream_rng(1, 0);
    let mut vad = String::from("word,Valence,Arousal,Dominance\n");
    let mut seen = std::collections::HashSet::new();
    for (k, words) in l.words.iter().enumerate() {
        for w in words {
            if !seen.insert(w.clone()) {
                continue;
            }
            let r: Vec<f64> = (0..3).map(|j| clamp(l.vad[k][j] + 0.08 * n(&mut g), 0.0, 1.0)).collect();
            writeln!(vad, "{w},{:.3},{:.3},{:.3}", r[0], r[1], r[2]).unwrap();
        }
    }
    for i in (0..FILLER).step_by(3) {
        let r: Vec<f64> = (0..3).map(|_| clamp(0.5 + 0.15 * n(&mut g), 0.0, 1.0)).collect();
        writeln!(vad, "fil{i:04},{:.3},{:.3},{:.3}", r[0], r[1], r[2]).unwrap();
    }
    write(&dir.join("vad.csv"), &vad);

    // Embeddings: rated training words are isotropic; avoidance words split
    // into two planted groups along axes 0 and 1.
    let mut g = stream_rng(2, 0);
    let a = feature_map(&mut g);
    let mut emb = String::new();
    let mut binder = String::from("word");
    for f in BINDER_FEATURES {
        write!(binder, ",{f}").unwrap();
    }
    binder.push('\n');
    let mut vectors: Vec<(String, [f64; DIM])> = Vec::new();
    for i in 0..300 {
        let mut e = [0.0; DIM];
        e.iter_mut().for_each(|v| *v = n(&mut g));
        vectors.push((format!("bnd{i:03}"), e));
    }
    for (k, words) in l.words.iter().enumerate() {
        for (i, w) in words.iter().enumerate() {
            if vectors.iter().any(|(v, _)| v == w) {
                continue;
            }
            let mut e = [0.0; DIM];
            e.iter_mut().for_each(|v| *v = 0.6 * n(&mut g));
            if k == 1 {
                let (hi, lo) = if i % 2 == 0 { (0, 1) } else { (1, 0) };
                e[hi] = 1.6 + 0.3 * n(&mut g);
                e[lo] = -1.2 + 0.3 * n(&mut g);
            }
            vectors.push((w.clone(), e));
        }
    }
    writeln!(emb, "{} {DIM}", vectors.len()).unwrap();
    for (w, e) in &vectors {
        emb.push_str(w);
        for v in e {
            write!(emb, " {v:.4}").unwrap();
        }
        emb.push('\n');
    }
    write(&dir.join("embeddings.txt"), &emb);
    for (w, e) in vectors.iter().filter(|(w, _)| w.starts_with("bnd")) {
        binder.push_str(w);
        for v in rate(&a, e) {
            write!(binder, ",{:.2}", clamp(v + 0.1 * n(&mut g), 0.0, 7.0)).unwrap();
        }
        binder.push('\n');
    }
    write(&dir.join("binder.csv"), &binder);

    // Latent monthly sentiment: a bounded random walk.
    let mut g = stream_rng(3, 0);
    let mut latent = Vec::with_capacity(MONTHS);
    let mut x = 0.0f64;
    for _ in 0..MONTHS {
        x += 0.15 * n(&mut g);
        latent.push(x.tanh() * 0.8);
    }

    // Corpus: each article mixes filler with positive and negative words at
    // rates driven by the latent sentiment.
    let mut g = stream_rng(4, 0);
    let pos: Vec<&String> = l.words[0].iter().chain(&l.words[2]).chain(&l.words[4]).collect();
    let neg: Vec<&String> = l.words[1].iter().chain(&l.words[3]).chain(&l.words[5]).collect();
    let tags = [r#"["NY"]"#, r#"["DC"]"#, r#"["NY","DC"]"#, r#"["LON"]"#];
    let mut corpus = String::new();
    let mut id = 0;
    for (m, s) in latent.iter().enumerate() {
        let (year, month) = (2010 + m / 12, m % 12 + 1);
        for _ in 0..ARTICLES_PER_MONTH {
            id += 1;
            let len = 40 + below(&mut g, 50);
            let mut text = String::new();
            for t in 0..len {
                let u = uniform(&mut g);
                let w: &str = if u < 0.06 * (1.0 + s) {
                    pos[below(&mut g, pos.len())]
                } else if u < 0.12 {
                    neg[below(&mut g, neg.len())]
                } else {
                    text.push_str(if t == 0 { "" } else { " " });
                    write!(text, "fil{:04}", below(&mut g, FILLER)).unwrap();
                    continue;
                };
                if t > 0 {
                    text.push(' ');
                }
                text.push_str(&w.to_uppercase());
            }
            text.push('.');
            let day = 1 + below(&mut g, 28);
            let tag = tags[below(&mut g, tags.len())];
            writeln!(
                corpus,
                r#"{{"id":"a{id:05}","date":"{year}-{month:02}-{day:02}T12:00:00Z","tags":{tag},"text":"{text}"}}"#
            )
            .unwrap();
        }
    }
    write(&dir.join("corpus.jsonl"), &corpus);

    // Macro panel. Non-stationary block: log GDP, log investment (cointegrated
    // with GDP), log stock index (driven by lagged sentiment), fed funds and
    // PCE inflation (cointegrated), TED spread. Stationary: inflation
    // expectations, VIX, GZ spread, excess bond premium.
    let mut g = stream_rng(5, 0);
    let names = ["RGDP", "RINV", "SP", "FEDFUND", "PCE", "INFEXP", "TED", "VIXCLS", "GZSPR", "EBPOA"];
    let mut lgdp = 9.6f64;
    let mut linv_gap = 0.0f64;
    let mut lsp = 7.2f64;
    let mut pce = 2.0f64;
    let mut rate_gap = 0.0f64;
    let mut ted = 0.4f64;
    let (mut infexp, mut vix, mut gz, mut ebp) = (2.6f64, 18.0f64, 2.0f64, 0.0f64);
    let mut panel = String::from("month");
    for n in names {
        write!(panel, ",{n}").unwrap();
    }
    panel.push('\n');
    for m in 0..MONTHS {
        let s_prev = if m > 0 { latent[m - 1] } else { 0.0 };
        let ds_prev = if m > 1 { latent[m - 1] - latent[m - 2] } else { 0.0 };
        lgdp += 0.0015 + 0.002 * s_prev + 0.003 * n(&mut g);
        linv_gap = 0.6 * linv_gap + 0.01 * n(&mut g);
        lsp += 0.004 + 0.25 * ds_prev + 0.03 * n(&mut g);
        pce += 0.1 * n(&mut g);
        rate_gap = 0.7 * rate_gap + 0.15 * n(&mut g);
        ted = (ted + 0.03 * n(&mut g)).max(0.05);
        infexp = 2.6 + 0.6 * (infexp - 2.6) + 0.1 * n(&mut g);
        vix = 18.0 + 0.7 * (vix - 18.0) - 3.0 * s_prev + 1.5 * n(&mut g);
        gz = 2.0 + 0.8 * (gz - 2.0) + 0.1 * n(&mut g);
        ebp = 0.7 * ebp - 0.1 * s_prev + 0.08 * n(&mut g);
        let row = [
            lgdp.exp(),
            (lgdp - 1.6 + linv_gap).exp(),
            lsp.exp(),
            (pce + 0.5 + rate_gap).max(-5.0),
            pce,
            infexp,
            ted,
            vix.max(5.0),
            gz,
            ebp,
        ];
        write!(panel, "{}-{:02}", 2010 + m / 12, m % 12 + 1).unwrap();
        for v in row {
            write!(panel, ",{v:.5}").unwrap();
        }
        panel.push('\n');
    }
    write(&dir.join("panel.csv"), &panel);
    write(&dir.join("sentishift.toml"), CONFIG);
    eprintln!("fixture written to {}", dir.display());
}

const CONFIG: &str = r#"# Synthetic end-to-end run. Paths are relative to this file.
seed = 20240601
out = "out"

[lists]
rss_approach = "lists/rss_approach.txt"
rss_avoidance = "lists/rss_avoidance.txt"
lm_positive = "lists/lm_positive.txt"
lm_negative = "lists/lm_negative.txt"
hiv_positive = "lists/hiv_positive.txt"
hiv_negative = "lists/hiv_negative.txt"

[tables]
vad = "vad.csv"
binder = "binder.csv"
embeddings = "embeddings.txt"

[lexstat]
resamples = 10000

[[lexstat.groups]]
name = "positive"
reference = "rss_approach"
compare = ["lm_positive", "hiv_positive"]

[[lexstat.groups]]
name = "negative"
reference = "rss_avoidance"
compare = ["lm_negative", "hiv_negative"]

[lexstat.matched]
target = "rss_avoidance"
source = "lm_negative"
repeats = 2000
buckets = 10

[features]
k_folds = 5
predict = ["rss_avoidance", "lm_negative"]

[features.network]
hidden_units = 32
max_epochs = 150
patience = 15

[split]
list = "rss_avoidance"

[index]
corpus = "corpus.jsonl"
tags = ["NY", "DC"]

[[index.indices]]
name = "rss"
positive = "rss_approach"
negative = "rss_avoidance"

[[index.indices]]
name = "rss_alt1"
positive = "rss_approach"
negative = "rss_avoidance_alt1"

[[index.indices]]
name = "rss_alt2"
positive = "rss_approach"
negative = "rss_avoidance_alt2"

[[index.indices]]
name = "lm"
positive = "lm_positive"
negative = "lm_negative"

[econ]
panel = "panel.csv"
sentiment = "rss_alt1"
log = ["RGDP", "RINV", "SP"]
stationary = ["INFEXP", "VIXCLS", "GZSPR", "EBPOA"]
lag = 2
horizon = 24
replications = 200
level = 0.95
"#;
