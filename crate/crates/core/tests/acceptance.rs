//! Acceptance harness: one PASS/FAIL line per criterion and a summary line.
//!
//! Criteria that need the NSL-KDD files read `KDDTrain+.txt` and `KDDTest+.txt` from
//! the directory named by `NSL_KDD_DIR`. The process exits nonzero on any failing
//! criterion only when `ACCEPTANCE_STRICT=1`, so that a red criterion does not stop
//! `cargo test` before the remaining test targets have run.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use advids_core::bundle::ModelBundle;
use advids_core::detect::{classify, score, AnomalyScore, Decision, Detector};
use advids_core::eval::{bench_latency, metrics, reconstruct_confusion, tally, Confusion};
use advids_core::flow::{parse_records, split_normal_only, Dataset, FeatureCodec, ParsedRecords, RawFlow};
use advids_core::nn::gradcheck::check_gradients;
use advids_core::nn::loss::{cross_entropy, mse};
use advids_core::nn::{Activation, DenseNet};
use advids_core::synth::{clustered_normals, uniform_points, KddLikeGenerator};
use advids_core::train::{held_out_diagnostics, train, TrainConfig, TrainedModels};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { pass: false, detail: detail.into() }
}

fn check(ok: bool, detail: String) -> Outcome {
    Outcome { pass: ok, detail }
}

/// Parsed canonical files plus everything derived from them that several criteria share.
struct Kdd {
    train: ParsedRecords,
    test: ParsedRecords,
    codec: FeatureCodec,
    train_normals: Dataset,
    test_all: Dataset,
    test_normals: Dataset,
    load_time: Duration,
}

fn load_kdd() -> Result<Kdd, String> {
    let dir = std::env::var_os("NSL_KDD_DIR")
        .map(PathBuf::from)
        .ok_or("dataset unavailable: NSL_KDD_DIR is not set")?;
    let start = Instant::now();
    let read = |name: &str| -> Result<ParsedRecords, String> {
        let path = dir.join(name);
        let f = File::open(&path).map_err(|e| format!("dataset unavailable: {}: {e}", path.display()))?;
        parse_records(BufReader::new(f)).map_err(|e| format!("{}: {e}", path.display()))
    };
    let train_records = read("KDDTrain+.txt")?;
    let test = read("KDDTest+.txt")?;
    let split = split_normal_only(train_records.flows.clone());
    let codec = FeatureCodec::fit(&split.train_normals).map_err(|e| e.to_string())?;
    let train_normals = Dataset::encode(&codec, &split.train_normals);
    let test_all = Dataset::encode(&codec, &test.flows);
    let test_normal_flows: Vec<RawFlow> = test.flows.iter().filter(|f| f.is_normal()).cloned().collect();
    let test_normals = Dataset::encode(&codec, &test_normal_flows);
    Ok(Kdd {
        train: train_records,
        test,
        codec,
        train_normals,
        test_all,
        test_normals,
        load_time: start.elapsed(),
    })
}

fn test_accuracy(kdd: &Kdd, models: &TrainedModels, alpha: f64) -> f64 {
    let decisions: Vec<Decision> = kdd
        .test_all
        .rows()
        .map(|row| classify(score(&models.detector, row).unwrap(), alpha).unwrap().decision)
        .collect();
    let c = tally(&decisions, kdd.test_all.tags()).unwrap();
    metrics(&c).unwrap().acc
}

fn c1_dataset_protocol(kdd: &Result<Kdd, String>) -> Outcome {
    let kdd = match kdd {
        Ok(k) => k,
        Err(e) => return fail(e.clone()),
    };
    let (tn, tn_test, ta_test) = (kdd.train.normal_count(), kdd.test.normal_count(), kdd.test.anomaly_count());
    let ok = tn == 67343 && tn_test == 9711 && ta_test == 12833 && kdd.load_time < Duration::from_secs(10);
    check(
        ok,
        format!(
            "train normals {tn} (want 67343), test {tn_test}/{ta_test} (want 9711/12833), {} malformed, loaded in {:.1} s",
            kdd.train.errors.len() + kdd.test.errors.len(),
            kdd.load_time.as_secs_f64()
        ),
    )
}

fn c2_headline_accuracy(kdd: &Result<Kdd, String>, runs: &mut Vec<TrainedModels>) -> Outcome {
    let kdd = match kdd {
        Ok(k) => k,
        Err(e) => return fail(e.clone()),
    };
    let mut accs = Vec::new();
    let mut slowest = Duration::ZERO;
    for seed in 0..5 {
        let cfg = TrainConfig { seed, ..TrainConfig::default() };
        let start = Instant::now();
        let models = match train(&kdd.train_normals, &cfg) {
            Ok(m) => m,
            Err(e) => return fail(format!("seed {seed}: training failed: {e}")),
        };
        slowest = slowest.max(start.elapsed());
        accs.push(test_accuracy(kdd, &models, cfg.alpha));
        runs.push(models);
    }
    let mut sorted = accs.clone();
    sorted.sort_by(f64::total_cmp);
    let (median, best) = (sorted[2], sorted[4]);
    let within_budget = slowest <= Duration::from_secs(30 * 60);
    check(
        median >= 0.88 && best >= 0.90 && within_budget,
        format!(
            "ACC per seed {:?}, median {median:.4} (>= 0.88), best {best:.4} (>= 0.90), slowest run {:.0} s",
            accs.iter().map(|a| format!("{a:.4}")).collect::<Vec<_>>(),
            slowest.as_secs_f64()
        ),
    )
}

fn c3_metric_consistency() -> Outcome {
    match reconstruct_confusion(0.9139, 0.8994, 0.9556, 9711, 12833) {
        Ok(r) => {
            let Confusion { tp, fp, tn, fn_ } = r.confusion;
            let m = r.recomputed;
            check(
                (m.acc - 0.9139).abs() <= 0.001 && (m.fs - 0.9267).abs() <= 0.0005,
                format!("tp={tp} fp={fp} tn={tn} fn={fn_}; ACC {:.5} (0.9139 ± 0.001), FS {:.5} (0.9267 ± 0.0005)", m.acc, m.fs),
            )
        }
        Err(e) => fail(e.to_string()),
    }
}

fn c4_gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for i in 0..20 {
        let depth = rng.random_range(1..=3);
        let mut dims = vec![rng.random_range(2..=6)];
        let mut acts = Vec::new();
        for _ in 0..depth {
            dims.push(rng.random_range(2..=7));
            acts.push(if rng.random_bool(0.7) { Activation::Sigmoid } else { Activation::Identity });
        }
        let softmax_head = i % 2 == 0;
        dims.push(if softmax_head { 2 } else { rng.random_range(1..=4) });
        acts.push(if softmax_head { Activation::Softmax } else { Activation::Sigmoid });
        let net = DenseNet::<f64>::init(&dims, &acts, rng.random()).unwrap();
        if net.param_count() > 500 {
            return fail(format!("net {i} has {} parameters", net.param_count()));
        }
        let batch = 4;
        let out = *dims.last().unwrap();
        let x: Vec<f64> = (0..batch * dims[0]).map(|_| rng.random_range(-1.0..1.0)).collect();
        let report = if softmax_head {
            let t: Vec<f64> = (0..batch).flat_map(|_| if rng.random_bool(0.5) { [1.0, 0.0] } else { [0.0, 1.0] }).collect();
            check_gradients(&net, &x, batch, |p| cross_entropy(p, &t, batch), 1e-6)
        } else {
            let t: Vec<f64> = (0..batch * out).map(|_| rng.random()).collect();
            check_gradients(&net, &x, batch, |p| mse(p, &t), 1e-6)
        };
        match report {
            Ok(r) => {
                worst = worst.max(r.max_rel_error);
                checked += r.checked;
            }
            Err(e) => return fail(format!("net {i}: {e}")),
        }
    }
    check(worst < 1e-4, format!("20 nets, {checked} entries, max relative error {worst:.2e} (< 1e-4)"))
}

fn c5_synthetic() -> Outcome {
    let (center, spread) = (0.8, 0.03);
    let train_set = clustered_normals(1000, center, spread, 0);
    let cfg = TrainConfig { lr: 1e-4, batch_size: 64, max_epochs: 50, latent_dim: 1, hidden_dim: 64, seed: 0, ..TrainConfig::default() };
    let models = match train(&train_set, &cfg) {
        Ok(m) => m,
        Err(e) => return fail(e.to_string()),
    };
    let mut test = clustered_normals(500, center, spread, 100);
    let uniform = uniform_points(500, 2, center, 3.0 * spread, 200);
    for i in 0..uniform.len() {
        test.push(uniform.row(i), uniform.tag(i));
    }
    let decisions: Vec<Decision> = test
        .rows()
        .map(|r| classify(score(&models.detector, r).unwrap(), cfg.alpha).unwrap().decision)
        .collect();
    let c = tally(&decisions, test.tags()).unwrap();
    let acc = metrics(&c).unwrap().acc;
    check(
        acc > 0.95,
        format!("accuracy {acc:.4} (> 0.95) on 500 held-out cluster + 500 uniform points; tp={} fp={} tn={} fn={}", c.tp, c.fp, c.tn, c.fn_),
    )
}

fn c6_discrimination(kdd: &Result<Kdd, String>, runs: &[TrainedModels]) -> Outcome {
    let kdd = match kdd {
        Ok(k) => k,
        Err(e) => return fail(e.clone()),
    };
    let Some(models) = runs.first() else {
        return fail("no default run available");
    };
    let d = held_out_diagnostics(&models.reconstructor, &models.detector, &kdd.test_normals).unwrap();
    let floor = 0.5 * TrainConfig::default().r_stop_mse;
    let final_mse = models.trace.last().map(|r| r.recon_mse).unwrap_or(f64::NAN);
    check(
        d.mean_score_real > d.mean_score_recon && d.mean_recon_mse >= floor,
        format!(
            "held-out mean A(X) {:.4} vs A(R(X)) {:.4}; held-out recon MSE {:.5} (>= {floor}); final train MSE {final_mse:.5}, freeze epoch {:?}",
            d.mean_score_real,
            d.mean_score_recon,
            d.mean_recon_mse,
            models.trace.freeze_epoch()
        ),
    )
}

fn c7_threshold_rule() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = 0;
    for i in 0..10_000 {
        // every tenth pair is an exact tie
        let alpha: f64 = rng.random_range(1e-9..1.0);
        let p: f64 = if i % 10 == 0 { alpha } else { rng.random_range(0.0..=1.0) };
        let s = AnomalyScore::new(p).unwrap();
        let d = classify(s, alpha).unwrap().decision;
        if (d == Decision::Normal) != (p > alpha) {
            bad += 1;
        }
        let higher = alpha + (1.0 - alpha) * rng.random::<f64>();
        if higher < 1.0 && d == Decision::Anomaly && classify(s, higher).unwrap().decision != Decision::Anomaly {
            bad += 1;
        }
    }
    check(bad == 0, format!("10000 (score, alpha) pairs, {bad} violations of strict > or monotonicity"))
}

fn c8_throughput(kdd: &Result<Kdd, String>, runs: &[TrainedModels]) -> Outcome {
    let (detector, flows, corpus) = match (kdd, runs.first()) {
        (Ok(k), Some(m)) => (
            Detector::new(m.detector.clone(), k.codec.clone(), 0.5).unwrap(),
            k.test.flows.clone(),
            "KDDTest+",
        ),
        _ => {
            let mut g = KddLikeGenerator::new(8);
            let normals = g.training_normals(2000);
            let codec = FeatureCodec::fit(&normals).unwrap();
            let cfg = TrainConfig { max_epochs: 2, ..TrainConfig::default() };
            let m = train(&Dataset::encode(&codec, &normals), &cfg).unwrap();
            let flows = g.mixed(9711, 12833);
            (
                Detector::new(m.detector, codec, 0.5).unwrap(),
                flows,
                "generated NSL-KDD-schema records (dataset unavailable)",
            )
        }
    };
    match bench_latency(&detector, &flows, 3) {
        Ok(r) => {
            let us = r.mean_latency * 1e6;
            check(
                us <= 200.0,
                format!(
                    "{us:.2} µs/flow (std {:.2} µs, <= 200), {:.0} flows/s over {} flows of {corpus}",
                    r.std_latency * 1e6,
                    r.flows_per_second,
                    r.flows
                ),
            )
        }
        Err(e) => fail(e.to_string()),
    }
}

fn c9_determinism() -> Outcome {
    let mut g = KddLikeGenerator::new(9);
    let normals = g.training_normals(2000);
    let codec = FeatureCodec::fit(&normals).unwrap();
    let data = Dataset::encode(&codec, &normals);
    let cfg = TrainConfig { max_epochs: 5, seed: 9, ..TrainConfig::default() };
    let build = || ModelBundle::new(codec.clone(), train(&data, &cfg).unwrap(), cfg.clone()).unwrap();
    let (a, b) = (build(), build());
    let identical = a.to_bytes() == b.to_bytes();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.advb");
    a.save_atomic(&path).unwrap();
    let loaded = ModelBundle::load(&path).unwrap();
    let (before, after) = (a.detector().unwrap(), loaded.detector().unwrap());
    let probe = g.mixed(500, 500);
    let mismatches = probe
        .iter()
        .filter(|f| {
            let (x, y) = (before.verdict(f).unwrap(), after.verdict(f).unwrap());
            x.score.likelihood().to_bits() != y.score.likelihood().to_bits() || x.decision != y.decision
        })
        .count();
    check(
        identical && mismatches == 0,
        format!(
            "same-seed bundles byte-identical: {identical} ({} bytes); round-trip score mismatches on 1000 flows: {mismatches}",
            a.to_bytes().len()
        ),
    )
}

fn main() -> ExitCode {
    let kdd = load_kdd();
    let mut runs = Vec::new();
    let mut results: Vec<(u8, &str, Outcome, Duration)> = Vec::new();
    let mut run = |id: u8, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        println!(
            "[{}] {id} {name}: {} ({:.1} s)",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            took.as_secs_f64()
        );
        results.push((id, name, outcome, took));
    };

    run(1, "dataset protocol", &mut || c1_dataset_protocol(&kdd));
    run(2, "headline accuracy", &mut || c2_headline_accuracy(&kdd, &mut runs));
    run(3, "metric consistency", &mut || {
        let start = Instant::now();
        let o = c3_metric_consistency();
        budget(o, start, 1)
    });
    run(4, "gradient correctness", &mut || {
        let start = Instant::now();
        let o = c4_gradient_check();
        budget(o, start, 60)
    });
    run(5, "synthetic end-to-end", &mut || {
        let start = Instant::now();
        let o = c5_synthetic();
        budget(o, start, 60)
    });
    run(6, "discrimination properties", &mut || c6_discrimination(&kdd, &runs));
    run(7, "threshold rule", &mut || {
        let start = Instant::now();
        let o = c7_threshold_rule();
        budget(o, start, 1)
    });
    run(8, "throughput", &mut || {
        let start = Instant::now();
        let o = c8_throughput(&kdd, &runs);
        budget(o, start, 60)
    });
    run(9, "determinism and persistence", &mut || {
        let start = Instant::now();
        let o = c9_determinism();
        budget(o, start, 60)
    });

    let passed = results.iter().filter(|r| r.2.pass).count();
    let failed: Vec<String> = results.iter().filter(|r| !r.2.pass).map(|r| r.0.to_string()).collect();
    println!(
        "acceptance: {passed}/{} criteria passed{}",
        results.len(),
        if failed.is_empty() { String::new() } else { format!("; failing: {}", failed.join(", ")) }
    );
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if failed.is_empty() || !strict {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn budget(mut o: Outcome, start: Instant, secs: u64) -> Outcome {
    let took = start.elapsed();
    if took > Duration::from_secs(secs) {
        o.pass = false;
        o.detail.push_str(&format!("; over the {secs} s budget"));
    }
    o
}
