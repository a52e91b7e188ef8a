use std::io::Cursor;

use advids_core::detect::{classify, AnomalyScore, Decision, Detector};
use advids_core::flow::FeatureCodec;
use advids_core::synth::{to_csv, KddLikeGenerator};
use advids_core::train::{build_detector, TrainConfig};
use proptest::prelude::*;

fn decide(p: f64, alpha: f64) -> Decision {
    classify(AnomalyScore::new(p).unwrap(), alpha).unwrap().decision
}

#[test]
fn boundary_cases() {
    assert_eq!(decide(0.7, 0.5), Decision::Normal);
    assert_eq!(decide(0.5, 0.5), Decision::Anomaly);
    for alpha in [1e-9, 0.1, 0.5, 0.99, 1.0 - 1e-9] {
        assert_eq!(decide(0.0, alpha), Decision::Anomaly);
    }
    assert!(classify(AnomalyScore::new(0.5).unwrap(), 1.0).is_err());
    assert!(classify(AnomalyScore::new(0.5).unwrap(), 0.0).is_err());
    assert!(AnomalyScore::new(1.01).is_err());
    assert!(AnomalyScore::new(f64::NAN).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn normal_iff_strictly_above(p in 0.0f64..=1.0, alpha in 1e-12f64..1.0) {
        let v = classify(AnomalyScore::new(p).unwrap(), alpha).unwrap();
        prop_assert_eq!(v.decision == Decision::Normal, p > alpha);
        prop_assert_eq!(v.threshold_used, alpha);
    }

    #[test]
    fn raising_alpha_never_clears_an_anomaly(p in 0.0f64..=1.0, a in 1e-12f64..1.0, b in 1e-12f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if decide(p, lo) == Decision::Anomaly {
            prop_assert_eq!(decide(p, hi), Decision::Anomaly);
        }
    }
}

#[test]
fn stream_preserves_order_and_is_pure() {
    let mut g = KddLikeGenerator::new(2);
    let normals = g.training_normals(200);
    let codec = FeatureCodec::fit(&normals).unwrap();
    let net = build_detector(codec.output_dim(), &TrainConfig::default()).unwrap();
    let det = Detector::new(net, codec, 0.5).unwrap();

    let one = g.attack();
    let csv = to_csv(&vec![one.clone(); 25]);
    let items: Vec<_> = det.classify_stream(Cursor::new(csv)).collect();
    assert_eq!(items.len(), 25);
    let first = *items[0].outcome.as_ref().unwrap();
    for (i, item) in items.iter().enumerate() {
        assert_eq!(item.seq, i + 1);
        assert_eq!(item.outcome.as_ref().unwrap(), &first);
    }
    assert_eq!(det.verdict(&one).unwrap(), first);

    assert_eq!(det.classify_stream(Cursor::new("")).count(), 0);
}
