use advids_core::nn::gradcheck::check_gradients;
use advids_core::nn::loss::{cross_entropy, mse};
use advids_core::nn::{Activation, AdamConfig, AdamState, DenseLayer, DenseNet, Real};
use proptest::prelude::*;

/// 4-3-2 net whose outputs have closed forms.
///
/// With x = [1, 0, -1, 2] the hidden pre-activations are 0, ln 3 and -ln 4, so
/// h = [1/2, 3/4, 1/5]. The head computes logits [2·h0, 4·h1] = [1, 3] and
/// softmax gives [1/(1+e²), e²/(1+e²)].
fn hand_net<T: Real>() -> DenseNet<T> {
    let t = |v: &[f64]| v.iter().map(|&x| T::of(x)).collect::<Vec<T>>();
    let hidden = DenseLayer::from_parts(
        4,
        3,
        t(&[0.5, 7.0, -0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -(4f64.ln()) / 2.0]),
        t(&[-1.0, 3f64.ln(), 0.0]),
        Activation::Sigmoid,
    );
    let head = DenseLayer::from_parts(3, 2, t(&[2.0, 0.0, 0.0, 0.0, 4.0, 0.0]), t(&[0.0, 0.0]), Activation::Softmax);
    DenseNet::from_layers(vec![hidden, head], 0).unwrap()
}

const X: [f64; 4] = [1.0, 0.0, -1.0, 2.0];
const P_NORMAL: f64 = 0.119_202_922_022_117_57;

#[test]
fn hand_evaluated_forward_f64() {
    let net = hand_net::<f64>();
    let acts = net.forward(&X).unwrap();
    let h = &acts.layers[0];
    for (got, want) in h.iter().zip([0.5, 0.75, 0.2]) {
        assert!((got - want).abs() < 1e-15, "{got} vs {want}");
    }
    let p = acts.output();
    assert!((p[0] - P_NORMAL).abs() < 1e-15);
    assert!((p[1] - (1.0 - P_NORMAL)).abs() < 1e-15);
}

#[test]
fn hand_evaluated_forward_f32() {
    let net = hand_net::<f32>();
    let x: Vec<f32> = X.iter().map(|&v| v as f32).collect();
    let p = net.predict(&x).unwrap();
    assert!((p[0] as f64 - P_NORMAL).abs() < 1e-6);
    assert!((p[1] as f64 - (1.0 - P_NORMAL)).abs() < 1e-6);
}

#[test]
fn hand_evaluated_cross_entropy_gradient() {
    // For softmax + cross-entropy the logit gradient is p - t.
    let net = hand_net::<f64>();
    let acts = net.forward(&X).unwrap();
    let (loss, g) = cross_entropy(acts.output(), &[1.0, 0.0], 1).unwrap();
    assert!((loss + P_NORMAL.ln()).abs() < 1e-12);
    let grads = net.backward(&X, &acts, &g, false).unwrap();
    let db = &grads.layers[1].biases;
    assert!((db[0] - (P_NORMAL - 1.0)).abs() < 1e-12);
    assert!((db[1] - (1.0 - P_NORMAL)).abs() < 1e-12);
}

fn smooth_net() -> impl Strategy<Value = (Vec<usize>, Vec<Activation>, u64, bool)> {
    (prop::collection::vec(1usize..7, 1..4), 2usize..6, any::<u64>(), any::<bool>()).prop_flat_map(
        |(hidden, input, seed, softmax_head)| {
            let n = hidden.len();
            let acts = prop::collection::vec(prop_oneof![Just(Activation::Sigmoid), Just(Activation::Identity)], n);
            (Just(hidden), Just(input), acts, Just(seed), Just(softmax_head))
        },
    )
    .prop_map(|(hidden, input, mut acts, seed, softmax_head)| {
        let mut dims = vec![input];
        dims.extend(hidden);
        let out = if softmax_head { 2 } else { 3 };
        dims.push(out);
        acts.push(if softmax_head { Activation::Softmax } else { Activation::Sigmoid });
        (dims, acts, seed, softmax_head)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn backprop_matches_finite_differences((dims, acts, seed, softmax_head) in smooth_net()) {
        let net = DenseNet::<f64>::init(&dims, &acts, seed).unwrap();
        prop_assume!(net.param_count() <= 500);
        let batch = 3;
        let inputs: Vec<f64> = (0..batch * dims[0]).map(|i| ((i * 37 + seed as usize % 11) % 17) as f64 / 8.0 - 1.0).collect();
        let out = *dims.last().unwrap();
        let report = if softmax_head {
            let target: Vec<f64> = (0..batch).flat_map(|r| if r % 2 == 0 { [1.0, 0.0] } else { [0.0, 1.0] }).collect();
            check_gradients(&net, &inputs, batch, |p| cross_entropy(p, &target, batch), 1e-6).unwrap()
        } else {
            let target: Vec<f64> = (0..batch * out).map(|i| (i % 5) as f64 / 4.0).collect();
            check_gradients(&net, &inputs, batch, |p| mse(p, &target), 1e-6).unwrap()
        };
        prop_assert!(report.max_rel_error < 1e-4, "{:?}", report);
        prop_assert_eq!(report.checked, net.param_count() + inputs.len());
    }

    #[test]
    fn softmax_rows_sum_to_one(seed in any::<u64>(), xs in prop::collection::vec(-50.0f64..50.0, 5)) {
        let net = DenseNet::<f64>::init(&[5, 4, 3], &[Activation::Identity, Activation::Softmax], seed).unwrap();
        let p = net.predict(&xs).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(p.iter().all(|&v| v > 0.0), "{:?}", p);
    }

    #[test]
    fn forward_is_pure(seed in any::<u64>(), xs in prop::collection::vec(0.0f32..1.0, 6)) {
        let net = DenseNet::<f32>::init(&[6, 5, 2], &[Activation::Sigmoid, Activation::Softmax], seed).unwrap();
        let a = net.predict(&xs).unwrap();
        let b = net.predict(&xs).unwrap();
        prop_assert_eq!(a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}

#[test]
fn adam_descends_a_regression_problem() {
    let mut net = DenseNet::<f32>::init(&[2, 8, 1], &[Activation::Sigmoid, Activation::Identity], 4).unwrap();
    let mut opt = AdamState::new(&net, AdamConfig { lr: 0.01, ..AdamConfig::default() }).unwrap();
    let xs: Vec<f32> = (0..32).flat_map(|i| [(i % 8) as f32 / 8.0, (i / 8) as f32 / 4.0]).collect();
    let ys: Vec<f32> = xs.chunks(2).map(|p| p[0] - p[1]).collect();
    let loss = |net: &DenseNet<f32>| mse(net.forward_batch(&xs, 32).unwrap().output(), &ys).unwrap().0;
    let before = loss(&net);
    for _ in 0..300 {
        let acts = net.forward_batch(&xs, 32).unwrap();
        let (_, g) = mse(acts.output(), &ys).unwrap();
        let grads = net.backward(&xs, &acts, &g, false).unwrap();
        opt.step(&mut net, &grads).unwrap();
    }
    assert!(loss(&net) < before / 10.0, "{} -> {}", before, loss(&net));
}
