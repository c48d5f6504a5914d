//! Engines against the test-side oracles on random inputs.

mod common;

use common::*;
use netbell_core::bell;
use netbell_core::sampling::born_distribution;
use netbell_core::{synth, PauliString, StateVector};
use proptest::prelude::*;

fn pauli(max: usize) -> impl Strategy<Value = String> {
    (1..=max).prop_flat_map(|n| {
        (prop::sample::select(vec!["", "-", "i", "-i"]), prop::collection::vec(prop::sample::select(vec!['I', 'X', 'Y', 'Z']), n))
            .prop_map(|(p, l)| format!("{p}{}", l.into_iter().collect::<String>()))
    })
}

fn pair(max: usize) -> impl Strategy<Value = (String, String)> {
    pauli(max).prop_flat_map(|a| {
        let n = parse(&a).1.len();
        let b = prop::collection::vec(prop::sample::select(vec!['I', 'X', 'Y', 'Z']), n)
            .prop_map(|l| l.into_iter().collect::<String>());
        (Just(a), b)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn products_match_dense((a, b) in pair(4)) {
        let (pa, pb): (PauliString, PauliString) = (a.parse().unwrap(), b.parse().unwrap());
        let prod = pa.multiply(&pb).unwrap();
        prop_assert_eq!(dense(&prod.to_string()), matmul(&dense(&a), &dense(&b)));
        let ab = matmul(&dense(&a), &dense(&b));
        let ba = matmul(&dense(&b), &dense(&a));
        prop_assert_eq!(pa.commutes(&pb).unwrap(), ab == ba);
    }

    #[test]
    fn expectations_match_direct_application(p in pauli(5), seed in 0u64..1000) {
        let n = parse(&p).1.len();
        let mut x = seed;
        let amps: Vec<C> = (0..1 << n).map(|_| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            C::new((x >> 40) as f64 / 16777216.0 - 0.5, (x >> 16 & 0xffffff) as f64 / 16777216.0 - 0.5)
        }).collect();
        let psi = normalize(amps);
        let state = StateVector::from_amplitudes(psi.clone()).unwrap();
        let op: PauliString = p.parse().unwrap();
        let got = state.expectation_complex(&op).unwrap();
        let want = inner(&psi, &apply(&p, &psi));
        prop_assert!((got - want).norm() < 1e-12);
    }
}

#[test]
fn random_networks_match_direct_evaluation() {
    let mut checked = 0;
    for seed in 0..5000u64 {
        let net = random_network(seed);
        if !strict_parity(&net) {
            continue;
        }
        let t = 0.1 + (seed % 14) as f64 * 0.1;
        let thetas: Vec<f64> = (0..net.layout.k()).map(|s| t + 0.01 * s as f64).collect();
        let obs = synth::build(&net, &thetas).unwrap();
        let r = bell::evaluate(&net, &obs).unwrap();
        let (i, j) = exact_i_j(&net, &global_state(&net), &thetas);
        assert!((r.i - i).abs() < 1e-9 && (r.j - j).abs() < 1e-9, "seed {seed}");
        checked += 1;
    }
    assert!(checked >= 100, "{checked}");
}

#[test]
fn born_probabilities_match_projectors() {
    let net = netbell_core::Scenario::builtin("chsh", Default::default()).unwrap().resolve_checked().unwrap();
    let obs = synth::build_uniform(&net, 0.6).unwrap();
    let psi = global_state(&net);
    for (x, y) in [(0u8, 0u8), (1, 1)] {
        let dist = born_distribution(&net.global_state().unwrap(), &obs, &[x], &[y]).unwrap();
        // P(a, b) = ⟨(1 + aA)(1 + bB)⟩/4 with commuting A and B.
        let a = obs.sources[0].a(x);
        let b = obs.receivers[0].b(y).to_string();
        let a_psi = a.terms().iter().fold(vec![c(0.0); psi.len()], |acc, (w, p)| add(&acc, &apply(&p.to_string(), &psi), *w));
        let ea = inner(&psi, &a_psi).re;
        let eb = expect(&b, &psi);
        let eab = inner(&psi, &apply(&b, &a_psi)).re;
        for (idx, (sa, sb)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].into_iter().enumerate() {
            let p = (1.0 + sa * ea + sb * eb + sa * sb * eab) / 4.0;
            assert!((dist[idx] - p).abs() < 1e-12, "x={x} y={y} idx={idx}");
        }
    }
}

#[test]
fn ghz_split_observables() {
    let net = netbell_core::Scenario::builtin("ghz-split(5,2)", Default::default()).unwrap().resolve_checked().unwrap();
    let obs = synth::build_uniform(&net, 0.4).unwrap();
    assert_eq!(obs.sources[0].s_hat.to_string(), "+ZIIII");
    assert_eq!(obs.sources[0].t_hat.to_string(), "+XXIII");
    assert_eq!(obs.receivers[0].b0.to_string(), "+IIZII");
    assert_eq!(obs.receivers[0].b1.to_string(), "+IIXXX");
    let r = bell::maximize(&net, 91).unwrap();
    let phi = std::f64::consts::FRAC_PI_8;
    assert!((r.value - (1.0 + (2.0 * phi).sin().powi(2)).sqrt()).abs() < 1e-9);
}
