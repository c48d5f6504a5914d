use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use netbell_bench::network;
use netbell_core::bell;
use netbell_core::classical::{max_deterministic, ClassicalConfig, NetworkShape};
use netbell_core::sampling::{run, RunConfig, SamplingMode};
use netbell_core::{synth, PauliLetter, PauliString, Phase, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

fn random_pauli(rng: &mut ChaCha8Rng, n: usize) -> PauliString {
    const ALL: [PauliLetter; 4] = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
    PauliString::new(Phase::ONE, (0..n).map(|_| ALL[rng.gen_range(0..4)]).collect()).unwrap()
}

fn pauli(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut group = c.benchmark_group("pauli_multiply");
    for n in [5, 15, 64] {
        let (a, b) = (random_pauli(&mut rng, n), random_pauli(&mut rng, n));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| black_box(&a).multiply(black_box(&b)).unwrap())
        });
    }
    group.finish();
}

fn expectation(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut group = c.benchmark_group("expectation");
    for n in [10, 15] {
        let state = StateVector::plus(n).unwrap();
        let p = random_pauli(&mut rng, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| state.expectation(black_box(&p)).unwrap())
        });
    }
    group.finish();
}

fn evaluate(c: &mut Criterion) {
    let net = network("example-a", FRAC_PI_4);
    let obs = synth::build_uniform(&net, FRAC_PI_4).unwrap();
    c.bench_function("evaluate_example_a", |b| b.iter(|| bell::evaluate(&net, &obs).unwrap()));
    let star = network("star(3)", FRAC_PI_8);
    c.bench_function("tilted_star_3", |b| {
        b.iter(|| bell::maximize_tilted(&star, &[0, 1, 2], FRAC_PI_8, None).unwrap())
    });
}

fn classical(c: &mut Criterion) {
    let shape = NetworkShape::bilocal();
    let mut group = c.benchmark_group("classical_bilocal");
    group.sample_size(10);
    for analytic in [true, false] {
        let config = ClassicalConfig { alphabet: Some(2), optimize_last_receiver: analytic, ..Default::default() };
        group.bench_with_input(BenchmarkId::new("analytic_receiver", analytic), &config, |b, cfg| {
            b.iter(|| max_deterministic(&shape, cfg).unwrap())
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let net = network("example-a", FRAC_PI_4);
    let obs = synth::build_uniform(&net, FRAC_PI_4).unwrap();
    let mut group = c.benchmark_group("sample_10k_rounds");
    group.sample_size(10);
    for mode in [SamplingMode::DirectObservable, SamplingMode::PerQubitDiscard] {
        let config = RunConfig::new(10_000, 7, mode);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &config, |b, cfg| {
            b.iter(|| run(&net, &obs, None, cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, pauli, expectation, evaluate, classical, sampling);
criterion_main!(benches);
