//! Classical side of the network test: hidden-variable strategies where every
//! source sends an independent `λᵢ` and each agent answers from the `λ`s it
//! can see.
//!
//! The deterministic search enumerates every response table under uniform
//! `λ` distributions. Under [`ClassicalConfig::optimize_last_receiver`] the
//! last receiver's table is not enumerated but chosen optimally in closed
//! form, which is exact for the untilted objective because its `y = 0` row
//! only enters `I` and its `y = 1` row only enters `J`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::NetworkLayout;
use crate::report::Check;

/// Default cap on the number of enumerated strategies.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Alphabet sizes tried, largest first, when none is given.
pub const DEFAULT_ALPHABETS: [usize; 3] = [4, 3, 2];

const BOUND_TOL: f64 = 1e-12;
const STOCHASTIC_TOL: f64 = 1e-9;

/// Who can see which source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkShape {
    pub k: usize,
    pub m: usize,
    /// Source agent holding each source.
    pub holder: Vec<usize>,
    /// `reach[m][i]`: receiver `m` holds a qubit of source `i`.
    pub reach: Vec<Vec<bool>>,
}

impl NetworkShape {
    pub fn new(k: usize, m: usize, holder: Vec<usize>, reach: Vec<Vec<bool>>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidStrategy(msg));
        let n = holder.len();
        if k == 0 || n == 0 {
            return bad("need at least one source agent and one source".into());
        }
        if holder.iter().any(|&h| h >= k) {
            return bad(format!("holder index out of range in {holder:?}"));
        }
        if (0..k).any(|s| !holder.contains(&s)) {
            return bad(format!("every source agent must hold a source, got {holder:?}"));
        }
        if reach.len() != m || reach.iter().any(|r| r.len() != n) {
            return bad(format!("reach must be {m} × {n}"));
        }
        if reach.iter().any(|r| !r.contains(&true)) {
            return bad("every receiver must reach a source".into());
        }
        Ok(NetworkShape { k, m, holder, reach })
    }

    pub fn from_layout(layout: &NetworkLayout) -> Result<Self> {
        let holder = (0..layout.num_sources()).map(|i| layout.holder(i)).collect();
        NetworkShape::new(layout.k(), layout.m(), holder, layout.receiver_reach())
    }

    /// Two sources, two source agents, one receiver seeing both.
    pub fn bilocal() -> Self {
        NetworkShape::new(2, 1, vec![0, 1], vec![vec![true, true]]).expect("valid shape")
    }

    /// One source shared by one source agent and one receiver.
    pub fn two_party() -> Self {
        NetworkShape::new(1, 1, vec![0], vec![vec![true]]).expect("valid shape")
    }

    /// `n` sources, one per source agent, one receiver seeing all.
    pub fn star(n: usize) -> Result<Self> {
        NetworkShape::new(n, 1, (0..n).collect(), vec![vec![true; n]])
    }

    pub fn num_sources(&self) -> usize {
        self.holder.len()
    }

    /// Sources read by each table: source agents first, then receivers.
    fn table_inputs(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> =
            (0..self.k).map(|s| (0..self.num_sources()).filter(|&i| self.holder[i] == s).collect()).collect();
        out.extend(self.reach.iter().map(|r| (0..r.len()).filter(|&i| r[i]).collect()));
        out
    }
}

/// `outputs[x · L_local + λ_local]`, `λ_local` mixed radix over `inputs`
/// with the first input most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseTable {
    pub inputs: Vec<usize>,
    pub outputs: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenStrategy {
    pub alphabets: Vec<usize>,
    pub distributions: Vec<Vec<f64>>,
    pub sources: Vec<ResponseTable>,
    pub receivers: Vec<ResponseTable>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlators {
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "J")]
    pub j: f64,
    /// `⟨∏ b_m(0, λ)⟩`, the classical counterpart of the tilt operator.
    #[serde(rename = "P")]
    pub p: f64,
}

impl Correlators {
    pub fn value(&self, k: usize) -> f64 {
        crate::bell::bell_value(self.i, self.j, k)
    }

    /// `β|P|^{1/K} + |I|^{1/K} + |J|^{1/K}`, or the plain value without `β`.
    pub fn objective(&self, k: usize, beta: Option<f64>) -> f64 {
        let tilt = beta.map_or(0.0, |b| b * self.p.abs().powf(1.0 / k as f64));
        tilt + self.value(k)
    }
}

fn local_index(inputs: &[usize], lambda: &[usize], alphabets: &[usize]) -> usize {
    inputs.iter().fold(0, |acc, &i| acc * alphabets[i] + lambda[i])
}

fn local_size(inputs: &[usize], alphabets: &[usize]) -> usize {
    inputs.iter().map(|&i| alphabets[i]).product()
}

/// Calls `f(λ, weight)` for every joint hidden value.
fn for_each_lambda(alphabets: &[usize], distributions: &[Vec<f64>], mut f: impl FnMut(&[usize], f64)) {
    let n = alphabets.len();
    let mut lambda = vec![0; n];
    loop {
        let w: f64 = lambda.iter().enumerate().map(|(i, &l)| distributions[i][l]).product();
        f(&lambda, w);
        let mut pos = n;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            lambda[pos] += 1;
            if lambda[pos] < alphabets[pos] {
                break;
            }
            lambda[pos] = 0;
        }
    }
}

impl HiddenStrategy {
    pub fn k(&self) -> usize {
        self.sources.len()
    }

    /// Checks table shapes and distribution normalization against `shape`.
    pub fn validate(&self, shape: &NetworkShape) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidStrategy(msg));
        let n = shape.num_sources();
        if self.alphabets.len() != n || self.distributions.len() != n {
            return bad(format!("expected {n} alphabets and distributions"));
        }
        for (i, (d, &l)) in self.distributions.iter().zip(&self.alphabets).enumerate() {
            if l == 0 || d.len() != l {
                return bad(format!("source {} distribution has {} entries for alphabet {l}", i + 1, d.len()));
            }
            if d.iter().any(|&p| p < 0.0) || (d.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return bad(format!("source {} distribution not normalized", i + 1));
            }
        }
        if self.sources.len() != shape.k || self.receivers.len() != shape.m {
            return bad(format!("expected {} source tables and {} receiver tables", shape.k, shape.m));
        }
        let expected = shape.table_inputs();
        for (t, (table, inputs)) in self.sources.iter().chain(&self.receivers).zip(&expected).enumerate() {
            if &table.inputs != inputs {
                return bad(format!("table {t} reads {:?}, shape allows {inputs:?}", table.inputs));
            }
            let len = 2 * local_size(inputs, &self.alphabets);
            if table.outputs.len() != len || table.outputs.iter().any(|&o| o != 1 && o != -1) {
                return bad(format!("table {t} needs {len} outputs in {{-1, +1}}"));
            }
        }
        Ok(())
    }

    /// Exact `I`, `J`, `P` by summing over the product distribution of `λ`.
    pub fn correlators(&self) -> Correlators {
        let (mut i_acc, mut j_acc, mut p_acc) = (0.0, 0.0, 0.0);
        for_each_lambda(&self.alphabets, &self.distributions, |lambda, w| {
            if w == 0.0 {
                return;
            }
            let (mut plus, mut minus) = (1.0, 1.0);
            for t in &self.sources {
                let u = local_index(&t.inputs, lambda, &self.alphabets);
                let size = local_size(&t.inputs, &self.alphabets);
                let (a0, a1) = (t.outputs[u] as f64, t.outputs[size + u] as f64);
                plus *= (a0 + a1) / 2.0;
                minus *= (a0 - a1) / 2.0;
            }
            let (mut b0, mut b1) = (1.0, 1.0);
            for t in &self.receivers {
                let u = local_index(&t.inputs, lambda, &self.alphabets);
                let size = local_size(&t.inputs, &self.alphabets);
                b0 *= t.outputs[u] as f64;
                b1 *= t.outputs[size + u] as f64;
            }
            i_acc += w * plus * b0;
            j_acc += w * minus * b1;
            p_acc += w * b0;
        });
        Correlators { i: i_acc, j: j_acc, p: p_acc }
    }

    /// `(∏ p_s)^{1/K} + (∏ (1 − p_s))^{1/K}` with `p_s = E|a_s(0) + a_s(1)|/2`:
    /// the per-strategy bound on the value from the factorized chain.
    pub fn chain_bound(&self) -> f64 {
        let k = self.k();
        let mut p = vec![0.0; k];
        for_each_lambda(&self.alphabets, &self.distributions, |lambda, w| {
            for (s, t) in self.sources.iter().enumerate() {
                let u = local_index(&t.inputs, lambda, &self.alphabets);
                let size = local_size(&t.inputs, &self.alphabets);
                if t.outputs[u] == t.outputs[size + u] {
                    p[s] += w;
                }
            }
        });
        let r = 1.0 / k as f64;
        p.iter().product::<f64>().powf(r) + p.iter().map(|x| 1.0 - x).product::<f64>().max(0.0).powf(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalConfig {
    /// Common alphabet size; `None` picks the largest of [`DEFAULT_ALPHABETS`]
    /// within budget.
    pub alphabet: Option<usize>,
    pub budget: u128,
    /// Tilt weight; `Some` switches to the tilted objective.
    pub beta: Option<f64>,
    pub optimize_last_receiver: bool,
    pub restarts: usize,
    pub steps: usize,
    pub seed: u64,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        ClassicalConfig {
            alphabet: None,
            budget: DEFAULT_BUDGET,
            beta: None,
            optimize_last_receiver: true,
            restarts: 32,
            steps: 200,
            seed: 0,
        }
    }
}

/// Precomputed indexing for bitmask-encoded strategies.
struct Plan {
    k: usize,
    inputs: Vec<Vec<usize>>,
    sizes: Vec<usize>,
    offsets: Vec<u32>,
    /// Tables whose bits are enumerated (all, or all but the last receiver).
    enumerated: usize,
    bits: u32,
    weight: f64,
    /// `|Λ| × tables` local indices.
    locals: Vec<usize>,
    n_lambda: usize,
    alphabets: Vec<usize>,
}

impl Plan {
    fn new(shape: &NetworkShape, alphabet: usize, analytic: bool) -> Plan {
        let n = shape.num_sources();
        let alphabets = vec![alphabet; n];
        let inputs = shape.table_inputs();
        let sizes: Vec<usize> = inputs.iter().map(|i| local_size(i, &alphabets)).collect();
        let enumerated = if analytic { inputs.len() - 1 } else { inputs.len() };
        let mut offsets = Vec::new();
        let mut bits = 0u32;
        for &s in &sizes[..enumerated] {
            offsets.push(bits);
            bits = bits.saturating_add(2 * s as u32);
        }
        let n_lambda = alphabets.iter().product();
        let uniform = vec![vec![1.0 / alphabet as f64; alphabet]; n];
        let mut locals = Vec::with_capacity(n_lambda * inputs.len());
        for_each_lambda(&alphabets, &uniform, |lambda, _| {
            locals.extend(inputs.iter().map(|inp| local_index(inp, lambda, &alphabets)));
        });
        Plan {
            k: shape.k,
            inputs,
            sizes,
            offsets,
            enumerated,
            bits,
            weight: 1.0 / n_lambda as f64,
            locals,
            n_lambda,
            alphabets,
        }
    }

    fn count(&self) -> u128 {
        if self.bits >= 127 {
            u128::MAX
        } else {
            1u128 << self.bits
        }
    }

    fn table_bits(&self, index: u64, t: usize) -> u64 {
        let width = 2 * self.sizes[t] as u32;
        (index >> self.offsets[t]) & ((1u64 << width) - 1)
    }

    fn out(bits: u64, pos: usize) -> f64 {
        if (bits >> pos) & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// Correlators for strategy `index`; with an analytic last receiver,
    /// `w0`/`w1` receive its per-input weights and `I`, `J` are maximized.
    fn eval(&self, index: u64, w0: &mut [f64], w1: &mut [f64]) -> Correlators {
        let tables = self.inputs.len();
        let tb: Vec<u64> = (0..self.enumerated).map(|t| self.table_bits(index, t)).collect();
        let analytic = self.enumerated < tables;
        w0.iter_mut().for_each(|w| *w = 0.0);
        w1.iter_mut().for_each(|w| *w = 0.0);
        let (mut i_acc, mut j_acc, mut p_acc) = (0.0, 0.0, 0.0);
        for l in 0..self.n_lambda {
            let loc = &self.locals[l * tables..(l + 1) * tables];
            let (mut plus, mut minus) = (1.0, 1.0);
            for s in 0..self.k {
                let a0 = Plan::out(tb[s], loc[s]);
                let a1 = Plan::out(tb[s], self.sizes[s] + loc[s]);
                plus *= (a0 + a1) / 2.0;
                minus *= (a0 - a1) / 2.0;
            }
            let (mut b0, mut b1) = (1.0, 1.0);
            for t in self.k..self.enumerated {
                b0 *= Plan::out(tb[t], loc[t]);
                b1 *= Plan::out(tb[t], self.sizes[t] + loc[t]);
            }
            if analytic {
                let u = loc[tables - 1];
                w0[u] += self.weight * plus * b0;
                w1[u] += self.weight * minus * b1;
            } else {
                i_acc += self.weight * plus * b0;
                j_acc += self.weight * minus * b1;
                p_acc += self.weight * b0;
            }
        }
        if analytic {
            i_acc = w0.iter().map(|w| w.abs()).sum();
            j_acc = w1.iter().map(|w| w.abs()).sum();
            p_acc = f64::NAN;
        }
        Correlators { i: i_acc, j: j_acc, p: p_acc }
    }

    fn strategy(&self, index: u64, w0: &[f64], w1: &[f64]) -> HiddenStrategy {
        let tables = self.inputs.len();
        let mut all: Vec<ResponseTable> = (0..tables)
            .map(|t| {
                let outputs = if t < self.enumerated {
                    let bits = self.table_bits(index, t);
                    (0..2 * self.sizes[t]).map(|p| Plan::out(bits, p) as i8).collect()
                } else {
                    let sign = |w: f64| if w < 0.0 { -1 } else { 1 };
                    w0.iter().map(|&w| sign(w)).chain(w1.iter().map(|&w| sign(w))).collect()
                };
                ResponseTable { inputs: self.inputs[t].clone(), outputs }
            })
            .collect();
        let receivers = all.split_off(self.k);
        HiddenStrategy {
            alphabets: self.alphabets.clone(),
            distributions: self.alphabets.iter().map(|&l| vec![1.0 / l as f64; l]).collect(),
            sources: all,
            receivers,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterministicResult {
    pub alphabet: usize,
    pub strategies: u128,
    pub max_value: f64,
    pub argmax: HiddenStrategy,
    pub argmax_correlators: Correlators,
    /// Largest per-strategy chain bound seen.
    pub max_chain_bound: f64,
    /// Every strategy satisfied `value ≤ chain bound ≤ 1`.
    pub chain_holds: bool,
}

fn choose_alphabet(shape: &NetworkShape, config: &ClassicalConfig, analytic: bool) -> Result<(usize, Plan)> {
    let candidates: Vec<usize> = match config.alphabet {
        Some(0) => return Err(Error::InvalidStrategy("alphabet size must be positive".into())),
        Some(l) => vec![l],
        None => DEFAULT_ALPHABETS.to_vec(),
    };
    let mut last = 0;
    for l in candidates {
        let plan = Plan::new(shape, l, analytic);
        let count = plan.count();
        if count <= config.budget && plan.bits < 64 {
            return Ok((l, plan));
        }
        last = count;
    }
    Err(Error::BudgetExceeded { count: last, budget: config.budget })
}

/// Exhaustive maximum of the (optionally tilted) objective over response
/// tables with uniform hidden values.
pub fn max_deterministic(shape: &NetworkShape, config: &ClassicalConfig) -> Result<DeterministicResult> {
    if let Some(b) = config.beta {
        if b < 0.0 {
            return Err(Error::NegativeBeta(b));
        }
    }
    let analytic = config.optimize_last_receiver && config.beta.is_none() && shape.m > 0;
    let (alphabet, plan) = choose_alphabet(shape, config, analytic)?;
    let count = plan.count() as u64;
    let k = shape.k;
    let last = plan.sizes[plan.sizes.len() - 1];
    let (best_value, best_index, max_chain, chain_ok) = (0..count)
        .into_par_iter()
        .map_init(
            || (vec![0.0; last], vec![0.0; last]),
            |(w0, w1), idx| {
                let c = plan.eval(idx, w0, w1);
                let value = c.objective(k, config.beta);
                let chain = chain_bound_bits(&plan, idx);
                let ok = c.value(k) <= chain + BOUND_TOL && chain <= 1.0 + BOUND_TOL;
                (value, idx, chain, ok)
            },
        )
        .reduce(
            || (f64::NEG_INFINITY, u64::MAX, f64::NEG_INFINITY, true),
            |a, b| {
                let better = b.0 > a.0 || (b.0 == a.0 && b.1 < a.1);
                let (v, i) = if better { (b.0, b.1) } else { (a.0, a.1) };
                (v, i, a.2.max(b.2), a.3 && b.3)
            },
        );
    let (mut w0, mut w1) = (vec![0.0; last], vec![0.0; last]);
    plan.eval(best_index, &mut w0, &mut w1);
    let argmax = plan.strategy(best_index, &w0, &w1);
    let argmax_correlators = argmax.correlators();
    Ok(DeterministicResult {
        alphabet,
        strategies: plan.count(),
        max_value: best_value,
        argmax,
        argmax_correlators,
        max_chain_bound: max_chain,
        chain_holds: chain_ok,
    })
}

fn chain_bound_bits(plan: &Plan, index: u64) -> f64 {
    let tables = plan.inputs.len();
    let mut p = vec![0.0; plan.k];
    for l in 0..plan.n_lambda {
        let loc = &plan.locals[l * tables..(l + 1) * tables];
        for (s, ps) in p.iter_mut().enumerate() {
            let bits = plan.table_bits(index, s);
            if Plan::out(bits, loc[s]) == Plan::out(bits, plan.sizes[s] + loc[s]) {
                *ps += plan.weight;
            }
        }
    }
    let r = 1.0 / plan.k as f64;
    p.iter().product::<f64>().powf(r) + p.iter().map(|x| 1.0 - x).product::<f64>().max(0.0).powf(r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StochasticResult {
    pub restarts: usize,
    pub steps: usize,
    pub seed: u64,
    pub max_value: f64,
    pub best: HiddenStrategy,
}

fn random_strategy(shape: &NetworkShape, alphabet: usize, rng: &mut ChaCha8Rng) -> HiddenStrategy {
    let alphabets = vec![alphabet; shape.num_sources()];
    let distributions = alphabets.iter().map(|&l| random_distribution(l, rng)).collect();
    let mut tables: Vec<ResponseTable> = shape
        .table_inputs()
        .into_iter()
        .map(|inputs| {
            let len = 2 * local_size(&inputs, &alphabets);
            let outputs = (0..len).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
            ResponseTable { inputs, outputs }
        })
        .collect();
    let receivers = tables.split_off(shape.k);
    HiddenStrategy { alphabets, distributions, sources: tables, receivers }
}

fn random_distribution(l: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..l).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Random product distributions and tables, hill-climbed by single output
/// flips and distribution perturbations. Deterministic given the seed.
pub fn stochastic_search(shape: &NetworkShape, alphabet: usize, config: &ClassicalConfig) -> StochasticResult {
    let k = shape.k;
    let results: Vec<(f64, HiddenStrategy)> = (0..config.restarts.max(1))
        .into_par_iter()
        .map(|restart| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(restart as u64);
            let mut cur = random_strategy(shape, alphabet, &mut rng);
            let mut cur_v = cur.correlators().objective(k, config.beta);
            for _ in 0..config.steps {
                let mut next = cur.clone();
                if rng.gen::<f64>() < 0.5 {
                    let n_tables = next.sources.len() + next.receivers.len();
                    let t = rng.gen_range(0..n_tables);
                    let table = if t < next.sources.len() {
                        &mut next.sources[t]
                    } else {
                        &mut next.receivers[t - k]
                    };
                    let pos = rng.gen_range(0..table.outputs.len());
                    table.outputs[pos] = -table.outputs[pos];
                } else {
                    let i = rng.gen_range(0..next.distributions.len());
                    let d = &mut next.distributions[i];
                    for p in d.iter_mut() {
                        *p *= rng.gen_range(0.5..1.5);
                    }
                    let total: f64 = d.iter().sum();
                    d.iter_mut().for_each(|p| *p /= total);
                }
                let v = next.correlators().objective(k, config.beta);
                if v >= cur_v {
                    cur = next;
                    cur_v = v;
                }
            }
            (cur_v, cur)
        })
        .collect();
    let (max_value, best) = results
        .into_iter()
        .fold(None, |acc: Option<(f64, HiddenStrategy)>, r| match acc {
            Some(a) if a.0 >= r.0 => Some(a),
            _ => Some(r),
        })
        .expect("at least one restart");
    StochasticResult { restarts: config.restarts.max(1), steps: config.steps, seed: config.seed, max_value, best }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalReport {
    pub shape: NetworkShape,
    pub beta: Option<f64>,
    pub bound: f64,
    pub deterministic: DeterministicResult,
    pub stochastic: StochasticResult,
    pub checks: Vec<Check>,
}

impl ClassicalReport {
    pub fn passed(&self) -> bool {
        crate::report::all_passed(&self.checks)
    }
}

/// Deterministic maximum ≤ bound, stochastic maximum ≤ deterministic one,
/// and the per-strategy chain; any failure carries the offending strategy.
pub fn verify_bound(shape: &NetworkShape, config: &ClassicalConfig) -> Result<ClassicalReport> {
    let det = max_deterministic(shape, config)?;
    let sto = stochastic_search(shape, det.alphabet, config);
    let bound = 1.0 + config.beta.unwrap_or(0.0);
    let dump = |s: &HiddenStrategy| serde_json::to_string(s).unwrap_or_default();
    if det.max_value > bound + BOUND_TOL {
        return Err(Error::BoundViolated(format!(
            "deterministic value {} exceeds {bound}: {}",
            det.max_value,
            dump(&det.argmax)
        )));
    }
    if !det.chain_holds {
        return Err(Error::BoundViolated("a strategy exceeded its factorized chain bound".into()));
    }
    if sto.max_value > det.max_value + STOCHASTIC_TOL {
        return Err(Error::BoundViolated(format!(
            "stochastic value {} exceeds deterministic maximum {}: {}",
            sto.max_value,
            det.max_value,
            dump(&sto.best)
        )));
    }
    let checks = vec![
        Check::from_bool(
            "deterministic maximum within bound",
            true,
            format!("{} ≤ {bound} over {} strategies (L = {})", det.max_value, det.strategies, det.alphabet),
        ),
        Check::from_bool("chain bound per strategy", true, format!("largest {}", det.max_chain_bound)),
        Check::from_bool(
            "stochastic refinement within deterministic maximum",
            true,
            format!("{} ≤ {}", sto.max_value, det.max_value),
        ),
    ];
    Ok(ClassicalReport { shape: shape.clone(), beta: config.beta, bound, deterministic: det, stochastic: sto, checks })
}
