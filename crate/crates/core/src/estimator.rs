//! Monte Carlo estimators for qDRIFT, order-`K` qSWIFT, Trotter and the
//! all-order scheme, plus the sample-budget planner.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compiler::{
    all_order_plan_with, correction_terms, enumerate_qdrift_plans, enumerate_swift_plans, qdrift_plan_from,
    randomized_trotter_plan, sample_swift_plan_with, sampler_for, trotter_plan, AllOrderSampler, CorrectionTerm,
    GatePlan, SwiftAssignment,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianModel, Pauli, PauliString};
use crate::rng::{derive_seed, parallel_moments, stream, Moments};
use crate::statevector::{shot_mean, InputState, Observable, State};

const TAG_BASELINE: u64 = 0xB0;
const TAG_BUCKET: u64 = 0xB1;
const TAG_TROTTER: u64 = 0xB2;
const TAG_ALL_ORDER: u64 = 0xB3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// Seeded random draws.
    #[default]
    Random,
    /// Every draw replaced by full enumeration with its probability weight;
    /// expectations are exact.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketBudget {
    /// Circuits per `(s, b)` assignment.
    pub n_sample: u64,
    pub n_shot: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub segments: usize,
    pub order: usize,
    pub n_sample_0: u64,
    pub n_shot_0: u64,
    /// Default bucket budget.
    pub n_sample: u64,
    pub n_shot: u64,
    /// Per-bucket overrides keyed like `"2,2"`.
    pub bucket_budgets: BTreeMap<String, BucketBudget>,
    pub seed: u64,
    /// System observable `Q`.
    pub observable: PauliString,
    pub input: InputState,
    /// Use exact circuit expectations instead of simulated shots.
    pub exact_expectations: bool,
    pub sampling: Sampling,
    /// Cap on total circuits across baseline and buckets.
    pub max_circuits: u128,
}

impl EstimatorConfig {
    /// Defaults: `Z` on qubit 0, `|+>` input, 1000 samples and 100 shots everywhere.
    pub fn new(n_qubits: usize, segments: usize, order: usize) -> Self {
        Self {
            segments,
            order,
            n_sample_0: 1000,
            n_shot_0: 100,
            n_sample: 1000,
            n_shot: 100,
            bucket_budgets: BTreeMap::new(),
            seed: 42,
            observable: PauliString::single(n_qubits, 0, Pauli::Z),
            input: InputState::Plus,
            exact_expectations: false,
            sampling: Sampling::Random,
            max_circuits: 10_000_000_000,
        }
    }

    pub fn budget_for(&self, key: &str) -> BucketBudget {
        self.bucket_budgets.get(key).copied().unwrap_or(BucketBudget {
            n_sample: self.n_sample,
            n_shot: self.n_shot,
        })
    }

    fn validate(&self, model: &HamiltonianModel) -> Result<()> {
        if self.segments == 0 || self.order == 0 {
            return Err(Error::InvalidArgument("N and K must be at least 1".into()));
        }
        if self.order > self.segments {
            return Err(Error::OrderExceedsSegments {
                order: self.order,
                segments: self.segments,
            });
        }
        let counts = [self.n_sample_0, self.n_shot_0, self.n_sample, self.n_shot];
        if counts.contains(&0) || self.bucket_budgets.values().any(|b| b.n_sample == 0 || b.n_shot == 0) {
            return Err(Error::InvalidArgument("sample and shot counts must be at least 1".into()));
        }
        if self.observable.n_qubits() != model.n_qubits() {
            return Err(Error::WidthMismatch {
                expected: model.n_qubits(),
                found: self.observable.n_qubits(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    pub baseline: BucketBudget,
    pub buckets: BTreeMap<String, BucketBudget>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub method: String,
    pub value: f64,
    pub baseline: f64,
    pub buckets: BTreeMap<String, f64>,
    pub bucket_stderr: BTreeMap<String, f64>,
    pub stderr: f64,
    pub plan_count: u64,
    pub shot_count: u64,
    pub seed: u64,
    pub budgets: Budgets,
    /// Exact `Tr(Q U rho)` when it was computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

impl EstimateReport {
    fn single(method: String, value: f64, stderr: f64, plans: u64, shots: u64, config: &EstimatorConfig) -> Self {
        Self {
            method,
            value,
            baseline: value,
            buckets: BTreeMap::new(),
            bucket_stderr: BTreeMap::new(),
            stderr,
            plan_count: plans,
            shot_count: shots,
            seed: config.seed,
            budgets: Budgets {
                baseline: BucketBudget {
                    n_sample: config.n_sample_0,
                    n_shot: config.n_shot_0,
                },
                buckets: BTreeMap::new(),
            },
            reference: None,
        }
    }
}

/// Estimate of one correction bucket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BucketEstimate {
    pub value: f64,
    pub stderr: f64,
    pub plan_count: u64,
    pub shot_count: u64,
}

fn run_plan(
    model: &HamiltonianModel,
    plan: &GatePlan,
    config: &EstimatorConfig,
    observable: &Observable,
) -> Result<f64> {
    let mut state = State::prepare(model.n_qubits(), config.input)?;
    plan.execute(model, &mut state)?;
    state.expectation(observable)
}

fn measure<R: rand::Rng + ?Sized>(expectation: f64, shots: u64, exact: bool, rng: &mut R) -> f64 {
    if exact {
        expectation
    } else {
        shot_mean(expectation, shots, rng)
    }
}

/// Weighted sum of exact expectations over an enumerated plan list.
fn enumerated_value(
    model: &HamiltonianModel,
    plans: &[(f64, GatePlan)],
    config: &EstimatorConfig,
    observable: &Observable,
) -> Result<f64> {
    let values = plans
        .par_iter()
        .map(|(w, plan)| Ok(w * run_plan(model, plan, config, observable)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.iter().sum())
}

/// qDRIFT estimate of `Tr(Q E_N^N(rho))` on the system register.
pub fn estimate_qdrift(model: &HamiltonianModel, t: f64, config: &EstimatorConfig) -> Result<EstimateReport> {
    config.validate(model)?;
    let (value, stderr, plans, shots) = baseline(model, t, config)?;
    Ok(EstimateReport::single("qdrift".into(), value, stderr, plans, shots, config))
}

fn baseline(model: &HamiltonianModel, t: f64, config: &EstimatorConfig) -> Result<(f64, f64, u64, u64)> {
    let observable = Observable::system(config.observable.clone());
    let n = config.segments;
    if config.sampling == Sampling::Exhaustive {
        let plans = enumerate_qdrift_plans(model, t, n)?;
        let value = enumerated_value(model, &plans, config, &observable)?;
        return Ok((value, 0.0, plans.len() as u64, 0));
    }
    let sampler = sampler_for(model);
    let m = parallel_moments(config.n_sample_0, |i| {
        let mut rng = stream(derive_seed(config.seed, &[TAG_BASELINE, i]));
        let plan = qdrift_plan_from(model, t, n, &sampler, &mut rng);
        let e = run_plan(model, &plan, config, &observable)?;
        Ok(measure(e, config.n_shot_0, config.exact_expectations, &mut rng))
    })?;
    let shots = if config.exact_expectations {
        0
    } else {
        config.n_sample_0 * config.n_shot_0
    };
    Ok((m.mean, m.mean_variance().sqrt(), config.n_sample_0, shots))
}

fn key_tag(n_vec: &[usize]) -> u64 {
    n_vec.iter().fold(0u64, |acc, &n| acc.wrapping_mul(1_000_003).wrapping_add(n as u64 + 1))
}

/// Estimate of one correction bucket: `c * sum_{s,b} (-1)^{sum s} E[Tr(Q~ C(rho~))]`.
pub fn eval_correction(
    model: &HamiltonianModel,
    t: f64,
    term: &CorrectionTerm,
    config: &EstimatorConfig,
) -> Result<BucketEstimate> {
    config.validate(model)?;
    let observable = Observable::ancilla_x(config.observable.clone());
    let n = config.segments;
    let assignments = SwiftAssignment::all(&term.n_vec);
    if config.sampling == Sampling::Exhaustive {
        let mut total = 0.0;
        let mut plans = 0u64;
        for a in &assignments {
            let enumerated = enumerate_swift_plans(model, t, n, term, a)?;
            plans += enumerated.len() as u64;
            total += a.sign() * enumerated_value(model, &enumerated, config, &observable)?;
        }
        return Ok(BucketEstimate {
            value: term.coeff * total,
            stderr: 0.0,
            plan_count: plans,
            shot_count: 0,
        });
    }
    let budget = config.budget_for(&term.key());
    let sampler = sampler_for(model);
    let bucket_tag = key_tag(&term.n_vec);
    let mut value = 0.0;
    let mut variance = 0.0;
    for (ai, a) in assignments.iter().enumerate() {
        let m: Moments = parallel_moments(budget.n_sample, |i| {
            let mut rng = stream(derive_seed(config.seed, &[TAG_BUCKET, bucket_tag, ai as u64, i]));
            let plan = sample_swift_plan_with(model, t, n, term, a, &sampler, &mut rng)?;
            let e = run_plan(model, &plan, config, &observable)?;
            Ok(measure(e, budget.n_shot, config.exact_expectations, &mut rng))
        })?;
        value += a.sign() * m.mean;
        variance += m.mean_variance();
    }
    let plans = budget.n_sample * assignments.len() as u64;
    Ok(BucketEstimate {
        value: term.coeff * value,
        stderr: term.coeff.abs() * variance.sqrt(),
        plan_count: plans,
        shot_count: if config.exact_expectations { 0 } else { plans * budget.n_shot },
    })
}

fn check_circuit_budget(terms: &[CorrectionTerm], config: &EstimatorConfig) -> Result<()> {
    if config.sampling == Sampling::Exhaustive {
        return Ok(());
    }
    let total = terms.iter().fold(config.n_sample_0 as u128, |acc, term| {
        let per = 1u128 << (term.xi + term.k);
        acc.saturating_add(per.saturating_mul(config.budget_for(&term.key()).n_sample as u128))
    });
    if total > config.max_circuits {
        return Err(Error::BudgetOverflow {
            requested: total,
            cap: config.max_circuits,
        });
    }
    Ok(())
}

/// Order-`K` estimate: the qDRIFT baseline plus every correction bucket.
pub fn estimate_qswift(model: &HamiltonianModel, t: f64, config: &EstimatorConfig) -> Result<EstimateReport> {
    config.validate(model)?;
    let terms = correction_terms(model, t, config.segments, config.order)?;
    check_circuit_budget(&terms, config)?;
    let (base, base_se, mut plans, mut shots) = baseline(model, t, config)?;
    let mut buckets = BTreeMap::new();
    let mut bucket_stderr = BTreeMap::new();
    let mut budgets = BTreeMap::new();
    let mut value = base;
    let mut variance = base_se * base_se;
    for term in &terms {
        let est = eval_correction(model, t, term, config)?;
        value += est.value;
        variance += est.stderr * est.stderr;
        plans += est.plan_count;
        shots += est.shot_count;
        buckets.insert(term.key(), est.value);
        bucket_stderr.insert(term.key(), est.stderr);
        budgets.insert(term.key(), config.budget_for(&term.key()));
    }
    Ok(EstimateReport {
        method: if config.order == 1 {
            "qdrift".into()
        } else {
            format!("qswift{}", config.order)
        },
        value,
        baseline: base,
        buckets,
        bucket_stderr,
        stderr: variance.sqrt(),
        plan_count: plans,
        shot_count: shots,
        seed: config.seed,
        budgets: Budgets {
            baseline: BucketBudget {
                n_sample: config.n_sample_0,
                n_shot: config.n_shot_0,
            },
            buckets: budgets,
        },
        reference: None,
    })
}

/// Trotter estimate with `r = config.segments` repetitions.
///
/// Deterministic plans run once with `n_shot_0 * n_sample_0` shots; randomized
/// plans draw `n_sample_0` circuits with `n_shot_0` shots each.
pub fn estimate_trotter(
    model: &HamiltonianModel,
    t: f64,
    order: usize,
    randomized: bool,
    config: &EstimatorConfig,
) -> Result<EstimateReport> {
    config.validate(model)?;
    let observable = Observable::system(config.observable.clone());
    let r = config.segments;
    if !randomized {
        let plan = trotter_plan(model, t, r, order)?;
        let e = run_plan(model, &plan, config, &observable)?;
        let shots = config.n_shot_0 * config.n_sample_0;
        let mut rng = stream(derive_seed(config.seed, &[TAG_TROTTER]));
        let value = measure(e, shots, config.exact_expectations, &mut rng);
        let stderr = if config.exact_expectations {
            0.0
        } else {
            ((1.0 - e * e).max(0.0) / shots as f64).sqrt()
        };
        let shots = if config.exact_expectations { 0 } else { shots };
        return Ok(EstimateReport::single(plan.method.to_string(), value, stderr, 1, shots, config));
    }
    // validate the order once before sampling
    let method = randomized_trotter_plan(model, t, r, order, 0)?.method;
    let m = parallel_moments(config.n_sample_0, |i| {
        let seed = derive_seed(config.seed, &[TAG_TROTTER, i]);
        let plan = randomized_trotter_plan(model, t, r, order, seed)?;
        let e = run_plan(model, &plan, config, &observable)?;
        let mut rng = stream(derive_seed(seed, &[1]));
        Ok(measure(e, config.n_shot_0, config.exact_expectations, &mut rng))
    })?;
    let shots = if config.exact_expectations {
        0
    } else {
        config.n_sample_0 * config.n_shot_0
    };
    Ok(EstimateReport::single(
        method.to_string(),
        m.mean,
        m.mean_variance().sqrt(),
        config.n_sample_0,
        shots,
        config,
    ))
}

/// All-order estimate `B^N * mean(sign * <X (x) Q>)` over `n_sample_0` circuits.
pub fn estimate_all_order(model: &HamiltonianModel, t: f64, config: &EstimatorConfig) -> Result<EstimateReport> {
    config.validate(model)?;
    let n = config.segments;
    let tau = model.tau(t, n);
    let observable = Observable::ancilla_x(config.observable.clone());
    if tau == 0.0 {
        let state = State::prepare(model.n_qubits(), config.input)?;
        let value = state.expectation(&observable)?;
        return Ok(EstimateReport::single("qswift-all".into(), value, 0.0, 0, 0, config));
    }
    let sampler = AllOrderSampler::new(model, tau)?;
    let scale = sampler.b_total.powi(n as i32);
    let m = parallel_moments(config.n_sample_0, |i| {
        let mut rng = stream(derive_seed(config.seed, &[TAG_ALL_ORDER, i]));
        let plan = all_order_plan_with(&sampler, n, &mut rng);
        let e = run_plan(model, &plan, config, &observable)?;
        Ok(plan.sign * measure(e, config.n_shot_0, config.exact_expectations, &mut rng))
    })?;
    let shots = if config.exact_expectations {
        0
    } else {
        config.n_sample_0 * config.n_shot_0
    };
    Ok(EstimateReport::single(
        "qswift-all".into(),
        scale * m.mean,
        scale * m.mean_variance().sqrt(),
        config.n_sample_0,
        shots,
        config,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetRow {
    pub bucket: String,
    pub coeff: f64,
    /// `2^(sum n_j + k)` assignments per sample.
    pub assignments: u64,
    pub n_sample: u64,
    pub circuits: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetTable {
    pub epsilon_total: f64,
    /// Per-estimate target `epsilon_total / sqrt(K + 1)`.
    pub epsilon: f64,
    pub baseline_samples: u64,
    pub buckets: Vec<BudgetRow>,
    pub total_circuits: u128,
}

fn ceil_count(x: f64) -> u64 {
    if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        // absorb rounding noise such as 1 / (0.01 / sqrt 2)^2 = 20000.000000000004
        (x * (1.0 - 1e-12)).ceil().max(1.0) as u64
    }
}

/// Sample budgets `n_sample = ceil(c^2 2^(sum n + k) / eps^2)` with
/// `eps = eps_total / sqrt(K + 1)`, and `ceil(1 / eps^2)` for the baseline.
pub fn plan_budget(
    model: &HamiltonianModel,
    t: f64,
    segments: usize,
    order: usize,
    epsilon_total: f64,
) -> Result<BudgetTable> {
    if !(epsilon_total > 0.0 && epsilon_total.is_finite()) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let terms = correction_terms(model, t, segments, order)?;
    let eps = epsilon_total / ((order + 1) as f64).sqrt();
    let baseline_samples = ceil_count(1.0 / (eps * eps));
    let buckets: Vec<BudgetRow> = terms
        .iter()
        .map(|term| {
            let assignments = 1u64 << (term.xi + term.k);
            let n_sample = ceil_count(term.coeff * term.coeff * assignments as f64 / (eps * eps));
            BudgetRow {
                bucket: term.key(),
                coeff: term.coeff,
                assignments,
                n_sample,
                circuits: assignments as u128 * n_sample as u128,
            }
        })
        .collect();
    let total_circuits = buckets
        .iter()
        .fold(baseline_samples as u128, |acc, row| acc.saturating_add(row.circuits));
    Ok(BudgetTable {
        epsilon_total,
        epsilon: eps,
        baseline_samples,
        buckets,
        total_circuits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_channels::{
        expectation, input_density, mixture, qdrift_channel, qswift_channel, script_l_n,
    };
    use crate::hamiltonian::parse_hamiltonian;

    fn reference() -> HamiltonianModel {
        parse_hamiltonian("0.5 X\n0.3 Z").unwrap()
    }

    fn oracle_q(model: &HamiltonianModel, t: f64, n: usize, k: usize) -> f64 {
        let obs = Observable::system(PauliString::single(model.n_qubits(), 0, Pauli::Z));
        let rho = input_density(model.n_qubits(), InputState::Plus);
        expectation(&obs, &qswift_channel(model, t, n, k).unwrap().apply(&rho))
    }

    #[test]
    fn qdrift_at_zero_time() {
        let m = reference();
        let mut config = EstimatorConfig::new(1, 8, 1);
        config.n_sample_0 = 50;
        let report = estimate_qdrift(&m, 0.0, &config).unwrap();
        // Z on |+> gives +-1 shots with mean 0
        assert!(report.value.abs() < 4.0 * report.stderr.max(0.01));
        config.exact_expectations = true;
        assert!(estimate_qdrift(&m, 0.0, &config).unwrap().value.abs() < 1e-14);
    }

    #[test]
    fn qdrift_single_term_is_exact() {
        let m = parse_hamiltonian("0.7 Y").unwrap();
        let mut config = EstimatorConfig::new(1, 8, 1);
        config.exact_expectations = true;
        config.n_sample_0 = 20;
        let report = estimate_qdrift(&m, 1.1, &config).unwrap();
        let exact = oracle_q(&m, 1.1, 1, 1);
        assert!((report.value - exact).abs() < 1e-12);
    }

    #[test]
    fn qdrift_matches_oracle_within_noise() {
        let m = reference();
        let t = 1.0 / 0.8;
        let mut config = EstimatorConfig::new(1, 16, 1);
        config.n_sample_0 = 20_000;
        config.n_shot_0 = 10;
        let report = estimate_qdrift(&m, t, &config).unwrap();
        let exact = oracle_q(&m, t, 16, 1);
        assert!((report.value - exact).abs() < 4.0 * report.stderr, "{report:?} vs {exact}");
    }

    #[test]
    fn exhaustive_bucket_matches_oracle() {
        let m = reference();
        let t = 1.0 / 0.8;
        let n = 3;
        let mut config = EstimatorConfig::new(1, n, 2);
        config.sampling = Sampling::Exhaustive;
        let term = &correction_terms(&m, t, n, 2).unwrap()[0];
        let est = eval_correction(&m, t, term, &config).unwrap();
        let tau = m.tau(t, n);
        let bucket = mixture(&[script_l_n(&m, 2).unwrap()], &qdrift_channel(&m, tau).unwrap(), n)
            .unwrap()
            .scaled(tau * tau / 2.0);
        let obs = Observable::system("Z".parse().unwrap());
        let oracle = expectation(&obs, &bucket.apply(&input_density(1, InputState::Plus)));
        assert!((est.value - oracle).abs() < 1e-9, "{} vs {oracle}", est.value);
    }

    #[test]
    fn exhaustive_second_order_matches_channel() {
        let m = reference();
        let t = 1.0 / 0.8;
        let mut config = EstimatorConfig::new(1, 3, 2);
        config.sampling = Sampling::Exhaustive;
        let report = estimate_qswift(&m, t, &config).unwrap();
        assert!((report.value - oracle_q(&m, t, 3, 2)).abs() < 1e-9);
        let sum: f64 = report.baseline + report.buckets.values().sum::<f64>();
        assert!((report.value - sum).abs() < 1e-12);
    }

    #[test]
    fn exhaustive_third_order_matches_channel() {
        let m = reference();
        let t = 1.0 / 0.8;
        let mut config = EstimatorConfig::new(1, 4, 3);
        config.sampling = Sampling::Exhaustive;
        let report = estimate_qswift(&m, t, &config).unwrap();
        assert_eq!(report.buckets.keys().cloned().collect::<Vec<_>>(), vec!["2", "2,2", "3", "4"]);
        assert!((report.value - oracle_q(&m, t, 4, 3)).abs() < 1e-9);
    }

    #[test]
    fn single_term_corrections_vanish() {
        let m = parse_hamiltonian("0.6 X").unwrap();
        let mut config = EstimatorConfig::new(1, 3, 3);
        config.sampling = Sampling::Exhaustive;
        for term in correction_terms(&m, 1.0, 3, 3).unwrap() {
            assert!(eval_correction(&m, 1.0, &term, &config).unwrap().value.abs() < 1e-12);
        }
    }

    #[test]
    fn second_order_prefactor() {
        // coefficient of the (2) bucket is (lambda t)^2 / 2N
        let m = reference();
        let (t, n) = (2.0, 10);
        let term = &correction_terms(&m, t, n, 2).unwrap()[0];
        let lt = m.lambda() * t;
        assert!((term.coeff - lt * lt / (2.0 * n as f64)).abs() < 1e-14);
    }

    #[test]
    fn sampled_qswift_matches_oracle() {
        let m = reference();
        let t = 1.0 / 0.8;
        for k in [2, 3] {
            let mut config = EstimatorConfig::new(1, 8, k);
            config.n_sample_0 = 40_000;
            config.n_sample = 4_000;
            config.exact_expectations = true;
            config.seed = 7 + k as u64;
            let report = estimate_qswift(&m, t, &config).unwrap();
            let exact = oracle_q(&m, t, 8, k);
            assert!(
                (report.value - exact).abs() < 4.0 * report.stderr,
                "K={k}: {} vs {exact} (stderr {})",
                report.value,
                report.stderr
            );
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let m = parse_hamiltonian("0.5 XI\n0.3 ZZ\n-0.2 IY").unwrap();
        let mut config = EstimatorConfig::new(2, 6, 2);
        config.n_sample_0 = 300;
        config.n_sample = 40;
        let a = estimate_qswift(&m, 1.0, &config).unwrap();
        let b = estimate_qswift(&m, 1.0, &config).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        config.seed = 43;
        assert_ne!(estimate_qswift(&m, 1.0, &config).unwrap().value, a.value);
    }

    #[test]
    fn trotter_estimates() {
        let m = reference();
        let t = 1.25;
        let mut config = EstimatorConfig::new(1, 4, 1);
        config.exact_expectations = true;
        let ideal = crate::exact_channels::ideal_expectation(
            &m,
            t,
            InputState::Plus,
            &Observable::system("Z".parse().unwrap()),
        )
        .unwrap();
        let first = estimate_trotter(&m, t, 1, false, &config).unwrap().value;
        let second = estimate_trotter(&m, t, 2, false, &config).unwrap().value;
        assert!((second - ideal).abs() < (first - ideal).abs());
        let zero = estimate_trotter(&m, 0.0, 2, true, &config).unwrap().value;
        assert!(zero.abs() < 1e-14);
        let single = parse_hamiltonian("0.4 X").unwrap();
        let obs = Observable::system("Z".parse().unwrap());
        let mut cfg = EstimatorConfig::new(1, 3, 1);
        cfg.exact_expectations = true;
        cfg.input = InputState::Zero;
        let ideal1 = crate::exact_channels::ideal_expectation(&single, 0.9, InputState::Zero, &obs).unwrap();
        for order in [1, 2, 4] {
            let v = estimate_trotter(&single, 0.9, order, false, &cfg).unwrap().value;
            assert!((v - ideal1).abs() < 1e-12);
        }
    }

    #[test]
    fn all_order_zero_time() {
        let m = reference();
        let mut config = EstimatorConfig::new(1, 4, 1);
        config.input = InputState::Zero;
        let report = estimate_all_order(&m, 0.0, &config).unwrap();
        assert!((report.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_order_is_unbiased() {
        let m = reference();
        let t = 1.0 / 0.8;
        let mut config = EstimatorConfig::new(1, 4, 1);
        config.n_sample_0 = 200_000;
        config.exact_expectations = true;
        let report = estimate_all_order(&m, t, &config).unwrap();
        let ideal = crate::exact_channels::ideal_expectation(
            &m,
            t,
            InputState::Plus,
            &Observable::system("Z".parse().unwrap()),
        )
        .unwrap();
        assert!((report.value - ideal).abs() < 4.0 * report.stderr, "{report:?} vs {ideal}");
    }

    #[test]
    fn budget_table_shape() {
        let m = reference();
        let table = plan_budget(&m, 10.0, 16, 3, 1e-2).unwrap();
        let keys: Vec<&str> = table.buckets.iter().map(|r| r.bucket.as_str()).collect();
        assert_eq!(keys, vec!["2", "3", "4", "2,2"]);
        let row = |k: &str| table.buckets.iter().find(|r| r.bucket == k).unwrap().n_sample;
        assert!(row("2,2") > row("4"));
        let half = plan_budget(&m, 10.0, 16, 3, 5e-3).unwrap();
        for (a, b) in table.buckets.iter().zip(&half.buckets) {
            let ratio = b.n_sample as f64 / a.n_sample as f64;
            assert!((ratio - 4.0).abs() < 4.0 / a.n_sample as f64 + 1e-9, "{ratio}");
        }
        let k1 = plan_budget(&m, 1.0, 16, 1, 1e-2).unwrap();
        assert!(k1.buckets.is_empty());
        assert_eq!(k1.baseline_samples, 20_000);
        assert_eq!(k1.total_circuits, 20_000);
    }

    #[test]
    fn budget_overflow_is_reported() {
        let m = reference();
        let mut config = EstimatorConfig::new(1, 8, 3);
        config.max_circuits = 1000;
        assert!(matches!(
            estimate_qswift(&m, 1.0, &config),
            Err(Error::BudgetOverflow { .. })
        ));
    }

    #[test]
    fn width_overflow_propagates() {
        let m = parse_hamiltonian(&format!("1.0 {}", "Z".repeat(22))).unwrap();
        let mut config = EstimatorConfig::new(22, 2, 1);
        config.n_sample_0 = 1;
        assert!(matches!(
            estimate_qdrift(&m, 1.0, &config),
            Err(Error::WidthOverflow { .. })
        ));
    }
}
