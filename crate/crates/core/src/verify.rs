//! Self-check suites run by `hamsim verify`.
//!
//! Each check compares a fast path against the dense oracle on systems of at
//! most two qubits.

use num_complex::Complex64;

use crate::compiler::correction_terms;
use crate::error::Result;
use crate::estimator::{eval_correction, estimate_qswift, EstimatorConfig, Sampling};
use crate::exact_channels::{
    expectation, ideal_channel, input_density, mixture, mixture_dp, qdrift_channel, qswift_channel, script_l_n,
    term_matrix, CMatrix, Superoperator,
};
use crate::hamiltonian::{parse_hamiltonian, HamiltonianModel, Pauli, PauliString, PauliTerm};
use crate::statevector::{InputState, Observable, State};

/// Signature of a swift-operator implementation under test.
pub type SwiftImpl = fn(&mut State, &PauliTerm, u8) -> Result<()>;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Swift,
    Channels,
    Slopes,
    Estimator,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Swift, Suite::Channels, Suite::Slopes, Suite::Estimator];

    pub fn parse(name: &str) -> Option<Vec<Suite>> {
        match name {
            "all" => Some(Self::ALL.to_vec()),
            "swift" => Some(vec![Suite::Swift]),
            "channels" => Some(vec![Suite::Channels]),
            "slopes" => Some(vec![Suite::Slopes]),
            "estimator" => Some(vec![Suite::Estimator]),
            _ => None,
        }
    }

    pub fn run(self) -> Vec<CheckResult> {
        match self {
            Suite::Swift => vec![swift_algebra(State::apply_swift_op)],
            Suite::Channels => channel_checks(),
            Suite::Slopes => slope_checks(),
            Suite::Estimator => estimator_checks(),
        }
    }
}

/// The 1-qubit reference model `0.5 X + 0.3 Z`.
pub fn reference_model() -> HamiltonianModel {
    parse_hamiltonian("0.5 X\n0.3 Z").expect("reference model parses")
}

/// Dense unitary of one swift operator on `ancilla (x) system`.
pub fn swift_unitary(swift: SwiftImpl, term: &PauliTerm, bit: u8) -> Result<CMatrix> {
    let n = term.axes.n_qubits();
    let dim = 1usize << (n + 1);
    let mut u = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[col] = Complex64::new(1.0, 0.0);
        let mut state = State::from_amplitudes(n, amps)?;
        swift(&mut state, term, bit)?;
        for (row, a) in state.amplitudes().iter().enumerate() {
            u[(row, col)] = *a;
        }
    }
    Ok(u)
}

/// Largest deviation of `S^(0) + S^(1)` from `i[H, .]` on the off-diagonal
/// ancilla blocks, over every matrix unit input.
pub fn swift_sum_deviation(swift: SwiftImpl, term: &PauliTerm) -> Result<f64> {
    let n = term.axes.n_qubits();
    let d = 1usize << n;
    let sum = Superoperator::conjugation(&swift_unitary(swift, term, 0)?)
        .plus(&Superoperator::conjugation(&swift_unitary(swift, term, 1)?));
    let h = term_matrix(term);
    let i = Complex64::new(0.0, 1.0);
    let mut worst: f64 = 0.0;
    for a in 0..2 * d {
        for b in 0..2 * d {
            let mut rho = CMatrix::zeros(2 * d, 2 * d);
            rho[(a, b)] = Complex64::new(1.0, 0.0);
            let out = sum.apply(&rho);
            for (r0, c0) in [(0, d), (d, 0)] {
                let block_in = rho.view((r0, c0), (d, d)).into_owned();
                let expected = (&h * &block_in - &block_in * &h) * i;
                let got = out.view((r0, c0), (d, d)).into_owned();
                worst = worst.max((got - expected).norm());
            }
        }
    }
    Ok(worst)
}

/// Swift-sum identity for every signed single-qubit Pauli generator.
pub fn swift_algebra(swift: SwiftImpl) -> CheckResult {
    let mut worst: f64 = 0.0;
    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
        for coefficient in [1.0, -1.0] {
            let term = PauliTerm::new(coefficient, PauliString::single(1, 0, p)).expect("valid term");
            match swift_sum_deviation(swift, &term) {
                Ok(dev) => worst = worst.max(dev),
                Err(e) => return CheckResult::new("swift-sum", false, e.to_string()),
            }
        }
    }
    CheckResult::new("swift-sum", worst < 1e-12, format!("max deviation {worst:.3e}"))
}

/// `E^N + tau^2/2 sum_r E^{N-1-r} L^(2) E^r`, the second-order channel written out.
pub fn second_order_formula(model: &HamiltonianModel, t: f64, segments: usize) -> Result<Superoperator> {
    let tau = model.tau(t, segments);
    let e = qdrift_channel(model, tau)?;
    let l2 = script_l_n(model, 2)?;
    let mut correction = Superoperator::zeros(model.n_qubits());
    for r in 0..segments {
        correction = correction.plus(&e.pow(segments - 1 - r).after(&l2).after(&e.pow(r)));
    }
    Ok(e.pow(segments).plus(&correction.scaled(tau * tau / 2.0)))
}

fn channel_checks() -> Vec<CheckResult> {
    let model = reference_model();
    let t = 1.0 / model.lambda();
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    for n in 2..=8 {
        match (qswift_channel(&model, t, n, 2), second_order_formula(&model, t, n)) {
            (Ok(a), Ok(b)) => worst = worst.max(a.frobenius_distance(&b)),
            (Err(e), _) | (_, Err(e)) => {
                out.push(CheckResult::new("second-order-channel", false, e.to_string()));
                return out;
            }
        }
    }
    out.push(CheckResult::new(
        "second-order-channel",
        worst < 1e-10,
        format!("max Frobenius deviation {worst:.3e}"),
    ));

    let two = parse_hamiltonian("0.4 XY\n-0.2 ZI\n0.1 YY").expect("fixture parses");
    let tau = two.tau(1.0, 5);
    let check = || -> Result<f64> {
        let e = qdrift_channel(&two, tau)?;
        let parts = [script_l_n(&two, 2)?, script_l_n(&two, 3)?];
        Ok(mixture(&parts, &e, 5)?.frobenius_distance(&mixture_dp(&parts, &e, 5)?))
    };
    out.push(match check() {
        Ok(dev) => CheckResult::new("mixture-dp", dev < 1e-10, format!("deviation {dev:.3e}")),
        Err(e) => CheckResult::new("mixture-dp", false, e.to_string()),
    });

    let cptp = || -> Result<f64> {
        let choi = qdrift_channel(&two, tau)?.choi();
        Ok(choi.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min))
    };
    out.push(match cptp() {
        Ok(min) => CheckResult::new("qdrift-cptp", min > -1e-10, format!("min Choi eigenvalue {min:.3e}")),
        Err(e) => CheckResult::new("qdrift-cptp", false, e.to_string()),
    });
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// `|Tr(Q U rho) - Tr(Q Phi^(K) rho)|` on the reference model at `lambda t = 1`.
pub fn reference_bias(segments: usize, order: usize) -> Result<f64> {
    let model = reference_model();
    let t = 1.0 / model.lambda();
    let obs = Observable::system("Z".parse().expect("valid string"));
    let rho = input_density(1, InputState::Plus);
    let ideal = expectation(&obs, &ideal_channel(&model, t, 1)?.apply(&rho));
    let approx = expectation(&obs, &qswift_channel(&model, t, segments, order)?.apply(&rho));
    Ok((ideal - approx).abs())
}

pub const SLOPE_SEGMENTS: [usize; 4] = [8, 16, 32, 64];

fn slope_checks() -> Vec<CheckResult> {
    (1..=3)
        .map(|k| {
            let name = format!("slope-K{k}");
            let errors: Result<Vec<f64>> = SLOPE_SEGMENTS.iter().map(|&n| reference_bias(n, k)).collect();
            match errors {
                Ok(errors) => {
                    let xs: Vec<f64> = SLOPE_SEGMENTS.iter().map(|&n| n as f64).collect();
                    let slope = log_log_slope(&xs, &errors);
                    let passed = (slope + k as f64).abs() <= 0.3;
                    CheckResult::new(&name, passed, format!("slope {slope:.3} (target {})", -(k as i64)))
                }
                Err(e) => CheckResult::new(&name, false, e.to_string()),
            }
        })
        .collect()
}

fn estimator_checks() -> Vec<CheckResult> {
    let model = reference_model();
    let t = 1.0 / model.lambda();
    let obs = Observable::system("Z".parse().expect("valid string"));
    let rho = input_density(1, InputState::Plus);
    let mut out = Vec::new();
    for (n, k) in [(3usize, 2usize), (4, 3)] {
        let name = format!("exhaustive-qswift-N{n}-K{k}");
        let run = || -> Result<f64> {
            let mut config = EstimatorConfig::new(1, n, k);
            config.sampling = Sampling::Exhaustive;
            let report = estimate_qswift(&model, t, &config)?;
            let oracle = expectation(&obs, &qswift_channel(&model, t, n, k)?.apply(&rho));
            Ok((report.value - oracle).abs())
        };
        out.push(match run() {
            Ok(dev) => CheckResult::new(&name, dev < 1e-9, format!("deviation {dev:.3e}")),
            Err(e) => CheckResult::new(&name, false, e.to_string()),
        });
    }
    let single = parse_hamiltonian("0.6 Y").expect("fixture parses");
    let run = || -> Result<f64> {
        let mut config = EstimatorConfig::new(1, 3, 3);
        config.sampling = Sampling::Exhaustive;
        let mut worst: f64 = 0.0;
        for term in correction_terms(&single, 1.0, 3, 3)? {
            worst = worst.max(eval_correction(&single, 1.0, &term, &config)?.value.abs());
        }
        Ok(worst)
    };
    out.push(match run() {
        Ok(dev) => CheckResult::new("single-term-buckets-vanish", dev < 1e-12, format!("max bucket {dev:.3e}")),
        Err(e) => CheckResult::new("single-term-buckets-vanish", false, e.to_string()),
    });
    out
}
