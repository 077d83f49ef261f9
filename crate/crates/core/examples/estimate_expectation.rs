//! Monte Carlo estimates of <Z_0> after evolving |+>^4 on the bundled
//! four-qubit model, with qDRIFT and two qSWIFT orders at the same budget.
//!
//! ```text
//! HAMSIM_THREADS=4 cargo run --release --example estimate_expectation
//! ```

use hamsim::estimator::{estimate_qswift, EstimatorConfig};
use hamsim::exact_channels::ideal_expectation;
use hamsim::hamiltonian::parse_hamiltonian;
use hamsim::statevector::Observable;

fn main() {
    hamsim::cli::configure_threads();
    let model = parse_hamiltonian(include_str!("../data/chain_4q.ham")).unwrap();
    let t = 1.0;
    let mut config = EstimatorConfig::new(model.n_qubits(), 8, 1);
    config.n_sample_0 = 20_000;
    config.n_sample = 2_000;

    let exact = ideal_expectation(&model, t, config.input, &Observable::system(config.observable.clone())).unwrap();
    println!("exact {exact:+.5}");
    for k in 1..=3 {
        config.order = k;
        let report = estimate_qswift(&model, t, &config).unwrap();
        println!(
            "{:<8} {:+.5} +- {:.5}  error {:+.5}  ({} circuits)",
            report.method,
            report.value,
            report.stderr,
            report.value - exact,
            report.plan_count
        );
        for (bucket, v) in &report.buckets {
            println!("    bucket ({bucket}) {v:+.6}");
        }
    }
}
