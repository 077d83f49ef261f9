//! The all-order scheme has no systematic error; its price is the variance
//! factor B^(2N).

use hamsim::compiler::AllOrderSampler;
use hamsim::estimator::{estimate_all_order, EstimatorConfig};
use hamsim::exact_channels::ideal_expectation;
use hamsim::hamiltonian::parse_hamiltonian;
use hamsim::statevector::Observable;

fn main() {
    let model = parse_hamiltonian("0.5 X\n0.3 Z").unwrap();
    let t = 2.5;
    let exact = ideal_expectation(&model, t, Default::default(), &Observable::system("Z".parse().unwrap())).unwrap();
    println!("exact {exact:+.5}");
    for n in [4usize, 8, 16] {
        let sampler = AllOrderSampler::new(&model, model.tau(t, n)).unwrap();
        let mut config = EstimatorConfig::new(1, n, 1);
        config.n_sample_0 = 100_000;
        config.exact_expectations = true;
        let report = estimate_all_order(&model, t, &config).unwrap();
        println!(
            "N = {n:>2}: B^N = {:.4}, estimate {:+.5} +- {:.5}",
            sampler.b_total.powi(n as i32),
            report.value,
            report.stderr
        );
    }
}
