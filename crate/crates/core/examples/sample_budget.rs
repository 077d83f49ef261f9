//! Circuits needed per correction bucket for a target statistical error.

use hamsim::estimator::plan_budget;
use hamsim::hamiltonian::parse_hamiltonian;

fn main() {
    let model = parse_hamiltonian(include_str!("../data/chain_4q.ham")).unwrap();
    for order in 1..=4 {
        let table = plan_budget(&model, 1.0, 16, order, 1e-3).unwrap();
        println!("K = {order}: baseline {} circuits", table.baseline_samples);
        for row in &table.buckets {
            println!(
                "    ({:<7}) c = {:.2e}  {:>4} assignments x {:>9} = {:>11}",
                row.bucket, row.coeff, row.assignments, row.n_sample, row.circuits
            );
        }
        println!("    total {}", table.total_circuits);
    }
}
