//! Parse a Pauli-sum file and print the quantities the samplers use.
//!
//! ```text
//! cargo run --example load_hamiltonian -- data/chain_4q.ham
//! ```

use hamsim::hamiltonian::parse_hamiltonian;

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "data/chain_4q.ham".into());
    let text = std::fs::read_to_string(&path).expect("readable Hamiltonian file");
    let model = parse_hamiltonian(&text).unwrap_or_else(|e| panic!("{path}: {e}"));

    println!("{} qubits, {} terms", model.n_qubits(), model.len());
    println!("lambda = {:.4}, Lambda = {:.4}", model.lambda(), model.lambda_max());
    for (term, p) in model.terms().iter().zip(model.probs()) {
        println!("  {:>+8.4} {}  p = {:.4}", term.coefficient(), term.axes, p);
    }
    println!("tau at t = 1, N = 16: {:.5}", model.tau(1.0, 16));
}
