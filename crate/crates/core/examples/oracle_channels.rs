//! Exact channel errors on a one-qubit model: how fast each order converges.

use hamsim::exact_channels::{ideal_channel, qswift_channel, trace_distance_surrogate, density, random_pure_state};
use hamsim::bounds::qswift_bound;
use hamsim::hamiltonian::parse_hamiltonian;
use rand::SeedableRng;

fn main() {
    let model = parse_hamiltonian("0.5 X\n0.3 Z").unwrap();
    let t = 1.0 / model.lambda();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let inputs: Vec<_> = (0..64).map(|_| density(&random_pure_state(1, &mut rng))).collect();

    println!("{:>4} {:>3} {:>12} {:>12}", "N", "K", "distance", "bound");
    for n in [8usize, 16, 32, 64] {
        let ideal = ideal_channel(&model, t, 1).unwrap();
        for k in 1..=3 {
            let approx = qswift_channel(&model, t, n, k).unwrap();
            let d = trace_distance_surrogate(&ideal, &approx, &inputs);
            let bound = qswift_bound(1.0, n as u128, k)
                .map(|b| format!("{b:12.3e}"))
                .unwrap_or_else(|_| format!("{:>12}", "vacuous"));
            println!("{n:>4} {k:>3} {d:12.3e} {bound}");
        }
    }
}
