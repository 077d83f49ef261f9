//! Compile the same Hamiltonian with each method and print the plans.

use hamsim::compiler::{
    correction_terms, qdrift_plan, randomized_trotter_plan, sample_swift_plan, trotter_plan, SwiftAssignment,
};
use hamsim::hamiltonian::parse_hamiltonian;

fn main() {
    let model = parse_hamiltonian("0.5 X\n0.3 Z").unwrap();
    let t = 1.25;

    let ts2 = trotter_plan(&model, t, 2, 2).unwrap();
    println!("second-order Trotter, r = 2:\n{}", ts2.to_text());

    let ts4 = trotter_plan(&model, t, 1, 4).unwrap();
    println!("fourth-order Trotter, r = 1: {} rotations\n", ts4.ops.len());

    let rts = randomized_trotter_plan(&model, t, 3, 1, 7).unwrap();
    println!("randomized first-order Trotter, r = 3:\n{}", rts.to_text());

    let qdrift = qdrift_plan(&model, t, 6, 7).unwrap();
    println!("qDRIFT, N = 6:\n{}", qdrift.to_text());

    // one swift circuit from the (2,2) bucket of the third-order expansion
    let terms = correction_terms(&model, t, 6, 3).unwrap();
    let bucket = terms.iter().find(|c| c.n_vec == [2, 2]).unwrap();
    let assignment = SwiftAssignment {
        s: vec![0, 1],
        b: vec![vec![0, 1], vec![1, 1]],
    };
    let plan = sample_swift_plan(&model, t, 6, bucket, &assignment, 7).unwrap();
    println!(
        "qSWIFT bucket {} (coefficient {:.3e}): {} time ops, {} swift ops\n{}",
        bucket.key(),
        bucket.coeff,
        plan.time_op_count(),
        plan.swift_op_count(),
        plan.to_text()
    );
}
