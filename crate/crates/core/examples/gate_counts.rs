//! Minimal gate counts versus evolution time for a model with
//! lambda = 1, Lambda = 0.1 and 100 terms.

use hamsim::bounds::{parse_t_grid, sweep_table, ModelScales, TableMethod, CLI_N_CAP};

fn main() {
    let scales = ModelScales {
        lambda: 1.0,
        lambda_max: 0.1,
        terms: 100,
    };
    let grid = parse_t_grid("log:1e4:1e10:7").unwrap();
    let methods = [
        TableMethod::Qdrift,
        TableMethod::Qswift(3),
        TableMethod::Qswift(6),
        TableMethod::TrotterBest,
    ];
    for epsilon in [1e-3, 1e-6] {
        let table = sweep_table(scales, &grid, &methods, epsilon, CLI_N_CAP).unwrap();
        println!("epsilon = {epsilon:e}");
        for &t in &grid {
            let q = table.gates(t, TableMethod::Qdrift).unwrap() as f64;
            let s3 = table.gates(t, TableMethod::Qswift(3)).unwrap() as f64;
            let s6 = table.gates(t, TableMethod::Qswift(6)).unwrap() as f64;
            let ts = table.gates(t, TableMethod::TrotterBest).unwrap() as f64;
            println!(
                "  t {t:8.1e}  qdrift {q:9.2e}  qswift3 {s3:9.2e} (x{:.0})  qswift6 {s6:9.2e} (x{:.0})  ts-best {ts:9.2e}",
                q / s3,
                q / s6
            );
        }
    }
}
