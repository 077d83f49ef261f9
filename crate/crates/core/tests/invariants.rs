use hamsim::bounds::{qswift_bound, solve_min_n, BoundKind, DEFAULT_N_CAP};
use hamsim::compiler::{qdrift_plan, randomized_trotter_plan, trotter_plan, GatePlan};
use hamsim::exact_channels::{mixture, mixture_dp, qdrift_channel, script_l_n};
use hamsim::hamiltonian::{parse_hamiltonian, HamiltonianModel};
use hamsim::statevector::{InputState, State};
use proptest::prelude::*;

fn pauli_string(width: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop::sample::select(vec!['I', 'X', 'Y', 'Z']), width)
        .prop_map(|v| v.into_iter().collect())
}

fn model_text(max_width: usize) -> impl Strategy<Value = String> {
    (1..=max_width)
        .prop_flat_map(|w| proptest::collection::vec((-2.0f64..2.0, pauli_string(w)), 1..6))
        .prop_filter("some weight survives", |terms| terms.iter().any(|(c, _)| c.abs() > 1e-3))
        .prop_map(|terms| terms.iter().map(|(c, p)| format!("{c} {p}\n")).collect())
}

fn model(max_width: usize) -> impl Strategy<Value = HamiltonianModel> {
    model_text(max_width).prop_filter_map("terms cancel", |text| parse_hamiltonian(&text).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn probabilities_normalised(m in model(4)) {
        let sum: f64 = m.probs().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        prop_assert!(m.lambda_max() > 0.0 && m.lambda_max() <= m.lambda() + 1e-15);
    }

    #[test]
    fn serialised_model_reparses(m in model(4)) {
        let again = parse_hamiltonian(&m.to_text()).unwrap();
        prop_assert_eq!(again.len(), m.len());
        for (a, b) in m.terms().iter().zip(again.terms()) {
            prop_assert_eq!(&a.axes, &b.axes);
            prop_assert!((a.coefficient() - b.coefficient()).abs() < 1e-12);
        }
    }

    #[test]
    fn plans_preserve_norm(m in model(3), t in 0.0f64..3.0, n in 1usize..12, seed: u64, order in 1usize..=2) {
        let plans: Vec<GatePlan> = vec![
            qdrift_plan(&m, t, n, seed).unwrap(),
            trotter_plan(&m, t, n, order).unwrap(),
            randomized_trotter_plan(&m, t, n, order, seed).unwrap(),
        ];
        for plan in plans {
            let mut state = State::prepare(m.n_qubits(), InputState::Plus).unwrap();
            plan.execute(&m, &mut state).unwrap();
            prop_assert!((state.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn plan_text_reparses(m in model(3), n in 1usize..10, seed: u64) {
        let plan = qdrift_plan(&m, 1.0, n, seed).unwrap();
        let back = GatePlan::from_text(&plan.to_text(), plan.method, n).unwrap();
        prop_assert_eq!(back.ops, plan.ops);
    }

    #[test]
    fn mixture_dp_agrees(m in model(1), n in 3usize..7, tau in 0.01f64..0.5) {
        let e = qdrift_channel(&m, tau).unwrap();
        let parts = [script_l_n(&m, 2).unwrap(), script_l_n(&m, 3).unwrap()];
        let a = mixture(&parts, &e, n).unwrap();
        let b = mixture_dp(&parts, &e, n).unwrap();
        prop_assert!(a.frobenius_distance(&b) < 1e-9 * (1.0 + a.matrix.norm()));
    }

    #[test]
    fn bound_decreases_with_segments(lt in 0.1f64..20.0, k in 1usize..6, step in 1u128..1000) {
        let first = ((2.0 * std::f64::consts::E * lt).powi(2)).floor() as u128 + 1;
        let a = qswift_bound(lt, first, k).unwrap();
        let b = qswift_bound(lt, first + step, k).unwrap();
        prop_assert!(b < a);
    }

    #[test]
    fn min_segments_is_tight(lt in 0.1f64..100.0, log_eps in -8.0f64..-1.0, k in 1usize..5) {
        let eps = 10f64.powf(log_eps);
        for kind in [BoundKind::Qdrift, BoundKind::Qswift(k)] {
            let n = solve_min_n(kind, lt, eps, DEFAULT_N_CAP).unwrap();
            prop_assert!(kind.evaluate(lt, n).unwrap() <= eps);
            if let Ok(prev) = kind.evaluate(lt, n - 1) {
                prop_assert!(prev > eps);
            }
        }
    }
}
