//! Randomized product-formula simulation of `e^{iHt}` for Pauli-sum
//! Hamiltonians: qDRIFT, its higher-order qSWIFT corrections, and
//! Trotter-Suzuki for comparison.
//!
//! The pieces, roughly in pipeline order:
//!
//! * [`hamiltonian`] parses `<coefficient> <pauli string>` files.
//! * [`compiler`] turns a model into sampled gate plans of time operators
//!   `e^{i H_l tau}` and ancilla-controlled swift operators.
//! * [`statevector`] executes plans on `n + 1` qubits, ancilla most significant.
//! * [`estimator`] combines baseline and correction circuits into an estimate
//!   of `Tr(Q e^{iHt} rho e^{-iHt})`, and plans sample budgets.
//! * [`exact_channels`] is a dense superoperator oracle for small systems.
//! * [`bounds`] evaluates analytic error bounds and minimal segment counts.
//!
//! Runnable examples live in `examples/`:
//!
//! | example | shows |
//! |---|---|
//! | `load_hamiltonian` | parsing and derived sampling quantities |
//! | `compile_plans` | every compiler on one model |
//! | `oracle_channels` | exact channel error against the analytic bound |
//! | `estimate_expectation` | qDRIFT vs qSWIFT-2/3 on a 4-qubit model |
//! | `all_order` | the unbiased all-order estimator |
//! | `gate_counts` | long-time gate-count tables |
//! | `sample_budget` | circuits per correction bucket |
//!
//! Sampling is reproducible: every circuit draws from its own stream seeded by
//! [`rng::derive_seed`], so results do not depend on the thread count
//! (`HAMSIM_THREADS`).

pub mod bounds;
pub mod cli;
pub mod compiler;
pub mod error;
pub mod estimator;
pub mod exact_channels;
pub mod hamiltonian;
pub mod rng;
pub mod statevector;
pub mod verify;

pub use error::{Error, Result};
