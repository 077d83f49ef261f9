//! Pure-state simulator on a system register plus one ancilla.
//!
//! The ancilla is the most significant qubit of the basis index; the system
//! register occupies the low `n_qubits` bits with system qubit 0 the most
//! significant of those. Amplitudes with ancilla `|0>` fill the first half of
//! the vector and ancilla `|1>` the second half.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::hamiltonian::{PauliString, PauliTerm};

/// Default cap on the total register width (system plus ancilla).
pub const MAX_TOTAL_QUBITS: usize = 22;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Initial system state loaded next to an ancilla prepared in `|+>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputState {
    /// `|+>^n`
    #[default]
    Plus,
    /// `|0>^n`
    Zero,
}

/// Measured observable: `Q` on the system, or `X (x) Q` when `with_ancilla_x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observable {
    pub axes: PauliString,
    pub with_ancilla_x: bool,
}

impl Observable {
    pub fn system(axes: PauliString) -> Self {
        Self {
            axes,
            with_ancilla_x: false,
        }
    }

    pub fn ancilla_x(axes: PauliString) -> Self {
        Self {
            axes,
            with_ancilla_x: true,
        }
    }

    /// Same system string with the ancilla factor toggled on.
    pub fn with_ancilla(&self) -> Self {
        Self::ancilla_x(self.axes.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    amplitudes: Vec<Complex64>,
    n_qubits: usize,
}

impl State {
    /// `|+>_anc (x) input` with the default width cap.
    pub fn prepare(n_qubits: usize, input: InputState) -> Result<Self> {
        Self::prepare_with_cap(n_qubits, input, MAX_TOTAL_QUBITS)
    }

    pub fn prepare_with_cap(n_qubits: usize, input: InputState, cap: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits + 1 > cap {
            return Err(Error::WidthOverflow {
                requested: n_qubits + 1,
                cap,
            });
        }
        let dim = 1usize << (n_qubits + 1);
        let amplitudes = match input {
            InputState::Plus => vec![Complex64::new((dim as f64).sqrt().recip(), 0.0); dim],
            InputState::Zero => {
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                let a = std::f64::consts::FRAC_1_SQRT_2;
                v[0] = Complex64::new(a, 0.0);
                v[dim / 2] = Complex64::new(a, 0.0);
                v
            }
        };
        Ok(Self {
            amplitudes,
            n_qubits,
        })
    }

    /// `|+>^(n+1)`, ancilla included.
    pub fn plus_input(n_qubits: usize) -> Result<Self> {
        Self::prepare(n_qubits, InputState::Plus)
    }

    /// Builds a state from raw amplitudes (length `2^(n+1)`), normalizing them.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1usize << (n_qubits + 1) {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes, got {}",
                1usize << (n_qubits + 1),
                amplitudes.len()
            )));
        }
        let mut s = Self {
            amplitudes,
            n_qubits,
        };
        let norm = s.norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero state".into()));
        }
        s.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_width(&self, axes: &PauliString) -> Result<()> {
        if axes.n_qubits() != self.n_qubits {
            return Err(Error::WidthMismatch {
                expected: self.n_qubits,
                found: axes.n_qubits(),
            });
        }
        Ok(())
    }

    fn halves_mut(&mut self) -> (&mut [Complex64], &mut [Complex64]) {
        let half = self.amplitudes.len() / 2;
        self.amplitudes.split_at_mut(half)
    }

    /// `e^{i * angle * H_l}` on the system register, `H_l = sign * P`.
    pub fn apply_time_op(&mut self, term: &PauliTerm, angle: f64) -> Result<()> {
        self.apply_pauli_rotation(&term.axes, term.sign.value() * angle)
    }

    /// `e^{i theta P} = cos(theta) I + i sin(theta) P` on the system register.
    pub fn apply_pauli_rotation(&mut self, axes: &PauliString, theta: f64) -> Result<()> {
        self.check_width(axes)?;
        let a = Complex64::new(theta.cos(), 0.0);
        let b = Complex64::new(0.0, theta.sin());
        let (lo, hi) = self.halves_mut();
        combine_with_pauli(lo, axes, a, b);
        combine_with_pauli(hi, axes, a, b);
        Ok(())
    }

    /// Multiplies the ancilla `|1>` half by `phase`.
    pub fn apply_ancilla_phase(&mut self, phase: Complex64) {
        let (_, hi) = self.halves_mut();
        hi.iter_mut().for_each(|a| *a *= phase);
    }

    pub fn apply_ancilla_x(&mut self) {
        let (lo, hi) = self.halves_mut();
        lo.swap_with_slice(hi);
    }

    /// Controlled-`H_l` with the ancilla as control.
    pub fn apply_controlled_term(&mut self, term: &PauliTerm) -> Result<()> {
        self.check_width(&term.axes)?;
        let s = Complex64::new(term.sign.value(), 0.0);
        let (_, hi) = self.halves_mut();
        combine_with_pauli(hi, &term.axes, Complex64::new(0.0, 0.0), s);
        Ok(())
    }

    /// Swift operator `S_l^(b)`.
    ///
    /// `b = 0`: ancilla `S = diag(1, i)`, then controlled-`H_l`.
    /// `b = 1`: ancilla `S`, `Z`, `X`, then controlled-`H_l`, then `X`.
    ///
    /// On the off-diagonal ancilla blocks these act as
    /// `S^(0): (rho01, rho10) -> (-i rho01 H, i H rho10)` and
    /// `S^(1): (rho01, rho10) -> (i H rho01, -i rho10 H)`, so the two channels
    /// sum to `rho -> i[H, rho]` on both blocks.
    pub fn apply_swift_op(&mut self, term: &PauliTerm, bit: u8) -> Result<()> {
        match bit {
            0 => {
                self.apply_ancilla_phase(I);
                self.apply_controlled_term(term)
            }
            1 => {
                self.apply_ancilla_phase(I);
                self.apply_ancilla_phase(Complex64::new(-1.0, 0.0));
                self.apply_ancilla_x();
                self.apply_controlled_term(term)?;
                self.apply_ancilla_x();
                Ok(())
            }
            _ => Err(Error::InvalidArgument(format!("swift bit must be 0 or 1, got {bit}"))),
        }
    }

    /// Exact `<psi|O|psi>`.
    pub fn expectation(&self, obs: &Observable) -> Result<f64> {
        self.check_width(&obs.axes)?;
        let half = self.amplitudes.len() / 2;
        let (lo, hi) = self.amplitudes.split_at(half);
        let value = if obs.with_ancilla_x {
            // <psi| X (x) Q |psi> = 2 Re <lo| Q |hi>
            2.0 * pauli_inner(lo, &obs.axes, hi).re
        } else {
            pauli_inner(lo, &obs.axes, lo).re + pauli_inner(hi, &obs.axes, hi).re
        };
        Ok(value.clamp(-1.0, 1.0))
    }
}

/// Phase of `P|x> = phase(x) |x ^ x_mask>`.
#[inline]
fn pauli_phase(x: usize, z_mask: u64, y_phase: Complex64) -> Complex64 {
    if (x as u64 & z_mask).count_ones() % 2 == 1 {
        -y_phase
    } else {
        y_phase
    }
}

fn y_phase(axes: &PauliString) -> Complex64 {
    match axes.y_count() % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => -I,
    }
}

/// In place `v <- a v + b P v`.
fn combine_with_pauli(v: &mut [Complex64], axes: &PauliString, a: Complex64, b: Complex64) {
    let x_mask = axes.x_mask() as usize;
    let z_mask = axes.z_mask();
    let yp = y_phase(axes);
    if x_mask == 0 {
        for (x, amp) in v.iter_mut().enumerate() {
            *amp *= a + b * pauli_phase(x, z_mask, yp);
        }
        return;
    }
    for x in 0..v.len() {
        let y = x ^ x_mask;
        if x < y {
            let (vx, vy) = (v[x], v[y]);
            v[x] = a * vx + b * pauli_phase(y, z_mask, yp) * vy;
            v[y] = a * vy + b * pauli_phase(x, z_mask, yp) * vx;
        }
    }
}

/// `<u| P |w>` over one register.
fn pauli_inner(u: &[Complex64], axes: &PauliString, w: &[Complex64]) -> Complex64 {
    let x_mask = axes.x_mask() as usize;
    let z_mask = axes.z_mask();
    let yp = y_phase(axes);
    w.iter()
        .enumerate()
        .map(|(x, amp)| u[x ^ x_mask].conj() * pauli_phase(x, z_mask, yp) * amp)
        .sum()
}

/// Mean of `n_shots` simulated `+-1` outcomes with `P(+1) = (1 + expectation) / 2`.
pub fn shot_mean<R: Rng + ?Sized>(expectation: f64, n_shots: u64, rng: &mut R) -> f64 {
    assert!(n_shots >= 1, "at least one shot is required");
    let p = ((1.0 + expectation) / 2.0).clamp(0.0, 1.0);
    let plus = Binomial::new(n_shots, p)
        .expect("probability is clamped to [0, 1]")
        .sample(rng);
    (2.0 * plus as f64 - n_shots as f64) / n_shots as f64
}

/// Seeded shot sampling of `obs` on `state`.
pub fn sample_shots(state: &State, obs: &Observable, n_shots: u64, rng_seed: u64) -> Result<f64> {
    if n_shots == 0 {
        return Err(Error::InvalidArgument("n_shots must be at least 1".into()));
    }
    let e = state.expectation(obs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok(shot_mean(e, n_shots, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{Pauli, Sign};
    use approx::assert_abs_diff_eq;

    fn term(axes: &str, coefficient: f64) -> PauliTerm {
        PauliTerm::new(coefficient, axes.parse().unwrap()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn plus_input_amplitudes() {
        let s = State::plus_input(1).unwrap();
        assert!(s.amplitudes().iter().all(|a| (*a - c(0.5, 0.0)).norm() < 1e-15));
        let s = State::plus_input(8).unwrap();
        assert_eq!(s.amplitudes().len(), 512);
        let expected = 2f64.powf(-4.5);
        assert!(s.amplitudes().iter().all(|a| (a.re - expected).abs() < 1e-15));
    }

    #[test]
    fn width_limits() {
        assert!(matches!(
            State::plus_input(0),
            Err(Error::WidthOverflow { .. })
        ));
        assert!(matches!(
            State::plus_input(22),
            Err(Error::WidthOverflow { requested: 23, cap: 22 })
        ));
        assert!(State::prepare_with_cap(3, InputState::Zero, 4).is_ok());
    }

    #[test]
    fn x_rotation_by_half_pi() {
        // ancilla |0>, system |0>
        let mut s = State::from_amplitudes(1, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        s.apply_time_op(&term("X", 1.0), std::f64::consts::FRAC_PI_2).unwrap();
        assert!((s.amplitudes()[1] - c(0.0, 1.0)).norm() < 1e-15);
        assert!(s.amplitudes()[0].norm() < 1e-15);
    }

    #[test]
    fn z_rotation_phases_zero_state() {
        let mut s = State::from_amplitudes(1, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let theta = 0.37;
        s.apply_time_op(&term("Z", 2.0), theta).unwrap();
        assert!((s.amplitudes()[0] - Complex64::from_polar(1.0, theta)).norm() < 1e-15);
    }

    #[test]
    fn negative_sign_reverses_rotation() {
        let mut a = State::plus_input(2).unwrap();
        let mut b = a.clone();
        a.apply_time_op(&term("XY", -1.0), 0.3).unwrap();
        b.apply_pauli_rotation(&"XY".parse().unwrap(), -0.3).unwrap();
        assert!(a.approx_eq(&b));
        assert_eq!(term("XY", -1.0).sign, Sign::Minus);
    }

    impl State {
        fn approx_eq(&self, other: &Self) -> bool {
            self.amplitudes
                .iter()
                .zip(&other.amplitudes)
                .all(|(a, b)| (a - b).norm() < 1e-14)
        }
    }

    #[test]
    fn expectations_of_simple_states() {
        let s = State::plus_input(1).unwrap();
        let x = Observable::system("X".parse().unwrap());
        assert_abs_diff_eq!(s.expectation(&x).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.expectation(&x.with_ancilla()).unwrap(), 1.0, epsilon = 1e-14);
        let z = State::prepare(1, InputState::Zero).unwrap();
        assert_abs_diff_eq!(z.expectation(&x).unwrap(), 0.0, epsilon = 1e-14);
        let zz = Observable::system("Z".parse().unwrap());
        assert_abs_diff_eq!(z.expectation(&zz).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn swift_zero_leaves_control_off_branch() {
        let mut s = State::prepare(2, InputState::Zero).unwrap();
        let before = s.amplitudes()[..4].to_vec();
        s.apply_swift_op(&term("XZ", 1.0), 0).unwrap();
        assert_eq!(&s.amplitudes()[..4], before.as_slice());
    }

    #[test]
    fn swift_zero_matches_gate_product_for_z() {
        // (S (x) I) . CZ on |+>|+>: amplitudes 1/2 * (1, 1, i, -i)
        let mut s = State::plus_input(1).unwrap();
        s.apply_swift_op(&term("Z", 1.0), 0).unwrap();
        let expected = [c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.5), c(0.0, -0.5)];
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!((a - e).norm() < 1e-15);
        }
    }

    #[test]
    fn identity_string_rotation_is_global_phase() {
        let mut s = State::plus_input(2).unwrap();
        s.apply_pauli_rotation(&PauliString::identity(2), 0.4).unwrap();
        let phase = Complex64::from_polar(8f64.sqrt().recip(), 0.4);
        assert!(s.amplitudes().iter().all(|a| (a - phase).norm() < 1e-14));
    }

    #[test]
    fn width_mismatch_is_reported() {
        let mut s = State::plus_input(2).unwrap();
        assert!(matches!(
            s.apply_time_op(&term("X", 1.0), 0.1),
            Err(Error::WidthMismatch { .. })
        ));
        let obs = Observable::system(PauliString::single(3, 0, Pauli::Z));
        assert!(s.expectation(&obs).is_err());
    }

    #[test]
    fn shots_are_deterministic_and_exact_at_extremes() {
        let s = State::plus_input(1).unwrap();
        let x = Observable::system("X".parse().unwrap());
        assert_eq!(sample_shots(&s, &x, 17, 5).unwrap(), 1.0);
        let z = Observable::system("Z".parse().unwrap());
        let a = sample_shots(&s, &z, 1000, 9).unwrap();
        let b = sample_shots(&s, &z, 1000, 9).unwrap();
        assert_eq!(a, b);
        assert!(sample_shots(&s, &z, 0, 9).is_err());
    }

    #[test]
    fn unbiased_shot_noise() {
        let s = State::plus_input(1).unwrap();
        let z = Observable::system("Z".parse().unwrap());
        let m = sample_shots(&s, &z, 1_000_000, 2024).unwrap();
        assert!(m.abs() < 0.005, "{m}");
    }
}
