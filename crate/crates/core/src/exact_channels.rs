//! Dense superoperator oracle for small systems.
//!
//! Density matrices are vectorized by stacking columns, so
//! `vec(A rho B) = (B^T (x) A) vec(rho)` and the conjugation channel
//! `rho -> U rho U^dag` has matrix `conj(U) (x) U`. Channel composition is
//! the matrix product with the later channel on the left.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::compiler::enumerate_g2;
use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianModel, PauliString, PauliTerm};
use crate::statevector::{InputState, Observable};

pub type CMatrix = DMatrix<Complex64>;

/// Largest system width the superoperator oracle accepts.
pub const MAX_ORACLE_QUBITS: usize = 3;

/// Largest system width for dense state-vector references.
pub const MAX_DENSE_STATE_QUBITS: usize = 12;

/// Enumeration cap for [`mixture`].
pub const MAX_INTERLEAVINGS: u128 = 100_000;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_oracle_width(n: usize) -> Result<()> {
    if n > MAX_ORACLE_QUBITS {
        return Err(Error::DimensionCap {
            requested: n,
            cap: MAX_ORACLE_QUBITS,
        });
    }
    Ok(())
}

/// Dense matrix of a Pauli string (Kronecker product in string order).
pub fn pauli_matrix(axes: &PauliString) -> CMatrix {
    use crate::hamiltonian::Pauli;
    axes.axes().iter().fold(CMatrix::identity(1, 1), |acc, p| {
        let single = match p {
            Pauli::I => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]),
            Pauli::X => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            Pauli::Y => CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
            Pauli::Z => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        };
        acc.kronecker(&single)
    })
}

/// `H_l = sign * P`.
pub fn term_matrix(term: &PauliTerm) -> CMatrix {
    pauli_matrix(&term.axes) * Complex64::new(term.sign.value(), 0.0)
}

/// `H = sum_l h_l H_l`.
pub fn hamiltonian_matrix(model: &HamiltonianModel) -> CMatrix {
    let dim = 1usize << model.n_qubits();
    model
        .terms()
        .iter()
        .fold(CMatrix::zeros(dim, dim), |acc, t| {
            acc + term_matrix(t) * Complex64::new(t.strength, 0.0)
        })
}

/// `e^{i angle H_l}` in closed form.
pub fn time_unitary(term: &PauliTerm, angle: f64) -> CMatrix {
    let theta = term.sign.value() * angle;
    let p = pauli_matrix(&term.axes);
    let dim = p.nrows();
    CMatrix::identity(dim, dim) * Complex64::new(theta.cos(), 0.0) + p * Complex64::new(0.0, theta.sin())
}

/// Linear map on vectorized `2^n x 2^n` density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    pub matrix: CMatrix,
    pub n: usize,
}

impl Superoperator {
    fn dim(n: usize) -> usize {
        1usize << (2 * n)
    }

    pub fn identity(n: usize) -> Self {
        let d = Self::dim(n);
        Self {
            matrix: CMatrix::identity(d, d),
            n,
        }
    }

    pub fn zeros(n: usize) -> Self {
        let d = Self::dim(n);
        Self {
            matrix: CMatrix::zeros(d, d),
            n,
        }
    }

    /// `rho -> U rho U^dag`.
    pub fn conjugation(unitary: &CMatrix) -> Self {
        let n = unitary.nrows().trailing_zeros() as usize;
        Self {
            matrix: unitary.conjugate().kronecker(unitary),
            n,
        }
    }

    /// `rho -> A rho B`.
    pub fn sandwich(left: &CMatrix, right: &CMatrix) -> Self {
        let n = left.nrows().trailing_zeros() as usize;
        Self {
            matrix: right.transpose().kronecker(left),
            n,
        }
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &Superoperator) -> Self {
        Self {
            matrix: &self.matrix * &first.matrix,
            n: self.n,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: &self.matrix * Complex64::new(factor, 0.0),
            n: self.n,
        }
    }

    pub fn plus(&self, other: &Superoperator) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
            n: self.n,
        }
    }

    pub fn minus(&self, other: &Superoperator) -> Self {
        Self {
            matrix: &self.matrix - &other.matrix,
            n: self.n,
        }
    }

    pub fn pow(&self, exponent: usize) -> Self {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = result.after(&base);
            }
            base = base.after(&base);
            e >>= 1;
        }
        result
    }

    /// Applies the map to a density matrix.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = rho.nrows();
        let v = CMatrix::from_column_slice(d * d, 1, rho.as_slice());
        let out = &self.matrix * v;
        CMatrix::from_column_slice(d, d, out.as_slice())
    }

    pub fn frobenius_distance(&self, other: &Superoperator) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }

    /// Choi matrix `sum_ij |i><j| (x) E(|i><j|)`.
    pub fn choi(&self) -> CMatrix {
        let d = 1usize << self.n;
        let mut choi = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut e = CMatrix::zeros(d, d);
                e[(i, j)] = ONE;
                let out = self.apply(&e);
                choi.view_mut((i * d, j * d), (d, d)).copy_from(&out);
            }
        }
        choi
    }
}

/// `L_l(rho) = i [H_l, rho]`; `index` is zero-based.
pub fn liouvillian_term(model: &HamiltonianModel, index: usize) -> Result<Superoperator> {
    check_oracle_width(model.n_qubits())?;
    Ok(commutator_map(&term_matrix(model.term(index))))
}

fn commutator_map(h: &CMatrix) -> Superoperator {
    let d = h.nrows();
    let id = CMatrix::identity(d, d);
    let left = Superoperator::sandwich(h, &id);
    let right = Superoperator::sandwich(&id, h);
    Superoperator {
        matrix: (left.matrix - right.matrix) * I,
        n: left.n,
    }
}

/// `L = sum_l p_l L_l = (i / lambda) [H, .]`.
pub fn liouvillian(model: &HamiltonianModel) -> Result<Superoperator> {
    check_oracle_width(model.n_qubits())?;
    let h = hamiltonian_matrix(model) * Complex64::new(1.0 / model.lambda(), 0.0);
    Ok(commutator_map(&h))
}

/// Time operator `T_l(rho) = e^{i H_l tau} rho e^{-i H_l tau}`.
pub fn time_channel(model: &HamiltonianModel, index: usize, tau: f64) -> Result<Superoperator> {
    check_oracle_width(model.n_qubits())?;
    Ok(Superoperator::conjugation(&time_unitary(model.term(index), tau)))
}

/// qDRIFT channel `E_N = sum_l p_l T_l`.
pub fn qdrift_channel(model: &HamiltonianModel, tau: f64) -> Result<Superoperator> {
    check_oracle_width(model.n_qubits())?;
    let mut acc = Superoperator::zeros(model.n_qubits());
    for (l, p) in model.probs().iter().enumerate() {
        acc = acc.plus(&time_channel(model, l, tau)?.scaled(*p));
    }
    Ok(acc)
}

/// Ideal short-time channel `U_N`: conjugation by `e^{i H t / N}`.
pub fn ideal_channel(model: &HamiltonianModel, t: f64, segments: usize) -> Result<Superoperator> {
    check_oracle_width(model.n_qubits())?;
    let generator = hamiltonian_matrix(model) * Complex64::new(0.0, t / segments as f64);
    Ok(Superoperator::conjugation(&generator.exp()))
}

/// `L^(n) = L^n - sum_l p_l L_l^n`.
pub fn script_l_n(model: &HamiltonianModel, n: usize) -> Result<Superoperator> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("L^(n) needs n >= 2, got {n}")));
    }
    let mut acc = liouvillian(model)?.pow(n);
    for (l, p) in model.probs().iter().enumerate() {
        acc = acc.minus(&liouvillian_term(model, l)?.pow(n).scaled(*p));
    }
    Ok(acc)
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Mixture function: the sum over all `C(N, k)` order-preserving interleavings
/// of `parts` among `N - k` copies of `filler`.
///
/// Interleavings are enumerated explicitly. `parts[0]` is applied first among
/// the parts, matching the compiled plan layout.
pub fn mixture(parts: &[Superoperator], filler: &Superoperator, segments: usize) -> Result<Superoperator> {
    let k = parts.len();
    if k > segments {
        return Err(Error::InvalidArgument(format!(
            "{k} parts do not fit in {segments} segments"
        )));
    }
    let count = binomial(segments, k);
    if count > MAX_INTERLEAVINGS {
        return Err(Error::CombinatorialCap {
            count,
            cap: MAX_INTERLEAVINGS,
        });
    }
    let mut total = Superoperator::zeros(filler.n);
    for positions in k_subsets(segments, k) {
        let mut product = Superoperator::identity(filler.n);
        let mut next = 0;
        for seg in 0..segments {
            let op = if next < k && positions[next] == seg {
                next += 1;
                &parts[next - 1]
            } else {
                filler
            };
            product = op.after(&product);
        }
        total = total.plus(&product);
    }
    Ok(total)
}

/// Same sum as [`mixture`], accumulated by dynamic programming over
/// (parts placed, fillers placed) in `O(k N)` products.
pub fn mixture_dp(parts: &[Superoperator], filler: &Superoperator, segments: usize) -> Result<Superoperator> {
    let k = parts.len();
    if k > segments {
        return Err(Error::InvalidArgument(format!(
            "{k} parts do not fit in {segments} segments"
        )));
    }
    let fillers = segments - k;
    // row[j] holds the sum with i parts and j fillers applied so far
    let mut row: Vec<Superoperator> = Vec::with_capacity(fillers + 1);
    row.push(Superoperator::identity(filler.n));
    for j in 1..=fillers {
        let prev = filler.after(&row[j - 1]);
        row.push(prev);
    }
    for part in parts {
        let mut next: Vec<Superoperator> = Vec::with_capacity(fillers + 1);
        next.push(part.after(&row[0]));
        for j in 1..=fillers {
            let value = part.after(&row[j]).plus(&filler.after(&next[j - 1]));
            next.push(value);
        }
        row = next;
    }
    Ok(row.pop().expect("row is never empty"))
}

/// Sorted `k`-subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut c = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                current = Some(c);
                break;
            }
        }
        Some(out)
    })
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// One correction bucket `tau^xi / prod(n_j!) * M_{k,N-k}((L^(n_1), ..), E_N)`.
pub fn qswift_bucket(
    model: &HamiltonianModel,
    t: f64,
    segments: usize,
    n_vec: &[usize],
) -> Result<Superoperator> {
    let tau = model.tau(t, segments);
    let qdrift = qdrift_channel(model, tau)?;
    bucket_with(model, tau, segments, n_vec, &qdrift)
}

fn bucket_with(
    model: &HamiltonianModel,
    tau: f64,
    segments: usize,
    n_vec: &[usize],
    qdrift: &Superoperator,
) -> Result<Superoperator> {
    let parts = n_vec
        .iter()
        .map(|&n| script_l_n(model, n))
        .collect::<Result<Vec<_>>>()?;
    let xi: usize = n_vec.iter().sum();
    let weight = tau.powi(xi as i32) / n_vec.iter().map(|&n| factorial(n)).product::<f64>();
    Ok(mixture_dp(&parts, qdrift, segments)?.scaled(weight))
}

/// Order-`K` qSWIFT channel `E_N^N + sum of correction buckets up to xi = 2K-2`.
///
/// `K = 1` gives the plain qDRIFT channel `E_N^N`.
pub fn qswift_channel(model: &HamiltonianModel, t: f64, segments: usize, order: usize) -> Result<Superoperator> {
    check_oracle_width(model.n_qubits())?;
    if order == 0 || segments == 0 {
        return Err(Error::InvalidArgument("order and segments must be positive".into()));
    }
    if order > segments {
        return Err(Error::OrderExceedsSegments { order, segments });
    }
    let tau = model.tau(t, segments);
    let qdrift = qdrift_channel(model, tau)?;
    let mut total = qdrift.pow(segments);
    for xi in 2..=(2 * order).saturating_sub(2) {
        for k in 1..=order {
            for n_vec in enumerate_g2(k, xi) {
                if k > segments {
                    continue;
                }
                total = total.plus(&bucket_with(model, tau, segments, &n_vec, &qdrift)?);
            }
        }
    }
    Ok(total)
}

/// `|psi><psi|`.
pub fn density(state: &[Complex64]) -> CMatrix {
    let v = CMatrix::from_column_slice(state.len(), 1, state);
    &v * v.adjoint()
}

/// System density matrix of an [`InputState`].
pub fn input_density(n_qubits: usize, input: InputState) -> CMatrix {
    let dim = 1usize << n_qubits;
    let amps = match input {
        InputState::Plus => vec![Complex64::new((dim as f64).sqrt().recip(), 0.0); dim],
        InputState::Zero => {
            let mut v = vec![ZERO; dim];
            v[0] = ONE;
            v
        }
    };
    density(&amps)
}

/// Haar-ish random pure state (normalized complex Gaussian vector).
pub fn random_pure_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Vec<Complex64> {
    let dim = 1usize << n_qubits;
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}

/// `Tr(Q rho)` for a system observable (the ancilla flag is ignored).
pub fn expectation(obs: &Observable, rho: &CMatrix) -> f64 {
    (pauli_matrix(&obs.axes) * rho).trace().re
}

/// Schatten 1-norm.
pub fn trace_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().sum()
}

/// `max_rho 1/2 ||(a - b)(rho)||_1` over the supplied inputs; a lower bound on
/// the diamond distance between `a` and `b`.
pub fn trace_distance_surrogate(a: &Superoperator, b: &Superoperator, inputs: &[CMatrix]) -> f64 {
    let diff = a.minus(b);
    inputs
        .iter()
        .map(|rho| 0.5 * trace_norm(&diff.apply(rho)))
        .fold(0.0, f64::max)
}

/// Sampled lower bound on the induced trace norm `sup ||op(X)||_1 / ||X||_1`
/// using rank-one inputs `|u><v|`.
pub fn induced_trace_norm_lower_bound<R: Rng + ?Sized>(
    op: &Superoperator,
    samples: usize,
    rng: &mut R,
) -> f64 {
    (0..samples)
        .map(|_| {
            let u = random_pure_state(op.n, rng);
            let v = random_pure_state(op.n, rng);
            let x = CMatrix::from_column_slice(u.len(), 1, &u)
                * CMatrix::from_column_slice(v.len(), 1, &v).adjoint();
            trace_norm(&op.apply(&x)) / trace_norm(&x)
        })
        .fold(0.0, f64::max)
}

/// Exact `Tr(Q e^{iHt} rho e^{-iHt})` by dense evolution of a pure input.
pub fn ideal_expectation(
    model: &HamiltonianModel,
    t: f64,
    input: InputState,
    obs: &Observable,
) -> Result<f64> {
    let n = model.n_qubits();
    if n > MAX_DENSE_STATE_QUBITS {
        return Err(Error::DimensionCap {
            requested: n,
            cap: MAX_DENSE_STATE_QUBITS,
        });
    }
    let u = (hamiltonian_matrix(model) * Complex64::new(0.0, t)).exp();
    let rho = input_density(n, input);
    let evolved = &u * rho * u.adjoint();
    Ok(expectation(obs, &evolved))
}
