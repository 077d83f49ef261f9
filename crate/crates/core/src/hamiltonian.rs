//! Pauli-sum Hamiltonians and the sampling quantities derived from them.
//!
//! A model is `H = sum_l h_l H_l` where every `H_l = sign_l * P_l` is a signed
//! Pauli string (unit spectral norm) and every strength `h_l` is positive.
//! The qDRIFT distribution is `p_l = h_l / lambda` with `lambda = sum_l h_l`.
//!
//! # File format
//!
//! ```text
//! # comment
//! 0.5  XIZ
//! -0.25 zzi
//! ```
//!
//! One term per line, `<coefficient> <axes>`. Axis letters are case-insensitive.
//! Repeated strings are merged by summing coefficients and terms that cancel
//! are dropped.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest register a Pauli string can describe (masks are `u64`).
pub const MAX_PAULI_WIDTH: usize = 63;

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis.
///
/// Character `j` of the textual form acts on qubit `j`; qubit 0 is the most
/// significant bit of a basis index, so the dense matrix is the Kronecker
/// product in string order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    axes: Vec<Pauli>,
}

impl PauliString {
    pub fn new(axes: Vec<Pauli>) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_PAULI_WIDTH {
            return Err(Error::InvalidArgument(format!(
                "Pauli string width must be in 1..={MAX_PAULI_WIDTH}, got {}",
                axes.len()
            )));
        }
        Ok(Self { axes })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            axes: vec![Pauli::I; n_qubits],
        }
    }

    /// A single `pauli` acting on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, pauli: Pauli) -> Self {
        let mut axes = vec![Pauli::I; n_qubits];
        axes[qubit] = pauli;
        Self { axes }
    }

    pub fn n_qubits(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Pauli] {
        &self.axes
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|p| *p == Pauli::I)
    }

    fn bit(&self, qubit: usize) -> u64 {
        1u64 << (self.axes.len() - 1 - qubit)
    }

    /// Bits flipped by the string (X or Y factors).
    pub fn x_mask(&self) -> u64 {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p, Pauli::X | Pauli::Y))
            .fold(0, |m, (q, _)| m | self.bit(q))
    }

    /// Bits that pick up a `-1` phase when set (Z or Y factors).
    pub fn z_mask(&self) -> u64 {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p, Pauli::Z | Pauli::Y))
            .fold(0, |m, (q, _)| m | self.bit(q))
    }

    pub fn y_count(&self) -> u32 {
        self.axes.iter().filter(|p| **p == Pauli::Y).count() as u32
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.axes {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let axes = s
            .chars()
            .map(|c| {
                Pauli::from_char(c).ok_or_else(|| {
                    Error::InvalidArgument(format!("illegal Pauli character {c:?} in {s:?}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }
}

/// Phase folded out of a raw coefficient so that strengths stay positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(value: f64) -> Self {
        if value < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// One generator `H_l = sign * P` together with its strength `h_l > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub axes: PauliString,
    pub strength: f64,
    pub sign: Sign,
}

impl PauliTerm {
    pub fn new(coefficient: f64, axes: PauliString) -> Result<Self> {
        if !coefficient.is_finite() || coefficient == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "term coefficient must be finite and nonzero, got {coefficient}"
            )));
        }
        Ok(Self {
            axes,
            strength: coefficient.abs(),
            sign: Sign::of(coefficient),
        })
    }

    /// Raw signed coefficient `sign * strength`.
    pub fn coefficient(&self) -> f64 {
        self.sign.value() * self.strength
    }
}

/// Normalized Pauli-sum Hamiltonian. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianModel {
    terms: Vec<PauliTerm>,
    n_qubits: usize,
    lambda: f64,
    lambda_max: f64,
    probs: Vec<f64>,
}

impl HamiltonianModel {
    /// Builds a model from raw `(coefficient, axes)` pairs, merging duplicate
    /// strings and dropping terms that cancel.
    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, PauliString)>,
    {
        let raw: Vec<(usize, f64, PauliString)> = terms
            .into_iter()
            .enumerate()
            .map(|(i, (c, p))| (i + 1, c, p))
            .collect();
        Self::from_numbered(raw)
    }

    fn from_numbered(raw: Vec<(usize, f64, PauliString)>) -> Result<Self> {
        let Some((_, _, first)) = raw.first() else {
            return Err(Error::EmptyModel);
        };
        let n_qubits = first.n_qubits();
        let mut order: Vec<PauliString> = Vec::new();
        let mut sums: HashMap<PauliString, f64> = HashMap::new();
        let mut raw_lambda = 0.0;
        for (line, coefficient, axes) in raw {
            if axes.n_qubits() != n_qubits {
                return Err(Error::InconsistentWidth {
                    line,
                    expected: n_qubits,
                    found: axes.n_qubits(),
                });
            }
            if !coefficient.is_finite() {
                return Err(Error::MalformedLine {
                    line,
                    reason: format!("coefficient {coefficient} is not finite"),
                });
            }
            raw_lambda += coefficient.abs();
            match sums.get_mut(&axes) {
                Some(c) => *c += coefficient,
                None => {
                    sums.insert(axes.clone(), coefficient);
                    order.push(axes);
                }
            }
        }
        let zero_tol = 1e-15 * raw_lambda;
        let terms: Vec<PauliTerm> = order
            .into_iter()
            .filter_map(|axes| {
                let c = sums[&axes];
                (c.abs() > zero_tol).then(|| PauliTerm {
                    axes,
                    strength: c.abs(),
                    sign: Sign::of(c),
                })
            })
            .collect();
        if terms.is_empty() {
            return Err(Error::EmptyModel);
        }
        let lambda: f64 = terms.iter().map(|t| t.strength).sum();
        let lambda_max = terms.iter().map(|t| t.strength).fold(0.0, f64::max);
        let probs = terms.iter().map(|t| t.strength / lambda).collect();
        Ok(Self {
            terms,
            n_qubits,
            lambda,
            lambda_max,
            probs,
        })
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn term(&self, index: usize) -> &PauliTerm {
        &self.terms[index]
    }

    /// Number of terms `L`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `lambda = sum_l h_l`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `Lambda = max_l h_l`.
    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// qDRIFT sampling distribution `p_l = h_l / lambda`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Per-segment time `tau = lambda t / N`.
    pub fn tau(&self, t: f64, segments: usize) -> f64 {
        tau(self, t, segments)
    }

    /// Serializes back into the line format accepted by [`parse_hamiltonian`].
    pub fn to_text(&self) -> String {
        self.terms
            .iter()
            .map(|t| format!("{:e} {}\n", t.coefficient(), t.axes))
            .collect()
    }
}

/// `tau = lambda t / N`.
pub fn tau(model: &HamiltonianModel, t: f64, segments: usize) -> f64 {
    assert!(segments >= 1, "segment count must be positive");
    model.lambda * t / segments as f64
}

/// Parses the line-oriented Hamiltonian format.
pub fn parse_hamiltonian(text: &str) -> Result<HamiltonianModel> {
    let mut raw = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(coef), Some(axes), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::MalformedLine {
                line: line_no,
                reason: format!("expected `<coefficient> <axes>`, got {trimmed:?}"),
            });
        };
        let coefficient: f64 = coef.parse().map_err(|_| Error::MalformedLine {
            line: line_no,
            reason: format!("bad coefficient {coef:?}"),
        })?;
        let axes: PauliString = axes.parse().map_err(|e: Error| Error::MalformedLine {
            line: line_no,
            reason: e.to_string(),
        })?;
        raw.push((line_no, coefficient, axes));
    }
    HamiltonianModel::from_numbered(raw)
}

impl FromStr for HamiltonianModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_hamiltonian(s)
    }
}
