//! Compilation of a Hamiltonian into executable gate plans.
//!
//! Plans list instructions in application order. Term indices are zero-based
//! in memory and one-based in the text form.

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exact_channels::{binomial, k_subsets};
use crate::hamiltonian::HamiltonianModel;
use crate::rng::stream;
use crate::statevector::State;

/// Cap on the number of plans produced by exhaustive enumeration.
pub const MAX_ENUMERATED_PLANS: u128 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Instruction {
    /// `e^{i angle H_l}` on the system register.
    Time { term: usize, angle: f64 },
    /// Swift operator `S_l^(bit)`.
    Swift { term: usize, bit: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Ts1,
    Ts2,
    /// Order `2k` Suzuki recursion.
    Ts2k(usize),
    Rts1,
    Rts2,
    Qdrift,
    Qswift(usize),
    QswiftAll,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Ts1 => write!(f, "ts1"),
            Method::Ts2 => write!(f, "ts2"),
            Method::Ts2k(k) => write!(f, "ts{}", 2 * k),
            Method::Rts1 => write!(f, "rts1"),
            Method::Rts2 => write!(f, "rts2"),
            Method::Qdrift => write!(f, "qdrift"),
            Method::Qswift(k) => write!(f, "qswift{k}"),
            Method::QswiftAll => write!(f, "qswift-all"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let bad = || Error::InvalidArgument(format!("unknown method '{s}'"));
        let number = |rest: &str| rest.parse::<usize>().map_err(|_| bad());
        match lower.as_str() {
            "ts1" => Ok(Method::Ts1),
            "ts2" => Ok(Method::Ts2),
            "rts1" => Ok(Method::Rts1),
            "rts2" => Ok(Method::Rts2),
            "qdrift" => Ok(Method::Qdrift),
            "qswift-all" | "qswift_all" | "qswiftall" => Ok(Method::QswiftAll),
            other => {
                if let Some(rest) = other.strip_prefix("qswift") {
                    match number(rest)? {
                        0 => Err(bad()),
                        1 => Ok(Method::Qdrift),
                        k => Ok(Method::Qswift(k)),
                    }
                } else if let Some(rest) = other.strip_prefix("ts") {
                    let order = number(rest)?;
                    if order < 4 || order % 2 == 1 {
                        return Err(bad());
                    }
                    Ok(Method::Ts2k(order / 2))
                } else {
                    Err(bad())
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GatePlan {
    pub ops: Vec<Instruction>,
    pub n_segments: usize,
    pub method: Method,
    /// Estimator weight sign; `-1` for all-order plans with an odd number of
    /// `s = 1` blocks.
    pub sign: f64,
}

impl GatePlan {
    fn new(method: Method, n_segments: usize) -> Self {
        Self {
            ops: Vec::new(),
            n_segments,
            method,
            sign: 1.0,
        }
    }

    pub fn time_op_count(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, Instruction::Time { .. })).count()
    }

    pub fn swift_op_count(&self) -> usize {
        self.ops.len() - self.time_op_count()
    }

    /// Runs every instruction on `state`.
    pub fn execute(&self, model: &HamiltonianModel, state: &mut State) -> Result<()> {
        for op in &self.ops {
            match *op {
                Instruction::Time { term, angle } => state.apply_time_op(model.term(term), angle)?,
                Instruction::Swift { term, bit } => state.apply_swift_op(model.term(term), bit)?,
            }
        }
        Ok(())
    }

    /// Line form: `T <l> <angle>` / `S <l> <b>` with one-based `l`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for op in &self.ops {
            match op {
                Instruction::Time { term, angle } => out.push_str(&format!("T {} {:e}\n", term + 1, angle)),
                Instruction::Swift { term, bit } => out.push_str(&format!("S {} {}\n", term + 1, bit)),
            }
        }
        out
    }

    /// Parses the line form; segment count and method are not stored in it.
    pub fn from_text(text: &str, method: Method, n_segments: usize) -> Result<Self> {
        let mut plan = GatePlan::new(method, n_segments);
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let fields: Vec<&str> = raw.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            let malformed = |reason: &str| Error::MalformedLine {
                line,
                reason: reason.to_string(),
            };
            if fields.len() != 3 {
                return Err(malformed("expected three fields"));
            }
            let term: usize = fields[1].parse().map_err(|_| malformed("bad term index"))?;
            if term == 0 {
                return Err(malformed("term indices start at 1"));
            }
            let op = match fields[0] {
                "T" => Instruction::Time {
                    term: term - 1,
                    angle: fields[2].parse().map_err(|_| malformed("bad angle"))?,
                },
                "S" => match fields[2] {
                    "0" => Instruction::Swift { term: term - 1, bit: 0 },
                    "1" => Instruction::Swift { term: term - 1, bit: 1 },
                    _ => return Err(malformed("swift bit must be 0 or 1")),
                },
                _ => return Err(malformed("opcode must be T or S")),
            };
            plan.ops.push(op);
        }
        Ok(plan)
    }
}

/// `(term, multiplier of t)` for one Suzuki step of the given order.
fn suzuki_step(model: &HamiltonianModel, order: usize, scale: f64, out: &mut Vec<(usize, f64)>) {
    let l = model.len();
    if order == 2 {
        for i in (0..l).rev() {
            out.push((i, model.term(i).strength * scale / 2.0));
        }
        for i in 0..l {
            out.push((i, model.term(i).strength * scale / 2.0));
        }
        return;
    }
    let k = order / 2;
    let p = 1.0 / (4.0 - 4f64.powf(1.0 / (2 * k - 1) as f64));
    for factor in [p, p, 1.0 - 4.0 * p, p, p] {
        suzuki_step(model, order - 2, scale * factor, out);
    }
}

fn validate_trotter(r: usize, order: usize) -> Result<Method> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    match order {
        1 => Ok(Method::Ts1),
        2 => Ok(Method::Ts2),
        o if o >= 4 && o % 2 == 0 => Ok(Method::Ts2k(o / 2)),
        o => Err(Error::InvalidArgument(format!("unsupported Trotter order {o}"))),
    }
}

/// Deterministic Trotter-Suzuki plan with `r` repetitions.
pub fn trotter_plan(model: &HamiltonianModel, t: f64, r: usize, order: usize) -> Result<GatePlan> {
    let method = validate_trotter(r, order)?;
    let dt = t / r as f64;
    let mut step = Vec::new();
    if order == 1 {
        step.extend((0..model.len()).map(|i| (i, model.term(i).strength * dt)));
    } else {
        suzuki_step(model, order, dt, &mut step);
    }
    let mut plan = GatePlan::new(method, r);
    for _ in 0..r {
        plan.ops
            .extend(step.iter().map(|&(term, angle)| Instruction::Time { term, angle }));
    }
    Ok(plan)
}

/// Randomized Trotter plan: every segment draws a fresh uniform term order.
pub fn randomized_trotter_plan(
    model: &HamiltonianModel,
    t: f64,
    r: usize,
    order: usize,
    rng_seed: u64,
) -> Result<GatePlan> {
    let method = match (validate_trotter(r, order)?, order) {
        (_, 1) => Method::Rts1,
        (_, 2) => Method::Rts2,
        _ => return Err(Error::InvalidArgument("randomized Trotter supports orders 1 and 2".into())),
    };
    let mut rng = stream(rng_seed);
    let dt = t / r as f64;
    let mut plan = GatePlan::new(method, r);
    let mut perm: Vec<usize> = (0..model.len()).collect();
    for _ in 0..r {
        perm.sort_unstable();
        perm.shuffle(&mut rng);
        let half = if order == 1 { 1.0 } else { 0.5 };
        let forward = perm.iter().map(|&i| (i, model.term(i).strength * dt * half));
        let ops: Vec<(usize, f64)> = if order == 1 {
            forward.collect()
        } else {
            let f: Vec<_> = forward.collect();
            f.iter().chain(f.iter().rev()).copied().collect()
        };
        plan.ops
            .extend(ops.into_iter().map(|(term, angle)| Instruction::Time { term, angle }));
    }
    Ok(plan)
}

fn term_sampler(model: &HamiltonianModel) -> WeightedIndex<f64> {
    WeightedIndex::new(model.probs()).expect("probabilities are positive and finite")
}

/// qDRIFT plan: `N` time operators of angle `tau` with iid terms drawn from `p`.
pub fn qdrift_plan(model: &HamiltonianModel, t: f64, segments: usize, rng_seed: u64) -> Result<GatePlan> {
    if segments == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let mut rng = stream(rng_seed);
    Ok(qdrift_plan_with(model, t, segments, &term_sampler(model), &mut rng))
}

fn qdrift_plan_with<R: Rng + ?Sized>(
    model: &HamiltonianModel,
    t: f64,
    segments: usize,
    sampler: &WeightedIndex<f64>,
    rng: &mut R,
) -> GatePlan {
    let tau = model.tau(t, segments);
    let mut plan = GatePlan::new(Method::Qdrift, segments);
    plan.ops.extend((0..segments).map(|_| Instruction::Time {
        term: sampler.sample(rng),
        angle: tau,
    }));
    plan
}

/// Ordered compositions of `xi` into `k` parts, each at least 2, in
/// lexicographic order.
pub fn enumerate_g2(k: usize, xi: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, rest: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            if rest == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        if rest < 2 * k {
            return;
        }
        for first in 2..=rest - 2 * (k - 1) {
            prefix.push(first);
            rec(k - 1, rest - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k >= 1 {
        rec(k, xi, &mut Vec::new(), &mut out);
    }
    out
}

/// One correction bucket of the order-`K` expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionTerm {
    pub order: usize,
    pub k: usize,
    pub n_vec: Vec<usize>,
    pub xi: usize,
    /// `C(N, k) tau^xi / prod(n_j!)`.
    pub coeff: f64,
}

impl CorrectionTerm {
    /// Key such as `"2,2"`.
    pub fn key(&self) -> String {
        bucket_key(&self.n_vec)
    }
}

pub fn bucket_key(n_vec: &[usize]) -> String {
    n_vec.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
}

/// Buckets for `xi` in `2..=2K-2`, then `k`, then `n_vec` in lexicographic order.
pub fn correction_terms(model: &HamiltonianModel, t: f64, segments: usize, order: usize) -> Result<Vec<CorrectionTerm>> {
    if order == 0 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    if order > segments {
        return Err(Error::OrderExceedsSegments { order, segments });
    }
    let tau = model.tau(t, segments);
    let mut out = Vec::new();
    for xi in 2..=(2 * order).saturating_sub(2) {
        for k in 1..=order {
            for n_vec in enumerate_g2(k, xi) {
                let denom: f64 = n_vec.iter().map(|&n| (1..=n).map(|v| v as f64).product::<f64>()).product();
                out.push(CorrectionTerm {
                    order,
                    k,
                    xi,
                    coeff: binomial(segments, k) as f64 * tau.powi(xi as i32) / denom,
                    n_vec,
                });
            }
        }
    }
    Ok(out)
}

/// Choice of `s_j` and swift bits `b_j` for every block of a bucket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwiftAssignment {
    pub s: Vec<u8>,
    pub b: Vec<Vec<u8>>,
}

impl SwiftAssignment {
    /// All `2^(sum n_j + k)` assignments for `n_vec`.
    pub fn all(n_vec: &[usize]) -> Vec<SwiftAssignment> {
        let k = n_vec.len();
        let bits: usize = n_vec.iter().sum::<usize>() + k;
        (0u64..1 << bits)
            .map(|code| {
                let mut pos = 0;
                let mut take = || {
                    let v = ((code >> pos) & 1) as u8;
                    pos += 1;
                    v
                };
                let s: Vec<u8> = (0..k).map(|_| take()).collect();
                let b = n_vec.iter().map(|&n| (0..n).map(|_| take()).collect()).collect();
                SwiftAssignment { s, b }
            })
            .collect()
    }

    /// `(-1)^(sum s_j)`.
    pub fn sign(&self) -> f64 {
        if self.s.iter().map(|&v| v as u32).sum::<u32>() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn check(&self, n_vec: &[usize]) -> Result<()> {
        let ok = self.s.len() == n_vec.len()
            && self.b.len() == n_vec.len()
            && self.b.iter().zip(n_vec).all(|(b, &n)| b.len() == n)
            && self.s.iter().chain(self.b.iter().flatten()).all(|&v| v <= 1);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("swift assignment does not match the bucket shape".into()))
        }
    }
}

/// Term indices of one swift block: iid draws for `s = 0`, one draw repeated
/// for `s = 1`.
fn sample_block<R: Rng + ?Sized>(s: u8, n: usize, sampler: &WeightedIndex<f64>, rng: &mut R) -> Vec<usize> {
    if s == 0 {
        (0..n).map(|_| sampler.sample(rng)).collect()
    } else {
        vec![sampler.sample(rng); n]
    }
}

fn layout(
    segments: usize,
    tau: f64,
    sigma: &[usize],
    blocks: &[Vec<usize>],
    bits: &[Vec<u8>],
    fillers: &[usize],
    method: Method,
) -> GatePlan {
    let mut plan = GatePlan::new(method, segments);
    let (mut next_block, mut next_filler) = (0, 0);
    for seg in 0..segments {
        if next_block < sigma.len() && sigma[next_block] == seg {
            for (&term, &bit) in blocks[next_block].iter().zip(&bits[next_block]) {
                plan.ops.push(Instruction::Swift { term, bit });
            }
            next_block += 1;
        } else {
            plan.ops.push(Instruction::Time {
                term: fillers[next_filler],
                angle: tau,
            });
            next_filler += 1;
        }
    }
    plan
}

/// One random circuit for `term` under the fixed `(s, b)` assignment.
pub fn sample_swift_plan(
    model: &HamiltonianModel,
    t: f64,
    segments: usize,
    term: &CorrectionTerm,
    assignment: &SwiftAssignment,
    rng_seed: u64,
) -> Result<GatePlan> {
    let mut rng = stream(rng_seed);
    sample_swift_plan_with(model, t, segments, term, assignment, &term_sampler(model), &mut rng)
}

pub(crate) fn sample_swift_plan_with<R: Rng + ?Sized>(
    model: &HamiltonianModel,
    t: f64,
    segments: usize,
    term: &CorrectionTerm,
    assignment: &SwiftAssignment,
    sampler: &WeightedIndex<f64>,
    rng: &mut R,
) -> Result<GatePlan> {
    assignment.check(&term.n_vec)?;
    if term.k > segments {
        return Err(Error::OrderExceedsSegments {
            order: term.k,
            segments,
        });
    }
    let mut sigma = rand::seq::index::sample(rng, segments, term.k).into_vec();
    sigma.sort_unstable();
    let blocks: Vec<Vec<usize>> = assignment
        .s
        .iter()
        .zip(&term.n_vec)
        .map(|(&s, &n)| sample_block(s, n, sampler, rng))
        .collect();
    let fillers: Vec<usize> = (0..segments - term.k).map(|_| sampler.sample(rng)).collect();
    Ok(layout(
        segments,
        model.tau(t, segments),
        &sigma,
        &blocks,
        &assignment.b,
        &fillers,
        Method::Qswift(term.order),
    ))
}

/// Every plan `sample_swift_plan` can return, with its probability.
pub fn enumerate_swift_plans(
    model: &HamiltonianModel,
    t: f64,
    segments: usize,
    term: &CorrectionTerm,
    assignment: &SwiftAssignment,
) -> Result<Vec<(f64, GatePlan)>> {
    assignment.check(&term.n_vec)?;
    let l = model.len() as u128;
    let free_slots: usize = assignment
        .s
        .iter()
        .zip(&term.n_vec)
        .map(|(&s, &n)| if s == 0 { n } else { 1 })
        .sum::<usize>()
        + segments
        - term.k;
    let count = binomial(segments, term.k)
        .saturating_mul(l.checked_pow(free_slots as u32).unwrap_or(u128::MAX));
    if count > MAX_ENUMERATED_PLANS {
        return Err(Error::CombinatorialCap {
            count,
            cap: MAX_ENUMERATED_PLANS,
        });
    }
    let probs = model.probs();
    let subset_weight = 1.0 / binomial(segments, term.k) as f64;
    let tau = model.tau(t, segments);
    let mut out = Vec::with_capacity(count as usize);
    for sigma in k_subsets(segments, term.k) {
        for digits in mixed_radix(model.len(), free_slots) {
            let weight = subset_weight * digits.iter().map(|&d| probs[d]).product::<f64>();
            let mut it = digits.iter().copied();
            let blocks: Vec<Vec<usize>> = assignment
                .s
                .iter()
                .zip(&term.n_vec)
                .map(|(&s, &n)| {
                    if s == 0 {
                        it.by_ref().take(n).collect()
                    } else {
                        vec![it.next().expect("slot count matches"); n]
                    }
                })
                .collect();
            let fillers: Vec<usize> = it.collect();
            out.push((
                weight,
                layout(segments, tau, &sigma, &blocks, &assignment.b, &fillers, Method::Qswift(term.order)),
            ));
        }
    }
    Ok(out)
}

/// Every qDRIFT plan with its probability.
pub fn enumerate_qdrift_plans(model: &HamiltonianModel, t: f64, segments: usize) -> Result<Vec<(f64, GatePlan)>> {
    let count = (model.len() as u128)
        .checked_pow(segments as u32)
        .unwrap_or(u128::MAX);
    if count > MAX_ENUMERATED_PLANS {
        return Err(Error::CombinatorialCap {
            count,
            cap: MAX_ENUMERATED_PLANS,
        });
    }
    let tau = model.tau(t, segments);
    let probs = model.probs();
    Ok(mixed_radix(model.len(), segments)
        .map(|digits| {
            let mut plan = GatePlan::new(Method::Qdrift, segments);
            plan.ops
                .extend(digits.iter().map(|&term| Instruction::Time { term, angle: tau }));
            (digits.iter().map(|&d| probs[d]).product(), plan)
        })
        .collect())
}

/// All length-`len` digit vectors in base `base`.
fn mixed_radix(base: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current = Some(vec![0usize; len]);
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut next = out.clone();
        let mut i = 0;
        loop {
            if i == len {
                current = None;
                break;
            }
            next[i] += 1;
            if next[i] < base {
                current = Some(next);
                break;
            }
            next[i] = 0;
            i += 1;
        }
        Some(out)
    })
}

/// Weights `beta(n) = 2^(n+1) tau^n / n!` and their normaliser `B`.
#[derive(Debug, Clone)]
pub struct AllOrderSampler {
    pub tau: f64,
    /// `beta[i]` is `beta(i + 2)`.
    pub beta: Vec<f64>,
    /// `1 + sum_{n >= 2} beta(n)`.
    pub b_total: f64,
    choice: WeightedIndex<f64>,
    terms: WeightedIndex<f64>,
}

/// One all-order segment.
#[derive(Debug, Clone, PartialEq)]
pub enum AllOrderSegment {
    Drift { term: usize },
    Block { s: u8, terms: Vec<usize>, bits: Vec<u8> },
}

impl AllOrderSampler {
    pub fn new(model: &HamiltonianModel, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument("tau must be positive".into()));
        }
        let mut beta = Vec::new();
        // beta(1) = 4 tau, beta(n) = beta(n-1) * 2 tau / n
        let mut term = 4.0 * tau;
        let mut sum = 1.0;
        let mut n = 2usize;
        loop {
            term *= 2.0 * tau / n as f64;
            beta.push(term);
            sum += term;
            // once 2 tau / n < 1/2 the tail is below 2 * term
            if n as f64 > 4.0 * tau && 2.0 * term < 1e-16 * sum {
                break;
            }
            n += 1;
        }
        let mut weights = Vec::with_capacity(beta.len() + 1);
        weights.push(1.0);
        weights.extend(&beta);
        Ok(Self {
            tau,
            beta,
            b_total: sum,
            choice: WeightedIndex::new(&weights)
                .map_err(|e| Error::InvalidArgument(format!("all-order weights: {e}")))?,
            terms: term_sampler(model),
        })
    }

    /// Draws one segment: qDRIFT with probability `1/B`, otherwise an
    /// `n`-block with probability `beta(n)/B` and uniform `s` and bits.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> AllOrderSegment {
        match self.choice.sample(rng) {
            0 => AllOrderSegment::Drift {
                term: self.terms.sample(rng),
            },
            i => {
                let n = i + 1;
                let s: u8 = rng.random_range(0..2);
                let bits = (0..n).map(|_| rng.random_range(0..2)).collect();
                let terms = sample_block(s, n, &self.terms, rng);
                AllOrderSegment::Block { s, terms, bits }
            }
        }
    }
}

/// Seeded single draw of [`AllOrderSampler::sample`].
pub fn sample_all_order_segment(model: &HamiltonianModel, tau: f64, rng_seed: u64) -> Result<AllOrderSegment> {
    let sampler = AllOrderSampler::new(model, tau)?;
    Ok(sampler.sample(&mut stream(rng_seed)))
}

/// `N` all-order segments laid out as one plan; `sign` carries `(-1)^(sum s)`.
pub fn all_order_plan_with<R: Rng + ?Sized>(
    sampler: &AllOrderSampler,
    segments: usize,
    rng: &mut R,
) -> GatePlan {
    let mut plan = GatePlan::new(Method::QswiftAll, segments);
    for _ in 0..segments {
        match sampler.sample(rng) {
            AllOrderSegment::Drift { term } => plan.ops.push(Instruction::Time {
                term,
                angle: sampler.tau,
            }),
            AllOrderSegment::Block { s, terms, bits } => {
                if s == 1 {
                    plan.sign = -plan.sign;
                }
                plan.ops.extend(
                    terms
                        .into_iter()
                        .zip(bits)
                        .map(|(term, bit)| Instruction::Swift { term, bit }),
                );
            }
        }
    }
    plan
}

pub(crate) fn sampler_for(model: &HamiltonianModel) -> WeightedIndex<f64> {
    term_sampler(model)
}

pub(crate) fn qdrift_plan_from<R: Rng + ?Sized>(
    model: &HamiltonianModel,
    t: f64,
    segments: usize,
    sampler: &WeightedIndex<f64>,
    rng: &mut R,
) -> GatePlan {
    qdrift_plan_with(model, t, segments, sampler, rng)
}
