//! Analytic systematic-error bounds, minimal segment counts and gate-count
//! tables.
//!
//! qDRIFT and qSWIFT bounds carry their full constants. Trotter counts use a
//! unit prefactor, so they follow the right scaling but not the exact constant.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default search cap for [`solve_min_n`].
pub const DEFAULT_N_CAP: u128 = 1_000_000_000_000_000_000;

/// Cap used by the command line, large enough for long-time tables.
pub const CLI_N_CAP: u128 = 1_000_000_000_000_000_000_000_000_000_000;

/// `eta(x, N) = 1/2 (1 + 1/(2 e x)) / (1 - (2 e x)^2 / N)`.
pub fn eta(x: f64, segments: u128) -> Result<f64> {
    let threshold = (2.0 * E * x).powi(2);
    let n = segments as f64;
    if threshold >= n {
        return Err(Error::VacuousRegion { threshold, segments });
    }
    Ok(0.5 * (1.0 + 1.0 / (2.0 * E * x)) / (1.0 - threshold / n))
}

/// Order-`K` bound `eta(lambda t, N) ((2 e lambda t)^2 / N)^K`.
pub fn qswift_bound(lambda_t: f64, segments: u128, order: usize) -> Result<f64> {
    let eta = eta(lambda_t, segments)?;
    Ok(eta * ((2.0 * E * lambda_t).powi(2) / segments as f64).powi(order as i32))
}

/// qDRIFT bound `2 (lambda t)^2 / N * e^{2 lambda t / N}`.
pub fn qdrift_bound(lambda_t: f64, segments: u128) -> f64 {
    let n = segments as f64;
    2.0 * lambda_t * lambda_t / n * (2.0 * lambda_t / n).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundKind {
    Qdrift,
    Qswift(usize),
}

impl BoundKind {
    pub fn evaluate(self, lambda_t: f64, segments: u128) -> Result<f64> {
        match self {
            BoundKind::Qdrift => Ok(qdrift_bound(lambda_t, segments)),
            BoundKind::Qswift(k) => qswift_bound(lambda_t, segments, k),
        }
    }

    /// Smallest `N` where the bound is defined.
    fn first_valid(self, lambda_t: f64) -> u128 {
        match self {
            BoundKind::Qdrift => 1,
            BoundKind::Qswift(_) => {
                let threshold = (2.0 * E * lambda_t).powi(2);
                if threshold >= u128::MAX as f64 {
                    u128::MAX
                } else {
                    // above 2^53 the integer after `threshold` may round back onto it
                    (threshold.floor() as u128 + 1).max(threshold.next_up().ceil() as u128)
                }
            }
        }
    }
}

/// Smallest `N <= cap` with `bound(N) <= epsilon`, by doubling then integer
/// bisection.
pub fn solve_min_n(kind: BoundKind, lambda_t: f64, epsilon: f64, cap: u128) -> Result<u128> {
    if !(epsilon > 0.0) || !(lambda_t >= 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive and lambda t non-negative".into()));
    }
    let ok = |n: u128| -> Result<bool> { Ok(kind.evaluate(lambda_t, n)? <= epsilon) };
    let start = kind.first_valid(lambda_t);
    if start > cap {
        return Err(Error::NoSolutionBelowCap { cap });
    }
    if ok(start)? {
        return Ok(start);
    }
    let mut lo = start;
    let mut step = start.max(1);
    let mut hi = loop {
        let candidate = lo.saturating_add(step).min(cap);
        if ok(candidate)? {
            break candidate;
        }
        if candidate == cap {
            return Err(Error::NoSolutionBelowCap { cap });
        }
        lo = candidate;
        step = step.saturating_mul(2);
    };
    // invariant: bound(lo) > epsilon >= bound(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Trotter gate count with unit prefactor.
///
/// Order `2k`: `r alpha L` with `alpha = 2 5^(k-1)` and
/// `r = ceil(alpha L Lambda t (alpha L Lambda t / eps)^(1/2k))`.
/// Order 1: `r L` with `r = ceil((L Lambda t)^2 / eps)`.
pub fn trotter_gate_count(terms: usize, lambda_max: f64, t: f64, epsilon: f64, order: usize) -> Result<f64> {
    if terms == 0 || !(lambda_max > 0.0) || !(t > 0.0) || !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("Trotter inputs must be positive".into()));
    }
    let l = terms as f64;
    if order == 1 {
        let r = ((l * lambda_max * t).powi(2) / epsilon).ceil().max(1.0);
        return Ok(r * l);
    }
    if order % 2 == 1 {
        return Err(Error::InvalidArgument(format!("unsupported Trotter order {order}")));
    }
    let k = (order / 2) as i32;
    let alpha = 2.0 * 5f64.powi(k - 1);
    let x = alpha * l * lambda_max * t;
    let r = (x * (x / epsilon).powf(1.0 / (2 * k) as f64)).ceil().max(1.0);
    Ok(r * alpha * l)
}

/// Minimum over orders 1, 2 and 4.
pub fn best_trotter_gate_count(terms: usize, lambda_max: f64, t: f64, epsilon: f64) -> Result<f64> {
    let mut best = f64::INFINITY;
    for order in [1, 2, 4] {
        best = best.min(trotter_gate_count(terms, lambda_max, t, epsilon, order)?);
    }
    Ok(best)
}

/// Serialized by its command-line name, e.g. `"qswift3"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum TableMethod {
    Qdrift,
    Qswift(usize),
    Trotter(usize),
    TrotterBest,
}

impl fmt::Display for TableMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableMethod::Qdrift => write!(f, "qdrift"),
            TableMethod::Qswift(k) => write!(f, "qswift{k}"),
            TableMethod::Trotter(o) => write!(f, "ts{o}"),
            TableMethod::TrotterBest => write!(f, "ts-best"),
        }
    }
}

impl From<TableMethod> for String {
    fn from(m: TableMethod) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for TableMethod {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for TableMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let bad = || Error::InvalidArgument(format!("unknown table method '{s}'"));
        if lower == "qdrift" {
            return Ok(TableMethod::Qdrift);
        }
        if lower == "ts-best" || lower == "tsbest" {
            return Ok(TableMethod::TrotterBest);
        }
        if let Some(rest) = lower.strip_prefix("qswift") {
            let k: usize = rest.parse().map_err(|_| bad())?;
            return match k {
                0 => Err(bad()),
                1 => Ok(TableMethod::Qdrift),
                k => Ok(TableMethod::Qswift(k)),
            };
        }
        if let Some(rest) = lower.strip_prefix("ts") {
            let o: usize = rest.parse().map_err(|_| bad())?;
            if o == 1 || (o >= 2 && o.is_multiple_of(2)) {
                return Ok(TableMethod::Trotter(o));
            }
        }
        Err(bad())
    }
}

/// Hamiltonian summary used by the tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelScales {
    /// Sum of term strengths.
    pub lambda: f64,
    /// Largest term strength.
    pub lambda_max: f64,
    pub terms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub t: f64,
    pub lambda_t: f64,
    pub method: TableMethod,
    pub epsilon: f64,
    /// `None` when no count exists below the search cap.
    pub gates: Option<u128>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTable {
    pub rows: Vec<TableRow>,
}

impl BoundTable {
    pub fn has_missing(&self) -> bool {
        self.rows.iter().any(|r| r.gates.is_none())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,lambda_t,method,epsilon,gates\n");
        for row in &self.rows {
            let gates = match row.gates {
                Some(g) => g.to_string(),
                None => "NA".to_string(),
            };
            out.push_str(&format!(
                "{:e},{:e},{},{:e},{}\n",
                row.t, row.lambda_t, row.method, row.epsilon, gates
            ));
        }
        out
    }

    /// Gate count for `(t, method)`.
    pub fn gates(&self, t: f64, method: TableMethod) -> Option<u128> {
        self.rows
            .iter()
            .find(|r| r.t == t && r.method == method)
            .and_then(|r| r.gates)
    }
}

fn row_gates(scales: ModelScales, t: f64, method: TableMethod, epsilon: f64, cap: u128) -> Result<Option<u128>> {
    let lambda_t = scales.lambda * t;
    let solved = match method {
        TableMethod::Qdrift => solve_min_n(BoundKind::Qdrift, lambda_t, epsilon, cap),
        TableMethod::Qswift(k) => solve_min_n(BoundKind::Qswift(k), lambda_t, epsilon, cap),
        TableMethod::Trotter(o) => return trotter_gate_count(scales.terms, scales.lambda_max, t, epsilon, o).map(|g| Some(g as u128)),
        TableMethod::TrotterBest => {
            return best_trotter_gate_count(scales.terms, scales.lambda_max, t, epsilon).map(|g| Some(g as u128))
        }
    };
    match solved {
        Ok(n) => Ok(Some(n)),
        Err(Error::NoSolutionBelowCap { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// One row per `(t, method)`, t-major.
pub fn sweep_table(
    scales: ModelScales,
    t_grid: &[f64],
    methods: &[TableMethod],
    epsilon: f64,
    cap: u128,
) -> Result<BoundTable> {
    if t_grid.is_empty() || methods.is_empty() {
        return Err(Error::InvalidArgument("t grid and method list must be nonempty".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument("epsilon must lie in (0, 1)".into()));
    }
    let cells: Vec<(f64, TableMethod)> = t_grid
        .iter()
        .flat_map(|&t| methods.iter().map(move |&m| (t, m)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(t, method)| {
            Ok(TableRow {
                t,
                lambda_t: scales.lambda * t,
                method,
                epsilon,
                gates: row_gates(scales, t, method, epsilon, cap)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundTable { rows })
}

/// `log:a:b:n` gives `n` log-spaced points from `a` to `b` inclusive; anything
/// else is read as a comma-separated list.
pub fn parse_t_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("bad t grid '{spec}'"));
    let positive = |s: &str| -> Result<f64> {
        let v: f64 = s.trim().parse().map_err(|_| bad())?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(bad())
        }
    };
    if let Some(rest) = spec.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let (a, b) = (positive(parts[0])?, positive(parts[1])?);
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        return match n {
            0 => Err(bad()),
            1 => Ok(vec![a]),
            n => {
                let (la, lb) = (a.log10(), b.log10());
                Ok((0..n)
                    .map(|i| {
                        if i == n - 1 {
                            b
                        } else {
                            10f64.powf(la + (lb - la) * i as f64 / (n - 1) as f64)
                        }
                    })
                    .collect())
            }
        };
    }
    spec.split(',').map(positive).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_values() {
        assert!((eta(1.0, 100).unwrap() - 0.8398).abs() < 1e-3);
        let far = eta(1e3, 1u128 << 62).unwrap();
        assert!((far - 0.5).abs() < 1e-3);
        assert!(matches!(eta(1.0, 29), Err(Error::VacuousRegion { .. })));
        // eta <= 3/2 when 1 <= x <= sqrt(N) / (2 sqrt 2 e)
        for n in [100u128, 1000, 100_000] {
            let upper = (n as f64).sqrt() / (2.0 * 2f64.sqrt() * E);
            for i in 0..=10 {
                let x = 1.0 + (upper - 1.0) * i as f64 / 10.0;
                if x >= 1.0 {
                    assert!(eta(x, n).unwrap() <= 1.5 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn qswift_bound_scaling() {
        let b1 = qswift_bound(1.0, 1000, 3).unwrap();
        let b2 = qswift_bound(1.0, 2000, 3).unwrap();
        let eta_ratio = eta(1.0, 1000).unwrap() / eta(1.0, 2000).unwrap();
        assert!((b1 / b2 - 8.0 * eta_ratio).abs() < 1e-9);
        for n in [100u128, 1000] {
            for k in 1..6 {
                assert!(qswift_bound(1.0, n, k + 1).unwrap() <= qswift_bound(1.0, n, k).unwrap());
            }
        }
    }

    #[test]
    fn qdrift_bound_values() {
        let b = qdrift_bound(1.0, 2000);
        assert!((b - 1e-3 * (1e-3f64).exp()).abs() < 1e-15);
        assert_eq!(qdrift_bound(0.0, 5), 0.0);
        assert!(qdrift_bound(1.0, 1 << 40) < 1e-11);
    }

    #[test]
    fn solve_qdrift_example() {
        let n = solve_min_n(BoundKind::Qdrift, 1.0, 1e-3, DEFAULT_N_CAP).unwrap();
        // 2/2002 * e^{2/2002} = 0.99999950e-3
        assert_eq!(n, 2002);
        assert!(qdrift_bound(1.0, n) <= 1e-3);
        assert!(qdrift_bound(1.0, n - 1) > 1e-3);
    }

    #[test]
    fn solve_qswift_boundary() {
        let n = solve_min_n(BoundKind::Qswift(3), 1.0, 1e-3, DEFAULT_N_CAP).unwrap();
        assert!((100..1000).contains(&n), "{n}");
        assert!(qswift_bound(1.0, n, 3).unwrap() <= 1e-3);
        assert!(qswift_bound(1.0, n - 1, 3).unwrap() > 1e-3);
        // generous epsilon returns the first valid N
        let first = solve_min_n(BoundKind::Qswift(3), 1.0, 1e6, DEFAULT_N_CAP).unwrap();
        assert_eq!(first, (2.0 * E).powi(2).floor() as u128 + 1);
        assert!(matches!(
            solve_min_n(BoundKind::Qdrift, 1.0, 1e-3, 100),
            Err(Error::NoSolutionBelowCap { cap: 100 })
        ));
    }

    #[test]
    fn trotter_counts() {
        let small = trotter_gate_count(10, 1.0, 1.0, 1e-3, 2).unwrap();
        let smaller_eps = trotter_gate_count(10, 1.0, 1.0, 1e-7, 2).unwrap();
        // order 2: count ~ eps^(-1/2)
        assert!((smaller_eps / small / 100.0 - 1.0).abs() < 0.01);
        let doubled = trotter_gate_count(20, 1.0, 1.0, 1e-3, 4).unwrap();
        let base = trotter_gate_count(10, 1.0, 1.0, 1e-3, 4).unwrap();
        let expected = 4.0 * 2f64.powf(0.25);
        assert!((doubled / base / expected - 1.0).abs() < 0.01);
        // order 4 wins at small epsilon, order 2 at large
        let ord2 = |eps| trotter_gate_count(10, 1.0, 1.0, eps, 2).unwrap();
        let ord4 = |eps| trotter_gate_count(10, 1.0, 1.0, eps, 4).unwrap();
        assert!(ord2(0.5) < ord4(0.5));
        assert!(ord4(1e-12) < ord2(1e-12));
        assert_eq!(trotter_gate_count(3, 1.0, 1.0, 0.5, 1).unwrap(), 18.0 * 3.0);
    }

    #[test]
    fn grid_parsing() {
        let g = parse_t_grid("log:1e4:1e10:25").unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!(g[0], 1e4);
        assert_eq!(g[24], 1e10);
        assert!((g[4] - 1e5).abs() < 1e-6);
        assert_eq!(parse_t_grid("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_t_grid("log:1:2").is_err());
        assert!(parse_t_grid("-1").is_err());
    }

    #[test]
    fn table_rows_and_ratios() {
        let scales = ModelScales {
            lambda: 1.0,
            lambda_max: 0.1,
            terms: 100,
        };
        let grid = parse_t_grid("log:10:1e5:5").unwrap();
        let methods = [TableMethod::Qdrift, TableMethod::Qswift(3), TableMethod::Qswift(6)];
        let table = sweep_table(scales, &grid, &methods, 1e-3, DEFAULT_N_CAP).unwrap();
        assert_eq!(table.rows.len(), 15);
        assert_eq!(table.rows[1].method, TableMethod::Qswift(3));
        for &t in &grid {
            let ratio =
                table.gates(t, TableMethod::Qdrift).unwrap() as f64 / table.gates(t, TableMethod::Qswift(3)).unwrap() as f64;
            assert!(ratio > 5.0 && ratio < 30.0, "t {t}: {ratio}");
        }
        for m in methods {
            let column: Vec<u128> = grid.iter().map(|&t| table.gates(t, m).unwrap()).collect();
            assert!(column.windows(2).all(|w| w[0] <= w[1]));
        }
        let csv = table.to_csv();
        assert!(csv.starts_with("t,lambda_t,method,epsilon,gates\n"));
        assert_eq!(csv.lines().count(), 16);
    }

    #[test]
    fn min_n_is_monotone_in_epsilon() {
        for kind in [BoundKind::Qdrift, BoundKind::Qswift(2), BoundKind::Qswift(3)] {
            let mut previous = 0;
            for eps in [1e-1, 1e-2, 1e-3, 1e-4, 1e-6] {
                let n = solve_min_n(kind, 10.0, eps, DEFAULT_N_CAP).unwrap();
                assert!(n >= previous);
                previous = n;
            }
        }
    }

    #[test]
    fn method_names() {
        for m in [
            TableMethod::Qdrift,
            TableMethod::Qswift(3),
            TableMethod::Trotter(1),
            TableMethod::Trotter(4),
            TableMethod::TrotterBest,
        ] {
            assert_eq!(m.to_string().parse::<TableMethod>().unwrap(), m);
        }
        assert!("ts3".parse::<TableMethod>().is_err());
    }
}
