//! α-rank: the stationary distribution of a mutation-selection Markov chain
//! over pure strategy profiles.
//!
//! From profile σ a population is chosen uniformly, then a mutant strategy
//! uniformly among that population's alternatives; the mutant takes over
//! with the Fermi fixation probability
//! `(1 - exp(-α Δf)) / (1 - exp(-α m Δf))`, or `1/m` when `Δf = 0`.

use serde::{Deserialize, Serialize};

use super::EvalError;

pub const DEFAULT_POPULATION: u32 = 50;
pub const DEFAULT_ALPHA_SWEEP: [f64; 4] = [0.1, 1.0, 10.0, 100.0];
const TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: u64 = 1_000_000;
// profiles above this count skip the dense direct solve
const DENSE_LIMIT: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaRankConfig {
    /// Selection intensity.
    pub alpha: f64,
    /// Population size.
    pub m: u32,
}

impl Default for AlphaRankConfig {
    fn default() -> Self {
        Self { alpha: 100.0, m: DEFAULT_POPULATION }
    }
}

impl AlphaRankConfig {
    fn validate(&self) -> Result<(), EvalError> {
        if self.m < 2 {
            return Err(EvalError::InvalidConfig(format!("population size {} below 2", self.m)));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(EvalError::InvalidConfig(format!("selection intensity {} must be positive", self.alpha)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankResult {
    pub config: AlphaRankConfig,
    /// Mass per profile. One population: per strategy. Two populations:
    /// profile `(i, j)` at index `i * k1 + j`.
    pub stationary: Vec<f64>,
    /// Per-population marginal masses.
    pub marginals: Vec<Vec<f64>>,
    /// `sum |π T - π|` at termination.
    pub residual: f64,
    pub iterations: u64,
}

/// Probability that a single mutant with fitness advantage `delta` takes
/// over a population of `m`.
pub fn fixation_probability(delta: f64, alpha: f64, m: u32) -> f64 {
    let m = f64::from(m);
    let x = alpha * delta;
    if x == 0.0 {
        1.0 / m
    } else if x > 0.0 {
        (-x).exp_m1() / (-m * x).exp_m1()
    } else {
        let y = -x;
        ((1.0 - m) * y).exp() * (-y).exp_m1() / (-m * y).exp_m1()
    }
}

type SparseChain = Vec<Vec<(usize, f64)>>;

/// Single population: `payoffs[i][j]` is the score of strategy `i` against
/// `j`; the mutant's advantage is `payoffs[τ][σ] - payoffs[σ][τ]`.
pub fn alpha_rank(payoffs: &[Vec<f64>], cfg: &AlphaRankConfig) -> Result<RankResult, EvalError> {
    cfg.validate()?;
    check_matrix(payoffs, payoffs.len())?;
    let k = payoffs.len();
    if k == 0 {
        return Err(EvalError::InvalidPayoffs("no strategies".into()));
    }
    let eta = if k > 1 { 1.0 / (k - 1) as f64 } else { 0.0 };
    let chain: SparseChain = (0..k)
        .map(|s| {
            let mut row = Vec::with_capacity(k);
            let mut out = 0.0;
            for t in (0..k).filter(|&t| t != s) {
                let p = eta * fixation_probability(payoffs[t][s] - payoffs[s][t], cfg.alpha, cfg.m);
                row.push((t, p));
                out += p;
            }
            row.push((s, 1.0 - out));
            row
        })
        .collect();
    let (stationary, residual, iterations) = stationary_distribution(&chain)?;
    Ok(RankResult { config: *cfg, marginals: vec![stationary.clone()], stationary, residual, iterations })
}

/// Two populations (row player and column player). `row[i][j]` and
/// `col[i][j]` are the payoffs to each population in profile `(i, j)`.
pub fn alpha_rank_two_population(
    row: &[Vec<f64>],
    col: &[Vec<f64>],
    cfg: &AlphaRankConfig,
) -> Result<RankResult, EvalError> {
    cfg.validate()?;
    let k0 = row.len();
    let k1 = row.first().map_or(0, Vec::len);
    if k0 == 0 || k1 == 0 {
        return Err(EvalError::InvalidPayoffs("no strategies".into()));
    }
    check_matrix(row, k1)?;
    check_matrix(col, k1)?;
    if col.len() != k0 {
        return Err(EvalError::InvalidPayoffs("payoff tables differ in shape".into()));
    }
    let movable = usize::from(k0 > 1) + usize::from(k1 > 1);
    let eta = |k: usize| 1.0 / (movable.max(1) * (k - 1)) as f64;
    let chain: SparseChain = (0..k0 * k1)
        .map(|s| {
            let (i, j) = (s / k1, s % k1);
            let mut rowv = Vec::with_capacity(k0 + k1);
            let mut out = 0.0;
            for i2 in (0..k0).filter(|&x| x != i) {
                let p = eta(k0) * fixation_probability(row[i2][j] - row[i][j], cfg.alpha, cfg.m);
                rowv.push((i2 * k1 + j, p));
                out += p;
            }
            for j2 in (0..k1).filter(|&x| x != j) {
                let p = eta(k1) * fixation_probability(col[i][j2] - col[i][j], cfg.alpha, cfg.m);
                rowv.push((i * k1 + j2, p));
                out += p;
            }
            rowv.push((s, 1.0 - out));
            rowv
        })
        .collect();
    let (stationary, residual, iterations) = stationary_distribution(&chain)?;
    let mut m0 = vec![0.0; k0];
    let mut m1 = vec![0.0; k1];
    for (s, &p) in stationary.iter().enumerate() {
        m0[s / k1] += p;
        m1[s % k1] += p;
    }
    Ok(RankResult { config: *cfg, stationary, marginals: vec![m0, m1], residual, iterations })
}

/// Runs `rank` for each selection intensity and keeps the largest one that
/// produced a valid distribution.
pub fn alpha_rank_sweep(
    alphas: &[f64],
    m: u32,
    mut rank: impl FnMut(&AlphaRankConfig) -> Result<RankResult, EvalError>,
) -> Result<RankResult, EvalError> {
    let mut best: Option<RankResult> = None;
    let mut last_err = None;
    for &alpha in alphas {
        match rank(&AlphaRankConfig { alpha, m }) {
            Ok(r) if r.stationary.iter().all(|p| p.is_finite()) => {
                if best.as_ref().is_none_or(|b| alpha >= b.config.alpha) {
                    best = Some(r);
                }
            }
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or(EvalError::InvalidConfig("empty α sweep".into())))
}

fn check_matrix(m: &[Vec<f64>], cols: usize) -> Result<(), EvalError> {
    for row in m {
        if row.len() != cols {
            return Err(EvalError::InvalidPayoffs("ragged payoff matrix".into()));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(EvalError::InvalidPayoffs("non-finite payoff".into()));
        }
    }
    Ok(())
}

fn step(chain: &SparseChain, pi: &[f64]) -> Vec<f64> {
    let mut next = vec![0.0; pi.len()];
    for (s, row) in chain.iter().enumerate() {
        let mass = pi[s];
        if mass == 0.0 {
            continue;
        }
        for &(t, p) in row {
            next[t] += mass * p;
        }
    }
    next
}

fn residual(chain: &SparseChain, pi: &[f64]) -> f64 {
    step(chain, pi).iter().zip(pi).map(|(a, b)| (a - b).abs()).sum()
}

fn normalise(v: &mut [f64]) {
    v.iter_mut().for_each(|p| *p = p.max(0.0));
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|p| *p /= total);
}

/// Direct solve when small enough, then power iteration until the residual
/// drops below tolerance.
fn stationary_distribution(chain: &SparseChain) -> Result<(Vec<f64>, f64, u64), EvalError> {
    let n = chain.len();
    let mut pi = (n <= DENSE_LIMIT).then(|| direct_solve(chain)).flatten().unwrap_or_else(|| vec![1.0 / n as f64; n]);
    normalise(&mut pi);
    let mut res = residual(chain, &pi);
    let mut iterations = 0;
    while res >= TOLERANCE {
        if iterations == MAX_ITERATIONS {
            return Err(EvalError::NoConvergence(MAX_ITERATIONS));
        }
        let mut next = step(chain, &pi);
        normalise(&mut next);
        pi = next;
        iterations += 1;
        res = residual(chain, &pi);
    }
    Ok((pi, res, iterations))
}

/// Solves `π (T - I) = 0, sum π = 1` by Gaussian elimination with partial
/// pivoting. `None` if the system is singular (several closed classes).
fn direct_solve(chain: &SparseChain) -> Option<Vec<f64>> {
    let n = chain.len();
    // rows of A = (T - I)^T, last equation replaced by normalisation
    let mut a = vec![vec![0.0; n + 1]; n];
    for (s, row) in chain.iter().enumerate() {
        for &(t, p) in row {
            a[t][s] += p;
        }
        a[s][s] -= 1.0;
    }
    a[n - 1] = vec![1.0; n + 1];
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        let (head, tail) = a.split_at_mut(col + 1);
        let prow = &head[col];
        for r in tail.iter_mut() {
            let f = r[col] / prow[col];
            if f != 0.0 {
                for c in col..=n {
                    r[c] -= f * prow[c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (a[r][n] - s) / a[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
