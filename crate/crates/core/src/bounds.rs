//! Closed-form partial-recovery bounds for the symmetric two-community SBM.
//!
//! Every bound reduces to the error probability of a binary test between two
//! independent Poisson counts `Z1` and `Z2`: `P[Z1 < Z2] + P[Z1 = Z2] / 2`.
//! The lower bound uses means `(a/2, b/2)`; the refined upper bound mixes the
//! means by the fraction `alpha` of labels the minimum-bisection decoder may
//! get wrong, where `alpha` solves `H2(alpha) / (alpha (1 - alpha)) =
//! (a + b)/2 - sqrt(ab)`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Default cap on the number of conjectured refinement iterations.
pub const DEFAULT_MAX_ITERS: usize = 50;
/// Default stopping tolerance for the conjectured refinement iterations.
pub const DEFAULT_ITER_TOL: f64 = 1e-9;

/// Largest `lambda` whose `e^{-lambda}` is comfortably representable; above it
/// the pmf table is built term by term in log space.
const LINEAR_PMF_LIMIT: f64 = 700.0;

const ALPHA_MAX_ITERS: usize = 200;

/// Whether a reported number is a proved bound or the conjectured iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Theorem,
    Conjecture,
}

/// Binary test between independent `Z1 ~ Poisson(lambda1)` and
/// `Z2 ~ Poisson(lambda2)`; the test declares hypothesis 1 when `Z1 > Z2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonTestSpec {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl PoissonTestSpec {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        for (name, v) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(Self { lambda1, lambda2 })
    }

    /// Means of the lower-bound test: `(a/2, b/2)`.
    pub fn necessary(a: f64, b: f64) -> Result<Self> {
        check_ab(a, b)?;
        Self::new(a / 2.0, b / 2.0)
    }

    /// Means of the refined test when a fraction `alpha` of labels is wrong
    /// in the first-step estimate.
    pub fn refined(a: f64, b: f64, alpha: f64) -> Result<Self> {
        check_ab(a, b)?;
        if !(0.0..=0.5).contains(&alpha) {
            return Err(Error::Domain(format!(
                "alpha must lie in [0, 1/2], got {alpha}"
            )));
        }
        Self::new(
            a / 2.0 * (1.0 - alpha) + b / 2.0 * alpha,
            b / 2.0 * (1.0 - alpha) + a / 2.0 * alpha,
        )
    }

    pub fn error_probability(&self) -> f64 {
        misclassification_prob(self)
    }
}

/// Result of solving for the high-probability error fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaSolution {
    pub alpha: f64,
    /// No root in `(0, 1/2)`; `alpha` was set to `1/2`.
    pub saturated: bool,
    /// `H2(alpha)/(alpha(1-alpha))` minus the exponent at the returned alpha.
    pub residual: f64,
}

/// All bounds for one `(a, b)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub a: f64,
    pub b: f64,
    pub necessary: f64,
    pub alpha_hp: AlphaSolution,
    /// Absent unless the high-probability fraction is below 1/4.
    pub refined: Option<f64>,
    /// Conjectured refinement iterates `r_1, r_2, ...` (the refined bound is
    /// `r_0` and is not repeated here).
    pub iterated: Vec<f64>,
    pub correlated_possible: bool,
}

impl BoundReport {
    /// Computes every bound. `iterations` caps the conjectured sequence; zero
    /// skips it.
    pub fn compute(a: f64, b: f64, iterations: usize) -> Result<Self> {
        let necessary = necessary_bound(a, b)?;
        let alpha_hp = solve_alpha(a, b)?;
        let refined = refined_from_alpha(a, b, &alpha_hp)?;
        let iterated = match refined {
            Some(r0) if iterations > 0 => {
                iterate_from(a, b, r0, iterations, DEFAULT_ITER_TOL)?[1..].to_vec()
            }
            _ => Vec::new(),
        };
        Ok(Self {
            a,
            b,
            necessary,
            alpha_hp,
            refined,
            iterated,
            correlated_possible: correlated_recovery_possible(a, b),
        })
    }
}

fn check_ab(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Param(format!(
            "a and b must be finite, got a = {a}, b = {b}"
        )));
    }
    if b <= 0.0 {
        return Err(Error::Param(format!("b > 0 required, got b = {b}")));
    }
    if a <= b {
        return Err(Error::Param(format!(
            "a > b required, got a = {a}, b = {b}"
        )));
    }
    Ok(())
}

/// `lambda^k e^{-lambda} / k!`, evaluated in log space.
pub fn poisson_pmf(lambda: f64, k: u64) -> Result<f64> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::Domain(format!(
            "Poisson mean must be finite and nonnegative, got {lambda}"
        )));
    }
    if lambda == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let k = k as f64;
    Ok((k * lambda.ln() - lambda - ln_gamma(k + 1.0)).exp())
}

/// Number of pmf terms kept for a Poisson(`lambda`) marginal.
pub fn truncation_point(lambda: f64) -> usize {
    (lambda + 20.0 * (lambda + 1.0).sqrt() + 50.0).ceil() as usize
}

/// `pmf[k]` for `k` in `0..=truncation_point(lambda)`.
fn pmf_table(lambda: f64) -> Vec<f64> {
    let len = truncation_point(lambda) + 1;
    let mut table = Vec::with_capacity(len);
    if lambda == 0.0 {
        table.push(1.0);
        table.resize(len, 0.0);
    } else if lambda <= LINEAR_PMF_LIMIT {
        let mut p = (-lambda).exp();
        table.push(p);
        for k in 1..len {
            p *= lambda / k as f64;
            table.push(p);
        }
    } else {
        let ln_lambda = lambda.ln();
        for k in 0..len {
            let k = k as f64;
            table.push((k * ln_lambda - lambda - ln_gamma(k + 1.0)).exp());
        }
    }
    table
}

/// `P[Z1 < Z2] + P[Z1 = Z2] / 2` for independent Poisson counts.
///
/// The double sum over `(k1, k2)` is truncated per marginal at
/// [`truncation_point`] and evaluated through the running CDF of `Z1`.
pub fn misclassification_prob(spec: &PoissonTestSpec) -> f64 {
    let p = pmf_table(spec.lambda1);
    let q = pmf_table(spec.lambda2);

    // cdf1 = P[Z1 <= k2 - 1] while visiting k2
    let mut cdf1 = 0.0;
    let mut less = 0.0;
    let mut tie = 0.0;
    for (k2, &qk) in q.iter().enumerate() {
        let pk = p.get(k2).copied().unwrap_or(0.0);
        less += qk * cdf1;
        tie += qk * pk;
        cdf1 += pk;
    }
    (less + 0.5 * tie).clamp(0.0, 1.0)
}

/// Asymptotic lower bound on the expected error fraction of any decoder.
pub fn necessary_bound(a: f64, b: f64) -> Result<f64> {
    Ok(misclassification_prob(&PoissonTestSpec::necessary(a, b)?))
}

/// Binary entropy in nats, `0 ln 0 = 0`.
pub fn binary_entropy(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    if alpha == 0.0 || alpha == 1.0 {
        return Ok(0.0);
    }
    // 1 - alpha is exact for alpha >= 1/2, so fold onto the lower half and
    // use ln_1p for the small-argument logarithm.
    let x = if alpha > 0.5 { 1.0 - alpha } else { alpha };
    Ok(-x * x.ln() - (1.0 - x) * (-x).ln_1p())
}

/// `H2(alpha) / (alpha (1 - alpha))`, strictly decreasing on `(0, 1/2]`.
pub fn entropy_ratio(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(binary_entropy(alpha)? / (alpha * (1.0 - alpha)))
}

/// Same as [`entropy_ratio`] parameterized by `t = ln alpha`, accurate even
/// where `alpha` is far below `f64::EPSILON`.
fn entropy_ratio_log(t: f64) -> f64 {
    let alpha = t.exp();
    let tail = if alpha == 0.0 {
        -1.0
    } else {
        (-alpha).ln_1p() / alpha
    };
    -t / (1.0 - alpha) - tail
}

/// `(a + b)/2 - sqrt(ab)`.
pub fn chernoff_exponent(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::Param(format!(
            "a and b must be positive and finite, got a = {a}, b = {b}"
        )));
    }
    Ok(((a + b) / 2.0 - (a * b).sqrt()).max(0.0))
}

/// Error fraction guaranteed with high probability by minimum bisection.
pub fn solve_alpha(a: f64, b: f64) -> Result<AlphaSolution> {
    check_ab(a, b)?;
    alpha_for_exponent(chernoff_exponent(a, b)?)
}

/// Solves `H2(alpha)/(alpha(1-alpha)) = exponent` on `(0, 1/2)`, saturating
/// at 1/2 when the exponent does not exceed `4 ln 2`.
///
/// Bisection runs on `ln alpha` so that roots far below machine epsilon
/// (large `a - b`) are bracketed; it stops when the bracket can no longer be
/// split in floating point.
pub fn alpha_for_exponent(exponent: f64) -> Result<AlphaSolution> {
    if !exponent.is_finite() || exponent < 0.0 {
        return Err(Error::Domain(format!(
            "exponent must be finite and nonnegative, got {exponent}"
        )));
    }
    let saturation = entropy_ratio(0.5)?;
    if exponent <= saturation {
        return Ok(AlphaSolution {
            alpha: 0.5,
            saturated: true,
            residual: 0.0,
        });
    }

    let mut lo = f64::MIN_POSITIVE.ln();
    let mut hi = 0.5f64.ln();
    if entropy_ratio_log(lo) <= exponent {
        return Err(Error::Domain(format!(
            "exponent {exponent} puts alpha below the smallest normal f64"
        )));
    }
    for _ in 0..ALPHA_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if entropy_ratio_log(mid) > exponent {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let residual_at = |t: f64| -> Result<(f64, f64)> {
        let alpha = t.exp();
        Ok((alpha, entropy_ratio(alpha)? - exponent))
    };
    let (a_lo, r_lo) = residual_at(lo)?;
    let (a_hi, r_hi) = residual_at(hi)?;
    let (alpha, residual) = if r_lo.abs() <= r_hi.abs() {
        (a_lo, r_lo)
    } else {
        (a_hi, r_hi)
    };
    Ok(AlphaSolution {
        alpha,
        saturated: false,
        residual,
    })
}

fn refined_from_alpha(a: f64, b: f64, sol: &AlphaSolution) -> Result<Option<f64>> {
    if sol.saturated || sol.alpha >= 0.25 {
        return Ok(None);
    }
    Ok(Some(
        PoissonTestSpec::refined(a, b, sol.alpha)?.error_probability(),
    ))
}

/// Refined achievable error fraction of the two-step procedure; `None` when
/// the high-probability fraction is not below 1/4.
pub fn refined_bound(a: f64, b: f64) -> Result<Option<f64>> {
    let sol = solve_alpha(a, b)?;
    refined_from_alpha(a, b, &sol)
}

/// Conjectured sequence `r_0 = refined, r_{t+1} = err(refined means at r_t)`.
///
/// Returns `r_0` followed by at most `max_iters` iterates, stopping early
/// once successive values differ by less than `tol`. The sequence is not a
/// proved bound; see [`Provenance::Conjecture`].
pub fn iterated_bound(a: f64, b: f64, max_iters: usize, tol: f64) -> Result<Vec<f64>> {
    if max_iters == 0 {
        return Err(Error::Precondition("max_iters must be positive".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let r0 = refined_bound(a, b)?.ok_or_else(|| {
        Error::Precondition(format!(
            "refined bound undefined at a = {a}, b = {b} (high-probability fraction is not below 1/4)"
        ))
    })?;
    iterate_from(a, b, r0, max_iters, tol)
}

fn iterate_from(a: f64, b: f64, r0: f64, max_iters: usize, tol: f64) -> Result<Vec<f64>> {
    let mut seq = vec![r0];
    let mut current = r0;
    for _ in 0..max_iters {
        let next = PoissonTestSpec::refined(a, b, current)?.error_probability();
        seq.push(next);
        let done = (next - current).abs() < tol;
        current = next;
        if done {
            break;
        }
    }
    Ok(seq)
}

/// Whether any correlation with the truth is achievable: `(a-b)^2 > 2(a+b)`.
pub fn correlated_recovery_possible(a: f64, b: f64) -> bool {
    (a - b) * (a - b) > 2.0 * (a + b)
}
