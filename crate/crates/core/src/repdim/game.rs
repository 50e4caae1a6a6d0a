//! Values of finite zero-sum games `max_D min_j (D^T M)_j`.
//!
//! The row player mixes over rows and maximizes; the column player picks a
//! column and minimizes. Multiplicative-weights self-play gives a certified
//! bracket; when it does not close to the tolerance, an exact simplex on
//! the packing form of the game settles the value.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Certified bracket around a game value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameValue<S> {
    pub lower: S,
    pub upper: S,
    /// Exact value when the simplex step ran (or the game was trivial).
    #[serde(skip)]
    pub exact: Option<BigRational>,
    pub iterations: u64,
}

impl<S: Float> GameValue<S> {
    pub fn gap(&self) -> S {
        self.upper - self.lower
    }

    pub fn contains(&self, v: S, slack: S) -> bool {
        self.lower - slack <= v && v <= self.upper + slack
    }
}

/// How to finish when self-play has not reached the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Finish {
    /// Report [`Error::ToleranceNotReached`].
    SelfPlayOnly,
    /// Solve the game exactly.
    Exact,
}

fn to_s<S: Float>(q: &BigRational) -> S {
    S::from(q.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(S::nan)
}

/// Solves the game with payoff matrix `m` (rows × columns, entries in `[0, 1]`).
///
/// Self-play runs at most `max_iterations` rounds with step size
/// `sqrt(ln(rows) / t)`. The bracket is `[max_t min_j (D_t^T M)_j,
/// min_t max_i (M qbar_t)_i]` where `qbar_t` averages the column best
/// responses, so it always contains the value. With [`Finish::Exact`] the
/// simplex always runs afterwards and the bracket collapses to its answer.
pub fn solve_game<S: Float + Scalar>(
    m: &[Vec<BigRational>],
    tolerance: f64,
    max_iterations: u64,
    finish: Finish,
) -> Result<GameValue<S>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidParameter("game matrix must be nonempty and rectangular".into()));
    }
    if m.iter().flatten().any(|v| v.is_negative() || *v > BigRational::one()) {
        return Err(Error::InvalidParameter("game payoffs must lie in [0, 1]".into()));
    }
    // A column of zeros means the column player can always get 0.
    if (0..cols).any(|j| m.iter().all(|r| r[j].is_zero())) {
        return Ok(exact_value(BigRational::zero(), 0));
    }
    if rows == 1 {
        let v = m[0].iter().min().expect("nonempty").clone();
        return Ok(exact_value(v, 0));
    }

    let mf: Vec<Vec<S>> = m.iter().map(|r| r.iter().map(to_s).collect()).collect();
    let ln_rows = S::from_f64((rows as f64).ln()).expect("finite");
    let tol = S::from_f64(tolerance).expect("finite");
    let mut cum = vec![S::zero(); rows];
    let mut lower = S::neg_infinity();
    let mut upper = S::infinity();
    let mut t = 0u64;
    while t < max_iterations {
        t += 1;
        let eta = (ln_rows / S::from_u64(t).expect("finite")).sqrt();
        let top = cum.iter().copied().fold(S::neg_infinity(), S::max);
        let w: Vec<S> = cum.iter().map(|&c| (eta * (c - top)).exp()).collect();
        let total = w.iter().copied().fold(S::zero(), |a, b| a + b);
        let d: Vec<S> = w.iter().map(|&x| x / total).collect();
        let (j, guarantee) = (0..cols)
            .map(|j| (j, (0..rows).fold(S::zero(), |a, i| a + d[i] * mf[i][j])))
            .fold((0, S::infinity()), |best, cur| if cur.1 < best.1 { cur } else { best });
        lower = lower.max(guarantee);
        for i in 0..rows {
            cum[i] = cum[i] + mf[i][j];
        }
        let avg_max = cum.iter().copied().fold(S::neg_infinity(), S::max) / S::from_u64(t).expect("finite");
        upper = upper.min(avg_max);
        if upper - lower <= tol {
            break;
        }
    }
    match finish {
        Finish::SelfPlayOnly if upper - lower <= tol => Ok(GameValue { lower, upper, exact: None, iterations: t }),
        Finish::SelfPlayOnly => Err(Error::ToleranceNotReached { tolerance, iterations: t }),
        Finish::Exact => {
            let opt = packing_lp(m)?;
            Ok(exact_value(BigRational::one() / opt, t))
        }
    }
}

fn exact_value<S: Float + Scalar>(v: BigRational, iterations: u64) -> GameValue<S> {
    let s: S = to_s(&v);
    GameValue { lower: s, upper: s, exact: Some(v), iterations }
}

/// `max sum(q)` subject to `M q <= 1`, `q >= 0`, by a dense rational simplex
/// with Bland's rule. Every column of `m` must have a positive entry, which
/// keeps the program bounded.
pub fn packing_lp(m: &[Vec<BigRational>]) -> Result<BigRational> {
    let rows = m.len();
    let cols = m[0].len();
    // Tableau rows: constraints with slack columns, then the objective row.
    let width = cols + rows + 1;
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(rows + 1);
    for (i, r) in m.iter().enumerate() {
        let mut row = vec![BigRational::zero(); width];
        row[..cols].clone_from_slice(r);
        row[cols + i] = BigRational::one();
        row[width - 1] = BigRational::one();
        tab.push(row);
    }
    let mut obj = vec![BigRational::zero(); width];
    for v in obj.iter_mut().take(cols) {
        *v = -BigRational::one();
    }
    tab.push(obj);
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    for _ in 0..10_000 {
        // Bland: lowest-index column with negative reduced cost.
        let Some(enter) = (0..width - 1).find(|&c| tab[rows][c].is_negative()) else {
            return Ok(tab[rows][width - 1].clone());
        };
        let mut leave: Option<(usize, BigRational)> = None;
        for r in 0..rows {
            if tab[r][enter].is_positive() {
                let ratio = &tab[r][width - 1] / &tab[r][enter];
                let better = match &leave {
                    None => true,
                    Some((lr, lv)) => ratio < *lv || (ratio == *lv && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            return Err(Error::InvalidParameter("packing program is unbounded".into()));
        };
        let pivot = tab[pr][enter].clone();
        for v in tab[pr].iter_mut() {
            *v = &*v / &pivot;
        }
        let prow = tab[pr].clone();
        for (r, row) in tab.iter_mut().enumerate() {
            if r == pr || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                *v -= &f * p;
            }
        }
        basis[pr] = enter;
    }
    Err(Error::InvalidParameter("simplex did not terminate".into()))
}
