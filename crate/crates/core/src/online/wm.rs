use super::{OnlineLearner, Prediction};
use crate::class::{HypothesisClass, Label};
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::rc::Rc;

/// A nonempty list of experts, each a function on the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertSet {
    experts: Rc<Vec<Vec<Label>>>,
    k: Label,
}

impl ExpertSet {
    pub fn new(experts: Vec<Vec<Label>>, k: Label) -> Result<Self> {
        if experts.is_empty() {
            return Err(Error::InvalidParameter("expert set must be nonempty".into()));
        }
        if let Some(&y) = experts.iter().flatten().find(|&&y| y > k) {
            return Err(Error::LabelOutOfRange { label: y as u32, k });
        }
        Ok(ExpertSet { experts: Rc::new(experts), k })
    }

    pub fn from_class(h: &HypothesisClass) -> Self {
        ExpertSet { experts: Rc::new(h.rows().to_vec()), k: h.k() }
    }

    pub fn len(&self) -> usize {
        self.experts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.experts.is_empty()
    }

    pub fn experts(&self) -> &[Vec<Label>] {
        &self.experts
    }
}

/// Default learning rate `sqrt(8 ln N / T)`, zero for a single expert.
pub fn default_rate(n: usize, horizon: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    (8.0 * (n as f64).ln() / horizon.max(1) as f64).sqrt()
}

/// Randomized weighted majority with 0-1 loss.
///
/// Expert `i` carries weight `exp(-eta * m_i)` where `m_i` counts its
/// mistakes; the prediction puts on each label the normalized weight of the
/// experts voting for it.
#[derive(Debug, Clone)]
pub struct WeightedMajority {
    experts: ExpertSet,
    eta: f64,
    mistakes: Vec<u32>,
}

impl WeightedMajority {
    /// `eta = None` selects [`default_rate`].
    pub fn new(experts: ExpertSet, horizon: usize, eta: Option<f64>) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be at least 1".into()));
        }
        let eta = match eta {
            Some(e) if !(e > 0.0 && e.is_finite()) => {
                return Err(Error::InvalidParameter(format!("learning rate must be positive, got {e}")))
            }
            Some(e) => e,
            None => default_rate(experts.len(), horizon),
        };
        let n = experts.len();
        Ok(WeightedMajority { experts, eta, mistakes: vec![0; n] })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn expert_mistakes(&self) -> &[u32] {
        &self.mistakes
    }

    fn weights(&self) -> Vec<f64> {
        let min = self.mistakes.iter().copied().min().unwrap_or(0);
        self.mistakes.iter().map(|&m| (-self.eta * (m - min) as f64).exp()).collect()
    }
}

impl OnlineLearner for WeightedMajority {
    fn predict(&mut self, x: usize) -> Result<Prediction> {
        let w = self.weights();
        let total: f64 = w.iter().sum();
        let mut mass = vec![0.0; self.experts.k as usize + 1];
        for (f, wi) in self.experts.experts().iter().zip(&w) {
            let y = *f.get(x).ok_or(Error::DomainOutOfRange { index: x, size: f.len() })?;
            mass[y as usize] += wi / total;
        }
        Ok(Prediction::Mixed(
            mass.into_iter()
                .enumerate()
                .filter(|(_, p)| *p > 0.0)
                .map(|(y, p)| (y as Label, p))
                .collect(),
        ))
    }

    fn update(&mut self, x: usize, y: Label) -> Result<()> {
        for (f, m) in self.experts.experts().iter().zip(self.mistakes.iter_mut()) {
            if f[x] != y {
                *m += 1;
            }
        }
        Ok(())
    }
}

/// Draws component `i` with probability `weights[i]` up front and then
/// runs it; the prediction is the weighted mixture of the components'.
#[derive(Debug, Clone)]
pub struct Mixture<L> {
    components: Vec<(f64, L)>,
}

impl<L: OnlineLearner> Mixture<L> {
    pub fn new(components: Vec<(f64, L)>) -> Result<Self> {
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if components.is_empty() || components.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter("mixture weights must form a distribution".into()));
        }
        Ok(Mixture { components })
    }
}

impl<L: OnlineLearner> OnlineLearner for Mixture<L> {
    fn predict(&mut self, x: usize) -> Result<Prediction> {
        let mut mass: Vec<(Label, f64)> = Vec::new();
        for (w, l) in &mut self.components {
            if *w == 0.0 {
                continue;
            }
            let p = l.predict(x)?;
            let parts = match p {
                Prediction::Label(y) => vec![(y, 1.0)],
                Prediction::Mixed(v) => v,
            };
            for (y, q) in parts {
                match mass.iter_mut().find(|(l, _)| *l == y) {
                    Some((_, m)) => *m += *w * q,
                    None => mass.push((y, *w * q)),
                }
            }
        }
        mass.sort_by_key(|(y, _)| *y);
        Ok(Prediction::Mixed(mass))
    }

    fn update(&mut self, x: usize, y: Label) -> Result<()> {
        self.components.iter_mut().try_for_each(|(_, l)| l.update(x, y))
    }
}

/// Exact worst-case expected regret of weighted majority with `n` experts,
/// horizon `horizon` and rate `eta`, over every pattern of which experts err
/// in each round.
///
/// The learner errs with probability equal to the normalized weight of the
/// erring experts, so the regret depends only on the sequence of error
/// patterns. States are sorted mistake-count vectors.
pub fn wm_exact_worst_regret(n: usize, horizon: usize, eta: f64) -> Result<f64> {
    if n == 0 || n > 16 {
        return Err(Error::InvalidParameter(format!("expert count {n} outside 1..=16")));
    }
    let mut memo: HashMap<(Vec<u32>, usize), f64> = HashMap::new();
    Ok(regret_rec(&vec![0; n], horizon, eta, &mut memo))
}

fn regret_rec(state: &[u32], left: usize, eta: f64, memo: &mut HashMap<(Vec<u32>, usize), f64>) -> f64 {
    if left == 0 {
        return -(*state.iter().min().expect("nonempty") as f64);
    }
    let key = (state.to_vec(), left);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let min = *state.iter().min().expect("nonempty");
    let w: Vec<f64> = state.iter().map(|&m| (-eta * (m - min) as f64).exp()).collect();
    let total: f64 = w.iter().sum();
    let n = state.len();
    let mut best = f64::NEG_INFINITY;
    for pattern in 0u32..1 << n {
        let mut next = state.to_vec();
        let mut loss = 0.0;
        for i in 0..n {
            if pattern >> i & 1 == 1 {
                next[i] += 1;
                loss += w[i] / total;
            }
        }
        next.sort_unstable();
        best = best.max(loss + regret_rec(&next, left - 1, eta, memo));
    }
    memo.insert(key, best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_expert_has_no_regret() {
        assert_eq!(wm_exact_worst_regret(1, 5, 0.0).unwrap(), 0.0);
        let e = ExpertSet::new(vec![vec![2, 0]], 2).unwrap();
        let mut wm = WeightedMajority::new(e, 3, None).unwrap();
        assert_eq!(wm.predict(0).unwrap(), Prediction::Mixed(vec![(2, 1.0)]));
        assert!(WeightedMajority::new(ExpertSet::new(vec![vec![0]], 1).unwrap(), 3, Some(0.0)).is_err());
    }

    #[test]
    fn spec_rate_exceeds_bound() {
        // the rate sqrt(2 ln N / T) overshoots sqrt(ln N * T / 2) for N = 2, T = 4
        let eta = (2.0 * 2f64.ln() / 4.0).sqrt();
        let r = wm_exact_worst_regret(2, 4, eta).unwrap();
        assert!(r > (0.5 * 2f64.ln() * 4.0).sqrt());
        let r = wm_exact_worst_regret(2, 4, default_rate(2, 4)).unwrap();
        assert!(r <= (0.5 * 2f64.ln() * 4.0).sqrt());
    }
}
