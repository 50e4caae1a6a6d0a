//! Online learners in the mistake-bound model and exhaustive adversaries.

mod soa;
mod wm;

pub use soa::{BitwiseLearner, Soa};
pub use wm::{default_rate, wm_exact_worst_regret, ExpertSet, Mixture, WeightedMajority};

use crate::caps::Caps;
use crate::class::{HypothesisClass, Label};
use crate::dims::engine::Splitter;
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::rowset::RowSet;
use serde::Serialize;

/// A learner's answer for one round: a label, or a distribution over labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Prediction {
    Label(Label),
    Mixed(Vec<(Label, f64)>),
}

impl Prediction {
    /// Probability that the prediction equals `y`.
    pub fn prob_of(&self, y: Label) -> f64 {
        match self {
            Prediction::Label(l) => f64::from(u8::from(*l == y)),
            Prediction::Mixed(v) => v.iter().filter(|(l, _)| *l == y).map(|(_, p)| p).sum(),
        }
    }

    /// Expected 0-1 loss against the true label `y`.
    pub fn loss(&self, y: Label) -> f64 {
        1.0 - self.prob_of(y)
    }

    /// Draws a label (deterministic predictions ignore `u`).
    pub fn sample(&self, u: f64) -> Label {
        match self {
            Prediction::Label(l) => *l,
            Prediction::Mixed(v) => {
                let mut acc = 0.0;
                for &(l, p) in v {
                    acc += p;
                    if u < acc {
                        return l;
                    }
                }
                v.iter().rev().find(|(_, p)| *p > 0.0).map(|(l, _)| *l).unwrap_or(0)
            }
        }
    }
}

/// A stateful online learner. Cloning snapshots its state, which the
/// adversary uses to explore branches.
pub trait OnlineLearner: Clone {
    fn predict(&mut self, x: usize) -> Result<Prediction>;
    fn update(&mut self, x: usize, y: Label) -> Result<()>;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Round {
    pub x: usize,
    pub prediction: Prediction,
    pub truth: Label,
    pub loss: f64,
}

/// A played sequence with per-round expected losses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OnlineProtocolTrace {
    pub rounds: Vec<Round>,
    pub mistakes: f64,
}

/// Plays `sequence` against `learner`.
pub fn run_sequence<L: OnlineLearner>(learner: &mut L, sequence: &[(usize, Label)]) -> Result<OnlineProtocolTrace> {
    let mut rounds = Vec::with_capacity(sequence.len());
    let mut mistakes = 0.0;
    for &(x, y) in sequence {
        let prediction = learner.predict(x)?;
        let loss = prediction.loss(y);
        mistakes += loss;
        learner.update(x, y)?;
        rounds.push(Round { x, prediction, truth: y, loss });
    }
    Ok(OnlineProtocolTrace { rounds, mistakes })
}

/// A realizable sequence of `len` rounds labeled by a seeded random member of `h`.
pub fn random_realizable_sequence(h: &HypothesisClass, len: usize, rng: &mut SeededRng) -> (usize, Vec<(usize, Label)>) {
    let target = rng.below(h.len());
    let f = h.row(target);
    let seq = (0..len)
        .map(|_| {
            let x = rng.below(h.domain_size());
            (x, f[x])
        })
        .collect();
    (target, seq)
}

/// Worst sequence found by [`adversary_search`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversaryResult {
    pub sequence: Vec<(usize, Label)>,
    pub mistakes: f64,
    pub leaves: u64,
}

/// Exhaustive game search for the realizable sequence of length `horizon`
/// maximizing the learner's (expected) mistakes.
///
/// The learner's internal state depends only on the sequence, so the
/// expected mistakes of a randomized learner are the sum of per-round
/// expected losses.
pub fn adversary_search<L: OnlineLearner>(
    h: &HypothesisClass,
    learner: &L,
    horizon: usize,
    caps: &Caps,
) -> Result<AdversaryResult> {
    caps.check_class_size(h.len())?;
    caps.check_depth(horizon)?;
    let sp = Splitter::new(h);
    let mut search = Search { sp: &sp, leaves: 0, max_leaves: caps.max_game_leaves };
    let (mistakes, mut sequence) = search.rec(&sp.full(), learner, horizon)?;
    sequence.reverse();
    Ok(AdversaryResult { sequence, mistakes, leaves: search.leaves })
}

struct Search<'a> {
    sp: &'a Splitter,
    leaves: u64,
    max_leaves: u64,
}

impl Search<'_> {
    /// Best value and the chosen rounds in reverse order.
    fn rec<L: OnlineLearner>(&mut self, version: &RowSet, learner: &L, left: usize) -> Result<(f64, Vec<(usize, Label)>)> {
        if left == 0 {
            self.leaves += 1;
            if self.leaves > self.max_leaves {
                return Err(Error::cap("adversary leaves", self.leaves, self.max_leaves));
            }
            return Ok((0.0, Vec::new()));
        }
        let mut best: Option<(f64, Vec<(usize, Label)>)> = None;
        for x in 0..self.sp.class().domain_size() {
            let mut probe = learner.clone();
            let prediction = probe.predict(x)?;
            for (y, child) in self.sp.children(version, x) {
                let mut next = probe.clone();
                next.update(x, y)?;
                let (v, mut seq) = self.rec(&child, &next, left - 1)?;
                let total = v + prediction.loss(y);
                if best.as_ref().is_none_or(|(b, _)| total > *b + 1e-12) {
                    seq.push((x, y));
                    best = Some((total, seq));
                }
            }
        }
        Ok(best.expect("a nonempty version space offers a move"))
    }
}
