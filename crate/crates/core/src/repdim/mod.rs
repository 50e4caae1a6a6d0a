//! Probabilistic representations of a class and their size.

pub mod game;

use crate::caps::Caps;
use crate::class::{ClassFile, HypothesisClass, Label, LabeledSample};
use crate::dims::mld;
use crate::error::{Error, Result};
use crate::online::{adversary_search, ExpertSet, Mixture, OnlineLearner, WeightedMajority};
use crate::privacy::{exp_mech_select, mixture, ExactDistribution};
use crate::rng::SeededRng;
use crate::rowset::RowSet;
use crate::scalar::{format_rational, parse_rational};
use game::{solve_game, Finish, GameValue};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// A distribution `P` over a family of classes `G_1..G_r` sharing one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilisticRepresentation {
    family: Vec<HypothesisClass>,
    p: Vec<BigRational>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RepresentationFile {
    #[serde(rename = "P")]
    p: Vec<String>,
    family: Vec<ClassFile>,
}

impl ProbabilisticRepresentation {
    pub fn new(family: Vec<HypothesisClass>, p: Vec<BigRational>) -> Result<Self> {
        let Some(first) = family.first() else {
            return Err(Error::InvalidParameter("representation family must be nonempty".into()));
        };
        if family.len() != p.len() {
            return Err(Error::InvalidParameter("P must have one weight per class".into()));
        }
        if family.iter().any(|g| g.domain_size() != first.domain_size()) {
            return Err(Error::DomainMismatch("family classes must share a domain".into()));
        }
        let total: BigRational = p.iter().sum();
        if p.iter().any(|w| w.is_negative()) || total != BigRational::one() {
            return Err(Error::InvalidParameter("P must be a distribution (sums to 1 exactly)".into()));
        }
        Ok(ProbabilisticRepresentation { family, p })
    }

    /// `{G}` with all mass on `G`.
    pub fn point_mass(g: HypothesisClass) -> Self {
        ProbabilisticRepresentation { family: vec![g], p: vec![BigRational::one()] }
    }

    pub fn family(&self) -> &[HypothesisClass] {
        &self.family
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.p
    }

    /// `max_i ln |G_i|`.
    pub fn size(&self) -> f64 {
        self.family.iter().map(|g| (g.len() as f64).ln()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        let file = RepresentationFile {
            p: self.p.iter().map(format_rational).collect(),
            family: self.family.iter().map(HypothesisClass::to_file).collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: RepresentationFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let p = file.p.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?;
        let family = file.family.into_iter().map(HypothesisClass::from_file).collect::<Result<_>>()?;
        ProbabilisticRepresentation::new(family, p)
    }
}

/// Disagreement matrix between `f` and the members of `g` (points × members).
fn disagreement(f: &[Label], g: &HypothesisClass) -> Vec<Vec<BigRational>> {
    (0..f.len())
        .map(|x| {
            g.rows()
                .iter()
                .map(|h| if h[x] != f[x] { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect()
}

/// `max_D min_{h in g} Pr_{x~D}[h(x) != f(x)]`.
pub fn worst_case_repr_error(
    f: &[Label],
    g: &HypothesisClass,
    tolerance: f64,
    caps: &Caps,
) -> Result<GameValue<f64>> {
    if f.len() != g.domain_size() {
        return Err(Error::DomainMismatch(format!(
            "target on {} points, class on {}",
            f.len(),
            g.domain_size()
        )));
    }
    solve_game(&disagreement(f, g), tolerance, caps.max_iterations, Finish::Exact)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepVerdict {
    Valid,
    Invalid,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetReport {
    pub target: usize,
    /// Bracket of the worst-case error of each family member.
    pub values: Vec<(f64, f64)>,
    /// `P`-mass of the members within `alpha`, as `num/den`.
    pub good_mass: String,
    pub ok: bool,
    pub indeterminate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepresentationCheck {
    pub alpha: f64,
    pub beta: f64,
    pub verdict: RepVerdict,
    pub targets: Vec<TargetReport>,
}

/// Checks the `(alpha, beta)` condition for every target in `h`. A member is
/// within `alpha` when its game value is; the comparison is exact whenever
/// the solver returned an exact value, and otherwise indeterminate when the
/// bracket straddles `alpha`.
pub fn is_probabilistic_representation(
    rep: &ProbabilisticRepresentation,
    h: &HypothesisClass,
    alpha: f64,
    beta: f64,
    tolerance: f64,
    caps: &Caps,
) -> Result<RepresentationCheck> {
    if rep.family[0].domain_size() != h.domain_size() {
        return Err(Error::DomainMismatch("representation and class domains differ".into()));
    }
    let alpha_q = BigRational::from_float(alpha)
        .ok_or_else(|| Error::InvalidParameter(format!("alpha {alpha} is not finite")))?;
    let need = BigRational::one()
        - BigRational::from_float(beta).ok_or_else(|| Error::InvalidParameter(format!("beta {beta} is not finite")))?;
    let mut targets = Vec::with_capacity(h.len());
    for (t, f) in h.rows().iter().enumerate() {
        let mut good = BigRational::zero();
        let mut unsure = BigRational::zero();
        let mut values = Vec::with_capacity(rep.family.len());
        for (g, w) in rep.family.iter().zip(&rep.p) {
            let v = worst_case_repr_error(f, g, tolerance, caps)?;
            values.push((v.lower, v.upper));
            let within = match &v.exact {
                Some(q) => Some(*q <= alpha_q),
                None if v.upper <= alpha => Some(true),
                None if v.lower > alpha => Some(false),
                None => None,
            };
            match within {
                Some(true) => good += w,
                Some(false) => {}
                None => unsure += w,
            }
        }
        let ok = good >= need;
        let indeterminate = !ok && &good + &unsure >= need;
        targets.push(TargetReport { target: t, values, good_mass: format_rational(&good), ok, indeterminate });
    }
    let verdict = if targets.iter().all(|t| t.ok) {
        RepVerdict::Valid
    } else if targets.iter().any(|t| !t.ok && !t.indeterminate) {
        RepVerdict::Invalid
    } else {
        RepVerdict::Indeterminate
    };
    Ok(RepresentationCheck { alpha, beta, verdict, targets })
}

/// Bounds on RepDim from a restricted search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepDimBounds {
    /// Smallest `size` among validated representations in the searched space.
    pub upper: f64,
    /// `MLD / 32`.
    pub lower: f64,
    pub mld: u32,
    pub families_searched: usize,
    #[serde(skip)]
    pub best: Option<ProbabilisticRepresentation>,
}

/// Tiny-instance search: single subclasses of `h` with at most four members,
/// then pairs of them under uniform `P`, each validated at `(alpha, beta)`.
/// `{h}` itself is always a candidate, so a valid representation is found.
pub fn repdim_bruteforce(h: &HypothesisClass, alpha: f64, beta: f64, caps: &Caps) -> Result<RepDimBounds> {
    if h.domain_size() > 3 || h.k() > 2 || h.len() > 6 {
        return Err(Error::cap("repdim brute-force instance (|X| <= 3, k <= 2, |H| <= 6)", h.len() as u128, 6u128));
    }
    let n = h.len();
    let mut subclasses: Vec<HypothesisClass> = (1u32..1 << n)
        .filter(|m| m.count_ones() <= 4)
        .map(|m| h.subclass(&RowSet::from_indices(n, (0..n).filter(|i| m >> i & 1 == 1))))
        .collect::<Result<_>>()?;
    subclasses.sort_by_key(HypothesisClass::len);
    let mut candidates: Vec<ProbabilisticRepresentation> =
        subclasses.iter().cloned().map(ProbabilisticRepresentation::point_mass).collect();
    candidates.push(ProbabilisticRepresentation::point_mass(h.clone()));
    let half = BigRational::new(1.into(), 2.into());
    for i in 0..subclasses.len() {
        for j in i + 1..subclasses.len() {
            candidates.push(ProbabilisticRepresentation::new(
                vec![subclasses[i].clone(), subclasses[j].clone()],
                vec![half.clone(), half.clone()],
            )?);
        }
    }
    let mut best: Option<ProbabilisticRepresentation> = None;
    for rep in &candidates {
        if best.as_ref().is_some_and(|b| b.size() <= rep.size()) {
            continue;
        }
        if is_probabilistic_representation(rep, h, alpha, beta, 1e-6, caps)?.verdict == RepVerdict::Valid {
            best = Some(rep.clone());
        }
    }
    let d = mld(h, caps)?;
    let best = best.expect("the class itself is always a valid representation");
    Ok(RepDimBounds {
        upper: best.size(),
        lower: d as f64 / 32.0,
        mld: d,
        families_searched: candidates.len(),
        best: Some(best),
    })
}

/// Draws `G_i ~ P`, then selects a member of `G_i` by the exponential
/// mechanism on the sample (one `rho` step per error). Outcomes are functions.
pub fn repr_to_private_learner(
    rep: &ProbabilisticRepresentation,
    sample: &LabeledSample,
) -> Result<ExactDistribution<Vec<Label>>> {
    let parts: Vec<ExactDistribution<Vec<Label>>> = rep
        .family
        .iter()
        .map(|g| {
            for &(x, _) in sample.points() {
                g.check_point(x)?;
            }
            let scores: Vec<u32> = g.rows().iter().map(|f| sample.errors(f)).collect();
            Ok(exp_mech_select(&scores, 1)?.map(|&i| g.row(i).to_vec()))
        })
        .collect::<Result<_>>()?;
    mixture(&rep.p, &parts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WmRepDimReport {
    pub mld: u32,
    pub size: f64,
    pub vacuous: bool,
    pub horizon: usize,
    pub sequence: Vec<(usize, Label)>,
    /// Exact expected mistakes on the worst sequence.
    pub expected_mistakes: f64,
    /// Mean mistakes over seeded simulated runs on that sequence.
    pub simulated_mistakes: f64,
    pub trials: usize,
    /// `3 MLD / 8 + sqrt(size MLD / 2)`.
    pub upper_chain: f64,
    /// `MLD / 2`.
    pub lower_chain: f64,
    pub lower_holds: bool,
    /// `MLD / 32 <= size`.
    pub implication_holds: bool,
}

/// Samples a class from the representation and runs weighted majority over
/// it, against the exhaustive adversary for `MLD(h)` rounds.
pub fn wm_repdim_experiment(
    h: &HypothesisClass,
    rep: &ProbabilisticRepresentation,
    trials: usize,
    seed: u64,
    caps: &Caps,
) -> Result<WmRepDimReport> {
    let d = mld(h, caps)?;
    let size = rep.size();
    let horizon = d as usize;
    let implication_holds = d as f64 / 32.0 <= size + 1e-6;
    if d == 0 {
        return Ok(WmRepDimReport {
            mld: 0,
            size,
            vacuous: true,
            horizon: 0,
            sequence: vec![],
            expected_mistakes: 0.0,
            simulated_mistakes: 0.0,
            trials: 0,
            upper_chain: 0.0,
            lower_chain: 0.0,
            lower_holds: true,
            implication_holds,
        });
    }
    let learners: Vec<WeightedMajority> = rep
        .family
        .iter()
        .map(|g| WeightedMajority::new(ExpertSet::from_class(g), horizon, None))
        .collect::<Result<_>>()?;
    let weights: Vec<f64> = rep.p.iter().map(|w| w.to_f64().unwrap_or(0.0)).collect();
    let mix = Mixture::new(weights.iter().copied().zip(learners.iter().cloned()).collect())?;
    let found = adversary_search(h, &mix, horizon, caps)?;

    let mut rng = SeededRng::new(seed);
    let mut total = 0usize;
    for _ in 0..trials {
        let u = rng.uniform01();
        let mut acc = 0.0;
        let mut pick = weights.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                pick = i;
                break;
            }
        }
        let mut wm = learners[pick].clone();
        for &(x, y) in &found.sequence {
            let guess = wm.predict(x)?.sample(rng.uniform01());
            total += usize::from(guess != y);
            wm.update(x, y)?;
        }
    }
    let lower_chain = d as f64 / 2.0;
    Ok(WmRepDimReport {
        mld: d,
        size,
        vacuous: false,
        horizon,
        sequence: found.sequence,
        expected_mistakes: found.mistakes,
        simulated_mistakes: if trials == 0 { 0.0 } else { total as f64 / trials as f64 },
        trials,
        upper_chain: 3.0 * d as f64 / 8.0 + (0.5 * size * d as f64).sqrt(),
        lower_chain,
        lower_holds: found.mistakes >= lower_chain - 1e-9,
        implication_holds,
    })
}
