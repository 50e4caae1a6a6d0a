//! 0-covers of input-labeled trees.

use crate::caps::Caps;
use crate::class::{HypothesisClass, Label};
use crate::dims::engine::Splitter;
use crate::error::{Error, Result};
use crate::rowset::RowSet;
use crate::scalar::Scalar;
use crate::trees::{InputLabeledTree, IoLabeledTree, OutputLabeledTree, PsiLabeledTree};
use num_bigint::BigUint;
use num_traits::{Float, One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeSet;

/// Trees whose root-to-leaf paths can be realized by class members.
pub trait Shatterable {
    fn shattered_by(&self, h: &HypothesisClass) -> Result<bool>;
}

impl Shatterable for IoLabeledTree {
    fn shattered_by(&self, h: &HypothesisClass) -> Result<bool> {
        self.is_shattered_by(h)
    }
}

impl Shatterable for PsiLabeledTree {
    fn shattered_by(&self, h: &HypothesisClass) -> Result<bool> {
        self.is_shattered_by(h)
    }
}

pub fn is_shattered<T: Shatterable>(h: &HypothesisClass, tree: &T) -> Result<bool> {
    tree.shattered_by(h)
}

fn check_depths(v: &[OutputLabeledTree], z: &InputLabeledTree) -> Result<()> {
    match v.iter().find(|t| t.depth() != z.depth()) {
        Some(t) => Err(Error::DepthMismatch { expected: z.depth(), found: t.depth() }),
        None => Ok(()),
    }
}

/// Whether `v` is a 0-cover of `h` on `z`: every (function, path) label
/// sequence appears on the matching path of some tree in `v`.
pub fn is_zero_cover(v: &[OutputLabeledTree], h: &HypothesisClass, z: &InputLabeledTree) -> Result<bool> {
    check_depths(v, z)?;
    z.check_domain(h)?;
    for p in 0..z.path_count() {
        let nodes = z.path(p);
        let present: BTreeSet<Vec<Label>> = v.iter().map(|t| t.along(&nodes)).collect();
        for f in h.rows() {
            if !present.contains(&z.apply(f, p)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Union of two covers, without duplicates.
pub fn union_covers(a: &[OutputLabeledTree], b: &[OutputLabeledTree]) -> Vec<OutputLabeledTree> {
    let set: BTreeSet<OutputLabeledTree> = a.iter().chain(b).cloned().collect();
    set.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverCertificate {
    pub tree: InputLabeledTree,
    pub cover: Vec<OutputLabeledTree>,
    pub verified: bool,
}

impl CoverCertificate {
    pub fn size(&self) -> usize {
        self.cover.len()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tree": self.tree.to_json(),
            "size": self.size(),
            "verified": self.verified,
            "cover": self.cover.iter().map(|t| t.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Builds a 0-cover by splitting the class on the root label, covering both
/// subtrees for each part, stitching the two covers together and taking the
/// union over parts. The result is verified before it is returned.
pub fn build_cover(h: &HypothesisClass, z: &InputLabeledTree, caps: &Caps) -> Result<CoverCertificate> {
    caps.check_class_size(h.len())?;
    caps.check_depth(z.depth())?;
    z.check_domain(h)?;
    let sp = Splitter::new(h);
    let cover = cover_rec(&sp, &sp.full(), z, caps)?;
    let verified = is_zero_cover(&cover, h, z)?;
    Ok(CoverCertificate { tree: z.clone(), cover, verified })
}

fn cover_rec(
    sp: &Splitter,
    set: &RowSet,
    z: &InputLabeledTree,
    caps: &Caps,
) -> Result<Vec<OutputLabeledTree>> {
    if set.len() == 1 {
        let f = sp.class().row(set.first().expect("nonempty"));
        return Ok(vec![OutputLabeledTree::image_of(f, z)]);
    }
    let root = z.labels()[0];
    let mut out = BTreeSet::new();
    for (i, part) in sp.children(set, root) {
        match (z.left(), z.right()) {
            (Some(zl), Some(zr)) => {
                let mut left = cover_rec(sp, &part, &zl, caps)?;
                let mut right = cover_rec(sp, &part, &zr, caps)?;
                left.sort();
                right.sort();
                let m = left.len().max(right.len());
                for j in 0..m {
                    let l = &left[j % left.len()];
                    let r = &right[j % right.len()];
                    out.insert(OutputLabeledTree::join(i, l, r)?);
                }
            }
            _ => {
                out.insert(OutputLabeledTree::single(i));
            }
        }
        if out.len() > caps.max_outcomes {
            return Err(Error::cap("cover size", out.len() as u128, caps.max_outcomes as u128));
        }
    }
    Ok(out.into_iter().collect())
}

/// A (path, label sequence) requirement of a 0-cover.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Constraint {
    path: usize,
    labels: Vec<Label>,
}

/// Two requirements conflict when no single output tree can satisfy both,
/// i.e. they disagree on a node their paths share.
fn conflicts(z: &InputLabeledTree, a: &Constraint, b: &Constraint) -> bool {
    let pa = z.path(a.path);
    let pb = z.path(b.path);
    pa.iter()
        .zip(&pb)
        .zip(a.labels.iter().zip(&b.labels))
        .take_while(|((u, v), _)| u == v)
        .any(|(_, (la, lb))| la != lb)
}

fn constraints(h: &HypothesisClass, z: &InputLabeledTree) -> Vec<Constraint> {
    let set: BTreeSet<Constraint> = (0..z.path_count())
        .flat_map(|p| h.rows().iter().map(move |f| Constraint { path: p, labels: z.apply(f, p) }))
        .collect();
    set.into_iter().collect()
}

/// Exact size of the smallest 0-cover of `h` on `z`.
///
/// Requirements that agree on every shared node can always be merged into one
/// output tree, so the minimum cover size is the chromatic number of the
/// conflict graph between distinct requirements, found by DSATUR
/// branch-and-bound seeded with the greedy coloring.
pub fn min_cover_size(h: &HypothesisClass, z: &InputLabeledTree, caps: &Caps) -> Result<usize> {
    caps.check_class_size(h.len())?;
    caps.check_depth(z.depth())?;
    z.check_domain(h)?;
    let cons = constraints(h, z);
    let n = cons.len();
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if conflicts(z, &cons[i], &cons[j]) {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
    }
    chromatic_number(&adj, caps.max_nodes)
}

/// Chromatic number by DSATUR branch-and-bound.
pub fn chromatic_number(adj: &[Vec<bool>], max_nodes: u64) -> Result<usize> {
    let n = adj.len();
    if n == 0 {
        return Ok(0);
    }
    let greedy = greedy_coloring(adj);
    let clique = greedy_clique(adj);
    let mut search = Dsatur { adj, best: greedy, lower: clique, nodes: 0, max_nodes };
    if search.best > search.lower {
        let mut colors = vec![usize::MAX; n];
        search.branch(&mut colors, 0, 0)?;
    }
    Ok(search.best)
}

fn greedy_coloring(adj: &[Vec<bool>]) -> usize {
    let n = adj.len();
    let mut colors = vec![usize::MAX; n];
    let mut used = 0;
    for v in 0..n {
        let c = (0..)
            .find(|&c| (0..n).all(|u| !(adj[v][u] && colors[u] == c)))
            .expect("some color is free");
        colors[v] = c;
        used = used.max(c + 1);
    }
    used
}

fn greedy_clique(adj: &[Vec<bool>]) -> usize {
    let n = adj.len();
    let mut best = 1;
    for start in 0..n {
        let mut clique = vec![start];
        for (v, row) in adj.iter().enumerate() {
            if v != start && clique.iter().all(|&u| row[u]) {
                clique.push(v);
            }
        }
        best = best.max(clique.len());
    }
    best
}

struct Dsatur<'a> {
    adj: &'a [Vec<bool>],
    best: usize,
    lower: usize,
    nodes: u64,
    max_nodes: u64,
}

impl Dsatur<'_> {
    fn branch(&mut self, colors: &mut [usize], colored: usize, used: usize) -> Result<()> {
        if self.best == self.lower {
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::cap("cover search nodes", self.nodes, self.max_nodes));
        }
        let n = colors.len();
        if colored == n {
            self.best = self.best.min(used);
            return Ok(());
        }
        // Uncolored vertex with the most distinct neighbor colors, then highest degree.
        let mut pick = None;
        let mut pick_key = (0usize, 0usize);
        for v in 0..n {
            if colors[v] != usize::MAX {
                continue;
            }
            let mut seen = vec![false; used];
            let mut deg = 0;
            for u in 0..n {
                if self.adj[v][u] {
                    if colors[u] == usize::MAX {
                        deg += 1;
                    } else {
                        seen[colors[u]] = true;
                    }
                }
            }
            let sat = seen.iter().filter(|&&s| s).count();
            if pick.is_none() || (sat, deg) > pick_key {
                pick = Some(v);
                pick_key = (sat, deg);
            }
        }
        let v = pick.expect("an uncolored vertex exists");
        for c in 0..=used {
            let new_used = used.max(c + 1);
            if new_used >= self.best {
                break;
            }
            if (0..n).any(|u| self.adj[v][u] && colors[u] == c) {
                continue;
            }
            colors[v] = c;
            self.branch(colors, colored + 1, new_used)?;
            colors[v] = usize::MAX;
            if self.best == self.lower {
                break;
            }
        }
        Ok(())
    }
}

/// `sum_{i=0}^{d} C(n, i) k^i`.
pub fn sauer_bound(d: u64, k: u64, n: u64) -> Result<BigUint> {
    if n < d {
        return Err(Error::InvalidParameter(format!("sauer bound needs n >= d, got n = {n}, d = {d}")));
    }
    let mut total = BigUint::zero();
    let mut binom = BigUint::one();
    let mut kp = BigUint::one();
    for i in 0..=d {
        if i > 0 {
            binom = binom * (n - i + 1) / i;
            kp *= k;
        }
        total += &binom * &kp;
    }
    Ok(total)
}

/// `(e k n / d)^d`, defined for `d > 0`.
pub fn sauer_bound_closed<S: Float + Scalar>(d: u64, k: u64, n: u64) -> Result<S> {
    if d == 0 {
        return Err(Error::InvalidParameter("closed form needs d > 0".into()));
    }
    if n < d {
        return Err(Error::InvalidParameter(format!("sauer bound needs n >= d, got n = {n}, d = {d}")));
    }
    let cast = |v: u64| S::from_u64(v).expect("representable");
    let base = S::one().exp() * cast(k) * cast(n) / cast(d);
    Ok(base.powi(d as i32))
}

/// Stripped tree and per-path realizers from a Ψ-shattered tree.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundWitness {
    /// `None` for a depth-0 tree, whose cover number is 1 by convention.
    pub tree: Option<InputLabeledTree>,
    /// Row index realizing each of the `2^d` paths of the Ψ-tree, in path order.
    pub functions: Vec<usize>,
    /// Every two (function, stripped path) requirements conflict.
    pub pairwise_conflicting: bool,
}

impl LowerBoundWitness {
    pub fn required_size(&self) -> usize {
        self.functions.len()
    }
}

/// Strips a Ψ-shattered tree of depth `d` to an input-labeled tree of depth
/// `d` and picks the first realizing row of every path. Paths `2j` and
/// `2j + 1` of the Ψ-tree both map to path `j` of the stripped tree.
pub fn lower_bound_witness(h: &HypothesisClass, t: &PsiLabeledTree) -> Result<LowerBoundWitness> {
    let realizers = t.realizers(h)?;
    let functions: Vec<usize> = realizers
        .into_iter()
        .map(|r| r.ok_or_else(|| Error::InvalidParameter("tree is not shattered by the class".into())))
        .collect::<Result<_>>()?;
    if t.depth() == 0 {
        return Ok(LowerBoundWitness { tree: None, functions, pairwise_conflicting: true });
    }
    let z = t.strip()?;
    let cons: Vec<Constraint> = functions
        .iter()
        .enumerate()
        .map(|(p, &f)| Constraint { path: p / 2, labels: z.apply(h.row(f), p / 2) })
        .collect();
    let pairwise_conflicting =
        (0..cons.len()).all(|i| (i + 1..cons.len()).all(|j| conflicts(&z, &cons[i], &cons[j])));
    Ok(LowerBoundWitness { tree: Some(z), functions, pairwise_conflicting })
}

/// Numeric check that `2^{d_B} <= (e k d_B / d)^d` implies `d_B <= 6 d ln(k+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverChainCheck {
    pub premise: bool,
    pub conclusion: bool,
}

impl CoverChainCheck {
    pub fn holds(&self) -> bool {
        !self.premise || self.conclusion
    }
}

pub fn cover_chain_check(d: u32, d_b: u32, k: Label) -> CoverChainCheck {
    let conclusion = d_b as f64 <= crate::dims::log_bound(d, k);
    let premise = if d == 0 {
        d_b == 0
    } else {
        let lhs = d_b as f64 * std::f64::consts::LN_2;
        let rhs = d as f64 * (std::f64::consts::E * k as f64 * d_b as f64 / d as f64).ln();
        d_b >= d && lhs <= rhs
    };
    CoverChainCheck { premise, conclusion }
}
