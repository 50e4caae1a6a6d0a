//! Littlestone-type dimensions of finite classes.
//!
//! Every value is computed exactly by a memoized recursion over row subsets
//! of the input class (see [`engine`]). Witness trees are rebuilt from the
//! memoized values, choosing the lexicographically smallest split at every node.

pub mod engine;
pub mod family;

use crate::caps::Caps;
use crate::class::{HypothesisClass, Label};
use crate::error::{Error, Result};
use crate::rowset::RowSet;
use crate::trees::{IoLabeledTree, IoNode, PsiLabeledTree, PsiNode};
use engine::{MldEngine, PsiEngine};
use family::{family_psi_b, family_psi_bin, family_psi_n, MapFamily};
use serde::{Deserialize, Serialize};

/// Multiclass Littlestone dimension.
pub fn mld(h: &HypothesisClass, caps: &Caps) -> Result<u32> {
    MldEngine::new(h, caps)?.root()
}

/// Littlestone dimension of a binary class.
pub fn littlestone_dim(h: &HypothesisClass, caps: &Caps) -> Result<u32> {
    if !h.is_binary() {
        return Err(Error::NotBinary(h.k()));
    }
    mld(h, caps)
}

/// Ψ-Littlestone dimension for the family `psi`.
pub fn psi_ld(h: &HypothesisClass, psi: &MapFamily, caps: &Caps) -> Result<u32> {
    PsiEngine::new(h, psi, caps)?.root()
}

/// Uniform Ψ-Littlestone dimension: one map per tree level.
pub fn psi_ld_uniform(h: &HypothesisClass, psi: &MapFamily, caps: &Caps) -> Result<u32> {
    Ok(PsiEngine::new(h, psi, caps)?.uniform()?.0)
}

/// Littlestone dimensions `d_1..d_B` of the binary restrictions.
pub fn binary_dims(h: &HypothesisClass, caps: &Caps) -> Result<Vec<u32>> {
    h.binary_restrictions().iter().map(|r| littlestone_dim(r, caps)).collect()
}

/// A shattered io-labeled tree of depth `depth`, or `None` when `depth > mld(h)`.
pub fn find_shattered_io_tree(
    h: &HypothesisClass,
    depth: usize,
    caps: &Caps,
) -> Result<Option<IoLabeledTree>> {
    caps.check_depth(depth)?;
    let mut eng = MldEngine::new(h, caps)?;
    if depth as u32 > eng.root()? {
        return Ok(None);
    }
    let full = eng.splitter().full();
    build_io(&mut eng, &full, depth).map(Some)
}

fn build_io(eng: &mut MldEngine, set: &RowSet, depth: usize) -> Result<IoLabeledTree> {
    if depth == 0 {
        return Ok(IoLabeledTree::leaf());
    }
    let need = depth as u32 - 1;
    for x in 0..eng.splitter().class().domain_size() {
        let ch = eng.splitter().children(set, x);
        let mut ok: Vec<(Label, RowSet)> = Vec::new();
        for (y, c) in ch {
            if eng.value(&c)? >= need {
                ok.push((y, c));
            }
        }
        if ok.len() >= 2 {
            let (y0, c0) = &ok[0];
            let (y1, c1) = &ok[1];
            let left = build_io(eng, c0, depth - 1)?;
            let right = build_io(eng, c1, depth - 1)?;
            return IoLabeledTree::join(IoNode { x, left: *y0, right: *y1 }, &left, &right);
        }
    }
    unreachable!("memoized value promised a split")
}

/// A shattered Ψ-labeled tree of depth `depth`, or `None` when `depth`
/// exceeds the Ψ-Littlestone dimension.
pub fn find_shattered_psi_tree(
    h: &HypothesisClass,
    psi: &MapFamily,
    depth: usize,
    caps: &Caps,
) -> Result<Option<PsiLabeledTree>> {
    caps.check_depth(depth)?;
    let mut eng = PsiEngine::new(h, psi, caps)?;
    if depth as u32 > eng.root()? {
        return Ok(None);
    }
    let full = eng.splitter().full();
    build_psi(&mut eng, psi, &full, depth).map(Some)
}

fn build_psi(eng: &mut PsiEngine, psi: &MapFamily, set: &RowSet, depth: usize) -> Result<PsiLabeledTree> {
    if depth == 0 {
        return Ok(PsiLabeledTree::leaf());
    }
    let need = depth as u32 - 1;
    for x in 0..eng.splitter().class().domain_size() {
        for map in psi.maps() {
            let (m0, m1) = map.masks();
            let a = eng.splitter().select(set, x, m0);
            let b = eng.splitter().select(set, x, m1);
            if a.is_empty() || b.is_empty() {
                continue;
            }
            if eng.value(&a)? >= need && eng.value(&b)? >= need {
                let left = build_psi(eng, psi, &a, depth - 1)?;
                let right = build_psi(eng, psi, &b, depth - 1)?;
                return PsiLabeledTree::join(PsiNode { x, map: map.clone() }, &left, &right);
            }
        }
    }
    unreachable!("memoized value promised a split")
}

/// A shattered uniform Ψ-labeled tree of depth `depth`, or `None`.
pub fn find_shattered_uniform_psi_tree(
    h: &HypothesisClass,
    psi: &MapFamily,
    depth: usize,
    caps: &Caps,
) -> Result<Option<PsiLabeledTree>> {
    caps.check_depth(depth)?;
    let mut eng = PsiEngine::new(h, psi, caps)?;
    let (dim, seqs) = eng.uniform()?;
    if depth as u32 > dim {
        return Ok(None);
    }
    let seq: Vec<u32> = seqs[0][..depth].to_vec();
    let full = eng.splitter().full();
    build_uniform(&mut eng, psi, &full, &seq).map(Some)
}

fn build_uniform(eng: &mut PsiEngine, psi: &MapFamily, set: &RowSet, seq: &[u32]) -> Result<PsiLabeledTree> {
    let Some((&phi, rest)) = seq.split_first() else {
        return Ok(PsiLabeledTree::leaf());
    };
    let map = &psi.maps()[phi as usize];
    let (m0, m1) = map.masks();
    for x in 0..eng.splitter().class().domain_size() {
        let a = eng.splitter().select(set, x, m0);
        let b = eng.splitter().select(set, x, m1);
        if eng.shatters_uniform(&a, rest)? && eng.shatters_uniform(&b, rest)? {
            let left = build_uniform(eng, psi, &a, rest)?;
            let right = build_uniform(eng, psi, &b, rest)?;
            return PsiLabeledTree::join(PsiNode { x, map: map.clone() }, &left, &right);
        }
    }
    unreachable!("sequence was verified to shatter")
}

/// One inequality checked by [`dimension_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn le(name: &str, lhs: f64, rhs: f64) -> Self {
        BoundCheck { name: name.to_string(), lhs, rhs, holds: lhs <= rhs }
    }

    fn eq(name: &str, lhs: f64, rhs: f64) -> Self {
        BoundCheck { name: name.to_string(), lhs, rhs, holds: lhs == rhs }
    }
}

/// All dimensions of one class and the inequalities relating them.
///
/// `psi_b` is `None` when the full family exceeds the family-size cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub k: Label,
    pub domain_size: usize,
    pub class_size: usize,
    pub mld: u32,
    pub binary_dims: Vec<u32>,
    pub psi_n: u32,
    pub psi_bin: u32,
    pub psi_bin_uniform: u32,
    pub psi_b: Option<u32>,
    pub bounds_checked: Vec<BoundCheck>,
}

impl DimensionReport {
    pub fn max_binary_dim(&self) -> u32 {
        self.binary_dims.iter().copied().max().unwrap_or(0)
    }

    pub fn all_hold(&self) -> bool {
        self.bounds_checked.iter().all(|b| b.holds)
    }

    pub fn violations(&self) -> impl Iterator<Item = &BoundCheck> {
        self.bounds_checked.iter().filter(|b| !b.holds)
    }
}

/// `6 d ln(k + 1)`.
pub fn log_bound(d: u32, k: Label) -> f64 {
    6.0 * d as f64 * (k as f64 + 1.0).ln()
}

/// Computes every dimension and records each inequality, without failing on
/// a violated one.
pub fn compute_dimension_report(h: &HypothesisClass, caps: &Caps) -> Result<DimensionReport> {
    let k = h.k();
    let d = mld(h, caps)?;
    let dims = binary_dims(h, caps)?;
    let max_di = dims.iter().copied().max().unwrap_or(0);
    let bits = h.bits();

    let (psi_n, psi_bin, psi_bin_uniform) = if k == 0 {
        // Over a single label nothing splits.
        (0, 0, 0)
    } else {
        let bin = family_psi_bin(k)?;
        let mut bin_eng = PsiEngine::new(h, &bin, caps)?;
        (psi_ld(h, &family_psi_n(k)?, caps)?, bin_eng.root()?, bin_eng.uniform()?.0)
    };
    let psi_b = if k == 0 {
        Some(0)
    } else {
        match family_psi_b(k, caps) {
            Ok(fam) => Some(psi_ld(h, &fam, caps)?),
            Err(e) if e.is_cap() => None,
            Err(e) => return Err(e),
        }
    };

    let f = |v: u32| v as f64;
    let mut checks = vec![
        BoundCheck::eq("pair-family dimension equals MLD", f(psi_n), f(d)),
        BoundCheck::le("max binary LD <= uniform bit-family dimension", f(max_di), f(psi_bin_uniform)),
        BoundCheck::le("uniform bit-family dimension <= bit-family dimension", f(psi_bin_uniform), f(psi_bin)),
        BoundCheck::le("MLD <= bit-family dimension", f(d), f(psi_bin)),
        BoundCheck::le("max binary LD <= 6 MLD ln(k+1)", f(max_di), log_bound(d, k)),
        BoundCheck::le("MLD <= max binary LD * B", f(d), f(max_di * bits as u32)),
    ];
    if let Some(db) = psi_b {
        checks.push(BoundCheck::le("bit-family dimension <= full-family dimension", f(psi_bin), f(db)));
        checks.push(BoundCheck::le("full-family dimension <= 6 MLD ln(k+1)", f(db), log_bound(d, k)));
    }
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(DimensionReport {
        k,
        domain_size: h.domain_size(),
        class_size: h.len(),
        mld: d,
        binary_dims: dims,
        psi_n,
        psi_bin,
        psi_bin_uniform,
        psi_b,
        bounds_checked: checks,
    })
}

/// Like [`compute_dimension_report`], but a violated inequality is an error
/// naming it.
pub fn dimension_report(h: &HypothesisClass, caps: &Caps) -> Result<DimensionReport> {
    let report = compute_dimension_report(h, caps)?;
    if let Some(v) = report.violations().next() {
        return Err(Error::BoundViolated {
            name: v.name.clone(),
            lhs: v.lhs.to_string(),
            rhs: v.rhs.to_string(),
        });
    }
    Ok(report)
}
