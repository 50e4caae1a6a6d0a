//! Memoized shattering recursions over row subsets of a fixed root class.

use super::family::MapFamily;
use crate::caps::Caps;
use crate::class::{HypothesisClass, Label};
use crate::error::{Error, Result};
use crate::rowset::RowSet;
use std::collections::HashMap;

pub(crate) fn floor_log2(n: usize) -> u32 {
    debug_assert!(n > 0);
    usize::BITS - 1 - n.leading_zeros()
}

/// Root class plus, for every point, the rows grouped by label.
#[derive(Debug, Clone)]
pub struct Splitter {
    class: HypothesisClass,
    groups: Vec<Vec<(Label, RowSet)>>,
}

impl Splitter {
    pub fn new(class: &HypothesisClass) -> Self {
        let groups = (0..class.domain_size()).map(|x| class.label_groups(x)).collect();
        Splitter { class: class.clone(), groups }
    }

    pub fn class(&self) -> &HypothesisClass {
        &self.class
    }

    pub fn full(&self) -> RowSet {
        self.class.all_rows()
    }

    /// Nonempty parts of `set` by the label assigned to `x`, sorted by label.
    pub fn children(&self, set: &RowSet, x: usize) -> Vec<(Label, RowSet)> {
        self.groups[x]
            .iter()
            .filter_map(|(y, g)| {
                let part = set.intersect(g);
                (!part.is_empty()).then_some((*y, part))
            })
            .collect()
    }

    /// Rows of `set` whose label at `x` lies in `mask`.
    pub fn select(&self, set: &RowSet, x: usize, mask: u64) -> RowSet {
        let mut out = RowSet::empty(self.class.len());
        for (y, g) in &self.groups[x] {
            if mask >> y & 1 == 1 {
                out.union_with(&set.intersect(g));
            }
        }
        out
    }

    /// The subset of `set` consistent with `f(x) = y`.
    pub fn restrict(&self, set: &RowSet, x: usize, y: Label) -> RowSet {
        match self.groups[x].iter().find(|(l, _)| *l == y) {
            Some((_, g)) => set.intersect(g),
            None => RowSet::empty(self.class.len()),
        }
    }
}

struct Budget {
    used: u64,
    cap: u64,
}

impl Budget {
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.cap {
            return Err(Error::cap("recursion nodes", self.used, self.cap));
        }
        Ok(())
    }
}

/// Multiclass Littlestone dimension of every row subset of one root class.
pub struct MldEngine {
    sp: Splitter,
    budget: Budget,
    memo: HashMap<RowSet, u32>,
}

impl MldEngine {
    pub fn new(class: &HypothesisClass, caps: &Caps) -> Result<Self> {
        caps.check_class_size(class.len())?;
        Ok(MldEngine {
            sp: Splitter::new(class),
            budget: Budget { used: 0, cap: caps.max_nodes },
            memo: HashMap::new(),
        })
    }

    pub fn splitter(&self) -> &Splitter {
        &self.sp
    }

    pub fn nodes_visited(&self) -> u64 {
        self.budget.used
    }

    pub fn root(&mut self) -> Result<u32> {
        let full = self.sp.full();
        self.value(&full)
    }

    /// MLD of the subclass `set`; `set` must be nonempty.
    pub fn value(&mut self, set: &RowSet) -> Result<u32> {
        if set.is_empty() {
            return Err(Error::EmptyClass);
        }
        if let Some(&v) = self.memo.get(set) {
            return Ok(v);
        }
        self.budget.tick()?;
        let n = set.len();
        let mut best = 0u32;
        if n > 1 {
            let ub = floor_log2(n);
            for x in 0..self.sp.class.domain_size() {
                let mut ch = self.sp.children(set, x);
                if ch.len() < 2 {
                    continue;
                }
                ch.sort_by_key(|(_, s)| std::cmp::Reverse(s.len()));
                if floor_log2(ch[1].1.len()) < best {
                    continue;
                }
                // Largest and second-largest child values seen so far.
                let mut top = [-1i64, -1i64];
                for (i, (_, c)) in ch.iter().enumerate() {
                    if i >= 1 && floor_log2(c.len()) as i64 <= top[1] {
                        break;
                    }
                    let v = self.value(c)? as i64;
                    if v > top[0] {
                        top = [v, top[0]];
                    } else if v > top[1] {
                        top[1] = v;
                    }
                }
                best = best.max(1 + top[1] as u32);
                if best == ub {
                    break;
                }
            }
        }
        self.memo.insert(set.clone(), best);
        Ok(best)
    }
}

/// Ψ-Littlestone dimension (plain and uniform) for one family.
pub struct PsiEngine {
    sp: Splitter,
    masks: Vec<(u64, u64)>,
    budget: Budget,
    max_sequences: usize,
    memo: HashMap<RowSet, u32>,
    splits: HashMap<u64, Vec<(u64, u64)>>,
    uniform_memo: HashMap<(RowSet, Vec<u32>), bool>,
}

impl PsiEngine {
    pub fn new(class: &HypothesisClass, family: &MapFamily, caps: &Caps) -> Result<Self> {
        caps.check_class_size(class.len())?;
        if family.k() != class.k() {
            return Err(Error::InvalidParameter(format!(
                "family over k = {} used with a class over k = {}",
                family.k(),
                class.k()
            )));
        }
        if class.k() > 63 {
            return Err(Error::InvalidParameter(format!(
                "Ψ dimensions support k <= 63, got k = {}",
                class.k()
            )));
        }
        if family.len() > caps.max_family_size {
            return Err(Error::cap("family size", family.len() as u128, caps.max_family_size as u128));
        }
        Ok(PsiEngine {
            sp: Splitter::new(class),
            masks: family.maps().iter().map(|m| m.masks()).collect(),
            budget: Budget { used: 0, cap: caps.max_nodes },
            max_sequences: caps.max_family_size,
            memo: HashMap::new(),
            splits: HashMap::new(),
            uniform_memo: HashMap::new(),
        })
    }

    pub fn splitter(&self) -> &Splitter {
        &self.sp
    }

    pub fn family_len(&self) -> usize {
        self.masks.len()
    }

    /// Projects map `i` onto the labels `present` at a point.
    pub fn project(&self, i: usize, present: u64) -> (u64, u64) {
        let (m0, m1) = self.masks[i];
        (m0 & present, m1 & present)
    }

    /// Maximal splits of the label set `present` induced by the family.
    ///
    /// Swapping the two sides mirrors the subtree, and enlarging either side
    /// can only enlarge the subclasses, so only undominated unordered pairs
    /// need to be explored.
    fn splits_for(&mut self, present: u64) -> &[(u64, u64)] {
        let masks = &self.masks;
        self.splits.entry(present).or_insert_with(|| {
            let mut cand: Vec<(u64, u64)> = masks
                .iter()
                .map(|&(m0, m1)| (m0 & present, m1 & present))
                .filter(|&(a, b)| a != 0 && b != 0)
                .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
                .collect();
            cand.sort_unstable();
            cand.dedup();
            let covered = |(a0, a1): (u64, u64), (b0, b1): (u64, u64)| {
                (a0 & !b0 == 0 && a1 & !b1 == 0) || (a0 & !b1 == 0 && a1 & !b0 == 0)
            };
            let keep: Vec<(u64, u64)> = cand
                .iter()
                .copied()
                .filter(|&a| !cand.iter().any(|&b| b != a && covered(a, b)))
                .collect();
            keep
        })
    }

    fn present(children: &[(Label, RowSet)]) -> u64 {
        children.iter().fold(0u64, |m, (y, _)| m | 1 << y)
    }

    fn union_of(&self, children: &[(Label, RowSet)], mask: u64) -> RowSet {
        let mut out = RowSet::empty(self.sp.class.len());
        for (y, s) in children {
            if mask >> y & 1 == 1 {
                out.union_with(s);
            }
        }
        out
    }

    pub fn root(&mut self) -> Result<u32> {
        let full = self.sp.full();
        self.value(&full)
    }

    /// Ψ-Littlestone dimension of the nonempty subclass `set`.
    pub fn value(&mut self, set: &RowSet) -> Result<u32> {
        if set.is_empty() {
            return Err(Error::EmptyClass);
        }
        if let Some(&v) = self.memo.get(set) {
            return Ok(v);
        }
        self.budget.tick()?;
        let n = set.len();
        let mut best = 0u32;
        if n > 1 {
            let ub = floor_log2(n);
            'points: for x in 0..self.sp.class.domain_size() {
                let ch = self.sp.children(set, x);
                if ch.len() < 2 {
                    continue;
                }
                let splits = self.splits_for(Self::present(&ch)).to_vec();
                for (m0, m1) in splits {
                    let mut a = self.union_of(&ch, m0);
                    let mut b = self.union_of(&ch, m1);
                    if a.len() > b.len() {
                        std::mem::swap(&mut a, &mut b);
                    }
                    if floor_log2(a.len()) < best {
                        continue;
                    }
                    let va = self.value(&a)?;
                    if va < best {
                        continue;
                    }
                    let vb = self.value(&b)?;
                    best = best.max(1 + va.min(vb));
                    if best == ub {
                        break 'points;
                    }
                }
            }
        }
        self.memo.insert(set.clone(), best);
        Ok(best)
    }

    /// Whether a uniform tree whose levels carry maps `seq` (by family index)
    /// is shattered by `set`.
    pub fn shatters_uniform(&mut self, set: &RowSet, seq: &[u32]) -> Result<bool> {
        if set.is_empty() {
            return Ok(false);
        }
        let Some((&phi, rest)) = seq.split_first() else {
            return Ok(true);
        };
        if seq.len() >= usize::BITS as usize || set.len() < 1usize << seq.len() {
            return Ok(false);
        }
        let key = (set.clone(), seq.to_vec());
        if let Some(&v) = self.uniform_memo.get(&key) {
            return Ok(v);
        }
        self.budget.tick()?;
        let (m0, m1) = self.masks[phi as usize];
        let mut found = false;
        for x in 0..self.sp.class.domain_size() {
            let a = self.sp.select(set, x, m0);
            if a.is_empty() {
                continue;
            }
            let b = self.sp.select(set, x, m1);
            if b.is_empty() {
                continue;
            }
            if self.shatters_uniform(&a, rest)? && self.shatters_uniform(&b, rest)? {
                found = true;
                break;
            }
        }
        self.uniform_memo.insert(key, found);
        Ok(found)
    }

    /// Uniform Ψ-Littlestone dimension of the root class together with every
    /// map sequence that realizes it, in lexicographic order.
    ///
    /// A working sequence stays working when its last level is dropped, so
    /// candidates of length `b + 1` are the working sequences of length `b`
    /// extended by one map.
    pub fn uniform(&mut self) -> Result<(u32, Vec<Vec<u32>>)> {
        let full = self.sp.full();
        let mut working: Vec<Vec<u32>> = vec![vec![]];
        let mut depth = 0u32;
        loop {
            let candidates = working.len().saturating_mul(self.masks.len());
            if candidates > self.max_sequences {
                return Err(Error::cap(
                    "uniform map sequences",
                    candidates as u128,
                    self.max_sequences as u128,
                ));
            }
            let mut next = Vec::new();
            for seq in &working {
                for phi in 0..self.masks.len() as u32 {
                    let mut cand = seq.clone();
                    cand.push(phi);
                    if self.shatters_uniform(&full, &cand)? {
                        next.push(cand);
                    }
                }
            }
            if next.is_empty() {
                return Ok((depth, working));
            }
            depth += 1;
            working = next;
        }
    }
}
