//! Finite multiclass hypothesis classes and their binary restrictions.

use crate::error::{Error, Result};
use crate::rowset::RowSet;
use serde::{Deserialize, Serialize};

/// A label in `0..=k`.
pub type Label = u16;

/// Number of bits `B = ceil(log2(k + 1))` used to encode labels in `0..=k`
/// (at least one bit).
pub fn bits_for(k: Label) -> usize {
    let n = k as u32 + 1;
    let b = (u32::BITS - (n - 1).leading_zeros()) as usize;
    b.max(1)
}

/// MSB-first binary expansion of `label` on `bits` bits.
pub fn dec2bin(label: Label, bits: usize) -> Vec<u8> {
    (0..bits).map(|i| ((label as u32 >> (bits - 1 - i)) & 1) as u8).collect()
}

/// MSB-first decoding, clamped to `k` when the pattern decodes above it.
pub fn bin2dec(bits: &[u8], k: Label) -> Label {
    let v = bits.iter().fold(0u64, |acc, &b| (acc << 1) | (b & 1) as u64);
    v.min(k as u64) as Label
}

/// Bit `index` (1 = most significant) of `label` on a `bits`-bit expansion.
#[inline]
pub fn label_bit(label: Label, index: BitIndex, bits: usize) -> u8 {
    ((label as u32 >> (bits - index.get())) & 1) as u8
}

/// Index of a binary restriction, `1..=B`, with 1 the most significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitIndex(usize);

impl BitIndex {
    pub fn new(index: usize, bits: usize) -> Result<Self> {
        if index == 0 || index > bits {
            return Err(Error::InvalidBitIndex { index, bits });
        }
        Ok(BitIndex(index))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// All bit indices `1..=bits`.
    pub fn all(bits: usize) -> impl Iterator<Item = BitIndex> {
        (1..=bits).map(BitIndex)
    }
}

/// An explicit finite class of functions `{0..domain_size} -> {0..=k}`.
///
/// Rows are sorted lexicographically and deduplicated on construction, so two
/// classes holding the same functions compare equal.
#[derive(Debug, Clone)]
pub struct HypothesisClass {
    k: Label,
    domain_size: usize,
    rows: Vec<Vec<Label>>,
    name: Option<String>,
}

impl PartialEq for HypothesisClass {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.domain_size == other.domain_size && self.rows == other.rows
    }
}

impl Eq for HypothesisClass {}

impl std::hash::Hash for HypothesisClass {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.k.hash(state);
        self.domain_size.hash(state);
        self.rows.hash(state);
    }
}

impl HypothesisClass {
    pub fn new(k: Label, domain_size: usize, mut rows: Vec<Vec<Label>>) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::InvalidClass("domain_size must be positive".into()));
        }
        if rows.is_empty() {
            return Err(Error::EmptyClass);
        }
        for row in &rows {
            if row.len() != domain_size {
                return Err(Error::InvalidClass(format!(
                    "row of length {} over a domain of size {domain_size}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&y| y > k) {
                return Err(Error::LabelOutOfRange { label: bad as u32, k });
            }
        }
        rows.sort();
        rows.dedup();
        Ok(HypothesisClass { k, domain_size, rows, name: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn k(&self) -> Label {
        self.k
    }

    /// Number of bits in the label encoding.
    pub fn bits(&self) -> usize {
        bits_for(self.k)
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<Label>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Label] {
        &self.rows[i]
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn is_binary(&self) -> bool {
        self.k == 1
    }

    pub fn contains(&self, f: &[Label]) -> bool {
        self.rows.binary_search_by(|r| r.as_slice().cmp(f)).is_ok()
    }

    pub fn index_of(&self, f: &[Label]) -> Option<usize> {
        self.rows.binary_search_by(|r| r.as_slice().cmp(f)).ok()
    }

    pub fn check_point(&self, x: usize) -> Result<()> {
        if x >= self.domain_size {
            return Err(Error::DomainOutOfRange { index: x, size: self.domain_size });
        }
        Ok(())
    }

    pub fn check_label(&self, y: Label) -> Result<()> {
        if y > self.k {
            return Err(Error::LabelOutOfRange { label: y as u32, k: self.k });
        }
        Ok(())
    }

    /// The class `{f in H : f(x) = y}`, or `None` when no row matches.
    pub fn restrict(&self, x: usize, y: Label) -> Result<Option<HypothesisClass>> {
        self.check_point(x)?;
        self.check_label(y)?;
        let rows: Vec<Vec<Label>> = self.rows.iter().filter(|r| r[x] == y).cloned().collect();
        if rows.is_empty() {
            return Ok(None);
        }
        Ok(Some(HypothesisClass { k: self.k, domain_size: self.domain_size, rows, name: None }))
    }

    /// Rows of this class selected by `set`, as a new class.
    pub fn subclass(&self, set: &RowSet) -> Result<HypothesisClass> {
        let rows: Vec<Vec<Label>> = set.iter().map(|i| self.rows[i].clone()).collect();
        HypothesisClass::new(self.k, self.domain_size, rows)
    }

    /// The binary restriction `H|_i = {x -> bit i of f(x)}`.
    pub fn binary_restriction(&self, index: BitIndex) -> Result<HypothesisClass> {
        let bits = self.bits();
        if index.get() > bits {
            return Err(Error::InvalidBitIndex { index: index.get(), bits });
        }
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&y| label_bit(y, index, bits) as Label).collect())
            .collect();
        HypothesisClass::new(1, self.domain_size, rows)
    }

    /// All binary restrictions, ordered by bit index.
    pub fn binary_restrictions(&self) -> Vec<HypothesisClass> {
        BitIndex::all(self.bits())
            .map(|i| self.binary_restriction(i).expect("valid bit index"))
            .collect()
    }

    /// Row indices grouped by the label each row assigns to `x`, for labels that occur.
    pub fn label_groups(&self, x: usize) -> Vec<(Label, RowSet)> {
        let mut groups: Vec<(Label, RowSet)> = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            match groups.iter_mut().find(|(y, _)| *y == r[x]) {
                Some((_, s)) => s.insert(i),
                None => {
                    let mut s = RowSet::empty(self.rows.len());
                    s.insert(i);
                    groups.push((r[x], s));
                }
            }
        }
        groups.sort_by_key(|(y, _)| *y);
        groups
    }

    pub fn all_rows(&self) -> RowSet {
        RowSet::full(self.rows.len())
    }

    /// Index of a row consistent with every labeled point, if any.
    pub fn consistent_row(&self, sample: &LabeledSample) -> Option<usize> {
        self.rows
            .iter()
            .position(|r| sample.points().iter().all(|&(x, y)| r[x] == y))
    }

    pub fn to_file(&self) -> ClassFile {
        ClassFile {
            k: self.k,
            domain_size: self.domain_size,
            functions: self.rows.clone(),
            name: self.name.clone(),
        }
    }

    pub fn from_file(file: ClassFile) -> Result<Self> {
        let class = HypothesisClass::new(file.k, file.domain_size, file.functions)?;
        Ok(match file.name {
            Some(n) => class.with_name(n),
            None => class,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ClassFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("class serializes")
    }
}

/// On-disk class format: `{"k", "domain_size", "functions", "name"?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassFile {
    pub k: Label,
    pub domain_size: usize,
    pub functions: Vec<Vec<Label>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// A labeled sample `((x_1, y_1), ..., (x_n, y_n))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct LabeledSample {
    points: Vec<(usize, Label)>,
}

impl LabeledSample {
    pub fn new(points: Vec<(usize, Label)>) -> Self {
        LabeledSample { points }
    }

    /// Validates the sample against a class's domain and label range.
    pub fn for_class(points: Vec<(usize, Label)>, class: &HypothesisClass) -> Result<Self> {
        for &(x, y) in &points {
            class.check_point(x)?;
            class.check_label(y)?;
        }
        Ok(LabeledSample { points })
    }

    /// Labels the points `xs` with `f`.
    pub fn labeled_by(xs: &[usize], f: &[Label]) -> Self {
        LabeledSample { points: xs.iter().map(|&x| (x, f[x])).collect() }
    }

    pub fn points(&self) -> &[(usize, Label)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of points `f` misclassifies.
    pub fn errors(&self, f: &[Label]) -> u32 {
        self.points.iter().filter(|&&(x, y)| f[x] != y).count() as u32
    }

    /// Contiguous sub-sample `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> LabeledSample {
        LabeledSample { points: self.points[start..end].to_vec() }
    }

    /// A copy with position `i` replaced by `point`.
    pub fn replaced(&self, i: usize, point: (usize, Label)) -> LabeledSample {
        let mut points = self.points.clone();
        points[i] = point;
        LabeledSample { points }
    }

    /// All neighbours obtained by replacing one point with another `(x, y)`
    /// from `domain_size x {0..=k}`. Each neighbour is tagged with the
    /// replaced position.
    pub fn neighbors(&self, domain_size: usize, k: Label) -> Vec<(usize, LabeledSample)> {
        let mut out = Vec::new();
        for i in 0..self.points.len() {
            for x in 0..domain_size {
                for y in 0..=k {
                    if (x, y) != self.points[i] {
                        out.push((i, self.replaced(i, (x, y))));
                    }
                }
            }
        }
        out
    }
}
