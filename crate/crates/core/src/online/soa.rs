use super::{OnlineLearner, Prediction};
use crate::caps::Caps;
use crate::class::{bin2dec, label_bit, BitIndex, HypothesisClass, Label};
use crate::dims::engine::MldEngine;
use crate::error::{Error, Result};
use crate::rowset::RowSet;
use std::cell::RefCell;
use std::rc::Rc;

/// Standard optimal algorithm over a multiclass class.
///
/// Predicts the label whose restricted version space has the largest MLD,
/// breaking ties toward the lowest label. Clones share one memo table.
#[derive(Clone)]
pub struct Soa {
    engine: Rc<RefCell<MldEngine>>,
    version: RowSet,
    k: Label,
}

impl Soa {
    pub fn new(h: &HypothesisClass, caps: &Caps) -> Result<Self> {
        let engine = MldEngine::new(h, caps)?;
        let version = engine.splitter().full();
        Ok(Soa { engine: Rc::new(RefCell::new(engine)), version, k: h.k() })
    }

    pub fn version_space(&self) -> &RowSet {
        &self.version
    }

    /// MLD of the current version space.
    pub fn current_dim(&self) -> Result<u32> {
        self.engine.borrow_mut().value(&self.version)
    }

    pub fn predict_label(&mut self, x: usize) -> Result<Label> {
        let mut eng = self.engine.borrow_mut();
        eng.splitter().class().check_point(x)?;
        let mut best: Option<(i64, Label)> = None;
        for y in 0..=self.k {
            let sub = eng.splitter().restrict(&self.version, x, y);
            let score = if sub.is_empty() { -1 } else { eng.value(&sub)? as i64 };
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, y));
            }
        }
        Ok(best.expect("k >= 0").1)
    }
}

impl OnlineLearner for Soa {
    fn predict(&mut self, x: usize) -> Result<Prediction> {
        self.predict_label(x).map(Prediction::Label)
    }

    fn update(&mut self, x: usize, y: Label) -> Result<()> {
        let eng = self.engine.borrow();
        eng.splitter().class().check_label(y)?;
        let next = eng.splitter().restrict(&self.version, x, y);
        if next.is_empty() {
            return Err(Error::Unrealizable { x, y });
        }
        drop(eng);
        self.version = next;
        Ok(())
    }
}

/// One binary SOA per bit of the label; the prediction decodes the bits.
#[derive(Clone)]
pub struct BitwiseLearner {
    parts: Vec<Soa>,
    k: Label,
}

impl BitwiseLearner {
    pub fn new(h: &HypothesisClass, caps: &Caps) -> Result<Self> {
        let parts = h
            .binary_restrictions()
            .iter()
            .map(|r| Soa::new(r, caps))
            .collect::<Result<_>>()?;
        Ok(BitwiseLearner { parts, k: h.k() })
    }

    pub fn bits(&self) -> usize {
        self.parts.len()
    }
}

impl OnlineLearner for BitwiseLearner {
    fn predict(&mut self, x: usize) -> Result<Prediction> {
        let bits: Vec<u8> =
            self.parts.iter_mut().map(|p| p.predict_label(x).map(|b| b as u8)).collect::<Result<_>>()?;
        Ok(Prediction::Label(bin2dec(&bits, self.k)))
    }

    fn update(&mut self, x: usize, y: Label) -> Result<()> {
        if y > self.k {
            return Err(Error::LabelOutOfRange { label: y as u32, k: self.k });
        }
        let b = self.parts.len();
        let mut next = self.parts.clone();
        for (i, part) in BitIndex::all(b).zip(next.iter_mut()) {
            part.update(x, label_bit(y, i, b) as Label)
                .map_err(|_| Error::Unrealizable { x, y })?;
        }
        self.parts = next;
        Ok(())
    }
}
