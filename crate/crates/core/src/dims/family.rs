//! Collapsing maps `{0..=k} -> {0, 1, *}` and the standard families.

use crate::caps::Caps;
use crate::class::{bits_for, label_bit, BitIndex, Label};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Collapse {
    Zero,
    One,
    Star,
}

impl Collapse {
    pub fn symbol(self) -> char {
        match self {
            Collapse::Zero => '0',
            Collapse::One => '1',
            Collapse::Star => '*',
        }
    }

    pub fn from_symbol(c: char) -> Result<Self> {
        match c {
            '0' => Ok(Collapse::Zero),
            '1' => Ok(Collapse::One),
            '*' => Ok(Collapse::Star),
            _ => Err(Error::Parse(format!("bad collapsing symbol {c:?}"))),
        }
    }
}

/// A map from labels `0..=k` to `{0, 1, *}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CollapsingMap {
    image: Vec<Collapse>,
}

impl CollapsingMap {
    pub fn new(image: Vec<Collapse>) -> Result<Self> {
        if image.is_empty() {
            return Err(Error::InvalidParameter("collapsing map over an empty label set".into()));
        }
        Ok(CollapsingMap { image })
    }

    pub fn k(&self) -> Label {
        (self.image.len() - 1) as Label
    }

    #[inline]
    pub fn apply(&self, y: Label) -> Collapse {
        self.image[y as usize]
    }

    pub fn image(&self) -> &[Collapse] {
        &self.image
    }

    /// `phi_{w,w'}`: `w -> 0`, `w' -> 1`, everything else `*`.
    pub fn pair(k: Label, w: Label, w2: Label) -> Self {
        let mut image = vec![Collapse::Star; k as usize + 1];
        image[w as usize] = Collapse::Zero;
        image[w2 as usize] = Collapse::One;
        CollapsingMap { image }
    }

    /// `phi_i`: label to bit `i` of its binary expansion.
    pub fn bit(k: Label, index: BitIndex) -> Self {
        let b = bits_for(k);
        let image = (0..=k)
            .map(|y| if label_bit(y, index, b) == 0 { Collapse::Zero } else { Collapse::One })
            .collect();
        CollapsingMap { image }
    }

    /// Labels sent to 0 and to 1, as bitmasks (requires `k < 64`).
    pub fn masks(&self) -> (u64, u64) {
        let mut m0 = 0u64;
        let mut m1 = 0u64;
        for (y, c) in self.image.iter().enumerate() {
            match c {
                Collapse::Zero => m0 |= 1 << y,
                Collapse::One => m1 |= 1 << y,
                Collapse::Star => {}
            }
        }
        (m0, m1)
    }

    pub fn to_symbols(&self) -> String {
        self.image.iter().map(|c| c.symbol()).collect()
    }

    pub fn from_symbols(s: &str) -> Result<Self> {
        CollapsingMap::new(s.chars().map(Collapse::from_symbol).collect::<Result<_>>()?)
    }
}

impl fmt::Debug for CollapsingMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "phi[{}]", self.to_symbols())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    PsiN,
    PsiBin,
    PsiB,
    Custom,
}

/// A nonempty finite family of collapsing maps over one label set.
#[derive(Debug, Clone, PartialEq)]
pub struct MapFamily {
    maps: Vec<CollapsingMap>,
    kind: FamilyKind,
}

impl MapFamily {
    pub fn new(maps: Vec<CollapsingMap>, kind: FamilyKind) -> Result<Self> {
        let Some(first) = maps.first() else {
            return Err(Error::InvalidParameter("empty map family".into()));
        };
        if maps.iter().any(|m| m.k() != first.k()) {
            return Err(Error::InvalidParameter("maps in a family must share k".into()));
        }
        Ok(MapFamily { maps, kind })
    }

    pub fn maps(&self) -> &[CollapsingMap] {
        &self.maps
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn k(&self) -> Label {
        self.maps[0].k()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
}

/// Pair maps over unordered label pairs: `k (k + 1) / 2` maps.
///
/// `phi_{w,w'}` and `phi_{w',w}` give mirror-image trees, so only `w < w'` is kept.
pub fn family_psi_n(k: Label) -> Result<MapFamily> {
    if k == 0 {
        return Err(Error::InvalidParameter("pair family needs k >= 1".into()));
    }
    let maps = (0..=k)
        .flat_map(|w| (w + 1..=k).map(move |w2| CollapsingMap::pair(k, w, w2)))
        .collect();
    MapFamily::new(maps, FamilyKind::PsiN)
}

/// Bit maps, one per binary restriction.
pub fn family_psi_bin(k: Label) -> Result<MapFamily> {
    let maps = BitIndex::all(bits_for(k)).map(|i| CollapsingMap::bit(k, i)).collect();
    MapFamily::new(maps, FamilyKind::PsiBin)
}

/// All collapsing maps whose image contains both 0 and 1.
///
/// Maps missing 0 or 1 never split a class, so dropping them leaves every
/// dimension unchanged. Requires `3^(k+1) <= caps.max_family_size`.
pub fn family_psi_b(k: Label, caps: &Caps) -> Result<MapFamily> {
    let n = k as u32 + 1;
    let total = 3u128.checked_pow(n).unwrap_or(u128::MAX);
    if total > caps.max_family_size as u128 {
        return Err(Error::cap("3^(k+1) collapsing maps", total, caps.max_family_size as u128));
    }
    let mut maps = Vec::new();
    for code in 0..total as u64 {
        let mut c = code;
        let image: Vec<Collapse> = (0..n)
            .map(|_| {
                let v = match c % 3 {
                    0 => Collapse::Zero,
                    1 => Collapse::One,
                    _ => Collapse::Star,
                };
                c /= 3;
                v
            })
            .collect();
        if image.contains(&Collapse::Zero) && image.contains(&Collapse::One) {
            maps.push(CollapsingMap { image });
        }
    }
    MapFamily::new(maps, FamilyKind::PsiB)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_sizes() {
        let n1 = family_psi_n(1).unwrap();
        assert_eq!(n1.len(), 1);
        assert_eq!(n1.maps()[0].to_symbols(), "01");
        assert_eq!(family_psi_n(4).unwrap().len(), 10);
        assert_eq!(family_psi_bin(3).unwrap().len(), 2);
        assert_eq!(family_psi_bin(4).unwrap().len(), 3);
        let caps = Caps::default();
        // 27 - 8 - 8 + 1 by inclusion-exclusion
        assert_eq!(family_psi_b(2, &caps).unwrap().len(), 12);
        let small = Caps { max_family_size: 20, ..Caps::default() };
        assert!(family_psi_b(2, &small).unwrap_err().is_cap());
    }

    #[test]
    fn psi_b_matches_brute_enumeration() {
        for k in 1..=4u16 {
            let fam = family_psi_b(k, &Caps::default()).unwrap();
            let n = k as u32 + 1;
            let expected = 3u64.pow(n) - 2 * 2u64.pow(n) + 1;
            assert_eq!(fam.len() as u64, expected);
        }
    }

    #[test]
    fn bit_maps() {
        let phi = CollapsingMap::bit(5, BitIndex::new(1, 3).unwrap());
        assert_eq!(phi.to_symbols(), "000011");
        let phi3 = CollapsingMap::bit(5, BitIndex::new(3, 3).unwrap());
        assert_eq!(phi3.to_symbols(), "010101");
        assert_eq!(CollapsingMap::from_symbols("01*").unwrap().masks(), (1, 2));
        assert!(CollapsingMap::from_symbols("0x").is_err());
    }
}
