//! Explicit class constructions: threshold pairs, gap amplification,
//! bit-wise products and point functions.

use crate::class::{bin2dec, bits_for, BitIndex, HypothesisClass, Label};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Every function `{0..m} -> {0..=k}`.
pub fn all_functions(k: Label, domain_size: usize, cap: usize) -> Result<HypothesisClass> {
    let count = (k as u128 + 1).checked_pow(domain_size as u32).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(Error::cap("class size", count, cap as u128));
    }
    let mut rows: Vec<Vec<Label>> = vec![Vec::with_capacity(domain_size)];
    for _ in 0..domain_size {
        rows = rows
            .into_iter()
            .flat_map(|r| {
                (0..=k).map(move |y| {
                    let mut r = r.clone();
                    r.push(y);
                    r
                })
            })
            .collect();
    }
    HypothesisClass::new(k, domain_size, rows)
}

/// Thresholds `g_t(x) = 1[t >= x]` on the ordered domain `1..=m`, one per `t in 1..=m`.
pub fn thresholds(m: usize) -> Result<HypothesisClass> {
    let rows = (1..=m)
        .map(|t| (1..=m).map(|x| (t >= x) as Label).collect())
        .collect();
    HypothesisClass::new(1, m, rows)
}

/// Domain size `k'/2 - 1` of the threshold-pair class, where `k'` is `k`
/// rounded up to the next even number.
pub fn threshold_pair_domain(k: Label) -> usize {
    let k_even = if k.is_multiple_of(2) { k } else { k + 1 } as usize;
    k_even / 2 - 1
}

/// The bit of the label encoding that carries the threshold output.
pub fn threshold_pair_bit(k: Label) -> BitIndex {
    let b = bits_for(k);
    BitIndex::new(b, b).expect("least significant bit")
}

/// Threshold-pair class: `f_t(x) = encode(1[t >= x], t)` on the domain `1..=m`
/// with `m = k'/2 - 1`.
///
/// The label is `2 (t - 1) + g`, so the least significant bit carries the
/// threshold output and the remaining bits name `t`. Each label therefore
/// determines its function. Labels above `2m - 1` are never used.
pub fn threshold_pair(k: Label) -> Result<HypothesisClass> {
    if k < 5 {
        return Err(Error::InvalidParameter(format!("threshold-pair class needs k >= 5, got {k}")));
    }
    let m = threshold_pair_domain(k);
    let rows = (1..=m)
        .map(|t| {
            (1..=m)
                .map(|x| (2 * (t - 1) + (t >= x) as usize) as Label)
                .collect()
        })
        .collect();
    Ok(HypothesisClass::new(k, m, rows)?.with_name(format!("threshold-pair(k={k})")))
}

/// Gap amplification: the class on `{1..l} x X` whose members agree with an
/// independent member of `H` on each block. Point `(j, x)` has index `j * |X| + x`.
pub fn amplify(h: &HypothesisClass, copies: usize, cap: usize) -> Result<HypothesisClass> {
    if copies == 0 {
        return Err(Error::InvalidParameter("amplification factor must be >= 1".into()));
    }
    let count = (h.len() as u128).checked_pow(copies as u32).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(Error::cap("amplified class size", count, cap as u128));
    }
    let mut rows: Vec<Vec<Label>> = vec![Vec::with_capacity(copies * h.domain_size())];
    for _ in 0..copies {
        rows = rows
            .into_iter()
            .flat_map(|prefix| {
                h.rows().iter().map(move |f| {
                    let mut r = prefix.clone();
                    r.extend_from_slice(f);
                    r
                })
            })
            .collect();
    }
    let class = HypothesisClass::new(h.k(), copies * h.domain_size(), rows)?;
    Ok(match h.name() {
        Some(n) => class.with_name(format!("amplify({n}, {copies})")),
        None => class,
    })
}

/// The class whose binary restrictions are `parts`: every combination
/// `(f_1, ..., f_B)` with label `bin2dec(f_1(x), ..., f_B(x))`.
pub fn product_class(parts: &[HypothesisClass], k: Label, cap: usize) -> Result<HypothesisClass> {
    let b = bits_for(k);
    if parts.len() != b {
        return Err(Error::InvalidParameter(format!(
            "k = {k} needs {b} binary parts, got {}",
            parts.len()
        )));
    }
    let m = parts[0].domain_size();
    for p in parts {
        if !p.is_binary() {
            return Err(Error::NotBinary(p.k()));
        }
        if p.domain_size() != m {
            return Err(Error::DomainMismatch(format!(
                "parts over domains of size {m} and {}",
                p.domain_size()
            )));
        }
    }
    let count = parts
        .iter()
        .try_fold(1u128, |acc, p| acc.checked_mul(p.len() as u128))
        .unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(Error::cap("product class size", count, cap as u128));
    }
    let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
    for p in parts {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                (0..p.len()).map(move |i| {
                    let mut c = c.clone();
                    c.push(i);
                    c
                })
            })
            .collect();
    }
    let mut bits = vec![0u8; b];
    let rows = combos
        .iter()
        .map(|c| {
            (0..m)
                .map(|x| {
                    for (j, (p, &i)) in parts.iter().zip(c).enumerate() {
                        bits[j] = p.row(i)[x] as u8;
                    }
                    bin2dec(&bits, k)
                })
                .collect()
        })
        .collect();
    HypothesisClass::new(k, m, rows)
}

/// All indicator functions of `d`-element subsets of `{0..m}`.
pub fn point_functions(d: usize, m: usize) -> Result<HypothesisClass> {
    if d == 0 || m < d {
        return Err(Error::InvalidParameter(format!("point functions need m >= d >= 1, got d = {d}, m = {m}")));
    }
    let mut rows = Vec::new();
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        let mut row = vec![0; m];
        for &i in &subset {
            row[i] = 1;
        }
        rows.push(row);
        // next combination in lexicographic order
        let mut i = d;
        while i > 0 && subset[i - 1] == m - d + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        subset[i - 1] += 1;
        for j in i..d {
            subset[j] = subset[j - 1] + 1;
        }
    }
    Ok(HypothesisClass::new(1, m, rows)?.with_name(format!("point-functions(d={d}, m={m})")))
}

/// Product of `B = bits_for(k)` copies of the `d`-point-function class over
/// `m` points.
pub fn point_function_product(d: usize, k: Label, m: usize, cap: usize) -> Result<HypothesisClass> {
    let part = point_functions(d, m)?;
    let parts = vec![part; bits_for(k)];
    Ok(product_class(&parts, k, cap)?.with_name(format!("point-product(d={d}, k={k}, m={m})")))
}

/// Shape limits for [`random_class`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomShape {
    pub max_domain: usize,
    pub max_k: Label,
    pub max_size: usize,
}

/// A seeded random class: domain size in `1..=max_domain`, `k` in
/// `1..=max_k`, then up to `max_size` uniformly drawn functions (duplicates
/// collapse, so the class may be smaller).
pub fn random_class(rng: &mut SeededRng, shape: RandomShape) -> Result<HypothesisClass> {
    if shape.max_domain == 0 || shape.max_k == 0 || shape.max_size == 0 {
        return Err(Error::InvalidParameter("random class shape must be positive".into()));
    }
    let m = 1 + rng.below(shape.max_domain);
    let k = 1 + rng.below(shape.max_k as usize) as Label;
    let n = 1 + rng.below(shape.max_size);
    let rows = (0..n)
        .map(|_| (0..m).map(|_| rng.below(k as usize + 1) as Label).collect())
        .collect();
    HypothesisClass::new(k, m, rows)
}
