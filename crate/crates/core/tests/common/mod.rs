//! Brute-force oracles shared by the integration suites.
//!
//! Nothing here calls into the recursions under test: classes are read as
//! raw tables and every answer comes from explicit enumeration.

#![allow(dead_code)]

use mcld::{HypothesisClass, Label};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rows = Vec<Vec<Label>>;

/// `{0, 1, *}` image of a collapsing map; `2` stands for `*`.
pub type Map = Vec<u8>;

pub const STAR: u8 = 2;

type Requirement = Vec<(usize, Label)>;

pub fn rows(h: &HypothesisClass) -> Rows {
    h.rows().to_vec()
}

/// An explicit io-tree node: point and the two edge labels.
#[derive(Clone, Debug)]
pub struct IoNode {
    pub x: usize,
    pub left: Label,
    pub right: Label,
}

/// Some explicit io-tree of `depth` whose root splits `rows`, grown
/// top-down with realizability pruning, in heap order.
fn find_io_tree(rows: &Rows, m: usize, k: Label, depth: usize) -> Option<Vec<Option<IoNode>>> {
    if depth == 0 {
        return (!rows.is_empty()).then(Vec::new);
    }
    for x in 0..m {
        for a in 0..=k {
            for b in a + 1..=k {
                let left: Rows = rows.iter().filter(|f| f[x] == a).cloned().collect();
                let right: Rows = rows.iter().filter(|f| f[x] == b).cloned().collect();
                let (Some(l), Some(r)) = (find_io_tree(&left, m, k, depth - 1), find_io_tree(&right, m, k, depth - 1))
                else {
                    continue;
                };
                let mut tree = vec![None; (1 << depth) - 1];
                tree[0] = Some(IoNode { x, left: a, right: b });
                graft(&mut tree, &l, 1);
                graft(&mut tree, &r, 2);
                return Some(tree);
            }
        }
    }
    None
}

/// Copies a heap-ordered subtree under node `at`.
fn graft(tree: &mut [Option<IoNode>], sub: &[Option<IoNode>], at: usize) {
    let mut width = 1;
    let mut start = 0;
    let mut target = at;
    while start < sub.len() {
        tree[target..target + width].clone_from_slice(&sub[start..start + width]);
        start += width;
        width *= 2;
        target = 2 * target + 1;
    }
}

/// Every root-to-leaf path of a complete io-tree is realized by a row.
pub fn io_tree_shattered(rows: &Rows, tree: &[Option<IoNode>], depth: usize) -> bool {
    (0..1usize << depth).all(|dirs| {
        rows.iter().any(|f| {
            let mut node = 0;
            for level in 0..depth {
                let n = tree[node].as_ref().expect("complete tree");
                let go_right = dirs >> (depth - 1 - level) & 1 == 1;
                let want = if go_right { n.right } else { n.left };
                if f[n.x] != want {
                    return false;
                }
                node = 2 * node + 1 + usize::from(go_right);
            }
            true
        })
    })
}

/// MLD by searching for explicit shattered io-trees of increasing depth;
/// each tree found is checked path by path against the raw rows.
pub fn oracle_mld(h: &HypothesisClass) -> u32 {
    let rows = rows(h);
    let mut d = 0;
    while let Some(t) = find_io_tree(&rows, h.domain_size(), h.k(), d + 1) {
        assert!(io_tree_shattered(&rows, &t, d + 1), "oracle produced an unshattered tree");
        d += 1;
    }
    d as u32
}

/// Depth-`d` Ψ-tree existence over explicit `(x, map)` nodes, optionally
/// forcing one map per level.
fn psi_exists(rows: &Rows, m: usize, family: &[Map], depth: usize, level_maps: Option<&[usize]>) -> bool {
    if depth == 0 {
        return !rows.is_empty();
    }
    let level = level_maps.map(|s| s.len() - depth);
    for (fi, phi) in family.iter().enumerate() {
        if let (Some(l), Some(seq)) = (level, level_maps) {
            if seq[l] != fi {
                continue;
            }
        }
        for x in 0..m {
            let zero: Rows = rows.iter().filter(|f| phi[f[x] as usize] == 0).cloned().collect();
            let one: Rows = rows.iter().filter(|f| phi[f[x] as usize] == 1).cloned().collect();
            if !zero.is_empty()
                && !one.is_empty()
                && psi_exists(&zero, m, family, depth - 1, level_maps)
                && psi_exists(&one, m, family, depth - 1, level_maps)
            {
                return true;
            }
        }
    }
    false
}

pub fn oracle_psi_ld(h: &HypothesisClass, family: &[Map]) -> u32 {
    let rows = rows(h);
    let mut d = 0;
    while psi_exists(&rows, h.domain_size(), family, d + 1, None) {
        d += 1;
    }
    d as u32
}

/// Uniform variant: some map sequence shatters at every level.
pub fn oracle_psi_ld_uniform(h: &HypothesisClass, family: &[Map]) -> u32 {
    let rows = rows(h);
    let mut d = 0usize;
    loop {
        let depth = d + 1;
        let total = family.len().pow(depth as u32);
        let found = (0..total).any(|code| {
            let mut c = code;
            let seq: Vec<usize> = (0..depth)
                .map(|_| {
                    let v = c % family.len();
                    c /= family.len();
                    v
                })
                .collect();
            psi_exists(&rows, h.domain_size(), family, depth, Some(&seq))
        });
        if !found {
            return d as u32;
        }
        d += 1;
    }
}

pub fn bits(k: Label) -> usize {
    let mut b = 1;
    while (1u32 << b) <= k as u32 {
        b += 1;
    }
    b
}

pub fn family_pairs(k: Label) -> Vec<Map> {
    let mut out = Vec::new();
    for a in 0..=k as usize {
        for b in a + 1..=k as usize {
            let mut m = vec![STAR; k as usize + 1];
            m[a] = 0;
            m[b] = 1;
            out.push(m);
        }
    }
    out
}

/// Bit maps with bit 1 the most significant of a `B`-bit expansion.
pub fn family_bits(k: Label) -> Vec<Map> {
    let b = bits(k);
    (1..=b).map(|i| (0..=k as u32).map(|y| ((y >> (b - i)) & 1) as u8).collect()).collect()
}

pub fn family_all(k: Label) -> Vec<Map> {
    let n = k as u32 + 1;
    (0..3u32.pow(n))
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let v = (c % 3) as u8;
                    c /= 3;
                    v
                })
                .collect()
        })
        .collect()
}

/// Binary restriction by bit `i` (1 = most significant), deduplicated.
pub fn bit_restriction(h: &HypothesisClass, i: usize) -> HypothesisClass {
    let b = bits(h.k());
    let rows = h.rows().iter().map(|f| f.iter().map(|&y| ((y as u32 >> (b - i)) & 1) as Label).collect()).collect();
    HypothesisClass::new(1, h.domain_size(), rows).unwrap()
}

/// Label sequence of `f` along path `p` of a heap-ordered input tree.
pub fn path_labels(labels: &[usize], depth: usize, f: &[Label], p: usize) -> Vec<(usize, Label)> {
    let mut node = 0;
    let mut out = Vec::with_capacity(depth);
    for level in 0..depth {
        out.push((node, f[labels[node]]));
        let right = level + 1 < depth && (p >> (depth - 2 - level)) & 1 == 1;
        node = 2 * node + 1 + usize::from(right);
    }
    out
}

/// Smallest number of output trees covering every (function, path)
/// requirement of the input tree, by exhaustive grouping.
pub fn oracle_min_cover(h: &HypothesisClass, labels: &[usize], depth: usize) -> usize {
    let mut reqs: Vec<Requirement> = Vec::new();
    for f in h.rows() {
        for p in 0..1usize << (depth - 1) {
            let r = path_labels(labels, depth, f, p);
            if !reqs.contains(&r) {
                reqs.push(r);
            }
        }
    }
    let compatible = |a: &Requirement, b: &Requirement| {
        a.iter().all(|&(n, y)| b.iter().all(|&(n2, y2)| n != n2 || y == y2))
    };
    fn place(
        i: usize,
        reqs: &[Requirement],
        groups: &mut Vec<Vec<usize>>,
        limit: usize,
        compatible: &dyn Fn(&Requirement, &Requirement) -> bool,
    ) -> bool {
        if i == reqs.len() {
            return true;
        }
        for g in 0..groups.len() {
            if groups[g].iter().all(|&j| compatible(&reqs[i], &reqs[j])) {
                groups[g].push(i);
                if place(i + 1, reqs, groups, limit, compatible) {
                    return true;
                }
                groups[g].pop();
            }
        }
        if groups.len() < limit {
            groups.push(vec![i]);
            if place(i + 1, reqs, groups, limit, compatible) {
                return true;
            }
            groups.pop();
        }
        false
    }
    (1..=reqs.len())
        .find(|&c| place(0, &reqs, &mut Vec::new(), c, &compatible))
        .unwrap_or(0)
}

/// Every requirement appears along its path in some cover tree.
pub fn oracle_is_cover(h: &HypothesisClass, labels: &[usize], depth: usize, cover: &[Vec<Label>]) -> bool {
    h.rows().iter().all(|f| {
        (0..1usize << (depth - 1)).all(|p| {
            let r = path_labels(labels, depth, f, p);
            cover.iter().any(|t| r.iter().all(|&(n, y)| t[n] == y))
        })
    })
}

/// `sum_{i <= d} C(n, i) k^i`.
pub fn oracle_sauer(d: u64, k: u64, n: u64) -> BigInt {
    let mut total = BigInt::zero();
    let mut binom = BigInt::one();
    for i in 0..=d {
        if i > 0 {
            binom = binom * BigInt::from(n - i + 1) / BigInt::from(i);
        }
        total += &binom * BigInt::from(k).pow(i as u32);
    }
    total
}

fn solve(mut a: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v = &*v / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let row = a[col].clone();
                for (v, w) in a[r].iter_mut().zip(row) {
                    *v -= &f * w;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n].clone()).collect())
}

/// `max_D min_j (D^T M)_j` by vertex enumeration: the optimum sits where
/// `rows - 1` of the constraints `D_i = 0` and `(D^T M)_j = (D^T M)_j'`
/// are tight together with `sum D = 1`.
pub fn oracle_game_value(m: &[Vec<BigRational>]) -> BigRational {
    let r = m.len();
    let c = m[0].len();
    let mut eqs: Vec<Vec<BigRational>> = Vec::new();
    for i in 0..r {
        let mut e = vec![BigRational::zero(); r];
        e[i] = BigRational::one();
        eqs.push(e);
    }
    for j in 0..c {
        for j2 in j + 1..c {
            eqs.push((0..r).map(|i| &m[i][j] - &m[i][j2]).collect());
        }
    }
    let value = |d: &[BigRational]| {
        (0..c)
            .map(|j| (0..r).fold(BigRational::zero(), |acc, i| acc + &d[i] * &m[i][j]))
            .min()
            .expect("columns")
    };
    let mut best: Option<BigRational> = None;
    let mut choose = vec![0usize; r.saturating_sub(1)];
    fn combos(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            combos(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    choose.clear();
    let mut all = Vec::new();
    combos(eqs.len(), r - 1, 0, &mut choose, &mut all);
    for pick in all {
        let mut a: Vec<Vec<BigRational>> = pick
            .iter()
            .map(|&e| {
                let mut row = eqs[e].clone();
                row.push(BigRational::zero());
                row
            })
            .collect();
        let mut sum = vec![BigRational::one(); r];
        sum.push(BigRational::one());
        a.push(sum);
        if let Some(d) = solve(a) {
            if d.iter().all(|v| !v.is_negative()) {
                let v = value(&d);
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
        }
    }
    best.expect("the simplex has vertices")
}

/// Worst regret of randomized weighted majority over every sequence of
/// expert error patterns, by explicit enumeration of the sequences.
pub fn oracle_wm_regret(n: usize, horizon: usize, eta: f64) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    let total = (1usize << n).pow(horizon as u32);
    for code in 0..total {
        let mut c = code;
        let mut mistakes = vec![0u32; n];
        let mut expected = 0.0;
        for _ in 0..horizon {
            let pattern = c % (1 << n);
            c >>= n;
            let w: Vec<f64> = mistakes.iter().map(|&m| (-eta * m as f64).exp()).collect();
            let tot: f64 = w.iter().sum();
            for i in 0..n {
                if pattern >> i & 1 == 1 {
                    expected += w[i] / tot;
                    mistakes[i] += 1;
                }
            }
        }
        worst = worst.max(expected - *mistakes.iter().min().unwrap() as f64);
    }
    worst
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
