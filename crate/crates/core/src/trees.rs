//! Complete binary trees used by the dimension and cover machinery.
//!
//! All trees are stored in heap order: node `i` has children `2i + 1` (left)
//! and `2i + 2` (right). Io- and Ψ-labeled trees put the root at depth 0 and
//! leave their `2^b` leaves unlabeled, so a depth-`b` tree stores `2^b - 1`
//! internal nodes. Input- and output-labeled trees put the root at depth 1 and
//! label every node, so a depth-`n` tree also stores `2^n - 1` nodes.

use crate::class::{HypothesisClass, Label};
use crate::dims::family::CollapsingMap;
use crate::error::{Error, Result};
use serde_json::{json, Value};

pub const CONVENTION_ROOT_0: &str = "root-depth-0";
pub const CONVENTION_ROOT_1: &str = "root-depth-1";

fn node_count(depth: usize) -> usize {
    (1usize << depth) - 1
}

/// Heap indices of the nodes on the path selected by `dirs`, reading bit
/// `len-1-j` of `dirs` as the direction taken after the `j`-th node (1 = right).
pub fn path_nodes(len: usize, dirs: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(len);
    let mut node = 0;
    for j in 0..len {
        out.push(node);
        let right = (dirs >> (len - 1 - j)) & 1;
        node = 2 * node + 1 + right;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IoNode {
    pub x: usize,
    pub left: Label,
    pub right: Label,
}

/// Io-labeled tree: internal nodes carry a point, sibling edges carry distinct labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IoLabeledTree {
    depth: usize,
    nodes: Vec<IoNode>,
}

impl IoLabeledTree {
    pub fn new(depth: usize, nodes: Vec<IoNode>) -> Result<Self> {
        if nodes.len() != node_count(depth) {
            return Err(Error::MalformedTree(format!(
                "depth {depth} io tree needs {} internal nodes, got {}",
                node_count(depth),
                nodes.len()
            )));
        }
        if let Some(n) = nodes.iter().find(|n| n.left == n.right) {
            return Err(Error::MalformedTree(format!("sibling edges share label {}", n.left)));
        }
        Ok(IoLabeledTree { depth, nodes })
    }

    pub fn leaf() -> Self {
        IoLabeledTree { depth: 0, nodes: vec![] }
    }

    /// Tree with `root` on top of two subtrees of equal depth.
    pub fn join(root: IoNode, left: &IoLabeledTree, right: &IoLabeledTree) -> Result<Self> {
        if left.depth != right.depth {
            return Err(Error::DepthMismatch { expected: left.depth, found: right.depth });
        }
        let nodes = join_levels(root, &left.nodes, &right.nodes, left.depth);
        IoLabeledTree::new(left.depth + 1, nodes)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn nodes(&self) -> &[IoNode] {
        &self.nodes
    }

    /// The `(x, y)` constraints along each of the `2^b` root-to-leaf paths.
    pub fn paths(&self) -> Vec<Vec<(usize, Label)>> {
        (0..1usize << self.depth)
            .map(|dirs| {
                path_nodes(self.depth, dirs)
                    .into_iter()
                    .enumerate()
                    .map(|(j, i)| {
                        let n = self.nodes[i];
                        let right = (dirs >> (self.depth - 1 - j)) & 1 == 1;
                        (n.x, if right { n.right } else { n.left })
                    })
                    .collect()
            })
            .collect()
    }

    /// Whether every root-to-leaf path is realized by some member of `h`.
    pub fn is_shattered_by(&self, h: &HypothesisClass) -> Result<bool> {
        for n in &self.nodes {
            h.check_point(n.x)?;
            h.check_label(n.left)?;
            h.check_label(n.right)?;
        }
        Ok(self
            .paths()
            .iter()
            .all(|p| h.rows().iter().any(|f| p.iter().all(|&(x, y)| f[x] == y))))
    }

    pub fn to_json(&self) -> Value {
        fn rec(t: &IoLabeledTree, i: usize) -> Value {
            if i >= t.nodes.len() {
                return Value::Null;
            }
            let n = t.nodes[i];
            json!({"x": n.x, "y_left": n.left, "y_right": n.right,
                   "left": rec(t, 2 * i + 1), "right": rec(t, 2 * i + 2)})
        }
        json!({"kind": "io", "convention": CONVENTION_ROOT_0, "depth": self.depth, "root": rec(self, 0)})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let depth = header(v, "io", CONVENTION_ROOT_0)?;
        let mut nodes = vec![None; node_count(depth)];
        fill(&v["root"], 0, depth, &mut nodes, &|n| {
            Ok(IoNode { x: get_usize(n, "x")?, left: get_label(n, "y_left")?, right: get_label(n, "y_right")? })
        })?;
        IoLabeledTree::new(depth, nodes.into_iter().map(|n| n.expect("filled")).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PsiNode {
    pub x: usize,
    pub map: CollapsingMap,
}

/// Ψ-labeled tree: internal nodes carry a point and a collapsing map; the
/// left edge is labeled 0 and the right edge 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PsiLabeledTree {
    depth: usize,
    nodes: Vec<PsiNode>,
}

impl PsiLabeledTree {
    pub fn new(depth: usize, nodes: Vec<PsiNode>) -> Result<Self> {
        if nodes.len() != node_count(depth) {
            return Err(Error::MalformedTree(format!(
                "depth {depth} Ψ tree needs {} internal nodes, got {}",
                node_count(depth),
                nodes.len()
            )));
        }
        Ok(PsiLabeledTree { depth, nodes })
    }

    pub fn leaf() -> Self {
        PsiLabeledTree { depth: 0, nodes: vec![] }
    }

    pub fn join(root: PsiNode, left: &PsiLabeledTree, right: &PsiLabeledTree) -> Result<Self> {
        if left.depth != right.depth {
            return Err(Error::DepthMismatch { expected: left.depth, found: right.depth });
        }
        let nodes = join_levels(root, &left.nodes, &right.nodes, left.depth);
        PsiLabeledTree::new(left.depth + 1, nodes)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn nodes(&self) -> &[PsiNode] {
        &self.nodes
    }

    /// Whether all nodes at each depth share one collapsing map.
    pub fn is_uniform(&self) -> bool {
        (0..self.depth).all(|level| {
            let start = (1 << level) - 1;
            let end = (1 << (level + 1)) - 1;
            self.nodes[start..end].iter().all(|n| n.map == self.nodes[start].map)
        })
    }

    /// Paths as `(x, map, edge bit)` triples.
    pub fn paths(&self) -> Vec<Vec<(usize, &CollapsingMap, u8)>> {
        (0..1usize << self.depth)
            .map(|dirs| {
                path_nodes(self.depth, dirs)
                    .into_iter()
                    .enumerate()
                    .map(|(j, i)| {
                        let bit = ((dirs >> (self.depth - 1 - j)) & 1) as u8;
                        (self.nodes[i].x, &self.nodes[i].map, bit)
                    })
                    .collect()
            })
            .collect()
    }

    /// Index of the first row realizing each path, or `None` for a path no row realizes.
    pub fn realizers(&self, h: &HypothesisClass) -> Result<Vec<Option<usize>>> {
        for n in &self.nodes {
            h.check_point(n.x)?;
            if n.map.k() != h.k() {
                return Err(Error::MalformedTree(format!(
                    "collapsing map over k = {} used with a class over k = {}",
                    n.map.k(),
                    h.k()
                )));
            }
        }
        Ok(self
            .paths()
            .iter()
            .map(|p| {
                h.rows().iter().position(|f| {
                    p.iter().all(|&(x, phi, bit)| {
                        use crate::dims::family::Collapse;
                        match phi.apply(f[x]) {
                            Collapse::Zero => bit == 0,
                            Collapse::One => bit == 1,
                            Collapse::Star => false,
                        }
                    })
                })
            })
            .collect())
    }

    pub fn is_shattered_by(&self, h: &HypothesisClass) -> Result<bool> {
        Ok(self.realizers(h)?.iter().all(Option::is_some))
    }

    /// Drops leaves, edge labels and maps, leaving an input-labeled tree of the
    /// same depth (now counted with the root at depth 1).
    pub fn strip(&self) -> Result<InputLabeledTree> {
        InputLabeledTree::new(self.depth, self.nodes.iter().map(|n| n.x).collect())
    }

    pub fn to_json(&self) -> Value {
        fn rec(t: &PsiLabeledTree, i: usize) -> Value {
            if i >= t.nodes.len() {
                return Value::Null;
            }
            let n = &t.nodes[i];
            let phi: Vec<String> = n.map.image().iter().map(|c| c.symbol().to_string()).collect();
            json!({"x": n.x, "phi": phi, "left": rec(t, 2 * i + 1), "right": rec(t, 2 * i + 2)})
        }
        json!({"kind": "psi", "convention": CONVENTION_ROOT_0, "depth": self.depth, "root": rec(self, 0)})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let depth = header(v, "psi", CONVENTION_ROOT_0)?;
        let mut nodes = vec![None; node_count(depth)];
        fill(&v["root"], 0, depth, &mut nodes, &|n| {
            let phi = n["phi"]
                .as_array()
                .ok_or_else(|| Error::Parse("missing phi".into()))?
                .iter()
                .map(|s| s.as_str().unwrap_or("?"))
                .collect::<String>();
            Ok(PsiNode { x: get_usize(n, "x")?, map: CollapsingMap::from_symbols(&phi)? })
        })?;
        PsiLabeledTree::new(depth, nodes.into_iter().map(|n| n.expect("filled")).collect())
    }
}

/// Input-labeled tree of depth `n >= 1`: every node carries a point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InputLabeledTree {
    depth: usize,
    labels: Vec<usize>,
}

impl InputLabeledTree {
    pub fn new(depth: usize, labels: Vec<usize>) -> Result<Self> {
        if depth == 0 {
            return Err(Error::MalformedTree("input-labeled trees have depth >= 1".into()));
        }
        if labels.len() != node_count(depth) {
            return Err(Error::MalformedTree(format!(
                "depth {depth} input tree needs {} nodes, got {}",
                node_count(depth),
                labels.len()
            )));
        }
        Ok(InputLabeledTree { depth, labels })
    }

    /// Every node labeled with the same point.
    pub fn constant(depth: usize, x: usize) -> Result<Self> {
        InputLabeledTree::new(depth, vec![x; node_count(depth.max(1))])
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn path_count(&self) -> usize {
        1 << (self.depth - 1)
    }

    /// Heap indices of root-to-leaf path `p`, `p < 2^(n-1)`.
    pub fn path(&self, p: usize) -> Vec<usize> {
        path_nodes(self.depth, p << 1)
    }

    /// `f(A)` for path `p`.
    pub fn apply(&self, f: &[Label], p: usize) -> Vec<Label> {
        self.path(p).into_iter().map(|i| f[self.labels[i]]).collect()
    }

    pub fn left(&self) -> Option<InputLabeledTree> {
        self.subtree(1)
    }

    pub fn right(&self) -> Option<InputLabeledTree> {
        self.subtree(2)
    }

    fn subtree(&self, start: usize) -> Option<InputLabeledTree> {
        if self.depth == 1 {
            return None;
        }
        let mut labels = Vec::with_capacity(node_count(self.depth - 1));
        let mut level_start = start;
        let mut width = 1;
        for _ in 0..self.depth - 1 {
            labels.extend_from_slice(&self.labels[level_start..level_start + width]);
            level_start = 2 * level_start + 1;
            width *= 2;
        }
        Some(InputLabeledTree { depth: self.depth - 1, labels })
    }

    pub fn check_domain(&self, h: &HypothesisClass) -> Result<()> {
        self.labels.iter().try_for_each(|&x| h.check_point(x))
    }

    pub fn to_json(&self) -> Value {
        fn rec(t: &InputLabeledTree, i: usize) -> Value {
            if i >= t.labels.len() {
                return Value::Null;
            }
            json!({"x": t.labels[i], "left": rec(t, 2 * i + 1), "right": rec(t, 2 * i + 2)})
        }
        json!({"kind": "input", "convention": CONVENTION_ROOT_1, "depth": self.depth, "root": rec(self, 0)})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let depth = header(v, "input", CONVENTION_ROOT_1)?;
        let mut labels = vec![None; node_count(depth)];
        fill(&v["root"], 0, depth, &mut labels, &|n| get_usize(n, "x"))?;
        InputLabeledTree::new(depth, labels.into_iter().map(|n| n.expect("filled")).collect())
    }
}

/// Output-labeled tree of depth `n >= 1`: every node carries a label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutputLabeledTree {
    depth: usize,
    labels: Vec<Label>,
}

impl OutputLabeledTree {
    pub fn new(depth: usize, labels: Vec<Label>) -> Result<Self> {
        if depth == 0 || labels.len() != node_count(depth) {
            return Err(Error::MalformedTree(format!(
                "depth {depth} output tree with {} nodes",
                labels.len()
            )));
        }
        Ok(OutputLabeledTree { depth, labels })
    }

    /// `f` evaluated at every node of `z`.
    pub fn image_of(f: &[Label], z: &InputLabeledTree) -> Self {
        OutputLabeledTree { depth: z.depth, labels: z.labels.iter().map(|&x| f[x]).collect() }
    }

    /// Single-node tree.
    pub fn single(y: Label) -> Self {
        OutputLabeledTree { depth: 1, labels: vec![y] }
    }

    pub fn join(root: Label, left: &OutputLabeledTree, right: &OutputLabeledTree) -> Result<Self> {
        if left.depth != right.depth {
            return Err(Error::DepthMismatch { expected: left.depth, found: right.depth });
        }
        let labels = join_levels(root, &left.labels, &right.labels, left.depth);
        OutputLabeledTree::new(left.depth + 1, labels)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Label sequence along the path with heap indices `nodes`.
    pub fn along(&self, nodes: &[usize]) -> Vec<Label> {
        nodes.iter().map(|&i| self.labels[i]).collect()
    }

    pub fn to_json(&self) -> Value {
        fn rec(t: &OutputLabeledTree, i: usize) -> Value {
            if i >= t.labels.len() {
                return Value::Null;
            }
            json!({"y": t.labels[i], "left": rec(t, 2 * i + 1), "right": rec(t, 2 * i + 2)})
        }
        json!({"kind": "output", "convention": CONVENTION_ROOT_1, "depth": self.depth, "root": rec(self, 0)})
    }
}

/// Heap-order node list of a tree with `root` above `left` and `right`
/// (each with `depth` levels).
fn join_levels<T: Clone>(root: T, left: &[T], right: &[T], depth: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(1 + left.len() + right.len());
    out.push(root);
    let mut start = 0;
    for level in 0..depth {
        let width = 1 << level;
        out.extend_from_slice(&left[start..start + width]);
        out.extend_from_slice(&right[start..start + width]);
        start += width;
    }
    out
}

fn header(v: &Value, kind: &str, convention: &str) -> Result<usize> {
    if v["kind"] != kind {
        return Err(Error::Parse(format!("expected tree kind {kind:?}, found {}", v["kind"])));
    }
    if v["convention"] != convention {
        return Err(Error::Parse(format!(
            "expected depth convention {convention:?}, found {}",
            v["convention"]
        )));
    }
    get_usize(v, "depth")
}

fn get_usize(v: &Value, key: &str) -> Result<usize> {
    v[key]
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| Error::Parse(format!("missing or invalid {key:?}")))
}

fn get_label(v: &Value, key: &str) -> Result<Label> {
    let n = get_usize(v, key)?;
    Label::try_from(n).map_err(|_| Error::Parse(format!("label {n} too large")))
}

fn fill<T>(
    v: &Value,
    i: usize,
    depth: usize,
    out: &mut [Option<T>],
    node: &dyn Fn(&Value) -> Result<T>,
) -> Result<()> {
    if i >= out.len() {
        return if v.is_null() {
            Ok(())
        } else {
            Err(Error::MalformedTree(format!("node below depth {depth}")))
        };
    }
    if v.is_null() {
        return Err(Error::MalformedTree("missing internal node".into()));
    }
    out[i] = Some(node(v)?);
    fill(&v["left"], 2 * i + 1, depth, out, node)?;
    fill(&v["right"], 2 * i + 2, depth, out, node)
}
