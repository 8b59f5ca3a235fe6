use std::fmt;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{LabError, Result};
use crate::hypothesis::{bit_char, Bit, Point, Sample};

/// A complete binary tree of internal-node labels.
///
/// Labels are stored breadth-first: node `i` has its 0-child at `2i + 1` and
/// its 1-child at `2i + 2`. A tree of depth `d` has `2^d - 1` labels and
/// `2^d` leaves. Labels may repeat anywhere, including along one path.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LittlestoneTree {
    depth: usize,
    labels: Vec<Point>,
}

/// Maximal depth we are willing to materialize.
pub const MAX_TREE_DEPTH: usize = 30;

impl LittlestoneTree {
    pub fn new(depth: usize, labels: Vec<Point>) -> Result<Self> {
        if depth == 0 || depth > MAX_TREE_DEPTH {
            return Err(LabError::Structural(format!(
                "tree depth must be in 1..={MAX_TREE_DEPTH}, got {depth}"
            )));
        }
        let expected = (1usize << depth) - 1;
        if labels.len() != expected {
            return Err(LabError::Structural(format!(
                "a depth-{depth} tree has {expected} labels, got {}",
                labels.len()
            )));
        }
        Ok(LittlestoneTree { depth, labels })
    }

    /// The tree with root `root`, 0-subtree `zero` and 1-subtree `one`.
    pub fn compose(root: Point, zero: &LittlestoneTree, one: &LittlestoneTree) -> Result<Self> {
        if zero.depth != one.depth {
            return Err(LabError::Structural(format!(
                "subtrees of depth {} and {} cannot share a root",
                zero.depth, one.depth
            )));
        }
        let mut labels = Vec::with_capacity(2 * zero.labels.len() + 1);
        labels.push(root);
        for level in 0..zero.depth {
            let range = (1usize << level) - 1..(1usize << (level + 1)) - 1;
            labels.extend_from_slice(&zero.labels[range.clone()]);
            labels.extend_from_slice(&one.labels[range]);
        }
        Ok(LittlestoneTree {
            depth: zero.depth + 1,
            labels,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn labels(&self) -> &[Point] {
        &self.labels
    }

    pub fn root(&self) -> Point {
        self.labels[0]
    }

    pub fn leaf_count(&self) -> usize {
        1 << self.depth
    }

    /// Distinct labels, ascending.
    pub fn label_set(&self) -> Vec<Point> {
        let mut v = self.labels.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn max_label(&self) -> Point {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    /// The subtree hanging off the root's `b`-edge, or `None` for depth 1.
    pub fn subtree(&self, b: Bit) -> Option<LittlestoneTree> {
        if self.depth == 1 {
            return None;
        }
        let mut labels = Vec::with_capacity((self.labels.len() - 1) / 2);
        for level in 1..self.depth {
            let width = 1usize << level;
            let start = width - 1;
            let half = width / 2;
            let off = if b { half } else { 0 };
            labels.extend_from_slice(&self.labels[start + off..start + off + half]);
        }
        Some(LittlestoneTree {
            depth: self.depth - 1,
            labels,
        })
    }

    /// The (label, edge) pairs along the root-to-leaf path, root first.
    pub fn leaf_sample(&self, leaf: &LeafAddress) -> Result<Sample> {
        if leaf.len() != self.depth {
            return Err(LabError::Structural(format!(
                "leaf address {leaf} has length {}, tree depth is {}",
                leaf.len(),
                self.depth
            )));
        }
        Ok(self.path_sample(leaf.bits()))
    }

    pub(crate) fn path_sample(&self, bits: &[Bit]) -> Sample {
        let mut node = 0usize;
        let mut s = Sample::new();
        for &b in bits {
            s.push(self.labels[node], b);
            node = 2 * node + 1 + usize::from(b);
        }
        s
    }

    /// Every leaf, lexicographically ("00..0" first).
    pub fn leaves(&self) -> impl Iterator<Item = LeafAddress> + '_ {
        (0..self.leaf_count()).map(move |i| LeafAddress::from_index(self.depth, i))
    }
}

/// Edge labels from the root to a leaf.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeafAddress(Vec<Bit>);

impl LeafAddress {
    pub fn new(bits: Vec<Bit>) -> Self {
        LeafAddress(bits)
    }

    /// The `index`-th leaf in lexicographic order; the root edge is the high bit.
    pub fn from_index(depth: usize, index: usize) -> Self {
        LeafAddress(
            (0..depth)
                .map(|level| index >> (depth - 1 - level) & 1 == 1)
                .collect(),
        )
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(LabError::Parse(format!("leaf address contains {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(LeafAddress)
    }

    pub fn bits(&self) -> &[Bit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Address with `b` prepended, i.e. the same leaf seen from a parent root.
    pub fn under(&self, b: Bit) -> LeafAddress {
        let mut bits = Vec::with_capacity(self.0.len() + 1);
        bits.push(b);
        bits.extend_from_slice(&self.0);
        LeafAddress(bits)
    }

    /// First edge and the remaining address below it.
    pub fn split_first(&self) -> Option<(Bit, LeafAddress)> {
        self.0
            .split_first()
            .map(|(&b, rest)| (b, LeafAddress(rest.to_vec())))
    }
}

impl fmt::Display for LeafAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", bit_char(b))?;
        }
        Ok(())
    }
}

impl Serialize for LeafAddress {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LeafAddress {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        LeafAddress::parse(&s).map_err(de::Error::custom)
    }
}

/// Recursive file form: `{"label": x, "zero": <node|"leaf">, "one": <node|"leaf">}`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TreeNode {
    Leaf(LeafMarker),
    Node {
        label: Point,
        zero: Box<TreeNode>,
        one: Box<TreeNode>,
    },
}

#[derive(Serialize, Deserialize)]
enum LeafMarker {
    #[serde(rename = "leaf")]
    Leaf,
}

impl TreeNode {
    fn build(tree: &LittlestoneTree, node: usize) -> TreeNode {
        if node >= tree.labels.len() {
            return TreeNode::Leaf(LeafMarker::Leaf);
        }
        TreeNode::Node {
            label: tree.labels[node],
            zero: Box::new(Self::build(tree, 2 * node + 1)),
            one: Box::new(Self::build(tree, 2 * node + 2)),
        }
    }

    fn depth(&self) -> std::result::Result<usize, String> {
        match self {
            TreeNode::Leaf(_) => Ok(0),
            TreeNode::Node { zero, one, .. } => {
                let (a, b) = (zero.depth()?, one.depth()?);
                if a != b {
                    return Err(format!("incomplete tree: subtrees of depth {a} and {b}"));
                }
                Ok(a + 1)
            }
        }
    }

    fn fill(&self, node: usize, labels: &mut [Point]) {
        if let TreeNode::Node { label, zero, one } = self {
            labels[node] = *label;
            zero.fill(2 * node + 1, labels);
            one.fill(2 * node + 2, labels);
        }
    }
}

impl Serialize for LittlestoneTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TreeNode::build(self, 0).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LittlestoneTree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let node = TreeNode::deserialize(deserializer)?;
        let depth = node.depth().map_err(de::Error::custom)?;
        if depth == 0 || depth > MAX_TREE_DEPTH {
            return Err(de::Error::custom(format!(
                "tree depth must be in 1..={MAX_TREE_DEPTH}, got {depth}"
            )));
        }
        let mut labels = vec![0; (1 << depth) - 1];
        node.fill(0, &mut labels);
        Ok(LittlestoneTree { depth, labels })
    }
}

/// Number of depth-`depth` trees over `n_labels` labels, if it fits in u128.
pub fn tree_count(depth: usize, n_labels: usize) -> Option<u128> {
    let nodes = u32::try_from((1u128 << depth.min(127)) - 1).ok()?;
    (n_labels as u128).checked_pow(nodes)
}

/// Streams every tree of the given depth with labels from `labels`, exactly
/// once. Order is lexicographic over the breadth-first label tuple, with
/// labels ranked ascending.
pub fn enumerate_trees(depth: usize, labels: &[Point]) -> Result<TreeEnumerator> {
    TreeEnumerator::new(depth, labels)
}

pub struct TreeEnumerator {
    depth: usize,
    alphabet: Vec<Point>,
    digits: Vec<usize>,
    done: bool,
}

impl TreeEnumerator {
    fn new(depth: usize, labels: &[Point]) -> Result<Self> {
        let mut alphabet = labels.to_vec();
        alphabet.sort_unstable();
        alphabet.dedup();
        if alphabet.is_empty() {
            return Err(LabError::Structural("tree enumeration needs at least one label".into()));
        }
        LittlestoneTree::new(depth, vec![0; (1usize << depth.min(MAX_TREE_DEPTH)) - 1])?;
        Ok(TreeEnumerator {
            depth,
            alphabet,
            digits: vec![0; (1 << depth) - 1],
            done: false,
        })
    }

    /// The `index`-th tree of the stream, for index-parallel consumers.
    pub fn nth_tree(depth: usize, alphabet: &[Point], mut index: u128) -> LittlestoneTree {
        let nodes = (1usize << depth) - 1;
        let base = alphabet.len() as u128;
        let mut labels = vec![alphabet[0]; nodes];
        for slot in labels.iter_mut().rev() {
            *slot = alphabet[(index % base) as usize];
            index /= base;
        }
        LittlestoneTree { depth, labels }
    }
}

impl Iterator for TreeEnumerator {
    type Item = LittlestoneTree;

    fn next(&mut self) -> Option<LittlestoneTree> {
        if self.done {
            return None;
        }
        let tree = LittlestoneTree {
            depth: self.depth,
            labels: self.digits.iter().map(|&d| self.alphabet[d]).collect(),
        };
        let base = self.alphabet.len();
        let mut pos = self.digits.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.digits[pos] += 1;
            if self.digits[pos] < base {
                break;
            }
            self.digits[pos] = 0;
        }
        Some(tree)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    fn tree(depth: usize, labels: &[Point]) -> LittlestoneTree {
        LittlestoneTree::new(depth, labels.to_vec()).unwrap()
    }

    fn smp(pairs: &[(Point, u8)]) -> Sample {
        Sample::from_pairs(pairs.iter().map(|&(x, y)| (x, y == 1)))
    }

    #[test]
    fn leaf_sample_examples() {
        let t = tree(1, &[5]);
        assert_eq!(t.leaf_sample(&LeafAddress::parse("0").unwrap()).unwrap(), smp(&[(5, 0)]));
        let t = tree(2, &[3, 4, 7]);
        assert_eq!(
            t.leaf_sample(&LeafAddress::parse("10").unwrap()).unwrap(),
            smp(&[(3, 1), (7, 0)])
        );
        let t = tree(2, &[3, 3, 3]);
        let s = t.leaf_sample(&LeafAddress::parse("01").unwrap()).unwrap();
        assert_eq!(s, smp(&[(3, 0), (3, 1)]));
        assert!(!s.is_self_consistent());
        assert!(t.leaf_sample(&LeafAddress::parse("0").unwrap()).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_trees(1, &[4]).unwrap().count(), 1);
        assert_eq!(enumerate_trees(2, &[0, 1]).unwrap().count(), 8);
        let all: Vec<_> = enumerate_trees(3, &[0, 1, 2]).unwrap().collect();
        assert_eq!(all.len(), 3usize.pow(7));
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), all.len());
        assert_eq!(tree_count(3, 3), Some(2187));
        assert!(enumerate_trees(2, &[]).is_err());
    }

    #[test]
    fn enumeration_order_matches_nth() {
        let alphabet = [2, 5, 9];
        for (i, t) in enumerate_trees(2, &[9, 2, 5]).unwrap().enumerate() {
            assert_eq!(t, TreeEnumerator::nth_tree(2, &alphabet, i as u128));
        }
        let first = enumerate_trees(2, &[1, 0]).unwrap().next().unwrap();
        assert_eq!(first.labels(), &[0, 0, 0]);
        let second = enumerate_trees(2, &[1, 0]).unwrap().nth(1).unwrap();
        assert_eq!(second.labels(), &[0, 0, 1]);
    }

    #[test]
    fn compose_and_subtree_are_inverse() {
        let a = tree(2, &[1, 2, 3]);
        let b = tree(2, &[4, 5, 6]);
        let t = LittlestoneTree::compose(0, &a, &b).unwrap();
        assert_eq!(t.labels(), &[0, 1, 4, 2, 3, 5, 6]);
        assert_eq!(t.subtree(false).unwrap(), a);
        assert_eq!(t.subtree(true).unwrap(), b);
        let leaf = LeafAddress::parse("10").unwrap();
        let full = leaf.under(true);
        assert_eq!(
            t.leaf_sample(&full).unwrap(),
            smp(&[(0, 1)]).concat(&b.leaf_sample(&leaf).unwrap())
        );
    }

    #[test]
    fn leaves_are_lexicographic() {
        let t = tree(2, &[0, 0, 0]);
        let names: Vec<String> = t.leaves().map(|l| l.to_string()).collect();
        assert_eq!(names, ["00", "01", "10", "11"]);
    }

    #[test]
    fn tree_json_roundtrip() {
        let t = tree(2, &[3, 4, 7]);
        let text = serde_json::to_string(&t).unwrap();
        assert_eq!(
            text,
            r#"{"label":3,"zero":{"label":4,"zero":"leaf","one":"leaf"},"one":{"label":7,"zero":"leaf","one":"leaf"}}"#
        );
        let back: LittlestoneTree = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
        let ragged = r#"{"label":3,"zero":"leaf","one":{"label":7,"zero":"leaf","one":"leaf"}}"#;
        assert!(serde_json::from_str::<LittlestoneTree>(ragged).is_err());
        assert!(serde_json::from_str::<LittlestoneTree>(r#""leaf""#).is_err());
    }
}
