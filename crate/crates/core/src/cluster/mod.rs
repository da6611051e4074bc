//! Agglomerative clustering of a [`DistanceMatrix`] into a [`Dendrogram`].

mod ascii;
mod consistency;
pub mod newick;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::geometry::{DistanceMatrix, GeometryError};

pub use ascii::{leaf_order, to_ascii};
pub use consistency::{spearman, temporal_consistency, ConsistencyPair, ConsistencyReport};
pub use newick::to_newick;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Linkage {
    Single,
    #[default]
    Complete,
    Average,
}

impl Linkage {
    pub const ALL: [Linkage; 3] = [Linkage::Single, Linkage::Complete, Linkage::Average];

    pub fn name(self) -> &'static str {
        match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Linkage::ALL.into_iter().find(|l| l.name() == name)
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A dendrogram node: a leaf (corpus index) or the result of merge `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeRef {
    Leaf(usize),
    Merge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: NodeRef,
    pub right: NodeRef,
    pub height: f64,
    /// Number of leaves below this node.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    labels: Vec<String>,
    years: Option<Vec<i64>>,
    merges: Vec<Merge>,
    pub linkage: Linkage,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClusterError {
    TooFewLeaves { found: usize },
    ClusterCount { requested: usize, leaves: usize },
    MissingYears,
    InvalidTree(&'static str),
    Matrix(GeometryError),
}

impl core::error::Error for ClusterError {}

impl fmt::Display for ClusterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClusterError::TooFewLeaves { found } => {
                write!(f, "clustering needs at least 2 items, got {found}")
            }
            ClusterError::ClusterCount { requested, leaves } => {
                write!(f, "cannot cut {leaves} leaves into {requested} clusters")
            }
            ClusterError::MissingYears => f.write_str("tree leaves carry no years"),
            ClusterError::InvalidTree(why) => write!(f, "invalid tree: {why}"),
            ClusterError::Matrix(e) => write!(f, "{e}"),
        }
    }
}

impl From<GeometryError> for ClusterError {
    fn from(e: GeometryError) -> Self {
        ClusterError::Matrix(e)
    }
}

impl Dendrogram {
    /// Checks that `merges` form one binary tree over `labels.len()` leaves
    /// with non-decreasing heights.
    pub fn from_merges(
        labels: Vec<String>,
        years: Option<Vec<i64>>,
        merges: Vec<Merge>,
        linkage: Linkage,
    ) -> Result<Self, ClusterError> {
        let n = labels.len();
        if n < 2 {
            return Err(ClusterError::TooFewLeaves { found: n });
        }
        if merges.len() != n - 1 {
            return Err(ClusterError::InvalidTree("expected n - 1 merges"));
        }
        if years.as_ref().is_some_and(|y| y.len() != n) {
            return Err(ClusterError::InvalidTree(
                "year count differs from leaf count",
            ));
        }
        let mut used_leaf = vec![false; n];
        let mut used_merge = vec![false; merges.len()];
        let mut sizes = vec![0usize; merges.len()];
        for (m, merge) in merges.iter().enumerate() {
            if !(merge.height.is_finite() && merge.height >= 0.0) {
                return Err(ClusterError::InvalidTree(
                    "height is negative or not finite",
                ));
            }
            if m > 0 && merge.height < merges[m - 1].height {
                return Err(ClusterError::InvalidTree("heights decrease"));
            }
            let mut size = 0;
            for child in [merge.left, merge.right] {
                let slot = match child {
                    NodeRef::Leaf(i) if i < n => {
                        size += 1;
                        &mut used_leaf[i]
                    }
                    NodeRef::Merge(j) if j < m => {
                        size += sizes[j];
                        &mut used_merge[j]
                    }
                    _ => return Err(ClusterError::InvalidTree("child reference out of range")),
                };
                if core::mem::replace(slot, true) {
                    return Err(ClusterError::InvalidTree("node used twice"));
                }
            }
            if size != merge.size {
                return Err(ClusterError::InvalidTree("size does not match children"));
            }
            sizes[m] = size;
        }
        Ok(Dendrogram {
            labels,
            years,
            merges,
            linkage,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn years(&self) -> Option<&[i64]> {
        self.years.as_deref()
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn leaf_count(&self) -> usize {
        self.labels.len()
    }

    pub fn root(&self) -> NodeRef {
        NodeRef::Merge(self.merges.len() - 1)
    }

    pub fn height(&self, node: NodeRef) -> f64 {
        match node {
            NodeRef::Leaf(_) => 0.0,
            NodeRef::Merge(m) => self.merges[m].height,
        }
    }

    pub fn children(&self, node: NodeRef) -> Option<(NodeRef, NodeRef)> {
        match node {
            NodeRef::Leaf(_) => None,
            NodeRef::Merge(m) => Some((self.merges[m].left, self.merges[m].right)),
        }
    }

    /// Leaf indices under `node`, ascending.
    pub fn members(&self, node: NodeRef) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            match n {
                NodeRef::Leaf(i) => out.push(i),
                NodeRef::Merge(m) => {
                    stack.push(self.merges[m].left);
                    stack.push(self.merges[m].right);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Labels of each group of a partition returned by [`cut`].
    pub fn partition_labels(&self, groups: &[Vec<usize>]) -> Vec<Vec<String>> {
        groups
            .iter()
            .map(|g| g.iter().map(|&i| self.labels[i].clone()).collect())
            .collect()
    }
}

/// Lance-Williams agglomeration.
///
/// Clusters are kept in a list that starts as the leaves in matrix order.
/// Each step merges the pair `(i, j)`, `i < j`, with the smallest linkage
/// value; ties go to the lexicographically smallest `(i, j)`. The merged
/// cluster takes position `i` and position `j` is removed. Average linkage
/// is tracked as the sum of member distances so the value is always
/// `sum / (|A| |B|)` regardless of merge history.
#[allow(clippy::needless_range_loop)]
pub fn agglomerate(m: &DistanceMatrix, linkage: Linkage) -> Result<Dendrogram, ClusterError> {
    let n = m.len();
    if n < 2 {
        return Err(ClusterError::TooFewLeaves { found: n });
    }
    let mut nodes: Vec<NodeRef> = (0..n).map(NodeRef::Leaf).collect();
    let mut sizes: Vec<usize> = vec![1; n];
    let mut acc: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut merges = Vec::with_capacity(n - 1);

    let value = |acc: &[Vec<f64>], sizes: &[usize], i: usize, j: usize| match linkage {
        Linkage::Average => acc[i][j] / (sizes[i] * sizes[j]) as f64,
        _ => acc[i][j],
    };

    while nodes.len() > 1 {
        let mut best = (0, 1);
        let mut best_value = value(&acc, &sizes, 0, 1);
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                let v = value(&acc, &sizes, i, j);
                if v < best_value {
                    best = (i, j);
                    best_value = v;
                }
            }
        }
        let (i, j) = best;
        for k in 0..nodes.len() {
            if k == i || k == j {
                continue;
            }
            let updated = match linkage {
                Linkage::Single => acc[i][k].min(acc[j][k]),
                Linkage::Complete => acc[i][k].max(acc[j][k]),
                Linkage::Average => acc[i][k] + acc[j][k],
            };
            acc[i][k] = updated;
            acc[k][i] = updated;
        }
        merges.push(Merge {
            left: nodes[i],
            right: nodes[j],
            height: best_value,
            size: sizes[i] + sizes[j],
        });
        nodes[i] = NodeRef::Merge(merges.len() - 1);
        sizes[i] += sizes[j];
        nodes.remove(j);
        sizes.remove(j);
        acc.remove(j);
        for row in &mut acc {
            row.remove(j);
        }
    }

    Ok(Dendrogram {
        labels: m.labels().to_vec(),
        years: m.years().map(<[i64]>::to_vec),
        merges,
        linkage,
    })
}

/// Partition left after undoing the last `clusters - 1` merges.
///
/// Groups are ordered by their smallest leaf index; members ascend.
pub fn cut(tree: &Dendrogram, clusters: usize) -> Result<Vec<Vec<usize>>, ClusterError> {
    let n = tree.leaf_count();
    if clusters == 0 || clusters > n {
        return Err(ClusterError::ClusterCount {
            requested: clusters,
            leaves: n,
        });
    }
    // Roots remaining after the first n - clusters merges.
    let applied = n - clusters;
    let mut is_root_leaf = vec![true; n];
    let mut is_root_merge = vec![false; applied];
    for (m, merge) in tree.merges[..applied].iter().enumerate() {
        is_root_merge[m] = true;
        for child in [merge.left, merge.right] {
            match child {
                NodeRef::Leaf(i) => is_root_leaf[i] = false,
                NodeRef::Merge(j) => is_root_merge[j] = false,
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = (0..n)
        .filter(|&i| is_root_leaf[i])
        .map(|i| vec![i])
        .chain(
            (0..applied)
                .filter(|&m| is_root_merge[m])
                .map(|m| tree.members(NodeRef::Merge(m))),
        )
        .collect();
    groups.sort_by_key(|g| g[0]);
    Ok(groups)
}

/// Cophenetic distances: the height of the lowest merge joining each pair.
pub fn cophenetic(tree: &Dendrogram) -> DistanceMatrix {
    let n = tree.leaf_count();
    let mut values = vec![0.0; n * n];
    let mut members: Vec<Vec<usize>> = Vec::with_capacity(tree.merges.len());
    let leaves_of = |node: NodeRef, members: &[Vec<usize>]| match node {
        NodeRef::Leaf(i) => vec![i],
        NodeRef::Merge(m) => members[m].clone(),
    };
    for merge in &tree.merges {
        let left = leaves_of(merge.left, &members);
        let right = leaves_of(merge.right, &members);
        for &a in &left {
            for &b in &right {
                values[a * n + b] = merge.height;
                values[b * n + a] = merge.height;
            }
        }
        members.push(left.into_iter().chain(right).collect());
    }
    DistanceMatrix::new(tree.labels.clone(), tree.years.clone(), values)
        .expect("merge heights of a valid tree form a valid matrix")
}
