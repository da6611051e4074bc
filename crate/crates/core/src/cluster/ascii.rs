//! Plain-text dendrogram rendering.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{Dendrogram, NodeRef};

/// Columns used for the tree body, excluding labels.
const WIDTH: usize = 48;

/// Smallest label below `node`, for ordering siblings of equal height.
fn min_label(tree: &Dendrogram, node: NodeRef) -> &str {
    tree.members(node)
        .into_iter()
        .map(|i| tree.labels()[i].as_str())
        .min()
        .unwrap_or("")
}

/// Children in drawing order: the lower subtree first, ties by label.
fn ordered_children(tree: &Dendrogram, node: NodeRef) -> Option<(NodeRef, NodeRef)> {
    let (a, b) = tree.children(node)?;
    let key = |n| (tree.height(n), min_label(tree, n));
    let (ka, kb) = (key(a), key(b));
    let swap = kb.0 < ka.0 || (kb.0 == ka.0 && kb.1 < ka.1);
    Some(if swap { (b, a) } else { (a, b) })
}

/// Leaf indices in rendering order.
pub fn leaf_order(tree: &Dendrogram) -> Vec<usize> {
    let mut out = Vec::with_capacity(tree.leaf_count());
    let mut stack = vec![tree.root()];
    while let Some(node) = stack.pop() {
        match ordered_children(tree, node) {
            None => {
                if let NodeRef::Leaf(i) = node {
                    out.push(i);
                }
            }
            Some((first, second)) => {
                stack.push(second);
                stack.push(first);
            }
        }
    }
    out
}

struct Layout {
    row: usize,
    col: usize,
}

/// Horizontal dendrogram: one leaf per line, merge points placed left to
/// right in proportion to their height. Output is deterministic.
pub fn to_ascii(tree: &Dendrogram) -> String {
    let n = tree.leaf_count();
    let order = leaf_order(tree);
    let max_height = tree.height(tree.root());
    let label_width = tree
        .labels()
        .iter()
        .map(|l| l.chars().count())
        .max()
        .unwrap_or(0);

    let mut leaf_pos = vec![0usize; n];
    for (pos, &leaf) in order.iter().enumerate() {
        leaf_pos[leaf] = pos;
    }
    let layout_of = |node: NodeRef, merges: &[Layout]| match node {
        NodeRef::Leaf(i) => Layout {
            row: 2 * leaf_pos[i],
            col: 0,
        },
        NodeRef::Merge(m) => Layout {
            row: merges[m].row,
            col: merges[m].col,
        },
    };

    let mut merges: Vec<Layout> = Vec::with_capacity(tree.merges().len());
    for merge in tree.merges() {
        let a = layout_of(merge.left, &merges);
        let b = layout_of(merge.right, &merges);
        let scaled = if max_height > 0.0 {
            libm::round(merge.height / max_height * (WIDTH - 1) as f64) as usize + 1
        } else {
            1
        };
        merges.push(Layout {
            row: (a.row + b.row) / 2,
            col: scaled.max(a.col.max(b.col) + 1),
        });
    }

    let rows = 2 * n - 1;
    let cols = merges.iter().map(|l| l.col).max().unwrap_or(0) + 2;
    let mut grid = vec![vec![' '; cols]; rows];
    for (m, merge) in tree.merges().iter().enumerate() {
        let here = &merges[m];
        let (a, b) = (
            layout_of(merge.left, &merges),
            layout_of(merge.right, &merges),
        );
        for child in [&a, &b] {
            let start = if child.col == 0 { 0 } else { child.col + 1 };
            for c in &mut grid[child.row][start..here.col] {
                *c = '-';
            }
        }
        let (top, bottom) = (a.row.min(b.row), a.row.max(b.row));
        for (r, row) in grid.iter_mut().enumerate().take(bottom + 1).skip(top) {
            row[here.col] = if r == top || r == bottom { '+' } else { '|' };
        }
        grid[here.row][here.col] = '+';
    }
    let root = merges.last().expect("at least one merge");
    grid[root.row][root.col + 1] = '-';

    let mut out = String::new();
    let mut row_leaf = vec![None; rows];
    for (pos, &leaf) in order.iter().enumerate() {
        row_leaf[2 * pos] = Some(leaf);
    }
    for (r, row) in grid.iter().enumerate() {
        let body: String = row.iter().collect();
        let label = row_leaf[r].map_or("", |i| tree.labels()[i].as_str());
        let line = format!("{label:>label_width$} {body}");
        out.push_str(line.trim_end());
        out.push('\n');
    }
    let scale = format!("{max_height:.3}");
    let pad = (root.col + 1).saturating_sub(scale.len());
    out.push_str(&format!(
        "{:label_width$} 0{}{}\n",
        "",
        " ".repeat(pad),
        scale
    ));
    out
}
