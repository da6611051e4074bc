//! Newick output for dendrograms, plus a small parser for reading trees back.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use super::{Dendrogram, NodeRef};

/// Branch lengths are printed with this many decimals, trailing zeros trimmed.
const LENGTH_DECIMALS: usize = 10;

fn format_length(x: f64) -> String {
    let s = format!("{:.*}", LENGTH_DECIMALS, x.max(0.0));
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-0" {
        String::from("0")
    } else {
        String::from(s)
    }
}

fn needs_quotes(label: &str) -> bool {
    label.is_empty()
        || label
            .chars()
            .any(|c| c.is_whitespace() || "()[]':;,".contains(c))
}

fn write_label(out: &mut String, label: &str) {
    if needs_quotes(label) {
        out.push('\'');
        out.push_str(&label.replace('\'', "''"));
        out.push('\'');
    } else {
        out.push_str(label);
    }
}

/// Newick string with branch length = parent height - child height.
pub fn to_newick(tree: &Dendrogram) -> String {
    fn walk(tree: &Dendrogram, node: NodeRef, parent_height: f64, out: &mut String) {
        match node {
            NodeRef::Leaf(i) => write_label(out, &tree.labels()[i]),
            NodeRef::Merge(m) => {
                let merge = tree.merges()[m];
                out.push('(');
                walk(tree, merge.left, merge.height, out);
                out.push(',');
                walk(tree, merge.right, merge.height, out);
                out.push(')');
            }
        }
        if parent_height.is_finite() {
            let _ = write!(out, ":{}", format_length(parent_height - tree.height(node)));
        }
    }
    let mut out = String::new();
    walk(tree, tree.root(), f64::INFINITY, &mut out);
    out.push(';');
    out
}

/// A parsed Newick node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NewickNode {
    pub label: Option<String>,
    pub length: Option<f64>,
    pub children: Vec<NewickNode>,
}

impl NewickNode {
    /// Leaf labels in left-to-right order.
    pub fn leaf_labels(&self) -> Vec<&str> {
        if self.children.is_empty() {
            return self.label.as_deref().into_iter().collect();
        }
        self.children.iter().flat_map(|c| c.leaf_labels()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewickError {
    pub offset: usize,
    pub message: &'static str,
}

impl core::error::Error for NewickError {}

impl fmt::Display for NewickError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "newick parse error at byte {}: {}",
            self.offset, self.message
        )
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &'static str) -> NewickError {
        NewickError {
            offset: self.pos,
            message,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn node(&mut self, depth: usize) -> Result<NewickNode, NewickError> {
        if depth > 10_000 {
            return Err(self.err("tree nested too deeply"));
        }
        self.skip_ws();
        let mut node = NewickNode::default();
        if self.peek() == Some('(') {
            self.pos += 1;
            loop {
                node.children.push(self.node(depth + 1)?);
                self.skip_ws();
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected ',' or ')'")),
                }
            }
        }
        self.skip_ws();
        node.label = self.label()?;
        self.skip_ws();
        if self.peek() == Some(':') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while let Some(c) = self.peek() {
                if c.is_ascii_digit() || "+-.eE".contains(c) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            let length = self.src[start..self.pos]
                .parse::<f64>()
                .map_err(|_| self.err("invalid branch length"))?;
            node.length = Some(length);
        }
        Ok(node)
    }

    fn label(&mut self) -> Result<Option<String>, NewickError> {
        if self.peek() == Some('\'') {
            self.pos += 1;
            let mut label = String::new();
            loop {
                match self.peek() {
                    None => return Err(self.err("unterminated quoted label")),
                    Some('\'') => {
                        self.pos += 1;
                        if self.peek() == Some('\'') {
                            label.push('\'');
                            self.pos += 1;
                        } else {
                            return Ok(Some(label));
                        }
                    }
                    Some(c) => {
                        label.push(c);
                        self.pos += c.len_utf8();
                    }
                }
            }
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || "()[]':;,".contains(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        Ok((self.pos > start).then(|| String::from(&self.src[start..self.pos])))
    }
}

pub fn parse_newick(src: &str) -> Result<NewickNode, NewickError> {
    let mut p = Parser { src, pos: 0 };
    let root = p.node(0)?;
    p.skip_ws();
    if p.peek() != Some(';') {
        return Err(p.err("expected ';'"));
    }
    p.pos += 1;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.err("trailing input after ';'"));
    }
    Ok(root)
}

/// Distance from each leaf to the root of a parsed tree, keyed by label.
pub fn root_distances(node: &NewickNode) -> Vec<(String, f64)> {
    fn walk(node: &NewickNode, depth: f64, out: &mut Vec<(String, f64)>) {
        let depth = depth + node.length.unwrap_or(0.0);
        if node.children.is_empty() {
            out.push((node.label.clone().unwrap_or_default(), depth));
        }
        for c in &node.children {
            walk(c, depth, out);
        }
    }
    let mut out = Vec::new();
    walk(node, 0.0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{agglomerate, Linkage};
    use crate::geometry::DistanceMatrix;
    use alloc::string::ToString;
    use alloc::vec;

    fn tree(labels: &[&str], values: &[f64]) -> Dendrogram {
        let m = DistanceMatrix::new(
            labels.iter().map(|s| s.to_string()).collect(),
            None,
            values.to_vec(),
        )
        .unwrap();
        agglomerate(&m, Linkage::Complete).unwrap()
    }

    #[test]
    fn two_leaf_newick() {
        let t = tree(&["a", "b"], &[0.0, 0.3, 0.3, 0.0]);
        assert_eq!(to_newick(&t), "(a:0.3,b:0.3);");
    }

    #[test]
    fn three_leaf_newick() {
        let t = tree(
            &["a", "b", "c"],
            &[0.0, 0.1, 0.5, 0.1, 0.0, 0.5, 0.5, 0.5, 0.0],
        );
        assert_eq!(to_newick(&t), "((a:0.1,b:0.1):0.4,c:0.5);");
    }

    #[test]
    fn awkward_labels_are_quoted() {
        let t = tree(&["o'brien", "x y"], &[0.0, 0.25, 0.25, 0.0]);
        let s = to_newick(&t);
        assert_eq!(s, "('o''brien':0.25,'x y':0.25);");
        let parsed = parse_newick(&s).unwrap();
        assert_eq!(parsed.leaf_labels(), ["o'brien", "x y"]);
    }

    #[test]
    fn lengths_are_trimmed() {
        assert_eq!(format_length(0.3 - 0.1), "0.2");
        assert_eq!(format_length(0.0), "0");
        assert_eq!(format_length(1.0), "1");
        assert_eq!(format_length(-1e-18), "0");
    }

    #[test]
    fn parse_errors() {
        assert!(parse_newick("(a,b)").is_err());
        assert!(parse_newick("(a,b;").is_err());
        assert!(parse_newick("(a:x,b);").is_err());
        assert!(parse_newick("(a,b); junk").is_err());
        let n = parse_newick(" ( a : 1 , ( b:2,c:3e-1 )inner:0.5 ) root ;").unwrap();
        assert_eq!(n.label.as_deref(), Some("root"));
        assert_eq!(n.leaf_labels(), vec!["a", "b", "c"]);
        assert_eq!(n.children[1].children[1].length, Some(0.3));
    }
}
