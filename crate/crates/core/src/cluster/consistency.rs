//! Agreement between tree distances and publication-year gaps.

use alloc::string::String;
use alloc::vec::Vec;

use super::{cophenetic, ClusterError, Dendrogram};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConsistencyPair {
    pub label_i: String,
    pub label_j: String,
    pub cophenetic_distance: f64,
    pub year_gap: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConsistencyReport {
    /// Spearman rank correlation between cophenetic distance and year gap;
    /// `None` when either side is constant.
    pub spearman_rho: Option<f64>,
    pub pairs: Vec<ConsistencyPair>,
}

/// Ranks starting at 1, ties sharing their average rank.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman's rho as the Pearson correlation of average ranks.
/// `None` for fewer than two points or a constant input.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

pub fn temporal_consistency(tree: &Dendrogram) -> Result<ConsistencyReport, ClusterError> {
    let years = tree.years().ok_or(ClusterError::MissingYears)?;
    let coph = cophenetic(tree);
    let n = tree.leaf_count();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push(ConsistencyPair {
                label_i: tree.labels()[i].clone(),
                label_j: tree.labels()[j].clone(),
                cophenetic_distance: coph.get(i, j),
                year_gap: years[i].abs_diff(years[j]),
            });
        }
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.cophenetic_distance).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.year_gap as f64).collect();
    Ok(ConsistencyReport {
        spearman_rho: spearman(&xs, &ys),
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{agglomerate, Linkage};
    use crate::geometry::DistanceMatrix;
    use alloc::vec;

    #[test]
    fn ranks_average_ties() {
        assert_eq!(
            average_ranks(&[10.0, 20.0, 20.0, 5.0]),
            [2.0, 3.5, 3.5, 1.0]
        );
    }

    #[test]
    fn spearman_known_values() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 40.0, 90.0]), Some(1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&[1.0, 1.0], &[1.0, 2.0]), None);
        // hand-computed: ranks x = 1,2,3,4; y = 1,3,2,4 -> 1 - 6*2/(4*15) = 0.8
        let r = spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((r - 0.8).abs() < 1e-12);
    }

    fn tree(years: Vec<i64>, values: Vec<f64>) -> Dendrogram {
        let labels = years
            .iter()
            .enumerate()
            .map(|(i, y)| alloc::format!("{y}-{i}"))
            .collect();
        let m = DistanceMatrix::new(labels, Some(years), values).unwrap();
        agglomerate(&m, Linkage::Complete).unwrap()
    }

    #[test]
    fn perfect_temporal_order_gives_rho_one() {
        // year gaps 0, 100, 100 rank exactly like cophenetic 0.1, 0.5, 0.5
        let t = tree(
            vec![1900, 1900, 2000],
            vec![0.0, 0.1, 0.5, 0.1, 0.0, 0.4, 0.5, 0.4, 0.0],
        );
        assert_eq!(temporal_consistency(&t).unwrap().spearman_rho, Some(1.0));
    }

    #[test]
    fn partial_temporal_order() {
        let t = tree(
            vec![1900, 1910, 1950],
            vec![0.0, 0.1, 0.5, 0.1, 0.0, 0.4, 0.5, 0.4, 0.0],
        );
        let r = temporal_consistency(&t).unwrap();
        assert_eq!(r.pairs.len(), 3);
        // cophenetic: (a,b)=0.1, (a,c)=(b,c)=0.5; gaps 10, 50, 40
        assert_eq!(r.pairs[1].year_gap, 50);
        let rho = r.spearman_rho.unwrap();
        // ranks coph: 1, 2.5, 2.5 ; gaps: 1, 3, 2
        assert!((rho - 0.866_025_403_784_438_6).abs() < 1e-12);

        let t = tree(
            vec![1900, 1910, 1950, 1960],
            vec![
                0.0, 0.1, 0.5, 0.5, //
                0.1, 0.0, 0.5, 0.5, //
                0.5, 0.5, 0.0, 0.1, //
                0.5, 0.5, 0.1, 0.0,
            ],
        );
        let ys = [10.0, 50.0, 60.0, 40.0, 50.0, 10.0];
        let xs: Vec<f64> = temporal_consistency(&t)
            .unwrap()
            .pairs
            .iter()
            .map(|p| p.cophenetic_distance)
            .collect();
        assert_eq!(xs, [0.1, 0.5, 0.5, 0.5, 0.5, 0.1]);
        assert!(spearman(&xs, &ys).unwrap() > 0.8);
    }

    #[test]
    fn identical_years_have_no_rho() {
        let t = tree(
            vec![1900, 1900, 1900],
            vec![0.0, 0.1, 0.5, 0.1, 0.0, 0.4, 0.5, 0.4, 0.0],
        );
        let r = temporal_consistency(&t).unwrap();
        assert_eq!(r.spearman_rho, None);
        assert_eq!(r.pairs.len(), 3);
    }

    #[test]
    fn missing_years_is_an_error() {
        let m = DistanceMatrix::new(vec!["a".into(), "b".into()], None, vec![0.0, 0.2, 0.2, 0.0])
            .unwrap();
        let t = agglomerate(&m, Linkage::Single).unwrap();
        assert_eq!(temporal_consistency(&t), Err(ClusterError::MissingYears));
    }
}
