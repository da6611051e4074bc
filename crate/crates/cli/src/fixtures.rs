//! Bundled published distance tables over Dickens' novels grouped by
//! publication year (eight years, 1836-1861). Fixture `5-5` was built from the
//! top 100 shared words, `5-6` from the top 10.

use langtree_core::DistanceMatrix;

use crate::error::{CliError, Stage};
use crate::formats::{read_matrix_csv, Symmetrized};

const TABLE_5_5: &str = include_str!("../fixtures/table_5_5.csv");
const TABLE_5_6: &str = include_str!("../fixtures/table_5_6.csv");

/// Largest asymmetry accepted in a printed table: half a unit in the last
/// printed decimal on each side.
pub const PRINT_LENIENCE: f64 = 0.0015;

pub const FIXTURE_IDS: [&str; 2] = ["5-5", "5-6"];

/// Two-group split reported alongside the published tree.
pub const DESCRIBED_SPLIT: [&[&str]; 2] = [
    &["1836", "1838", "1843", "1847"],
    &["1852", "1854", "1859", "1861"],
];

#[derive(Debug, Clone)]
pub struct Fixture {
    pub id: &'static str,
    pub csv: &'static str,
    pub matrix: DistanceMatrix,
    pub symmetrized: Vec<Symmetrized>,
}

pub fn load(id: &str) -> Result<Fixture, CliError> {
    let (id, csv) = match id {
        "5-5" => ("5-5", TABLE_5_5),
        "5-6" => ("5-6", TABLE_5_6),
        other => {
            return Err(CliError::data(
                Stage::Fixture,
                format!(
                    "unknown fixture {other:?} (known: {})",
                    FIXTURE_IDS.join(", ")
                ),
            ))
        }
    };
    let (matrix, symmetrized) = read_matrix_csv(csv, PRINT_LENIENCE)
        .map_err(|e| CliError::data(Stage::Fixture, format!("{id}: {e}")))?;
    Ok(Fixture {
        id,
        csv,
        matrix,
        symmetrized,
    })
}

/// The other bundled table, for cross-table comparison.
pub fn counterpart(id: &str) -> &'static str {
    if id == "5-5" {
        "5-6"
    } else {
        "5-5"
    }
}
