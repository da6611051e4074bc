use std::fmt;
use std::io;
use std::path::PathBuf;

use langtree_core::cluster::ClusterError;
use langtree_core::embedding::TrainError;
use langtree_core::geometry::GeometryError;
use langtree_core::synth::SynthError;
use langtree_core::vocab::VocabError;

/// Pipeline stage named in diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Manifest,
    Read,
    Vocab,
    Embed,
    Geometry,
    Cluster,
    Fixture,
    Synth,
    Write,
    Cache,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Manifest => "manifest",
            Stage::Read => "read",
            Stage::Vocab => "vocab",
            Stage::Embed => "embed",
            Stage::Geometry => "geometry",
            Stage::Cluster => "cluster",
            Stage::Fixture => "fixture",
            Stage::Synth => "synth",
            Stage::Write => "write",
            Stage::Cache => "cache",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{stage}: {message}")]
    Data { stage: Stage, message: String },
    #[error("{stage}: {message}")]
    Numeric { stage: Stage, message: String },
    #[error("{stage}: {}: {source}", path.display())]
    Io {
        stage: Stage,
        path: PathBuf,
        source: io::Error,
    },
}

impl CliError {
    pub fn data(stage: Stage, message: impl fmt::Display) -> Self {
        CliError::Data {
            stage,
            message: message.to_string(),
        }
    }

    pub fn numeric(stage: Stage, message: impl fmt::Display) -> Self {
        CliError::Numeric {
            stage,
            message: message.to_string(),
        }
    }

    pub fn io(stage: Stage, path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            stage,
            path: path.into(),
            source,
        }
    }

    /// 1 usage, 2 data, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data { .. } | CliError::Io { .. } => 2,
            CliError::Numeric { .. } => 3,
        }
    }
}

impl From<VocabError> for CliError {
    fn from(e: VocabError) -> Self {
        CliError::data(Stage::Vocab, e)
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::NonFiniteLoss { .. } => CliError::numeric(Stage::Embed, e),
            _ => CliError::data(Stage::Embed, e),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::ZeroNorm | GeometryError::ZeroNormCorpus { .. } => {
                CliError::numeric(Stage::Geometry, e)
            }
            _ => CliError::data(Stage::Geometry, e),
        }
    }
}

impl From<ClusterError> for CliError {
    fn from(e: ClusterError) -> Self {
        CliError::data(Stage::Cluster, e)
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        CliError::data(Stage::Synth, e)
    }
}
