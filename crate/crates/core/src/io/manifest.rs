use std::io::{Read, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::DataSource;
use crate::error::Result;
use crate::experiments::{CellRun, SweepConfig};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to re-run any cell of a sweep bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub started_unix_secs: u64,
    pub finished_unix_secs: u64,
    pub base_seed: u64,
    pub config: SweepConfig,
    pub data: DataSource,
    pub pool_size: usize,
    pub pool_dim: usize,
    pub cells: Vec<CellRun>,
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl RunManifest {
    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    pub fn read<R: Read>(input: R) -> Result<Self> {
        Ok(serde_json::from_reader(input)?)
    }
}
