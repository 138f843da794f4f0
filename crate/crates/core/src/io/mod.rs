//! File formats: LIBSVM datasets, CSV results, `key = value` configs and run manifests.

mod config;
mod csv;
mod libsvm;
mod manifest;

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

pub use self::csv::*;
pub use config::{parse_list, DataSource, KeyValues, SweepFile};
pub use libsvm::{parse_libsvm, write_libsvm};
pub use manifest::{unix_now, RunManifest, MANIFEST_FILE};

use crate::data::Dataset;
use crate::error::{Error, Result};

pub fn read_libsvm_file(path: &Path, dim: Option<usize>) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_libsvm(BufReader::new(file), dim)
}
