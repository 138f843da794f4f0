//! Flat `key = value` configuration files with `#` comments.
//!
//! ```text
//! algorithm = sdca
//! sampler = iid
//! budgets = 1000, 2000, 4000
//! c_grid = 0.025:0.025:1      # start:step:stop, inclusive
//! lambda_grid = 1, 0.1, 0.01
//! repetitions = 50
//! data = covtype.libsvm
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::experiments::{synth_gaussian, synth_pathological, GaussianSpec, SweepConfig};
use crate::loss::SmoothedHinge;
use crate::solvers::{Algorithm, SolverConfig};

/// Raw key/value pairs with the line each key came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or_default().trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected key = value, got '{content}'"),
            })?;
            let key = key.trim().to_ascii_lowercase();
            if key.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: "empty key".into(),
                });
            }
            if entries
                .insert(key.clone(), (line, value.trim().to_owned()))
                .is_some()
            {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate key '{key}'"),
                });
            }
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    fn get<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|_| Error::Parse {
                line,
                message: format!("bad value '{v}' for '{key}'"),
            }),
        }
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => parse_list(&v).map(Some).map_err(|message| Error::Parse {
                line,
                message: format!("'{key}': {message}"),
            }),
        }
    }

    fn finish(self) -> Result<()> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((key, (line, _))) => Err(Error::Parse {
                line,
                message: format!("unknown key '{key}'"),
            }),
        }
    }
}

/// Comma-separated numbers, or an inclusive `start:step:stop` range.
pub fn parse_list(text: &str) -> std::result::Result<Vec<f64>, String> {
    let num = |s: &str| -> std::result::Result<f64, String> {
        s.trim()
            .parse()
            .map_err(|_| format!("bad number '{}'", s.trim()))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if !(step > 0.0) || stop < start {
                return Err("range needs step > 0 and stop >= start".into());
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|k| start + k as f64 * step).collect())
        }
        [_] => text
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(num)
            .collect(),
        _ => Err(format!("cannot parse list '{text}'")),
    }
}

/// Where the pool for a sweep comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DataSource {
    Libsvm { path: PathBuf, dim: Option<usize> },
    Gaussian { spec: GaussianSpec, seed: u64 },
    Pathological { m: usize, seed: u64 },
}

impl DataSource {
    pub fn load(&self) -> Result<Dataset> {
        match self {
            DataSource::Libsvm { path, dim } => super::read_libsvm_file(path, *dim),
            DataSource::Gaussian { spec, seed } => synth_gaussian(*spec, *seed),
            DataSource::Pathological { m, seed } => synth_pathological(*m, *seed),
        }
    }
}

/// A parsed sweep configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFile {
    pub sweep: SweepConfig,
    pub data: DataSource,
    pub out_dir: Option<PathBuf>,
}

impl SweepFile {
    /// Relative `data` and `out_dir` paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut kv = KeyValues::parse(text)?;
        let algorithm: Algorithm = kv.get("algorithm")?.unwrap_or(Algorithm::Sdca);
        let mut solver = SolverConfig::new(algorithm, 1.0, 1);
        if let Some(s) = kv.get("sampler")? {
            solver.sampler = s;
        }
        if let Some(g) = kv.get::<f64>("gamma")? {
            solver.loss = SmoothedHinge::new(g)?;
        }
        if let Some(k) = kv.get("svrg_inner_multiplier")? {
            solver.svrg_inner_multiplier = k;
        }
        if let Some(b) = kv.get("tail_average")? {
            solver.tail_average = b;
        }
        let mut sweep = SweepConfig::new(solver);
        if let Some(b) = kv.list("budgets")? {
            sweep.budgets = b
                .into_iter()
                .map(|v| {
                    if v >= 1.0 && v.fract() == 0.0 {
                        Ok(v as u64)
                    } else {
                        Err(Error::InvalidParameter(format!(
                            "budget {v} is not a positive integer"
                        )))
                    }
                })
                .collect::<Result<_>>()?;
        }
        if let Some(c) = kv.list("c_grid")? {
            sweep.c_grid = c;
        }
        if let Some(l) = kv.list("lambda_grid")? {
            sweep.lambda_grid = l;
        }
        if let Some(s) = kv.list("stepsize_grid")? {
            sweep.stepsize_grid = s;
        }
        if let Some(r) = kv.get("repetitions")? {
            sweep.repetitions = r;
        }
        if let Some(f) = kv.get("test_fraction")? {
            sweep.test_fraction = f;
        }
        if let Some(s) = kv.get("base_seed")? {
            sweep.base_seed = s;
        }
        if let Some(b) = kv.get("redraw_test_split")? {
            sweep.redraw_test_split = b;
        }
        sweep.threads = kv.get("threads")?;

        let synth: Option<String> = kv.get("synth")?;
        let data_path: Option<String> = kv.get("data")?;
        let data = match (data_path, synth.as_deref()) {
            (Some(p), None) => DataSource::Libsvm {
                path: base_dir.join(p),
                dim: kv.get("dim")?,
            },
            (None, Some("gaussian")) => {
                let n = kv.get("synth_n")?.unwrap_or(10_000);
                let d = kv.get("synth_d")?.unwrap_or(4);
                let noise = kv.get("synth_noise")?.unwrap_or(0.0);
                let mut spec = GaussianSpec::new(n, d, noise);
                if let Some(mn) = kv.get("synth_mean_norm")? {
                    spec = spec.with_mean_norm(mn);
                }
                DataSource::Gaussian {
                    spec,
                    seed: kv.get("synth_seed")?.unwrap_or(0),
                }
            }
            (None, Some("pathological")) => DataSource::Pathological {
                m: kv.get("synth_n")?.unwrap_or(10),
                seed: kv.get("synth_seed")?.unwrap_or(0),
            },
            (None, Some(other)) => {
                return Err(Error::InvalidParameter(format!(
                    "unknown synth kind '{other}'"
                )))
            }
            (Some(_), Some(_)) => {
                return Err(Error::InvalidParameter(
                    "give either 'data' or 'synth', not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::InvalidParameter(
                    "config needs 'data' or 'synth'".into(),
                ))
            }
        };
        let out_dir = kv.get::<String>("out_dir")?.map(|p| base_dir.join(p));
        kv.finish()?;
        sweep.validate()?;
        Ok(Self {
            sweep,
            data,
            out_dir,
        })
    }
}
