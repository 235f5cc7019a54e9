//! One module per command group. Every command takes a resolved config and
//! an output directory, writes its files and a `manifest.json`.

mod bench;
mod estimate;
mod simulate;
mod surface;
mod uncertainty;

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{CliError, CliResult};
use crate::formats::write_json;

pub use bench::{bench, compare_interp, BenchConfig, CompareInterpConfig};
pub use estimate::{estimate, EstimateConfig, SeriesInput};
pub use simulate::{simulate, spectrum, SimulateConfig, SpectrumConfig};
pub use surface::{loglik_surface, surface_csv, SurfaceConfig};
pub use uncertainty::{
    diff_grid, kolmogorov, pc_fan, quadrature, DiffGridConfig, KolmogorovConfig, PcFanConfig,
    QuadratureConfig,
};

pub const TOOL: &str = "multirate";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Reads a JSON config, or returns the defaults when no path is given.
/// Relative paths inside the config are resolved against its directory.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<(T, PathBuf)> {
    match path {
        None => Ok((T::default(), PathBuf::new())),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
            let cfg = serde_json::from_str(&text)
                .map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
            let dir = p.parent().map(Path::to_path_buf).unwrap_or_default();
            Ok((cfg, dir))
        }
    }
}

pub(crate) fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

#[derive(Serialize)]
struct Manifest<'a, T> {
    tool: &'a str,
    version: &'a str,
    command: &'a str,
    config: &'a T,
}

/// Creates `out` and writes the manifest echoing the resolved config.
pub(crate) fn prepare<T: Serialize>(out: &Path, command: &str, config: &T) -> CliResult<()> {
    fs::create_dir_all(out).map_err(|e| CliError::input(format!("{}: {e}", out.display())))?;
    write_json(
        &out.join("manifest.json"),
        &Manifest {
            tool: TOOL,
            version: VERSION,
            command,
            config,
        },
    )
}

/// Library validation failures caused by the config are input errors.
pub(crate) fn bad_config(e: multirate_core::Error) -> CliError {
    CliError::Input(e.to_string())
}

/// Accepts either a scalar or a list.
pub(crate) fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(usize),
        Many(Vec<usize>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

pub(crate) fn check_grid_size(n: usize, min: usize) -> CliResult<()> {
    if n < min {
        return Err(CliError::input(format!("grid_size must be at least {min}, got {n}")));
    }
    Ok(())
}
