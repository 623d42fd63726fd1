use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use isoatlas_core::io::MapSpec;
use isoatlas_core::{NormDescriptor, Point};
use serde::Deserialize;

use crate::CliError;

/// Environment variable that overrides the default output directory.
pub const OUT_DIR_ENV: &str = "ISOATLAS_OUT_DIR";

/// A norm given either as command-line shorthand or as a full object.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum NormInput {
    Short(String),
    Full(NormDescriptor),
}

impl NormInput {
    pub fn resolve(self) -> Result<NormDescriptor, CliError> {
        match self {
            NormInput::Short(s) => Ok(s.parse()?),
            NormInput::Full(n) => Ok(n),
        }
    }
}

/// Contents of a `--config` file. Every field is optional; flags given on
/// the command line take precedence.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub norm: Option<NormInput>,
    pub eta: Option<f64>,
    pub tau: Option<f64>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub x0: Option<Point>,
    pub x1: Option<Point>,
    pub center: Option<Point>,
    pub radius: Option<f64>,
    pub map: Option<MapSpec>,
    pub atlas: Option<PathBuf>,
    pub case: Option<GalleryCase>,
    pub out: Option<PathBuf>,
    pub min_coverage: Option<f64>,
    pub seed_patch: Option<usize>,
    pub witness_lambda: Option<f64>,
    pub dump_clouds: Option<bool>,
    pub reps: Option<usize>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// `gallery` case names, shared by flags and config files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GalleryCase {
    Wild,
    Positive,
    Adversarial,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let file = File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_reader(BufReader::new(file))
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }
}

/// Output directory: flag, then config file, then environment, then `out`.
pub fn out_dir(flag: Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    flag.or_else(|| cfg.out.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// A strictly positive, finite parameter.
pub fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Parses `--map`: inline JSON, or `@path` to a JSON file.
pub fn parse_map(arg: &str) -> Result<(MapSpec, PathBuf), CliError> {
    if let Some(path) = arg.strip_prefix('@') {
        let path = Path::new(path);
        let file = File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let spec = serde_json::from_reader(BufReader::new(file))
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok((spec, path.parent().map(Path::to_path_buf).unwrap_or_default()))
    } else {
        let spec = serde_json::from_str(arg).map_err(|e| CliError::Config(format!("--map: {e}")))?;
        Ok((spec, PathBuf::new()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use isoatlas_core::WildKind;

    #[test]
    fn config_accepts_short_and_full_norms() {
        let a: RunConfig = serde_json::from_str(r#"{"norm": "lp:inf:2", "tol": 0.01}"#).unwrap();
        assert_eq!(a.norm.unwrap().resolve().unwrap(), NormDescriptor::max_norm(2).unwrap());
        let b: RunConfig = serde_json::from_str(r#"{"norm": {"kind": "lp", "p": 1, "dim": 3}}"#).unwrap();
        assert_eq!(b.norm.unwrap().resolve().unwrap(), NormDescriptor::l1(3).unwrap());
    }

    #[test]
    fn config_rejects_unknown_fields() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"etaa": 1}"#).is_err());
    }

    #[test]
    fn inline_map_parses() {
        let (m, _) = parse_map(r#"{"type": "wild", "kind": "radial-square"}"#).unwrap();
        assert_eq!(
            m,
            MapSpec::Wild {
                kind: WildKind::RadialSquare,
                seed: 0
            }
        );
        assert!(parse_map("{").is_err());
    }
}
