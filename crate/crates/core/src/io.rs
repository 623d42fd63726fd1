//! File formats: point clouds and traces as CSV, map specifications and
//! patch atlases as JSON.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::atlas::{Patch, PatchAtlas};
use crate::error::{Error, Result};
use crate::gallery::{WildKind, WildMap};
use crate::maps::{AffineMap, PointMap, SampledMap};
use crate::space::{Ball, NormDescriptor, Point, PointCloud};

/// Writes `# eta = <η>` followed by one comma-separated point per line.
pub fn write_cloud_csv<W: Write>(cloud: &PointCloud, mut w: W) -> Result<()> {
    writeln!(w, "# eta = {:e}", cloud.eta())?;
    for p in cloud.iter() {
        let row: Vec<String> = p.iter().map(|v| format!("{v:e}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Reads the format of [`write_cloud_csv`]; the η comment is required.
pub fn read_cloud_csv<R: Read>(r: R) -> Result<PointCloud> {
    let mut eta = None;
    let mut points = Vec::new();
    for line in BufReader::new(r).lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("eta") {
                let v = v.trim().trim_start_matches('=').trim();
                eta = Some(v.parse::<f64>().map_err(|e| Error::Parse(format!("bad eta {v:?}: {e}")))?);
            }
            continue;
        }
        points.push(line.parse::<Point>()?);
    }
    let eta = eta.ok_or_else(|| Error::Parse("missing `# eta = ...` header".into()))?;
    match points.first() {
        None => PointCloud::new(1, eta).and(Err(Error::EmptyCloud)),
        Some(_) => PointCloud::from_points(&points, eta),
    }
}

/// How a patch (or the `extend` subcommand) obtains its map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MapSpec {
    Affine {
        matrix: Vec<Vec<f64>>,
        translation: Vec<f64>,
    },
    Wild {
        kind: WildKind,
        #[serde(default)]
        seed: u64,
    },
    /// CSV of `(source, image)` pairs, relative paths resolved against the
    /// file that mentions them.
    Sampled { path: PathBuf },
}

impl MapSpec {
    pub fn affine(m: &AffineMap) -> Self {
        MapSpec::Affine {
            matrix: m.rows(),
            translation: m.translation().iter().copied().collect(),
        }
    }

    pub fn build(&self, norm: &NormDescriptor, base_dir: &Path) -> Result<Arc<dyn PointMap>> {
        let rule: Arc<dyn PointMap> = match self {
            MapSpec::Affine { matrix, translation } => Arc::new(AffineMap::from_rows(matrix, translation)?),
            MapSpec::Wild { kind, seed } => Arc::new(WildMap::new(norm, *kind, *seed)),
            MapSpec::Sampled { path } => {
                let full = base_dir.join(path);
                Arc::new(SampledMap::read_csv(File::open(&full)?)?)
            }
        };
        if rule.dim() != norm.dim() {
            return Err(Error::DimensionMismatch {
                expected: norm.dim(),
                found: rule.dim(),
            });
        }
        Ok(rule)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatchSpec {
    pub center: Point,
    pub radius: f64,
    pub map: MapSpec,
}

/// Serialized patch atlas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtlasFile {
    pub norm: NormDescriptor,
    pub region: Ball,
    pub patches: Vec<PatchSpec>,
}

impl AtlasFile {
    pub fn build(&self, base_dir: &Path) -> Result<PatchAtlas> {
        let patches = self
            .patches
            .iter()
            .map(|p| Patch::new(p.center.clone(), p.radius, p.map.build(&self.norm, base_dir)?, &self.norm))
            .collect::<Result<_>>()?;
        PatchAtlas::new(self.norm.clone(), self.region.clone(), patches)
    }

    /// Describes an atlas whose patch maps are all affine.
    pub fn from_atlas(atlas: &PatchAtlas) -> Result<Self> {
        let patches = atlas
            .patches()
            .iter()
            .map(|p| {
                let g = p.map.as_affine().ok_or_else(|| {
                    Error::InvalidParameter(format!("patch map {} has no closed form", p.map.describe()))
                })?;
                Ok(PatchSpec {
                    center: p.center.clone(),
                    radius: p.radius,
                    map: MapSpec::affine(g),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            norm: atlas.norm().clone(),
            region: atlas.region().clone(),
            patches,
        })
    }

    pub fn load(path: &Path) -> Result<PatchAtlas> {
        let file: AtlasFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        file.build(path.parent().unwrap_or(Path::new(".")))
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize, W: Write>(value: &T, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}
