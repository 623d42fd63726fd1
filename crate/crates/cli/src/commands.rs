use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use isoatlas_core::gallery::{pair_defect, random_in_ball, random_isometry, sphere_restriction_defect};
use isoatlas_core::io::{write_cloud_csv, write_json, AtlasFile, MapSpec, PatchSpec};
use isoatlas_core::suite::run_suite;
use isoatlas_core::{
    extend_ball_isometry, extend_ball_isometry_with, global_defect_witness, make_adversarial_atlas,
    make_atlas_from_global, metric_midpoint, sample_ball, sphere_epsilon, stitch_with, wild_ball_map, AffineMap,
    Ball, Domain, ExtensionOptions, MapOracle, NormDescriptor, Point, StitchOptions, Verdict, WildKind,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::{parse_map, positive, GalleryCase, NormInput, RunConfig};
use crate::{BenchArgs, CliError, Exit, ExtendArgs, GalleryArgs, MidpointArgs, StitchArgs, SuiteArgs};

/// Default isometry tolerance.
const DEFAULT_TAU: f64 = 1e-9;

fn missing(name: &str) -> CliError {
    CliError::Config(format!("missing required parameter `{name}` (flag or config file)"))
}

fn pick_point(name: &str, flag: Option<String>, cfg: Option<Point>) -> Result<Point, CliError> {
    match flag {
        Some(s) => Ok(s.parse()?),
        None => cfg.ok_or_else(|| missing(name)),
    }
}

/// Norm from the flag, then the config file, then ℓ2 in `dim` dimensions.
fn pick_norm(flag: Option<String>, cfg: Option<NormInput>, dim: usize) -> Result<NormDescriptor, CliError> {
    let norm = match (flag, cfg) {
        (Some(s), _) => s.parse()?,
        (None, Some(c)) => c.resolve()?,
        (None, None) => NormDescriptor::euclidean(dim)?,
    };
    if norm.dim() != dim {
        return Err(CliError::Config(format!(
            "norm {} has dimension {}, points have dimension {dim}",
            norm.label(),
            norm.dim()
        )));
    }
    Ok(norm)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

#[derive(Serialize)]
struct MidpointRecord {
    norm: NormDescriptor,
    x0: Point,
    x1: Point,
    eta: f64,
    tol: f64,
    point: Point,
    algebraic_midpoint: Point,
    distance_to_algebraic_midpoint: f64,
    refinements: usize,
    diameters: Vec<f64>,
}

pub fn midpoint(a: MidpointArgs, cfg: RunConfig, out: &Path) -> Result<Exit, CliError> {
    let x0 = pick_point("x0", a.x0, cfg.x0)?;
    let x1 = pick_point("x1", a.x1, cfg.x1)?;
    if x0.dim() != x1.dim() {
        return Err(CliError::Config("x0 and x1 have different dimensions".into()));
    }
    let norm = pick_norm(a.norm, cfg.norm, x0.dim())?;
    let d = norm.distance(&x0, &x1)?;
    let tol = positive("tol", a.tol.or(cfg.tol).unwrap_or(d / 100.0))?;
    let eta = positive("eta", a.eta.or(cfg.eta).unwrap_or(tol / 2.0))?;
    let (m, trace) = metric_midpoint(&x0, &x1, &norm, eta, tol)?;

    trace.write_csv(create(out, "midpoint_trace.csv")?)?;
    if a.dump_clouds || cfg.dump_clouds.unwrap_or(false) {
        let dir = out.join("clouds");
        for (k, c) in trace.clouds.iter().enumerate() {
            write_cloud_csv(c, create(&dir, &format!("iteration_{}.csv", k + 1))?)?;
        }
    }
    let algebraic = x0.midpoint(&x1);
    let record = MidpointRecord {
        distance_to_algebraic_midpoint: norm.dist(&m, &algebraic),
        refinements: trace.refinements(),
        diameters: trace.diameters.clone(),
        norm,
        x0,
        x1,
        eta,
        tol,
        point: m,
        algebraic_midpoint: algebraic,
    };
    write_json(&record, create(out, "midpoint.json")?)?;
    println!(
        "midpoint {} after {} refinement(s), final diameter {:e}",
        record.point,
        record.refinements,
        record.diameters.last().copied().unwrap_or(0.0)
    );
    Ok(Exit::Success)
}

pub fn extend(a: ExtendArgs, cfg: RunConfig, out: &Path) -> Result<Exit, CliError> {
    let center = pick_point("center", a.center, cfg.center)?;
    let norm = pick_norm(a.norm, cfg.norm, center.dim())?;
    let radius = positive("radius", a.radius.or(cfg.radius).ok_or_else(|| missing("radius"))?)?;
    let (spec, base): (MapSpec, PathBuf) = match a.map {
        Some(s) => parse_map(&s)?,
        None => (cfg.map.ok_or_else(|| missing("map"))?, cfg.base_dir.clone()),
    };
    let eta = positive("eta", a.eta.or(cfg.eta).unwrap_or(radius / 50.0))?;
    let tau = positive("tau", a.tau.or(cfg.tau).unwrap_or(DEFAULT_TAU))?;
    let opts = ExtensionOptions {
        witness_lambda: a.witness_lambda.or(cfg.witness_lambda).unwrap_or(0.0),
        ..ExtensionOptions::default()
    };

    let ball = Ball::new(center, radius)?;
    let f = MapOracle::new(spec.build(&norm, &base)?, Domain::Ball(ball.clone()), norm.clone())?;
    match extend_ball_isometry_with(&f, &ball, &norm, eta, tau, &opts) {
        Ok(report) => {
            write_json(&report, create(out, "extension.json")?)?;
            report.write_shell_csv(create(out, "extension_shells.csv")?)?;
            println!(
                "certified: residual {:e} over {} sample points",
                report.residual_on_ball, report.sample_size
            );
            Ok(Exit::Success)
        }
        Err(e) => {
            write_json(&e, create(out, "extension_error.json")?)?;
            eprintln!("{e}");
            Ok(Exit::StageFailure)
        }
    }
}

pub fn stitch(a: StitchArgs, cfg: RunConfig, out: &Path) -> Result<Exit, CliError> {
    let path = a
        .atlas
        .or_else(|| cfg.atlas.as_ref().map(|p| cfg.base_dir.join(p)))
        .ok_or_else(|| missing("atlas"))?;
    let atlas = AtlasFile::load(&path)?;
    let min_radius = atlas
        .patches()
        .iter()
        .map(|p| p.radius)
        .fold(f64::INFINITY, f64::min);
    if !min_radius.is_finite() {
        return Err(CliError::Config("atlas has no patches".into()));
    }
    let eta = positive("eta", a.eta.or(cfg.eta).unwrap_or(min_radius / 10.0))?;
    let tau = positive("tau", a.tau.or(cfg.tau).unwrap_or(DEFAULT_TAU))?;
    let opts = StitchOptions {
        seed_patch: a.seed_patch.or(cfg.seed_patch),
        min_coverage: a.min_coverage.or(cfg.min_coverage),
        ..StitchOptions::default()
    };
    let verdict = stitch_with(&atlas, eta, tau, &opts);
    write_json(&verdict, create(out, "verdict.json")?)?;
    Ok(match verdict {
        Verdict::Certificate(c) => {
            println!("certificate: seed patch {}, {} patches", c.seed, c.per_patch_residuals.len());
            Exit::Success
        }
        Verdict::Refutation(r) => {
            println!("refutation: defect {:e} at {} and {}", r.defect, r.x, r.x_prime);
            Exit::Refutation
        }
        Verdict::Undetermined(u) => {
            println!("undetermined: {}", u.detail);
            Exit::Undetermined
        }
    })
}

/// Patch radius and grid spacing of generated atlases.
const GALLERY_PATCH: (f64, f64) = (0.6, 0.5);

pub fn gallery(a: GalleryArgs, cfg: RunConfig, out: &Path) -> Result<Exit, CliError> {
    let case = a.case.or(cfg.case).ok_or_else(|| missing("case"))?;
    let seed = a.seed.or(cfg.seed).unwrap_or(0);
    let norm = match (a.norm, cfg.norm) {
        (Some(s), _) => s.parse()?,
        (None, Some(c)) => c.resolve()?,
        (None, None) => NormDescriptor::euclidean(2)?,
    };
    let dim = norm.dim();
    let origin = Point::origin(dim);
    let region = Ball::new(origin.clone(), 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (patch_radius, spacing) = GALLERY_PATCH;

    let (instance, summary) = match case {
        GalleryCase::Wild => {
            let kind = WildKind::RadialSquare;
            let wild = wild_ball_map(&norm, kind, seed)?;
            let centers = Ball::new(origin.clone(), 3.0)?;
            let mut spheres = Vec::new();
            for _ in 0..5 {
                let x0 = random_in_ball(&mut rng, &centers, &norm);
                let eps = sphere_epsilon(&x0, &norm)?;
                let defect = sphere_restriction_defect(&wild, &x0, eps, &norm, eps / 8.0)?;
                spheres.push(json!({"center": x0, "epsilon": eps, "defect": defect}));
            }
            let (x, y) = (Point::axis(dim, 0, 0.5), Point::axis(dim, 0, 0.6));
            let documented = pair_defect(&wild, &x, &y, &norm)?;
            let search = global_defect_witness(&wild, &region, &norm, seed, 2000)?;
            let file = AtlasFile {
                norm: norm.clone(),
                region: region.clone(),
                patches: vec![PatchSpec {
                    center: origin.clone(),
                    radius: 1.25,
                    map: MapSpec::Wild { kind, seed },
                }],
            };
            let summary = json!({
                "case": "wild",
                "kind": kind.to_string(),
                "seed": seed,
                "norm": norm,
                "sphere_checks": spheres,
                "documented_pair": {"x": x, "x_prime": y, "defect": documented},
                "search": search,
            });
            (("wild_atlas.json", file), summary)
        }
        GalleryCase::Positive => {
            let g = random_isometry(&mut rng, &norm);
            let atlas = make_atlas_from_global(&g, &region, &norm, patch_radius, spacing)?;
            let summary = json!({
                "case": "positive",
                "seed": seed,
                "norm": norm,
                "g": g,
                "patches": atlas.len(),
            });
            (("positive_atlas.json", AtlasFile::from_atlas(&atlas)?), summary)
        }
        GalleryCase::Adversarial => {
            let g1 = random_isometry(&mut rng, &norm);
            let shift = Point::axis(dim, 0, 0.05);
            let g2 = AffineMap::translation_by(&shift)
                .compose(&g1)
                .map_err(CliError::Core)?;
            let atlas = make_adversarial_atlas(&g1, &g2, &region, &norm, 0, patch_radius, spacing)?;
            let summary = json!({
                "case": "adversarial",
                "seed": seed,
                "norm": norm,
                "g1": g1,
                "g2": g2,
                "seam_gap": norm.norm(&shift)?,
                "patches": atlas.len(),
            });
            (("adversarial_atlas.json", AtlasFile::from_atlas(&atlas)?), summary)
        }
    };
    let (name, file) = instance;
    write_json(&file, create(out, name)?)?;
    let mut summary = summary;
    summary["instance"] = json!(name);
    write_json(&summary, create(out, "gallery.json")?)?;
    println!("wrote {} and gallery.json to {}", name, out.display());
    Ok(Exit::Success)
}

#[derive(Serialize)]
struct BenchRecord {
    workload: &'static str,
    reps: usize,
    median_seconds: f64,
}

pub fn bench(a: BenchArgs, cfg: RunConfig, out: &Path) -> Result<Exit, CliError> {
    let reps = a.reps.or(cfg.reps).unwrap_or(3).max(1);
    let l2 = NormDescriptor::euclidean(2)?;
    let l1_3 = NormDescriptor::l1(3)?;
    let l2_3 = NormDescriptor::euclidean(3)?;
    let (x0, x1) = (Point::from([-0.7, -0.7, -0.7]), Point::from([0.2, 0.9, 0.9]));
    let unit = Ball::new(Point::origin(2), 1.0)?;
    let rotation = AffineMap::rotation_2d(0.4);
    let oracle = MapOracle::new(Arc::new(rotation.clone()), Domain::Ball(unit.clone()), l2.clone())?;
    let atlas = make_atlas_from_global(&rotation, &unit, &l2, GALLERY_PATCH.0, GALLERY_PATCH.1)?;

    type Workload<'a> = (&'static str, Box<dyn Fn() -> Result<(), CliError> + 'a>);
    let workloads: Vec<Workload> = vec![
        (
            "sample_ball lp:2:3 eta=0.02",
            Box::new(|| {
                sample_ball(&l2_3, &Ball::new(Point::origin(3), 1.0)?, 0.02)?;
                Ok(())
            }),
        ),
        (
            "metric_midpoint lp:1:3 eta=d/200",
            Box::new(|| {
                let d = l1_3.dist(&x0, &x1);
                metric_midpoint(&x0, &x1, &l1_3, d / 200.0, d / 100.0)?;
                Ok(())
            }),
        ),
        (
            "extend_ball_isometry lp:2:2 eta=r/50",
            Box::new(|| {
                extend_ball_isometry(&oracle, &unit, &l2, 0.02, DEFAULT_TAU)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                Ok(())
            }),
        ),
        (
            "stitch lp:2:2 positive atlas eta=0.05",
            Box::new(|| {
                isoatlas_core::stitch(&atlas, 0.05, DEFAULT_TAU);
                Ok(())
            }),
        ),
    ];
    let mut records = Vec::new();
    for (workload, f) in &workloads {
        let mut times = Vec::with_capacity(reps);
        for _ in 0..reps {
            let t = Instant::now();
            f()?;
            times.push(t.elapsed().as_secs_f64());
        }
        times.sort_by(f64::total_cmp);
        let median_seconds = times[times.len() / 2];
        println!("{workload:<40} {median_seconds:>10.4} s");
        records.push(BenchRecord {
            workload,
            reps,
            median_seconds,
        });
    }
    write_json(&records, create(out, "bench.json")?)?;
    Ok(Exit::Success)
}

pub fn suite(a: SuiteArgs, cfg: RunConfig, out: &Path) -> Result<Exit, CliError> {
    let seed = a.seed.or(cfg.seed).unwrap_or(42);
    let report = run_suite(seed);
    let table = report.table();
    fs::create_dir_all(out)?;
    fs::write(out.join("suite_table.txt"), &table)?;
    write_json(&report, create(out, "suite_report.json")?)?;
    write_json(&report.coverage, create(out, "coverage_manifest.json")?)?;
    print!("{table}");
    Ok(if report.passed() { Exit::Success } else { Exit::StageFailure })
}
