//! Patch atlases for locally isometric maps: cover check, cover graph, seed
//! selection and breadth-first stitching into a global verdict.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::extension::{
    extend_ball_isometry_with, interior_witness, ExtensionOptions, Stage, DEFAULT_CERTIFY_FACTOR,
    DEFAULT_PAIR_BUDGET,
};
use crate::maps::{AffineMap, Domain, MapOracle, PointMap};
use crate::space::{sample_ball, Ball, NormDescriptor, Point, PointCloud, ProximityIndex};

/// Cap on the uncovered samples listed in a [`CoverReport`].
const MAX_LISTED_UNCOVERED: usize = 32;

/// Disagreement points tried as the first member of a witness pair.
const WITNESS_PROBES: usize = 64;

/// A ball with the map it carries.
#[derive(Clone, Debug)]
pub struct Patch {
    pub center: Point,
    pub radius: f64,
    /// The patch map with domain `B(center, radius)`.
    pub map: MapOracle,
}

impl Patch {
    pub fn new(center: Point, radius: f64, rule: Arc<dyn PointMap>, norm: &NormDescriptor) -> Result<Self> {
        let ball = Ball::new(center.clone(), radius)?;
        let map = MapOracle::new(rule, Domain::Ball(ball), norm.clone())?;
        Ok(Self { center, radius, map })
    }

    pub fn ball(&self) -> Ball {
        Ball::new(self.center.clone(), self.radius).expect("patch radius validated at construction")
    }
}

/// Finite family of patches over a bounded region.
///
/// As a [`PointMap`] the atlas evaluates `x` with the containing patch whose
/// center is nearest (lowest index on ties).
#[derive(Clone, Debug)]
pub struct PatchAtlas {
    norm: NormDescriptor,
    region: Ball,
    patches: Vec<Patch>,
}

impl PatchAtlas {
    pub fn new(norm: NormDescriptor, region: Ball, patches: Vec<Patch>) -> Result<Self> {
        if patches.is_empty() {
            return Err(Error::InvalidParameter("atlas needs at least one patch".into()));
        }
        check_dim(norm.dim(), region.dim())?;
        for p in &patches {
            check_dim(norm.dim(), p.center.dim())?;
        }
        Ok(Self { norm, region, patches })
    }

    pub fn norm(&self) -> &NormDescriptor {
        &self.norm
    }

    pub fn region(&self) -> &Ball {
        &self.region
    }

    pub fn patches(&self) -> &[Patch] {
        &self.patches
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    /// Index of the patch that evaluates `x`, if any contains it.
    pub fn owner(&self, x: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, p) in self.patches.iter().enumerate() {
            let d = self.norm.dist(x, &p.center);
            if !p.map.in_domain(x) {
                continue;
            }
            match best {
                Some((_, b)) if b <= d => {}
                _ => best = Some((i, d)),
            }
        }
        best.map(|(i, _)| i)
    }

    pub fn eval(&self, x: &[f64]) -> Result<Point> {
        self.map_point(x).map(Point::from)
    }
}

impl PointMap for PatchAtlas {
    fn dim(&self) -> usize {
        self.norm.dim()
    }

    fn map_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        match self.owner(x) {
            Some(i) => self.patches[i].map.map_point(x),
            None => Err(Error::OutOfDomain { point: x.to_vec() }),
        }
    }

    fn describe(&self) -> String {
        format!("atlas({} patches)", self.patches.len())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverReport {
    pub covered: bool,
    /// First few region samples outside every patch core.
    pub uncovered: Vec<Point>,
    pub uncovered_count: usize,
    pub samples: usize,
}

/// Whether every η-sample of the region lies in some open patch core
/// `{x : ‖x − c‖ < r − η}`.
pub fn cover_check(atlas: &PatchAtlas, eta: f64) -> Result<CoverReport> {
    let min_r = atlas.patches.iter().map(|p| p.radius).fold(f64::INFINITY, f64::min);
    if !(eta < min_r) {
        return Err(Error::InvalidParameter(format!(
            "resolution {eta} must be below the smallest patch radius {min_r}"
        )));
    }
    let n = &atlas.norm;
    let cloud = sample_ball(n, &atlas.region, eta)?;
    let mut uncovered = Vec::new();
    let mut count = 0;
    for x in cloud.iter() {
        let inside = atlas
            .patches
            .iter()
            .any(|p| n.dist(x, &p.center) < p.radius - eta);
        if !inside {
            count += 1;
            if uncovered.len() < MAX_LISTED_UNCOVERED {
                uncovered.push(Point::from(x));
            }
        }
    }
    Ok(CoverReport {
        covered: count == 0,
        uncovered,
        uncovered_count: count,
        samples: cloud.len(),
    })
}

/// Undirected overlap graph of the patches.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverGraph {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(skip)]
    adjacency: Vec<Vec<usize>>,
}

impl CoverGraph {
    /// Neighbors in increasing index order.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Breadth-first order from `start`, neighbors visited by index.
    pub fn bfs_order(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.nodes];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for &j in &self.adjacency[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        order
    }

    pub fn is_connected(&self) -> bool {
        self.nodes == 0 || self.bfs_order(0).len() == self.nodes
    }
}

/// Edge `(i, j)` iff `d(c_i, c_j) < r_i + r_j − 2η`.
pub fn build_cover_graph(atlas: &PatchAtlas, eta: f64) -> CoverGraph {
    let n = atlas.patches.len();
    let mut edges = Vec::new();
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&atlas.patches[i], &atlas.patches[j]);
            if atlas.norm.dist(&a.center, &b.center) < a.radius + b.radius - 2.0 * eta {
                edges.push((i, j));
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    CoverGraph { nodes: n, edges, adjacency }
}

/// Patch indices by decreasing radius, lowest index first among equals.
pub fn seed_candidates(atlas: &PatchAtlas) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..atlas.patches.len()).collect();
    idx.sort_by(|&a, &b| atlas.patches[b].radius.total_cmp(&atlas.patches[a].radius).then(a.cmp(&b)));
    idx
}

/// The largest patch whose map passes the interior-witness check, trying
/// smaller patches only when larger ones fail.
pub fn select_seed(atlas: &PatchAtlas, eta: f64, tau: f64) -> Result<usize> {
    let mut last = None;
    for i in seed_candidates(atlas) {
        let p = &atlas.patches[i];
        match interior_witness(&p.map, &p.ball(), &atlas.norm, eta, tau) {
            Ok(_) => return Ok(i),
            Err(e) => last = Some(e),
        }
    }
    Err(Error::Precondition(format!(
        "no patch passes the interior-witness check ({})",
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub g: AffineMap,
    pub per_patch_residuals: Vec<f64>,
    pub seed: usize,
    /// Fraction of the image region reached by patch images, when measured.
    pub coverage: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Refutation {
    pub x: Point,
    pub x_prime: Point,
    pub defect: f64,
    /// Patch whose disagreement triggered the search.
    pub patch: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UndeterminedReason {
    CoverGap,
    Disconnected,
    SurjectivityGap,
    NoSeed,
    ExtensionFailed { stage: Stage },
    WitnessNotFound,
    MapError,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Undetermined {
    pub reason: UndeterminedReason,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Certificate(Certificate),
    Refutation(Refutation),
    Undetermined(Undetermined),
}

impl Verdict {
    fn undetermined(reason: UndeterminedReason, detail: impl Into<String>) -> Self {
        Verdict::Undetermined(Undetermined {
            reason,
            detail: detail.into(),
        })
    }

    pub fn is_certificate(&self) -> bool {
        matches!(self, Verdict::Certificate(_))
    }

    pub fn is_refutation(&self) -> bool {
        matches!(self, Verdict::Refutation(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StitchOptions {
    pub certify_factor: f64,
    /// Use this patch as seed instead of [`select_seed`].
    pub seed_patch: Option<usize>,
    /// Demand at least this surjectivity coverage for a certificate.
    pub min_coverage: Option<f64>,
    pub pair_budget: usize,
}

impl Default for StitchOptions {
    fn default() -> Self {
        Self {
            certify_factor: DEFAULT_CERTIFY_FACTOR,
            seed_patch: None,
            min_coverage: None,
            pair_budget: DEFAULT_PAIR_BUDGET,
        }
    }
}

/// See [`stitch_with`].
pub fn stitch(atlas: &PatchAtlas, eta: f64, tau: f64) -> Verdict {
    stitch_with(atlas, eta, tau, &StitchOptions::default())
}

/// Cover check, seed extension, then breadth-first acceptance of patches whose
/// map agrees with the seed's global extension `g` within `10τ`.
pub fn stitch_with(atlas: &PatchAtlas, eta: f64, tau: f64, opts: &StitchOptions) -> Verdict {
    use UndeterminedReason as R;
    let norm = &atlas.norm;
    let cover = match cover_check(atlas, eta) {
        Ok(c) => c,
        Err(e) => return Verdict::undetermined(R::CoverGap, e.to_string()),
    };
    if !cover.covered {
        return Verdict::undetermined(
            R::CoverGap,
            format!("{} of {} region samples uncovered", cover.uncovered_count, cover.samples),
        );
    }
    let seed = match opts.seed_patch {
        Some(s) if s < atlas.len() => s,
        Some(s) => return Verdict::undetermined(R::NoSeed, format!("seed patch {s} does not exist")),
        None => match select_seed(atlas, eta, tau) {
            Ok(s) => s,
            Err(e) => return Verdict::undetermined(R::NoSeed, e.to_string()),
        },
    };
    let graph = build_cover_graph(atlas, eta);
    let order = graph.bfs_order(seed);
    if order.len() < atlas.len() {
        return Verdict::undetermined(
            R::Disconnected,
            format!("{} of {} patches unreachable from seed {seed}", atlas.len() - order.len(), atlas.len()),
        );
    }

    let bound = opts.certify_factor * tau;
    let seed_patch = &atlas.patches[seed];
    let ext_opts = ExtensionOptions {
        certify_factor: opts.certify_factor,
        pair_budget: opts.pair_budget,
        ..ExtensionOptions::default()
    };
    let report = match extend_ball_isometry_with(&seed_patch.map, &seed_patch.ball(), norm, eta, tau, &ext_opts) {
        Ok(r) => r,
        Err(e) => return Verdict::undetermined(R::ExtensionFailed { stage: e.stage }, e.to_string()),
    };
    let g = report.g;

    let mut samples: Vec<Option<PointCloud>> = vec![None; atlas.len()];
    let mut residuals = vec![f64::NAN; atlas.len()];
    let mut accepted = vec![false; atlas.len()];
    for &i in &order {
        let patch = &atlas.patches[i];
        let cloud = match sample_ball(norm, &patch.ball(), eta) {
            Ok(c) => c,
            Err(e) => return Verdict::undetermined(R::MapError, e.to_string()),
        };
        let mut worst = 0.0f64;
        for x in cloud.iter() {
            let u = match patch.map.map_point(x) {
                Ok(u) => u,
                Err(e) => return Verdict::undetermined(R::MapError, e.to_string()),
            };
            worst = worst.max(norm.dist(&g.apply_unchecked(x), &u));
        }
        if worst <= bound {
            residuals[i] = worst;
            accepted[i] = true;
            samples[i] = Some(cloud);
            continue;
        }
        let territory: Vec<&PointCloud> = graph
            .neighbors(i)
            .iter()
            .filter(|&&j| accepted[j])
            .filter_map(|&j| samples[j].as_ref())
            .collect();
        let wider: Vec<&PointCloud> = samples.iter().flatten().collect();
        for pool in [territory, wider] {
            match witness_search(atlas, &g, &cloud, &pool, bound, opts.pair_budget) {
                Ok(Some((x, y, defect))) => {
                    return Verdict::Refutation(Refutation {
                        x,
                        x_prime: y,
                        defect,
                        patch: i,
                    })
                }
                Ok(None) => {}
                Err(e) => return Verdict::undetermined(R::MapError, e.to_string()),
            }
        }
        return Verdict::undetermined(
            R::WitnessNotFound,
            format!("patch {i} deviates from the seed extension by {worst:e} but no pair defect exceeds {bound:e}"),
        );
    }

    let mut coverage = None;
    if let Some(min) = opts.min_coverage {
        let target = g
            .apply(atlas.region.center())
            .and_then(|c| Ball::new(c, atlas.region.radius()));
        let frac = match target.and_then(|t| surjectivity_coverage(atlas, &t, eta)) {
            Ok(f) => f,
            Err(e) => return Verdict::undetermined(R::MapError, e.to_string()),
        };
        if frac < min {
            return Verdict::undetermined(
                R::SurjectivityGap,
                format!("patch images reach {frac:.4} of the image region, below {min}"),
            );
        }
        coverage = Some(frac);
    }

    Verdict::Certificate(Certificate {
        g,
        per_patch_residuals: residuals,
        seed,
        coverage,
    })
}

/// Pairs the points of `cloud` where the atlas map deviates most from `g`
/// with the pool and returns the pair of largest atlas distance defect, if it
/// exceeds `bound`.
fn witness_search(
    atlas: &PatchAtlas,
    g: &AffineMap,
    cloud: &PointCloud,
    pool: &[&PointCloud],
    bound: f64,
    budget: usize,
) -> Result<Option<(Point, Point, f64)>> {
    let norm = &atlas.norm;
    let deviation = cloud
        .iter()
        .map(|x| Ok(norm.dist(&atlas.map_point(x)?, &g.apply_unchecked(x))))
        .collect::<Result<Vec<f64>>>()?;
    let mut probes: Vec<usize> = (0..cloud.len()).collect();
    probes.sort_by(|&a, &b| deviation[b].total_cmp(&deviation[a]).then(a.cmp(&b)));
    probes.truncate(WITNESS_PROBES);

    let mut partners = cloud.subsample(budget).to_points();
    let share = (budget / pool.len().max(1)).max(1);
    for c in pool {
        partners.extend(c.subsample(share).to_points());
    }
    let images: Vec<Vec<f64>> = partners.iter().map(|y| atlas.map_point(y)).collect::<Result<_>>()?;

    let mut best: Option<(usize, usize, f64)> = None;
    for &i in &probes {
        let x = cloud.point(i);
        let ux = atlas.map_point(x)?;
        for (k, (y, uy)) in partners.iter().zip(&images).enumerate() {
            let e = (norm.dist(&ux, uy) - norm.dist(x, y)).abs();
            if e <= bound {
                continue;
            }
            match best {
                Some((_, _, b)) if b >= e => {}
                _ => best = Some((i, k, e)),
            }
        }
    }
    Ok(best.map(|(i, k, e)| (Point::from(cloud.point(i)), partners[k].clone(), e)))
}

/// Fraction of η-samples of `target` within η of the image of some patch's
/// η-sampled ball.
pub fn surjectivity_coverage(atlas: &PatchAtlas, target: &Ball, eta: f64) -> Result<f64> {
    let norm = &atlas.norm;
    let targets = sample_ball(norm, target, eta)?;
    let mut images = PointCloud::new(norm.dim(), eta)?;
    for p in &atlas.patches {
        let src = sample_ball(norm, &p.ball(), eta)?;
        for x in src.iter() {
            images.push(&p.map.map_point(x)?)?;
        }
    }
    let reach = eta * (1.0 + 1e-9);
    let index = ProximityIndex::new(&images, reach * norm.box_bound());
    let hit = targets.iter().filter(|t| index.any_within(t, reach, norm)).count();
    Ok(hit as f64 / targets.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_atlas(norm: &NormDescriptor, map: Arc<dyn PointMap>, region_r: f64, spacing: f64, radius: f64) -> PatchAtlas {
        let region = Ball::new(Point::from([0.0, 0.0]), region_r).unwrap();
        let m = ((region_r + spacing) / spacing).ceil() as i64;
        let mut patches = Vec::new();
        for i in -m..=m {
            for j in -m..=m {
                let c = Point::from([i as f64 * spacing, j as f64 * spacing]);
                if norm.eval(&c) <= region_r + spacing {
                    patches.push(Patch::new(c, radius, map.clone(), norm).unwrap());
                }
            }
        }
        PatchAtlas::new(norm.clone(), region, patches).unwrap()
    }

    #[test]
    fn cover_examples() {
        let n = NormDescriptor::euclidean(2).unwrap();
        let id: Arc<dyn PointMap> = Arc::new(AffineMap::identity(2));
        let atlas = grid_atlas(&n, id.clone(), 2.0, 0.5, 0.6);
        assert!(cover_check(&atlas, 0.05).unwrap().covered);

        let region = Ball::new(Point::from([0.0, 0.0]), 2.0).unwrap();
        let tiny = PatchAtlas::new(
            n.clone(),
            region,
            vec![Patch::new(Point::from([0.0, 0.0]), 0.1, id.clone(), &n).unwrap()],
        )
        .unwrap();
        let rep = cover_check(&tiny, 0.05).unwrap();
        assert!(!rep.covered);
        assert!(!rep.uncovered.is_empty());

        let region = Ball::new(Point::from([0.0, 0.0]), 0.9).unwrap();
        let one = PatchAtlas::new(
            n.clone(),
            region,
            vec![Patch::new(Point::from([0.0, 0.0]), 1.0, id, &n).unwrap()],
        )
        .unwrap();
        assert!(cover_check(&one, 0.05).unwrap().covered);
    }

    #[test]
    fn graph_examples() {
        let n = NormDescriptor::euclidean(2).unwrap();
        let id: Arc<dyn PointMap> = Arc::new(AffineMap::identity(2));
        let region = Ball::new(Point::from([0.0, 0.0]), 1.0).unwrap();
        let far = PatchAtlas::new(
            n.clone(),
            region.clone(),
            vec![
                Patch::new(Point::from([0.0, 0.0]), 1.0, id.clone(), &n).unwrap(),
                Patch::new(Point::from([10.0, 0.0]), 1.0, id.clone(), &n).unwrap(),
            ],
        )
        .unwrap();
        assert!(build_cover_graph(&far, 0.05).edges.is_empty());
        let nested = PatchAtlas::new(
            n.clone(),
            region,
            vec![
                Patch::new(Point::from([0.0, 0.0]), 1.0, id.clone(), &n).unwrap(),
                Patch::new(Point::from([0.0, 0.0]), 0.5, id.clone(), &n).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(build_cover_graph(&nested, 0.05).edges, vec![(0, 1)]);

        let mut patches = Vec::new();
        for i in -1..=1 {
            for j in -1..=1 {
                patches.push(Patch::new(Point::from([i as f64 * 0.5, j as f64 * 0.5]), 0.6, id.clone(), &n).unwrap());
            }
        }
        let grid = PatchAtlas::new(n, Ball::new(Point::from([0.0, 0.0]), 0.5).unwrap(), patches).unwrap();
        assert!(build_cover_graph(&grid, 0.05).is_connected());
    }

    #[test]
    fn seed_prefers_first_largest() {
        let n = NormDescriptor::euclidean(2).unwrap();
        let id: Arc<dyn PointMap> = Arc::new(AffineMap::identity(2));
        let region = Ball::new(Point::from([0.0, 0.0]), 0.2).unwrap();
        let patches = [0.3, 0.9, 0.9]
            .iter()
            .map(|&r| Patch::new(Point::from([0.0, 0.0]), r, id.clone(), &n).unwrap())
            .collect();
        let atlas = PatchAtlas::new(n.clone(), region.clone(), patches).unwrap();
        assert_eq!(seed_candidates(&atlas)[0], 1);
        assert_eq!(select_seed(&atlas, 0.05, 1e-9).unwrap(), 1);

        let flat: Arc<dyn PointMap> = Arc::new(AffineMap::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]], &[0.0, 0.0]).unwrap());
        let collapsed = PatchAtlas::new(
            n.clone(),
            region,
            vec![Patch::new(Point::from([0.0, 0.0]), 0.5, flat, &n).unwrap()],
        )
        .unwrap();
        assert!(select_seed(&collapsed, 0.05, 1e-9).is_err());
    }

    #[test]
    fn stitch_certifies_a_global_signed_permutation() {
        let n = NormDescriptor::l1(2).unwrap();
        let g = AffineMap::signed_permutation(&[1, 0], &[1.0, -1.0])
            .unwrap()
            .compose(&AffineMap::translation_by(&[0.25, 0.5]))
            .unwrap();
        let mut patches = Vec::new();
        for i in -1..=1 {
            for j in -1..=1 {
                patches.push(
                    Patch::new(Point::from([i as f64 * 0.5, j as f64 * 0.5]), 0.6, Arc::new(g.clone()), &n).unwrap(),
                );
            }
        }
        let atlas = PatchAtlas::new(n, Ball::new(Point::from([0.0, 0.0]), 0.5).unwrap(), patches).unwrap();
        match stitch(&atlas, 0.05, 1e-9) {
            Verdict::Certificate(c) => {
                assert!(c.g.max_entry_diff(&g) <= 1e-9);
                assert!(c.per_patch_residuals.iter().all(|&r| r <= 1e-9));
            }
            v => panic!("expected certificate, got {v:?}"),
        }
    }

    #[test]
    fn stitch_refutes_a_reflected_half() {
        let n = NormDescriptor::euclidean(2).unwrap();
        let left: Arc<dyn PointMap> = Arc::new(AffineMap::identity(2));
        let right: Arc<dyn PointMap> = Arc::new(
            AffineMap::translation_by(&[0.0, 0.5])
                .compose(&AffineMap::reflection(2, 0, 0.0).unwrap())
                .unwrap(),
        );
        let mut patches = Vec::new();
        for i in -2..=2 {
            for j in -2..=2 {
                let c = Point::from([i as f64 * 0.5, j as f64 * 0.5]);
                let m = if c[0] < 0.0 { left.clone() } else { right.clone() };
                patches.push(Patch::new(c, 0.6, m, &n).unwrap());
            }
        }
        let atlas = PatchAtlas::new(n.clone(), Ball::new(Point::from([0.0, 0.0]), 1.0).unwrap(), patches).unwrap();
        match stitch(&atlas, 0.05, 1e-9) {
            Verdict::Refutation(r) => {
                let (ux, uy) = (atlas.eval(&r.x).unwrap(), atlas.eval(&r.x_prime).unwrap());
                let defect = (n.dist(&ux, &uy) - n.dist(&r.x, &r.x_prime)).abs();
                assert!(defect > 1e-8);
                assert_eq!(defect, r.defect);
            }
            v => panic!("expected refutation, got {v:?}"),
        }
    }

    #[test]
    fn stitch_reports_disconnected_clusters() {
        let n = NormDescriptor::euclidean(2).unwrap();
        let id: Arc<dyn PointMap> = Arc::new(AffineMap::identity(2));
        let atlas = PatchAtlas::new(
            n.clone(),
            Ball::new(Point::from([0.0, 0.0]), 0.5).unwrap(),
            vec![
                Patch::new(Point::from([0.0, 0.0]), 1.0, id.clone(), &n).unwrap(),
                Patch::new(Point::from([5.0, 0.0]), 0.5, id, &n).unwrap(),
            ],
        )
        .unwrap();
        match stitch(&atlas, 0.05, 1e-9) {
            Verdict::Undetermined(u) => assert_eq!(u.reason, UndeterminedReason::Disconnected),
            v => panic!("expected undetermined, got {v:?}"),
        }
    }

    #[test]
    fn coverage_examples() {
        let n = NormDescriptor::euclidean(2).unwrap();
        let g: Arc<dyn PointMap> = Arc::new(AffineMap::rotation_2d(0.3));
        let atlas = grid_atlas(&n, g, 1.0, 0.5, 0.6);
        let full = surjectivity_coverage(&atlas, &Ball::new(Point::from([0.0, 0.0]), 1.0).unwrap(), 0.05).unwrap();
        assert!(full >= 0.99, "{full}");
        let away = surjectivity_coverage(&atlas, &Ball::new(Point::from([20.0, 0.0]), 1.0).unwrap(), 0.05).unwrap();
        assert_eq!(away, 0.0);
        let id: Arc<dyn PointMap> = Arc::new(AffineMap::identity(2));
        let tiny = PatchAtlas::new(
            n.clone(),
            Ball::new(Point::from([0.0, 0.0]), 0.05).unwrap(),
            vec![Patch::new(Point::from([0.0, 0.0]), 0.1, id, &n).unwrap()],
        )
        .unwrap();
        let small = surjectivity_coverage(&tiny, &Ball::new(Point::from([0.0, 0.0]), 2.0).unwrap(), 0.05).unwrap();
        assert!(small < 0.01, "{small}");
    }
}
