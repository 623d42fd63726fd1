use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;

use super::norm::NormDescriptor;
use super::point::Point;
use crate::error::{check_dim, Error, Result};

/// Finite sample of a region with resolution `eta`: every point of the
/// intended region lies within `eta` (in the active norm) of some cloud point.
///
/// Points are stored contiguously; `point(i)` borrows the `i`-th one.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    eta: f64,
}

impl PointCloud {
    pub fn new(dim: usize, eta: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("cloud dimension must be positive".into()));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("resolution must be positive, got {eta}")));
        }
        Ok(Self {
            dim,
            coords: Vec::new(),
            eta,
        })
    }

    pub fn from_points(points: &[Point], eta: f64) -> Result<Self> {
        let dim = points.first().map(Point::dim).ok_or(Error::EmptyCloud)?;
        let mut cloud = Self::new(dim, eta)?;
        for p in points {
            cloud.push(p)?;
        }
        Ok(cloud)
    }

    pub(crate) fn from_raw(dim: usize, coords: Vec<f64>, eta: f64) -> Self {
        debug_assert_eq!(coords.len() % dim, 0);
        Self { dim, coords, eta }
    }

    pub fn singleton(p: &Point, eta: f64) -> Result<Self> {
        Self::from_points(std::slice::from_ref(p), eta)
    }

    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        check_dim(self.dim, p.len())?;
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite cloud point".into()));
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn to_points(&self) -> Vec<Point> {
        self.iter().map(Point::from).collect()
    }

    pub fn raw(&self) -> &[f64] {
        &self.coords
    }

    /// Sub-cloud of the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Self::from_raw(self.dim, coords, self.eta)
    }

    pub fn filter(&self, mut keep: impl FnMut(&[f64]) -> bool) -> PointCloud {
        let mut coords = Vec::new();
        for p in self.iter() {
            if keep(p) {
                coords.extend_from_slice(p);
            }
        }
        Self::from_raw(self.dim, coords, self.eta)
    }

    /// Every point shifted by `t`.
    pub fn translated(&self, t: &[f64]) -> PointCloud {
        debug_assert_eq!(t.len(), self.dim);
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(k, c)| c + t[k % self.dim])
            .collect();
        Self::from_raw(self.dim, coords, self.eta)
    }

    /// Points sorted lexicographically by coordinates.
    pub fn sorted(&self) -> PointCloud {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| lex_cmp(self.point(a), self.point(b)));
        self.select(&idx)
    }

    pub fn contains_exact(&self, p: &[f64]) -> bool {
        self.iter().any(|q| q == p)
    }

    /// Index and distance of the cloud point nearest to `q` (lowest index on ties).
    pub fn nearest(&self, q: &[f64], norm: &NormDescriptor) -> Option<(usize, f64)> {
        self.iter()
            .map(|p| norm.dist(p, q))
            .enumerate()
            .fold(None, |best, (i, d)| match best {
                Some((_, bd)) if bd <= d => best,
                _ => Some((i, d)),
            })
    }

    /// Deterministic stride subsample with at most `budget` points.
    pub fn subsample(&self, budget: usize) -> PointCloud {
        let n = self.len();
        if n <= budget || budget == 0 {
            return self.clone();
        }
        let idx: Vec<usize> = (0..budget).map(|k| k * n / budget).collect();
        self.select(&idx)
    }
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Indices of a superset of the extreme points of `conv(cloud)`.
///
/// A point strictly between two cloud points on an axis-parallel line is not
/// extreme, so only points that end their axis row in every coordinate
/// direction survive. Rows are found by exact equality of the remaining
/// coordinates, which is how lattice samples line up; for unstructured clouds
/// every point survives.
pub fn hull_candidates(cloud: &PointCloud) -> Vec<usize> {
    let n = cloud.len();
    let dim = cloud.dim();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut interior = vec![false; n];
    let mut key: Vec<u64> = Vec::with_capacity(dim.saturating_sub(1));
    for axis in 0..dim {
        // Row key -> (argmin, argmax) along `axis`.
        let mut rows: HashMap<Vec<u64>, (usize, usize)> = HashMap::new();
        for (i, p) in cloud.iter().enumerate() {
            key.clear();
            key.extend(
                p.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != axis)
                    .map(|(_, c)| c.to_bits()),
            );
            match rows.get_mut(key.as_slice()) {
                Some((lo, hi)) => {
                    if p[axis] < cloud.point(*lo)[axis] {
                        *lo = i;
                    }
                    if p[axis] > cloud.point(*hi)[axis] {
                        *hi = i;
                    }
                }
                None => {
                    rows.insert(key.clone(), (i, i));
                }
            }
        }
        for (i, p) in cloud.iter().enumerate() {
            key.clear();
            key.extend(
                p.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != axis)
                    .map(|(_, c)| c.to_bits()),
            );
            let (lo, hi) = rows[key.as_slice()];
            let (a, b) = (cloud.point(lo)[axis], cloud.point(hi)[axis]);
            if a < p[axis] && p[axis] < b {
                interior[i] = true;
            }
        }
    }
    (0..n).filter(|&i| !interior[i]).collect()
}

/// Support normals are used when there are fewer of them than this many
/// hull candidates.
const MAX_SUPPORT_NORMALS: usize = 4096;

/// `max_{x' ∈ C} ‖x − x'‖` for every `x ∈ C`, exactly.
///
/// The maximum of the convex function `x' ↦ ‖x − x'‖` over `C` is attained at
/// an extreme point of `conv(C)`, so only [`hull_candidates`] are scanned.
/// For polyhedral balls `‖x − x'‖ = max_j ⟨a_j, x − x'⟩`, and the maximum over
/// `x'` is `max_j (⟨a_j, x⟩ − min_{x'} ⟨a_j, x'⟩)`.
pub fn farthest_distances(cloud: &PointCloud, norm: &NormDescriptor) -> Vec<f64> {
    let cand = cloud.select(&hull_candidates(cloud));
    if let Some(normals) = support_route(norm, cand.len()) {
        let low = lower_support(&cand, &normals);
        return (0..cloud.len())
            .into_par_iter()
            .with_min_len(1024)
            .map(|i| {
                let x = cloud.point(i);
                normals
                    .iter()
                    .zip(&low)
                    .map(|(a, m)| dot(a, x) - m)
                    .fold(0.0, f64::max)
            })
            .collect();
    }
    (0..cloud.len())
        .into_par_iter()
        .with_min_len(256)
        .map(|i| {
            let x = cloud.point(i);
            cand.iter().map(|e| norm.dist(x, e)).fold(0.0, f64::max)
        })
        .collect()
}

fn support_route(norm: &NormDescriptor, candidates: usize) -> Option<Vec<Vec<f64>>> {
    norm.support_normals(MAX_SUPPORT_NORMALS)
        .filter(|normals| normals.len() < candidates)
}

fn dot(a: &[f64], x: &[f64]) -> f64 {
    a.iter().zip(x).map(|(u, v)| u * v).sum()
}

/// `min_{x ∈ C} ⟨a_j, x⟩` for every normal.
fn lower_support(cloud: &PointCloud, normals: &[Vec<f64>]) -> Vec<f64> {
    normals
        .iter()
        .map(|a| cloud.iter().map(|x| dot(a, x)).fold(f64::INFINITY, f64::min))
        .collect()
}

/// `δ(C) = max ‖x − x'‖` over all pairs of the cloud.
pub fn set_diameter(cloud: &PointCloud, norm: &NormDescriptor) -> Result<f64> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    check_dim(norm.dim(), cloud.dim())?;
    let cand = cloud.select(&hull_candidates(cloud));
    if let Some(normals) = support_route(norm, cand.len()) {
        // max_j (max ⟨a_j, x⟩ − min ⟨a_j, x'⟩), with −a_j also a normal.
        let low = lower_support(&cand, &normals);
        let high: Vec<f64> = normals
            .iter()
            .map(|a| cand.iter().map(|x| dot(a, x)).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        return Ok(high.iter().zip(&low).map(|(h, l)| h - l).fold(0.0, f64::max));
    }
    Ok((0..cand.len())
        .into_par_iter()
        .map(|i| {
            let x = cand.point(i);
            cand.iter().skip(i + 1).map(|e| norm.dist(x, e)).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_diameter(c: &PointCloud, n: &NormDescriptor) -> f64 {
        let mut best = 0.0f64;
        for a in c.iter() {
            for b in c.iter() {
                best = best.max(n.dist(a, b));
            }
        }
        best
    }

    #[test]
    fn diameter_examples() {
        let linf = NormDescriptor::max_norm(2).unwrap();
        let l1 = NormDescriptor::l1(2).unwrap();
        let single = PointCloud::singleton(&Point::from([0.3, 0.1]), 0.1).unwrap();
        assert_eq!(set_diameter(&single, &linf).unwrap(), 0.0);

        let c = PointCloud::from_points(&[[1.0, -1.0].into(), [1.0, 1.0].into()], 0.1).unwrap();
        assert_eq!(set_diameter(&c, &linf).unwrap(), 2.0);

        let c = PointCloud::from_points(&[[0.0, 0.0].into(), [1.0, 0.0].into(), [0.0, 1.0].into()], 0.1)
            .unwrap();
        assert_eq!(set_diameter(&c, &l1).unwrap(), 2.0);
        assert_eq!(set_diameter(&c, &l1).unwrap(), brute_diameter(&c, &l1));
    }

    #[test]
    fn empty_cloud_has_no_diameter() {
        let c = PointCloud::new(2, 0.1).unwrap();
        assert!(matches!(
            set_diameter(&c, &NormDescriptor::euclidean(2).unwrap()),
            Err(Error::EmptyCloud)
        ));
    }

    #[test]
    fn candidates_drop_row_interiors() {
        let mut c = PointCloud::new(2, 1.0).unwrap();
        for i in -2..=2 {
            for j in -2..=2 {
                c.push(&[i as f64, j as f64]).unwrap();
            }
        }
        let cand = hull_candidates(&c);
        let pts: Vec<&[f64]> = cand.iter().map(|&i| c.point(i)).collect();
        assert_eq!(pts.len(), 4, "only the square's corners survive: {pts:?}");

        let n = NormDescriptor::lp(1.5, 2).unwrap();
        let far = farthest_distances(&c, &n);
        for (i, x) in c.iter().enumerate() {
            let brute = c.iter().map(|y| n.dist(x, y)).fold(0.0, f64::max);
            assert_eq!(far[i], brute);
        }
    }

    #[test]
    fn support_route_matches_pairwise_scan() {
        // Irregular cloud so that every point is a hull candidate.
        let mut c = PointCloud::new(3, 0.1).unwrap();
        for k in 0..400 {
            let t = k as f64;
            c.push(&[(t * 0.37).sin(), (t * 0.71).cos() * 0.8, (t * 1.13).sin() * 0.5]).unwrap();
        }
        let norms = [
            NormDescriptor::l1(3).unwrap(),
            NormDescriptor::max_norm(3).unwrap(),
            NormDescriptor::weighted_lp(1.0, vec![1.0, 2.0, 0.5]).unwrap(),
            NormDescriptor::hexagonal(3).unwrap(),
        ];
        for n in &norms {
            assert!(n.support_normals(4096).is_some());
            let far = farthest_distances(&c, n);
            for (i, x) in c.iter().enumerate() {
                let brute = c.iter().map(|y| n.dist(x, y)).fold(0.0, f64::max);
                assert!((far[i] - brute).abs() <= 1e-12, "{}: {} vs {brute}", n.label(), far[i]);
            }
            let d = set_diameter(&c, n).unwrap();
            assert!((d - brute_diameter(&c, n)).abs() <= 1e-12);
        }
    }
}
