use rayon::prelude::*;

use super::PointMap;
use crate::error::{check_dim, Result};
use crate::space::{NormDescriptor, PointCloud};

/// Largest pairwise distance error and the pair attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectWitness {
    pub defect: f64,
    /// Indices into the measured cloud; `None` for clouds with fewer than two points.
    pub pair: Option<(usize, usize)>,
}

pub(crate) fn images<M: PointMap + ?Sized>(m: &M, cloud: &PointCloud) -> Result<Vec<f64>> {
    check_dim(m.dim(), cloud.dim())?;
    let per_point: Vec<Vec<f64>> = cloud
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|x| m.map_point(x))
        .collect::<Result<_>>()?;
    Ok(per_point.concat())
}

/// `max |d(m(x), m(x')) − d(x, x')|` over all pairs of the cloud, with the
/// lexicographically first pair attaining it.
pub fn isometry_defect_witness<M: PointMap + ?Sized>(
    m: &M,
    cloud: &PointCloud,
    norm: &NormDescriptor,
) -> Result<DefectWitness> {
    check_dim(norm.dim(), cloud.dim())?;
    let img = images(m, cloud)?;
    let dim = cloud.dim();
    let n = cloud.len();
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let (x, fx) = (cloud.point(i), &img[i * dim..(i + 1) * dim]);
            let mut row: Option<(f64, usize, usize)> = None;
            for j in i + 1..n {
                let e = (norm.dist(fx, &img[j * dim..(j + 1) * dim]) - norm.dist(x, cloud.point(j))).abs();
                match row {
                    Some((b, _, _)) if e <= b => {}
                    _ => row = Some((e, i, j)),
                }
            }
            row
        })
        .reduce(|| None, pick);
    Ok(match best {
        Some((defect, i, j)) => DefectWitness {
            defect,
            pair: Some((i, j)),
        },
        None => DefectWitness { defect: 0.0, pair: None },
    })
}

fn pick(a: Option<(f64, usize, usize)>, b: Option<(f64, usize, usize)>) -> Option<(f64, usize, usize)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if y.0 > x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

/// Isometry defect of `m` on `cloud`; see [`isometry_defect_witness`].
pub fn isometry_defect<M: PointMap + ?Sized>(m: &M, cloud: &PointCloud, norm: &NormDescriptor) -> Result<f64> {
    Ok(isometry_defect_witness(m, cloud, norm)?.defect)
}

/// `max ‖f(x) − g(x)‖` over the cloud and the first index attaining it.
pub fn max_deviation<F: PointMap + ?Sized, G: PointMap + ?Sized>(
    f: &F,
    g: &G,
    cloud: &PointCloud,
    norm: &NormDescriptor,
) -> Result<(f64, Option<usize>)> {
    let a = images(f, cloud)?;
    let b = images(g, cloud)?;
    let dim = cloud.dim();
    let mut best = (0.0, None);
    for i in 0..cloud.len() {
        let e = norm.dist(&a[i * dim..(i + 1) * dim], &b[i * dim..(i + 1) * dim]);
        if best.1.is_none() || e > best.0 {
            best = (e, Some(i));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::AffineMap;
    use crate::space::{sample_ball, Ball, Point};

    #[test]
    fn documented_defects() {
        let l2 = NormDescriptor::euclidean(2).unwrap();
        let c = PointCloud::from_points(&[Point::from([0.0, 0.0]), Point::from([1.0, 0.0])], 0.1).unwrap();
        let double = AffineMap::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]], &[0.0, 0.0]).unwrap();
        let w = isometry_defect_witness(&double, &c, &l2).unwrap();
        assert_eq!(w.defect, 1.0);
        assert_eq!(w.pair, Some((0, 1)));
        assert_eq!(isometry_defect(&AffineMap::identity(2), &c, &l2).unwrap(), 0.0);

        let ball = Ball::new(Point::from([0.3, -0.4]), 1.0).unwrap();
        for n in [NormDescriptor::l1(2).unwrap(), NormDescriptor::max_norm(2).unwrap()] {
            let cloud = sample_ball(&n, &ball, 0.25).unwrap();
            let p = AffineMap::signed_permutation(&[1, 0], &[1.0, -1.0]).unwrap();
            assert!(isometry_defect(&p, &cloud, &n).unwrap() <= 1e-12);
        }
    }
}
