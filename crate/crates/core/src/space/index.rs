use std::collections::HashMap;

use super::cloud::PointCloud;
use super::norm::NormDescriptor;

/// Uniform hash grid over a point cloud for fixed-radius proximity queries.
#[derive(Debug)]
pub struct ProximityIndex<'a> {
    cloud: &'a PointCloud,
    cell: f64,
    cells: HashMap<Vec<i64>, Vec<u32>>,
}

impl<'a> ProximityIndex<'a> {
    /// `cell` is the edge of the hashing cubes; queries of any radius work,
    /// but radii near `cell / norm.box_bound()` are the cheapest.
    pub fn new(cloud: &'a PointCloud, cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite(), "cell size must be positive");
        let mut cells: HashMap<Vec<i64>, Vec<u32>> = HashMap::new();
        for (i, p) in cloud.iter().enumerate() {
            cells.entry(cell_of(p, cell)).or_default().push(i as u32);
        }
        Self { cloud, cell, cells }
    }

    /// Nearest cloud point within `radius` of `q`, lowest index on ties.
    pub fn nearest_within(&self, q: &[f64], radius: f64, norm: &NormDescriptor) -> Option<(usize, f64)> {
        let reach = (radius * norm.box_bound() / self.cell).ceil().max(1.0) as i64;
        let base = cell_of(q, self.cell);
        let dim = base.len();
        let mut offset = vec![-reach; dim];
        let mut key = base.clone();
        let mut best: Option<(usize, f64)> = None;
        loop {
            for i in 0..dim {
                key[i] = base[i] + offset[i];
            }
            if let Some(members) = self.cells.get(&key) {
                for &m in members {
                    let m = m as usize;
                    let d = norm.dist(self.cloud.point(m), q);
                    if d <= radius {
                        best = match best {
                            Some((bi, bd)) if bd < d || (bd == d && bi < m) => Some((bi, bd)),
                            _ => Some((m, d)),
                        };
                    }
                }
            }
            if !advance(&mut offset, reach) {
                break;
            }
        }
        best
    }

    pub fn any_within(&self, q: &[f64], radius: f64, norm: &NormDescriptor) -> bool {
        self.nearest_within(q, radius, norm).is_some()
    }
}

fn cell_of(p: &[f64], cell: f64) -> Vec<i64> {
    p.iter().map(|c| (c / cell).floor() as i64).collect()
}

fn advance(offset: &mut [i64], reach: i64) -> bool {
    for o in offset.iter_mut() {
        if *o < reach {
            *o += 1;
            return true;
        }
        *o = -reach;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Point;

    #[test]
    fn agrees_with_linear_scan() {
        let n = NormDescriptor::lp(3.0, 2).unwrap();
        let pts: Vec<Point> = (0..200)
            .map(|k| {
                let t = k as f64 * 0.731;
                Point::from([t.sin() * 3.0, (1.7 * t).cos() * 2.0])
            })
            .collect();
        let cloud = PointCloud::from_points(&pts, 0.1).unwrap();
        let idx = ProximityIndex::new(&cloud, 0.25);
        for k in 0..50 {
            let q = [k as f64 * 0.11 - 2.5, 1.0 - k as f64 * 0.05];
            for r in [0.05, 0.3, 1.2] {
                let brute = cloud
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (i, n.dist(p, &q)))
                    .filter(|&(_, d)| d <= r)
                    .fold(None, |b: Option<(usize, f64)>, (i, d)| match b {
                        Some((_, bd)) if bd <= d => b,
                        _ => Some((i, d)),
                    });
                assert_eq!(idx.nearest_within(&q, r, &n), brute);
            }
        }
    }
}
