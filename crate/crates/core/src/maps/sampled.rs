use std::collections::HashMap;
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};

use super::{AffineMap, PointMap};
use crate::error::{check_dim, Error, Result};
use crate::space::Point;

/// Lookup tolerance (max-abs per coordinate) for sources not matched bitwise.
const LOOKUP_TOL: f64 = 1e-9;

/// Relative singular-value cutoff below which sources count as dependent.
const RANK_TOL: f64 = 1e-10;

/// Finite list of `(source, image)` pairs with distinct sources.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledMap {
    dim: usize,
    pairs: Vec<(Point, Point)>,
    exact: HashMap<Vec<u64>, usize>,
}

fn bits(p: &[f64]) -> Vec<u64> {
    // +0.0 and -0.0 are the same source.
    p.iter().map(|c| (c + 0.0).to_bits()).collect()
}

impl SampledMap {
    pub fn new(pairs: Vec<(Point, Point)>) -> Result<Self> {
        let dim = pairs.first().map(|(s, _)| s.dim()).ok_or(Error::EmptyCloud)?;
        let mut exact = HashMap::with_capacity(pairs.len());
        for (i, (s, t)) in pairs.iter().enumerate() {
            check_dim(dim, s.dim())?;
            check_dim(dim, t.dim())?;
            if exact.insert(bits(s), i).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate source {s}")));
            }
        }
        Ok(Self { dim, pairs, exact })
    }

    /// Tabulates `m` on the given sources.
    pub fn tabulate<M: PointMap + ?Sized>(m: &M, sources: impl IntoIterator<Item = Point>) -> Result<Self> {
        let pairs = sources
            .into_iter()
            .map(|s| {
                let t = m.map_point(&s)?;
                Ok((s, Point::from(t)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(pairs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pairs(&self) -> &[(Point, Point)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Image of a stored source (bitwise, else within 1e-9 per coordinate).
    pub fn lookup(&self, x: &[f64]) -> Option<&Point> {
        if let Some(&i) = self.exact.get(&bits(x)) {
            return Some(&self.pairs[i].1);
        }
        self.pairs
            .iter()
            .find(|(s, _)| s.max_abs_diff(x) <= LOOKUP_TOL)
            .map(|(_, t)| t)
    }

    /// CSV with header `src_0..src_{n-1},img_0..img_{n-1}`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let header: Vec<String> = (0..self.dim)
            .map(|i| format!("src_{i}"))
            .chain((0..self.dim).map(|i| format!("img_{i}")))
            .collect();
        out.write_record(&header)?;
        for (s, t) in &self.pairs {
            out.write_record(s.iter().chain(t.iter()).map(|v| format!("{v:e}")))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let width = rd.headers()?.len();
        if width == 0 || width % 2 != 0 {
            return Err(Error::Parse(format!("expected an even number of columns, got {width}")));
        }
        let dim = width / 2;
        let mut pairs = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let vals = rec
                .iter()
                .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad value {t:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            pairs.push((Point::new(vals[..dim].to_vec())?, Point::new(vals[dim..].to_vec())?));
        }
        Self::new(pairs)
    }
}

impl PointMap for SampledMap {
    fn dim(&self) -> usize {
        self.dim
    }

    fn map_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        self.lookup(x)
            .map(|p| p.coords().to_vec())
            .ok_or_else(|| Error::OutOfDomain { point: x.to_vec() })
    }

    fn describe(&self) -> String {
        format!("sampled({} pairs)", self.pairs.len())
    }
}

/// Least-squares affine map through the pairs, via centered normal equations
/// solved with fully pivoted LU.
pub fn fit_affine(pairs: &SampledMap) -> Result<AffineMap> {
    let n = pairs.dim();
    let m = pairs.len();
    let inv_m = 1.0 / m as f64;
    let mut xbar = DVector::<f64>::zeros(n);
    let mut ybar = DVector::<f64>::zeros(n);
    for (s, t) in pairs.pairs() {
        xbar += DVector::from_column_slice(s);
        ybar += DVector::from_column_slice(t);
    }
    xbar *= inv_m;
    ybar *= inv_m;
    let xs = DMatrix::from_fn(m, n, |i, j| pairs.pairs()[i].0[j] - xbar[j]);
    let ys = DMatrix::from_fn(m, n, |i, j| pairs.pairs()[i].1[j] - ybar[j]);

    let sv = xs.clone().singular_values();
    let top = sv.max();
    let rank = sv.iter().filter(|&&s| s > RANK_TOL * top).count();
    if m < n + 1 || top == 0.0 || rank < n {
        return Err(Error::RankDeficient { rank, dim: n });
    }
    // (XᵀX) Aᵀ = XᵀY
    let gram = xs.transpose() * &xs;
    let rhs = xs.transpose() * &ys;
    let at = gram.full_piv_lu().solve(&rhs).ok_or(Error::RankDeficient { rank, dim: n })?;
    let a = at.transpose();
    let b = &ybar - &a * &xbar;
    AffineMap::new(a, b)
}
