//! Norm oracles on ℝⁿ: ℓp, weighted ℓp and polyhedral norms.
//!
//! A polyhedral norm is the Minkowski functional of `conv(V)` for a symmetric
//! vertex set `V`. Its value is the optimum of the linear program
//! `min Σλᵢ s.t. Σλᵢvᵢ = x, λ ≥ 0`; by duality this equals `max_j ⟨a_j, x⟩`
//! over the vertices `a_j` of the polar body `{a : ⟨a, v⟩ ≤ 1 ∀v ∈ V}`, i.e. the
//! facet normals of `conv(V)`. Those are enumerated once at construction, so
//! every evaluation is exact and allocation-free.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Absolute slack for floating membership comparisons.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Upper bound on the number of vertex subsets examined during facet enumeration.
const MAX_FACET_CANDIDATES: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum NormKind {
    /// `(Σ|xᵢ|^p)^{1/p}`; `p = ∞` is the max norm.
    Lp { p: f64 },
    /// `(Σ wᵢ|xᵢ|^p)^{1/p}`; for `p = ∞`, `max wᵢ|xᵢ|`.
    WeightedLp { p: f64, weights: Vec<f64> },
    /// Minkowski functional of the convex hull of a symmetric vertex set.
    Polyhedral { vertices: Vec<Vec<f64>> },
}

/// A norm on ℝ^dim. All geometry in the crate is parameterized by one of these.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormConfig", into = "NormConfig")]
pub struct NormDescriptor {
    kind: NormKind,
    dim: usize,
    // Facet normals of the polyhedral unit ball, stored as exact ± pairs.
    facets: Vec<Vec<f64>>,
}

impl NormDescriptor {
    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        check_exponent(p)?;
        if dim == 0 {
            return Err(Error::InvalidNorm("dimension must be positive".into()));
        }
        Ok(Self {
            kind: NormKind::Lp { p },
            dim,
            facets: Vec::new(),
        })
    }

    pub fn l1(dim: usize) -> Result<Self> {
        Self::lp(1.0, dim)
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::lp(2.0, dim)
    }

    pub fn max_norm(dim: usize) -> Result<Self> {
        Self::lp(f64::INFINITY, dim)
    }

    pub fn weighted_lp(p: f64, weights: Vec<f64>) -> Result<Self> {
        check_exponent(p)?;
        if weights.is_empty() {
            return Err(Error::InvalidNorm("weight vector is empty".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidNorm(format!("weights must be positive and finite, got {w}")));
        }
        Ok(Self {
            dim: weights.len(),
            kind: NormKind::WeightedLp { p, weights },
            facets: Vec::new(),
        })
    }

    /// Polyhedral norm whose unit ball is `conv(vertices)`.
    ///
    /// The vertex set must be symmetric (`V = −V`) and span ℝ^dim, which for a
    /// symmetric set is equivalent to `0` lying in the interior of the hull.
    pub fn polyhedral(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let dim = vertices
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidNorm("vertex set is empty".into()))?;
        if dim == 0 {
            return Err(Error::InvalidNorm("vertices must have positive dimension".into()));
        }
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::InvalidNorm(format!(
                    "vertex {v:?} has dimension {}, expected {dim}",
                    v.len()
                )));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidNorm(format!("vertex {v:?} is not finite")));
            }
        }
        for v in &vertices {
            let scale = 1.0 + v.iter().map(|c| c.abs()).fold(0.0, f64::max);
            let mirrored = vertices.iter().any(|u| {
                u.iter().zip(v).all(|(a, b)| (a + b).abs() <= MEMBERSHIP_TOL * scale)
            });
            if !mirrored {
                return Err(Error::InvalidNorm(format!("vertex set is not symmetric: −{v:?} missing")));
            }
        }
        let m = DMatrix::from_fn(vertices.len(), dim, |i, j| vertices[i][j]);
        let rank = m.rank(1e-10 * m.amax().max(1.0));
        if rank < dim {
            return Err(Error::InvalidNorm(format!(
                "vertices span a {rank}-dimensional subspace; 0 is not interior to their hull"
            )));
        }
        let facets = enumerate_facets(&vertices, dim)?;
        Ok(Self {
            kind: NormKind::Polyhedral { vertices },
            dim,
            facets,
        })
    }

    /// Symmetric polytope with vertices `±eᵢ` and `±(1, …, 1)`.
    ///
    /// In the plane this is the hexagon `{(±1,0), (0,±1), (1,1), (−1,−1)}`.
    pub fn hexagonal(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidNorm("hexagonal norm needs dimension ≥ 2".into()));
        }
        let mut vertices = Vec::with_capacity(2 * dim + 2);
        for i in 0..dim {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; dim];
                v[i] = s;
                vertices.push(v);
            }
        }
        vertices.push(vec![1.0; dim]);
        vertices.push(vec![-1.0; dim]);
        Self::polyhedral(vertices)
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Facet normals `a_j` with `‖x‖ = max_j ⟨a_j, x⟩` (polyhedral norms only).
    pub fn facets(&self) -> &[Vec<f64>] {
        &self.facets
    }

    /// Vectors `a_j`, closed under negation, with `‖x‖ = max_j ⟨a_j, x⟩`:
    /// the facet normals of a polyhedral unit ball. `None` for curved balls
    /// and for ℓ1-type norms whose `2^dim` facets would exceed `limit`.
    pub fn support_normals(&self, limit: usize) -> Option<Vec<Vec<f64>>> {
        let n = self.dim;
        let weights = match &self.kind {
            NormKind::Polyhedral { .. } => return Some(self.facets.clone()),
            NormKind::Lp { p } if *p == 1.0 || p.is_infinite() => vec![1.0; n],
            NormKind::WeightedLp { p, weights } if *p == 1.0 || p.is_infinite() => weights.clone(),
            _ => return None,
        };
        let p = match &self.kind {
            NormKind::Lp { p } | NormKind::WeightedLp { p, .. } => *p,
            NormKind::Polyhedral { .. } => unreachable!(),
        };
        if p.is_infinite() {
            let mut out = Vec::with_capacity(2 * n);
            for (i, w) in weights.iter().enumerate() {
                for s in [*w, -*w] {
                    let mut a = vec![0.0; n];
                    a[i] = s;
                    out.push(a);
                }
            }
            return Some(out);
        }
        if n >= usize::BITS as usize || 1usize << n > limit {
            return None;
        }
        Some(
            (0..1usize << n)
                .map(|mask| {
                    (0..n)
                        .map(|i| if mask >> i & 1 == 1 { -weights[i] } else { weights[i] })
                        .collect()
                })
                .collect(),
        )
    }

    /// True iff the unit sphere contains no segment (ℓp-type with `1 < p < ∞`).
    pub fn is_strictly_convex(&self) -> bool {
        match &self.kind {
            NormKind::Lp { p } | NormKind::WeightedLp { p, .. } => *p > 1.0 && p.is_finite(),
            NormKind::Polyhedral { .. } => false,
        }
    }

    /// `‖v‖`, checking the dimension.
    pub fn norm(&self, v: &[f64]) -> Result<f64> {
        check_dim(self.dim, v.len())?;
        Ok(self.eval(v))
    }

    /// `‖x − y‖`, checking dimensions.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, y.len())?;
        Ok(self.dist(x, y))
    }

    /// `‖v‖` without a dimension check.
    #[inline]
    pub fn eval(&self, v: &[f64]) -> f64 {
        debug_assert_eq!(v.len(), self.dim);
        self.eval_by(|i| v[i])
    }

    /// `‖x − y‖` without a dimension check or allocation.
    #[inline]
    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        self.eval_by(|i| x[i] - y[i])
    }

    #[inline]
    fn eval_by(&self, coord: impl Fn(usize) -> f64) -> f64 {
        let n = self.dim;
        match &self.kind {
            NormKind::Lp { p } => {
                let p = *p;
                if p == 1.0 {
                    (0..n).map(|i| coord(i).abs()).sum()
                } else if p == 2.0 {
                    (0..n).map(|i| coord(i) * coord(i)).sum::<f64>().sqrt()
                } else if p.is_infinite() {
                    (0..n).map(|i| coord(i).abs()).fold(0.0, f64::max)
                } else {
                    let m = (0..n).map(|i| coord(i).abs()).fold(0.0, f64::max);
                    if m == 0.0 {
                        return 0.0;
                    }
                    m * (0..n).map(|i| (coord(i).abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
                }
            }
            NormKind::WeightedLp { p, weights } => {
                let p = *p;
                if p == 1.0 {
                    (0..n).map(|i| weights[i] * coord(i).abs()).sum()
                } else if p == 2.0 {
                    (0..n)
                        .map(|i| weights[i] * coord(i) * coord(i))
                        .sum::<f64>()
                        .sqrt()
                } else if p.is_infinite() {
                    (0..n)
                        .map(|i| weights[i] * coord(i).abs())
                        .fold(0.0, f64::max)
                } else {
                    let m = (0..n).map(|i| coord(i).abs()).fold(0.0, f64::max);
                    if m == 0.0 {
                        return 0.0;
                    }
                    m * (0..n)
                        .map(|i| weights[i] * (coord(i).abs() / m).powf(p))
                        .sum::<f64>()
                        .powf(1.0 / p)
                }
            }
            NormKind::Polyhedral { .. } => self
                .facets
                .iter()
                .map(|a| a.iter().enumerate().map(|(i, ai)| ai * coord(i)).sum::<f64>())
                .fold(0.0, f64::max),
        }
    }

    /// Smallest `κ` with `|xᵢ| ≤ κ‖x‖` for all `x` and `i`: the unit ball fits in `[−κ, κ]^dim`.
    pub fn box_bound(&self) -> f64 {
        match &self.kind {
            NormKind::Lp { .. } => 1.0,
            NormKind::WeightedLp { p, weights } => {
                let wmin = weights.iter().copied().fold(f64::INFINITY, f64::min);
                if p.is_infinite() {
                    1.0 / wmin
                } else {
                    wmin.powf(-1.0 / p)
                }
            }
            NormKind::Polyhedral { vertices } => vertices
                .iter()
                .flat_map(|v| v.iter().map(|c| c.abs()))
                .fold(0.0, f64::max),
        }
    }

    /// `max ‖s‖` over sign vectors `s ∈ {±1}^dim`: the norm of a unit cube's half-diagonal, doubled.
    pub fn sign_vector_norm(&self) -> f64 {
        let n = self.dim as f64;
        match &self.kind {
            NormKind::Lp { p } => {
                if p.is_infinite() {
                    1.0
                } else {
                    n.powf(1.0 / p)
                }
            }
            NormKind::WeightedLp { p, weights } => {
                if p.is_infinite() {
                    weights.iter().copied().fold(0.0, f64::max)
                } else {
                    weights.iter().sum::<f64>().powf(1.0 / p)
                }
            }
            NormKind::Polyhedral { .. } => self
                .facets
                .iter()
                .map(|a| a.iter().map(|c| c.abs()).sum::<f64>())
                .fold(0.0, f64::max),
        }
    }

    /// Short label such as `lp:2:3`, `lp:inf:2`, `wlp:2:1,4` or `poly:6:2`.
    pub fn label(&self) -> String {
        match &self.kind {
            NormKind::Lp { p } => format!("lp:{}:{}", exponent_label(*p), self.dim),
            NormKind::WeightedLp { p, weights } => {
                let w: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
                format!("wlp:{}:{}", exponent_label(*p), w.join(","))
            }
            NormKind::Polyhedral { vertices } => format!("poly:{}:{}", vertices.len(), self.dim),
        }
    }
}

impl fmt::Display for NormDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidNorm(format!("exponent must satisfy p ≥ 1, got {p}")));
    }
    Ok(())
}

fn exponent_label(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        p.to_string()
    }
}

fn parse_exponent(s: &str) -> Result<f64> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        t => t
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("bad exponent {t:?}: {e}"))),
    }
}

fn parse_dim(s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|e| Error::Parse(format!("bad dimension {s:?}: {e}")))
}

/// Command-line shorthand:
/// `lp:<p>:<dim>` (`p` may be `inf`), `l1:<dim>`, `l2:<dim>`, `linf:<dim>`,
/// `wlp:<p>:<w1,w2,…>` and `hex:<dim>`.
impl FromStr for NormDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["lp", p, dim] => Self::lp(parse_exponent(p)?, parse_dim(dim)?),
            ["l1", dim] => Self::l1(parse_dim(dim)?),
            ["l2", dim] => Self::euclidean(parse_dim(dim)?),
            ["linf", dim] => Self::max_norm(parse_dim(dim)?),
            ["hex", dim] => Self::hexagonal(parse_dim(dim)?),
            ["wlp", p, w] => {
                let weights = w
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::Parse(format!("bad weight {t:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::weighted_lp(parse_exponent(p)?, weights)
            }
            _ => Err(Error::Parse(format!(
                "unrecognized norm {s:?}; expected lp:<p>:<dim>, wlp:<p>:<weights>, hex:<dim>"
            ))),
        }
    }
}

fn enumerate_facets(vertices: &[Vec<f64>], dim: usize) -> Result<Vec<Vec<f64>>> {
    let m = vertices.len();
    if binomial(m, dim) > MAX_FACET_CANDIDATES {
        return Err(Error::InvalidNorm(format!(
            "{m} vertices in dimension {dim} exceed the facet-enumeration budget"
        )));
    }
    let scale = vertices
        .iter()
        .flat_map(|v| v.iter().map(|c| c.abs()))
        .fold(0.0, f64::max);
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut combo: Vec<usize> = (0..dim).collect();
    loop {
        let a = DMatrix::from_fn(dim, dim, |i, j| vertices[combo[i]][j]);
        if let Some(sol) = a.lu().solve(&DVector::from_element(dim, 1.0)) {
            let normal: Vec<f64> = sol.iter().copied().collect();
            let finite = normal.iter().all(|c| c.is_finite());
            let supporting = finite
                && vertices.iter().all(|v| {
                    let s: f64 = v.iter().zip(&normal).map(|(x, y)| x * y).sum();
                    s <= 1.0 + 1e-9
                });
            if supporting && !found.iter().any(|f| close(f, &normal, scale)) {
                found.push(normal);
            }
        }
        if !next_combination(&mut combo, m) {
            break;
        }
    }
    // Store exact ± pairs so that ‖−x‖ and ‖x‖ are computed bit-identically.
    let mut facets: Vec<Vec<f64>> = Vec::with_capacity(found.len());
    for a in found {
        let neg: Vec<f64> = a.iter().map(|c| -c).collect();
        if facets.iter().any(|f| close(f, &a, scale) || close(f, &neg, scale)) {
            continue;
        }
        facets.push(a);
        facets.push(neg);
    }
    if facets.is_empty() {
        return Err(Error::InvalidNorm("no supporting facets found".into()));
    }
    Ok(facets)
}

fn close(a: &[f64], b: &[f64], scale: f64) -> bool {
    let tol = 1e-9 * (1.0 + scale);
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs()))
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: usize = 1;
    for i in 0..k.min(n - k) {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Exponent {
    Value(f64),
    Named(String),
}

impl Exponent {
    fn value(&self) -> Result<f64> {
        match self {
            Exponent::Value(v) => Ok(*v),
            Exponent::Named(s) => parse_exponent(s),
        }
    }

    fn from_value(p: f64) -> Self {
        if p.is_infinite() {
            Exponent::Named("inf".into())
        } else {
            Exponent::Value(p)
        }
    }
}

/// Wire format: `{"kind": "lp", "p": 2, "dim": 2}`,
/// `{"kind": "weighted_lp", "p": 2, "weights": [1, 4]}`,
/// `{"kind": "polyhedral", "vertices": [[1, 0], …], "dim": 2}`.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum NormConfig {
    Lp {
        p: Exponent,
        dim: usize,
    },
    WeightedLp {
        p: Exponent,
        weights: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Polyhedral {
        vertices: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
}

impl TryFrom<NormConfig> for NormDescriptor {
    type Error = Error;

    fn try_from(c: NormConfig) -> Result<Self> {
        let (norm, declared) = match c {
            NormConfig::Lp { p, dim } => (Self::lp(p.value()?, dim)?, None),
            NormConfig::WeightedLp { p, weights, dim } => (Self::weighted_lp(p.value()?, weights)?, dim),
            NormConfig::Polyhedral { vertices, dim } => (Self::polyhedral(vertices)?, dim),
        };
        if let Some(d) = declared {
            check_dim(d, norm.dim)?;
        }
        Ok(norm)
    }
}

impl From<NormDescriptor> for NormConfig {
    fn from(n: NormDescriptor) -> Self {
        match n.kind {
            NormKind::Lp { p } => NormConfig::Lp {
                p: Exponent::from_value(p),
                dim: n.dim,
            },
            NormKind::WeightedLp { p, weights } => NormConfig::WeightedLp {
                p: Exponent::from_value(p),
                weights,
                dim: Some(n.dim),
            },
            NormKind::Polyhedral { vertices } => NormConfig::Polyhedral {
                vertices,
                dim: Some(n.dim),
            },
        }
    }
}
