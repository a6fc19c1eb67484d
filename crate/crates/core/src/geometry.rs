//! Geometric post-processing of rate and distortion data: 2-D convex hulls,
//! non-decreasing concave envelopes (the time-sharing closure of a curve),
//! Pareto fronts, and half-space region membership.
//!
//! Regions are closed: boundary points satisfy every half-space within a 1e-9
//! slack. The strict inequalities defining achievable sets denote open
//! interiors; including the boundary is a closure convention.

use crate::error::{CdError, Result};

pub const CONTAINS_SLACK: f64 = 1e-9;

/// A rate tuple with attached distortions plus the identifier of the
/// variable sample that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPoint {
    pub rates: Vec<f64>,
    pub distortions: Vec<f64>,
    pub provenance: String,
}

impl RegionPoint {
    pub fn new(rates: Vec<f64>, distortions: Vec<f64>, provenance: impl Into<String>) -> Result<Self> {
        if rates.iter().chain(distortions.iter()).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(CdError::Invalid("region coordinates must be finite and nonnegative".into()));
        }
        Ok(Self { rates, distortions, provenance: provenance.into() })
    }

    /// Concatenated coordinate vector: rates first, then distortions.
    pub fn coords(&self) -> Vec<f64> {
        self.rates.iter().chain(self.distortions.iter()).copied().collect()
    }
}

/// Counterclockwise convex hull by monotone chain; collinear points dropped.
/// Coordinates are pre-scaled to the unit box to stabilize cross products, but
/// the returned vertices are the original input points.
pub fn convex_hull_2d(points: &[[f64; 2]]) -> Result<Vec<[f64; 2]>> {
    if points.is_empty() {
        return Err(CdError::Domain("convex hull of an empty set".into()));
    }
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        xmin = xmin.min(p[0]);
        xmax = xmax.max(p[0]);
        ymin = ymin.min(p[1]);
        ymax = ymax.max(p[1]);
    }
    let sx = if xmax > xmin { xmax - xmin } else { 1.0 };
    let sy = if ymax > ymin { ymax - ymin } else { 1.0 };
    let scaled: Vec<[f64; 2]> = points
        .iter()
        .map(|p| [(p[0] - xmin) / sx, (p[1] - ymin) / sy])
        .collect();

    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        scaled[i]
            .partial_cmp(&scaled[j])
            .expect("finite coordinates")
    });
    idx.dedup_by(|&mut i, &mut j| scaled[i] == scaled[j]);
    if idx.len() == 1 {
        return Ok(vec![points[idx[0]]]);
    }

    let cross = |o: usize, a: usize, b: usize| -> f64 {
        (scaled[a][0] - scaled[o][0]) * (scaled[b][1] - scaled[o][1])
            - (scaled[a][1] - scaled[o][1]) * (scaled[b][0] - scaled[o][0])
    };
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], i) <= 0.0 {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], i) <= 0.0 {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 2 {
        // All points collinear after dedup: keep the two extremes.
        return Ok(vec![points[idx[0]], points[*idx.last().unwrap()]]);
    }
    Ok(lower.into_iter().map(|i| points[i]).collect())
}

/// Least concave majorant that is also non-decreasing, sampled at the input x
/// grid. Dominates the input pointwise; slopes are non-increasing.
///
/// Construction: any non-decreasing concave majorant must reach the global
/// maximum at the right end, so augmenting the point set with
/// `(x_last, max y)` and taking the upper hull yields exactly the least one.
pub fn concave_envelope(curve: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if curve.is_empty() {
        return Err(CdError::Domain("empty curve".into()));
    }
    for w in curve.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(CdError::Domain("curve x-values must be strictly increasing".into()));
        }
    }
    let y_max = curve.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let mut pts: Vec<(f64, f64)> = curve.to_vec();
    let last = pts.len() - 1;
    pts[last].1 = pts[last].1.max(y_max);

    // Upper hull over x-sorted points.
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| -> f64 {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) >= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }

    // Evaluate the piecewise-linear hull at each input x.
    let mut out = Vec::with_capacity(curve.len());
    let mut seg = 0usize;
    for &(x, _) in curve {
        while seg + 1 < hull.len() && hull[seg + 1].0 < x {
            seg += 1;
        }
        let y = if seg + 1 == hull.len() {
            hull[seg].1
        } else {
            let (x0, y0) = hull[seg];
            let (x1, y1) = hull[seg + 1];
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        };
        out.push((x, y));
    }
    Ok(out)
}

/// Non-dominated subset. `maximize` and `minimize` index into the concatenated
/// coordinate vector of [`RegionPoint::coords`] and must partition it.
/// Duplicate points are collapsed to their first occurrence.
pub fn pareto_front(
    points: &[RegionPoint],
    maximize: &[usize],
    minimize: &[usize],
) -> Result<Vec<RegionPoint>> {
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let dim = points[0].coords().len();
    if maximize.is_empty() && minimize.is_empty() {
        return Err(CdError::Domain("axis sets must be nonempty".into()));
    }
    let mut seen = vec![false; dim];
    for &i in maximize.iter().chain(minimize.iter()) {
        if i >= dim || seen[i] {
            return Err(CdError::Domain("axis sets must partition the coordinates".into()));
        }
        seen[i] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(CdError::Domain("axis sets must partition the coordinates".into()));
    }

    let coords: Vec<Vec<f64>> = points.iter().map(RegionPoint::coords).collect();
    let dominates = |a: &[f64], b: &[f64]| -> bool {
        let mut strict = false;
        for &i in maximize {
            if a[i] < b[i] {
                return false;
            }
            if a[i] > b[i] {
                strict = true;
            }
        }
        for &i in minimize {
            if a[i] > b[i] {
                return false;
            }
            if a[i] < b[i] {
                strict = true;
            }
        }
        strict
    };

    let mut front = Vec::new();
    'outer: for (i, ci) in coords.iter().enumerate() {
        for (j, cj) in coords.iter().enumerate() {
            if i != j && dominates(cj, ci) {
                continue 'outer;
            }
            if j < i && ci == cj {
                continue 'outer; // exact duplicate, keep the first
            }
        }
        front.push(points[i].clone());
    }
    Ok(front)
}

/// Intersection of half-spaces `a1 r1 + a2 r2 <= b` with the nonnegative
/// quadrant. Must contain the origin.
#[derive(Debug, Clone)]
pub struct Polyhedron2D {
    halfspaces: Vec<[f64; 3]>,
}

impl Polyhedron2D {
    pub fn new(halfspaces: Vec<[f64; 3]>) -> Result<Self> {
        if halfspaces.iter().any(|h| h[2] < -CONTAINS_SLACK) {
            return Err(CdError::Invalid("polyhedron must contain the origin".into()));
        }
        Ok(Self { halfspaces })
    }

    pub fn halfspaces(&self) -> &[[f64; 3]] {
        &self.halfspaces
    }

    pub fn contains(&self, r1: f64, r2: f64) -> bool {
        if r1 < -CONTAINS_SLACK || r2 < -CONTAINS_SLACK {
            return false;
        }
        self.halfspaces
            .iter()
            .all(|h| h[0] * r1 + h[1] * r2 <= h[2] + CONTAINS_SLACK)
    }

    /// Vertices of the bounded region formed with the axes, suitable as hull
    /// input. Four-bound rate regions (r1, r2, two sum caps) are the intended
    /// use; the generic case enumerates pairwise intersections.
    pub fn vertices(&self) -> Vec<[f64; 2]> {
        let mut lines: Vec<[f64; 3]> = self.halfspaces.clone();
        lines.push([-1.0, 0.0, 0.0]); // r1 >= 0
        lines.push([0.0, -1.0, 0.0]); // r2 >= 0
        let mut verts = Vec::new();
        for i in 0..lines.len() {
            for j in (i + 1)..lines.len() {
                let (a, b) = (lines[i], lines[j]);
                let det = a[0] * b[1] - a[1] * b[0];
                if det.abs() < 1e-12 {
                    continue;
                }
                let r1 = (a[2] * b[1] - a[1] * b[2]) / det;
                let r2 = (a[0] * b[2] - a[2] * b[0]) / det;
                if self.contains(r1, r2) {
                    verts.push([r1.max(0.0), r2.max(0.0)]);
                }
            }
        }
        verts
    }
}
