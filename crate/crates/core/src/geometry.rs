//! Convex polygonal regions, their supporting-line diameters, shifted cut
//! operators, arc-length boundary curves, and the eight angular sectors used
//! for crossing counts.

use serde::Deserialize;
use thiserror::Error;

use crate::poly::Complex;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("a region needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {0} is not finite")]
    NonFinite(usize),
    #[error("vertices {0} and {1} coincide")]
    DuplicateVertex(usize, usize),
    #[error("polygon is not convex and counterclockwise at vertex {0}")]
    NotConvex(usize),
    #[error("polygon has zero area")]
    Degenerate,
    #[error("invalid region JSON: {0}")]
    Json(String),
}

/// Raised when a curve image lands exactly on the origin.
#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("point lies exactly on the origin")]
pub struct SingularPoint;

/// Cut direction. A horizontal cut splits into (top, bottom), a vertical cut
/// into (left, right).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// A closed convex polygon, vertices counterclockwise, or the empty region.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexRegion {
    vertices: Vec<Complex>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RegionJson {
    Vertices { vertices: Vec<[f64; 2]> },
    Rect { rect: [f64; 4] },
}

fn cross(a: Complex, b: Complex) -> f64 {
    a.re * b.im - a.im * b.re
}

impl ConvexRegion {
    pub fn new(vertices: Vec<Complex>) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::TooFewVertices(n));
        }
        if let Some(i) = vertices
            .iter()
            .position(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(GeometryError::NonFinite(i));
        }
        for i in 0..n {
            for j in i + 1..n {
                if vertices[i] == vertices[j] {
                    return Err(GeometryError::DuplicateVertex(i, j));
                }
            }
        }
        let mut area2 = 0.0;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if cross(b - a, c - b) < 0.0 {
                return Err(GeometryError::NotConvex((i + 1) % n));
            }
            area2 += cross(a, b);
        }
        if area2 <= 0.0 {
            return Err(GeometryError::Degenerate);
        }
        Ok(Self { vertices })
    }

    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, GeometryError> {
        let (x0, x1) = (x0.min(x1), x0.max(x1));
        let (y0, y1) = (y0.min(y1), y0.max(y1));
        Self::new(vec![
            Complex::new(x0, y0),
            Complex::new(x1, y0),
            Complex::new(x1, y1),
            Complex::new(x0, y1),
        ])
    }

    /// Parses `{"vertices": [[x, y], ...]}` (counterclockwise) or
    /// `{"rect": [x0, y0, x1, y1]}`.
    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        let parsed: RegionJson =
            serde_json::from_str(text).map_err(|e| GeometryError::Json(e.to_string()))?;
        match parsed {
            RegionJson::Vertices { vertices } => Self::new(
                vertices
                    .into_iter()
                    .map(|[x, y]| Complex::new(x, y))
                    .collect(),
            ),
            RegionJson::Rect {
                rect: [x0, y0, x1, y1],
            } => Self::rect(x0, y0, x1, y1),
        }
    }

    pub fn empty() -> Self {
        Self {
            vertices: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Complex] {
        &self.vertices
    }

    /// `[x_min, y_min, x_max, y_max]`; all zero for the empty region.
    pub fn envelope(&self) -> [f64; 4] {
        if self.is_empty() {
            return [0.0; 4];
        }
        self.vertices.iter().fold(
            [
                f64::INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::NEG_INFINITY,
            ],
            |[x0, y0, x1, y1], v| [x0.min(v.re), y0.min(v.im), x1.max(v.re), y1.max(v.im)],
        )
    }

    pub(crate) fn envelope_corners(&self) -> [Complex; 4] {
        let [x0, y0, x1, y1] = self.envelope();
        [
            Complex::new(x0, y0),
            Complex::new(x1, y0),
            Complex::new(x1, y1),
            Complex::new(x0, y1),
        ]
    }

    /// Distance between the vertical supporting lines.
    pub fn diam_h(&self) -> f64 {
        let [x0, _, x1, _] = self.envelope();
        x1 - x0
    }

    /// Distance between the horizontal supporting lines.
    pub fn diam_v(&self) -> f64 {
        let [_, y0, _, y1] = self.envelope();
        y1 - y0
    }

    pub fn diam_rect(&self) -> f64 {
        self.diam_h().hypot(self.diam_v())
    }

    /// Closed containment test.
    pub fn contains(&self, z: Complex) -> bool {
        let n = self.vertices.len();
        n >= 3
            && (0..n).all(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                cross(b - a, z - a) >= 0.0
            })
    }

    /// Splits along the line shifted `offset` from the midline between the
    /// supporting lines (upward for horizontal, rightward for vertical).
    ///
    /// Returns `(top, bottom)` or `(left, right)`. A part thinner than
    /// `1e-14 * diam_rect` across the cut collapses to the empty region.
    pub fn cut(&self, axis: Axis, offset: f64) -> (ConvexRegion, ConvexRegion) {
        if self.is_empty() {
            return (Self::empty(), Self::empty());
        }
        let [x0, y0, x1, y1] = self.envelope();
        let sliver = 1e-14 * self.diam_rect();
        match axis {
            Axis::Horizontal => {
                let level = 0.5 * (y0 + y1) + offset;
                let top = self.clip(axis, level, true);
                let bottom = self.clip(axis, level, false);
                (
                    top.drop_sliver(axis, sliver),
                    bottom.drop_sliver(axis, sliver),
                )
            }
            Axis::Vertical => {
                let level = 0.5 * (x0 + x1) + offset;
                let left = self.clip(axis, level, false);
                let right = self.clip(axis, level, true);
                (
                    left.drop_sliver(axis, sliver),
                    right.drop_sliver(axis, sliver),
                )
            }
        }
    }

    // Keeps the half-plane coord >= level (upper) or coord <= level.
    // Intersection vertices get the cut coordinate exactly, so the two parts
    // of a cut share bit-identical vertices along the cut segment.
    fn clip(&self, axis: Axis, level: f64, upper: bool) -> ConvexRegion {
        let coord = |z: Complex| match axis {
            Axis::Horizontal => z.im,
            Axis::Vertical => z.re,
        };
        let inside = |z: Complex| {
            if upper {
                coord(z) >= level
            } else {
                coord(z) <= level
            }
        };
        let crossing = |a: Complex, b: Complex| {
            let t = (level - coord(a)) / (coord(b) - coord(a));
            match axis {
                Axis::Horizontal => Complex::new(a.re + t * (b.re - a.re), level),
                Axis::Vertical => Complex::new(level, a.im + t * (b.im - a.im)),
            }
        };
        let n = self.vertices.len();
        let mut out: Vec<Complex> = Vec::with_capacity(n + 2);
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            match (inside(a), inside(b)) {
                (true, true) => out.push(b),
                (true, false) => out.push(crossing(a, b)),
                (false, true) => {
                    out.push(crossing(a, b));
                    out.push(b);
                }
                (false, false) => {}
            }
        }
        Self::cleaned(out)
    }

    fn drop_sliver(self, axis: Axis, sliver: f64) -> ConvexRegion {
        let width = match axis {
            Axis::Horizontal => self.diam_v(),
            Axis::Vertical => self.diam_h(),
        };
        if self.is_empty() || width <= sliver {
            Self::empty()
        } else {
            self
        }
    }

    // Removes repeated and collinear vertices left by clipping.
    fn cleaned(mut pts: Vec<Complex>) -> ConvexRegion {
        pts.dedup();
        while pts.len() > 1 && pts.first() == pts.last() {
            pts.pop();
        }
        let mut changed = true;
        while changed && pts.len() >= 3 {
            changed = false;
            let n = pts.len();
            for i in 0..n {
                let a = pts[(i + n - 1) % n];
                let b = pts[i];
                let c = pts[(i + 1) % n];
                if cross(b - a, c - b) == 0.0
                    && (b - a).re * (c - b).re + (b - a).im * (c - b).im >= 0.0
                {
                    pts.remove(i);
                    changed = true;
                    break;
                }
            }
        }
        if pts.len() < 3 {
            return Self::empty();
        }
        let area2: f64 = (0..pts.len())
            .map(|i| cross(pts[i], pts[(i + 1) % pts.len()]))
            .sum();
        if area2 <= 0.0 {
            return Self::empty();
        }
        Self { vertices: pts }
    }

    /// Counterclockwise arc-length parameterization starting at the
    /// lexicographically smallest vertex.
    ///
    /// # Panics
    /// On the empty region.
    pub fn boundary(&self) -> BoundaryCurve {
        assert!(!self.is_empty(), "the empty region has no boundary curve");
        let n = self.vertices.len();
        let start = (0..n)
            .min_by(|&i, &j| {
                let (a, b) = (self.vertices[i], self.vertices[j]);
                a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
            })
            .unwrap_or(0);
        let corners: Vec<Complex> = (0..n).map(|k| self.vertices[(start + k) % n]).collect();
        let mut knots = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        knots.push(0.0);
        for k in 0..n {
            acc += (corners[(k + 1) % n] - corners[k]).norm();
            knots.push(acc);
        }
        BoundaryCurve { corners, knots }
    }
}

/// Arc-length parameterized boundary of a nonempty convex region.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    corners: Vec<Complex>,
    // knots[k] is the parameter of corners[k]; knots[n] is the perimeter.
    knots: Vec<f64>,
}

impl BoundaryCurve {
    pub fn perimeter(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    /// Parameters of the polygon corners, in traversal order, starting at 0.
    pub fn corner_params(&self) -> &[f64] {
        &self.knots[..self.corners.len()]
    }

    pub fn corners(&self) -> &[Complex] {
        &self.corners
    }

    /// Point at arc length `t`; `t` is clamped to `[0, perimeter]` and the
    /// perimeter maps exactly onto the start corner.
    pub fn at(&self, t: f64) -> Complex {
        let n = self.corners.len();
        if t <= 0.0 || t >= self.perimeter() {
            return self.corners[0];
        }
        let k = self.knots.partition_point(|&s| s <= t) - 1;
        let a = self.corners[k];
        let b = self.corners[(k + 1) % n];
        let frac = (t - self.knots[k]) / (self.knots[k + 1] - self.knots[k]);
        a + (b - a) * frac
    }
}

/// Index `k` of the sector `[k pi/4, (k+1) pi/4)` containing `arg(w)`, with
/// arguments normalized to `[0, 2 pi)`.
///
/// Decided by exact sign and magnitude comparisons, never through `atan2`.
pub fn sector_of(w: Complex) -> Result<u8, SingularPoint> {
    let (x, y) = (w.re, w.im);
    if x == 0.0 && y == 0.0 {
        return Err(SingularPoint);
    }
    let k = if y >= 0.0 && x > 0.0 {
        if y < x {
            0
        } else {
            1
        }
    } else if x <= 0.0 && y > 0.0 {
        if y > -x {
            2
        } else {
            3
        }
    } else if x < 0.0 && y <= 0.0 {
        if -y < -x {
            4
        } else {
            5
        }
    } else if x < -y {
        6
    } else {
        7
    };
    Ok(k)
}

/// Same or adjacent sectors, modulo 8.
pub fn connected(a: u8, b: u8) -> bool {
    matches!((a + 8 - b) % 8, 0 | 1 | 7)
}

/// Net count of counterclockwise passes through the positive real axis:
/// `#(7 -> 0) - #(0 -> 7)` over consecutive pairs, plus the pair
/// `(last, first)` when `closed`.
pub fn net_crossings(sectors: &[u8], closed: bool) -> i64 {
    let step = |a: u8, b: u8| match (a, b) {
        (7, 0) => 1,
        (0, 7) => -1,
        _ => 0,
    };
    let open: i64 = sectors.windows(2).map(|w| step(w[0], w[1])).sum();
    match (closed, sectors.first(), sectors.last()) {
        (true, Some(&first), Some(&last)) if sectors.len() > 1 => open + step(last, first),
        _ => open,
    }
}
