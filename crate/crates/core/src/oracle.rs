//! Reference computations for cross-checking the root finder.
//!
//! Nothing here is used on the main path. The root finder below is an
//! ordinary simultaneous iteration, deliberately unrelated to winding
//! numbers, so that the two can only agree by both being right.

use thiserror::Error;

use crate::geometry::{BoundaryCurve, ConvexRegion};
use crate::poly::{Complex, Polynomial};
use crate::winding::Curve;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("reference root iteration did not converge in {0} sweeps")]
    NoConvergence(usize),
    #[error(
        "winding number did not stabilize below {0} samples; curve may pass through the origin"
    )]
    SingularSuspected(usize),
    #[error("a root lies on the curve")]
    Infinite,
}

/// Roots with multiplicities; multiplicities sum to the degree.
#[derive(Debug, Clone, PartialEq)]
pub struct RootList {
    pub roots: Vec<(Complex, usize)>,
}

impl RootList {
    pub fn total(&self) -> usize {
        self.roots.iter().map(|&(_, m)| m).sum()
    }

    /// Every root repeated by its multiplicity.
    pub fn expanded(&self) -> Vec<Complex> {
        self.roots
            .iter()
            .flat_map(|&(z, m)| std::iter::repeat_n(z, m))
            .collect()
    }

    /// Roots (with multiplicity) in the closed region.
    pub fn count_inside(&self, region: &ConvexRegion) -> usize {
        self.roots
            .iter()
            .filter(|(z, _)| region.contains(*z))
            .map(|&(_, m)| m)
            .sum()
    }
}

const MAX_SWEEPS: usize = 1000;
const CLUSTER_RADIUS: f64 = 1e-7;

/// All roots of `f` by Aberth-Ehrlich iteration, polished and clustered.
pub fn roots_reference(f: &Polynomial) -> Result<RootList, OracleError> {
    let n = f.degree();
    let a = f.coeffs();
    let lead = f.leading();
    if n == 1 {
        return Ok(RootList {
            roots: vec![(-a[0] / lead, 1)],
        });
    }
    let fp = f.derivative();
    // abs-coefficient polynomial for the backward-error stopping rule
    let abs_coeffs: Vec<f64> = a.iter().map(|c| c.norm()).collect();
    let mag = |r: f64| abs_coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c);

    let radius = a
        .iter()
        .take(n)
        .map(|c| (c / lead).norm())
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex::from_polar(radius * (0.5 + 0.1 * k as f64 / n as f64), theta)
        })
        .collect();
    let mut converged = vec![false; n];
    let tol = 8.0 * n as f64 * f64::EPSILON;
    let mut sweeps = 0;
    while converged.iter().any(|c| !c) {
        if sweeps == MAX_SWEEPS {
            return Err(OracleError::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let p = f.eval(z[i]);
            if p.norm() <= tol * mag(z[i].norm()) {
                converged[i] = true;
                continue;
            }
            let ratio = p / fp.eval(z[i]);
            let repulsion: Complex = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
            }
        }
    }

    // group near-coincident roots into multiple roots
    let mut roots: Vec<(Complex, usize)> = Vec::new();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut members = vec![z[i]];
        for j in i + 1..n {
            if !used[j] && (z[j] - z[i]).norm() <= CLUSTER_RADIUS * (1.0 + z[i].norm()) {
                used[j] = true;
                members.push(z[j]);
            }
        }
        let m = members.len();
        let mean = members.iter().sum::<Complex>() / m as f64;
        roots.push((
            if m == 1 {
                newton_polish(f, &fp, mean)
            } else {
                mean
            },
            m,
        ));
    }
    Ok(RootList { roots })
}

fn newton_polish(f: &Polynomial, fp: &Polynomial, mut z: Complex) -> Complex {
    for _ in 0..3 {
        let d = fp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let next = z - f.eval(z) / d;
        if !(next.re.is_finite() && next.im.is_finite()) || f.eval(next).norm() >= f.eval(z).norm()
        {
            break;
        }
        z = next;
    }
    z
}

/// Winding number of `curve` around the origin from principal-branch
/// argument increments, doubling the resolution until two successive
/// resolutions agree and every increment is below `pi/2`.
pub fn winding_brute(curve: &impl Curve, samples: usize) -> Result<i64, OracleError> {
    const LIMIT: usize = 1 << 20;
    let mut n = samples.max(4);
    let mut previous: Option<i64> = None;
    while n <= LIMIT {
        let len = curve.length();
        let points: Vec<Complex> = (0..=n)
            .map(|k| curve.at(len * k as f64 / n as f64))
            .collect();
        if points.iter().any(|w| w.norm() == 0.0) {
            return Err(OracleError::SingularSuspected(n));
        }
        let mut total = 0.0;
        let mut small = true;
        for w in points.windows(2) {
            let d = (w[1] / w[0]).arg();
            small &= d.abs() < std::f64::consts::FRAC_PI_2;
            total += d;
        }
        let closing = (points[0] / points[n]).arg();
        total += closing;
        let index = (total / std::f64::consts::TAU).round() as i64;
        if small && previous == Some(index) {
            return Ok(index);
        }
        previous = small.then_some(index);
        n *= 2;
    }
    Err(OracleError::SingularSuspected(LIMIT))
}

fn segment_distance(z: Complex, a: Complex, b: Complex) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (a + ab * t - z).norm()
}

/// Distance from a point to a polygonal boundary.
pub fn point_curve_distance(z: Complex, boundary: &BoundaryCurve) -> f64 {
    let c = boundary.corners();
    (0..c.len())
        .map(|i| segment_distance(z, c[i], c[(i + 1) % c.len()]))
        .fold(f64::INFINITY, f64::min)
}

/// Sum over roots (with multiplicity) of the reciprocal distance to the
/// boundary.
pub fn condition_number(roots: &RootList, boundary: &BoundaryCurve) -> Result<f64, OracleError> {
    let mut kappa = 0.0;
    for &(z, m) in &roots.roots {
        let d = point_curve_distance(z, boundary);
        if d < 1e-15 {
            return Err(OracleError::Infinite);
        }
        kappa += m as f64 / d;
    }
    Ok(kappa)
}

/// Distance from the nearest root to the boundary.
pub fn dist_set_curve(roots: &RootList, boundary: &BoundaryCurve) -> f64 {
    roots
        .roots
        .iter()
        .map(|&(z, _)| point_curve_distance(z, boundary))
        .fold(f64::INFINITY, f64::min)
}

/// Minimum of `|f|` along the boundary by dense sampling: 4096 points,
/// doubled until the minimum is stable to `1e-6` relative.
pub fn min_modulus_on_boundary(f: &Polynomial, boundary: &BoundaryCurve) -> f64 {
    let per = boundary.perimeter();
    let sampled = |n: usize| {
        (0..n)
            .map(|k| f.eval(boundary.at(per * k as f64 / n as f64)).norm())
            .chain(boundary.corners().iter().map(|&z| f.eval(z).norm()))
            .fold(f64::INFINITY, f64::min)
    };
    let mut n = 4096;
    let mut current = sampled(n);
    while n < 1 << 22 {
        n *= 2;
        let next = sampled(n);
        let stable = (current - next).abs() <= 1e-6 * next.abs();
        current = current.min(next);
        if stable {
            break;
        }
    }
    current
}

/// Largest distance between two vertices.
pub fn classical_diameter(region: &ConvexRegion) -> f64 {
    let v = region.vertices();
    v.iter()
        .flat_map(|a| v.iter().map(move |b| (a - b).norm()))
        .fold(0.0, f64::max)
}
