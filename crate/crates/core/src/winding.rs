//! Winding numbers of closed curves by adaptive bisection of the parameter
//! interval.
//!
//! All three procedures share one loop: scan consecutive sample pairs left
//! to right and bisect any pair whose images are not in connected sectors
//! (`p`) or whose gap could hide a turn around the origin (`q`, or `q2` for
//! polynomial images). They differ in the lost-turn predicate and in how
//! they give up:
//!
//! * [`ip`] never gives up on its own and is guarded only by `max_iter`;
//! * [`ips`] fails once a bisected gap drops to `Q`, returning a parameter
//!   whose image is within `L Q / sin(pi/8)` of the origin;
//! * [`ipsr`] counts roots of a polynomial inside a region boundary and
//!   fails once a bisected gap drops to `Q`, which certifies that the
//!   condition number of the boundary is at least `sqrt(2) / (4 Q)`.
//!
//! A returned array always starts at parameter 0 and ends at the curve
//! length, both ends mapping to the same point, so the closing pair needs
//! no wraparound.

use thiserror::Error;

use crate::geometry::{connected, net_crossings, sector_of, BoundaryCurve};
use crate::poly::{Complex, EvalCounter, Polynomial};

/// `sin(pi/8)`, the half-angle of one sector.
pub const SIN_PI_8: f64 = 0.382_683_432_365_089_8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WindingError {
    #[error("sample parameters must be strictly increasing (index {0})")]
    NotIncreasing(usize),
    #[error("sample parameters must start at 0 and end at the curve length {length}")]
    BadSpan { length: f64 },
    #[error("curve image is exactly zero at t = {t}")]
    Singular { t: f64 },
    #[error("insertion procedure exceeded {max_iter} insertions")]
    NonTermination { max_iter: usize },
}

/// A closed curve parameterized over `[0, length]`.
pub trait Curve {
    fn length(&self) -> f64;
    fn at(&self, t: f64) -> Complex;
}

/// A curve given by a closure.
pub struct FnCurve<F> {
    pub length: f64,
    pub func: F,
}

impl<F: Fn(f64) -> Complex> Curve for FnCurve<F> {
    fn length(&self) -> f64 {
        self.length
    }

    fn at(&self, t: f64) -> Complex {
        (self.func)(t)
    }
}

/// The image `f(boundary(t))` of a region boundary, evaluated uncounted.
pub struct ImageCurve<'a> {
    pub boundary: &'a BoundaryCurve,
    pub f: &'a Polynomial,
}

impl Curve for ImageCurve<'_> {
    fn length(&self) -> f64 {
        self.boundary.perimeter()
    }

    fn at(&self, t: f64) -> Complex {
        self.f.eval(self.boundary.at(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    /// Point on the underlying curve (equal to `image` for plain curves).
    pub point: Complex,
    pub image: Complex,
    pub sector: u8,
}

impl Sample {
    fn new(t: f64, point: Complex, image: Complex) -> Result<Self, WindingError> {
        let sector = sector_of(image).map_err(|_| WindingError::Singular { t })?;
        Ok(Self {
            t,
            point,
            image,
            sector,
        })
    }
}

/// Strictly increasing parameters with cached points, images and sectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleArray {
    samples: Vec<Sample>,
}

impl SampleArray {
    fn check_params(params: &[f64], length: f64) -> Result<(), WindingError> {
        if params.len() < 2 || params[0] != 0.0 || params[params.len() - 1] != length {
            return Err(WindingError::BadSpan { length });
        }
        if let Some(i) = params.windows(2).position(|w| w[0] >= w[1]) {
            return Err(WindingError::NotIncreasing(i + 1));
        }
        Ok(())
    }

    pub fn from_curve(curve: &impl Curve, params: &[f64]) -> Result<Self, WindingError> {
        Self::check_params(params, curve.length())?;
        let samples = params
            .iter()
            .map(|&t| {
                let w = curve.at(t);
                Sample::new(t, w, w)
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { samples })
    }

    pub fn from_boundary(
        boundary: &BoundaryCurve,
        f: &Polynomial,
        params: &[f64],
        ctr: &mut EvalCounter,
    ) -> Result<Self, WindingError> {
        Self::check_params(params, boundary.perimeter())?;
        let samples = params
            .iter()
            .map(|&t| {
                let z = boundary.at(t);
                Sample::new(t, z, ctr.eval(f, z))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn params(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn sectors(&self) -> Vec<u8> {
        self.samples.iter().map(|s| s.sector).collect()
    }

    /// Net crossings of the positive real axis by the sampled polygon.
    ///
    /// The pair (last, first) is included: it joins two images of the same
    /// curve point, which may differ by rounding for curves given by a
    /// closure.
    pub fn index(&self) -> i64 {
        net_crossings(&self.sectors(), true)
    }

    /// Largest gap between consecutive parameters.
    pub fn max_gap(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| w[1].t - w[0].t)
            .fold(0.0, f64::max)
    }
}

fn p_holds(a: &Sample, b: &Sample) -> bool {
    !connected(a.sector, b.sector)
}

fn q_holds(a: &Sample, b: &Sample, lipschitz: f64) -> bool {
    b.t - a.t >= (a.image.norm() + b.image.norm()) / lipschitz
}

fn q2_holds(a: &Sample, b: &Sample, slope_at_a: f64) -> bool {
    a.image.norm() + b.image.norm() <= 2.0 * slope_at_a * (b.t - a.t) + (b.image - a.image).norm()
}

fn r_holds(a: &Sample, b: &Sample, q: f64) -> bool {
    b.t - a.t <= q
}

/// Images of pair `i` lie in non-adjacent sectors.
pub fn pred_p(s: &SampleArray, i: usize) -> bool {
    p_holds(&s.samples[i], &s.samples[i + 1])
}

/// Gap of pair `i` is at least `(|w_i| + |w_{i+1}|) / L`.
pub fn pred_q(s: &SampleArray, i: usize, lipschitz: f64) -> bool {
    q_holds(&s.samples[i], &s.samples[i + 1], lipschitz)
}

/// `|f_i| + |f_{i+1}| <= 2 |f'(z_i)| gap + |f_{i+1} - f_i|` for pair `i`.
pub fn pred_q2(s: &SampleArray, i: usize, derivative: &Polynomial) -> bool {
    let a = &s.samples[i];
    q2_holds(a, &s.samples[i + 1], derivative.eval(a.point).norm())
}

/// Gap of pair `i` is at most `Q`.
pub fn pred_r(s: &SampleArray, i: usize, q: f64) -> bool {
    r_holds(&s.samples[i], &s.samples[i + 1], q)
}

/// Result of a singularity-controlled procedure.
#[derive(Debug, Clone, PartialEq)]
pub enum WindingOutcome {
    Normal {
        array: SampleArray,
        index: i64,
        insertions: usize,
    },
    /// `guarantee` is the bound certified by the procedure that exited:
    /// an upper bound on `|image(t)|` for [`ips`], a lower bound on the
    /// boundary condition number for [`ipsr`].
    SingularError {
        t: f64,
        guarantee: f64,
        insertions: usize,
    },
}

impl WindingOutcome {
    pub fn insertions(&self) -> usize {
        match self {
            Self::Normal { insertions, .. } | Self::SingularError { insertions, .. } => *insertions,
        }
    }

    pub fn index(&self) -> Option<i64> {
        match self {
            Self::Normal { index, .. } => Some(*index),
            Self::SingularError { .. } => None,
        }
    }
}

trait Refiner {
    fn sample(&mut self, t: f64) -> Result<Sample, WindingError>;
    fn needs_split(&mut self, a: &Sample, b: &Sample) -> bool;
}

enum RefineEnd {
    Done(SampleArray),
    ZeroImage {
        t: f64,
    },
    /// `r` fired after bisecting the pair `(left, right)`.
    GapLimit {
        left: Sample,
        right: Sample,
    },
    IterLimit,
    Exhausted,
}

// Left-to-right scan. After a bisection the left half is examined next;
// pairs to its left are unchanged and need no rescan.
fn refine(
    refiner: &mut impl Refiner,
    initial: SampleArray,
    gap_limit: Option<f64>,
    max_iter: Option<usize>,
) -> (RefineEnd, usize) {
    let mut pending: Vec<Sample> = initial.samples;
    pending.reverse();
    let Some(first) = pending.pop() else {
        return (
            RefineEnd::Done(SampleArray {
                samples: Vec::new(),
            }),
            0,
        );
    };
    let mut done = vec![first];
    let mut insertions = 0usize;
    while let Some(right) = pending.pop() {
        let left = done[done.len() - 1];
        if !refiner.needs_split(&left, &right) {
            done.push(right);
            continue;
        }
        if max_iter.is_some_and(|m| insertions >= m) {
            return (RefineEnd::IterLimit, insertions);
        }
        let t = 0.5 * (left.t + right.t);
        if !(left.t < t && t < right.t) && gap_limit.is_none() {
            return (RefineEnd::Exhausted, insertions);
        }
        insertions += 1;
        let mid = match refiner.sample(t) {
            Ok(s) => s,
            Err(_) => return (RefineEnd::ZeroImage { t }, insertions),
        };
        if gap_limit.is_some_and(|q| r_holds(&left, &mid, q)) {
            return (RefineEnd::GapLimit { left, right }, insertions);
        }
        pending.push(right);
        pending.push(mid);
    }
    (RefineEnd::Done(SampleArray { samples: done }), insertions)
}

fn closer_to_origin(left: &Sample, right: &Sample) -> f64 {
    if right.image.norm() < left.image.norm() {
        right.t
    } else {
        left.t
    }
}

struct CurveRefiner<'a, C> {
    curve: &'a C,
    lipschitz: f64,
}

impl<C: Curve> Refiner for CurveRefiner<'_, C> {
    fn sample(&mut self, t: f64) -> Result<Sample, WindingError> {
        let w = self.curve.at(t);
        Sample::new(t, w, w)
    }

    fn needs_split(&mut self, a: &Sample, b: &Sample) -> bool {
        p_holds(a, b) || q_holds(a, b, self.lipschitz)
    }
}

/// Plain insertion procedure, guarded by `max_iter` since it need not stop
/// on curves through the origin.
///
/// Returns the refined array and the number of insertions.
pub fn ip(
    curve: &impl Curve,
    lipschitz: f64,
    initial: SampleArray,
    max_iter: usize,
) -> Result<(SampleArray, usize), WindingError> {
    let mut refiner = CurveRefiner { curve, lipschitz };
    match refine(&mut refiner, initial, None, Some(max_iter)) {
        (RefineEnd::Done(array), n) => Ok((array, n)),
        (RefineEnd::ZeroImage { t }, _) => Err(WindingError::Singular { t }),
        (RefineEnd::IterLimit | RefineEnd::Exhausted | RefineEnd::GapLimit { .. }, _) => {
            Err(WindingError::NonTermination { max_iter })
        }
    }
}

/// Insertion procedure with control of singularity.
pub fn ips(curve: &impl Curve, lipschitz: f64, initial: SampleArray, q: f64) -> WindingOutcome {
    let guarantee = lipschitz * q / SIN_PI_8;
    let mut refiner = CurveRefiner { curve, lipschitz };
    finish(refine(&mut refiner, initial, Some(q), None), guarantee)
}

fn finish((end, insertions): (RefineEnd, usize), guarantee: f64) -> WindingOutcome {
    match end {
        RefineEnd::Done(array) => WindingOutcome::Normal {
            index: array.index(),
            array,
            insertions,
        },
        RefineEnd::ZeroImage { t } => WindingOutcome::SingularError {
            t,
            guarantee,
            insertions,
        },
        RefineEnd::GapLimit { left, right } => WindingOutcome::SingularError {
            t: closer_to_origin(&left, &right),
            guarantee,
            insertions,
        },
        RefineEnd::IterLimit | RefineEnd::Exhausted => {
            unreachable!("gap-limited refinement always stops through r")
        }
    }
}

struct RootRefiner<'a> {
    boundary: &'a BoundaryCurve,
    f: &'a Polynomial,
    derivative: Polynomial,
    ctr: &'a mut EvalCounter,
}

impl Refiner for RootRefiner<'_> {
    fn sample(&mut self, t: f64) -> Result<Sample, WindingError> {
        let z = self.boundary.at(t);
        Sample::new(t, z, self.ctr.eval(self.f, z))
    }

    fn needs_split(&mut self, a: &Sample, b: &Sample) -> bool {
        if p_holds(a, b) {
            return true;
        }
        let slope = self.ctr.eval(&self.derivative, a.point).norm();
        q2_holds(a, b, slope)
    }
}

/// Counts the roots of `f` inside the region bounded by `boundary`, with
/// control of root proximity through the gap limit `q`.
///
/// Every evaluation of `f` and `f'` goes through `ctr`.
pub fn ipsr(
    boundary: &BoundaryCurve,
    f: &Polynomial,
    initial: SampleArray,
    q: f64,
    ctr: &mut EvalCounter,
) -> WindingOutcome {
    let guarantee = std::f64::consts::SQRT_2 / (4.0 * q);
    let mut refiner = RootRefiner {
        boundary,
        f,
        derivative: f.derivative(),
        ctr,
    };
    finish(refine(&mut refiner, initial, Some(q), None), guarantee)
}

/// [`ipsr`] from [`initial_samples`], mapping an exact zero among the
/// initial images to a singular exit.
pub fn count_roots(
    boundary: &BoundaryCurve,
    f: &Polynomial,
    q: f64,
    ctr: &mut EvalCounter,
) -> WindingOutcome {
    let params = initial_samples(boundary);
    match SampleArray::from_boundary(boundary, f, &params, ctr) {
        Ok(initial) => ipsr(boundary, f, initial, q, ctr),
        Err(WindingError::Singular { t }) => WindingOutcome::SingularError {
            t,
            guarantee: std::f64::consts::SQRT_2 / (4.0 * q),
            insertions: 0,
        },
        Err(e) => unreachable!("initial samples are well formed: {e}"),
    }
}

/// Corner parameters of the polygon, padded uniformly so that no gap exceeds
/// a eighth of the perimeter, closed by the perimeter itself.
pub fn initial_samples(boundary: &BoundaryCurve) -> Vec<f64> {
    let per = boundary.perimeter();
    let max_gap = per / 8.0;
    let mut knots: Vec<f64> = boundary.corner_params().to_vec();
    knots.push(per);
    let mut params = vec![0.0];
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let pieces = ((b - a) / max_gap).ceil().max(1.0) as usize;
        for k in 1..pieces {
            let t = a + (b - a) * (k as f64 / pieces as f64);
            if t > params[params.len() - 1] && t < b {
                params.push(t);
            }
        }
        if b > params[params.len() - 1] {
            params.push(b);
        }
    }
    params
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexRegion;
    use std::f64::consts::{SQRT_2, TAU};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn line(from: Complex, to: Complex, length: f64) -> FnCurve<impl Fn(f64) -> Complex> {
        FnCurve {
            length,
            func: move |t: f64| from + (to - from) * (t / length),
        }
    }

    fn pair(a: Complex, b: Complex, gap: f64) -> SampleArray {
        SampleArray::from_curve(&line(a, b, gap), &[0.0, gap]).unwrap()
    }

    #[test]
    fn sin_pi_8_constant() {
        assert!((SIN_PI_8 - (std::f64::consts::PI / 8.0).sin()).abs() < 1e-16);
    }

    #[test]
    fn p_examples() {
        assert!(!pred_p(&pair(c(1.0, 0.1), c(1.0, 0.9), 1.0), 0));
        assert!(pred_p(&pair(c(1.0, 0.1), c(-0.1, 1.0), 1.0), 0));
        assert!(!pred_p(&pair(c(1.0, -0.1), c(1.0, 0.1), 1.0), 0));
    }

    #[test]
    fn q_examples() {
        assert!(pred_q(&pair(c(0.1, 0.0), c(0.0, 0.1), 1.0), 0, 1.0));
        assert!(!pred_q(&pair(c(1.0, 0.0), c(0.0, 1.0), 0.1), 0, 1.0));
        assert!(pred_q(&pair(c(0.5, 0.0), c(0.0, 0.5), 1.0), 0, 1.0));
    }

    #[test]
    fn q2_examples() {
        let one = Polynomial::from_real(&[0.0, 1.0]).unwrap().derivative();
        // f = z with points 1 and 1.1, gap 0.1
        assert!(!pred_q2(&pair(c(1.0, 0.0), c(1.1, 0.0), 0.1), 0, &one));
        // f = z with points -d and d, gap 2d
        let d = 1e-3;
        assert!(pred_q2(&pair(c(-d, 0.0), c(d, 0.0), 2.0 * d), 0, &one));
        // scaling f by a constant does not change the verdict
        let k = c(3.0, -4.0);
        let scaled = Polynomial::new(vec![c(0.0, 0.0), k]).unwrap().derivative();
        let s = pair(c(1.0, 0.0) * k, c(1.1, 0.0) * k, 0.1);
        assert!(!pred_q2(&s, 0, &scaled));
        let s = pair(c(-d, 0.0) * k, c(d, 0.0) * k, 2.0 * d);
        assert!(pred_q2(&s, 0, &scaled));
    }

    #[test]
    fn r_examples() {
        assert!(pred_r(&pair(c(1.0, 0.0), c(1.0, 1.0), 0.5), 0, 1.0));
        assert!(!pred_r(&pair(c(1.0, 0.0), c(1.0, 1.0), 2.0), 0, 1.0));
        assert!(pred_r(&pair(c(1.0, 0.0), c(1.0, 1.0), 1.0), 0, 1.0));
    }

    #[test]
    fn sample_array_validation() {
        let curve = line(c(1.0, 0.0), c(2.0, 0.0), 1.0);
        assert_eq!(
            SampleArray::from_curve(&curve, &[0.0, 0.5, 0.5, 1.0]),
            Err(WindingError::NotIncreasing(2))
        );
        assert!(matches!(
            SampleArray::from_curve(&curve, &[0.0, 0.5]),
            Err(WindingError::BadSpan { .. })
        ));
        let through_origin = line(c(-1.0, 0.0), c(1.0, 0.0), 2.0);
        assert_eq!(
            SampleArray::from_curve(&through_origin, &[0.0, 1.0, 2.0]),
            Err(WindingError::Singular { t: 1.0 })
        );
    }

    fn polygon_curve(center: Complex, radius: f64, sides: usize) -> (ConvexRegion, BoundaryCurve) {
        let region = ConvexRegion::new(
            (0..sides)
                .map(|k| center + Complex::from_polar(radius, TAU * k as f64 / sides as f64))
                .collect(),
        )
        .unwrap();
        let boundary = region.boundary();
        (region, boundary)
    }

    fn uniform(length: f64, n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..n).map(|k| length * k as f64 / n as f64).collect();
        v.push(length);
        v
    }

    fn ip_index(f: &Polynomial, center: Complex) -> i64 {
        let (region, boundary) = polygon_curve(center, 1.0, 64);
        let curve = ImageCurve {
            boundary: &boundary,
            f,
        };
        let s0 = SampleArray::from_curve(&curve, &uniform(curve.length(), 8)).unwrap();
        let (array, _) = ip(&curve, f.lipschitz_bound(&region), s0, 100_000).unwrap();
        array.index()
    }

    #[test]
    fn ip_examples() {
        let id = Polynomial::from_real(&[0.0, 1.0]).unwrap();
        let sq = Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(ip_index(&id, c(0.0, 0.0)), 1);
        assert_eq!(ip_index(&sq, c(0.0, 0.0)), 2);
        assert_eq!(ip_index(&id, c(3.0, 0.0)), 0);
    }

    #[test]
    fn ip_gives_up_on_singular_curves() {
        // the image passes through the origin between samples
        let curve = FnCurve {
            length: 1.0,
            func: |t: f64| c((TAU * t).cos() + 1.0, (TAU * t).sin()),
        };
        let s0 = SampleArray::from_curve(&curve, &[0.0, 0.3, 0.7, 1.0]).unwrap();
        assert!(matches!(
            ip(&curve, TAU, s0, 10_000),
            Err(WindingError::NonTermination { .. }) | Err(WindingError::Singular { .. })
        ));
    }

    #[test]
    fn ips_far_curve_is_normal() {
        // unit circle around 0 scaled by 2: distance to origin 2
        let curve = FnCurve {
            length: TAU,
            func: |t: f64| Complex::from_polar(2.0, t),
        };
        let lipschitz = 2.0;
        let q = 0.1;
        assert!(2.0 > lipschitz * q / SIN_PI_8);
        let s0 = SampleArray::from_curve(&curve, &uniform(TAU, 4)).unwrap();
        let out = ips(&curve, lipschitz, s0, q);
        assert_eq!(out.index(), Some(1));
        assert!(out.insertions() < (TAU / q).floor() as usize);
    }

    #[test]
    fn ips_exact_zero_is_singular() {
        let curve = FnCurve {
            length: 2.0,
            func: |t: f64| c(t - 1.0, 0.0),
        };
        let s0 = SampleArray::from_curve(&curve, &[0.0, 0.5, 2.0]).unwrap();
        // midpoint 1.25 is fine; the next bisection of [0.5, 1.25] is not
        let out = ips(&curve, 1.0, s0, 1e-6);
        match out {
            WindingOutcome::SingularError { t, guarantee, .. } => {
                assert!((curve.at(t)).norm() <= guarantee);
            }
            other => panic!("expected singular exit, got {other:?}"),
        }
    }

    #[test]
    fn ips_large_q_returns_at_once() {
        let curve = FnCurve {
            length: 1.0,
            func: |t: f64| Complex::from_polar(0.01, TAU * t),
        };
        let s0 = SampleArray::from_curve(&curve, &uniform(1.0, 2)).unwrap();
        let q = 1.0;
        let out = ips(&curve, TAU * 0.01, s0, q);
        assert!(out.insertions() <= (1.0 / q).floor() as usize);
        assert!(matches!(out, WindingOutcome::SingularError { .. }));
    }

    #[test]
    fn ips_error_point_bound() {
        // circle of radius 1 centered at 1.0 + tiny: grazes the origin
        let curve = FnCurve {
            length: TAU,
            func: |t: f64| c(1.0 + 1e-9, 0.0) + Complex::from_polar(1.0, t),
        };
        let q = 1e-3;
        let s0 = SampleArray::from_curve(&curve, &uniform(TAU, 8)).unwrap();
        match ips(&curve, 1.0, s0, q) {
            WindingOutcome::SingularError {
                t,
                guarantee,
                insertions,
            } => {
                assert!(curve.at(t).norm() <= guarantee);
                assert!(insertions < (TAU / q).floor() as usize);
            }
            other => panic!("expected singular exit, got {other:?}"),
        }
    }

    fn square(x0: f64, y0: f64, x1: f64, y1: f64) -> BoundaryCurve {
        ConvexRegion::rect(x0, y0, x1, y1).unwrap().boundary()
    }

    #[test]
    fn ipsr_cubic_in_square() {
        let f = Polynomial::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        let mut ctr = EvalCounter::new();
        let g = square(-2.0, -2.0, 2.0, 2.0);
        let out = count_roots(&g, &f, 1e-3, &mut ctr);
        assert_eq!(out.index(), Some(3));
        assert!(ctr.evaluations() > 0);

        let f = Polynomial::from_real(&[-1.0, 0.0, 0.0, 1.0]).unwrap();
        let g = square(-1.9, -2.0, 2.1, 2.0);
        assert_eq!(count_roots(&g, &f, 1e-3, &mut ctr).index(), Some(3));
    }

    #[test]
    fn ipsr_root_on_boundary_is_singular() {
        let f = Polynomial::from_real(&[-1.0, 1.0]).unwrap();
        let mut ctr = EvalCounter::new();
        let g = square(1.0, -1.0, 3.0, 1.0);
        let out = count_roots(&g, &f, 1e-3, &mut ctr);
        assert!(
            matches!(out, WindingOutcome::SingularError { .. }),
            "{out:?}"
        );
    }

    #[test]
    fn ipsr_normal_array_is_a_fixpoint() {
        let f = Polynomial::from_real(&[2.0, -3.0, 0.5, 1.0]).unwrap();
        let fp = f.derivative();
        let mut ctr = EvalCounter::new();
        let g = square(-2.5, -1.5, 1.5, 2.0);
        let q = 1e-4;
        let out = count_roots(&g, &f, q, &mut ctr);
        let WindingOutcome::Normal {
            array, insertions, ..
        } = out
        else {
            panic!("expected normal exit");
        };
        for i in 0..array.len() - 1 {
            assert!(!pred_p(&array, i));
            assert!(!pred_q2(&array, i, &fp));
        }
        assert_eq!(
            array.samples()[0].point,
            array.samples()[array.len() - 1].point
        );
        assert!(insertions < (g.perimeter() / q + 1.0).floor() as usize);
        assert!(array.params().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ipsr_error_certifies_condition_number() {
        let q = 1e-3;
        let root = c(1.0 + q / 20.0, 0.3);
        let f = Polynomial::from_roots(c(1.0, 0.0), &[root, c(-0.5, 0.0)]).unwrap();
        let mut ctr = EvalCounter::new();
        let g = square(-1.0, -1.0, 1.0, 1.0);
        if let WindingOutcome::SingularError { guarantee, .. } = count_roots(&g, &f, q, &mut ctr) {
            assert_eq!(guarantee, SQRT_2 / (4.0 * q));
            // distance of the root to the boundary is q/20
            let kappa = 1.0 / (q / 20.0) + 1.0 / 0.5;
            assert!(kappa >= guarantee);
        }
    }

    #[test]
    fn initial_sample_layout() {
        let g = square(0.0, 0.0, 1.0, 1.0);
        assert_eq!(
            initial_samples(&g),
            vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]
        );

        let tri = ConvexRegion::new(vec![c(0.0, 0.0), c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        let g = tri.boundary();
        assert_eq!(g.perimeter(), 12.0);
        let params = initial_samples(&g);
        assert!(params
            .windows(2)
            .all(|w| w[1] - w[0] <= 1.5 + 1e-12 && w[0] < w[1]));

        let thin = ConvexRegion::new(vec![c(0.0, 0.0), c(10.0, 0.0), c(10.0, 1e-6), c(0.0, 1e-6)])
            .unwrap();
        let g = thin.boundary();
        let params = initial_samples(&g);
        for &corner in g.corner_params() {
            assert!(params.contains(&corner));
        }
        assert_eq!(params[params.len() - 1], g.perimeter());
    }
}
