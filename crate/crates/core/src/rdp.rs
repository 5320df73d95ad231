//! Recursive division of a convex region into boxes smaller than a target
//! accuracy, each labelled with the number of roots it holds.
//!
//! A region is split by one horizontal cut and then one vertical cut on each
//! half. Each cut line starts at the midline between supporting lines and is
//! moved by multiples of `2 E Q` (alternating up/down, `E = n / sin(pi/8)`)
//! until the root count succeeds on both sides, so no cut passes close to a
//! root.

use std::f64::consts::SQRT_2;

use log::{debug, trace};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{Axis, ConvexRegion};
use crate::poly::{Complex, EvalCounter, Polynomial};
use crate::winding::{count_roots, WindingOutcome, SIN_PI_8};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RdpError {
    #[error("accuracy must be positive and finite, got {0}")]
    InvalidAccuracy(f64),
    #[error("the initial region is empty")]
    EmptyRegion,
    #[error(
        "initial region boundary passes too close to a root: singular exit at boundary \
         parameter t = {t} (point {}{:+}i); enlarge or shift the region",
        point.re, point.im
    )]
    InitialRegionSingular { t: f64, point: Complex },
    #[error("{axis:?} cut at level {level} failed for {attempts} trial offsets")]
    SubdivisionFailed {
        level: usize,
        axis: Axis,
        attempts: usize,
    },
    #[error("root counts of the parts ({parts}) do not add up to the parent's ({parent})")]
    CountMismatch { parent: i64, parts: i64 },
    #[error("recursion exceeded the level bound {0}")]
    DepthExceeded(usize),
}

/// Largest gap limit that keeps every cut within reach of the accuracy:
/// `A sin(pi/8) / (4 sqrt(2) n0 n)`.
pub fn choose_q(accuracy: f64, n0: usize, degree: usize) -> f64 {
    accuracy * SIN_PI_8 / (4.0 * SQRT_2 * n0 as f64 * degree as f64)
}

/// Simplified PE bound `30 n0 n / A + 21 n0 n (lg(dr/A) + 2)`.
pub fn pe_budget(n0: usize, degree: usize, accuracy: f64, diam_rect: f64) -> f64 {
    let nn = (n0 * degree) as f64;
    30.0 * nn / accuracy + 21.0 * nn * ((diam_rect / accuracy).log2() + 2.0)
}

/// Sharp PE bound from which [`pe_budget`] is rounded up.
pub fn pe_budget_sharp(n0: usize, degree: usize, accuracy: f64, diam_rect: f64) -> f64 {
    let nn = (n0 * degree) as f64;
    8.0 * SQRT_2 * nn / (accuracy * SIN_PI_8)
        + (4.0 + SQRT_2) * SQRT_2 * nn / SIN_PI_8 * ((diam_rect / accuracy).log2() + 2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RdpConfig {
    pub accuracy: f64,
    pub q: f64,
    /// Roots inside the initial region.
    pub n0: usize,
    pub degree: usize,
    pub max_level: usize,
}

impl RdpConfig {
    /// `Q` is chosen for `n0` rounded up to even: the trial sequence
    /// `0, +2EQ, -2EQ, ...` with at most `n0` rejections reaches
    /// `2 ceil(n0/2) E Q`, and that is the shift the depth bound must absorb.
    pub fn new(accuracy: f64, n0: usize, degree: usize, diam_rect: f64) -> Self {
        Self {
            accuracy,
            q: choose_q(accuracy, even_up(n0), degree),
            n0,
            degree,
            max_level: Self::level_bound(diam_rect, accuracy),
        }
    }

    fn level_bound(diam_rect: f64, accuracy: f64) -> usize {
        (diam_rect / accuracy).log2().ceil().max(0.0) as usize + 2
    }

    /// Spacing `2 E Q` between successive trial cut lines.
    pub fn trial_step(&self) -> f64 {
        2.0 * self.degree as f64 / SIN_PI_8 * self.q
    }

    /// Trial offsets tried per cut before giving up: more than `n0 + 1`
    /// failures means the count is inconsistent.
    pub fn attempts(&self) -> usize {
        self.n0 + 2
    }

    /// Largest shift reachable with at most `n0` rejected trials,
    /// `2 ceil(n0/2) E Q`.
    pub fn max_shift(&self) -> f64 {
        even_up(self.n0) as f64 * self.degree as f64 / SIN_PI_8 * self.q
    }
}

fn even_up(n: usize) -> usize {
    n + n % 2
}

/// Offset of trial `k`: `0, +s, -s, +2s, -2s, ...`.
pub fn trial_offset(k: usize, step: f64) -> f64 {
    let m = k.div_ceil(2) as f64;
    if k % 2 == 1 {
        m * step
    } else {
        -m * step
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootBox {
    pub region: ConvexRegion,
    pub count: usize,
    pub level: usize,
}

/// One region processed by the recursion, for reporting and drawing.
#[derive(Debug, Clone, PartialEq)]
pub struct Visit {
    pub region: ConvexRegion,
    pub level: usize,
    pub count: usize,
}

/// One call of the root counter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpsrRecord {
    pub perimeter: f64,
    pub q: f64,
    pub insertions: usize,
    pub normal: bool,
}

impl IpsrRecord {
    /// Whether the insertion count is strictly below `floor(per / Q + 1)`.
    pub fn within_bound(&self) -> bool {
        (self.insertions as f64) < (self.perimeter / self.q + 1.0).floor()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RdpStats {
    pub pe: u64,
    pub max_level: usize,
    pub boxes: usize,
    pub budget: f64,
}

#[derive(Debug, Clone)]
pub struct RdpRun {
    /// Sorted by envelope center.
    pub boxes: Vec<RootBox>,
    pub stats: RdpStats,
    pub config: Option<RdpConfig>,
    pub visited: Vec<Visit>,
    pub ipsr_log: Vec<IpsrRecord>,
    /// Accepted `|offset|` of every cut.
    pub cut_offsets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RdpOptions {
    pub q_override: Option<f64>,
    /// Above 1, the four subregions of each division are processed
    /// concurrently on a pool of this many threads.
    pub threads: usize,
    pub memoize: bool,
}

impl Default for RdpOptions {
    fn default() -> Self {
        Self {
            q_override: None,
            threads: 1,
            memoize: true,
        }
    }
}

/// The four parts of one division with their root counts.
#[derive(Debug, Clone)]
pub struct Division {
    /// top-left, top-right, bottom-left, bottom-right
    pub parts: [ConvexRegion; 4],
    pub counts: [usize; 4],
    /// Accepted offsets: horizontal cut, vertical cut of the top half,
    /// vertical cut of the bottom half.
    pub offsets: [f64; 3],
}

#[derive(Default)]
struct Trace {
    boxes: Vec<RootBox>,
    visited: Vec<Visit>,
    ipsr_log: Vec<IpsrRecord>,
    cut_offsets: Vec<f64>,
    max_level: usize,
}

impl Trace {
    fn absorb(&mut self, other: Trace) {
        self.boxes.extend(other.boxes);
        self.visited.extend(other.visited);
        self.ipsr_log.extend(other.ipsr_log);
        self.cut_offsets.extend(other.cut_offsets);
        self.max_level = self.max_level.max(other.max_level);
    }
}

fn count_region(
    region: &ConvexRegion,
    f: &Polynomial,
    q: f64,
    ctr: &mut EvalCounter,
    log: &mut Vec<IpsrRecord>,
) -> Option<i64> {
    if region.is_empty() {
        return Some(0);
    }
    let boundary = region.boundary();
    let out = count_roots(&boundary, f, q, ctr);
    log.push(IpsrRecord {
        perimeter: boundary.perimeter(),
        q,
        insertions: out.insertions(),
        normal: out.index().is_some(),
    });
    out.index()
}

fn to_count(parent: i64, a: i64, b: i64) -> Result<(usize, usize), RdpError> {
    if a < 0 || b < 0 || a + b != parent {
        return Err(RdpError::CountMismatch {
            parent,
            parts: a + b,
        });
    }
    Ok((a as usize, b as usize))
}

// (first part, its count), (second part, its count), accepted offset
type Split = ((ConvexRegion, usize), (ConvexRegion, usize), f64);

struct Trials<'a> {
    f: &'a Polynomial,
    cfg: &'a RdpConfig,
    level: usize,
}

impl Trials<'_> {
    /// Cut at one offset; `None` if either part's count exits singular.
    fn try_cut(
        &self,
        region: &ConvexRegion,
        count: usize,
        axis: Axis,
        offset: f64,
        ctr: &mut EvalCounter,
        log: &mut Vec<IpsrRecord>,
    ) -> Result<Option<Split>, RdpError> {
        let (first, second) = region.cut(axis, offset);
        let Some(a) = count_region(&first, self.f, self.cfg.q, ctr, log) else {
            trace!("{axis:?} offset {offset:e} rejected on first part");
            return Ok(None);
        };
        let Some(b) = count_region(&second, self.f, self.cfg.q, ctr, log) else {
            trace!("{axis:?} offset {offset:e} rejected on second part");
            return Ok(None);
        };
        let (a, b) = to_count(count as i64, a, b)?;
        Ok(Some(((first, a), (second, b), offset)))
    }

    /// First trial offset whose cut counts without error.
    fn split(
        &self,
        region: &ConvexRegion,
        count: usize,
        axis: Axis,
        ctr: &mut EvalCounter,
        log: &mut Vec<IpsrRecord>,
    ) -> Result<Option<Split>, RdpError> {
        for k in 0..self.cfg.attempts() {
            let offset = trial_offset(k, self.cfg.trial_step());
            if let Some(s) = self.try_cut(region, count, axis, offset, ctr, log)? {
                if k > 0 {
                    debug!(
                        "{axis:?} cut at level {} accepted after {k} rejected offsets",
                        self.level
                    );
                }
                return Ok(Some(s));
            }
        }
        debug!(
            "{axis:?} cut failed on region with envelope {:?}",
            region.envelope()
        );
        Ok(None)
    }
}

// A horizontal cut that counts cleanly can still pass close to a root, and
// then every vertical cut of that half may fail on the shared edge. The
// horizontal trials therefore continue until both halves also split.
fn divide_at_q(
    region: &ConvexRegion,
    count: usize,
    level: usize,
    f: &Polynomial,
    cfg: &RdpConfig,
    ctr: &mut EvalCounter,
    log: &mut Vec<IpsrRecord>,
) -> Result<Result<Division, Axis>, RdpError> {
    let trials = Trials { f, cfg, level };
    let mut axis = Axis::Horizontal;
    for k in 0..cfg.attempts() {
        let h = trial_offset(k, cfg.trial_step());
        let Some(((top, ct), (bottom, cb), _)) =
            trials.try_cut(region, count, Axis::Horizontal, h, ctr, log)?
        else {
            continue;
        };
        let Some(((tl, ctl), (tr, ctr_), vt)) = trials.split(&top, ct, Axis::Vertical, ctr, log)?
        else {
            axis = Axis::Vertical;
            continue;
        };
        let Some(((bl, cbl), (br, cbr), vb)) =
            trials.split(&bottom, cb, Axis::Vertical, ctr, log)?
        else {
            axis = Axis::Vertical;
            continue;
        };
        if k > 0 {
            debug!("horizontal cut at level {level} accepted after {k} rejected offsets");
        }
        return Ok(Ok(Division {
            parts: [tl, tr, bl, br],
            counts: [ctl, ctr_, cbl, cbr],
            offsets: [h, vt, vb],
        }));
    }
    Ok(Err(axis))
}

/// Halvings of `Q` tried when a division fails outright.
const MAX_HALVINGS: i32 = 40;

// A successful count does not certify that a cut line keeps its distance
// from the roots. A root can end up closer to an edge from an earlier level
// than the singular-exit radius, and then no trial line at this level
// avoids an error. Halving Q for this one division shrinks that radius
// below the root's distance; the children continue with the original Q.
fn divide_logged(
    region: &ConvexRegion,
    count: usize,
    level: usize,
    f: &Polynomial,
    cfg: &RdpConfig,
    ctr: &mut EvalCounter,
    log: &mut Vec<IpsrRecord>,
) -> Result<Division, RdpError> {
    let mut local = cfg.clone();
    let mut axis = Axis::Horizontal;
    for halving in 0..=MAX_HALVINGS {
        local.q = cfg.q * 0.5f64.powi(halving);
        match divide_at_q(region, count, level, f, &local, ctr, log)? {
            Ok(division) => return Ok(division),
            Err(failed) => axis = failed,
        }
        debug!(
            "division at level {level} failed with Q = {:e} on envelope {:?}, halving Q",
            local.q,
            region.envelope()
        );
    }
    Err(RdpError::SubdivisionFailed {
        level,
        axis,
        attempts: cfg.attempts(),
    })
}

/// One horizontal and two vertical root-avoiding cuts of a region whose
/// boundary has already been counted (`count` roots).
pub fn divide(
    region: &ConvexRegion,
    count: usize,
    f: &Polynomial,
    cfg: &RdpConfig,
    ctr: &mut EvalCounter,
) -> Result<Division, RdpError> {
    divide_logged(region, count, 0, f, cfg, ctr, &mut Vec::new())
}

struct Recursion<'a> {
    f: &'a Polynomial,
    cfg: RdpConfig,
    parallel: bool,
}

impl Recursion<'_> {
    // `count` is the root count computed when the region was created; it is
    // not recomputed here.
    fn visit(
        &self,
        region: ConvexRegion,
        count: usize,
        level: usize,
        ctr: &mut EvalCounter,
        trace: &mut Trace,
    ) -> Result<(), RdpError> {
        if level > self.cfg.max_level {
            return Err(RdpError::DepthExceeded(self.cfg.max_level));
        }
        trace.max_level = trace.max_level.max(level);
        trace.visited.push(Visit {
            region: region.clone(),
            level,
            count,
        });
        if count == 0 {
            return Ok(());
        }
        if region.diam_rect() < self.cfg.accuracy {
            trace.boxes.push(RootBox {
                region,
                count,
                level,
            });
            return Ok(());
        }
        let division = divide_logged(
            &region,
            count,
            level,
            self.f,
            &self.cfg,
            ctr,
            &mut trace.ipsr_log,
        )?;
        trace
            .cut_offsets
            .extend(division.offsets.iter().map(|o| o.abs()));
        let children = division.parts.into_iter().zip(division.counts);
        if self.parallel {
            let results: Vec<_> = children
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|(part, c)| {
                    let mut local_ctr = ctr.fork();
                    let mut local = Trace::default();
                    self.visit(part, c, level + 1, &mut local_ctr, &mut local)
                        .map(|()| (local_ctr, local))
                })
                .collect();
            for r in results {
                let (local_ctr, local) = r?;
                ctr.merge(local_ctr);
                trace.absorb(local);
            }
        } else {
            for (part, c) in children {
                self.visit(part, c, level + 1, ctr, trace)?;
            }
        }
        Ok(())
    }
}

/// Finds every root of `f` in `region` up to `accuracy`, with default
/// options.
pub fn rdp(region: &ConvexRegion, f: &Polynomial, accuracy: f64) -> Result<RdpRun, RdpError> {
    rdp_with(region, f, accuracy, &RdpOptions::default())
}

pub fn rdp_with(
    region: &ConvexRegion,
    f: &Polynomial,
    accuracy: f64,
    options: &RdpOptions,
) -> Result<RdpRun, RdpError> {
    if !(accuracy > 0.0 && accuracy.is_finite()) {
        return Err(RdpError::InvalidAccuracy(accuracy));
    }
    if region.is_empty() {
        return Err(RdpError::EmptyRegion);
    }
    let mut ctr = if options.memoize {
        EvalCounter::new()
    } else {
        EvalCounter::without_memo()
    };
    let degree = f.degree();
    let dr = region.diam_rect();
    let mut ipsr_log = Vec::new();

    // n0 is unknown until the first count; n is a safe stand-in
    let boot_q = options
        .q_override
        .unwrap_or_else(|| choose_q(accuracy, degree, degree));
    let boundary = region.boundary();
    let n0 = match count_roots(&boundary, f, boot_q, &mut ctr) {
        WindingOutcome::Normal {
            index, insertions, ..
        } => {
            ipsr_log.push(IpsrRecord {
                perimeter: boundary.perimeter(),
                q: boot_q,
                insertions,
                normal: true,
            });
            if index < 0 {
                return Err(RdpError::CountMismatch {
                    parent: degree as i64,
                    parts: index,
                });
            }
            index as usize
        }
        WindingOutcome::SingularError { t, .. } => {
            return Err(RdpError::InitialRegionSingular {
                t,
                point: boundary.at(t),
            })
        }
    };

    let mut trace = Trace {
        ipsr_log,
        ..Default::default()
    };
    let config = if n0 == 0 {
        trace.visited.push(Visit {
            region: region.clone(),
            level: 0,
            count: 0,
        });
        None
    } else {
        let mut cfg = RdpConfig::new(accuracy, n0, degree, dr);
        if let Some(q) = options.q_override {
            cfg.q = q;
        }
        let recursion = Recursion {
            f,
            cfg: cfg.clone(),
            parallel: options.threads > 1,
        };
        if recursion.parallel {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(options.threads)
                .build()
                .expect("thread pool");
            pool.install(|| recursion.visit(region.clone(), n0, 0, &mut ctr, &mut trace))?;
        } else {
            recursion.visit(region.clone(), n0, 0, &mut ctr, &mut trace)?;
        }
        Some(cfg)
    };

    let mut boxes = trace.boxes;
    boxes.sort_by(|a, b| {
        let ca = center(&a.region);
        let cb = center(&b.region);
        ca.re.total_cmp(&cb.re).then(ca.im.total_cmp(&cb.im))
    });
    let stats = RdpStats {
        pe: ctr.evaluations(),
        max_level: trace.max_level,
        boxes: boxes.len(),
        budget: pe_budget(n0, degree, accuracy, dr),
    };
    Ok(RdpRun {
        boxes,
        stats,
        config,
        visited: trace.visited,
        ipsr_log: trace.ipsr_log,
        cut_offsets: trace.cut_offsets,
    })
}

fn center(region: &ConvexRegion) -> Complex {
    let [x0, y0, x1, y1] = region.envelope();
    Complex::new(0.5 * (x0 + x1), 0.5 * (y0 + y1))
}
