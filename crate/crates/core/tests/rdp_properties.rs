use proptest::prelude::*;
use windroot::geometry::ConvexRegion;
use windroot::oracle::{point_curve_distance, roots_reference};
use windroot::poly::{Complex, Polynomial};
use windroot::rdp::{rdp, rdp_with, RdpOptions};

fn instance() -> impl Strategy<Value = (Vec<Complex>, [f64; 4])> {
    let roots = prop::collection::vec((-2.0..2.0_f64, -2.0..2.0_f64), 1..=8).prop_map(|v| {
        v.into_iter()
            .map(|(a, b)| Complex::new(a, b))
            .collect::<Vec<_>>()
    });
    let rect = (-2.5..0.0_f64, -2.5..0.0_f64, 0.2..2.5_f64, 0.2..2.5_f64);
    (roots, rect).prop_map(|(r, (x0, y0, w, h))| (r, [x0, y0, x0 + w, y0 + h]))
}

fn separated(roots: &[Complex], region: &ConvexRegion) -> bool {
    let b = region.boundary();
    let apart = roots
        .iter()
        .enumerate()
        .all(|(i, a)| roots[i + 1..].iter().all(|b| (a - b).norm() > 1e-3));
    apart && roots.iter().all(|&z| point_curve_distance(z, &b) > 1e-2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn boxes_partition_the_roots((roots, r) in instance()) {
        let region = ConvexRegion::rect(r[0], r[1], r[2], r[3]).unwrap();
        prop_assume!(separated(&roots, &region));
        let f = Polynomial::from_roots(Complex::new(1.0, 0.0), &roots).unwrap();
        let accuracy = 1e-2;
        let run = rdp(&region, &f, accuracy).unwrap();
        let oracle = roots_reference(&f).unwrap();
        for (z, _) in oracle.roots.iter().filter(|(z, _)| region.contains(*z)) {
            prop_assert_eq!(run.boxes.iter().filter(|b| b.region.contains(*z)).count(), 1);
        }
        for b in &run.boxes {
            prop_assert!(b.region.diam_rect() < accuracy);
            prop_assert_eq!(oracle.count_inside(&b.region), b.count);
        }
        let total: usize = run.boxes.iter().map(|b| b.count).sum();
        prop_assert_eq!(total, oracle.count_inside(&region));
        prop_assert!(run.stats.max_level as f64 <= (region.diam_rect() / accuracy).log2() + 2.0);
        if total > 0 {
            prop_assert!(run.stats.pe as f64 <= run.stats.budget);
        }
    }

    // A root closer to an earlier edge than the singular-exit radius can
    // reject more than one line, so the shift is bounded only by the trial
    // range: n0 + 2 offsets, the farthest ceil((n0 + 1) / 2) steps out.
    #[test]
    fn cut_shift_stays_in_trial_range((roots, r) in instance()) {
        let region = ConvexRegion::rect(r[0], r[1], r[2], r[3]).unwrap();
        prop_assume!(separated(&roots, &region));
        let f = Polynomial::from_roots(Complex::new(1.0, 0.0), &roots).unwrap();
        let run = rdp(&region, &f, 1e-2).unwrap();
        if let Some(cfg) = &run.config {
            let bound = (cfg.attempts() - 1).div_ceil(2) as f64 * cfg.trial_step();
            for &o in &run.cut_offsets {
                prop_assert!(o <= bound * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn deterministic_and_thread_independent((roots, r) in instance()) {
        let region = ConvexRegion::rect(r[0], r[1], r[2], r[3]).unwrap();
        prop_assume!(separated(&roots, &region));
        let f = Polynomial::from_roots(Complex::new(0.5, -1.0), &roots).unwrap();
        let a = rdp(&region, &f, 1e-2).unwrap();
        let b = rdp(&region, &f, 1e-2).unwrap();
        let par = rdp_with(&region, &f, 1e-2, &RdpOptions { threads: 3, ..Default::default() }).unwrap();
        prop_assert_eq!(&a.boxes, &b.boxes);
        prop_assert_eq!(a.stats, b.stats);
        prop_assert_eq!(&a.boxes, &par.boxes);
        prop_assert_eq!(a.stats.max_level, par.stats.max_level);
        if !par.boxes.is_empty() {
            prop_assert!(par.stats.pe as f64 <= par.stats.budget);
        }
    }
}
