//! Cross-checks against independent brute-force computations.

use probmetric::distfn::{levy_distance, DistributionFn, DEFAULT_LEVY_TOL};
use probmetric::hausdorff::{check_hausdorff_axioms, diameter, hausdorff_distance, PointSet};
use probmetric::PMSpace;

/// Lévy distance to `ε₀` by scanning `h` and checking the band inequalities
/// on a dense abscissa grid.
fn levy_to_eps_zero_scan(f: &DistributionFn) -> f64 {
    let e0 = DistributionFn::eps_zero();
    let feasible = |h: f64| {
        let mut x = -1.0 / h;
        while x < 6.0_f64.min(1.0 / h) {
            if x > -1.0 / h && (f.eval(x) > e0.eval(x + h) + h || e0.eval(x) > f.eval(x + h) + h) {
                return false;
            }
            x += 1e-3;
        }
        true
    };
    let mut h = 1e-2;
    while h < 2.0 {
        if feasible(h) {
            return h;
        }
        h += 1e-2;
    }
    2.0
}

#[test]
fn levy_distance_to_unit_steps_matches_a_grid_scan() {
    for k in 1..=20 {
        let a = k as f64 / 10.0;
        let f = DistributionFn::unit_step(a).unwrap();
        let d = levy_distance(&DistributionFn::eps_zero(), &f, DEFAULT_LEVY_TOL).unwrap();
        let scan = levy_to_eps_zero_scan(&f);
        assert!((d - a.min(1.0)).abs() < 1e-6, "a = {a}: {d}");
        assert!((scan - a.min(1.0)).abs() <= 1.1e-2, "a = {a}: scan {scan}");
    }
}

fn line(points: &[f64]) -> PMSpace {
    let metric: Vec<Vec<f64>> = points.iter().map(|a| points.iter().map(|b| (a - b).abs()).collect()).collect();
    PMSpace::from_metric(points.iter().map(|p| p.to_string()).collect(), &metric).unwrap()
}

fn subsets(space: &PMSpace) -> Vec<PointSet<'_>> {
    let n = space.len();
    (1u32..1 << n).map(|mask| PointSet::new(space, (0..n).filter(|i| mask >> i & 1 == 1)).unwrap()).collect()
}

/// `max(sup_a inf_b d, sup_b inf_a d)`.
fn classical_hausdorff(points: &[f64], a: &[usize], b: &[usize]) -> f64 {
    let one_way = |x: &[usize], y: &[usize]| {
        x.iter()
            .map(|i| y.iter().map(|j| (points[*i] - points[*j]).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[test]
fn hausdorff_lifts_the_classical_distance() {
    let points = [0.0, 1.0, 3.0, 4.5, 8.0];
    let space = line(&points);
    let sets = subsets(&space);
    for a in &sets {
        for b in &sets {
            let h = classical_hausdorff(&points, a.members(), b.members());
            let expected = DistributionFn::unit_step(h).unwrap();
            assert_eq!(hausdorff_distance(a, b).unwrap(), expected, "{a} {b}");
        }
    }
    assert!(check_hausdorff_axioms(&sets).unwrap().passed());
}

#[test]
fn the_scaled_witness_example_embeds_exactly() {
    let space = line(&[0.0, 0.1, 0.3]);
    let a = PointSet::from_labels(&space, &["0"]).unwrap();
    let b = PointSet::from_labels(&space, &["0.1", "0.3"]).unwrap();
    let w = probmetric::hausdorff::witnesses(&a, &b, 0.5).unwrap();
    assert_eq!(w.forward, vec![(0, 1)]);
    assert_eq!(w.backward, vec![(1, 0), (2, 0)]);
}

#[test]
fn diameter_matches_the_classical_diameter() {
    let points = [0.0, 1.0, 3.0, 4.5];
    let space = line(&points);
    for a in subsets(&space) {
        let m = a.members();
        let classical = m.iter().flat_map(|i| m.iter().map(move |j| (points[*i] - points[*j]).abs())).fold(0.0, f64::max);
        let d = diameter(&a).unwrap();
        assert_eq!(d.function, DistributionFn::unit_step(classical).unwrap());
        assert!(d.bounded);
    }
}
