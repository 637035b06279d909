//! The modified Lévy metric `d_L` on distribution functions.
//!
//! `d_L(F, G)` is the infimum of all `h > 0` such that
//! `F(x-h) - h <= G(x) <= F(x+h) + h` and the same with `F` and `G` swapped
//! hold for every `x` in the open window `(-1/h, 1/h)`. Feasibility is
//! monotone in `h`, so the infimum is located by bisection.

use serde::Serialize;

use super::DistributionFn;
use crate::error::{Error, Result};

pub const DEFAULT_LEVY_TOL: f64 = 1e-9;

/// Initial bisection bracket. Every `h >= 1` is feasible, so `d_L <= 1`.
pub const LEVY_BRACKET: f64 = 2.0;

/// Whether `h` satisfies the band inequalities on the whole window.
///
/// Both sides of each inequality are left-continuous step functions of `x`
/// that jump only at breakpoints of `F` or `G` shifted by `0` or `±h`, so it
/// suffices to test those abscissae and one point of every open segment
/// between them inside the window.
pub fn levy_feasible(f: &DistributionFn, g: &DistributionFn, h: f64) -> bool {
    if !(h > 0.0) {
        return false;
    }
    let reach = 1.0 / h;
    let mut knots: Vec<f64> = Vec::with_capacity(3 * (f.breakpoints().len() + g.breakpoints().len()) + 2);
    for b in f.breakpoints().iter().chain(g.breakpoints()) {
        for x in [*b - h, *b, *b + h] {
            if x > -reach && x < reach {
                knots.push(x);
            }
        }
    }
    knots.push(-reach);
    knots.push(reach);
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    let holds = |x: f64| {
        f.eval(x - h) - h <= g.eval(x)
            && g.eval(x) <= f.eval(x + h) + h
            && g.eval(x - h) - h <= f.eval(x)
            && f.eval(x) <= g.eval(x + h) + h
    };
    knots.windows(2).all(|pair| {
        let mid = pair[0] + (pair[1] - pair[0]) / 2.0;
        // Interior knots take the value of the segment on their left.
        let knot_ok = pair[0] == -reach || holds(pair[0]);
        knot_ok && holds(mid)
    })
}

/// `d_L(F, G)` to within `tol`, by bisection on `[0, 2]`.
///
/// The returned value is the upper end of the final bracket, so it never
/// underestimates the true distance by more than rounding.
pub fn levy_distance(f: &DistributionFn, g: &DistributionFn, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    if f.pointwise_eq(g) {
        return Ok(0.0);
    }
    assert!(levy_feasible(f, g, LEVY_BRACKET), "h = {LEVY_BRACKET} must always be feasible");
    let (mut lo, mut hi) = (0.0_f64, LEVY_BRACKET);
    while hi - lo > tol {
        let mid = lo + (hi - lo) / 2.0;
        if levy_feasible(f, g, mid) {
            hi = mid;
        } else {
            debug_assert!(levy_feasible(f, g, hi), "Lévy feasibility is not monotone in h");
            lo = mid;
        }
    }
    Ok(hi)
}

/// Finite-prefix evidence for weak convergence `F_n →w F`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakConvergence {
    pub converged: bool,
    /// Zero-based position from which every distance stays below the threshold.
    pub first_index: Option<usize>,
    pub distances: Vec<f64>,
}

/// Reports whether `d_L(seq[n], target)` is eventually below `tol` on the prefix.
pub fn weak_converges(seq: &[DistributionFn], target: &DistributionFn, tol: f64) -> Result<WeakConvergence> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    if seq.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let distances = seq
        .iter()
        .map(|f| levy_distance(f, target, DEFAULT_LEVY_TOL))
        .collect::<Result<Vec<_>>>()?;
    let tail_start = distances.iter().rposition(|d| *d >= tol).map_or(0, |i| i + 1);
    let first_index = (tail_start < distances.len()).then_some(tail_start);
    Ok(WeakConvergence { converged: first_index.is_some(), first_index, distances })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn us(a: f64) -> DistributionFn {
        DistributionFn::unit_step(a).unwrap()
    }

    #[test]
    fn identical_functions_are_at_distance_zero() {
        let f = DistributionFn::make_step(vec![0.5, 2.0], vec![0.3, 1.0], 0.0).unwrap();
        assert_eq!(levy_distance(&f, &f, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn eps_zero_to_unit_step() {
        let d = levy_distance(&DistributionFn::eps_zero(), &us(0.5), 1e-9).unwrap();
        assert!((d - 0.5).abs() < 1e-8, "{d}");
    }

    #[test]
    fn eps_zero_to_eps_inf_is_one() {
        let d = levy_distance(&DistributionFn::eps_zero(), &DistributionFn::eps_inf(), 1e-9).unwrap();
        assert!((d - 1.0).abs() < 1e-8, "{d}");
    }

    #[test]
    fn rejects_bad_tolerance() {
        let f = us(1.0);
        assert_eq!(levy_distance(&f, &f, 0.0), Err(Error::NonPositiveTolerance(0.0)));
        assert!(weak_converges(&[f.clone()], &f, -1.0).is_err());
    }

    #[test]
    fn window_boundary_is_open() {
        // At h = 1 the only violated abscissae of ε₀ vs ε_∞ sit in (h, 1/h) = ∅.
        assert!(levy_feasible(&DistributionFn::eps_zero(), &DistributionFn::eps_inf(), 1.0));
        assert!(!levy_feasible(&DistributionFn::eps_zero(), &DistributionFn::eps_inf(), 0.999));
    }

    #[test]
    fn weak_convergence_of_shrinking_steps() {
        let seq: Vec<_> = (1..=64).map(|n| us(1.0 / n as f64)).collect();
        let report = weak_converges(&seq, &DistributionFn::eps_zero(), 0.05).unwrap();
        assert!(report.converged);
        // n = 21 is the first term with 1/n < 0.05.
        assert_eq!(report.first_index, Some(20));
    }

    #[test]
    fn constant_sequence_converges_immediately() {
        let f = us(0.7);
        let report = weak_converges(&[f.clone(), f.clone(), f.clone()], &f, 1e-3).unwrap();
        assert_eq!(report.first_index, Some(0));
    }

    #[test]
    fn alternating_sequence_does_not_converge() {
        let seq: Vec<_> = (0..20)
            .map(|i| if i % 2 == 0 { DistributionFn::eps_zero() } else { us(1.0) })
            .collect();
        let report = weak_converges(&seq, &DistributionFn::eps_zero(), 0.1).unwrap();
        assert!(!report.converged);
        assert!((report.distances[1] - 1.0).abs() < 1e-8);
    }
}
