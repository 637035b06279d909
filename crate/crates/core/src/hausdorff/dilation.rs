use std::collections::BTreeSet;

use serde::Serialize;

use super::PointSet;
use crate::error::{Error, Result};
use crate::pmspace::validate_grid;
use crate::report::Check;
use crate::triangle::check_condition_w;

/// `A_ε = {q : F_pq(ε) > 1 - ε for some p ∈ A}`, for `0 < ε <= 1`.
pub fn dilate<'a>(a: &PointSet<'a>, eps: f64) -> Result<PointSet<'a>> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::RangeViolation { value: eps });
    }
    Ok(dilate_unchecked(a, eps))
}

/// The dilation at any positive level; above 1 it is the whole carrier.
pub(crate) fn dilate_unchecked<'a>(a: &PointSet<'a>, eps: f64) -> PointSet<'a> {
    let space = a.space;
    if eps > 1.0 {
        return PointSet::carrier(space);
    }
    let members = (0..space.len())
        .filter(|q| a.members.iter().any(|p| space.dist(*p, *q).eval(eps) > 1.0 - eps))
        .collect();
    PointSet { space, members }
}

/// The intersection of the dilations of a set over a grid of levels.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Closure {
    pub members: BTreeSet<usize>,
    /// First grid level from which the running intersection equals the set
    /// itself, if the grid reaches that far.
    pub stabilized_at: Option<f64>,
}

/// `cl A = ∩_ε A_ε` over a strictly decreasing positive grid.
pub fn closure_via_dilations(a: &PointSet<'_>, grid: &[f64]) -> Result<Closure> {
    validate_grid(grid)?;
    let target: BTreeSet<usize> = a.members.iter().copied().collect();
    let mut members: BTreeSet<usize> = (0..a.space.len()).collect();
    let mut stabilized_at = None;
    for &eps in grid {
        let level: BTreeSet<usize> = dilate_unchecked(a, eps).members.into_iter().collect();
        members = &members & &level;
        if stabilized_at.is_none() && members == target {
            stabilized_at = Some(eps);
        }
    }
    Ok(Closure { members, stabilized_at })
}

/// One instance of `A ⊂ B_ε ⇒ cl A ⊂ B_{2ε}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prop46Report {
    pub eps: f64,
    pub premise: bool,
    pub conclusion: bool,
    /// `B_{2ε}` is the whole carrier because `2ε > 1`.
    pub whole_carrier_branch: bool,
    /// Condition (W) on the distance functions the instance touches.
    pub condition_w: Check,
    pub passed: bool,
}

pub fn check_prop46_ii(a: &PointSet<'_>, b: &PointSet<'_>, eps: f64) -> Result<Prop46Report> {
    a.same_space(b)?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::RangeViolation { value: eps });
    }
    let space = a.space;
    let premise = a.is_subset(&dilate(b, eps)?);
    let closure = closure_via_dilations(a, &space.default_eps_grid())?;
    let whole_carrier_branch = 2.0 * eps > 1.0;
    let wide = dilate_unchecked(b, 2.0 * eps);
    let conclusion = closure.members.iter().all(|p| wide.contains(*p));

    let mut entries = Vec::new();
    for p in a.members.iter().chain(&b.members) {
        for q in 0..space.len() {
            let f = space.dist(*p, q);
            if !entries.contains(&f) {
                entries.push(f);
            }
        }
    }
    let tau = space.tau();
    let mut condition_w = Check::pass("condition-W");
    'pairs: for f in &entries {
        for g in &entries {
            let check = check_condition_w(&tau, f, g)?;
            if !check.passed {
                condition_w = check;
                break 'pairs;
            }
        }
    }
    Ok(Prop46Report { eps, premise, conclusion, whole_carrier_branch, condition_w, passed: !premise || conclusion })
}

/// Greedy cover of `A` by open neighborhoods `U_ε(z)`: repeatedly take the
/// first uncovered member of `A` and the first carrier point whose
/// neighborhood contains it.
pub fn finite_cover(a: &PointSet<'_>, eps: f64) -> Result<BTreeSet<usize>> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::RangeViolation { value: eps });
    }
    let space = a.space;
    let inside = |z: usize, p: usize| space.dist(z, p).eval(eps) > 1.0 - eps;
    let mut uncovered: Vec<usize> = a.members.clone();
    let mut cover = BTreeSet::new();
    while let Some(&first) = uncovered.first() {
        let z = (0..space.len()).find(|z| inside(*z, first)).expect("every point lies in its own neighborhood");
        cover.insert(z);
        uncovered.retain(|p| !inside(z, *p));
    }
    Ok(cover)
}
