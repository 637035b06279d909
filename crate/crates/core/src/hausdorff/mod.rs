//! The probabilistic Pompeiu-Hausdorff metric on nonempty subsets of a
//! finite PM space, and the set-level constructions built on it.

mod dilation;
mod limits;

use std::fmt;

use serde::Serialize;

pub use dilation::{check_prop46_ii, closure_via_dilations, dilate, finite_cover, Closure, Prop46Report};
pub use limits::{extract_chain, hausdorff_series, is_cauchy_sets, limit_set, Chain, ChainLevel, ChainStop, LimitReport};

use crate::distfn::{
    inf_family, leq_witness, left_regularize, pointwise_inf_raw, pointwise_min, probe_grid, sup_family, DistributionFn,
    RawStep, PROB_EPS,
};
use crate::error::{Error, Result};
use crate::pmspace::PMSpace;
use crate::report::{Check, CheckReport};
use crate::triangle::{check_sup_continuous, TriangleOp};

/// A nonempty subset of the carrier of a [`PMSpace`], stored as sorted
/// carrier indices.
#[derive(Clone, Debug)]
pub struct PointSet<'a> {
    space: &'a PMSpace,
    members: Vec<usize>,
}

impl PartialEq for PointSet<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.space, other.space) && self.members == other.members
    }
}

impl Eq for PointSet<'_> {}

impl<'a> PointSet<'a> {
    pub fn new(space: &'a PMSpace, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::EmptySet);
        }
        for p in &members {
            space.check_point(*p)?;
        }
        Ok(PointSet { space, members })
    }

    pub fn from_labels<S: AsRef<str>>(space: &'a PMSpace, labels: &[S]) -> Result<Self> {
        let members = labels.iter().map(|l| space.index_of(l.as_ref())).collect::<Result<Vec<_>>>()?;
        Self::new(space, members)
    }

    pub fn carrier(space: &'a PMSpace) -> Self {
        PointSet { space, members: (0..space.len()).collect() }
    }

    pub fn space(&self) -> &'a PMSpace {
        self.space
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, p: usize) -> bool {
        self.members.binary_search(&p).is_ok()
    }

    pub fn is_subset(&self, other: &PointSet<'_>) -> bool {
        self.members.iter().all(|p| other.contains(*p))
    }

    pub fn labels(&self) -> Vec<&str> {
        self.members.iter().map(|p| self.space.label(*p)).collect()
    }

    pub(crate) fn same_space(&self, other: &PointSet<'_>) -> Result<()> {
        if std::ptr::eq(self.space, other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }
}

impl fmt::Display for PointSet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().join(", "))
    }
}

/// The raw infimum `Γ*_AB` and its left regularization `F*_AB`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExcessResult {
    pub gamma_raw: RawStep,
    pub regularized: DistributionFn,
}

/// `F_pB = sup_{q∈B} F_pq`.
pub fn dist_point_set(p: usize, b: &PointSet<'_>) -> Result<DistributionFn> {
    let space = b.space;
    space.check_point(p)?;
    let row: Vec<&DistributionFn> = b.members.iter().map(|q| space.dist(p, *q)).collect();
    sup_family(&row)
}

/// The excess of `A` over `B`: `F*_AB = ℓ⁻ inf_{p∈A} F_pB`.
pub fn excess(a: &PointSet<'_>, b: &PointSet<'_>) -> Result<ExcessResult> {
    a.same_space(b)?;
    let rows = a.members.iter().map(|p| dist_point_set(*p, b)).collect::<Result<Vec<_>>>()?;
    let refs: Vec<&DistributionFn> = rows.iter().collect();
    let gamma_raw = pointwise_inf_raw(&refs)?;
    let regularized = left_regularize(&gamma_raw)?;
    // Finite infima of left-continuous steps are already left-continuous.
    debug_assert!(gamma_raw.is_left_continuous());
    Ok(ExcessResult { gamma_raw, regularized })
}

/// `F_AB = min(F*_AB, F*_BA)`.
pub fn hausdorff_distance(a: &PointSet<'_>, b: &PointSet<'_>) -> Result<DistributionFn> {
    let forward = excess(a, b)?.regularized;
    let backward = excess(b, a)?.regularized;
    Ok(pointwise_min(&forward, &backward))
}

/// The diameter `D_A` of a set and whether the set is bounded.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diameter {
    pub function: DistributionFn,
    /// `sup_t D_A(t) = 1`.
    pub bounded: bool,
}

/// `D_A = ℓ⁻ inf_{p,p'∈A} F_pp'`.
pub fn diameter(a: &PointSet<'_>) -> Result<Diameter> {
    let space = a.space;
    let pairs: Vec<&DistributionFn> =
        a.members.iter().flat_map(|p| a.members.iter().map(move |q| space.dist(*p, *q))).collect();
    let function = inf_family(&pairs)?;
    let bounded = function.last_value() >= 1.0;
    Ok(Diameter { function, bounded })
}

/// Chooses, for every `p ∈ A`, the first `q ∈ B` in carrier order with
/// `F_pq(s) > 1 - s`, and symmetrically for `B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witnesses {
    pub forward: Vec<(usize, usize)>,
    pub backward: Vec<(usize, usize)>,
}

pub fn witnesses(a: &PointSet<'_>, b: &PointSet<'_>, s: f64) -> Result<Witnesses> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::OutOfRange(format!("witness level {s} must lie in (0, 1)")));
    }
    let h = hausdorff_distance(a, b)?;
    if h.eval(s) <= 1.0 - s {
        return Err(Error::PreconditionNotMet {
            level: None,
            detail: format!("F_AB({s}) = {} <= {}", h.eval(s), 1.0 - s),
        });
    }
    let space = a.space;
    let pick = |from: &PointSet<'_>, to: &PointSet<'_>| -> Vec<(usize, usize)> {
        from.members
            .iter()
            .map(|p| {
                let q = to.members.iter().copied().find(|q| space.dist(*p, *q).eval(s) > 1.0 - s);
                (*p, q.expect("the Hausdorff level guarantees a witness"))
            })
            .collect()
    };
    Ok(Witnesses { forward: pick(a, b), backward: pick(b, a) })
}

/// Least value of `hi - lo` over probe points `x > 0`, with the abscissa.
fn worst_slack(knots: &[&DistributionFn], lo: impl Fn(f64) -> f64, hi: impl Fn(f64) -> f64) -> (f64, f64) {
    probe_grid(knots, &[0.0])
        .into_iter()
        .filter(|x| *x > 0.0)
        .map(|x| (x, hi(x) - lo(x)))
        .fold((0.0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc })
}

fn slack_check(name: &str, (x, margin): (f64, f64)) -> Check {
    let margin = if margin.is_finite() { margin } else { 0.0 };
    let check = if margin >= -PROB_EPS { Check::pass(name) } else { Check::fail(name, format!("x = {x}")) };
    check.with_margin(margin)
}

/// `F_pB >= τ(F_pA, F*_AB)` and `F_pB >= Γ*_AB >= F*_AB >= F_AB`.
///
/// The comparison `F_pB >= Γ*_AB` is a statement about points of `A`; for
/// `p ∉ A` the check passes with a note.
pub fn check_prop43(p: usize, a: &PointSet<'_>, b: &PointSet<'_>) -> Result<CheckReport> {
    a.same_space(b)?;
    let tau = a.space.tau();
    let f_pb = dist_point_set(p, b)?;
    let f_pa = dist_point_set(p, a)?;
    let ex = excess(a, b)?;
    let f_ab = hausdorff_distance(a, b)?;
    let bound = tau.apply(&f_pa, &ex.regularized)?;
    let gamma = &ex.gamma_raw;
    let gamma_fn = &ex.regularized;
    let knots = [&f_pb, &f_pa, gamma_fn, &f_ab, &bound];

    let mut report = CheckReport::new();
    report.push(slack_check("tau-inequality", worst_slack(&knots, |x| bound.eval(x), |x| f_pb.eval(x))));
    if a.contains(p) {
        report.push(slack_check("distance-dominates-gamma", worst_slack(&knots, |x| gamma.eval(x), |x| f_pb.eval(x))));
    } else {
        report.push(Check::pass("distance-dominates-gamma").with_witness("not applicable: p is not in A"));
    }
    report.push(slack_check("gamma-dominates-excess", worst_slack(&knots, |x| gamma_fn.eval(x), |x| gamma.eval(x))));
    report.push(slack_check("excess-dominates-hausdorff", worst_slack(&knots, |x| f_ab.eval(x), |x| gamma_fn.eval(x))));
    Ok(report)
}

/// PM1-PM4 for the Hausdorff metric over a list of sets.
pub fn check_hausdorff_axioms(sets: &[PointSet<'_>]) -> Result<CheckReport> {
    let Some(first) = sets.first() else {
        return Err(Error::EmptyFamily);
    };
    let tau = first.space.tau();
    let mut report = sup_continuity_precondition(first.space)?;
    report.extend(check_hausdorff_axioms_with(sets, &tau, hausdorff_distance)?);
    Ok(report)
}

/// Sup-continuity of the space's triangle function on the families of
/// distinct entries that the Hausdorff construction takes suprema over.
fn sup_continuity_precondition(space: &PMSpace) -> Result<CheckReport> {
    let mut entries: Vec<DistributionFn> = Vec::new();
    for row in space.matrix() {
        for f in row {
            if !entries.contains(f) {
                entries.push(f.clone());
            }
        }
    }
    let tau = space.tau();
    let mut failure = None;
    for g in &entries {
        let check = check_sup_continuous(&tau, &entries, g)?;
        if !check.passed {
            failure = Some(check);
            break;
        }
    }
    let mut report = CheckReport::new();
    report.push(failure.unwrap_or_else(|| Check::pass("sup-continuity")));
    Ok(report)
}

/// PM1-PM4 over every pair and ordered triple of `sets` for an arbitrary
/// set-distance `h`, so the harness itself can be exercised with a faulty `h`.
pub fn check_hausdorff_axioms_with<'a, H>(sets: &[PointSet<'a>], tau: &impl TriangleOp, h: H) -> Result<CheckReport>
where
    H: Fn(&PointSet<'a>, &PointSet<'a>) -> Result<DistributionFn>,
{
    let k = sets.len();
    for s in sets {
        sets[0].same_space(s)?;
    }
    let mut matrix = Vec::with_capacity(k);
    for a in sets {
        matrix.push(sets.iter().map(|b| h(a, b)).collect::<Result<Vec<_>>>()?);
    }
    let pairs = || (0..k).flat_map(|i| (0..k).map(move |j| (i, j)));
    let named = |name: &str, witness: Option<String>| match witness {
        None => Check::pass(name),
        Some(w) => Check::fail(name, w),
    };
    let mut report = CheckReport::new();
    let pm1 = (0..k).find(|&i| !matrix[i][i].is_eps_zero());
    report.push(named("PM1", pm1.map(|i| format!("H({0}, {0}) = {1}", sets[i], matrix[i][i]))));
    let pm2 = pairs().find(|&(i, j)| sets[i] != sets[j] && matrix[i][j].is_eps_zero());
    report.push(named("PM2", pm2.map(|(i, j)| format!("H({}, {}) = ε₀", sets[i], sets[j]))));
    let pm3 = pairs().find(|&(i, j)| i < j && !matrix[i][j].pointwise_eq(&matrix[j][i]));
    report.push(named("PM3", pm3.map(|(i, j)| format!("H({0}, {1}) != H({1}, {0})", sets[i], sets[j]))));
    let mut pm4 = None;
    'triples: for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                let bound = tau.apply(&matrix[i][j], &matrix[j][l])?;
                if let Some(x) = leq_witness(&bound, &matrix[i][l]) {
                    pm4 = Some(format!("({}, {}, {}) at x = {x}", sets[i], sets[j], sets[l]));
                    break 'triples;
                }
            }
        }
    }
    report.push(named("PM4", pm4));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangle::TriangleFn;

    pub(crate) fn line(points: &[f64]) -> PMSpace {
        let metric: Vec<Vec<f64>> = points.iter().map(|a| points.iter().map(|b| (a - b).abs()).collect()).collect();
        PMSpace::from_metric(points.iter().map(|p| p.to_string()).collect(), &metric).unwrap()
    }

    fn set<'a>(space: &'a PMSpace, labels: &[&str]) -> PointSet<'a> {
        PointSet::from_labels(space, labels).unwrap()
    }

    fn us(a: f64) -> DistributionFn {
        DistributionFn::unit_step(a).unwrap()
    }

    #[test]
    fn point_to_set() {
        let space = line(&[0.0, 1.0, 3.0]);
        assert_eq!(dist_point_set(0, &set(&space, &["1", "3"])).unwrap(), us(1.0));
        assert!(dist_point_set(0, &set(&space, &["0", "3"])).unwrap().is_eps_zero());
        assert_eq!(dist_point_set(0, &set(&space, &["3"])).unwrap(), *space.dist(0, 2));
        assert!(matches!(dist_point_set(9, &set(&space, &["3"])), Err(Error::UnknownPoint(_))));
    }

    #[test]
    fn excess_and_distance() {
        let space = line(&[0.0, 1.0, 3.0]);
        let (a, b) = (set(&space, &["0"]), set(&space, &["1", "3"]));
        assert_eq!(excess(&b, &a).unwrap().regularized, us(3.0));
        assert_eq!(excess(&a, &b).unwrap().regularized, us(1.0));
        assert!(excess(&a, &PointSet::carrier(&space)).unwrap().regularized.is_eps_zero());
        assert_eq!(hausdorff_distance(&a, &b).unwrap(), us(3.0));
        assert!(hausdorff_distance(&b, &b).unwrap().is_eps_zero());
        let (p, q) = (set(&space, &["1"]), set(&space, &["3"]));
        assert_eq!(hausdorff_distance(&p, &q).unwrap(), *space.dist(1, 2));
    }

    #[test]
    fn empty_and_foreign_sets_are_rejected() {
        let space = line(&[0.0, 1.0]);
        let other = line(&[0.0, 1.0]);
        assert_eq!(PointSet::new(&space, []), Err(Error::EmptySet));
        assert_eq!(
            hausdorff_distance(&PointSet::carrier(&space), &PointSet::carrier(&other)),
            Err(Error::SpaceMismatch)
        );
    }

    #[test]
    fn axioms_hold_on_all_subsets() {
        let space = line(&[0.0, 1.0, 3.0]);
        let sets: Vec<PointSet> = (1u32..8).map(|mask| PointSet::new(&space, (0..3).filter(|i| mask >> i & 1 == 1)).unwrap()).collect();
        let report = check_hausdorff_axioms(&sets).unwrap();
        assert!(report.passed(), "{report:?}");
        let singletons: Vec<PointSet> = (0..3).map(|p| PointSet::new(&space, [p]).unwrap()).collect();
        assert!(check_hausdorff_axioms(&singletons).unwrap().passed());
    }

    #[test]
    fn corrupted_distance_is_caught() {
        let space = line(&[0.0, 1.0, 3.0]);
        let sets: Vec<PointSet> = (1u32..8).map(|mask| PointSet::new(&space, (0..3).filter(|i| mask >> i & 1 == 1)).unwrap()).collect();
        // Only the forward excess: not symmetric, and fails PM2 on nested sets.
        let report = check_hausdorff_axioms_with(&sets, &TriangleFn::ConvMin, |a, b| Ok(excess(a, b)?.regularized)).unwrap();
        assert!(!report.get("PM2").unwrap().passed);
        assert!(!report.get("PM3").unwrap().passed);
        // Squaring every threshold breaks the triangle inequality.
        let squared = |a: &PointSet, b: &PointSet| {
            let h = hausdorff_distance(a, b)?;
            let t = h.breakpoints().first().copied().unwrap_or(0.0);
            if h.is_eps_zero() {
                Ok(h)
            } else {
                DistributionFn::unit_step(t * t)
            }
        };
        let report = check_hausdorff_axioms_with(&sets, &TriangleFn::ConvMin, squared).unwrap();
        let pm4 = report.get("PM4").unwrap();
        assert!(!pm4.passed);
        assert!(pm4.witness.as_deref().unwrap().starts_with("({0}, {1}, {3})"), "{pm4:?}");
    }

    #[test]
    fn excess_chain_on_the_worked_example() {
        let space = line(&[0.0, 1.0, 3.0]);
        let report = check_prop43(0, &set(&space, &["0", "1"]), &set(&space, &["1", "3"])).unwrap();
        assert!(report.passed(), "{report:?}");
        let report = check_prop43(2, &set(&space, &["0"]), &set(&space, &["3"])).unwrap();
        assert!(report.passed());
        assert!(report.get("distance-dominates-gamma").unwrap().witness.is_some());
    }

    #[test]
    fn witness_maps() {
        let space = line(&[0.0, 1.0, 3.0]);
        let err = witnesses(&set(&space, &["0"]), &set(&space, &["1", "3"]), 0.9).unwrap_err();
        assert!(matches!(err, Error::PreconditionNotMet { level: None, .. }));

        let small = line(&[0.0, 0.125, 0.375]);
        let w = witnesses(&set(&small, &["0"]), &set(&small, &["0.125", "0.375"]), 0.5).unwrap();
        assert_eq!(w.forward, vec![(0, 1)]);
        assert_eq!(w.backward, vec![(1, 0), (2, 0)]);

        let all = PointSet::carrier(&space);
        let w = witnesses(&all, &all, 0.3).unwrap();
        assert_eq!(w.forward, vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn diameters() {
        let space = line(&[0.0, 1.0, 3.0]);
        let d = diameter(&PointSet::carrier(&space)).unwrap();
        assert_eq!(d.function, us(3.0));
        assert!(d.bounded);
        assert!(diameter(&set(&space, &["1"])).unwrap().function.is_eps_zero());

        let e0 = DistributionFn::eps_zero();
        let far = DistributionFn::eps_inf();
        let names = vec!["p".to_string(), "q".to_string()];
        let space = PMSpace::build(names, vec![vec![e0.clone(), far.clone()], vec![far, e0]], TriangleFn::ConvMin).unwrap();
        assert!(!diameter(&PointSet::carrier(&space)).unwrap().bounded);
    }
}
