//! Distribution functions as finite left-continuous step functions.
//!
//! A [`DistributionFn`] stores a strictly increasing list of jump locations
//! together with the value taken on each half-open segment `(b[i], b[i+1]]`
//! and a `base_value` on `(-inf, b[0]]`. The value at `+inf` is always 1 and
//! the value at `-inf` is always 0, so the constant-zero function is the
//! improper distance function usually written `ε_∞`.
//!
//! Every predicate over finitely many step functions is decided exactly on a
//! probe grid: all breakpoints of all operands plus one interior point of
//! every open segment between them (see [`probe_grid`]).

mod levy;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use levy::{levy_distance, levy_feasible, weak_converges, WeakConvergence, DEFAULT_LEVY_TOL, LEVY_BRACKET};

/// Absolute tolerance for equality of probabilities.
pub const PROB_EPS: f64 = 1e-12;

/// A nondecreasing, left-continuous step function on the extended reals with
/// values in `[0, 1]`.
///
/// Values are kept in canonical form: no breakpoint leaves the value
/// unchanged, and probabilities within [`PROB_EPS`] of 0 or 1 are snapped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepData")]
pub struct DistributionFn {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    base_value: f64,
}

/// Unvalidated on-disk form of a distribution function.
#[derive(Clone, Debug, Deserialize)]
struct StepData {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    base_value: f64,
}

impl TryFrom<StepData> for DistributionFn {
    type Error = Error;

    fn try_from(data: StepData) -> Result<Self> {
        DistributionFn::make_step(data.breakpoints, data.values, data.base_value)
    }
}

fn check_probability(value: f64) -> Result<f64> {
    if !value.is_finite() || value < -PROB_EPS || value > 1.0 + PROB_EPS {
        return Err(Error::RangeViolation { value });
    }
    Ok(if value <= PROB_EPS {
        0.0
    } else if value >= 1.0 - PROB_EPS {
        1.0
    } else {
        value
    })
}

fn check_breakpoints(breakpoints: &[f64]) -> Result<()> {
    for (i, b) in breakpoints.iter().enumerate() {
        if !b.is_finite() || (i > 0 && breakpoints[i - 1] >= *b) {
            return Err(Error::UnsortedBreakpoints { index: i });
        }
    }
    Ok(())
}

impl DistributionFn {
    /// Validating constructor. `values[i]` is the value on
    /// `(breakpoints[i], breakpoints[i+1]]`, `base_value` the value on
    /// `(-inf, breakpoints[0]]`.
    pub fn make_step(breakpoints: Vec<f64>, values: Vec<f64>, base_value: f64) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::LengthMismatch(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        check_breakpoints(&breakpoints)?;
        let base_value = check_probability(base_value)?;
        let values = values.into_iter().map(check_probability).collect::<Result<Vec<_>>>()?;
        let mut previous = base_value;
        for (index, v) in values.iter().enumerate() {
            if *v < previous {
                return Err(Error::MonotonicityViolation { index });
            }
            previous = *v;
        }
        Ok(Self::canonical(breakpoints, values, base_value))
    }

    fn canonical(breakpoints: Vec<f64>, values: Vec<f64>, base_value: f64) -> Self {
        let mut kept_b = Vec::with_capacity(breakpoints.len());
        let mut kept_v = Vec::with_capacity(values.len());
        let mut last = base_value;
        for (b, v) in breakpoints.into_iter().zip(values) {
            if v - last > PROB_EPS {
                kept_b.push(b);
                kept_v.push(v);
                last = v;
            }
        }
        DistributionFn { breakpoints: kept_b, values: kept_v, base_value }
    }

    /// `ε₀`: 0 on `(-inf, 0]`, 1 on `(0, inf]`.
    pub fn eps_zero() -> Self {
        DistributionFn { breakpoints: vec![0.0], values: vec![1.0], base_value: 0.0 }
    }

    /// `ε_∞`: 0 on every finite argument.
    pub fn eps_inf() -> Self {
        DistributionFn { breakpoints: Vec::new(), values: Vec::new(), base_value: 0.0 }
    }

    /// The unit step `ε_a` jumping from 0 to 1 just after `a`.
    pub fn unit_step(a: f64) -> Result<Self> {
        if a.is_nan() || a < 0.0 {
            return Err(Error::NegativeThreshold(a));
        }
        if !a.is_finite() {
            return Ok(Self::eps_inf());
        }
        Ok(DistributionFn { breakpoints: vec![a], values: vec![1.0], base_value: 0.0 })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn base_value(&self) -> f64 {
        self.base_value
    }

    /// Value on the last (unbounded) segment, i.e. `lim_{x→∞} F(x)`.
    pub fn last_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(self.base_value)
    }

    /// Left-continuous evaluation on the extended reals.
    pub fn eval(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        let k = self.breakpoints.partition_point(|b| *b < x);
        if k == 0 {
            self.base_value
        } else {
            self.values[k - 1]
        }
    }

    /// The right limit `F(x+)`, the value on the open segment starting at `x`.
    pub fn right_value(&self, x: f64) -> f64 {
        let k = self.breakpoints.partition_point(|b| *b <= x);
        if k == 0 {
            self.base_value
        } else {
            self.values[k - 1]
        }
    }

    /// Membership in `Δ⁺`: vanishes on `(-inf, 0]`.
    pub fn is_distance(&self) -> bool {
        self.base_value == 0.0 && self.breakpoints.first().is_none_or(|b| *b >= 0.0)
    }

    /// Membership in `D⁺`: a distance function whose limit at infinity is 1.
    pub fn is_proper(&self) -> bool {
        self.is_distance() && self.last_value() == 1.0
    }

    pub fn is_eps_zero(&self) -> bool {
        self.approx_eq(&Self::eps_zero(), PROB_EPS)
    }

    pub(crate) fn require_distance(&self) -> Result<()> {
        if self.is_distance() {
            Ok(())
        } else {
            Err(Error::DomainViolation(self.to_string()))
        }
    }

    /// Structural equality with tolerance `tol` on values and relative
    /// tolerance `tol` on breakpoint locations.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.breakpoints.len() == other.breakpoints.len()
            && (self.base_value - other.base_value).abs() <= tol
            && self
                .breakpoints
                .iter()
                .zip(&other.breakpoints)
                .all(|(a, b)| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0))
            && self.values.iter().zip(&other.values).all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Largest pointwise discrepancy on the merged probe grid.
    pub fn max_discrepancy(&self, other: &Self) -> f64 {
        probe_grid(&[self, other], &[])
            .into_iter()
            .map(|x| (self.eval(x) - other.eval(x)).abs())
            .fold(0.0, f64::max)
    }

    /// Pointwise equality within [`PROB_EPS`] on the merged probe grid.
    pub fn pointwise_eq(&self, other: &Self) -> bool {
        self.max_discrepancy(other) <= PROB_EPS
    }

    /// `x ↦ F(x / factor)`: breakpoints multiplied by `factor`, values unchanged.
    pub fn scale_argument(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::OutOfRange(format!("scale factor {factor} must be positive")));
        }
        Ok(DistributionFn {
            breakpoints: self.breakpoints.iter().map(|b| b * factor).collect(),
            values: self.values.clone(),
            base_value: self.base_value,
        })
    }
}

impl fmt::Display for DistributionFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F(base {}", self.base_value)?;
        for (b, v) in self.breakpoints.iter().zip(&self.values) {
            write!(f, "; >{b}: {v}")?;
        }
        f.write_str(")")
    }
}

/// Sorted, deduplicated union of the breakpoints of `fs` and `extra`.
pub fn merged_breakpoints(fs: &[&DistributionFn], extra: &[f64]) -> Vec<f64> {
    let mut grid: Vec<f64> = fs
        .iter()
        .flat_map(|f| f.breakpoints.iter().copied())
        .chain(extra.iter().copied().filter(|x| x.is_finite()))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Exhaustive probe points for pointwise predicates over step functions:
/// every breakpoint, the midpoint of every bounded open segment, and one point
/// in each of the two unbounded segments.
pub fn probe_grid(fs: &[&DistributionFn], extra: &[f64]) -> Vec<f64> {
    let knots = merged_breakpoints(fs, extra);
    let (Some(first), Some(last)) = (knots.first(), knots.last()) else {
        return vec![0.0];
    };
    let mut grid = Vec::with_capacity(2 * knots.len() + 1);
    grid.push(first - 1.0);
    for pair in knots.windows(2) {
        grid.push(pair[0]);
        grid.push(pair[0] + (pair[1] - pair[0]) / 2.0);
    }
    grid.push(*last);
    grid.push(last + 1.0);
    grid
}

/// Combines functions pointwise with a nondecreasing operation.
pub(crate) fn combine_pointwise(fs: &[&DistributionFn], op: impl Fn(&mut dyn Iterator<Item = f64>) -> f64) -> Result<DistributionFn> {
    let knots = merged_breakpoints(fs, &[]);
    let base = op(&mut fs.iter().map(|f| f.base_value));
    let values = knots.iter().map(|b| op(&mut fs.iter().map(|f| f.right_value(*b)))).collect();
    DistributionFn::make_step(knots, values, base)
}

fn max_of(it: &mut dyn Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn min_of(it: &mut dyn Iterator<Item = f64>) -> f64 {
    it.fold(1.0, f64::min)
}

/// Pointwise supremum of a nonempty family.
pub fn sup_family(fs: &[&DistributionFn]) -> Result<DistributionFn> {
    if fs.is_empty() {
        return Err(Error::EmptyFamily);
    }
    combine_pointwise(fs, max_of)
}

/// Pointwise minimum of two functions (used for the symmetrised excess).
pub fn pointwise_min(f: &DistributionFn, g: &DistributionFn) -> DistributionFn {
    combine_pointwise(&[f, g], min_of).expect("min of two distribution functions is a distribution function")
}

/// The raw pointwise infimum `Γ` of a nonempty family, before left regularization.
pub fn pointwise_inf_raw(fs: &[&DistributionFn]) -> Result<RawStep> {
    if fs.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let breakpoints = merged_breakpoints(fs, &[]);
    let at_values = breakpoints.iter().map(|b| min_of(&mut fs.iter().map(|f| f.eval(*b)))).collect();
    let values = breakpoints.iter().map(|b| min_of(&mut fs.iter().map(|f| f.right_value(*b)))).collect();
    let base_value = min_of(&mut fs.iter().map(|f| f.base_value));
    Ok(RawStep { base_value, breakpoints, at_values, values })
}

/// Infimum of a nonempty family: the left regularization of the pointwise infimum.
pub fn inf_family(fs: &[&DistributionFn]) -> Result<DistributionFn> {
    let gamma = pointwise_inf_raw(fs)?;
    let regularized = left_regularize(&gamma)?;
    // A finite family of left-continuous functions has a left-continuous infimum.
    debug_assert!(gamma.is_left_continuous(), "pointwise infimum of a finite family was not left-continuous");
    Ok(regularized)
}

/// `F ≤ G` in the pointwise order of `Δ⁺`, i.e. `F(x) ≤ G(x)` for all `x > 0`.
pub fn leq(f: &DistributionFn, g: &DistributionFn) -> bool {
    leq_witness(f, g).is_none()
}

/// First probe point `x > 0` with `F(x) > G(x)`, if any.
pub fn leq_witness(f: &DistributionFn, g: &DistributionFn) -> Option<f64> {
    probe_grid(&[f, g], &[0.0])
        .into_iter()
        .filter(|x| *x > 0.0)
        .find(|x| f.eval(*x) > g.eval(*x) + PROB_EPS)
}

/// Nondecreasing step data whose value at a jump may differ from the
/// left-hand segment, as produced by a pointwise infimum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RawStep {
    pub base_value: f64,
    pub breakpoints: Vec<f64>,
    /// Value attained exactly at each breakpoint.
    pub at_values: Vec<f64>,
    /// Value on the open segment right of each breakpoint.
    pub values: Vec<f64>,
}

impl RawStep {
    pub fn eval(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        let k = self.breakpoints.partition_point(|b| *b < x);
        if k < self.breakpoints.len() && self.breakpoints[k] == x {
            return self.at_values[k];
        }
        if k == 0 {
            self.base_value
        } else {
            self.values[k - 1]
        }
    }

    /// True when every jump value equals the left-hand segment value.
    pub fn is_left_continuous(&self) -> bool {
        self.at_values.iter().enumerate().all(|(i, v)| {
            let left = if i == 0 { self.base_value } else { self.values[i - 1] };
            (v - left).abs() <= PROB_EPS
        })
    }
}

impl From<&DistributionFn> for RawStep {
    fn from(f: &DistributionFn) -> Self {
        let at_values = (0..f.breakpoints.len())
            .map(|i| if i == 0 { f.base_value } else { f.values[i - 1] })
            .collect();
        RawStep {
            base_value: f.base_value,
            breakpoints: f.breakpoints.clone(),
            at_values,
            values: f.values.clone(),
        }
    }
}

/// Left regularization `ℓ⁻Γ(x) = sup_{x' < x} Γ(x')`: keeps every segment
/// value and replaces each jump value by the value on its left.
pub fn left_regularize(raw: &RawStep) -> Result<DistributionFn> {
    let n = raw.breakpoints.len();
    if raw.at_values.len() != n || raw.values.len() != n {
        return Err(Error::LengthMismatch(format!(
            "{n} breakpoints, {} jump values, {} segment values",
            raw.at_values.len(),
            raw.values.len()
        )));
    }
    check_breakpoints(&raw.breakpoints)?;
    let mut previous = check_probability(raw.base_value)?;
    for i in 0..n {
        for v in [raw.at_values[i], raw.values[i]] {
            let v = check_probability(v)?;
            if v < previous {
                return Err(Error::MonotonicityViolation { index: i });
            }
            previous = v;
        }
    }
    DistributionFn::make_step(raw.breakpoints.clone(), raw.values.clone(), raw.base_value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(b: &[f64], v: &[f64], base: f64) -> DistributionFn {
        DistributionFn::make_step(b.to_vec(), v.to_vec(), base).unwrap()
    }

    #[test]
    fn empty_step_is_eps_inf() {
        let f = step(&[], &[], 0.0);
        assert_eq!(f, DistributionFn::eps_inf());
        assert_eq!(f.eval(1e300), 0.0);
        assert_eq!(f.eval(f64::INFINITY), 1.0);
        assert!(f.is_distance());
        assert!(!f.is_proper());
    }

    #[test]
    fn single_jump_at_zero_is_eps_zero() {
        let f = step(&[0.0], &[1.0], 0.0);
        assert_eq!(f, DistributionFn::eps_zero());
        assert!(f.is_proper());
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.eval(-3.0), 0.0);
    }

    #[test]
    fn rejects_decreasing_values() {
        assert_eq!(
            DistributionFn::make_step(vec![0.0], vec![0.5], 0.7),
            Err(Error::MonotonicityViolation { index: 0 })
        );
        assert_eq!(
            DistributionFn::make_step(vec![0.0, 1.0], vec![0.6, 0.5], 0.0),
            Err(Error::MonotonicityViolation { index: 1 })
        );
    }

    #[test]
    fn rejects_out_of_range_and_unsorted() {
        assert!(matches!(
            DistributionFn::make_step(vec![0.0], vec![1.5], 0.0),
            Err(Error::RangeViolation { .. })
        ));
        assert!(matches!(
            DistributionFn::make_step(vec![0.0], vec![0.5], -0.1),
            Err(Error::RangeViolation { .. })
        ));
        assert_eq!(
            DistributionFn::make_step(vec![1.0, 1.0], vec![0.5, 1.0], 0.0),
            Err(Error::UnsortedBreakpoints { index: 1 })
        );
        assert_eq!(
            DistributionFn::make_step(vec![2.0, 1.0], vec![0.5, 1.0], 0.0),
            Err(Error::UnsortedBreakpoints { index: 1 })
        );
        assert!(matches!(
            DistributionFn::make_step(vec![1.0], vec![], 0.0),
            Err(Error::LengthMismatch(_))
        ));
    }

    #[test]
    fn canonical_form_drops_flat_breakpoints() {
        let f = step(&[0.0, 1.0, 2.0], &[0.0, 0.5, 0.5], 0.0);
        assert_eq!(f.breakpoints(), &[1.0]);
        assert_eq!(f.values(), &[0.5]);
    }

    #[test]
    fn eval_is_left_continuous_at_jumps() {
        let f = DistributionFn::unit_step(2.0).unwrap();
        assert_eq!(f.eval(2.0), 0.0);
        assert_eq!(f.right_value(2.0), 1.0);
        assert_eq!(f.eval(2.0 + 1e-9), 1.0);
    }

    #[test]
    fn unit_step_family() {
        assert_eq!(DistributionFn::unit_step(0.0).unwrap(), DistributionFn::eps_zero());
        assert_eq!(DistributionFn::unit_step(3.0).unwrap().eval(3.1), 1.0);
        assert_eq!(DistributionFn::unit_step(-1.0), Err(Error::NegativeThreshold(-1.0)));
        let (three, one) = (DistributionFn::unit_step(3.0).unwrap(), DistributionFn::unit_step(1.0).unwrap());
        assert!(leq(&three, &one));
        assert!(!leq(&one, &three));
        assert_eq!(leq_witness(&one, &three), Some(2.0));
    }

    #[test]
    fn sup_and_inf_of_unit_steps() {
        let one = DistributionFn::unit_step(1.0).unwrap();
        let three = DistributionFn::unit_step(3.0).unwrap();
        assert_eq!(sup_family(&[&one, &three]).unwrap(), one);
        assert_eq!(inf_family(&[&one, &three]).unwrap(), three);
        assert_eq!(sup_family(&[&three]).unwrap(), three);
        assert_eq!(inf_family(&[&three]).unwrap(), three);
        assert_eq!(sup_family(&[]), Err(Error::EmptyFamily));
        assert_eq!(inf_family(&[]), Err(Error::EmptyFamily));
    }

    #[test]
    fn extremal_elements() {
        let f = step(&[0.5, 2.0], &[0.3, 1.0], 0.0);
        let e0 = DistributionFn::eps_zero();
        let einf = DistributionFn::eps_inf();
        assert_eq!(sup_family(&[&e0, &f]).unwrap(), e0);
        assert_eq!(inf_family(&[&f, &einf]).unwrap(), einf);
        assert!(leq(&f, &e0));
        assert!(leq(&einf, &f));
    }

    #[test]
    fn left_regularize_takes_left_limits() {
        // 1 on [1, inf): value attained at the jump.
        let raw = RawStep { base_value: 0.0, breakpoints: vec![1.0], at_values: vec![1.0], values: vec![1.0] };
        assert!(!raw.is_left_continuous());
        let g = left_regularize(&raw).unwrap();
        assert_eq!(g, DistributionFn::unit_step(1.0).unwrap());
        assert_eq!(g.eval(1.0), 0.0);
        assert!(g.eval(1.0) <= raw.eval(1.0));

        let raw = RawStep { base_value: 0.0, breakpoints: vec![2.0], at_values: vec![0.5], values: vec![0.5] };
        let g = left_regularize(&raw).unwrap();
        assert_eq!(g, step(&[2.0], &[0.5], 0.0));
        assert_eq!(g.eval(2.0), 0.0);
        assert_eq!(g.eval(2.0001), 0.5);
    }

    #[test]
    fn left_regularize_fixes_left_continuous_input() {
        let f = step(&[0.5, 2.0], &[0.3, 1.0], 0.0);
        let raw = RawStep::from(&f);
        assert!(raw.is_left_continuous());
        assert_eq!(left_regularize(&raw).unwrap(), f);
    }

    #[test]
    fn left_regularize_rejects_decreasing_input() {
        let raw = RawStep { base_value: 0.0, breakpoints: vec![1.0], at_values: vec![0.8], values: vec![0.5] };
        assert_eq!(left_regularize(&raw), Err(Error::MonotonicityViolation { index: 0 }));
    }

    #[test]
    fn probe_grid_covers_segments() {
        let f = step(&[1.0, 3.0], &[0.5, 1.0], 0.0);
        assert_eq!(probe_grid(&[&f], &[]), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(probe_grid(&[], &[]), vec![0.0]);
    }

    #[test]
    fn scale_argument_moves_breakpoints() {
        let f = step(&[1.0, 3.0], &[0.5, 1.0], 0.0);
        let g = f.scale_argument(2.0).unwrap();
        assert_eq!(g.breakpoints(), &[2.0, 6.0]);
        assert_eq!(g.values(), f.values());
        assert!(f.scale_argument(0.0).is_err());
    }

    #[test]
    fn json_round_trip_validates() {
        let f = step(&[0.5, 2.0], &[0.3, 1.0], 0.0);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"{"breakpoints":[0.5,2.0],"values":[0.3,1.0],"base_value":0.0}"#);
        let back: DistributionFn = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let bad = r#"{"breakpoints":[0.0],"values":[0.5],"base_value":0.7}"#;
        assert!(serde_json::from_str::<DistributionFn>(bad).is_err());
    }
}
