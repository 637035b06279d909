//! Triangle functions on `Δ⁺` and checkers for the side conditions the
//! completeness results depend on.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distfn::{combine_pointwise, leq, leq_witness, probe_grid, sup_family, DistributionFn, PROB_EPS};
use crate::error::{Error, Result};
use crate::report::{Check, CheckReport};

/// Relative tolerance on breakpoint locations when comparing results that
/// were reached by different orders of floating-point addition.
pub const FN_EQ_TOL: f64 = 1e-9;

/// The built-in triangle functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TriangleFn {
    /// `x ↦ min(F(x), G(x))`
    #[serde(rename = "min")]
    Min,
    /// `x ↦ max(F(x) + G(x) - 1, 0)`
    #[serde(rename = "w")]
    W,
    /// `x ↦ F(x) G(x)`
    #[serde(rename = "prod")]
    Prod,
    /// `x ↦ sup_{u+v=x} min(F(u), G(v))`
    #[serde(rename = "convmin")]
    ConvMin,
}

impl TriangleFn {
    pub const ALL: [TriangleFn; 4] = [TriangleFn::Min, TriangleFn::W, TriangleFn::Prod, TriangleFn::ConvMin];

    pub fn name(self) -> &'static str {
        match self {
            TriangleFn::Min => "min",
            TriangleFn::W => "w",
            TriangleFn::Prod => "prod",
            TriangleFn::ConvMin => "convmin",
        }
    }

    /// `τ(F, G)`. Both arguments must lie in `Δ⁺`.
    pub fn apply(self, f: &DistributionFn, g: &DistributionFn) -> Result<DistributionFn> {
        f.require_distance()?;
        g.require_distance()?;
        let out = match self {
            TriangleFn::Min => pointwise(f, g, t_min),
            TriangleFn::W => pointwise(f, g, t_w),
            TriangleFn::Prod => pointwise(f, g, t_prod),
            TriangleFn::ConvMin => conv_min(f, g),
        }?;
        debug_assert!(out.is_distance());
        Ok(out)
    }
}

impl fmt::Display for TriangleFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TriangleFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TriangleFn::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown triangle function {s:?} (expected min, w, prod or convmin)")))
    }
}

/// A binary operation on distance functions. Implemented by [`TriangleFn`];
/// the checkers accept any implementation so they can be exercised on
/// deliberately broken operations.
pub trait TriangleOp {
    fn apply(&self, f: &DistributionFn, g: &DistributionFn) -> Result<DistributionFn>;
}

impl TriangleOp for TriangleFn {
    fn apply(&self, f: &DistributionFn, g: &DistributionFn) -> Result<DistributionFn> {
        TriangleFn::apply(*self, f, g)
    }
}

pub fn t_min(a: f64, b: f64) -> f64 {
    a.min(b)
}

pub fn t_prod(a: f64, b: f64) -> f64 {
    a * b
}

pub fn t_w(a: f64, b: f64) -> f64 {
    (a + b - 1.0).max(0.0)
}

fn pointwise(f: &DistributionFn, g: &DistributionFn, t: fn(f64, f64) -> f64) -> Result<DistributionFn> {
    combine_pointwise(&[f, g], |it| {
        let a = it.next().unwrap_or(0.0);
        let b = it.next().unwrap_or(0.0);
        t(a, b)
    })
}

/// Sup-min convolution of two distance functions.
///
/// For `x > 0`, `min(F(u), G(x-u)) >= min(v_i, w_j)` for some split iff
/// `x > b_i + c_j`, so the result jumps only at pairwise breakpoint sums.
fn conv_min(f: &DistributionFn, g: &DistributionFn) -> Result<DistributionFn> {
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(f.breakpoints().len() * g.breakpoints().len());
    for (b, v) in f.breakpoints().iter().zip(f.values()) {
        for (c, w) in g.breakpoints().iter().zip(g.values()) {
            pairs.push((b + c, v.min(*w)));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut breakpoints: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut level = 0.0_f64;
    for (sum, v) in pairs {
        level = level.max(v);
        match breakpoints.last() {
            Some(last) if *last == sum => *values.last_mut().expect("paired") = level,
            _ => {
                breakpoints.push(sum);
                values.push(level);
            }
        }
    }
    DistributionFn::make_step(breakpoints, values, 0.0)
}

fn same_fn(f: &DistributionFn, g: &DistributionFn) -> bool {
    f.pointwise_eq(g) || f.approx_eq(g, FN_EQ_TOL)
}

/// Identity, commutativity, associativity and monotonicity over every pair
/// and triple of `probes`.
pub fn check_identity_commutativity_monotonicity(tau: &impl TriangleOp, probes: &[DistributionFn]) -> Result<CheckReport> {
    if probes.len() < 3 {
        return Err(Error::InsufficientProbes { needed: 3, got: probes.len() });
    }
    let n = probes.len();
    let e0 = DistributionFn::eps_zero();
    let mut report = CheckReport::new();

    let mut identity = Check::pass("identity");
    for (i, f) in probes.iter().enumerate() {
        if !same_fn(&tau.apply(f, &e0)?, f) || !same_fn(&tau.apply(&e0, f)?, f) {
            identity = Check::fail("identity", format!("probe {i}: {f}"));
            break;
        }
    }
    report.push(identity);

    let mut table = Vec::with_capacity(n * n);
    for f in probes {
        for g in probes {
            table.push(tau.apply(f, g)?);
        }
    }
    let at = |i: usize, j: usize| &table[i * n + j];

    let commutes = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| !same_fn(at(i, j), at(j, i)));
    report.push(match commutes {
        None => Check::pass("commutativity"),
        Some((i, j)) => Check::fail("commutativity", format!("probes ({i}, {j})")),
    });

    let mut associativity = Check::pass("associativity");
    'assoc: for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let left = tau.apply(at(i, j), &probes[k])?;
                let right = tau.apply(&probes[i], at(j, k))?;
                if !same_fn(&left, &right) {
                    associativity = Check::fail("associativity", format!("probes ({i}, {j}, {k})"));
                    break 'assoc;
                }
            }
        }
    }
    report.push(associativity);

    let below: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| leq(&probes[i], &probes[j]))
        .collect();
    let mut monotonicity = Check::pass("monotonicity");
    'mono: for &(f1, f2) in &below {
        for &(g1, g2) in &below {
            if let Some(x) = leq_witness(at(f1, g1), at(f2, g2)) {
                monotonicity = Check::fail(
                    "monotonicity",
                    format!("F{f1} <= F{f2}, G{g1} <= G{g2} but tau differs at x = {x}"),
                );
                break 'mono;
            }
        }
    }
    report.push(monotonicity);
    Ok(report)
}

/// `τ(sup F_i, G) = sup τ(F_i, G)` for a finite family.
pub fn check_sup_continuous(tau: &impl TriangleOp, family: &[DistributionFn], g: &DistributionFn) -> Result<Check> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let refs: Vec<&DistributionFn> = family.iter().collect();
    let lhs = tau.apply(&sup_family(&refs)?, g)?;
    let images = family.iter().map(|f| tau.apply(f, g)).collect::<Result<Vec<_>>>()?;
    let rhs = sup_family(&images.iter().collect::<Vec<_>>())?;
    let discrepancy = lhs.max_discrepancy(&rhs);
    let check = if discrepancy <= PROB_EPS {
        Check::pass("sup-continuity")
    } else {
        Check::fail("sup-continuity", format!("tau(sup) = {lhs}, sup(tau) = {rhs}"))
    };
    Ok(check.with_margin(-discrepancy))
}

/// Condition (W) in its pointwise form `τ(F, G) >= W(F, G)`.
pub fn check_condition_w(tau: &impl TriangleOp, f: &DistributionFn, g: &DistributionFn) -> Result<Check> {
    let out = tau.apply(f, g)?;
    let (worst_x, margin) = probe_grid(&[f, g, &out], &[0.0])
        .into_iter()
        .filter(|x| *x > 0.0)
        .map(|x| (x, out.eval(x) - t_w(f.eval(x), g.eval(x))))
        .fold((0.0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
    let margin = if margin.is_finite() { margin } else { 0.0 };
    let check = if margin >= -PROB_EPS {
        Check::pass("condition-W")
    } else {
        Check::fail(
            "condition-W",
            format!("x = {worst_x}: tau = {}, W = {}", out.eval(worst_x), t_w(f.eval(worst_x), g.eval(worst_x))),
        )
    };
    Ok(check.with_margin(margin))
}

/// `sup_{t∈[0,1]} min(F(t x), G((1-t) x))`, computed over a uniform grid of
/// `t_grid_size` points refined with every `t` at which `t x` or `(1-t) x`
/// crosses a breakpoint, plus the midpoints between consecutive candidates.
/// Both factors are constant between candidates, so the supremum is exact.
pub fn serstnev_bound(f: &DistributionFn, g: &DistributionFn, x: f64, t_grid_size: usize) -> f64 {
    if x <= 0.0 {
        return f.eval(0.0).min(g.eval(0.0));
    }
    let steps = t_grid_size.max(2) - 1;
    let mut ts: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
    ts.extend(f.breakpoints().iter().map(|b| b / x).filter(|t| (0.0..=1.0).contains(t)));
    ts.extend(g.breakpoints().iter().map(|c| 1.0 - c / x).filter(|t| (0.0..=1.0).contains(t)));
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let value = |t: f64| f.eval(t * x).min(g.eval((1.0 - t) * x));
    let mut best = ts.iter().map(|t| value(*t)).fold(0.0, f64::max);
    for pair in ts.windows(2) {
        best = best.max(value(pair[0] + (pair[1] - pair[0]) / 2.0));
    }
    best
}

/// Probe abscissae for the Šerstnev inequality: breakpoints of both sides,
/// pairwise breakpoint sums, and midpoints, restricted to `x > 0`.
fn serstnev_probes(f: &DistributionFn, g: &DistributionFn, lhs: &DistributionFn) -> Vec<f64> {
    let sums: Vec<f64> = f
        .breakpoints()
        .iter()
        .flat_map(|b| g.breakpoints().iter().map(move |c| b + c))
        .chain([0.0])
        .collect();
    probe_grid(&[f, g, lhs], &sums).into_iter().filter(|x| *x > 0.0).collect()
}

/// The Šerstnev-type inequality `τ(F, G)(x) >= sup_t min(F(t x), G((1-t) x))`
/// at every probe `x > 0`.
pub fn check_serstnev_inequality(
    tau: &impl TriangleOp,
    f: &DistributionFn,
    g: &DistributionFn,
    t_grid_size: usize,
) -> Result<Check> {
    if t_grid_size < 2 {
        return Err(Error::OutOfRange(format!("t grid size {t_grid_size} must be at least 2")));
    }
    let lhs = tau.apply(f, g)?;
    let mut margin = f64::INFINITY;
    let mut witness = None;
    for x in serstnev_probes(f, g, &lhs) {
        let (left, right) = (lhs.eval(x), serstnev_bound(f, g, x, t_grid_size));
        if left - right < margin {
            margin = left - right;
            witness = Some(format!("x = {x}: tau = {left}, bound = {right}"));
        }
    }
    let margin = if margin.is_finite() { margin } else { 0.0 };
    let check = if margin >= -PROB_EPS {
        Check::pass("serstnev-inequality")
    } else {
        Check::fail("serstnev-inequality", witness.unwrap_or_default())
    };
    Ok(check.with_margin(margin))
}
