use std::collections::BTreeSet;

use serde::Serialize;

use super::dilation::{closure_via_dilations, dilate_unchecked};
use super::{hausdorff_distance, PointSet};
use crate::distfn::{levy_distance, DistributionFn};
use crate::error::{Error, Result};
use crate::pmspace::{tail_is_witnessed, tail_start, validate_grid, CauchyLevel, CauchyReport};

/// Deepest dyadic level a chain is extended to.
pub const MAX_CHAIN_LEVELS: usize = 48;

fn same_space(sets: &[PointSet<'_>]) -> Result<()> {
    let Some(first) = sets.first() else {
        return Err(Error::EmptyFamily);
    };
    sets.iter().try_for_each(|s| first.same_space(s))
}

fn hausdorff_matrix(sets: &[PointSet<'_>]) -> Result<Vec<Vec<DistributionFn>>> {
    sets.iter()
        .map(|a| sets.iter().map(|b| hausdorff_distance(a, b)).collect())
        .collect()
}

/// Zero-based start of the tail on which `F_{A_n A_m}(t) > 1 - t` for every pair.
fn level_start(h: &[Vec<DistributionFn>], t: f64) -> usize {
    tail_start(h.len(), |i, j| h[i][j].eval(t) <= 1.0 - t)
}

/// Finite-prefix Cauchy test for a sequence of sets under the Hausdorff metric.
pub fn is_cauchy_sets(sets: &[PointSet<'_>], t_grid: &[f64]) -> Result<CauchyReport> {
    same_space(sets)?;
    if sets.len() < 2 {
        return Err(Error::OutOfRange("a Cauchy test needs at least two terms".into()));
    }
    validate_grid(t_grid)?;
    let h = hausdorff_matrix(sets)?;
    let levels: Vec<CauchyLevel> = t_grid
        .iter()
        .map(|&t| {
            let n0 = level_start(&h, t);
            CauchyLevel { t, n0: n0 + 1, satisfied: tail_is_witnessed(n0, sets.len()) }
        })
        .collect();
    let passed = levels.iter().all(|l| l.satisfied);
    Ok(CauchyReport { levels, passed })
}

/// One link of an extracted chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainLevel {
    /// Level `k`, starting at 1.
    pub k: usize,
    /// `t / 2^(k-1)`.
    pub threshold: f64,
    /// `F_{p_k p_{k+1}}` at the threshold.
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", content = "level", rename_all = "kebab-case")]
pub enum ChainStop {
    /// The next index would run past the prefix.
    PrefixExhausted,
    /// The prefix does not witness the given dyadic level.
    LevelUnavailable(usize),
    LevelCap,
}

/// Indices `n_1 < n_2 < …` and points `p_k ∈ A_{n_k}` with
/// `F_{p_k p_{k+1}}(t/2^(k-1)) > 1 - t/2^(k-1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chain {
    pub indices: Vec<usize>,
    pub points: Vec<usize>,
    pub levels: Vec<ChainLevel>,
    pub stop: ChainStop,
}

/// Builds a chain through a set sequence, starting no earlier than
/// `start` (zero-based). Each level's index is the least admissible one and
/// each point is the first in carrier order that meets the level.
pub fn extract_chain(sets: &[PointSet<'_>], t: f64, start: usize) -> Result<Chain> {
    same_space(sets)?;
    if !(t > 0.0 && t < 0.5) {
        return Err(Error::OutOfRange(format!("chain level {t} must lie in (0, 1/2)")));
    }
    if start >= sets.len() {
        return Err(Error::OutOfRange(format!("start {start} is past the prefix of length {}", sets.len())));
    }
    let space = sets[0].space;
    let h = hausdorff_matrix(sets)?;
    let len = sets.len();
    let threshold = |k: usize| t / 2f64.powi(k as i32 - 1);
    let available = |k: usize| {
        let n0 = level_start(&h, threshold(k));
        tail_is_witnessed(n0, len).then_some(n0)
    };

    let Some(n0) = available(1) else {
        return Err(Error::PreconditionNotMet {
            level: Some(1),
            detail: format!("no tail of the prefix has F_(A_n A_m)({t}) > {} for all pairs", 1.0 - t),
        });
    };
    let first = start.max(n0);
    if first >= len {
        return Ok(Chain { indices: vec![], points: vec![], levels: vec![], stop: ChainStop::PrefixExhausted });
    }
    let mut indices = vec![first];
    let mut points = vec![sets[first].members[0]];
    let mut levels = Vec::new();
    let stop = loop {
        let k = indices.len();
        if k > MAX_CHAIN_LEVELS {
            break ChainStop::LevelCap;
        }
        // Index n_{k+1} must lie in the tail of levels k and k+1.
        let Some(next_start) = available(k + 1) else {
            break ChainStop::LevelUnavailable(k + 1);
        };
        let next = (indices[k - 1] + 1).max(next_start).max(level_start(&h, threshold(k)));
        if next >= len {
            break ChainStop::PrefixExhausted;
        }
        let tk = threshold(k);
        let p = points[k - 1];
        let q = sets[next]
            .members
            .iter()
            .copied()
            .find(|q| space.dist(p, *q).eval(tk) > 1.0 - tk)
            .expect("both indices lie in the level-k tail, so the excess guarantees a witness");
        levels.push(ChainLevel { k, threshold: tk, value: space.dist(p, q).eval(tk) });
        indices.push(next);
        points.push(q);
    };
    Ok(Chain { indices, points, levels, stop })
}

/// Both finite-prefix forms of the limit of a set sequence.
///
/// Tail positions range over `0..=len-2` (a tail must hold at least two
/// terms), and every "for all ε > 0" ranges over the supplied grid only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitReport {
    /// `∩_n cl(∪_{m≥n} A_m)`, closures taken over the grid.
    pub tail_union_closure: BTreeSet<usize>,
    /// `∩_ε ∪_n ∩_{m≥n} (A_m)_ε`.
    pub dilation_form: BTreeSet<usize>,
    pub agree: bool,
    pub grid: Vec<f64>,
    pub tail_positions: usize,
}

impl LimitReport {
    /// The limit as a point set, when both forms agree on a nonempty set.
    pub fn limit<'a>(&self, space: &'a crate::pmspace::PMSpace) -> Option<PointSet<'a>> {
        if !self.agree {
            return None;
        }
        PointSet::new(space, self.tail_union_closure.iter().copied()).ok()
    }
}

pub fn limit_set(sets: &[PointSet<'_>], grid: &[f64]) -> Result<LimitReport> {
    same_space(sets)?;
    validate_grid(grid)?;
    let space = sets[0].space;
    let tails = sets.len().saturating_sub(1).max(1);

    let mut tail_union_closure: Option<BTreeSet<usize>> = None;
    for n in 0..tails {
        let union = PointSet::new(space, sets[n..].iter().flat_map(|s| s.members.iter().copied()))?;
        let closed = closure_via_dilations(&union, grid)?.members;
        tail_union_closure = Some(match tail_union_closure {
            None => closed,
            Some(acc) => &acc & &closed,
        });
    }

    let dilated: Vec<Vec<BTreeSet<usize>>> = grid
        .iter()
        .map(|&eps| sets.iter().map(|s| dilate_unchecked(s, eps).members.into_iter().collect()).collect())
        .collect();
    let mut dilation_form: Option<BTreeSet<usize>> = None;
    for level in &dilated {
        let mut union = BTreeSet::new();
        for n in 0..tails {
            let tail = level[n + 1..].iter().fold(level[n].clone(), |acc, s| &acc & s);
            union.extend(tail);
        }
        dilation_form = Some(match dilation_form {
            None => union,
            Some(acc) => &acc & &union,
        });
    }

    let tail_union_closure = tail_union_closure.unwrap_or_default();
    let dilation_form = dilation_form.unwrap_or_default();
    Ok(LimitReport {
        agree: tail_union_closure == dilation_form,
        tail_union_closure,
        dilation_form,
        grid: grid.to_vec(),
        tail_positions: tails,
    })
}

/// `d_L(F_{A_n A}, ε₀)` along the sequence.
pub fn hausdorff_series(sets: &[PointSet<'_>], limit: &PointSet<'_>, tol: f64) -> Result<Vec<f64>> {
    let e0 = DistributionFn::eps_zero();
    sets.iter().map(|s| levy_distance(&hausdorff_distance(s, limit)?, &e0, tol)).collect()
}
