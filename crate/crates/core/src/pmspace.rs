//! Finite probabilistic metric spaces.

use std::collections::{BTreeSet, HashSet};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::distfn::{leq_witness, weak_converges, DistributionFn, WeakConvergence};
use crate::error::{Axiom, Error, Result};
use crate::report::{Check, CheckReport};
use crate::triangle::TriangleFn;

/// How exhaustively PM4 is validated.
#[derive(Clone, Debug, Default)]
pub struct BuildOptions {
    /// Upper bound on the number of ordered triples checked for PM4. When the
    /// space has more triples, a seeded uniform sample of this size is
    /// checked instead and the report says so.
    pub max_triples: Option<usize>,
    pub seed: u64,
}

/// Result of validating a candidate space against PM1-PM4.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Validation {
    pub report: CheckReport,
    /// The first violation in axiom order, with its witness.
    #[serde(skip)]
    pub violation: Option<Error>,
    /// Number of PM4 triples checked when sampling was in effect.
    pub sampled_triples: Option<usize>,
}

/// A finite PM space `(L, ρ, τ)`: point labels, the matrix of `F_pq`, and a
/// triangle function.
#[derive(Clone, Debug, PartialEq)]
pub struct PMSpace {
    labels: Vec<String>,
    dist: Vec<Vec<DistributionFn>>,
    tau: TriangleFn,
}

/// A strong neighborhood `U_t(p)` (open) or `Ū_t(p)` (closed).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Neighborhood {
    pub center: usize,
    pub level: f64,
    pub closed: bool,
    pub members: BTreeSet<usize>,
}

/// Per-level outcome of a Cauchy test on a finite prefix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CauchyLevel {
    pub t: f64,
    /// One-based index of the first term of the tail on which every pair
    /// satisfies the level.
    pub n0: usize,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CauchyReport {
    pub levels: Vec<CauchyLevel>,
    pub passed: bool,
}

/// Least position `n0` such that no pair `n0 <= i < j < len` is bad.
pub(crate) fn tail_start(len: usize, mut bad: impl FnMut(usize, usize) -> bool) -> usize {
    let mut n0 = 0;
    for i in 0..len {
        for j in i + 1..len {
            if bad(i, j) {
                n0 = n0.max(i + 1);
            }
        }
    }
    n0
}

/// A level is supported by a prefix when its tail holds at least two terms;
/// a one-term tail satisfies every level vacuously.
pub(crate) fn tail_is_witnessed(n0: usize, len: usize) -> bool {
    n0 + 2 <= len
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidGrid(format!("grid {grid:?} must contain positive finite values")));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidGrid(format!("grid {grid:?} must be strictly decreasing")));
    }
    Ok(())
}

/// Empirical distance function `x ↦ #{j : d_j < x} / N` of a nonempty sample.
pub fn empirical_distance_fn(distances: &[f64]) -> Result<DistributionFn> {
    if distances.is_empty() {
        return Err(Error::LengthMismatch("empty sample".into()));
    }
    let mut sorted = distances.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut breakpoints = Vec::new();
    let mut values = Vec::new();
    for (i, d) in sorted.iter().enumerate() {
        if sorted.get(i + 1) != Some(d) {
            breakpoints.push(*d);
            values.push((i + 1) as f64 / n);
        }
    }
    DistributionFn::make_step(breakpoints, values, 0.0)
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl PMSpace {
    /// Validates PM1-PM4 exhaustively and returns the space.
    pub fn build(labels: Vec<String>, dist: Vec<Vec<DistributionFn>>, tau: TriangleFn) -> Result<Self> {
        Self::build_with(labels, dist, tau, &BuildOptions::default())
    }

    pub fn build_with(labels: Vec<String>, dist: Vec<Vec<DistributionFn>>, tau: TriangleFn, opts: &BuildOptions) -> Result<Self> {
        let validation = Self::validate(&labels, &dist, tau, opts)?;
        match validation.violation {
            Some(err) => Err(err),
            None => Ok(PMSpace { labels, dist, tau }),
        }
    }

    /// Full PM1-PM4 report for a candidate space. Structural problems
    /// (non-square matrix, duplicate labels) are errors; axiom failures are
    /// reported.
    pub fn validate(labels: &[String], dist: &[Vec<DistributionFn>], tau: TriangleFn, opts: &BuildOptions) -> Result<Validation> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptySet);
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::DuplicateLabel(dup.clone()));
        }
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::LengthMismatch(format!("distance matrix must be {n} x {n}")));
        }
        let mut report = CheckReport::new();
        let mut violation = None;
        let mut record = |report: &mut CheckReport, name: &str, failure: Option<(Error, String)>| match failure {
            None => report.push(Check::pass(name)),
            Some((err, witness)) => {
                report.push(Check::fail(name, witness));
                violation.get_or_insert(err);
            }
        };

        let pairs = || (0..n).flat_map(|p| (0..n).map(move |q| (p, q)));
        let outside = pairs().find(|&(p, q)| !dist[p][q].is_distance());
        record(
            &mut report,
            "distance-functions",
            outside.map(|(p, q)| {
                let w = format!("F({}, {}) = {}", labels[p], labels[q], dist[p][q]);
                (Error::DomainViolation(w.clone()), w)
            }),
        );

        let axiom = |axiom: Axiom, witness: &[usize]| {
            let names: Vec<String> = witness.iter().map(|i| labels[*i].clone()).collect();
            let text = names.join(", ");
            (Error::AxiomViolation { axiom, witness: names }, text)
        };
        let pm1 = (0..n).find(|&p| !dist[p][p].is_eps_zero());
        record(&mut report, "PM1", pm1.map(|p| axiom(Axiom::PM1, &[p])));
        let pm2 = pairs().find(|&(p, q)| p != q && dist[p][q].is_eps_zero());
        record(&mut report, "PM2", pm2.map(|(p, q)| axiom(Axiom::PM2, &[p, q])));
        let pm3 = pairs().find(|&(p, q)| p < q && !dist[p][q].pointwise_eq(&dist[q][p]));
        record(&mut report, "PM3", pm3.map(|(p, q)| axiom(Axiom::PM3, &[p, q])));

        let total = n * n * n;
        let triples: Vec<usize> = match opts.max_triples {
            Some(cap) if cap < total => {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                let mut chosen = sample(&mut rng, total, cap).into_vec();
                chosen.sort_unstable();
                chosen
            }
            _ => (0..total).collect(),
        };
        let sampled_triples = (triples.len() < total).then_some(triples.len());
        if outside.is_some() {
            report.push(Check::fail("PM4", "not evaluated: entries outside the distance functions"));
        } else {
            let mut pm4 = None;
            for code in &triples {
                let (p, q, r) = (code / (n * n), (code / n) % n, code % n);
                let bound = tau.apply(&dist[p][q], &dist[q][r])?;
                if let Some(x) = leq_witness(&bound, &dist[p][r]) {
                    pm4 = Some(((p, q, r), x));
                    break;
                }
            }
            record(
                &mut report,
                "PM4",
                pm4.map(|((p, q, r), x)| {
                    let (err, text) = axiom(Axiom::PM4, &[p, q, r]);
                    (err, format!("{text} at x = {x}"))
                }),
            );
            if let (Some(k), Some(check)) = (sampled_triples, report.checks.last_mut()) {
                check.witness.get_or_insert(format!("sampled {k} of {total} triples"));
            }
        }
        Ok(Validation { report, violation, sampled_triples })
    }

    /// Embeds a finite metric space via `F_pq = unit_step(d(p, q))` with the
    /// conv-Min triangle function.
    pub fn from_metric(labels: Vec<String>, metric: &[Vec<f64>]) -> Result<Self> {
        let n = labels.len();
        if metric.len() != n || metric.iter().any(|row| row.len() != n) {
            return Err(Error::LengthMismatch(format!("metric matrix must be {n} x {n}")));
        }
        for p in 0..n {
            for q in 0..n {
                let d = metric[p][q];
                if !(d.is_finite() && d >= 0.0) {
                    return Err(Error::NotAMetric(format!("d({}, {}) = {d}", labels[p], labels[q])));
                }
                if (p == q) != (d == 0.0) {
                    return Err(Error::NotAMetric(format!("d({}, {}) = {d}", labels[p], labels[q])));
                }
                if d != metric[q][p] {
                    return Err(Error::NotAMetric(format!("d({0}, {1}) != d({1}, {0})", labels[p], labels[q])));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    if metric[p][r] > metric[p][q] + metric[q][r] {
                        return Err(Error::NotAMetric(format!(
                            "triangle inequality fails for ({}, {}, {})",
                            labels[p], labels[q], labels[r]
                        )));
                    }
                }
            }
        }
        let dist = metric
            .iter()
            .map(|row| row.iter().map(|d| DistributionFn::unit_step(*d)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::build(labels, dist, TriangleFn::ConvMin)
    }

    /// An E-space: each label carries `N` paired vector samples and
    /// `F_pq(x) = #{j : |p_j - q_j| < x} / N` with the Euclidean norm.
    pub fn from_samples(labels: Vec<String>, samples: &[Vec<Vec<f64>>], tau: TriangleFn) -> Result<Self> {
        if samples.len() != labels.len() {
            return Err(Error::LengthMismatch(format!("{} labels but {} sample lists", labels.len(), samples.len())));
        }
        let dist = Self::sample_matrix(samples)?;
        Self::build(labels, dist, tau)
    }

    /// The unvalidated matrix of empirical distance functions behind
    /// [`Self::from_samples`], with `ε₀` on the diagonal.
    pub fn sample_matrix(samples: &[Vec<Vec<f64>>]) -> Result<Vec<Vec<DistributionFn>>> {
        let count = samples.first().map_or(0, Vec::len);
        if count == 0 {
            return Err(Error::LengthMismatch("every label needs at least one sample".into()));
        }
        let dim = samples[0][0].len();
        for (k, list) in samples.iter().enumerate() {
            if list.len() != count {
                return Err(Error::LengthMismatch(format!("sample list {k} has {} samples, expected {count}", list.len())));
            }
            if let Some(bad) = list.iter().find(|v| v.len() != dim) {
                return Err(Error::LengthMismatch(format!("sample list {k} has a sample of dimension {}, expected {dim}", bad.len())));
            }
        }
        let n = samples.len();
        let mut dist = vec![vec![DistributionFn::eps_zero(); n]; n];
        for p in 0..n {
            for q in p + 1..n {
                let d: Vec<f64> = samples[p].iter().zip(&samples[q]).map(|(a, b)| euclidean(a, b)).collect();
                let f = empirical_distance_fn(&d)?;
                dist[p][q] = f.clone();
                dist[q][p] = f;
            }
        }
        Ok(dist)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, p: usize) -> &str {
        &self.labels[p]
    }

    pub fn tau(&self) -> TriangleFn {
        self.tau
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }

    pub(crate) fn check_point(&self, p: usize) -> Result<()> {
        if p < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownPoint(format!("#{p}")))
        }
    }

    /// `F_pq`.
    pub fn dist(&self, p: usize, q: usize) -> &DistributionFn {
        &self.dist[p][q]
    }

    pub fn matrix(&self) -> &[Vec<DistributionFn>] {
        &self.dist
    }

    /// Largest level `s <= 1` below which every dilation of every subset is
    /// the subset itself: `F_pq(s) <= 1 - s` for all `p != q`.
    pub fn resolution(&self) -> f64 {
        let mut scale = 1.0_f64;
        for p in 0..self.len() {
            for q in p + 1..self.len() {
                let f = &self.dist[p][q];
                let first_positive = f.breakpoints().iter().copied().find(|b| *b > 0.0).unwrap_or(f64::INFINITY);
                scale = scale.min(first_positive).min(1.0 - f.right_value(0.0));
            }
        }
        scale
    }

    /// Dyadic levels `1/2, 1/4, …` down to the first one below [`Self::resolution`].
    pub fn default_eps_grid(&self) -> Vec<f64> {
        let target = self.resolution();
        let mut grid = vec![0.5];
        while *grid.last().expect("nonempty") >= target && grid.len() < 1074 {
            let next = grid.last().expect("nonempty") / 2.0;
            grid.push(next);
        }
        grid
    }

    /// `U_t(p) = {q : F_pq(t) > 1 - t}`, or the closed variant with `>=`.
    pub fn neighborhood(&self, p: usize, t: f64, closed: bool) -> Result<Neighborhood> {
        self.check_point(p)?;
        if !(t > 0.0) {
            return Err(Error::OutOfRange(format!("neighborhood level {t} must be positive")));
        }
        let members = (0..self.len())
            .filter(|&q| {
                let v = self.dist[p][q].eval(t);
                if closed {
                    v >= 1.0 - t
                } else {
                    v > 1.0 - t
                }
            })
            .collect();
        Ok(Neighborhood { center: p, level: t, closed, members })
    }

    /// Finite-prefix Cauchy test: for each `t`, the least `n0` from which
    /// `F_{p_n p_m}(t) > 1 - t` for all later pairs. A level passes when that
    /// tail has at least two terms.
    pub fn is_cauchy_prefix(&self, seq: &[usize], t_grid: &[f64]) -> Result<CauchyReport> {
        if seq.len() < 2 {
            return Err(Error::OutOfRange("a Cauchy test needs at least two terms".into()));
        }
        for p in seq {
            self.check_point(*p)?;
        }
        validate_grid(t_grid)?;
        let levels: Vec<CauchyLevel> = t_grid
            .iter()
            .map(|&t| {
                let n0 = tail_start(seq.len(), |i, j| self.dist[seq[i]][seq[j]].eval(t) <= 1.0 - t);
                CauchyLevel { t, n0: n0 + 1, satisfied: tail_is_witnessed(n0, seq.len()) }
            })
            .collect();
        let passed = levels.iter().all(|l| l.satisfied);
        Ok(CauchyReport { levels, passed })
    }

    /// `d_L(F_{p_n p}, ε₀)` along the prefix and whether it settles below `tol`.
    pub fn converges_to(&self, seq: &[usize], p: usize, tol: f64) -> Result<WeakConvergence> {
        self.check_point(p)?;
        for q in seq {
            self.check_point(*q)?;
        }
        let fs: Vec<DistributionFn> = seq.iter().map(|q| self.dist[*q][p].clone()).collect();
        weak_converges(&fs, &DistributionFn::eps_zero(), tol)
    }
}
