//! Šerstnev random normed spaces on `ℝ^d` with the simple norm profile
//! `ν(p)(x) = G(x / ‖p‖)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::distfn::{leq_witness, DistributionFn};
use crate::error::{Error, Result};
use crate::report::{Check, CheckReport};
use crate::triangle::{check_serstnev_inequality, TriangleFn};

/// Scalars used to probe the scaling axiom.
pub const RN2_SCALARS: [f64; 4] = [-2.0, -1.0, 0.5, 3.0];

/// Relative tolerance on rescaled breakpoints: `‖a p‖` and `|a| ‖p‖` are
/// computed along different rounding paths.
pub const RN2_TOL: f64 = 1e-12;

/// Proposals allowed per accepted sample in the dilation sampler.
pub const MAX_PROPOSALS: usize = 10_000;

const SERSTNEV_T_GRID: usize = 65;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RNSpace {
    dimension: usize,
    base: DistributionFn,
    tau: TriangleFn,
}

fn norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sub(p: &[f64], q: &[f64]) -> Vec<f64> {
    p.iter().zip(q).map(|(a, b)| a - b).collect()
}

fn scaled(a: f64, p: &[f64]) -> Vec<f64> {
    p.iter().map(|x| a * x).collect()
}

fn fmt_vec(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Multilevel profiles on which the Šerstnev-type inequality is probed in
/// addition to the base profile.
fn serstnev_probes() -> Vec<DistributionFn> {
    let step = |b: &[f64], v: &[f64]| DistributionFn::make_step(b.to_vec(), v.to_vec(), 0.0).expect("valid probe profile");
    vec![step(&[0.1, 10.0], &[0.6, 1.0]), step(&[0.5, 2.0], &[0.3, 1.0]), step(&[1.0, 3.0], &[0.5, 1.0])]
}

impl RNSpace {
    /// The base profile must be a proper distance function other than `ε₀`.
    pub fn new(dimension: usize, base: DistributionFn, tau: TriangleFn) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if !base.is_distance() || !base.is_proper() || base.is_eps_zero() {
            return Err(Error::DomainViolation(format!("norm profile {base} must lie in D+ and differ from ε₀")));
        }
        Ok(RNSpace { dimension, base, tau })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn base(&self) -> &DistributionFn {
        &self.base
    }

    pub fn tau(&self) -> TriangleFn {
        self.tau
    }

    fn check_dim(&self, p: &[f64]) -> Result<()> {
        if p.len() == self.dimension {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dimension, got: p.len() })
        }
    }

    /// `ν(p)`: `ε₀` at the origin, otherwise the base with breakpoints scaled by `‖p‖`.
    pub fn nu(&self, p: &[f64]) -> Result<DistributionFn> {
        self.check_dim(p)?;
        let n = norm(p);
        if n == 0.0 {
            Ok(DistributionFn::eps_zero())
        } else {
            self.base.scale_argument(n)
        }
    }

    /// `ρ(p, q) = ν(p - q)`.
    pub fn induced_metric(&self, p: &[f64], q: &[f64]) -> Result<DistributionFn> {
        self.check_dim(p)?;
        self.check_dim(q)?;
        self.nu(&sub(p, q))
    }

    /// RN1 over the probes (which must include the origin), RN2 over
    /// [`RN2_SCALARS`], and RN3 over every pair of distinct probes.
    pub fn check_rn_axioms(&self, probes: &[Vec<f64>]) -> Result<CheckReport> {
        if probes.len() < 3 {
            return Err(Error::InsufficientProbes { needed: 3, got: probes.len() });
        }
        for p in probes {
            self.check_dim(p)?;
        }
        if !probes.iter().any(|p| p.iter().all(|x| *x == 0.0)) {
            return Err(Error::OutOfRange("probes must include the origin".into()));
        }
        let nus = probes.iter().map(|p| self.nu(p)).collect::<Result<Vec<_>>>()?;
        let mut report = CheckReport::new();

        let rn1 = probes.iter().zip(&nus).find(|(p, f)| f.is_eps_zero() != p.iter().all(|x| *x == 0.0));
        report.push(match rn1 {
            None => Check::pass("RN1"),
            Some((p, f)) => Check::fail("RN1", format!("nu{} = {f}", fmt_vec(p))),
        });

        let mut rn2 = Check::pass("RN2");
        'rn2: for (p, f) in probes.iter().zip(&nus) {
            for a in RN2_SCALARS {
                let lhs = self.nu(&scaled(a, p))?;
                let rhs = if f.is_eps_zero() { f.clone() } else { f.scale_argument(a.abs())? };
                if !lhs.approx_eq(&rhs, RN2_TOL) {
                    rn2 = Check::fail("RN2", format!("a = {a}, p = {}: {lhs} vs {rhs}", fmt_vec(p)));
                    break 'rn2;
                }
            }
        }
        report.push(rn2);

        let mut rn3 = Check::pass("RN3");
        'rn3: for i in 0..probes.len() {
            for j in i + 1..probes.len() {
                let sum: Vec<f64> = probes[i].iter().zip(&probes[j]).map(|(a, b)| a + b).collect();
                let bound = self.tau.apply(&nus[i], &nus[j])?;
                // Norms are rounded; collinear probes meet the triangle
                // inequality with equality, so allow a relative slack of
                // RN2_TOL on the abscissa.
                let target = self.nu(&sum)?;
                let target = if target.is_eps_zero() { target } else { target.scale_argument(1.0 - RN2_TOL)? };
                if let Some(x) = leq_witness(&bound, &target) {
                    rn3 = Check::fail(
                        "RN3",
                        format!("p = {}, q = {} at x = {x}", fmt_vec(&probes[i]), fmt_vec(&probes[j])),
                    );
                    break 'rn3;
                }
            }
        }
        report.push(rn3);
        Ok(report)
    }

    /// Radius beyond which no `v` has `ν(v)(ε) > 1 - ε`.
    fn dilation_radius(&self, eps: f64) -> Result<f64> {
        let b = &self.base;
        let k = b.values().iter().position(|v| *v > 1.0 - eps).expect("the base profile reaches 1");
        let threshold = b.breakpoints()[k];
        if threshold <= 0.0 {
            return Err(Error::OutOfRange(format!("the level-{eps} dilation of this profile is unbounded")));
        }
        Ok(eps / threshold)
    }

    /// Randomized check that the `ε`-dilation of `conv(A)` is convex, via
    /// `ν(t₁p₁ + t₂p₂ - (t₁q₁ + t₂q₂))(ε) >= min_i ν(t_i(p_i - q_i))(t_i ε)
    /// = min_i ν(p_i - q_i)(ε) > 1 - ε`.
    pub fn check_convexity_preservation(
        &self,
        vertices: &[Vec<f64>],
        eps: f64,
        trials: usize,
        seed: u64,
    ) -> Result<ConvexityReport> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::RangeViolation { value: eps });
        }
        if vertices.is_empty() {
            return Err(Error::EmptySet);
        }
        if trials == 0 {
            return Err(Error::OutOfRange("at least one trial is required".into()));
        }
        for v in vertices {
            self.check_dim(v)?;
        }

        let mut precondition = Check::pass("serstnev-precondition");
        let mut profiles = vec![self.base.clone()];
        profiles.extend(serstnev_probes());
        'pre: for f in &profiles {
            for g in &profiles {
                let check = check_serstnev_inequality(&self.tau, f, g, SERSTNEV_T_GRID)?;
                if !check.passed {
                    precondition = Check::fail("serstnev-precondition", format!("F = {f}, G = {g}: {}", check.witness.unwrap_or_default()))
                        .with_margin(check.margin.unwrap_or(0.0));
                    break 'pre;
                }
            }
        }
        if !precondition.passed {
            return Ok(ConvexityReport { eps, seed, trials, precondition, trials_run: 0, worst_margin: None, failure: None, passed: false });
        }

        let radius = self.dilation_radius(eps)?;
        let mut worst_margin = f64::INFINITY;
        let mut failure = None;
        for trial in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
            let outcome = self.convexity_trial(&mut rng, vertices, eps, radius)?;
            worst_margin = worst_margin.min(outcome.margin);
            if failure.is_none() {
                if let Some(witness) = outcome.failure {
                    failure = Some(format!("trial {trial}: {witness}"));
                }
            }
        }
        Ok(ConvexityReport {
            eps,
            seed,
            trials,
            precondition,
            trials_run: trials,
            worst_margin: Some(worst_margin),
            passed: failure.is_none(),
            failure,
        })
    }

    fn convexity_trial(&self, rng: &mut ChaCha8Rng, vertices: &[Vec<f64>], eps: f64, radius: f64) -> Result<TrialOutcome> {
        let mut ps = Vec::with_capacity(2);
        let mut qs = Vec::with_capacity(2);
        for _ in 0..2 {
            let p = sample_hull(rng, vertices);
            let q = self.sample_dilation(rng, &p, eps, radius)?;
            ps.push(p);
            qs.push(q);
        }
        let t1 = loop {
            let t: f64 = rng.gen();
            if t > 0.0 {
                break t;
            }
        };
        let t = [t1, 1.0 - t1];
        let combo = |xs: &[Vec<f64>]| -> Vec<f64> { (0..self.dimension).map(|k| t[0] * xs[0][k] + t[1] * xs[1][k]).collect() };
        let (p, q) = (combo(&ps), combo(&qs));

        let lhs = self.nu(&sub(&p, &q))?.eval(eps);
        let middle = (0..2)
            .map(|i| Ok(self.nu(&scaled(t[i], &sub(&ps[i], &qs[i])))?.eval(t[i] * eps)))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(1.0, f64::min);
        let right = (0..2)
            .map(|i| Ok(self.nu(&sub(&ps[i], &qs[i]))?.eval(eps)))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(1.0, f64::min);

        let describe = || format!("p = {}, q = {}, t1 = {t1}", fmt_vec(&p), fmt_vec(&q));
        let failure = if lhs < middle {
            Some(format!("nu(p - q)({eps}) = {lhs} < {middle}; {}", describe()))
        } else if middle != right {
            Some(format!("rescaled minimum {middle} != {right}; {}", describe()))
        } else if right <= 1.0 - eps {
            Some(format!("minimum {right} <= {}; {}", 1.0 - eps, describe()))
        } else {
            None
        };
        Ok(TrialOutcome { margin: lhs - middle, failure })
    }

    /// Rejection sample from `{q : ν(p - q)(ε) > 1 - ε}` in the box of
    /// half-width `radius` around `p`.
    fn sample_dilation(&self, rng: &mut ChaCha8Rng, p: &[f64], eps: f64, radius: f64) -> Result<Vec<f64>> {
        for _ in 0..MAX_PROPOSALS {
            let q: Vec<f64> = p.iter().map(|x| x + rng.gen_range(-radius..radius)).collect();
            if self.nu(&sub(p, &q))?.eval(eps) > 1.0 - eps {
                return Ok(q);
            }
        }
        Err(Error::PreconditionNotMet {
            level: None,
            detail: format!("no dilation sample accepted after {MAX_PROPOSALS} proposals around {}", fmt_vec(p)),
        })
    }
}

struct TrialOutcome {
    margin: f64,
    failure: Option<String>,
}

/// A uniform-Dirichlet convex combination of the vertices.
fn sample_hull(rng: &mut ChaCha8Rng, vertices: &[Vec<f64>]) -> Vec<f64> {
    let weights: Vec<f64> = vertices.iter().map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = weights.iter().sum();
    let dim = vertices[0].len();
    (0..dim).map(|k| vertices.iter().zip(&weights).map(|(v, w)| v[k] * w / total).sum()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub eps: f64,
    pub seed: u64,
    pub trials: usize,
    /// The Šerstnev-type inequality on the base and a few multilevel
    /// profiles; trials are skipped when it fails.
    pub precondition: Check,
    pub trials_run: usize,
    /// Least `ν(p - q)(ε) - min_i ν(t_i(p_i - q_i))(t_i ε)` observed.
    pub worst_margin: Option<f64>,
    pub failure: Option<String>,
    pub passed: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn us(a: f64) -> DistributionFn {
        DistributionFn::unit_step(a).unwrap()
    }

    fn simple(dim: usize, tau: TriangleFn) -> RNSpace {
        RNSpace::new(dim, us(1.0), tau).unwrap()
    }

    #[test]
    fn norm_profile() {
        let space = simple(2, TriangleFn::ConvMin);
        assert!(space.nu(&[0.0, 0.0]).unwrap().is_eps_zero());
        assert_eq!(space.nu(&[0.0, 2.0]).unwrap(), us(2.0));
        assert_eq!(space.nu(&[1.0]), Err(Error::DimensionMismatch { expected: 2, got: 1 }));
        let p = [0.75, -1.5];
        let doubled = space.nu(&[1.5, -3.0]).unwrap();
        let halved = space.nu(&p).unwrap();
        for x in [0.5, 1.0, 2.0, 3.354, 3.36, 5.0] {
            assert_eq!(doubled.eval(x), halved.eval(x / 2.0));
        }
    }

    #[test]
    fn degenerate_profiles_are_rejected() {
        assert!(RNSpace::new(2, DistributionFn::eps_zero(), TriangleFn::ConvMin).is_err());
        assert!(RNSpace::new(2, DistributionFn::eps_inf(), TriangleFn::ConvMin).is_err());
        assert!(RNSpace::new(0, us(1.0), TriangleFn::ConvMin).is_err());
    }

    #[test]
    fn induced_metric() {
        let space = simple(2, TriangleFn::ConvMin);
        assert!(space.induced_metric(&[1.0, 2.0], &[1.0, 2.0]).unwrap().is_eps_zero());
        assert_eq!(space.induced_metric(&[3.0, 4.0], &[0.0, 4.0]).unwrap(), us(3.0));
    }

    #[test]
    fn convmin_satisfies_the_axioms() {
        let space = simple(2, TriangleFn::ConvMin);
        let probes = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0], vec![-1.5, 0.5], vec![1.0, 1.0], vec![2.0, 2.0]];
        let report = space.check_rn_axioms(&probes).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn pointwise_min_breaks_rn3_off_a_line() {
        let space = simple(2, TriangleFn::Min);
        let probes = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let report = space.check_rn_axioms(&probes).unwrap();
        assert!(!report.get("RN3").unwrap().passed);
        assert!(report.get("RN1").unwrap().passed && report.get("RN2").unwrap().passed);
        // A point and its negative: every pairwise sum is a probe or the origin.
        let report = space.check_rn_axioms(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![-1.0, -1.0]]).unwrap();
        assert!(report.passed());
        let report = space.check_rn_axioms(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert!(!report.get("RN3").unwrap().passed, "p + 2p has three times the norm");
    }

    #[test]
    fn probe_requirements() {
        let space = simple(2, TriangleFn::ConvMin);
        assert_eq!(space.check_rn_axioms(&[vec![0.0, 0.0]]), Err(Error::InsufficientProbes { needed: 3, got: 1 }));
        assert!(space.check_rn_axioms(&[vec![1.0, 0.0], vec![2.0, 0.0], vec![3.0, 0.0]]).is_err());
    }

    #[test]
    fn convexity_on_a_point_and_a_segment() {
        let space = simple(2, TriangleFn::ConvMin);
        let point = space.check_convexity_preservation(&[vec![1.0, 1.0]], 0.3, 50, 7).unwrap();
        assert!(point.passed && point.trials_run == 50);
        let segment = space.check_convexity_preservation(&[vec![0.0, 0.0], vec![2.0, 1.0]], 0.3, 200, 0).unwrap();
        assert!(segment.passed, "{segment:?}");
        assert!(segment.worst_margin.unwrap() >= 0.0);
        let again = space.check_convexity_preservation(&[vec![0.0, 0.0], vec![2.0, 1.0]], 0.3, 200, 0).unwrap();
        assert_eq!(segment, again);
    }

    #[test]
    fn failing_precondition_skips_trials() {
        for tau in [TriangleFn::W, TriangleFn::Prod] {
            let report = simple(2, tau).check_convexity_preservation(&[vec![0.0, 0.0]], 0.3, 10, 0).unwrap();
            assert!(!report.precondition.passed);
            assert_eq!(report.trials_run, 0);
            assert!(!report.passed);
        }
        assert!(simple(2, TriangleFn::ConvMin).check_convexity_preservation(&[vec![0.0, 0.0]], 1.0, 1, 0).is_err());
    }
}
