//! Random-sampling argument for the number of crossings: closed-form
//! expectation of the sample's union complexity, a Monte Carlo run that
//! estimates the same quantity, and the deterministic inequality chain.

use std::f64::consts::E;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::DiscArrangement;
use crate::error::{Error, Result};
use crate::family::Family;
use crate::graph::{build_graph, clique_number};
use crate::report::{BoundReport, Inequality};

/// z-value of a two-sided 95% normal interval.
pub const Z95: f64 = 1.959_963_984_540_054;
pub const DEFAULT_TRIALS: usize = 100_000;
pub const DEFAULT_C: f64 = 6.0;

/// `sum_x p^2 (1 - p)^(depth(x) - 2)`.
pub fn expectation_from_depths(depths: impl IntoIterator<Item = usize>, p: f64) -> f64 {
    let q = 1.0 - p;
    depths.into_iter().map(|d| p * p * q.powi(d as i32 - 2)).sum()
}

/// Arrangement plus clique number, computed once and shared by every query.
pub struct SamplingContext {
    arr: DiscArrangement,
    omega: usize,
}

impl SamplingContext {
    pub fn new(f: &Family) -> Result<Self> {
        let arr = DiscArrangement::from_family(f)?;
        let omega = clique_number(&build_graph(f)?)?;
        Ok(SamplingContext { arr, omega })
    }

    pub fn from_parts(arr: DiscArrangement, omega: usize) -> Self {
        SamplingContext { arr, omega }
    }

    pub fn arrangement(&self) -> &DiscArrangement {
        &self.arr
    }

    pub fn omega(&self) -> usize {
        self.omega
    }

    pub fn n(&self) -> usize {
        self.arr.n()
    }

    /// `1 / omega`.
    pub fn auto_p(&self) -> f64 {
        1.0 / self.omega as f64
    }

    /// Exact expectation of the sample's union complexity when every member
    /// is kept independently with probability `p`, `0 < p <= 1`.
    pub fn exact_expectation(&self, p: f64) -> Result<f64> {
        check_p(p, true)?;
        Ok(expectation_from_depths(self.arr.depths(), p))
    }

    /// `|Z| p^2 (1 - p)^(omega - 2)`, summed point by point so that it is
    /// bounded by [`Self::exact_expectation`] in floating point as well.
    pub fn lower_bound(&self, p: f64) -> f64 {
        if self.arr.points().is_empty() {
            return 0.0;
        }
        expectation_from_depths(std::iter::repeat_n(self.omega, self.arr.points().len()), p)
    }

    /// Points whose own term falls below the uniform `omega` term.
    pub fn termwise_violations(&self, p: f64) -> usize {
        let q = 1.0 - p;
        let floor = p * p * q.powi(self.omega as i32 - 2);
        self.arr.depths().filter(|&d| p * p * q.powi(d as i32 - 2) < floor).count()
    }

    pub fn run_trials(&self, p: f64, trials: usize, seed: u64, c: f64) -> Result<SampleReport> {
        check_p(p, false)?;
        if trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        let n = self.n();
        let outcomes: Vec<(u32, u32)> = (0..trials)
            .into_par_iter()
            .map_init(
                || vec![false; n],
                |picked, t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ t as u64);
                    let mut n_star = 0;
                    for slot in picked.iter_mut() {
                        *slot = rng.gen::<f64>() < p;
                        n_star += *slot as u32;
                    }
                    (self.arr.union_complexity_of(picked) as u32, n_star)
                },
            )
            .collect();

        let mut sum = 0.0;
        let mut sum_n = 0.0;
        let mut violations = 0;
        for &(s, n_star) in &outcomes {
            sum += s as f64;
            sum_n += n_star as f64;
            if n_star >= 3 && s as i64 > 6 * n_star as i64 - 12 {
                violations += 1;
            }
        }
        let t = trials as f64;
        let mean = sum / t;
        let ci_halfwidth = if trials > 1 {
            let var = outcomes
                .iter()
                .map(|&(s, _)| (s as f64 - mean).powi(2))
                .sum::<f64>()
                / (t - 1.0);
            Z95 * (var / t).sqrt()
        } else {
            // No spread estimate from one draw; use the range bound |Z| / 2.
            Z95 * self.arr.points().len() as f64 / 2.0
        };
        let exact_e = self.exact_expectation(p)?;
        Ok(SampleReport {
            p,
            trials,
            seed,
            c,
            n,
            omega: self.omega,
            total_points: self.arr.points().len(),
            mean_s: mean,
            ci_halfwidth,
            exact_e,
            within_ci: (mean - exact_e).abs() <= ci_halfwidth,
            lower_bound: self.lower_bound(p),
            upper_bound: c * p * n as f64,
            mean_n_star: sum_n / t,
            per_trial_violations: violations,
        })
    }

    /// With `p = 1/omega`: `lower <= E`, `E <= c p n` and `|Z| <= c e omega n`.
    pub fn chain(&self, c: f64) -> ChainReport {
        let n = self.n() as f64;
        let total = self.arr.points().len();
        let w = self.omega.max(1);
        let p = 1.0 / w as f64;
        let exact_e = expectation_from_depths(self.arr.depths(), p);
        let lower = self.lower_bound(p);
        let mut report = BoundReport::new(format!("sampling chain, c = {c}, p = 1/omega"));
        report.push(Inequality::le("lower_bound_le_exact_e", lower, exact_e));
        report.push(Inequality::le("exact_e_le_cpn", exact_e, c * p * n));
        report.push(Inequality::le("points_le_ce_omega_n", total as f64, c * E * w as f64 * n));
        let termwise = if total == 0 { 0 } else { self.termwise_violations(p) };
        if termwise > 0 {
            report.push(Inequality::le("termwise_violations", termwise as f64, 0.0));
        }
        ChainReport { p, omega: self.omega, total_points: total, exact_e, lower_bound: lower, report }
    }
}

fn check_p(p: f64, allow_one: bool) -> Result<()> {
    let ok = p > 0.0 && (p < 1.0 || (allow_one && p == 1.0));
    if ok {
        Ok(())
    } else {
        let range = if allow_one { "(0, 1]" } else { "(0, 1)" };
        Err(Error::Parameter(format!("p must lie in {range}, got {p}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    pub c: f64,
    pub n: usize,
    pub omega: usize,
    pub total_points: usize,
    #[serde(rename = "mean_S")]
    pub mean_s: f64,
    pub ci_halfwidth: f64,
    #[serde(rename = "exact_E")]
    pub exact_e: f64,
    pub within_ci: bool,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub mean_n_star: f64,
    pub per_trial_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub p: f64,
    pub omega: usize,
    pub total_points: usize,
    pub exact_e: f64,
    pub lower_bound: f64,
    pub report: BoundReport,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

pub fn closed_form_expectation(f: &Family, p: f64) -> Result<f64> {
    check_p(p, true)?;
    let arr = DiscArrangement::from_family(f)?;
    Ok(expectation_from_depths(arr.depths(), p))
}

pub fn run_trials(f: &Family, p: f64, trials: usize, seed: u64) -> Result<SampleReport> {
    SamplingContext::new(f)?.run_trials(p, trials, seed, DEFAULT_C)
}

pub fn check_sampling_chain(f: &Family, c: f64) -> Result<ChainReport> {
    Ok(SamplingContext::new(f)?.chain(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depth::union_complexity;
    use crate::family::{gen_lines_parabolas, gen_random_discs, GeneratorParams};
    use crate::geom::Circle;

    fn two_discs() -> Family {
        Family::discs(
            "pair",
            vec![Circle::new(0, 0.0, 0.0, 1.0).unwrap(), Circle::new(1, 1.0, 0.0, 1.0).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn pair_expectation() {
        assert_eq!(closed_form_expectation(&two_discs(), 0.5).unwrap(), 0.5);
        assert!(closed_form_expectation(&two_discs(), 1e-9).unwrap() < 1e-17);
    }

    #[test]
    fn pair_chain_is_tight() {
        let r = check_sampling_chain(&two_discs(), 6.0).unwrap();
        assert_eq!(r.p, 0.5);
        assert_eq!(r.lower_bound, 0.5);
        assert_eq!(r.exact_e, 0.5);
        assert!(r.passed());
        assert_eq!(r.report.get("exact_e_le_cpn").unwrap().rhs, 6.0);
        assert_eq!(r.report.get("points_le_ce_omega_n").unwrap().rhs, 6.0 * E * 4.0);
    }

    #[test]
    fn p_one_recovers_union_complexity() {
        let f = gen_random_discs(&GeneratorParams::new(30, 2)).unwrap();
        assert_eq!(closed_form_expectation(&f, 1.0).unwrap(), union_complexity(&f).unwrap() as f64);
    }

    #[test]
    fn expectation_monotone_in_depth() {
        let base = [2, 3, 3, 5, 7];
        let p = 0.3;
        let e0 = expectation_from_depths(base, p);
        for i in 0..base.len() {
            if base[i] > 2 {
                let mut shallower = base;
                shallower[i] -= 1;
                assert!(expectation_from_depths(shallower, p) >= e0);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = two_discs();
        assert!(run_trials(&f, 1.0, 10, 0).is_err());
        assert!(run_trials(&f, 0.0, 10, 0).is_err());
        assert!(run_trials(&f, 0.5, 0, 0).is_err());
        let curves = gen_lines_parabolas(4, 2).unwrap();
        assert!(matches!(run_trials(&curves, 0.5, 10, 0), Err(Error::Kind { .. })));
    }

    #[test]
    fn rare_picks_give_small_mean() {
        let f = gen_random_discs(&GeneratorParams::new(10, 1)).unwrap();
        let r = run_trials(&f, 0.01, 1000, 3).unwrap();
        assert!(r.mean_s < 0.1);
        assert_eq!(r.per_trial_violations, 0);
    }

    #[test]
    fn single_trial_has_wide_interval() {
        let f = gen_random_discs(&GeneratorParams::new(10, 1)).unwrap();
        let r = run_trials(&f, 0.5, 1, 3).unwrap();
        assert!(r.ci_halfwidth > 0.0);
        assert!(r.within_ci);
    }

    #[test]
    fn trials_are_deterministic() {
        let f = gen_random_discs(&GeneratorParams::new(20, 8)).unwrap();
        let a = run_trials(&f, 0.3, 2000, 17).unwrap();
        let b = run_trials(&f, 0.3, 2000, 17).unwrap();
        assert_eq!(a, b);
    }
}
