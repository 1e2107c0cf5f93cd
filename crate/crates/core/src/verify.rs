//! Acceptance suite: each criterion generates its own seeded families, runs
//! the checks at fixed thresholds and reports pass/fail with a summary line.
//!
//! Brute-force oracles used by the equivalence criterion live in [`oracle`]
//! and share no code with the implementations they check.

use std::f64::consts::E;
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::charging::{ordering_violations, verify_claims, CurveArrangement};
use crate::depth::{check_common_point_bound, depth_bounds_from, DepthMethod, DiscArrangement, Verdict};
use crate::error::Result;
use crate::family::{
    gen_common_point_discs, gen_lines_parabolas, gen_random_curves, gen_random_discs, Family,
    GeneratorParams,
};
use crate::geom::{Circle, Point};
use crate::graph::{build_graph, corollary_report, graph_stats, theorem1_report};
use crate::sampling::SamplingContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    /// Smaller family counts and trial numbers; keeps the whole run short.
    pub quick: bool,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { quick: false, seed: 2024 }
    }
}

impl SuiteConfig {
    fn count(&self, full: usize, quick: usize) -> usize {
        if self.quick {
            quick
        } else {
            full
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed_s: f64,
    pub limit_s: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}. {}: {} ({:.2}s, limit {}s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed_s,
            self.limit_s
        )
    }
}

fn timed(
    id: u8,
    name: &'static str,
    limit: Duration,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> CriterionResult {
    let start = Instant::now();
    let (ok, detail) = match body() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let detail = if in_time { detail } else { format!("{detail}; exceeded time limit") };
    CriterionResult {
        id,
        name,
        pass: ok && in_time,
        detail,
        elapsed_s: elapsed.as_secs_f64(),
        limit_s: limit.as_secs_f64(),
    }
}

/// Deterministic per-family seed.
pub fn derive_seed(base: u64, criterion: u64, index: u64) -> u64 {
    let mut z = base ^ criterion.rotate_left(48) ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random discs whose box side scales with `sqrt(n)`, so density stays in
/// a fixed range as n grows. `spread` in `[1, 3]` picks sparse or crowded.
pub fn scaled_random_discs(n: usize, seed: u64) -> Result<Family> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread: f64 = rng.gen_range(1.0..3.0);
    let side = spread * (n as f64).sqrt();
    let params = GeneratorParams { box_max: side, ..GeneratorParams::new(n, seed) };
    gen_random_discs(&params)
}

pub fn origin_discs(n: usize, seed: u64) -> Result<Family> {
    gen_common_point_discs(&GeneratorParams::new(n, seed), Point::new(0.0, 0.0))
}

/// Unit circles centered on an equilateral triangle with side 1.8.
pub fn equilateral_triple() -> Result<Family> {
    let h = 1.8 * 3f64.sqrt() / 2.0;
    Family::discs(
        "equilateral triple",
        vec![Circle::new(0, 0.0, 0.0, 1.0)?, Circle::new(1, 1.8, 0.0, 1.0)?, Circle::new(2, 0.9, h, 1.0)?],
    )
}

pub mod oracle {
    //! Exhaustive reference computations.

    use crate::geom::{Circle, Point};
    use crate::graph::IntersectionGraph;

    /// Largest clique by enumerating all vertex subsets (n <= 20).
    pub fn brute_force_clique(g: &IntersectionGraph) -> usize {
        let n = g.n();
        assert!(n <= 20, "exhaustive clique search is limited to 20 vertices");
        let closed: Vec<u32> = (0..n)
            .map(|v| g.neighbors(v).iter().fold(1u32 << v, |m, &u| m | 1 << u))
            .collect();
        (0u32..1 << n)
            .filter(|&mask| (0..n).all(|v| mask >> v & 1 == 0 || closed[v] & mask == mask))
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Closed-disc depth straight from the definition, with `eps` slack.
    pub fn depth_by_definition(discs: &[Circle], p: Point, eps: f64) -> usize {
        discs
            .iter()
            .filter(|c| ((p.x - c.cx).powi(2) + (p.y - c.cy).powi(2)).sqrt() <= c.r + eps)
            .count()
    }
}

/// Criterion 1: The lines-and-parabolas family attains `2(k-1)(n-k+1)` qualifying points.
pub fn remark_tightness(_cfg: &SuiteConfig) -> CriterionResult {
    timed(1, "remark tightness", Duration::from_secs(4), || {
        let mut parts = Vec::new();
        let mut ok = true;
        for (k, n) in [(2usize, 2usize), (3, 10), (4, 7), (5, 40)] {
            let start = Instant::now();
            let f = gen_lines_parabolas(n, k)?;
            let got = CurveArrangement::new(&f)?.qualifying_points(k)?.len();
            let want = 2 * (k - 1) * (n - k + 1);
            let fast = start.elapsed() < Duration::from_secs(1);
            ok &= got == want && fast;
            parts.push(format!("(k={k},n={n}) {got}/{want}"));
        }
        Ok((ok, parts.join(", ")))
    })
}

/// Criterion 2: Claims on random curve families: per-curve red and blue charges at most k-1.
pub fn charging_certificate(cfg: &SuiteConfig) -> CriterionResult {
    timed(2, "charging certificate", Duration::from_secs(300), || {
        let families = cfg.count(1000, 100);
        let results: Vec<Result<(usize, usize, usize, usize)>> = (0..families as u64)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(cfg.seed, 2, i);
                let n = 2 + (seed % 49) as usize;
                let f = gen_random_curves(&GeneratorParams::new(n, seed))?;
                let arr = CurveArrangement::new(&f)?;
                let (mut violations, mut certs, mut ordering, mut worst) = (0, 0, 0, 0usize);
                for k in 2..=n {
                    let ledger = arr.ledger(k)?;
                    let cert = verify_claims(&ledger, &f)?;
                    certs += 1;
                    violations += usize::from(!cert.pass);
                    ordering += ordering_violations(&ledger, &f)?.len();
                    worst = worst.max(cert.max_red.max(cert.max_blue) * 1000 / (k - 1));
                }
                Ok((violations, certs, ordering, worst))
            })
            .collect();
        let (mut violations, mut certs, mut ordering, mut worst) = (0, 0, 0, 0);
        for r in results {
            let (v, c, o, w) = r?;
            violations += v;
            certs += c;
            ordering += o;
            worst = worst.max(w);
        }
        Ok((
            violations == 0 && ordering == 0,
            format!(
                "{families} families, {certs} certificates, {violations} violations, \
                 {ordering} ordering failures, max charges/(k-1) = {:.3}",
                worst as f64 / 1000.0
            ),
        ))
    })
}

/// Criterion 3: Common-point disc families: `g(F,k) <= 2(k-1)n` for every k.
pub fn common_point_bound(cfg: &SuiteConfig) -> CriterionResult {
    timed(3, "common-point depth bound", Duration::from_secs(600), || {
        let families = cfg.count(500, 50);
        let results: Vec<Result<(usize, usize, f64)>> = (0..families as u64)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(cfg.seed, 3, i);
                let n = 2 + (seed % 199) as usize;
                let f = origin_discs(n, seed)?;
                let arr = DiscArrangement::from_family(&f)?;
                let rep = check_common_point_bound(&f, &arr)?;
                let fails = rep.rows.iter().filter(|r| !r.pass).count() + usize::from(!rep.applicable);
                let tightest = rep
                    .rows
                    .iter()
                    .map(|r| r.g as f64 / r.bound as f64)
                    .fold(0.0, f64::max);
                Ok((fails, rep.rows.len(), tightest))
            })
            .collect();
        let (mut fails, mut rows, mut tightest) = (0, 0, 0.0f64);
        for r in results {
            let (f, n, t) = r?;
            fails += f;
            rows += n;
            tightest = tightest.max(t);
        }
        Ok((
            fails == 0,
            format!("{families} families, {rows} (family, k) checks, {fails} violations, max g/(2(k-1)n) = {tightest:.3}"),
        ))
    })
}

/// Criterion 4: Union complexity at most `6n - 12` on families and random subfamilies,
/// with the equilateral triple attaining it.
pub fn kedem_invariant(cfg: &SuiteConfig) -> CriterionResult {
    timed(4, "union complexity <= 6n-12", Duration::from_secs(600), || {
        let tri = equilateral_triple()?;
        let tri_arr = DiscArrangement::from_family(&tri)?;
        let tri_uc = tri_arr.union_complexity();
        // All six crossings must miss the third disc for the count to be 6.
        let tri_ok = tri_uc == 6 && tri_arr.points().len() == 6 && tri_arr.max_depth() == 2;

        let families = cfg.count(150, 20);
        let subs = 200;
        let results: Vec<Result<(usize, usize)>> = (0..families as u64)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(cfg.seed, 4, i);
                let n = 3 + (seed % 118) as usize;
                let f = if i % 3 == 2 { origin_discs(n, seed)? } else { scaled_random_discs(n, seed)? };
                let arr = DiscArrangement::from_family(&f)?;
                let mut fails = usize::from(arr.union_complexity() as i64 > 6 * n as i64 - 12);
                let mut checked = 1;
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
                let mut keep = vec![false; n];
                for _ in 0..subs {
                    let q: f64 = rng.gen_range(0.05..0.95);
                    let mut size = 0i64;
                    for slot in keep.iter_mut() {
                        *slot = rng.gen::<f64>() < q;
                        size += *slot as i64;
                    }
                    if size >= 3 {
                        checked += 1;
                        fails += usize::from(arr.union_complexity_of(&keep) as i64 > 6 * size - 12);
                    }
                }
                Ok((fails, checked))
            })
            .collect();
        let (mut fails, mut checked) = (0, 0);
        for r in results {
            let (f, c) = r?;
            fails += f;
            checked += c;
        }
        Ok((
            fails == 0 && tri_ok,
            format!("{checked} (sub)families checked, {fails} violations; equilateral triple union complexity = {tri_uc} (6n-12 = 6)"),
        ))
    })
}

/// Criterion 5: Edge bound and coloring bound on disc families.
pub fn edge_and_coloring_bounds(cfg: &SuiteConfig) -> CriterionResult {
    timed(5, "edge and coloring bounds", Duration::from_secs(900), || {
        let families = cfg.count(500, 50);
        let results: Vec<Result<(usize, f64, f64)>> = (0..families as u64)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(cfg.seed, 5, i);
                let n = 1 + (seed % 300) as usize;
                let f = if i % 4 == 3 { origin_discs(n, seed)? } else { scaled_random_discs(n, seed)? };
                let stats = graph_stats(&build_graph(&f)?)?;
                let thm1 = theorem1_report(&stats, 6.0);
                let cor = corollary_report(&stats);
                let fails = thm1.failures().count() + cor.failures().count();
                let edge_ratio = stats.m as f64 / thm1.get("edges").map_or(1.0, |i| i.rhs.max(1.0));
                Ok((fails, edge_ratio, stats.col as f64 / stats.omega as f64))
            })
            .collect();
        let (mut fails, mut edge_ratio, mut col_ratio) = (0, 0.0f64, 0.0f64);
        for r in results {
            let (f, e, c) = r?;
            fails += f;
            edge_ratio = edge_ratio.max(e);
            col_ratio = col_ratio.max(c);
        }
        Ok((
            fails == 0,
            format!(
                "{families} families, {fails} violations, max m/bound = {edge_ratio:.4}, max col/omega = {col_ratio:.3} (limit {:.3})",
                6.0 * E + 2.0
            ),
        ))
    })
}

/// Criterion 6: Sampling chain at `p = 1/omega`, Monte Carlo agreement and per-trial union bound.
pub fn sampling_chain(cfg: &SuiteConfig) -> CriterionResult {
    timed(6, "sampling chain", Duration::from_secs(600), || {
        let families = 50;
        let trials = cfg.count(100_000, 10_000);
        let mut contexts = Vec::with_capacity(families);
        let mut i = 0u64;
        while contexts.len() < families {
            let seed = derive_seed(cfg.seed, 6, i);
            i += 1;
            let n = 10 + (seed % 51) as usize;
            let f = scaled_random_discs(n, seed)?;
            let ctx = SamplingContext::new(&f)?;
            // p = 1/omega must lie below 1.
            if ctx.omega() >= 2 {
                contexts.push((seed, ctx));
            }
        }
        let (mut chain_fails, mut within, mut violations) = (0, 0, 0);
        for (seed, ctx) in &contexts {
            chain_fails += usize::from(!ctx.chain(6.0).passed());
            let rep = ctx.run_trials(ctx.auto_p(), trials, *seed, 6.0)?;
            within += usize::from(rep.within_ci);
            violations += rep.per_trial_violations;
        }
        let need = 47;
        Ok((
            chain_fails == 0 && within >= need && violations == 0,
            format!(
                "{families} families, {chain_fails} chain failures, {within}/{families} Monte Carlo means within 95% CI \
                 (need {need}), {violations} per-trial violations, {trials} trials each"
            ),
        ))
    })
}

/// Criterion 7: Exact clique number against subset enumeration and grid depth against scanning.
pub fn oracle_equivalences(cfg: &SuiteConfig) -> CriterionResult {
    timed(7, "oracle equivalences", Duration::from_secs(600), || {
        let clique_families = cfg.count(100, 30);
        let clique_mismatch: Vec<Result<bool>> = (0..clique_families as u64)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(cfg.seed, 7, i);
                let n = 1 + (seed % 15) as usize;
                let f = if i % 2 == 0 { scaled_random_discs(n, seed)? } else { origin_discs(n, seed)? };
                let g = build_graph(&f)?;
                Ok(crate::graph::clique_number(&g)? != oracle::brute_force_clique(&g))
            })
            .collect();
        let mut clique_bad = 0;
        for r in clique_mismatch {
            clique_bad += usize::from(r?);
        }

        let depth_families = cfg.count(50, 10);
        let depth_mismatch: Vec<Result<usize>> = (0..depth_families as u64)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(cfg.seed, 70, i);
                let n = 20 + (seed % 181) as usize;
                let f = if i % 2 == 0 { scaled_random_discs(n, seed)? } else { origin_discs(n, seed)? };
                let scan = DiscArrangement::with_method(&f, DepthMethod::Scan)?;
                let grid = DiscArrangement::with_method(&f, DepthMethod::Grid)?;
                let discs = f.disc_members()?;
                let eps = f.tol().eps();
                let bad = scan
                    .points()
                    .iter()
                    .zip(grid.points())
                    .filter(|(a, b)| {
                        a != b || a.depth() != Some(oracle::depth_by_definition(discs, a.point, eps))
                    })
                    .count()
                    + scan.points().len().abs_diff(grid.points().len());
                Ok(bad)
            })
            .collect();
        let mut depth_bad = 0;
        for r in depth_mismatch {
            depth_bad += r?;
        }
        Ok((
            clique_bad == 0 && depth_bad == 0,
            format!(
                "clique: {clique_bad}/{clique_families} mismatches; depth: {depth_bad} mismatched points over {depth_families} families"
            ),
        ))
    })
}

/// Criterion 8: `g(F,k) <= 3ekn` reported with flags; values above `6ekn` fail.
pub fn depth_remark(cfg: &SuiteConfig) -> CriterionResult {
    timed(8, "g(F,k) <= 3ekn remark", Duration::from_secs(600), || {
        let families = cfg.count(200, 30);
        let results: Vec<Result<(f64, usize, usize)>> = (0..families as u64)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(cfg.seed, 8, i);
                let n = 3 + (seed % 198) as usize;
                let f = if i % 2 == 0 { scaled_random_discs(n, seed)? } else { origin_discs(n, seed)? };
                let arr = DiscArrangement::from_family(&f)?;
                let rep = depth_bounds_from(&arr, None);
                let fails = rep.rows.iter().filter(|r| r.verdict == Verdict::Fail).count();
                Ok((rep.max_ratio, rep.flagged, fails))
            })
            .collect();
        let (mut max_ratio, mut flagged, mut fails) = (0.0f64, 0, 0);
        for r in results {
            let (m, fl, fa) = r?;
            max_ratio = max_ratio.max(m);
            flagged += fl;
            fails += fa;
        }
        Ok((
            fails == 0,
            format!(
                "{families} families, max g/(kn) = {max_ratio:.4} (3e = {:.4}), {flagged} flagged rows, {fails} rows above 6ekn",
                3.0 * E
            ),
        ))
    })
}

pub fn run_suite(cfg: &SuiteConfig) -> Vec<CriterionResult> {
    vec![
        remark_tightness(cfg),
        charging_certificate(cfg),
        common_point_bound(cfg),
        kedem_invariant(cfg),
        edge_and_coloring_bounds(cfg),
        sampling_chain(cfg),
        oracle_equivalences(cfg),
        depth_remark(cfg),
    ]
}
