//! Boundary intersection points, their depths, union complexity and the
//! depth profile `g(F, k)`.

use std::collections::BTreeMap;
use std::f64::consts::E;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::family::{Family, Members};
use crate::geom::{
    above_status, contains_point, pairwise_crossings, AboveStatus, Circle, Containment, Point,
    QuadCurve, Tolerance,
};

/// Depth for disc crossings, above-count for curve crossings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    /// Members whose closed disc contains the point, definers included.
    Depth(usize),
    /// Members other than the definers lying strictly below the point.
    AboveCount(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionPoint {
    pub point: Point,
    pub definers: (usize, usize),
    pub level: Level,
}

impl IntersectionPoint {
    pub fn depth(&self) -> Option<usize> {
        match self.level {
            Level::Depth(d) => Some(d),
            Level::AboveCount(_) => None,
        }
    }

    pub fn above_count(&self) -> Option<usize> {
        match self.level {
            Level::AboveCount(c) => Some(c),
            Level::Depth(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthMethod {
    /// Test every member against every point.
    Scan,
    /// Bucket members on a uniform grid and test only nearby ones.
    Grid,
}

impl DepthMethod {
    /// Family size from which [`DepthMethod::Grid`] becomes the default.
    pub const GRID_THRESHOLD: usize = 500;

    pub fn auto(n: usize) -> Self {
        if n < Self::GRID_THRESHOLD {
            DepthMethod::Scan
        } else {
            DepthMethod::Grid
        }
    }
}

/// Uniform grid over disc bounding boxes (expanded by eps).
pub struct DiscGrid {
    origin: Point,
    cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<u32>>,
}

impl DiscGrid {
    const MAX_CELLS_PER_AXIS: usize = 1024;

    pub fn new(discs: &[Circle], tol: Tolerance) -> Self {
        let eps = tol.eps();
        let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        let mut radius_sum = 0.0;
        for c in discs {
            lo.x = lo.x.min(c.cx - c.r - eps);
            lo.y = lo.y.min(c.cy - c.r - eps);
            hi.x = hi.x.max(c.cx + c.r + eps);
            hi.y = hi.y.max(c.cy + c.r + eps);
            radius_sum += c.r;
        }
        if discs.is_empty() {
            return DiscGrid { origin: Point::new(0.0, 0.0), cell: 1.0, cols: 1, rows: 1, buckets: vec![Vec::new()] };
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y);
        let mean_r = radius_sum / discs.len() as f64;
        let cell = (2.0 * mean_r).max(span / Self::MAX_CELLS_PER_AXIS as f64);
        let cols = (((hi.x - lo.x) / cell).ceil() as usize).max(1);
        let rows = (((hi.y - lo.y) / cell).ceil() as usize).max(1);
        let mut grid = DiscGrid { origin: lo, cell, cols, rows, buckets: vec![Vec::new(); cols * rows] };
        for (i, c) in discs.iter().enumerate() {
            let (c0, r0) = grid.cell_of(c.cx - c.r - eps, c.cy - c.r - eps);
            let (c1, r1) = grid.cell_of(c.cx + c.r + eps, c.cy + c.r + eps);
            for row in r0..=r1 {
                for col in c0..=c1 {
                    grid.buckets[row * cols + col].push(i as u32);
                }
            }
        }
        grid
    }

    fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let clamp = |v: f64, max: usize| -> usize {
            if v <= 0.0 {
                0
            } else {
                (v as usize).min(max - 1)
            }
        };
        (
            clamp((x - self.origin.x) / self.cell, self.cols),
            clamp((y - self.origin.y) / self.cell, self.rows),
        )
    }

    /// Indices of discs whose expanded bounding box may contain `p`.
    pub fn candidates(&self, p: &Point) -> &[u32] {
        let (col, row) = self.cell_of(p.x, p.y);
        &self.buckets[row * self.cols + col]
    }
}

/// Crossing points of a disc family together with, for each point, the
/// members other than its definers that contain it.
#[derive(Clone, Debug)]
pub struct DiscArrangement {
    n: usize,
    points: Vec<IntersectionPoint>,
    others: Vec<Vec<u32>>,
    by_first: Vec<Vec<u32>>,
}

impl DiscArrangement {
    pub fn new(discs: &[Circle], tol: Tolerance, method: DepthMethod) -> Result<Self> {
        let crossings = pairwise_crossings(discs, tol)?;
        let grid = (method == DepthMethod::Grid).then(|| DiscGrid::new(discs, tol));
        let others: Vec<Vec<u32>> = crossings
            .par_iter()
            .map(|c| {
                let contains = |m: usize| {
                    m != c.a && m != c.b && contains_point(&discs[m], &c.point, tol) != Containment::Outside
                };
                let mut found: Vec<u32> = match &grid {
                    Some(g) => g.candidates(&c.point).iter().copied().filter(|&m| contains(m as usize)).collect(),
                    None => (0..discs.len()).filter(|&m| contains(m)).map(|m| m as u32).collect(),
                };
                found.sort_unstable();
                found
            })
            .collect();
        let mut by_first = vec![Vec::new(); discs.len()];
        let points = crossings
            .iter()
            .zip(&others)
            .enumerate()
            .map(|(idx, (c, o))| {
                by_first[c.a].push(idx as u32);
                IntersectionPoint { point: c.point, definers: (c.a, c.b), level: Level::Depth(2 + o.len()) }
            })
            .collect();
        Ok(DiscArrangement { n: discs.len(), points, others, by_first })
    }

    pub fn from_family(f: &Family) -> Result<Self> {
        Self::with_method(f, DepthMethod::auto(f.len()))
    }

    pub fn with_method(f: &Family, method: DepthMethod) -> Result<Self> {
        Self::new(f.disc_members()?, f.tol(), method)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[IntersectionPoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<IntersectionPoint> {
        self.points
    }

    /// Containing members of point `idx` besides its two definers.
    pub fn other_containers(&self, idx: usize) -> &[u32] {
        &self.others[idx]
    }

    pub fn depths(&self) -> impl Iterator<Item = usize> + '_ {
        self.others.iter().map(|o| 2 + o.len())
    }

    pub fn max_depth(&self) -> usize {
        self.depths().max().unwrap_or(0)
    }

    pub fn union_complexity(&self) -> usize {
        self.others.iter().filter(|o| o.is_empty()).count()
    }

    /// Union complexity of the subfamily `{i : picked[i]}`: a crossing
    /// survives iff both definers are picked and no other container is.
    pub fn union_complexity_of(&self, picked: &[bool]) -> usize {
        debug_assert_eq!(picked.len(), self.n);
        let mut count = 0;
        for (a, idxs) in self.by_first.iter().enumerate() {
            if !picked[a] {
                continue;
            }
            for &idx in idxs {
                let idx = idx as usize;
                if picked[self.points[idx].definers.1]
                    && self.others[idx].iter().all(|&m| !picked[m as usize])
                {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn profile(&self) -> DepthProfile {
        DepthProfile::from_depths(self.depths())
    }
}

/// Curve crossings annotated with their above-counts.
pub fn curve_points(curves: &[QuadCurve], tol: Tolerance) -> Result<Vec<IntersectionPoint>> {
    let crossings = pairwise_crossings(curves, tol)?;
    Ok(crossings
        .par_iter()
        .map(|c| {
            let below = curves
                .iter()
                .enumerate()
                .filter(|&(m, q)| m != c.a && m != c.b && above_status(q, &c.point, tol) == AboveStatus::Above)
                .count();
            IntersectionPoint { point: c.point, definers: (c.a, c.b), level: Level::AboveCount(below) }
        })
        .collect())
}

/// All pairwise boundary crossings of the family with depth or above-count.
pub fn intersection_points(f: &Family) -> Result<Vec<IntersectionPoint>> {
    match f.members() {
        Members::Discs(_) => Ok(DiscArrangement::from_family(f)?.into_points()),
        Members::Curves(curves) => curve_points(curves, f.tol()),
    }
}

pub fn union_complexity(f: &Family) -> Result<usize> {
    Ok(DiscArrangement::from_family(f)?.union_complexity())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthProfile {
    /// `k -> g(F, k)` for `k = 2..=max(max_depth, 2)`.
    pub g: BTreeMap<usize, usize>,
    pub total: usize,
    /// 0 when there are no crossings.
    pub max_depth: usize,
}

impl DepthProfile {
    pub fn from_depths(depths: impl IntoIterator<Item = usize>) -> Self {
        let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
        let mut total = 0;
        for d in depths {
            *hist.entry(d).or_default() += 1;
            total += 1;
        }
        let max_depth = hist.keys().next_back().copied().unwrap_or(0);
        let mut g = BTreeMap::new();
        let mut acc = 0;
        for k in 2..=max_depth.max(2) {
            acc += hist.get(&k).copied().unwrap_or(0);
            g.insert(k, acc);
        }
        DepthProfile { g, total, max_depth }
    }

    pub fn g(&self, k: usize) -> usize {
        if k < 2 {
            0
        } else if k > self.max_depth {
            self.total
        } else {
            self.g[&k]
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,g\n");
        for (k, g) in &self.g {
            let _ = writeln!(s, "{k},{g}");
        }
        s
    }
}

pub fn depth_profile(f: &Family) -> Result<DepthProfile> {
    Ok(DiscArrangement::from_family(f)?.profile())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// Above the advertised constant but within the bound the sampling
    /// argument yields at face value.
    Flag,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthRow {
    pub k: usize,
    pub g: usize,
    /// `g / (k n)`.
    pub ratio: f64,
    pub bound_3ekn: f64,
    pub bound_6ekn: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthBoundReport {
    pub n: usize,
    /// Families with fewer than 3 members pass vacuously.
    pub exempt: bool,
    pub total: usize,
    pub max_depth: usize,
    pub rows: Vec<DepthRow>,
    pub max_ratio: f64,
    pub flagged: usize,
    pub union_complexity: usize,
    pub kedem_bound: i64,
    pub kedem_pass: bool,
    pub omega: Option<usize>,
    pub depth_within_omega: Option<bool>,
    pub note: Option<String>,
}

impl DepthBoundReport {
    /// True when no hard bound fails; flags do not count as failures.
    pub fn passed(&self) -> bool {
        self.exempt
            || (self.kedem_pass
                && self.depth_within_omega != Some(false)
                && self.rows.iter().all(|r| r.verdict != Verdict::Fail))
    }
}

fn depth_rows(profile: &DepthProfile, n: usize) -> Vec<DepthRow> {
    profile
        .g
        .iter()
        .map(|(&k, &g)| {
            let kn = (k * n) as f64;
            let bound_3ekn = 3.0 * E * kn;
            let bound_6ekn = 6.0 * E * kn;
            let gf = g as f64;
            let verdict = if gf <= bound_3ekn {
                Verdict::Pass
            } else if gf <= bound_6ekn {
                Verdict::Flag
            } else {
                Verdict::Fail
            };
            DepthRow { k, g, ratio: gf / kn, bound_3ekn, bound_6ekn, verdict }
        })
        .collect()
}

/// Checks `g(F,k) <= 3ekn` (soft, see [`Verdict::Flag`]) for every k and the
/// union complexity against `6n - 12`. With `omega` given, also checks that
/// no crossing is deeper than the clique number.
pub fn check_depth_bounds(f: &Family, omega: Option<usize>) -> Result<DepthBoundReport> {
    let arr = DiscArrangement::from_family(f)?;
    Ok(depth_bounds_from(&arr, omega))
}

pub fn depth_bounds_from(arr: &DiscArrangement, omega: Option<usize>) -> DepthBoundReport {
    let n = arr.n();
    let profile = arr.profile();
    let union = arr.union_complexity();
    let kedem_bound = 6 * n as i64 - 12;
    let exempt = n < 3;
    let rows = if exempt { Vec::new() } else { depth_rows(&profile, n) };
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let flagged = rows.iter().filter(|r| r.verdict == Verdict::Flag).count();
    DepthBoundReport {
        n,
        exempt,
        total: profile.total,
        max_depth: profile.max_depth,
        max_ratio,
        flagged,
        union_complexity: union,
        kedem_bound,
        kedem_pass: exempt || union as i64 <= kedem_bound,
        omega,
        depth_within_omega: omega.map(|w| profile.max_depth <= w),
        note: exempt.then(|| format!("n = {n} < 3: bounds apply only from three members")),
        rows,
    }
}

/// A point in the closed intersection of all discs, if the discs share an
/// interior point. Under general position the common intersection is either
/// a whole member (whose center then lies inside every other disc) or has a
/// crossing of depth n as a vertex.
pub fn common_point(f: &Family, arr: &DiscArrangement) -> Result<Option<Point>> {
    let discs = f.disc_members()?;
    let tol = f.tol();
    if let Some(c) = discs.iter().find(|c| {
        discs
            .iter()
            .all(|o| o.id == c.id || contains_point(o, &c.center(), tol) == Containment::Inside)
    }) {
        return Ok(Some(c.center()));
    }
    Ok(arr
        .points()
        .iter()
        .find(|p| p.depth() == Some(discs.len()))
        .map(|p| p.point))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonPointRow {
    pub k: usize,
    pub g: usize,
    pub bound: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonPointReport {
    /// Whether the family has a common interior point.
    pub applicable: bool,
    pub witness: Option<Point>,
    pub rows: Vec<CommonPointRow>,
}

impl CommonPointReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// For families whose members share an interior point, checks
/// `g(F,k) <= 2(k-1)n` for every k up to the maximum depth (beyond it g is
/// constant and the bound keeps growing).
pub fn check_common_point_bound(f: &Family, arr: &DiscArrangement) -> Result<CommonPointReport> {
    let witness = common_point(f, arr)?;
    let n = arr.n();
    let rows = match witness {
        None => Vec::new(),
        Some(_) => arr
            .profile()
            .g
            .iter()
            .map(|(&k, &g)| {
                let bound = 2 * (k - 1) * n;
                CommonPointRow { k, g, bound, pass: g <= bound }
            })
            .collect(),
    };
    Ok(CommonPointReport { applicable: witness.is_some(), witness, rows })
}
