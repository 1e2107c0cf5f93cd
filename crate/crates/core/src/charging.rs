//! Red/blue charging of low-lying crossings in a family of quadratic curves.
//!
//! Each crossing `X` of curves `p1`, `p2` is charged to one of them. Let the
//! upper-left curve be the one lying above the other just left of `X`. If
//! `X` is the leftmost crossing of the pair it is charged red to the
//! upper-left curve, otherwise blue to the lower-left curve. For crossings
//! lying strictly above at most `k - 2` other curves, no curve receives more
//! than `k - 1` charges of either color.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::{curve_points, IntersectionPoint};
use crate::error::{Error, Result};
use crate::family::Family;
use crate::geom::QuadCurve;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChargeColor {
    Red,
    Blue,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeRecord {
    pub point: IntersectionPoint,
    pub charged_curve: usize,
    pub color: ChargeColor,
}

impl ChargeRecord {
    /// The definer that was not charged.
    pub fn other_curve(&self) -> usize {
        let (a, b) = self.point.definers;
        if self.charged_curve == a {
            b
        } else {
            a
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveCharges {
    pub red: usize,
    pub blue: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeLedger {
    pub k: usize,
    pub n: usize,
    pub records: Vec<ChargeRecord>,
    pub per_curve: Vec<CurveCharges>,
    pub qualifying_count: usize,
}

/// All crossings of a curve family with their charge targets, independent of k.
pub struct CurveArrangement {
    n: usize,
    charges: Vec<ChargeRecord>,
}

fn diff_at(p: &QuadCurve, q: &QuadCurve, x: f64) -> f64 {
    (p.a - q.a) * x * x + (p.b - q.b) * x + (p.c - q.c)
}

impl CurveArrangement {
    pub fn new(f: &Family) -> Result<Self> {
        let curves = f.curve_members()?;
        let tol = f.tol();
        let points = curve_points(curves, tol)?;

        // Abscissae of every crossing of each pair, sorted.
        let mut pair_xs: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
        for p in &points {
            pair_xs.entry(p.definers).or_default().push(p.point.x);
        }
        for (pair, xs) in pair_xs.iter_mut() {
            xs.sort_by(f64::total_cmp);
            if xs.len() == 2 && xs[1] - xs[0] <= tol.eps() {
                return Err(Error::Degeneracy(format!(
                    "both crossings of curves {} and {} lie at x = {}",
                    pair.0, pair.1, xs[0]
                )));
            }
        }

        let charges = points
            .par_iter()
            .map(|pt| {
                let (a, b) = pt.definers;
                let xs = &pair_xs[&(a, b)];
                let x = pt.point.x;
                let leftmost = x <= xs[0];
                let other = xs.iter().copied().find(|&o| o != x);
                let delta = other.map_or(1.0, |o| (o - x).abs() / 2.0);
                let s = diff_at(&curves[a], &curves[b], x - delta);
                if s == 0.0 {
                    return Err(Error::Degeneracy(format!(
                        "curves {a} and {b} agree just left of x = {x}"
                    )));
                }
                let (upper_left, lower_left) = if s > 0.0 { (a, b) } else { (b, a) };
                Ok(if leftmost {
                    ChargeRecord { point: *pt, charged_curve: upper_left, color: ChargeColor::Red }
                } else {
                    ChargeRecord { point: *pt, charged_curve: lower_left, color: ChargeColor::Blue }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CurveArrangement { n: curves.len(), charges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Every crossing with the charge it would receive if it qualified.
    pub fn charges(&self) -> &[ChargeRecord] {
        &self.charges
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k < 2 || k > self.n {
            Err(Error::Parameter(format!("k must lie in 2..={}, got {k}", self.n)))
        } else {
            Ok(())
        }
    }

    pub fn qualifying_points(&self, k: usize) -> Result<Vec<IntersectionPoint>> {
        self.check_k(k)?;
        Ok(self
            .charges
            .iter()
            .filter(|c| qualifies(c, k))
            .map(|c| c.point)
            .collect())
    }

    pub fn ledger(&self, k: usize) -> Result<ChargeLedger> {
        self.check_k(k)?;
        let records: Vec<ChargeRecord> = self.charges.iter().filter(|c| qualifies(c, k)).copied().collect();
        let mut per_curve = vec![CurveCharges::default(); self.n];
        for r in &records {
            let slot = &mut per_curve[r.charged_curve];
            match r.color {
                ChargeColor::Red => slot.red += 1,
                ChargeColor::Blue => slot.blue += 1,
            }
        }
        Ok(ChargeLedger { k, n: self.n, qualifying_count: records.len(), records, per_curve })
    }
}

fn qualifies(c: &ChargeRecord, k: usize) -> bool {
    c.point.above_count().expect("curve crossings carry above-counts") + 2 <= k
}

/// Crossings lying strictly above at most `k - 2` curves other than their definers.
pub fn qualifying_points(f: &Family, k: usize) -> Result<Vec<IntersectionPoint>> {
    CurveArrangement::new(f)?.qualifying_points(k)
}

pub fn build_ledger(f: &Family, k: usize) -> Result<ChargeLedger> {
    CurveArrangement::new(f)?.ledger(k)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveFailure {
    pub curve: usize,
    pub color: ChargeColor,
    pub count: usize,
    pub points: Vec<IntersectionPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub k: usize,
    pub n: usize,
    pub qualifying_count: usize,
    /// `2 (k - 1) n`.
    pub bound: usize,
    /// `k - 1`.
    pub per_color_limit: usize,
    pub max_red: usize,
    pub max_blue: usize,
    pub red_slack: usize,
    pub blue_slack: usize,
    pub failures: Vec<CurveFailure>,
    pub pass: bool,
}

impl CertificateReport {
    pub fn into_result(self) -> Result<CertificateReport> {
        if self.pass {
            return Ok(self);
        }
        let msg = match self.failures.first() {
            Some(fl) => format!(
                "curve {} has {} {:?} charges at k = {} (limit {})",
                fl.curve, fl.count, fl.color, self.k, self.per_color_limit
            ),
            None => format!(
                "{} qualifying points exceed 2(k-1)n = {} at k = {}",
                self.qualifying_count, self.bound, self.k
            ),
        };
        Err(Error::CertificateFailure(msg))
    }
}

/// Checks the per-curve, per-color limit `k - 1` and the total `2(k-1)n`.
pub fn verify_claims(ledger: &ChargeLedger, f: &Family) -> Result<CertificateReport> {
    f.curve_members()?;
    if ledger.n != f.len() {
        return Err(Error::Parameter(format!(
            "ledger covers {} curves but the family has {}",
            ledger.n,
            f.len()
        )));
    }
    let limit = ledger.k - 1;
    let mut failures = Vec::new();
    for (curve, counts) in ledger.per_curve.iter().enumerate() {
        for (color, count) in [(ChargeColor::Red, counts.red), (ChargeColor::Blue, counts.blue)] {
            if count > limit {
                let points = ledger
                    .records
                    .iter()
                    .filter(|r| r.charged_curve == curve && r.color == color)
                    .map(|r| r.point)
                    .collect();
                failures.push(CurveFailure { curve, color, count, points });
            }
        }
    }
    let max_red = ledger.per_curve.iter().map(|c| c.red).max().unwrap_or(0);
    let max_blue = ledger.per_curve.iter().map(|c| c.blue).max().unwrap_or(0);
    let bound = 2 * limit * ledger.n;
    let consistent = ledger.records.len() == ledger.qualifying_count;
    let pass = failures.is_empty() && ledger.qualifying_count <= bound && consistent;
    Ok(CertificateReport {
        k: ledger.k,
        n: ledger.n,
        qualifying_count: ledger.qualifying_count,
        bound,
        per_color_limit: limit,
        max_red,
        max_blue,
        red_slack: limit.saturating_sub(max_red),
        blue_slack: limit.saturating_sub(max_blue),
        failures,
        pass,
    })
}

/// Offsets at which [`ordering_violations`] compares curves.
pub const PROBE_OFFSETS: [f64; 8] = [1e-3, 1e-2, 0.1, 0.5, 1.0, 3.0, 10.0, 100.0];

/// Spot-checks the ordering each charge relies on: a red-charged curve lies
/// above the other definer everywhere left of the crossing, a blue-charged
/// curve lies above it everywhere right of the crossing. Returns the records
/// that fail at some probe.
pub fn ordering_violations(ledger: &ChargeLedger, f: &Family) -> Result<Vec<ChargeRecord>> {
    let curves = f.curve_members()?;
    Ok(ledger
        .records
        .iter()
        .filter(|r| {
            let p = &curves[r.charged_curve];
            let q = &curves[r.other_curve()];
            let sign = match r.color {
                ChargeColor::Red => -1.0,
                ChargeColor::Blue => 1.0,
            };
            PROBE_OFFSETS
                .iter()
                .any(|&t| diff_at(p, q, r.point.point.x + sign * t) <= 0.0)
        })
        .copied()
        .collect())
}

#[derive(Serialize)]
struct LedgerRow {
    point_x: f64,
    point_y: f64,
    definer_a: usize,
    definer_b: usize,
    above_count: usize,
    charged_curve: usize,
    color: ChargeColor,
}

impl ChargeLedger {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.records {
            w.serialize(LedgerRow {
                point_x: r.point.point.x,
                point_y: r.point.point.y,
                definer_a: r.point.definers.0,
                definer_b: r.point.definers.1,
                above_count: r.point.above_count().unwrap_or(0),
                charged_curve: r.charged_curve,
                color: r.color,
            })
            .expect("in-memory csv write");
        }
        if self.records.is_empty() {
            return "point_x,point_y,definer_a,definer_b,above_count,charged_curve,color\n".to_string();
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}
