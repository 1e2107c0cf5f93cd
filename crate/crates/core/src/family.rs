//! Family model, generators and JSON persistence.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fmt;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    self, contains_point, curve_curve_intersections, validate_general_position, Circle, Containment, Point, QuadCurve,
    Tolerance, ValidationReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Discs,
    Curves,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Discs => "discs",
            Kind::Curves => "curves",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Members {
    Discs(Vec<Circle>),
    Curves(Vec<QuadCurve>),
}

impl Members {
    pub fn kind(&self) -> Kind {
        match self {
            Members::Discs(_) => Kind::Discs,
            Members::Curves(_) => Kind::Curves,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Members::Discs(v) => v.len(),
            Members::Curves(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn ids(&self) -> Vec<usize> {
        match self {
            Members::Discs(v) => v.iter().map(|c| c.id).collect(),
            Members::Curves(v) => v.iter().map(|q| q.id).collect(),
        }
    }
}

/// Where a family came from. Stored alongside the members in family files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub generator: String,
    pub seed: Option<u64>,
    pub params: serde_json::Value,
}

impl Provenance {
    fn new(generator: &str, seed: Option<u64>, params: serde_json::Value) -> Self {
        Provenance {
            tool: crate::TOOL_NAME.to_string(),
            version: crate::VERSION.to_string(),
            generator: generator.to_string(),
            seed,
            params,
        }
    }
}

/// A validated, homogeneous family. Member ids are `0..n` and match indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    label: String,
    tol: Tolerance,
    members: Members,
    provenance: Option<Provenance>,
}

impl Family {
    /// Builds a family and checks ids, tolerance and general position.
    /// With `eps == None` the default eps is derived from the family's extent.
    pub fn new(label: impl Into<String>, members: Members, eps: Option<f64>) -> Result<Self> {
        check_ids(&members).map_err(Error::Parameter)?;
        let diameter = extent(&members);
        let tol = match eps {
            Some(e) => Tolerance::new(e)?,
            None => Tolerance::for_diameter(diameter),
        };
        tol.check_extent(diameter)?;
        let report = validate(&members, tol);
        if !report.is_ok() {
            return Err(Error::Validation(report.summary()));
        }
        Ok(Family { label: label.into(), tol, members, provenance: None })
    }

    pub fn discs(label: impl Into<String>, discs: Vec<Circle>) -> Result<Self> {
        Family::new(label, Members::Discs(discs), None)
    }

    pub fn curves(label: impl Into<String>, curves: Vec<QuadCurve>) -> Result<Self> {
        Family::new(label, Members::Curves(curves), None)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn kind(&self) -> Kind {
        self.members.kind()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn tol(&self) -> Tolerance {
        self.tol
    }

    pub fn members(&self) -> &Members {
        &self.members
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn seed(&self) -> Option<u64> {
        self.provenance.as_ref().and_then(|p| p.seed)
    }

    pub fn disc_members(&self) -> Result<&[Circle]> {
        match &self.members {
            Members::Discs(v) => Ok(v),
            Members::Curves(_) => Err(Error::kind(Kind::Discs, Kind::Curves)),
        }
    }

    pub fn curve_members(&self) -> Result<&[QuadCurve]> {
        match &self.members {
            Members::Curves(v) => Ok(v),
            Members::Discs(_) => Err(Error::kind(Kind::Curves, Kind::Discs)),
        }
    }

    /// Subfamily of the discs selected by `keep`, re-indexed from 0.
    /// Keeps this family's tolerance; general position is inherited.
    pub fn disc_subfamily(&self, keep: &[bool]) -> Result<Family> {
        let discs = self.disc_members()?;
        let members: Vec<Circle> = discs
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .enumerate()
            .map(|(id, (c, _))| Circle { id, ..*c })
            .collect();
        Ok(Family {
            label: format!("{} (subfamily)", self.label),
            tol: self.tol,
            members: Members::Discs(members),
            provenance: None,
        })
    }

    /// Axis-aligned bounding box `(min, max)` of the discs, or of the
    /// crossing points for curves. `None` when there is nothing to bound.
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        bounding_box(&self.members)
    }

    pub fn validation_report(&self) -> ValidationReport {
        validate(&self.members, self.tol)
    }
}

fn validate(members: &Members, tol: Tolerance) -> ValidationReport {
    match members {
        Members::Discs(v) => validate_general_position(v, tol),
        Members::Curves(v) => validate_general_position(v, tol),
    }
}

fn check_ids(members: &Members) -> std::result::Result<(), String> {
    if members.is_empty() {
        return Err("family must have at least one member".into());
    }
    let ids = members.ids();
    let mut seen = BTreeSet::new();
    for &id in &ids {
        if !seen.insert(id) {
            return Err(format!("duplicate member id {id}"));
        }
    }
    for (idx, &id) in ids.iter().enumerate() {
        if id != idx {
            return Err(format!("member ids must be 0..{} in order, found {id} at position {idx}", ids.len()));
        }
    }
    Ok(())
}

fn bounding_box(members: &Members) -> Option<(Point, Point)> {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut grow = |x0: f64, y0: f64, x1: f64, y1: f64| {
        lo.x = lo.x.min(x0);
        lo.y = lo.y.min(y0);
        hi.x = hi.x.max(x1);
        hi.y = hi.y.max(y1);
    };
    match members {
        Members::Discs(v) => {
            for c in v {
                grow(c.cx - c.r, c.cy - c.r, c.cx + c.r, c.cy + c.r);
            }
        }
        Members::Curves(v) => {
            for p in raw_curve_crossings(v) {
                grow(p.x, p.y, p.x, p.y);
            }
        }
    }
    (lo.x <= hi.x).then_some((lo, hi))
}

/// Curve crossings ignoring tangency, used only to size the tolerance.
fn raw_curve_crossings(curves: &[QuadCurve]) -> Vec<Point> {
    let tiny = Tolerance::new(f64::MIN_POSITIVE).expect("positive");
    let mut out = Vec::new();
    for (i, q1) in curves.iter().enumerate() {
        for q2 in &curves[i + 1..] {
            if let Ok(pts) = geom::curve_curve_intersections(q1, q2, tiny) {
                out.extend(pts.into_iter().filter(Point::is_finite));
            }
        }
    }
    out
}

/// Bounding-box diameter; 1.0 when the box is empty or degenerate.
fn extent(members: &Members) -> f64 {
    match bounding_box(members) {
        Some((lo, hi)) => {
            let d = lo.dist(&hi);
            if d.is_finite() && d > 0.0 {
                d
            } else {
                1.0
            }
        }
        None => 1.0,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub n: usize,
    pub seed: u64,
    /// Centers are drawn from `[box_min, box_max]^2`.
    pub box_min: f64,
    pub box_max: f64,
    pub r_min: f64,
    pub r_max: f64,
    /// Common-point generator: every disc contains the point with this clearance.
    pub margin: f64,
    pub a_range: (f64, f64),
    pub b_range: (f64, f64),
    pub c_range: (f64, f64),
    /// Random curves: every crossing has `|x| <= x_window`. Nearly parallel
    /// pairs otherwise cross far out and blow up the extent-derived eps.
    pub x_window: f64,
    pub max_rounds: usize,
    /// Overrides the extent-derived eps.
    pub eps: Option<f64>,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            n: 20,
            seed: 0,
            box_min: 0.0,
            box_max: 10.0,
            r_min: 0.5,
            r_max: 2.0,
            margin: 0.01,
            a_range: (-1.0, 1.0),
            b_range: (-4.0, 4.0),
            c_range: (-4.0, 4.0),
            x_window: 50.0,
            max_rounds: 100,
            eps: None,
        }
    }
}

impl GeneratorParams {
    pub fn new(n: usize, seed: u64) -> Self {
        GeneratorParams { n, seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parameter(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if !(self.box_min.is_finite() && self.box_max.is_finite() && self.box_min <= self.box_max) {
            return bad(format!("bad box [{}, {}]", self.box_min, self.box_max));
        }
        if !(self.r_min.is_finite() && self.r_max.is_finite() && 0.0 < self.r_min && self.r_min <= self.r_max) {
            return bad(format!("bad radius range [{}, {}]", self.r_min, self.r_max));
        }
        if !(self.margin.is_finite() && self.margin >= 0.0) {
            return bad(format!("margin must be >= 0, got {}", self.margin));
        }
        for (name, (lo, hi)) in [("a", self.a_range), ("b", self.b_range), ("c", self.c_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return bad(format!("bad {name} range [{lo}, {hi}]"));
            }
        }
        if !(self.x_window.is_finite() && self.x_window > 0.0) {
            return bad(format!("x_window must be > 0, got {}", self.x_window));
        }
        if self.max_rounds == 0 {
            return bad("max_rounds must be at least 1".into());
        }
        if let Some(e) = self.eps {
            Tolerance::new(e)?;
        }
        Ok(())
    }

    fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("params serialize")
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for re-sampling round `round`; round 0 uses the caller's seed.
fn round_seed(seed: u64, round: usize) -> u64 {
    if round == 0 {
        seed
    } else {
        splitmix64(seed ^ (round as u64).rotate_left(32))
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// Draws whole families until one passes validation.
fn resample<F>(params: &GeneratorParams, label: String, mut draw: F) -> Result<Family>
where
    F: FnMut(&mut ChaCha8Rng) -> Result<Members>,
{
    params.validate()?;
    let mut last = String::new();
    for round in 0..params.max_rounds {
        let mut rng = ChaCha8Rng::seed_from_u64(round_seed(params.seed, round));
        match draw(&mut rng).and_then(|members| Family::new(label.clone(), members, params.eps)) {
            Ok(f) => return Ok(f),
            Err(Error::Validation(msg)) => last = msg,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Generation { rounds: params.max_rounds, last })
}

pub fn gen_random_discs(params: &GeneratorParams) -> Result<Family> {
    let label = format!("random-discs n={} seed={}", params.n, params.seed);
    let fam = resample(params, label, |rng| {
        let discs = (0..params.n)
            .map(|id| Circle {
                id,
                cx: uniform(rng, (params.box_min, params.box_max)),
                cy: uniform(rng, (params.box_min, params.box_max)),
                r: uniform(rng, (params.r_min, params.r_max)),
            })
            .collect();
        Ok(Members::Discs(discs))
    })?;
    Ok(fam.with_provenance(Provenance::new("random-discs", Some(params.seed), params.to_value())))
}

/// Discs that all contain `origin` with clearance at least `params.margin`.
pub fn gen_common_point_discs(params: &GeneratorParams, origin: Point) -> Result<Family> {
    if !origin.is_finite() {
        return Err(Error::Parameter("common point must be finite".into()));
    }
    if params.r_min <= params.margin {
        return Err(Error::Parameter(format!(
            "r_min {} must exceed margin {}",
            params.r_min, params.margin
        )));
    }
    let label = format!("common-point-discs n={} seed={} O={}", params.n, params.seed, origin);
    let fam = resample(params, label, |rng| {
        let discs = (0..params.n)
            .map(|id| {
                let r = uniform(rng, (params.r_min, params.r_max));
                let rho = (r - params.margin) * rng.gen::<f64>().sqrt();
                let theta = rng.gen::<f64>() * TAU;
                Circle { id, cx: origin.x + rho * theta.cos(), cy: origin.y + rho * theta.sin(), r }
            })
            .collect();
        Ok(Members::Discs(discs))
    })?;
    if params.margin <= fam.tol().eps() {
        return Err(Error::Parameter(format!(
            "margin {} must exceed eps {}",
            params.margin,
            fam.tol().eps()
        )));
    }
    debug_assert!(fam
        .disc_members()?
        .iter()
        .all(|c| contains_point(c, &origin, fam.tol()) == Containment::Inside));
    let mut value = params.to_value();
    value["origin"] = serde_json::json!({ "x": origin.x, "y": origin.y });
    Ok(fam.with_provenance(Provenance::new("common-point-discs", Some(params.seed), value)))
}

/// `k - 1` horizontal lines `y = i / (4k)` followed by the parabolas
/// `y = (x - i)^2` for `i = 1..=n-k+1`.
pub fn gen_lines_parabolas(n: usize, k: usize) -> Result<Family> {
    if k < 2 || k > n {
        return Err(Error::Parameter(format!("lines-parabolas needs 2 <= k <= n, got k={k} n={n}")));
    }
    let mut curves = Vec::with_capacity(n);
    for i in 1..k {
        curves.push(QuadCurve { id: curves.len(), a: 0.0, b: 0.0, c: i as f64 / (4 * k) as f64 });
    }
    for i in 1..=(n - k + 1) {
        let s = i as f64;
        curves.push(QuadCurve { id: curves.len(), a: 1.0, b: -2.0 * s, c: s * s });
    }
    let fam = Family::curves(format!("lines-parabolas n={n} k={k}"), curves)?;
    let params = serde_json::json!({ "n": n, "k": k });
    Ok(fam.with_provenance(Provenance::new("lines-parabolas", None, params)))
}

pub fn gen_random_curves(params: &GeneratorParams) -> Result<Family> {
    const CANDIDATES: usize = 10_000;
    let label = format!("random-curves n={} seed={}", params.n, params.seed);
    // Only used to reject candidates; the family gets its own eps on validation.
    let probe = Tolerance::new(f64::MIN_POSITIVE)?;
    let fam = resample(params, label, |rng| {
        let mut curves: Vec<QuadCurve> = Vec::with_capacity(params.n);
        while curves.len() < params.n {
            let id = curves.len();
            let candidate = (0..CANDIDATES)
                .map(|_| QuadCurve {
                    id,
                    a: uniform(rng, params.a_range),
                    b: uniform(rng, params.b_range),
                    c: uniform(rng, params.c_range),
                })
                .find(|q| {
                    curves.iter().all(|o| match curve_curve_intersections(q, o, probe) {
                        Ok(pts) => pts.iter().all(|p| p.x.abs() <= params.x_window),
                        Err(_) => false,
                    })
                });
            match candidate {
                Some(q) => curves.push(q),
                None => {
                    // Fails this round only; `resample` draws a fresh family.
                    return Err(Error::Validation(format!(
                        "no curve {id} keeps its crossings within |x| <= {}",
                        params.x_window
                    )));
                }
            }
        }
        Ok(Members::Curves(curves))
    })?;
    Ok(fam.with_provenance(Provenance::new("random-curves", Some(params.seed), params.to_value())))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscRecord {
    id: usize,
    cx: f64,
    cy: f64,
    r: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveRecord {
    id: usize,
    a: f64,
    b: f64,
    c: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MemberRecord {
    Disc(DiscRecord),
    Curve(CurveRecord),
}

#[derive(Serialize, Deserialize)]
struct FamilyFile {
    kind: Kind,
    label: String,
    eps: f64,
    members: Vec<MemberRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Provenance>,
}

impl Family {
    pub fn to_json(&self) -> String {
        let members = match &self.members {
            Members::Discs(v) => v
                .iter()
                .map(|c| MemberRecord::Disc(DiscRecord { id: c.id, cx: c.cx, cy: c.cy, r: c.r }))
                .collect(),
            Members::Curves(v) => v
                .iter()
                .map(|q| MemberRecord::Curve(CurveRecord { id: q.id, a: q.a, b: q.b, c: q.c }))
                .collect(),
        };
        let file = FamilyFile {
            kind: self.kind(),
            label: self.label.clone(),
            eps: self.tol.eps(),
            members,
            meta: self.provenance.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("family serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Family> {
        let file: FamilyFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let fmt_err = |m: String| Error::Format(m);
        let members = match file.kind {
            Kind::Discs => {
                let mut discs = Vec::with_capacity(file.members.len());
                for m in file.members {
                    match m {
                        MemberRecord::Disc(d) => discs.push(
                            Circle::new(d.id, d.cx, d.cy, d.r).map_err(|e| fmt_err(e.to_string()))?,
                        ),
                        MemberRecord::Curve(_) => return Err(fmt_err("curve member in a discs family".into())),
                    }
                }
                discs.sort_by_key(|c| c.id);
                Members::Discs(discs)
            }
            Kind::Curves => {
                let mut curves = Vec::with_capacity(file.members.len());
                for m in file.members {
                    match m {
                        MemberRecord::Curve(q) => curves.push(
                            QuadCurve::new(q.id, q.a, q.b, q.c).map_err(|e| fmt_err(e.to_string()))?,
                        ),
                        MemberRecord::Disc(_) => return Err(fmt_err("disc member in a curves family".into())),
                    }
                }
                curves.sort_by_key(|q| q.id);
                Members::Curves(curves)
            }
        };
        check_ids(&members).map_err(fmt_err)?;
        let tol = Tolerance::new(file.eps).map_err(|e| fmt_err(e.to_string()))?;
        tol.check_extent(extent(&members)).map_err(|e| fmt_err(e.to_string()))?;
        let report = validate(&members, tol);
        if !report.is_ok() {
            return Err(Error::Validation(report.summary()));
        }
        Ok(Family { label: file.label, tol, members, provenance: file.meta })
    }
}

pub fn save_family(family: &Family, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, family.to_json())?;
    Ok(())
}

pub fn load_family(path: impl AsRef<Path>) -> Result<Family> {
    let text = fs::read_to_string(path)?;
    Family::from_json(&text)
}
