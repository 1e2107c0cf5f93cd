//! Geometric primitives for disc and quadratic-curve families.
//!
//! All predicates work in double precision against an explicit [`Tolerance`].
//! Tangencies and coincidences are reported as errors rather than being
//! folded into a single intersection point: the families handled here must
//! cross transversally, and generators re-sample when they do not.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Lexicographic order on `(x, y)`.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A closed disc, identified by its boundary circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub id: usize,
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl Circle {
    pub fn new(id: usize, cx: f64, cy: f64, r: f64) -> Result<Self> {
        if !(cx.is_finite() && cy.is_finite() && r.is_finite()) {
            return Err(Error::Parameter(format!("circle {id} has non-finite values")));
        }
        if r <= 0.0 {
            return Err(Error::Parameter(format!("circle {id} has radius {r} <= 0")));
        }
        Ok(Circle { id, cx, cy, r })
    }

    pub fn center(&self) -> Point {
        Point::new(self.cx, self.cy)
    }
}

/// The graph of `y = a*x^2 + b*x + c`. `a == 0` gives a line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadCurve {
    pub id: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadCurve {
    pub fn new(id: usize, a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::Parameter(format!("curve {id} has non-finite coefficients")));
        }
        Ok(QuadCurve { id, a, b, c })
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }
}

/// Separation threshold used by every predicate, in plane units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    eps: f64,
}

impl Tolerance {
    /// Ratio between the default eps and the family's bounding-box diameter.
    pub const DEFAULT_RELATIVE: f64 = 1e-9;
    /// eps must stay below `diameter / MAX_RELATIVE_INV`.
    pub const MAX_RELATIVE_INV: f64 = 1e3;

    pub fn new(eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::Parameter(format!("tolerance must be positive, got {eps}")));
        }
        Ok(Tolerance { eps })
    }

    pub fn for_diameter(diameter: f64) -> Self {
        let d = if diameter.is_finite() && diameter > 0.0 { diameter } else { 1.0 };
        Tolerance { eps: Self::DEFAULT_RELATIVE * d }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Checks that eps is small relative to the given extent.
    pub fn check_extent(&self, diameter: f64) -> Result<()> {
        if self.eps < diameter / Self::MAX_RELATIVE_INV {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "eps {} is not below diameter/1000 = {}",
                self.eps,
                diameter / Self::MAX_RELATIVE_INV
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AboveStatus {
    Above,
    On,
    Below,
}

fn sort_points(points: &mut [Point]) {
    points.sort_by(|a, b| a.lex_cmp(b));
}

/// Crossing points of two boundary circles: zero or two, sorted by `(x, y)`.
pub fn circle_circle_intersections(c1: &Circle, c2: &Circle, tol: Tolerance) -> Result<Vec<Point>> {
    let eps = tol.eps();
    let dx = c2.cx - c1.cx;
    let dy = c2.cy - c1.cy;
    let d = dx.hypot(dy);
    let (lo, hi) = ((c1.r - c2.r).abs(), c1.r + c2.r);

    if d <= eps && (c1.r - c2.r).abs() <= eps {
        return Err(Error::Coincident { a: c1.id, b: c2.id });
    }
    if (d - hi).abs() <= eps || (d - lo).abs() <= eps {
        return Err(Error::Tangency { a: c1.id, b: c2.id });
    }
    if d > hi || d < lo {
        return Ok(Vec::new());
    }

    // Foot of the radical line on the center segment, measured from c1.
    let along = (d * d + c1.r * c1.r - c2.r * c2.r) / (2.0 * d);
    let half_chord = (c1.r * c1.r - along * along).max(0.0).sqrt();
    let (ux, uy) = (dx / d, dy / d);
    let bx = c1.cx + along * ux;
    let by = c1.cy + along * uy;
    let mut points = vec![
        Point::new(bx - half_chord * uy, by + half_chord * ux),
        Point::new(bx + half_chord * uy, by - half_chord * ux),
    ];
    sort_points(&mut points);
    Ok(points)
}

/// Crossing points of two quadratic curves (roots of their difference),
/// sorted by `x`.
pub fn curve_curve_intersections(
    q1: &QuadCurve,
    q2: &QuadCurve,
    tol: Tolerance,
) -> Result<Vec<Point>> {
    let eps = tol.eps();
    let (da, db, dc) = (q1.a - q2.a, q1.b - q2.b, q1.c - q2.c);

    if da.abs() <= eps && db.abs() <= eps && dc.abs() <= eps {
        return Err(Error::Coincident { a: q1.id, b: q2.id });
    }

    let xs: Vec<f64> = if da == 0.0 {
        if db == 0.0 {
            Vec::new()
        } else {
            vec![-dc / db]
        }
    } else {
        let disc = db * db - 4.0 * da * dc;
        // Half the distance between the two (possibly complex) roots.
        let half_gap = disc.abs().sqrt() / (2.0 * da.abs());
        if half_gap <= eps {
            return Err(Error::Tangency { a: q1.id, b: q2.id });
        }
        if disc < 0.0 {
            Vec::new()
        } else {
            // q != 0 here: disc > 0 after the tangency check, and signum(0.0) == 1.
            let q = -0.5 * (db + db.signum() * disc.sqrt());
            let (r1, r2) = (q / da, dc / q);
            vec![r1.min(r2), r1.max(r2)]
        }
    };

    let mut points: Vec<Point> = xs.into_iter().map(|x| Point::new(x, q1.eval(x))).collect();
    sort_points(&mut points);
    Ok(points)
}

pub fn contains_point(c: &Circle, p: &Point, tol: Tolerance) -> Containment {
    let d = c.center().dist(p);
    if (d - c.r).abs() <= tol.eps() {
        Containment::Boundary
    } else if d < c.r {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

pub fn above_status(q: &QuadCurve, p: &Point, tol: Tolerance) -> AboveStatus {
    let v = q.eval(p.x);
    if (p.y - v).abs() <= tol.eps() {
        AboveStatus::On
    } else if p.y > v {
        AboveStatus::Above
    } else {
        AboveStatus::Below
    }
}

/// Behaviour shared by the two member geometries.
pub trait Member: Copy + Send + Sync {
    fn id(&self) -> usize;

    fn crossings(&self, other: &Self, tol: Tolerance) -> Result<Vec<Point>>;

    /// True when `p` lies within eps of this member's boundary curve.
    fn passes_near(&self, p: &Point, tol: Tolerance) -> bool;

    /// Whether validation also checks abscissa separation along each member.
    const CHECK_ABSCISSAE: bool;
}

impl Member for Circle {
    fn id(&self) -> usize {
        self.id
    }

    fn crossings(&self, other: &Self, tol: Tolerance) -> Result<Vec<Point>> {
        circle_circle_intersections(self, other, tol)
    }

    fn passes_near(&self, p: &Point, tol: Tolerance) -> bool {
        contains_point(self, p, tol) == Containment::Boundary
    }

    const CHECK_ABSCISSAE: bool = false;
}

impl Member for QuadCurve {
    fn id(&self) -> usize {
        self.id
    }

    fn crossings(&self, other: &Self, tol: Tolerance) -> Result<Vec<Point>> {
        curve_curve_intersections(self, other, tol)
    }

    fn passes_near(&self, p: &Point, tol: Tolerance) -> bool {
        above_status(self, p, tol) == AboveStatus::On
    }

    const CHECK_ABSCISSAE: bool = true;
}

/// A crossing between members at indices `a < b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    pub a: usize,
    pub b: usize,
    pub point: Point,
}

/// All pairwise crossings, ordered by `(a, b)` then by point.
pub fn pairwise_crossings<M: Member>(members: &[M], tol: Tolerance) -> Result<Vec<Crossing>> {
    let n = members.len();
    let per_pair: Vec<Result<Vec<Crossing>>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..n).map(move |j| {
                members[i].crossings(&members[j], tol).map(|pts| {
                    pts.into_iter()
                        .map(|point| Crossing { a: i, b: j, point })
                        .collect()
                })
            })
        })
        .collect();
    let mut out = Vec::new();
    for r in per_pair {
        out.extend(r?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Violation {
    Tangency { a: usize, b: usize },
    Coincident { a: usize, b: usize },
    /// A crossing of `definers` lies within eps of a third member.
    TriplePoint { definers: (usize, usize), third: usize, point: Point },
    /// Two crossings on `member` whose x-coordinates are within eps.
    CloseAbscissae { member: usize, first: (usize, usize), second: (usize, usize) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Tangency { a, b } => write!(f, "members {a} and {b} are tangent"),
            Violation::Coincident { a, b } => write!(f, "members {a} and {b} coincide"),
            Violation::TriplePoint { definers, third, point } => write!(
                f,
                "crossing {point} of members {} and {} lies on member {third}",
                definers.0, definers.1
            ),
            Violation::CloseAbscissae { member, first, second } => write!(
                f,
                "crossings with {:?} and {:?} on member {member} share an abscissa",
                first, second
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        match self.violations.len() {
            0 => "ok".to_string(),
            1 => self.violations[0].to_string(),
            k => format!("{} (and {} more)", self.violations[0], k - 1),
        }
    }
}

/// Lists every general-position violation in `members`.
pub fn validate_general_position<M: Member>(members: &[M], tol: Tolerance) -> ValidationReport {
    let n = members.len();
    let pair_results: Vec<(usize, usize, Result<Vec<Point>>)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..n).map(move |j| (i, j, members[i].crossings(&members[j], tol)))
        })
        .collect();

    let mut violations = Vec::new();
    let mut crossings = Vec::new();
    for (i, j, res) in pair_results {
        match res {
            Ok(pts) => crossings.extend(pts.into_iter().map(|point| Crossing { a: i, b: j, point })),
            Err(Error::Tangency { a, b }) => violations.push(Violation::Tangency { a, b }),
            Err(Error::Coincident { a, b }) => violations.push(Violation::Coincident { a, b }),
            Err(_) => unreachable!("intersection routines only fail on tangency or coincidence"),
        }
    }

    let triples: Vec<Violation> = crossings
        .par_iter()
        .flat_map_iter(|c| {
            members
                .iter()
                .enumerate()
                .filter(move |(m, member)| *m != c.a && *m != c.b && member.passes_near(&c.point, tol))
                .map(move |(_, member)| Violation::TriplePoint {
                    definers: (members[c.a].id(), members[c.b].id()),
                    third: member.id(),
                    point: c.point,
                })
        })
        .collect();
    violations.extend(triples);

    if M::CHECK_ABSCISSAE {
        let mut on_member: Vec<Vec<(f64, (usize, usize))>> = vec![Vec::new(); n];
        for c in &crossings {
            let pair = (members[c.a].id(), members[c.b].id());
            on_member[c.a].push((c.point.x, pair));
            on_member[c.b].push((c.point.x, pair));
        }
        for (m, xs) in on_member.iter_mut().enumerate() {
            xs.sort_by(|u, v| u.0.total_cmp(&v.0));
            for w in xs.windows(2) {
                if (w[1].0 - w[0].0).abs() < tol.eps() {
                    violations.push(Violation::CloseAbscissae {
                        member: members[m].id(),
                        first: w[0].1,
                        second: w[1].1,
                    });
                }
            }
        }
    }

    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::new(1e-9).unwrap()
    }

    fn unit(id: usize, x: f64, y: f64) -> Circle {
        Circle::new(id, x, y, 1.0).unwrap()
    }

    fn curve(id: usize, a: f64, b: f64, c: f64) -> QuadCurve {
        QuadCurve::new(id, a, b, c).unwrap()
    }

    fn close(p: Point, x: f64, y: f64) -> bool {
        (p.x - x).abs() < 1e-12 && (p.y - y).abs() < 1e-12
    }

    #[test]
    fn unit_circles_cross_at_two_points() {
        let pts = circle_circle_intersections(&unit(0, 0.0, 0.0), &unit(1, 1.0, 0.0), tol()).unwrap();
        let h = 3f64.sqrt() / 2.0;
        assert_eq!(pts.len(), 2);
        assert!(close(pts[0], 0.5, -h));
        assert!(close(pts[1], 0.5, h));
    }

    #[test]
    fn disjoint_circles_have_no_crossings() {
        let pts = circle_circle_intersections(&unit(0, 0.0, 0.0), &unit(1, 5.0, 0.0), tol()).unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn nested_circles_have_no_crossings() {
        let big = Circle::new(1, 0.0, 0.0, 3.0).unwrap();
        assert!(circle_circle_intersections(&unit(0, 0.0, 0.0), &big, tol())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn tangent_and_coincident_circles_are_errors() {
        let err = circle_circle_intersections(&unit(0, 0.0, 0.0), &unit(1, 2.0, 0.0), tol());
        assert!(matches!(err, Err(Error::Tangency { a: 0, b: 1 })));
        let inner = Circle::new(1, 1.0, 0.0, 2.0).unwrap();
        let err = circle_circle_intersections(&unit(0, 0.0, 0.0), &inner, tol());
        assert!(matches!(err, Err(Error::Tangency { .. })));
        let err = circle_circle_intersections(&unit(0, 0.0, 0.0), &unit(1, 0.0, 0.0), tol());
        assert!(matches!(err, Err(Error::Coincident { .. })));
    }

    #[test]
    fn parabola_pairs() {
        let p0 = curve(0, 1.0, 0.0, 0.0);
        let p2 = curve(1, 1.0, -4.0, 4.0);
        let pts = curve_curve_intersections(&p0, &p2, tol()).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(close(pts[0], 1.0, 1.0));

        let line = curve(2, 0.0, 0.0, 1.0);
        let pts = curve_curve_intersections(&p0, &line, tol()).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(close(pts[0], -1.0, 1.0));
        assert!(close(pts[1], 1.0, 1.0));

        let l1 = curve(3, 0.0, 1.0, 0.0);
        let l2 = curve(4, 0.0, 1.0, 1.0);
        assert!(curve_curve_intersections(&l1, &l2, tol()).unwrap().is_empty());
    }

    #[test]
    fn curve_degeneracies() {
        let p = curve(0, 1.0, 0.0, 0.0);
        let touching = curve(1, 0.0, 0.0, 0.0);
        assert!(matches!(
            curve_curve_intersections(&p, &touching, tol()),
            Err(Error::Tangency { .. })
        ));
        assert!(matches!(
            curve_curve_intersections(&p, &curve(1, 1.0, 0.0, 0.0), tol()),
            Err(Error::Coincident { .. })
        ));
        // db == 0
        let pts = curve_curve_intersections(&p, &curve(1, 0.0, 0.0, 4.0), tol()).unwrap();
        assert!(close(pts[0], -2.0, 4.0) && close(pts[1], 2.0, 4.0));
    }

    #[test]
    fn containment_classes() {
        let c = unit(0, 0.0, 0.0);
        assert_eq!(contains_point(&c, &Point::new(0.0, 0.0), tol()), Containment::Inside);
        assert_eq!(contains_point(&c, &Point::new(1.0, 0.0), tol()), Containment::Boundary);
        assert_eq!(contains_point(&c, &Point::new(3.0, 0.0), tol()), Containment::Outside);
    }

    #[test]
    fn above_classes() {
        let q = curve(0, 1.0, 0.0, 0.0);
        assert_eq!(above_status(&q, &Point::new(0.0, 1.0), tol()), AboveStatus::Above);
        assert_eq!(above_status(&q, &Point::new(2.0, 4.0), tol()), AboveStatus::On);
        assert_eq!(above_status(&q, &Point::new(0.0, -1.0), tol()), AboveStatus::Below);
    }

    #[test]
    fn generic_triple_is_accepted() {
        // (0,0)-(1.2,0) cross at (0.6, +-0.8); the third center (0.6, 1) is
        // 0.2 and 1.8 away from them, so neither lies on the third circle.
        let discs = [unit(0, 0.0, 0.0), unit(1, 1.2, 0.0), unit(2, 0.6, 1.0)];
        let pts = circle_circle_intersections(&discs[0], &discs[1], tol()).unwrap();
        assert!(close(pts[0], 0.6, -0.8) && close(pts[1], 0.6, 0.8));
        let report = validate_general_position(&discs, tol());
        assert!(report.is_ok(), "{:?}", report);
    }

    #[test]
    fn tangent_pair_is_one_violation() {
        let report = validate_general_position(&[unit(0, 0.0, 0.0), unit(1, 2.0, 0.0)], tol());
        assert_eq!(report.violations, vec![Violation::Tangency { a: 0, b: 1 }]);
    }

    #[test]
    fn concurrent_lines_are_a_triple_point() {
        let lines = [curve(0, 0.0, 0.0, 0.0), curve(1, 0.0, 1.0, 0.0), curve(2, 0.0, -1.0, 0.0)];
        let report = validate_general_position(&lines, tol());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::TriplePoint { .. })));
        assert!(!report.is_ok());
    }

    #[test]
    fn tolerance_rejects_nonpositive() {
        assert!(Tolerance::new(0.0).is_err());
        assert!(Tolerance::new(-1.0).is_err());
        assert!(Tolerance::new(f64::NAN).is_err());
        assert!(Tolerance::new(1e-3).unwrap().check_extent(1.0).is_err());
        assert!(Tolerance::new(1e-4).unwrap().check_extent(1.0).is_ok());
    }
}
