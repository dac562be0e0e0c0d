//! Catalog of prox-regular characteristic sets.
//!
//! Every variant has a closed-form projection. Convex variants are
//! prox-regular for every radius; the complement of an open ball is
//! `radius`-prox-regular; a union of convex members at mutual distance at
//! least `gap` is `gap/2`-prox-regular (if two members both realised a
//! distance below `gap/2`, the triangle inequality would bring them closer
//! than `gap`).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::point::Point;
use crate::report::{PassRule, Report, Row};
use crate::tol;

/// A closed characteristic set `Z ⊂ R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SetSpec {
    Ball {
        center: Point,
        radius: f64,
    },
    Box {
        lo: Point,
        hi: Point,
    },
    /// `{p : <normal, p> <= offset}` with a unit normal.
    Halfspace {
        normal: Point,
        offset: f64,
    },
    /// `{p : |p - center| >= radius}`.
    ComplementOfBall {
        center: Point,
        radius: f64,
    },
    /// Union of convex members whose pairwise distances are at least `gap`.
    Union {
        members: Vec<SetSpec>,
        gap: f64,
    },
}

impl SetSpec {
    pub fn ball(center: impl Into<Point>, radius: f64) -> Result<Self> {
        let s = SetSpec::Ball {
            center: center.into(),
            radius,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn cube(lo: impl Into<Point>, hi: impl Into<Point>) -> Result<Self> {
        let s = SetSpec::Box {
            lo: lo.into(),
            hi: hi.into(),
        };
        s.validate()?;
        Ok(s)
    }

    /// The interval `[lo, hi]` as a one-dimensional box.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::cube(Point::scalar(lo), Point::scalar(hi))
    }

    pub fn halfspace(normal: impl Into<Point>, offset: f64) -> Result<Self> {
        let s = SetSpec::Halfspace {
            normal: normal.into(),
            offset,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn complement_of_ball(center: impl Into<Point>, radius: f64) -> Result<Self> {
        let s = SetSpec::ComplementOfBall {
            center: center.into(),
            radius,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn union(members: Vec<SetSpec>, gap: f64) -> Result<Self> {
        let s = SetSpec::Union { members, gap };
        s.validate()?;
        Ok(s)
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            SetSpec::Ball { .. } => "Ball",
            SetSpec::Box { .. } => "Box",
            SetSpec::Halfspace { .. } => "Halfspace",
            SetSpec::ComplementOfBall { .. } => "ComplementOfBall",
            SetSpec::Union { .. } => "Union",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SetSpec::Ball { center, .. } | SetSpec::ComplementOfBall { center, .. } => center.dim(),
            SetSpec::Box { lo, .. } => lo.dim(),
            SetSpec::Halfspace { normal, .. } => normal.dim(),
            SetSpec::Union { members, .. } => members.first().map_or(0, SetSpec::dim),
        }
    }

    pub fn is_convex(&self) -> bool {
        matches!(
            self,
            SetSpec::Ball { .. } | SetSpec::Box { .. } | SetSpec::Halfspace { .. }
        )
    }

    /// Radius of uniform prox-regularity; infinite for convex sets.
    pub fn prox_radius(&self) -> f64 {
        match self {
            SetSpec::Ball { .. } | SetSpec::Box { .. } | SetSpec::Halfspace { .. } => f64::INFINITY,
            SetSpec::ComplementOfBall { radius, .. } => *radius,
            SetSpec::Union { gap, .. } => gap / 2.0,
        }
    }

    /// Characteristic length used to size sampling regions.
    pub fn scale(&self) -> f64 {
        match self {
            SetSpec::Ball { radius, .. } | SetSpec::ComplementOfBall { radius, .. } => *radius,
            SetSpec::Box { lo, hi } => {
                let w = lo
                    .coords()
                    .iter()
                    .zip(hi.coords())
                    .map(|(l, h)| h - l)
                    .fold(0.0, f64::max);
                if w > 0.0 {
                    w
                } else {
                    1.0
                }
            }
            SetSpec::Halfspace { .. } => 1.0,
            SetSpec::Union { members, gap } => {
                members.iter().map(SetSpec::scale).fold(*gap, f64::max)
            }
        }
    }

    /// Checks the structural invariants of the variant, including the sampled
    /// pairwise-distance check for unions.
    pub fn validate(&self) -> Result<()> {
        match self {
            SetSpec::Ball { center, radius } | SetSpec::ComplementOfBall { center, radius } => {
                if center.dim() == 0 || !center.is_finite() {
                    return Err(Error::InvalidSet(format!(
                        "{}: center must be a finite point of dimension >= 1",
                        self.variant_name()
                    )));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidSet(format!(
                        "{}: radius must be positive and finite, got {radius}",
                        self.variant_name()
                    )));
                }
            }
            SetSpec::Box { lo, hi } => {
                check_dim(lo.dim(), hi.dim())?;
                if lo.dim() == 0 || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::InvalidSet("Box: bounds must be finite".into()));
                }
                if let Some(i) = (0..lo.dim()).find(|&i| lo[i] > hi[i]) {
                    return Err(Error::InvalidSet(format!(
                        "Box: lo[{i}] = {} exceeds hi[{i}] = {}",
                        lo[i], hi[i]
                    )));
                }
            }
            SetSpec::Halfspace { normal, offset } => {
                if normal.dim() == 0 || !normal.is_finite() || !offset.is_finite() {
                    return Err(Error::InvalidSet(
                        "Halfspace: normal and offset must be finite".into(),
                    ));
                }
                if (normal.norm() - 1.0).abs() > tol::ALGEBRAIC {
                    return Err(Error::InvalidSet(format!(
                        "Halfspace: normal must have unit norm, |n| = {}",
                        normal.norm()
                    )));
                }
            }
            SetSpec::Union { members, gap } => {
                if members.is_empty() {
                    return Err(Error::InvalidSet("Union: needs at least one member".into()));
                }
                if !(gap.is_finite() && *gap > 0.0) {
                    return Err(Error::InvalidSet(format!(
                        "Union: gap must be positive and finite, got {gap}"
                    )));
                }
                let d = members[0].dim();
                for (i, m) in members.iter().enumerate() {
                    if !m.is_convex() {
                        return Err(Error::InvalidSet(format!(
                            "Union: member {i} ({}) is not convex",
                            m.variant_name()
                        )));
                    }
                    m.validate()?;
                    check_dim(d, m.dim())?;
                }
                for i in 0..members.len() {
                    for j in i + 1..members.len() {
                        let dist = member_distance(&members[i], &members[j]);
                        if dist < gap * (1.0 - tol::GEOMETRIC) {
                            return Err(Error::UnionGapViolated {
                                first: i,
                                second: j,
                                distance: dist,
                                gap: *gap,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Distance to the set without the membership slack.
    fn raw_distance(&self, p: &Point) -> f64 {
        match self {
            SetSpec::Ball { center, radius } => (p.dist(center) - radius).max(0.0),
            SetSpec::Box { lo, hi } => p
                .coords()
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    let e = (lo[i] - c).max(c - hi[i]).max(0.0);
                    e * e
                })
                .sum::<f64>()
                .sqrt(),
            SetSpec::Halfspace { normal, offset } => (normal.dot(p) - offset).max(0.0),
            SetSpec::ComplementOfBall { center, radius } => (radius - p.dist(center)).max(0.0),
            SetSpec::Union { members, .. } => members
                .iter()
                .map(|m| m.raw_distance(p))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Membership test for the closed set (boundary points are members).
    ///
    /// Points within [`tol::MEMBERSHIP`] of `Z` count as members, so that
    /// projection outputs are always members despite rounding.
    pub fn contains(&self, p: &Point) -> Result<bool> {
        check_dim(self.dim(), p.dim())?;
        Ok(self.raw_distance(p) <= tol::MEMBERSHIP)
    }

    /// `d_Z(p)`; zero exactly when [`SetSpec::contains`] holds.
    pub fn distance(&self, p: &Point) -> Result<f64> {
        check_dim(self.dim(), p.dim())?;
        let d = self.raw_distance(p);
        Ok(if d <= tol::MEMBERSHIP { 0.0 } else { d })
    }

    /// The unique nearest point of `Z` to `p`.
    pub fn project(&self, p: &Point) -> Result<Point> {
        check_dim(self.dim(), p.dim())?;
        if self.raw_distance(p) <= tol::MEMBERSHIP {
            return Ok(p.clone());
        }
        match self {
            SetSpec::Ball { center, radius } => {
                let dir = (p - center)
                    .normalized()
                    .expect("outside point differs from center");
                Ok(center.axpy(*radius, &dir))
            }
            SetSpec::Box { lo, hi } => Ok(Point::new(
                p.coords()
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| c.clamp(lo[i], hi[i]))
                    .collect(),
            )),
            SetSpec::Halfspace { normal, offset } => {
                let excess = normal.dot(p) - offset;
                Ok(p.axpy(-excess, normal))
            }
            SetSpec::ComplementOfBall { center, radius } => match (p - center).normalized() {
                Some(dir) => Ok(center.axpy(*radius, &dir)),
                None => Err(Error::AmbiguousProjection {
                    point: p.to_string(),
                }),
            },
            SetSpec::Union { members, .. } => {
                let mut dists: Vec<(f64, usize)> = members
                    .iter()
                    .enumerate()
                    .map(|(i, m)| (m.raw_distance(p), i))
                    .collect();
                dists.sort_by(|a, b| a.0.total_cmp(&b.0));
                let (best, idx) = dists[0];
                if let Some(&(second, _)) = dists.get(1) {
                    if second - best <= tol::ALGEBRAIC * best.max(1.0) {
                        return Err(Error::AmbiguousProjection {
                            point: p.to_string(),
                        });
                    }
                }
                let radius = self.prox_radius();
                if best >= radius {
                    return Err(Error::OutsideProxNeighborhood {
                        distance: best,
                        radius,
                    });
                }
                members[idx].project(p)
            }
        }
    }

    /// Unit proximal normals of `Z` at the member `x`.
    ///
    /// Interior points yield an empty list (the normal cone is `{0}`). At a
    /// box corner the extreme rays of the normal cone are returned.
    pub fn proximal_normals(&self, x: &Point, probe: f64) -> Result<Vec<Point>> {
        check_dim(self.dim(), x.dim())?;
        let radius = self.prox_radius();
        if !(probe > 0.0 && probe < radius && probe.is_finite()) {
            return Err(Error::InvalidProbe { probe, radius });
        }
        if !self.contains(x)? {
            return Err(Error::NotMember {
                point: x.to_string(),
            });
        }
        Ok(self.normals_at(x))
    }

    fn normals_at(&self, x: &Point) -> Vec<Point> {
        let eps = tol::GEOMETRIC;
        match self {
            SetSpec::Ball { center, radius } => {
                if x.dist(center) >= radius - eps {
                    (x - center).normalized().into_iter().collect()
                } else {
                    Vec::new()
                }
            }
            SetSpec::ComplementOfBall { center, radius } => {
                if x.dist(center) <= radius + eps {
                    (center - x).normalized().into_iter().collect()
                } else {
                    Vec::new()
                }
            }
            SetSpec::Box { lo, hi } => {
                let d = x.dim();
                let mut out = Vec::new();
                for i in 0..d {
                    if x[i] >= hi[i] - eps {
                        out.push(Point::unit(d, i));
                    }
                    if x[i] <= lo[i] + eps {
                        out.push(-&Point::unit(d, i));
                    }
                }
                out
            }
            SetSpec::Halfspace { normal, offset } => {
                if normal.dot(x) >= offset - eps {
                    vec![normal.clone()]
                } else {
                    Vec::new()
                }
            }
            SetSpec::Union { members, .. } => members
                .iter()
                .find(|m| m.raw_distance(x) <= tol::MEMBERSHIP)
                .map(|m| m.normals_at(x))
                .unwrap_or_default(),
        }
    }

    /// Members of `Z` that are far from `x` in the directions where the
    /// prox-regularity inequality is tightest.
    pub fn extreme_points(&self, x: &Point) -> Vec<Point> {
        let d = x.dim();
        match self {
            SetSpec::Ball { center, radius } | SetSpec::ComplementOfBall { center, radius } => {
                let mut pts: Vec<Point> = (0..d)
                    .flat_map(|i| {
                        let e = Point::unit(d, i);
                        [center.axpy(*radius, &e), center.axpy(-radius, &e)]
                    })
                    .collect();
                if let Some(dir) = (x - center).normalized() {
                    pts.push(center.axpy(-radius, &dir));
                }
                pts
            }
            SetSpec::Box { lo, hi } => {
                if d <= 10 {
                    (0..1usize << d)
                        .map(|mask| {
                            Point::new(
                                (0..d)
                                    .map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] })
                                    .collect(),
                            )
                        })
                        .collect()
                } else {
                    vec![lo.clone(), hi.clone()]
                }
            }
            SetSpec::Halfspace { normal, offset } => {
                let on_plane = x.axpy(offset - normal.dot(x), normal);
                let deep = on_plane.axpy(-self.scale(), normal);
                vec![on_plane, deep]
            }
            SetSpec::Union { members, .. } => members
                .iter()
                .flat_map(|m| {
                    let mut pts = m.extreme_points(x);
                    if let Ok(q) = m.project(x) {
                        pts.push(q);
                    }
                    pts
                })
                .collect(),
        }
    }

    /// Draws a point on the boundary of `Z`.
    pub fn sample_boundary<R: Rng>(&self, rng: &mut R) -> Point {
        let d = self.dim();
        match self {
            SetSpec::Ball { center, radius } | SetSpec::ComplementOfBall { center, radius } => {
                center.axpy(*radius, &random_direction(rng, d))
            }
            SetSpec::Box { lo, hi } => {
                let forced = rng.random_range(0..d);
                Point::new(
                    (0..d)
                        .map(|i| {
                            let snap = i == forced || rng.random_bool(0.3);
                            if snap {
                                if rng.random_bool(0.5) {
                                    hi[i]
                                } else {
                                    lo[i]
                                }
                            } else {
                                lo[i] + rng.random::<f64>() * (hi[i] - lo[i])
                            }
                        })
                        .collect(),
                )
            }
            SetSpec::Halfspace { normal, offset } => {
                let s = self.scale();
                let p = Point::new((0..d).map(|_| rng.random_range(-s..s)).collect());
                p.axpy(offset - normal.dot(&p), normal)
            }
            SetSpec::Union { members, .. } => {
                let i = rng.random_range(0..members.len());
                members[i].sample_boundary(rng)
            }
        }
    }
}

fn random_direction<R: Rng>(rng: &mut R, d: usize) -> Point {
    loop {
        let g = Point::new(
            (0..d)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect(),
        );
        if let Some(u) = g.normalized() {
            return u;
        }
    }
}

/// A point inside a convex member, used to seed alternating projections.
fn anchor(set: &SetSpec) -> Point {
    match set {
        SetSpec::Ball { center, .. } | SetSpec::ComplementOfBall { center, .. } => center.clone(),
        SetSpec::Box { lo, hi } => lo.lerp(hi, 0.5),
        SetSpec::Halfspace { normal, offset } => normal * *offset,
        SetSpec::Union { members, .. } => anchor(&members[0]),
    }
}

/// Distance between two convex sets estimated by alternating projections
/// from several seeds. The estimate never undercuts the true distance.
fn member_distance(a: &SetSpec, b: &SetSpec) -> f64 {
    let (pa, pb) = (anchor(a), anchor(b));
    let seeds = [pa.clone(), pb.clone(), pa.lerp(&pb, 0.5)];
    let mut best = f64::INFINITY;
    for seed in seeds {
        let mut q = seed;
        for _ in 0..2000 {
            let Ok(on_a) = a.project(&q) else { break };
            let Ok(on_b) = b.project(&on_a) else { break };
            let gap = on_a.dist(&on_b);
            let moved = q.dist(&on_b);
            best = best.min(gap);
            q = on_b;
            if moved <= tol::ALGEBRAIC * (1.0 + gap) {
                break;
            }
        }
    }
    best
}

/// Samples the prox-regularity inequality `<n, z - x> <= |z - x|^2 / (2r)`
/// over boundary points `x`, unit proximal normals `n` and members `z`.
///
/// The report's `summary` row holds `max_violation` and the number of
/// `pairs`; the `witness` row holds the maximising triple.
pub fn verify_prox_regularity(
    set: &SetSpec,
    r: f64,
    n_boundary: usize,
    n_targets: usize,
    seed: u64,
) -> Result<Report> {
    if n_boundary == 0 || n_targets == 0 {
        return Err(Error::InvalidArgument(
            "verify_prox_regularity needs at least one boundary point and one target".into(),
        ));
    }
    if r.is_nan() || r <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {r}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = set.dim();
    let half_width = 2.5 * set.scale();
    let max_attempts = 1000 * n_targets;

    let mut best: Option<(f64, Point, Point, Point, f64, f64)> = None;
    let mut pairs = 0usize;
    for _ in 0..n_boundary {
        let x = set.sample_boundary(&mut rng);
        let normals = set.normals_at(&x);
        if normals.is_empty() {
            continue;
        }
        let mut targets = Vec::with_capacity(n_targets);
        let mut attempts = 0;
        while targets.len() < n_targets && attempts < max_attempts {
            attempts += 1;
            let z = Point::new(
                (0..d)
                    .map(|i| x[i] + rng.random_range(-half_width..half_width))
                    .collect(),
            );
            if set.raw_distance(&z) <= tol::MEMBERSHIP {
                targets.push(z);
            }
        }
        if targets.len() < n_targets {
            return Err(Error::SamplerExhausted {
                accepted: targets.len(),
                requested: n_targets,
                attempts,
            });
        }
        targets.extend(set.extreme_points(&x));
        for n in &normals {
            for z in &targets {
                let diff = z - &x;
                let lhs = n.dot(&diff);
                let rhs = if r.is_infinite() {
                    0.0
                } else {
                    diff.norm_sq() / (2.0 * r)
                };
                pairs += 1;
                let excess = lhs - rhs;
                if best.as_ref().is_none_or(|b| excess > b.0) {
                    best = Some((excess, x.clone(), n.clone(), z.clone(), lhs, rhs));
                }
            }
        }
    }

    let mut summary = Row::new("summary").with("r", r).with("pairs", pairs as f64);
    let mut rows = Vec::new();
    match best {
        Some((excess, x, n, z, lhs, rhs)) => {
            summary = summary.with("max_violation", excess.max(0.0));
            rows.push(summary);
            let mut witness = Row::new("witness");
            for (prefix, p) in [("x", &x), ("n", &n), ("z", &z)] {
                for (i, c) in p.coords().iter().enumerate() {
                    witness = witness.with(format!("{prefix}{}", i + 1), *c);
                }
            }
            rows.push(witness.with("lhs", lhs).with("rhs", rhs));
        }
        None => rows.push(summary.with("max_violation", 0.0)),
    }
    Ok(Report::new(
        format!("prox_regularity[{}]", set.variant_name()),
        rows,
        tol::GEOMETRIC,
        PassRule::MaxAtMost {
            metric: "max_violation".into(),
        },
    ))
}
