use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::GaussRule;
use crate::process::{integrate_over, Density, Region};

/// Shape description as accepted from configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// A ball in ℝⁿ, `n ≤ 3`.
    Disk { center: Vec<f64>, radius: f64 },
    /// An axis-parallel box in ℝⁿ, `n ≤ 3`.
    Box { min: Vec<f64>, max: Vec<f64> },
    /// A strictly convex planar polygon, vertices counter-clockwise.
    Polygon { vertices: Vec<[f64; 2]> },
    /// A planar segment (lower-dimensional: its relative interior is ∂²K).
    Segment { a: [f64; 2], b: [f64; 2] },
}

/// A validated compact convex body.
///
/// Planar bodies other than disks are stored through their outline: the
/// counter-clockwise vertex list of a polygon (a box becomes four vertices,
/// a segment two). Every offset-boundary and section computation in the
/// plane works on that outline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Shape", into = "Shape")]
pub struct ConvexBody {
    shape: Shape,
    outline: Option<Vec<[f64; 2]>>,
}

impl TryFrom<Shape> for ConvexBody {
    type Error = Error;

    fn try_from(shape: Shape) -> Result<Self> {
        let outline = match &shape {
            Shape::Disk { center, radius } => {
                check_dim(center.len())?;
                if !(*radius > 0.0 && radius.is_finite()) || center.iter().any(|c| !c.is_finite()) {
                    return Err(invalid("radius", format!("{radius} must be positive and finite")));
                }
                None
            }
            Shape::Box { min, max } => {
                check_dim(min.len())?;
                if min.len() != max.len() {
                    return Err(invalid("box", "corner dimensions differ"));
                }
                if min.iter().zip(max).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
                    return Err(invalid("box", "need finite min < max in every coordinate"));
                }
                (min.len() == 2).then(|| {
                    vec![[min[0], min[1]], [max[0], min[1]], [max[0], max[1]], [min[0], max[1]]]
                })
            }
            Shape::Polygon { vertices } => {
                validate_polygon(vertices)?;
                Some(vertices.clone())
            }
            Shape::Segment { a, b } => {
                if a == b || a.iter().chain(b).any(|c| !c.is_finite()) {
                    return Err(invalid("segment", "endpoints must be finite and distinct"));
                }
                Some(vec![*a, *b])
            }
        };
        Ok(Self { shape, outline })
    }
}

impl From<ConvexBody> for Shape {
    fn from(body: ConvexBody) -> Shape {
        body.shape
    }
}

fn check_dim(n: usize) -> Result<()> {
    if !(1..=3).contains(&n) {
        return Err(invalid("dimension", format!("{n} is outside 1..=3")));
    }
    Ok(())
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn validate_polygon(v: &[[f64; 2]]) -> Result<()> {
    let k = v.len();
    if k < 3 {
        return Err(invalid("polygon", "needs at least three vertices"));
    }
    if v.iter().flatten().any(|c| !c.is_finite()) {
        return Err(invalid("polygon", "non-finite vertex"));
    }
    let mut turning = 0.0;
    for i in 0..k {
        let (p, q, r) = (v[i], v[(i + 1) % k], v[(i + 2) % k]);
        if p == q {
            return Err(invalid("polygon", format!("vertex {i} is repeated")));
        }
        if !(cross(p, q, r) > 0.0) {
            return Err(invalid("polygon", "vertices must be strictly convex and counter-clockwise"));
        }
        let (a, b) = ([q[0] - p[0], q[1] - p[1]], [r[0] - q[0], r[1] - q[1]]);
        turning += (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]);
    }
    // Left turns everywhere but winding twice would still pass the local test.
    if (turning - 2.0 * PI).abs() > 1e-9 {
        return Err(invalid("polygon", "boundary winds more than once"));
    }
    Ok(())
}

fn point_segment_distance(x: [f64; 2], p: [f64; 2], q: [f64; 2]) -> f64 {
    let d = [q[0] - p[0], q[1] - p[1]];
    let s = (((x[0] - p[0]) * d[0] + (x[1] - p[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1])).clamp(0.0, 1.0);
    (x[0] - p[0] - s * d[0]).hypot(x[1] - p[1] - s * d[1])
}

/// Vertical section of a convex polygon (possibly degenerate) at abscissa `x`.
fn polygon_section(v: &[[f64; 2]], x: f64) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let k = v.len();
    for i in 0..k {
        let (p, q) = (v[i], v[(i + 1) % k]);
        if x < p[0].min(q[0]) || x > p[0].max(q[0]) {
            continue;
        }
        if p[0] == q[0] {
            lo = lo.min(p[1].min(q[1]));
            hi = hi.max(p[1].max(q[1]));
        } else {
            let y = p[1] + (x - p[0]) / (q[0] - p[0]) * (q[1] - p[1]);
            lo = lo.min(y);
            hi = hi.max(y);
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// One quadrature node on a boundary: position and weight `w · dH^{n−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryNode {
    pub point: Vec<f64>,
    pub weight: f64,
}

impl ConvexBody {
    pub fn new(shape: Shape) -> Result<Self> {
        Self::try_from(shape)
    }

    pub fn disk(center: Vec<f64>, radius: f64) -> Result<Self> {
        Self::new(Shape::Disk { center, radius })
    }

    pub fn cuboid(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        Self::new(Shape::Box { min, max })
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(Shape::Polygon { vertices })
    }

    pub fn segment(a: [f64; 2], b: [f64; 2]) -> Result<Self> {
        Self::new(Shape::Segment { a, b })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Disk { center, .. } => center.len(),
            Shape::Box { min, .. } => min.len(),
            Shape::Polygon { .. } | Shape::Segment { .. } => 2,
        }
    }

    /// Whether `K` has interior points (false only for segments).
    pub fn is_full_dimensional(&self) -> bool {
        !matches!(self.shape, Shape::Segment { .. })
    }

    /// `dist(K, x)`
    pub fn distance(&self, x: &[f64]) -> f64 {
        match (&self.shape, &self.outline) {
            (Shape::Disk { center, radius }, _) => {
                let r = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt();
                (r - radius).max(0.0)
            }
            (Shape::Box { min, max }, _) => x
                .iter()
                .zip(min.iter().zip(max))
                .map(|(v, (a, b))| {
                    let e = (a - v).max(v - b).max(0.0);
                    e * e
                })
                .sum::<f64>()
                .sqrt(),
            (_, Some(v)) => {
                let p = [x[0], x[1]];
                let k = v.len();
                if k >= 3 && (0..k).all(|i| cross(v[i], v[(i + 1) % k], p) >= 0.0) {
                    return 0.0;
                }
                (0..k).map(|i| point_segment_distance(p, v[i], v[(i + 1) % k])).fold(f64::INFINITY, f64::min)
            }
            _ => unreachable!("planar shapes carry an outline"),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.distance(x) == 0.0
    }

    /// Membership in the parallel set `K_t = {x : dist(K, x) ≤ t}`.
    pub fn parallel_contains(&self, t: f64, x: &[f64]) -> bool {
        self.distance(x) <= t
    }

    /// `λ(K)`: length, area or volume.
    pub fn volume(&self) -> f64 {
        self.steiner_volume(0.0)
    }

    /// Boundary length of a planar body; for a segment of length `L`, `2L`.
    pub fn perimeter(&self) -> Option<f64> {
        match (&self.shape, &self.outline) {
            (Shape::Disk { radius, center }, _) if center.len() == 2 => Some(2.0 * PI * radius),
            (_, Some(v)) => {
                let k = v.len();
                Some((0..k).map(|i| (v[(i + 1) % k][0] - v[i][0]).hypot(v[(i + 1) % k][1] - v[i][1])).sum())
            }
            _ => None,
        }
    }

    fn planar_area(&self) -> f64 {
        match (&self.shape, &self.outline) {
            (Shape::Disk { radius, .. }, _) => PI * radius * radius,
            (_, Some(v)) if v.len() >= 3 => {
                let k = v.len();
                0.5 * (0..k).map(|i| v[i][0] * v[(i + 1) % k][1] - v[(i + 1) % k][0] * v[i][1]).sum::<f64>()
            }
            _ => 0.0,
        }
    }

    /// `λ(K_t)` by the Steiner formula.
    pub fn steiner_volume(&self, t: f64) -> f64 {
        match (self.dim(), &self.shape) {
            (1, Shape::Disk { radius, .. }) => 2.0 * (radius + t),
            (1, Shape::Box { min, max }) => max[0] - min[0] + 2.0 * t,
            (2, _) => self.planar_area() + self.perimeter().unwrap_or(0.0) * t + PI * t * t,
            (3, Shape::Disk { radius, .. }) => 4.0 / 3.0 * PI * (radius + t).powi(3),
            (3, Shape::Box { min, max }) => {
                let (a, b, c) = (max[0] - min[0], max[1] - min[1], max[2] - min[2]);
                a * b * c + 2.0 * (a * b + b * c + c * a) * t + PI * (a + b + c) * t * t + 4.0 / 3.0 * PI * t.powi(3)
            }
            _ => unreachable!("validated dimension"),
        }
    }

    /// `(lower, upper)` corners of a box containing `K_t`.
    pub fn bounding_box(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let (lo, hi) = match (&self.shape, &self.outline) {
            (Shape::Disk { center, radius }, _) => {
                (center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect())
            }
            (Shape::Box { min, max }, _) => (min.clone(), max.clone()),
            (_, Some(v)) => {
                let mut lo = vec![f64::INFINITY; 2];
                let mut hi = vec![f64::NEG_INFINITY; 2];
                for p in v {
                    for j in 0..2 {
                        lo[j] = lo[j].min(p[j]);
                        hi[j] = hi[j].max(p[j]);
                    }
                }
                (lo, hi)
            }
            _ => unreachable!("planar shapes carry an outline"),
        };
        (lo.into_iter().map(|a| a - t).collect(), hi.into_iter().map(|b| b + t).collect())
    }

    /// The parallel set `K_t` as an integration and sampling region.
    pub fn parallel_set(&self, t: f64) -> Result<ParallelSet> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(invalid("t", format!("{t} must be finite and non-negative")));
        }
        Ok(ParallelSet { body: self.clone(), t })
    }

    /// Quadrature nodes for `∫_{∂K_t} f dH^{n−1}`.
    ///
    /// Planar bodies use 32-point Gauss–Legendre on every offset edge and on
    /// every vertex arc (four quarter arcs for a disk). Three-dimensional
    /// bodies use 16×16 product rules on faces, quarter cylinders and sphere
    /// octants. At `t = 0` a segment is rejected: its relative boundary has
    /// zero length and the relevant measure lives on its interior instead.
    pub fn boundary_nodes(&self, t: f64) -> Result<Vec<BoundaryNode>> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(invalid("t", format!("{t} must be finite and non-negative")));
        }
        if t == 0.0 && !self.is_full_dimensional() {
            return Err(invalid("t", "a segment has no (n−1)-dimensional boundary at t = 0"));
        }
        let mut nodes = Vec::new();
        match (self.dim(), &self.shape, &self.outline) {
            (1, Shape::Disk { center, radius }, _) => {
                nodes.push(BoundaryNode { point: vec![center[0] - radius - t], weight: 1.0 });
                nodes.push(BoundaryNode { point: vec![center[0] + radius + t], weight: 1.0 });
            }
            (1, Shape::Box { min, max }, _) => {
                nodes.push(BoundaryNode { point: vec![min[0] - t], weight: 1.0 });
                nodes.push(BoundaryNode { point: vec![max[0] + t], weight: 1.0 });
            }
            (2, Shape::Disk { center, radius }, _) => {
                push_arc(&mut nodes, [center[0], center[1]], radius + t, 0.0, 2.0 * PI, 4);
            }
            (2, _, Some(v)) => {
                let k = v.len();
                let normals: Vec<[f64; 2]> = (0..k)
                    .map(|i| {
                        let (p, q) = (v[i], v[(i + 1) % k]);
                        let l = (q[0] - p[0]).hypot(q[1] - p[1]);
                        [(q[1] - p[1]) / l, -(q[0] - p[0]) / l]
                    })
                    .collect();
                for i in 0..k {
                    let (p, q, n) = (v[i], v[(i + 1) % k], normals[i]);
                    for (s, w) in GaussRule::Gl32.mapped(0.0, 1.0) {
                        let l = (q[0] - p[0]).hypot(q[1] - p[1]);
                        nodes.push(BoundaryNode {
                            point: vec![p[0] + s * (q[0] - p[0]) + t * n[0], p[1] + s * (q[1] - p[1]) + t * n[1]],
                            weight: w * l,
                        });
                    }
                    if t > 0.0 {
                        let prev = normals[(i + k - 1) % k];
                        let start = prev[1].atan2(prev[0]);
                        let mut sweep = n[1].atan2(n[0]) - start;
                        if sweep <= 0.0 {
                            sweep += 2.0 * PI;
                        }
                        push_arc(&mut nodes, p, t, start, sweep, 1);
                    }
                }
            }
            (3, Shape::Disk { center, radius }, _) => {
                let r = radius + t;
                let rule = GaussRule::Gl16;
                for q in 0..4 {
                    let a = q as f64 * PI / 2.0;
                    for (phi, wp) in rule.mapped(a, a + PI / 2.0) {
                        for (u, wu) in rule.mapped(-1.0, 1.0) {
                            let s = (1.0 - u * u).sqrt();
                            nodes.push(BoundaryNode {
                                point: vec![
                                    center[0] + r * s * phi.cos(),
                                    center[1] + r * s * phi.sin(),
                                    center[2] + r * u,
                                ],
                                weight: r * r * wp * wu,
                            });
                        }
                    }
                }
            }
            (3, Shape::Box { min, max }, _) => push_box3(&mut nodes, min, max, t),
            _ => unreachable!("validated shape"),
        }
        Ok(nodes)
    }

    /// `∫_{∂K_t} f dH^{n−1}` (see [`ConvexBody::boundary_nodes`]).
    pub fn boundary_integral<F: Fn(&[f64]) -> f64>(&self, t: f64, f: F) -> Result<f64> {
        Ok(self.boundary_nodes(t)?.iter().map(|n| n.weight * f(&n.point)).sum())
    }

    /// `∫_{K_t} h dx`: the Steiner formula for constant `h`, nested
    /// quadrature over the sections of `K_t` otherwise.
    pub fn parallel_mass(&self, t: f64, h: &Density, tol: f64) -> Result<f64> {
        let set = self.parallel_set(t)?;
        if let Some(c) = h.as_constant() {
            return Ok(c * self.steiner_volume(t));
        }
        if set.volume() == Some(0.0) {
            return Ok(0.0);
        }
        integrate_over(&set, &|x| h.eval(x), tol)
    }
}

/// Nodes on the arc of radius `r` about `c` from angle `start` over `sweep`,
/// split into `pieces` equal parts.
fn push_arc(nodes: &mut Vec<BoundaryNode>, c: [f64; 2], r: f64, start: f64, sweep: f64, pieces: usize) {
    let step = sweep / pieces as f64;
    for j in 0..pieces {
        let a = start + j as f64 * step;
        for (phi, w) in GaussRule::Gl32.mapped(a, a + step) {
            nodes.push(BoundaryNode { point: vec![c[0] + r * phi.cos(), c[1] + r * phi.sin()], weight: r * w });
        }
    }
}

fn push_box3(nodes: &mut Vec<BoundaryNode>, min: &[f64], max: &[f64], t: f64) {
    let rule = GaussRule::Gl16;
    let corner = |axis: usize, side: usize| if side == 0 { min[axis] } else { max[axis] };
    let sign = |side: usize| if side == 0 { -1.0 } else { 1.0 };
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        // Faces orthogonal to axis k.
        for side in 0..2 {
            for (a, wa) in rule.mapped(min[i], max[i]) {
                for (b, wb) in rule.mapped(min[j], max[j]) {
                    let mut p = vec![0.0; 3];
                    p[k] = corner(k, side) + sign(side) * t;
                    p[i] = a;
                    p[j] = b;
                    nodes.push(BoundaryNode { point: p, weight: wa * wb });
                }
            }
        }
        if t == 0.0 {
            continue;
        }
        // Quarter cylinders around the edges parallel to axis k.
        for (si, sj) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            for (s, ws) in rule.mapped(min[k], max[k]) {
                for (psi, wpsi) in rule.mapped(0.0, PI / 2.0) {
                    let mut p = vec![0.0; 3];
                    p[k] = s;
                    p[i] = corner(i, si) + sign(si) * t * psi.cos();
                    p[j] = corner(j, sj) + sign(sj) * t * psi.sin();
                    nodes.push(BoundaryNode { point: p, weight: t * ws * wpsi });
                }
            }
        }
    }
    if t == 0.0 {
        return;
    }
    // Sphere octants at the corners.
    for mask in 0..8usize {
        let s = [mask & 1, (mask >> 1) & 1, (mask >> 2) & 1];
        for (u, wu) in rule.mapped(0.0, 1.0) {
            let r = (1.0 - u * u).sqrt();
            for (phi, wp) in rule.mapped(0.0, PI / 2.0) {
                let dir = [r * phi.cos(), r * phi.sin(), u];
                let p = (0..3).map(|a| corner(a, s[a]) + sign(s[a]) * t * dir[a]).collect();
                nodes.push(BoundaryNode { point: p, weight: t * t * wu * wp });
            }
        }
    }
}

/// `K_t` viewed as a [`Region`]; sections are exact (closed form for disks
/// and boxes, union of the polygon, edge strips and vertex disks otherwise).
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelSet {
    body: ConvexBody,
    t: f64,
}

impl ParallelSet {
    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn radius(&self) -> f64 {
        self.t
    }

    fn outline_pieces(&self, v: &[[f64; 2]], x: f64) -> Option<(f64, f64)> {
        let t = self.t;
        let k = v.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut add = |s: Option<(f64, f64)>| {
            if let Some((a, b)) = s {
                lo = lo.min(a);
                hi = hi.max(b);
            }
        };
        if k >= 3 {
            add(polygon_section(v, x));
        }
        for i in 0..k {
            let (p, q) = (v[i], v[(i + 1) % k]);
            if t > 0.0 {
                let l = (q[0] - p[0]).hypot(q[1] - p[1]);
                let n = [t * (q[1] - p[1]) / l, -t * (q[0] - p[0]) / l];
                add(polygon_section(&[p, q, [q[0] + n[0], q[1] + n[1]], [p[0] + n[0], p[1] + n[1]]], x));
                let dx = x - p[0];
                if dx.abs() <= t {
                    let s = (t * t - dx * dx).sqrt();
                    add(Some((p[1] - s, p[1] + s)));
                }
            } else {
                add(polygon_section(&[p, q], x));
            }
        }
        (lo <= hi).then_some((lo, hi))
    }
}

impl Region for ParallelSet {
    fn dim(&self) -> usize {
        self.body.dim()
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.body.parallel_contains(self.t, x)
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        self.body.bounding_box(self.t)
    }

    fn section(&self, prefix: &[f64]) -> Option<(f64, f64)> {
        let j = prefix.len();
        if j >= self.dim() {
            return None;
        }
        let t = self.t;
        match (&self.body.shape, &self.body.outline) {
            (Shape::Disk { center, radius }, _) => {
                let r = radius + t;
                let used: f64 = prefix.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                let rem = r * r - used;
                (rem >= 0.0).then(|| (center[j] - rem.sqrt(), center[j] + rem.sqrt()))
            }
            (Shape::Box { min, max }, _) => {
                let used: f64 = prefix
                    .iter()
                    .zip(min.iter().zip(max))
                    .map(|(v, (a, b))| {
                        let e = (a - v).max(v - b).max(0.0);
                        e * e
                    })
                    .sum();
                let rem = t * t - used;
                (rem >= 0.0).then(|| (min[j] - rem.sqrt(), max[j] + rem.sqrt()))
            }
            (_, Some(v)) => {
                if j == 0 {
                    let (lo, hi) = self.bounding_box();
                    Some((lo[0], hi[0]))
                } else {
                    self.outline_pieces(v, prefix[0])
                }
            }
            _ => unreachable!("planar shapes carry an outline"),
        }
    }

    fn section_breaks(&self, prefix: &[f64]) -> Vec<f64> {
        let j = prefix.len();
        if j + 1 >= self.dim() {
            return Vec::new();
        }
        let t = self.t;
        match (&self.body.shape, &self.body.outline) {
            (Shape::Box { min, max }, _) => vec![min[j], max[j]],
            (_, Some(v)) => {
                let k = v.len();
                let mut out = Vec::with_capacity(5 * k);
                for i in 0..k {
                    let (p, q) = (v[i], v[(i + 1) % k]);
                    let l = (q[0] - p[0]).hypot(q[1] - p[1]);
                    let nx = t * (q[1] - p[1]) / l;
                    out.extend([p[0], p[0] - t, p[0] + t, p[0] + nx, q[0] + nx]);
                }
                out
            }
            _ => Vec::new(),
        }
    }

    fn volume(&self) -> Option<f64> {
        Some(self.body.steiner_volume(self.t))
    }
}
