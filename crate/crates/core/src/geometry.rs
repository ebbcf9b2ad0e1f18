//! Boundary geometry: parametric smooth curves, polygons, and the node/
//! weight/normal grids the quadrature layer consumes.
//!
//! All curves are closed and positively (counterclockwise) oriented; outward
//! unit normals are `(y2', -y1')/|y'|`. Smooth curves discretize with the
//! periodic trapezoid rule (equispaced parameter), polygons with per-edge
//! midpoint panels whose endpoints are kept so singular entries can be
//! integrated exactly. Polygon corners are never quadrature nodes.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

pub type Point2 = Vector2<f64>;

/// Curve constructors accepted by [`make_curve`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum CurveSpec {
    /// Circle of the given radius centered at the origin.
    Circle { radius: f64 },
    /// Five-petal star `r(t) = 9/20 - cos(5t)/9` around the origin.
    Star,
    /// Axis-aligned square of the given side centered at the origin.
    Square { side: f64 },
    /// Triangle with vertices (0,0), (a,0), (b,c); a, b, c in (0, 1].
    Triangle { a: f64, b: f64, c: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeometryError {
    NonPositiveParameter { what: &'static str, value: f64 },
    TriangleParamOutOfRange { a: f64, b: f64, c: f64 },
    TooFewNodes { minimum: usize, got: usize },
    NodeCountNotDivisible { edges: usize, got: usize },
    BarycenterUndefined,
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::NonPositiveParameter { what, value } => {
                write!(f, "{what} must be positive, got {value}")
            }
            GeometryError::TriangleParamOutOfRange { a, b, c } => {
                write!(f, "triangle parameters must lie in (0, 1], got ({a}, {b}, {c})")
            }
            GeometryError::TooFewNodes { minimum, got } => {
                write!(f, "smooth curves need at least {minimum} nodes, got {got}")
            }
            GeometryError::NodeCountNotDivisible { edges, got } => {
                write!(f, "node count {got} is not divisible by the {edges} polygon edges")
            }
            GeometryError::BarycenterUndefined => {
                write!(f, "barycenter is defined as the vertex mean of a polygon; smooth curves have no vertices")
            }
        }
    }
}

impl std::error::Error for GeometryError {}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SmoothCurve {
    Circle { radius: f64 },
    Star,
}

impl SmoothCurve {
    pub fn position(&self, t: f64) -> Point2 {
        match *self {
            SmoothCurve::Circle { radius } => Point2::new(radius * t.cos(), radius * t.sin()),
            SmoothCurve::Star => {
                let r = star_radius(t);
                Point2::new(r * t.cos(), r * t.sin())
            }
        }
    }

    pub fn derivative(&self, t: f64) -> Point2 {
        match *self {
            SmoothCurve::Circle { radius } => Point2::new(-radius * t.sin(), radius * t.cos()),
            SmoothCurve::Star => {
                let (s, c) = t.sin_cos();
                let r = star_radius(t);
                let dr = 5.0 * (5.0 * t).sin() / 9.0;
                Point2::new(dr * c - r * s, dr * s + r * c)
            }
        }
    }

    pub fn second_derivative(&self, t: f64) -> Point2 {
        match *self {
            SmoothCurve::Circle { radius } => Point2::new(-radius * t.cos(), -radius * t.sin()),
            SmoothCurve::Star => {
                let (s, c) = t.sin_cos();
                let r = star_radius(t);
                let dr = 5.0 * (5.0 * t).sin() / 9.0;
                let ddr = 25.0 * (5.0 * t).cos() / 9.0;
                Point2::new(ddr * c - 2.0 * dr * s - r * c, ddr * s + 2.0 * dr * c - r * s)
            }
        }
    }

    /// Signed curvature `(y1' y2'' - y2' y1'') / |y'|^3`; positive for
    /// counterclockwise convex arcs.
    pub fn curvature(&self, t: f64) -> f64 {
        let d = self.derivative(t);
        let dd = self.second_derivative(t);
        (d.x * dd.y - d.y * dd.x) / d.norm().powi(3)
    }

    /// Outward unit normal `(y2', -y1')/|y'|`.
    pub fn normal(&self, t: f64) -> Point2 {
        let d = self.derivative(t);
        Point2::new(d.y, -d.x) / d.norm()
    }
}

fn star_radius(t: f64) -> f64 {
    0.45 - (5.0 * t).cos() / 9.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolygonGeometry {
    /// Counterclockwise vertex loop.
    pub vertices: Vec<Point2>,
}

impl PolygonGeometry {
    pub fn edge_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge(&self, i: usize) -> (Point2, Point2) {
        let a = self.vertices[i];
        let b = self.vertices[(i + 1) % self.vertices.len()];
        (a, b)
    }

    /// Shoelace area; positive for counterclockwise orientation.
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut acc = 0.0;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            acc += a.x * b.y - b.x * a.y;
        }
        0.5 * acc
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.edge_count())
            .map(|i| {
                let (a, b) = self.edge(i);
                (b - a).norm()
            })
            .sum()
    }
}

/// A closed boundary curve: either smooth (with working derivative maps) or a
/// polygon.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryGeometry {
    Smooth(SmoothCurve),
    Polygon(PolygonGeometry),
}

/// Quadrature grid over a boundary.
///
/// For smooth curves the nodes are equispaced in parameter and the weights
/// are `|y'(t_i)| * 2pi/n` (periodic trapezoid); `params`, `speeds`, and
/// `curvatures` are populated. For polygons the nodes are panel midpoints
/// with weight = panel length; `panels` holds each node's panel endpoints and
/// `edge_of_node` its parent edge.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    pub points: Vec<Point2>,
    pub normals: Vec<Point2>,
    pub weights: Vec<f64>,
    pub params: Option<Vec<f64>>,
    pub speeds: Option<Vec<f64>>,
    pub curvatures: Option<Vec<f64>>,
    pub panels: Option<Vec<(Point2, Point2)>>,
    pub edge_of_node: Option<Vec<usize>>,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_smooth(&self) -> bool {
        self.params.is_some()
    }

    /// Largest node spacing (arc-length weight), used for near-boundary bands.
    pub fn max_spacing(&self) -> f64 {
        self.weights.iter().cloned().fold(0.0, f64::max)
    }

    /// Content fingerprint for caching assembled operators against a grid.
    pub fn fingerprint(&self) -> u64 {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        let mut mix = |v: f64| {
            h ^= v.to_bits();
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        };
        for p in &self.points {
            mix(p.x);
            mix(p.y);
        }
        for w in &self.weights {
            mix(*w);
        }
        h
    }
}

/// Build a boundary geometry from a spec, validating parameters.
pub fn make_curve(spec: &CurveSpec) -> Result<BoundaryGeometry, GeometryError> {
    match *spec {
        CurveSpec::Circle { radius } => {
            if radius <= 0.0 {
                return Err(GeometryError::NonPositiveParameter {
                    what: "circle radius",
                    value: radius,
                });
            }
            Ok(BoundaryGeometry::Smooth(SmoothCurve::Circle { radius }))
        }
        CurveSpec::Star => Ok(BoundaryGeometry::Smooth(SmoothCurve::Star)),
        CurveSpec::Square { side } => {
            if side <= 0.0 {
                return Err(GeometryError::NonPositiveParameter {
                    what: "square side",
                    value: side,
                });
            }
            let s = side / 2.0;
            Ok(BoundaryGeometry::Polygon(PolygonGeometry {
                vertices: vec![
                    Point2::new(-s, -s),
                    Point2::new(s, -s),
                    Point2::new(s, s),
                    Point2::new(-s, s),
                ],
            }))
        }
        CurveSpec::Triangle { a, b, c } => {
            let in_range = |v: f64| v > 0.0 && v <= 1.0;
            if !(in_range(a) && in_range(b) && in_range(c)) {
                return Err(GeometryError::TriangleParamOutOfRange { a, b, c });
            }
            Ok(BoundaryGeometry::Polygon(PolygonGeometry {
                vertices: vec![Point2::new(0.0, 0.0), Point2::new(a, 0.0), Point2::new(b, c)],
            }))
        }
    }
}

/// Discretize a boundary into an n-node quadrature grid.
///
/// Smooth curves require `n >= 16`; polygons require `n` divisible by the
/// edge count (equal node counts per edge, midpoint rule).
pub fn discretize(geom: &BoundaryGeometry, n: usize) -> Result<QuadratureGrid, GeometryError> {
    match geom {
        BoundaryGeometry::Smooth(curve) => {
            if n < 16 {
                return Err(GeometryError::TooFewNodes { minimum: 16, got: n });
            }
            let h = 2.0 * PI / n as f64;
            let mut points = Vec::with_capacity(n);
            let mut normals = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            let mut params = Vec::with_capacity(n);
            let mut speeds = Vec::with_capacity(n);
            let mut curvatures = Vec::with_capacity(n);
            for i in 0..n {
                let t = i as f64 * h;
                let speed = curve.derivative(t).norm();
                points.push(curve.position(t));
                normals.push(curve.normal(t));
                weights.push(speed * h);
                params.push(t);
                speeds.push(speed);
                curvatures.push(curve.curvature(t));
            }
            Ok(QuadratureGrid {
                points,
                normals,
                weights,
                params: Some(params),
                speeds: Some(speeds),
                curvatures: Some(curvatures),
                panels: None,
                edge_of_node: None,
            })
        }
        BoundaryGeometry::Polygon(poly) => {
            let edges = poly.edge_count();
            if n == 0 || n % edges != 0 {
                return Err(GeometryError::NodeCountNotDivisible { edges, got: n });
            }
            let per_edge = n / edges;
            let mut points = Vec::with_capacity(n);
            let mut normals = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            let mut panels = Vec::with_capacity(n);
            let mut edge_of_node = Vec::with_capacity(n);
            for e in 0..edges {
                let (a, b) = poly.edge(e);
                let dir = b - a;
                let len = dir.norm();
                let normal = Point2::new(dir.y, -dir.x) / len;
                for j in 0..per_edge {
                    let t0 = j as f64 / per_edge as f64;
                    let t1 = (j + 1) as f64 / per_edge as f64;
                    points.push(a + dir * (0.5 * (t0 + t1)));
                    normals.push(normal);
                    weights.push(len / per_edge as f64);
                    panels.push((a + dir * t0, a + dir * t1));
                    edge_of_node.push(e);
                }
            }
            Ok(QuadratureGrid {
                points,
                normals,
                weights,
                params: None,
                speeds: None,
                curvatures: None,
                panels: Some(panels),
                edge_of_node: Some(edge_of_node),
            })
        }
    }
}

/// Signed curvature of a smooth boundary at parameter t. Zero for polygons
/// (flat edges; corners are never sampled).
pub fn curvature(geom: &BoundaryGeometry, t: f64) -> f64 {
    match geom {
        BoundaryGeometry::Smooth(c) => c.curvature(t),
        BoundaryGeometry::Polygon(_) => 0.0,
    }
}

/// Vertex mean of a polygon. Smooth curves error.
pub fn barycenter(geom: &BoundaryGeometry) -> Result<Point2, GeometryError> {
    match geom {
        BoundaryGeometry::Polygon(p) => {
            let n = p.vertices.len() as f64;
            Ok(p.vertices.iter().sum::<Point2>() / n)
        }
        BoundaryGeometry::Smooth(_) => Err(GeometryError::BarycenterUndefined),
    }
}

impl BoundaryGeometry {
    /// True if the point lies strictly inside the enclosed domain.
    pub fn contains(&self, p: Point2) -> bool {
        match self {
            BoundaryGeometry::Smooth(SmoothCurve::Circle { radius }) => p.norm() < *radius,
            BoundaryGeometry::Smooth(SmoothCurve::Star) => {
                // Polar graph curve: inside iff |p| < r(angle).
                p.norm() < star_radius(p.y.atan2(p.x))
            }
            BoundaryGeometry::Polygon(poly) => {
                // Even-odd ray cast along +x.
                let n = poly.vertices.len();
                let mut inside = false;
                for i in 0..n {
                    let a = poly.vertices[i];
                    let b = poly.vertices[(i + 1) % n];
                    if (a.y > p.y) != (b.y > p.y) {
                        let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                        if p.x < x_cross {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }

    /// Distance from a point to the boundary curve.
    pub fn distance_to_boundary(&self, p: Point2) -> f64 {
        match self {
            BoundaryGeometry::Smooth(SmoothCurve::Circle { radius }) => (p.norm() - radius).abs(),
            BoundaryGeometry::Smooth(curve @ SmoothCurve::Star) => {
                // Coarse scan then ternary refinement of the squared distance.
                let coarse = 1024;
                let mut best_t = 0.0;
                let mut best = f64::INFINITY;
                for i in 0..coarse {
                    let t = 2.0 * PI * i as f64 / coarse as f64;
                    let d = (curve.position(t) - p).norm_squared();
                    if d < best {
                        best = d;
                        best_t = t;
                    }
                }
                let mut lo = best_t - 2.0 * PI / coarse as f64;
                let mut hi = best_t + 2.0 * PI / coarse as f64;
                for _ in 0..60 {
                    let m1 = lo + (hi - lo) / 3.0;
                    let m2 = hi - (hi - lo) / 3.0;
                    let d1 = (curve.position(m1) - p).norm_squared();
                    let d2 = (curve.position(m2) - p).norm_squared();
                    if d1 < d2 {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                }
                (curve.position(0.5 * (lo + hi)) - p).norm()
            }
            BoundaryGeometry::Polygon(poly) => {
                let mut best = f64::INFINITY;
                for i in 0..poly.edge_count() {
                    let (a, b) = poly.edge(i);
                    best = best.min(point_segment_distance(p, a, b));
                }
                best
            }
        }
    }

    /// Axis-aligned bounding box of the boundary, `(min, max)`.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        match self {
            BoundaryGeometry::Smooth(SmoothCurve::Circle { radius }) => (
                Point2::new(-radius, -radius),
                Point2::new(*radius, *radius),
            ),
            BoundaryGeometry::Smooth(SmoothCurve::Star) => {
                let r = 0.45 + 1.0 / 9.0;
                (Point2::new(-r, -r), Point2::new(r, r))
            }
            BoundaryGeometry::Polygon(poly) => {
                let mut lo = poly.vertices[0];
                let mut hi = poly.vertices[0];
                for v in &poly.vertices {
                    lo.x = lo.x.min(v.x);
                    lo.y = lo.y.min(v.y);
                    hi.x = hi.x.max(v.x);
                    hi.y = hi.y.max(v.y);
                }
                (lo, hi)
            }
        }
    }

    /// Total boundary length (exact for circles/polygons, fine trapezoid for
    /// other smooth curves).
    pub fn perimeter(&self) -> f64 {
        match self {
            BoundaryGeometry::Smooth(SmoothCurve::Circle { radius }) => 2.0 * PI * radius,
            BoundaryGeometry::Smooth(curve) => {
                let n = 8192;
                (0..n)
                    .map(|i| curve.derivative(2.0 * PI * i as f64 / n as f64).norm())
                    .sum::<f64>()
                    * (2.0 * PI / n as f64)
            }
            BoundaryGeometry::Polygon(poly) => poly.perimeter(),
        }
    }

    /// Rejection-sample points strictly inside the domain with a boundary
    /// margin. Returns fewer than `count` points only if the margin leaves
    /// almost no interior (caller decides how to handle that).
    pub fn sample_interior(
        &self,
        count: usize,
        margin: f64,
        rng: &mut crate::SeedStream,
    ) -> Vec<Point2> {
        let (lo, hi) = self.bounding_box();
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        let max_attempts = count.max(16) * 4000;
        while out.len() < count && attempts < max_attempts {
            attempts += 1;
            let p = Point2::new(rng.uniform_in(lo.x, hi.x), rng.uniform_in(lo.y, hi.y));
            if self.contains(p) && self.distance_to_boundary(p) >= margin {
                out.push(p);
            }
        }
        out
    }
}

fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}
