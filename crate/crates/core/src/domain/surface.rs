//! Structured reference surfaces with ordered boundary loops.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use crate::error::{MaslovError, Result};
use crate::numerics::Orientation;
use crate::scalar::{norm3, Point, Real};

/// Largest refinement level accepted by [`build_surface`].
pub const MAX_REFINEMENT: usize = 8;

/// Default inner radius of the reference annulus.
pub const ANNULUS_INNER_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceKind<T> {
    /// Closed unit disk.
    Disk,
    /// `inner_radius <= |x| <= 1`.
    Annulus { inner_radius: T },
    /// Unit sphere in `R^3`.
    ClosedSphere,
    /// Cap of the unit sphere around the north pole.
    SphericalCap { colatitude: T },
    Custom,
}

impl<T: Real> SurfaceKind<T> {
    pub fn annulus() -> Self {
        SurfaceKind::Annulus { inner_radius: T::lit(ANNULUS_INNER_RADIUS) }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SurfaceKind::Disk => "disk",
            SurfaceKind::Annulus { .. } => "annulus",
            SurfaceKind::ClosedSphere => "closed_sphere",
            SurfaceKind::SphericalCap { .. } => "spherical_cap_domain",
            SurfaceKind::Custom => "custom",
        }
    }

    /// Euler characteristic the topology of this kind must have.
    pub fn expected_euler(&self) -> Option<i64> {
        match self {
            SurfaceKind::Disk | SurfaceKind::SphericalCap { .. } => Some(1),
            SurfaceKind::Annulus { .. } => Some(0),
            SurfaceKind::ClosedSphere => Some(2),
            SurfaceKind::Custom => None,
        }
    }
}

/// Map from parameter space to reference coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Embedding<T> {
    Identity,
    /// `(rho, psi) -> (rho cos psi, rho sin psi, 0)`
    Polar,
    /// `(s, psi) -> spherical point at colatitude `s * colatitude``
    Cap { colatitude: T },
    /// `q -> q / |q|`
    Radial,
}

impl<T: Real> Embedding<T> {
    /// Point and the Jacobian applied to a parameter displacement.
    pub(crate) fn map(&self, q: &Point<T>) -> Point<T> {
        match *self {
            Embedding::Identity => *q,
            Embedding::Polar => [q[0] * q[1].cos(), q[0] * q[1].sin(), T::zero()],
            Embedding::Cap { colatitude } => {
                let a = q[0] * colatitude;
                [a.sin() * q[1].cos(), a.sin() * q[1].sin(), a.cos()]
            }
            Embedding::Radial => {
                let r = norm3(q);
                [q[0] / r, q[1] / r, q[2] / r]
            }
        }
    }

    pub(crate) fn push(&self, q: &Point<T>, dq: &Point<T>) -> Point<T> {
        match *self {
            Embedding::Identity => *dq,
            Embedding::Polar => {
                let (s, c) = q[1].sin_cos();
                [c * dq[0] - q[0] * s * dq[1], s * dq[0] + q[0] * c * dq[1], T::zero()]
            }
            Embedding::Cap { colatitude } => {
                let a = q[0] * colatitude;
                let (sa, ca) = a.sin_cos();
                let (sp, cp) = q[1].sin_cos();
                let da = dq[0] * colatitude;
                [ca * cp * da - sa * sp * dq[1], ca * sp * da + sa * cp * dq[1], -sa * da]
            }
            Embedding::Radial => {
                let r = norm3(q);
                let p = [q[0] / r, q[1] / r, q[2] / r];
                let pd = p[0] * dq[0] + p[1] * dq[1] + p[2] * dq[2];
                [(dq[0] - p[0] * pd) / r, (dq[1] - p[1] * pd) / r, (dq[2] - p[2] * pd) / r]
            }
        }
    }
}

/// Parameter-space geometry of one mesh element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Patch<T> {
    /// Affine triangle with the given parameter corners.
    Triangle([Point<T>; 3]),
    /// Parameter rectangle `origin + u du + v dv`, `(u, v) in [0,1]^2`, whose
    /// image is a triangle with one collapsed side (the polar fan).
    Collapsed { origin: Point<T>, du: Point<T>, dv: Point<T> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triangle<T> {
    pub vertices: [usize; 3],
    pub(crate) patch: Patch<T>,
}

type CurveFn<T> = dyn Fn(T) -> (Point<T>, Point<T>) + Send + Sync;

/// Closed boundary curve `t in [0, 1) -> (point, velocity)` with a sampling
/// density. The curve closure must accept any real `t` and be 1-periodic.
#[derive(Clone)]
pub struct BoundaryLoop<T> {
    curve: Arc<CurveFn<T>>,
    segments: usize,
}

impl<T: Real> BoundaryLoop<T> {
    pub fn new(segments: usize, curve: impl Fn(T) -> (Point<T>, Point<T>) + Send + Sync + 'static) -> Self {
        Self { curve: Arc::new(curve), segments: segments.max(3) }
    }

    /// Circle of radius `r` at height `z`, counter-clockwise seen from `+z`.
    pub fn circle(radius: T, height: T, segments: usize) -> Self {
        Self::new(segments, move |t: T| {
            let a = T::TAU() * t;
            let (s, c) = a.sin_cos();
            ([radius * c, radius * s, height], [-T::TAU() * radius * s, T::TAU() * radius * c, T::zero()])
        })
    }

    /// Piecewise linear loop through `points`, one segment per edge.
    pub fn polygon(points: Vec<Point<T>>) -> Self {
        let n = points.len();
        let pts = Arc::new(points);
        Self {
            curve: Arc::new(move |t: T| {
                let s = (t - t.floor()) * T::from_usize(n).unwrap();
                let i = s.floor().to_usize().unwrap_or(0).min(n - 1);
                let f = s - T::from_usize(i).unwrap();
                let (a, b) = (pts[i], pts[(i + 1) % n]);
                let nn = T::from_usize(n).unwrap();
                let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                ([a[0] + f * d[0], a[1] + f * d[1], a[2] + f * d[2]], [d[0] * nn, d[1] * nn, d[2] * nn])
            }),
            segments: n,
        }
    }

    pub fn eval(&self, t: T) -> (Point<T>, Point<T>) {
        (self.curve)(t)
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn with_segments(&self, segments: usize) -> Self {
        Self { curve: self.curve.clone(), segments: segments.max(3) }
    }

    /// Sample parameters `t_j = j / N`.
    pub fn sample_parameters(&self) -> Vec<T> {
        let n = T::from_usize(self.segments).unwrap();
        (0..self.segments).map(|j| T::from_usize(j).unwrap() / n).collect()
    }

    /// Same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        let curve = self.curve.clone();
        Self {
            curve: Arc::new(move |t: T| {
                let (p, v) = curve(-t);
                (p, [-v[0], -v[1], -v[2]])
            }),
            segments: self.segments,
        }
    }
}

impl<T> fmt::Debug for BoundaryLoop<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryLoop").field("segments", &self.segments).finish_non_exhaustive()
    }
}

/// Oriented triangulated reference surface.
#[derive(Debug, Clone)]
pub struct RefSurface<T> {
    pub(crate) kind: SurfaceKind<T>,
    pub(crate) level: usize,
    pub(crate) vertices: Vec<Point<T>>,
    pub(crate) triangles: Vec<Triangle<T>>,
    pub(crate) boundary_vertices: Vec<Vec<usize>>,
    pub(crate) loops: Vec<BoundaryLoop<T>>,
    pub(crate) embedding: Embedding<T>,
    pub(crate) orientation: Orientation,
}

/// Boundary samples per loop used at a refinement level.
pub fn default_boundary_samples(level: usize) -> usize {
    16 << level
}

/// Builds the structured mesh of `kind` at `level`.
pub fn build_surface<T: Real>(kind: SurfaceKind<T>, level: usize) -> Result<RefSurface<T>> {
    if level > MAX_REFINEMENT {
        return Err(MaslovError::InvalidRefinement { level, max: MAX_REFINEMENT });
    }
    let samples = default_boundary_samples(level);
    let surface = match kind {
        SurfaceKind::Disk => polar_mesh(kind, level, None, Embedding::Polar, samples, |s| BoundaryLoop::circle(T::one(), T::zero(), s)),
        SurfaceKind::SphericalCap { colatitude } => {
            if !(colatitude > T::zero() && colatitude < T::PI()) {
                return Err(MaslovError::UnsupportedKind(format!("cap colatitude {colatitude} outside (0, pi)")));
            }
            let (s0, c0) = colatitude.sin_cos();
            polar_mesh(kind, level, None, Embedding::Cap { colatitude }, samples, move |s| BoundaryLoop::circle(s0, c0, s))
        }
        SurfaceKind::Annulus { inner_radius } => {
            if !(inner_radius > T::zero() && inner_radius < T::one()) {
                return Err(MaslovError::UnsupportedKind(format!("annulus inner radius {inner_radius} outside (0, 1)")));
            }
            polar_mesh(kind, level, Some(inner_radius), Embedding::Polar, samples, |s| BoundaryLoop::circle(T::one(), T::zero(), s))
        }
        SurfaceKind::ClosedSphere => icosphere(level),
        SurfaceKind::Custom => {
            return Err(MaslovError::UnsupportedKind("custom surfaces are built with RefSurface::custom".into()));
        }
    };
    surface.validate()?;
    Ok(surface)
}

fn polar_mesh<T: Real>(
    kind: SurfaceKind<T>,
    level: usize,
    inner: Option<T>,
    embedding: Embedding<T>,
    samples: usize,
    outer_loop: impl Fn(usize) -> BoundaryLoop<T>,
) -> RefSurface<T> {
    let nr = 2usize << level;
    let npsi = 8usize << level;
    let r0 = inner.unwrap_or(T::zero());
    let rho = |i: usize| r0 + (T::one() - r0) * T::from_usize(i).unwrap() / T::from_usize(nr).unwrap();
    let psi = |j: usize| T::TAU() * T::from_usize(j).unwrap() / T::from_usize(npsi).unwrap();
    let zero = T::zero();

    let mut params = Vec::new();
    let first_ring = if inner.is_some() { 0 } else { 1 };
    if inner.is_none() {
        params.push([zero, zero, zero]);
    }
    let ring_base = |i: usize| if inner.is_some() { i * npsi } else { 1 + (i - 1) * npsi };
    for i in first_ring..=nr {
        for j in 0..npsi {
            params.push([rho(i), psi(j), zero]);
        }
    }
    let v = |i: usize, j: usize| ring_base(i) + j % npsi;

    let mut triangles = Vec::new();
    if inner.is_none() {
        for j in 0..npsi {
            triangles.push(Triangle {
                vertices: [0, v(1, j), v(1, j + 1)],
                patch: Patch::Collapsed {
                    origin: [zero, psi(j), zero],
                    du: [rho(1), zero, zero],
                    dv: [zero, psi(1), zero],
                },
            });
        }
    }
    for i in first_ring..nr {
        for j in 0..npsi {
            let pa = [rho(i), psi(j), zero];
            let pb = [rho(i + 1), psi(j), zero];
            let pc = [rho(i + 1), psi(j + 1), zero];
            let pd = [rho(i), psi(j + 1), zero];
            triangles.push(Triangle { vertices: [v(i, j), v(i + 1, j), v(i + 1, j + 1)], patch: Patch::Triangle([pa, pb, pc]) });
            triangles.push(Triangle { vertices: [v(i, j), v(i + 1, j + 1), v(i, j + 1)], patch: Patch::Triangle([pa, pc, pd]) });
        }
    }

    let mut boundary_vertices = vec![(0..npsi).map(|j| v(nr, j)).collect::<Vec<_>>()];
    let mut loops = vec![outer_loop(samples)];
    if let Some(r) = inner {
        boundary_vertices.push((0..npsi).rev().map(|j| v(0, (j + 1) % npsi)).collect());
        loops.push(BoundaryLoop::circle(r, T::zero(), samples).reversed());
    }
    let vertices = params.iter().map(|q| embedding.map(q)).collect();
    RefSurface { kind, level, vertices, triangles, boundary_vertices, loops, embedding, orientation: Orientation::Positive }
}

fn icosphere<T: Real>(level: usize) -> RefSurface<T> {
    let phi = (T::one() + T::lit(5.0).sqrt()) / T::lit(2.0);
    let (o, z) = (T::one(), T::zero());
    let raw = [
        [-o, phi, z], [o, phi, z], [-o, -phi, z], [o, -phi, z],
        [z, -o, phi], [z, o, phi], [z, -o, -phi], [z, o, -phi],
        [phi, z, -o], [phi, z, o], [-phi, z, -o], [-phi, z, o],
    ];
    let mut verts: Vec<Point<T>> = raw.iter().map(|p| Embedding::Radial.map(p)).collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, verts: &mut Vec<Point<T>>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(Embedding::Radial.map(&[p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let triangles = faces
        .into_iter()
        .map(|f| Triangle { vertices: f, patch: Patch::Triangle([verts[f[0]], verts[f[1]], verts[f[2]]]) })
        .collect();
    RefSurface {
        kind: SurfaceKind::ClosedSphere,
        level,
        vertices: verts,
        triangles,
        boundary_vertices: Vec::new(),
        loops: Vec::new(),
        embedding: Embedding::Radial,
        orientation: Orientation::Positive,
    }
}

impl<T: Real> RefSurface<T> {
    /// Planar surface from explicit data. Triangles must be counter-clockwise
    /// and each boundary loop must keep the surface on its left.
    pub fn custom(vertices: Vec<[T; 2]>, triangles: Vec<[usize; 3]>, boundary_loops: Vec<Vec<usize>>) -> Result<Self> {
        let verts: Vec<Point<T>> = vertices.iter().map(|p| [p[0], p[1], T::zero()]).collect();
        if let Some(&bad) = triangles.iter().flatten().chain(boundary_loops.iter().flatten()).find(|&&i| i >= verts.len()) {
            return Err(MaslovError::InvalidSurface(format!("vertex index {bad} out of range")));
        }
        let tris = triangles
            .iter()
            .map(|t| Triangle { vertices: *t, patch: Patch::Triangle([verts[t[0]], verts[t[1]], verts[t[2]]]) })
            .collect();
        let loops = boundary_loops.iter().map(|l| BoundaryLoop::polygon(l.iter().map(|&i| verts[i]).collect())).collect();
        let s = Self {
            kind: SurfaceKind::Custom,
            level: 0,
            vertices: verts,
            triangles: tris,
            boundary_vertices: boundary_loops,
            loops,
            embedding: Embedding::Identity,
            orientation: Orientation::Positive,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn kind(&self) -> SurfaceKind<T> {
        self.kind
    }

    pub fn refinement_level(&self) -> usize {
        self.level
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn triangles(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.triangles.iter().map(|t| t.vertices)
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn boundary_vertex_loops(&self) -> &[Vec<usize>] {
        &self.boundary_vertices
    }

    pub fn boundary_loops(&self) -> &[BoundaryLoop<T>] {
        &self.loops
    }

    pub fn has_boundary(&self) -> bool {
        !self.loops.is_empty()
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Same mesh with every analytic boundary loop resampled to `n` segments.
    pub fn with_boundary_samples(&self, n: usize) -> Self {
        let mut s = self.clone();
        if self.kind != SurfaceKind::Custom {
            s.loops = self.loops.iter().map(|l| l.with_segments(n)).collect();
        }
        s
    }

    /// Same surface with the opposite orientation: every triangle and every
    /// boundary loop is traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut s = self.clone();
        for t in &mut s.triangles {
            t.vertices.swap(1, 2);
            t.patch = match t.patch {
                Patch::Triangle([a, b, c]) => Patch::Triangle([a, c, b]),
                Patch::Collapsed { origin, du, dv } => Patch::Collapsed { origin, du: dv, dv: du },
            };
        }
        for l in &mut s.boundary_vertices {
            l.reverse();
        }
        s.loops = self.loops.iter().map(BoundaryLoop::reversed).collect();
        s.orientation = self.orientation.flipped();
        s
    }

    /// Centroid of each triangle image, in mesh order.
    pub fn centroids(&self) -> Vec<Point<T>> {
        let third = T::one() / T::lit(3.0);
        self.triangles
            .iter()
            .map(|t| {
                let q = match t.patch {
                    Patch::Triangle([a, b, c]) => [(a[0] + b[0] + c[0]) * third, (a[1] + b[1] + c[1]) * third, (a[2] + b[2] + c[2]) * third],
                    Patch::Collapsed { origin, du, dv } => {
                        let h = T::lit(0.5);
                        [origin[0] + h * (du[0] + dv[0]), origin[1] + h * (du[1] + dv[1]), origin[2] + h * (du[2] + dv[2])]
                    }
                };
                self.embedding.map(&q)
            })
            .collect()
    }

    /// Every `stride`-th centroid; used for invariant probes.
    pub fn probe_points(&self, count: usize) -> Vec<Point<T>> {
        let c = self.centroids();
        let stride = (c.len() / count.max(1)).max(1);
        c.into_iter().step_by(stride).collect()
    }

    /// Checks orientation, boundary coverage and the Euler characteristic.
    pub fn validate(&self) -> Result<()> {
        let sign = self.orientation.sign::<T>();
        for (idx, t) in self.triangles.iter().enumerate() {
            let oriented = match t.patch {
                Patch::Triangle([a, b, c]) => match self.embedding {
                    Embedding::Radial => {
                        let (u, v) = (sub(&b, &a), sub(&c, &a));
                        let n = cross(&u, &v);
                        n[0] * a[0] + n[1] * a[1] + n[2] * a[2]
                    }
                    _ => (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]),
                },
                Patch::Collapsed { du, dv, .. } => du[0] * dv[1] - du[1] * dv[0],
            };
            if !(oriented * sign > T::zero()) {
                return Err(MaslovError::InvalidSurface(format!("triangle {idx} is not positively oriented")));
            }
        }
        // boundary edges: directed edges whose reverse is absent
        let directed: HashSet<(usize, usize)> =
            self.triangles.iter().flat_map(|t| (0..3).map(move |i| (t.vertices[i], t.vertices[(i + 1) % 3]))).collect();
        let boundary: HashSet<(usize, usize)> = directed.iter().copied().filter(|&(a, b)| !directed.contains(&(b, a))).collect();
        let mut covered = HashSet::new();
        for l in &self.boundary_vertices {
            for i in 0..l.len() {
                let e = (l[i], l[(i + 1) % l.len()]);
                if !boundary.contains(&e) || !covered.insert(e) {
                    return Err(MaslovError::InvalidSurface(format!("boundary loop edge {e:?} does not keep the surface on its left")));
                }
            }
        }
        if covered.len() != boundary.len() {
            return Err(MaslovError::InvalidSurface("boundary loops do not cover the boundary".into()));
        }
        if self.loops.len() != self.boundary_vertices.len() {
            return Err(MaslovError::InvalidSurface("analytic loops do not match boundary loops".into()));
        }
        if let Some(chi) = self.kind.expected_euler() {
            let got = euler_characteristic(self);
            if got != chi {
                return Err(MaslovError::InvalidSurface(format!("Euler characteristic {got}, expected {chi}")));
            }
        }
        Ok(())
    }

    /// Plain-text OFF listing of the mesh.
    pub fn to_off(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "OFF");
        let _ = writeln!(out, "{} {} 0", self.vertices.len(), self.triangles.len());
        for p in &self.vertices {
            let _ = writeln!(out, "{} {} {}", p[0], p[1], p[2]);
        }
        for t in &self.triangles {
            let _ = writeln!(out, "3 {} {} {}", t.vertices[0], t.vertices[1], t.vertices[2]);
        }
        out
    }
}

/// `V - E + F`, counted combinatorially.
pub fn euler_characteristic<T: Real>(surface: &RefSurface<T>) -> i64 {
    let edges: HashSet<(usize, usize)> = surface
        .triangles
        .iter()
        .flat_map(|t| (0..3).map(move |i| {
            let (a, b) = (t.vertices[i], t.vertices[(i + 1) % 3]);
            (a.min(b), a.max(b))
        }))
        .collect();
    surface.vertices.len() as i64 - edges.len() as i64 + surface.triangles.len() as i64
}

fn sub<T: Real>(a: &Point<T>, b: &Point<T>) -> Point<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross<T: Real>(a: &Point<T>, b: &Point<T>) -> Point<T> {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_level_zero() {
        let s = build_surface::<f64>(SurfaceKind::Disk, 0).unwrap();
        assert_eq!(euler_characteristic(&s), 1);
        assert_eq!(s.boundary_vertex_loops().len(), 1);
        assert_eq!(s.boundary_loops()[0].segments(), 16);
    }

    #[test]
    fn annulus_has_two_opposite_loops() {
        let s = build_surface::<f64>(SurfaceKind::annulus(), 2).unwrap();
        assert_eq!(euler_characteristic(&s), 0);
        assert_eq!(s.boundary_loops().len(), 2);
        // outer loop counter-clockwise, inner loop clockwise
        let winding = |l: &BoundaryLoop<f64>| {
            let (p, v) = l.eval(0.1);
            p[0] * v[1] - p[1] * v[0]
        };
        assert!(winding(&s.boundary_loops()[0]) > 0.0);
        assert!(winding(&s.boundary_loops()[1]) < 0.0);
    }

    #[test]
    fn sphere_has_no_boundary() {
        let s = build_surface::<f64>(SurfaceKind::ClosedSphere, 3).unwrap();
        assert_eq!(euler_characteristic(&s), 2);
        assert!(s.boundary_vertex_loops().is_empty());
        assert_eq!(s.vertices().len(), 10 * 4usize.pow(3) + 2);
    }

    #[test]
    fn vertex_count_grows_fourfold() {
        for kind in [SurfaceKind::Disk, SurfaceKind::annulus(), SurfaceKind::ClosedSphere] {
            let a = build_surface::<f64>(kind, 3).unwrap().vertices().len() as f64;
            let b = build_surface::<f64>(kind, 4).unwrap().vertices().len() as f64;
            assert!((b / a - 4.0).abs() < 0.3, "{:?}: {}", kind, b / a);
        }
    }

    #[test]
    fn caps_and_reversal_stay_valid() {
        let s = build_surface::<f64>(SurfaceKind::SphericalCap { colatitude: 1.0 }, 2).unwrap();
        assert_eq!(euler_characteristic(&s), 1);
        let r = s.reversed();
        r.validate().unwrap();
        assert_eq!(r.orientation(), Orientation::Negative);
    }

    #[test]
    fn refinement_out_of_range() {
        assert!(matches!(build_surface::<f64>(SurfaceKind::Disk, 9), Err(MaslovError::InvalidRefinement { .. })));
        assert!(matches!(build_surface::<f64>(SurfaceKind::Custom, 1), Err(MaslovError::UnsupportedKind(_))));
    }

    #[test]
    fn custom_square() {
        let s = RefSurface::<f64>::custom(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
            vec![vec![0, 1, 2, 3]],
        )
        .unwrap();
        assert_eq!(euler_characteristic(&s), 1);
        assert!(RefSurface::<f64>::custom(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]], vec![[0, 2, 1]], vec![vec![0, 2, 1]]).is_err());
    }

    #[test]
    fn off_dump_has_header() {
        let s = build_surface::<f64>(SurfaceKind::Disk, 0).unwrap();
        let off = s.to_off();
        assert!(off.starts_with("OFF\n"));
        assert_eq!(off.lines().count(), 2 + s.vertices().len() + s.triangle_count());
    }
}
