//! Quadrature of 2-forms over reference surfaces and 1-forms along loops.

use crate::error::{MaslovError, Result};
use crate::scalar::{FieldValue, Point, Real};

use super::surface::{BoundaryLoop, Patch, RefSurface};

/// Triangle rule in barycentric coordinates plus a Gauss rule on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    pub triangle_points: Vec<[T; 3]>,
    pub triangle_weights: Vec<T>,
    pub edge_points: Vec<T>,
    pub edge_weights: Vec<T>,
}

impl<T: Real> Default for QuadratureRule<T> {
    /// Degree-2 interior three-point triangle rule and three-point
    /// Gauss-Legendre on segments.
    fn default() -> Self {
        let (a, b) = (T::lit(2.0 / 3.0), T::lit(1.0 / 6.0));
        let third = T::lit(1.0 / 3.0);
        let g = T::lit(0.6f64.sqrt() / 2.0);
        let half = T::lit(0.5);
        Self {
            triangle_points: vec![[a, b, b], [b, a, b], [b, b, a]],
            triangle_weights: vec![third; 3],
            edge_points: vec![half - g, half, half + g],
            edge_weights: vec![T::lit(5.0 / 18.0), T::lit(8.0 / 18.0), T::lit(5.0 / 18.0)],
        }
    }
}

/// One quadrature node on a surface: `integral ~ sum weight * form(point, u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceNode<T> {
    pub point: Point<T>,
    pub u: Point<T>,
    pub v: Point<T>,
    pub weight: T,
}

/// One quadrature node on a loop: `integral ~ sum weight * form(point, velocity)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopNode<T> {
    pub t: T,
    pub point: Point<T>,
    pub velocity: Point<T>,
    pub weight: T,
}

impl<T: Real> QuadratureRule<T> {
    /// Nodes of every element, in mesh order.
    pub fn surface_nodes(&self, surface: &RefSurface<T>) -> Vec<SurfaceNode<T>> {
        let emb = surface.embedding;
        let half = T::lit(0.5);
        let mut nodes = Vec::with_capacity(surface.triangles.len() * self.triangle_points.len());
        for tri in &surface.triangles {
            match tri.patch {
                Patch::Triangle([a, b, c]) => {
                    let e1 = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                    let e2 = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                    for (bary, &w) in self.triangle_points.iter().zip(&self.triangle_weights) {
                        let q = [
                            bary[0] * a[0] + bary[1] * b[0] + bary[2] * c[0],
                            bary[0] * a[1] + bary[1] * b[1] + bary[2] * c[1],
                            bary[0] * a[2] + bary[1] * b[2] + bary[2] * c[2],
                        ];
                        nodes.push(SurfaceNode { point: emb.map(&q), u: emb.push(&q, &e1), v: emb.push(&q, &e2), weight: w * half });
                    }
                }
                Patch::Collapsed { origin, du, dv } => {
                    for (&s, &ws) in self.edge_points.iter().zip(&self.edge_weights) {
                        for (&t, &wt) in self.edge_points.iter().zip(&self.edge_weights) {
                            let q = [origin[0] + s * du[0] + t * dv[0], origin[1] + s * du[1] + t * dv[1], origin[2] + s * du[2] + t * dv[2]];
                            nodes.push(SurfaceNode { point: emb.map(&q), u: emb.push(&q, &du), v: emb.push(&q, &dv), weight: ws * wt });
                        }
                    }
                }
            }
        }
        nodes
    }

    /// Gauss nodes on every segment of the loop, in parameter order.
    pub fn loop_nodes(&self, lp: &BoundaryLoop<T>) -> Vec<LoopNode<T>> {
        let n = lp.segments();
        let dt = T::one() / T::from_usize(n).unwrap();
        let mut nodes = Vec::with_capacity(n * self.edge_points.len());
        for j in 0..n {
            let t0 = T::from_usize(j).unwrap() * dt;
            for (&x, &w) in self.edge_points.iter().zip(&self.edge_weights) {
                let t = t0 + x * dt;
                let (point, velocity) = lp.eval(t);
                nodes.push(LoopNode { t, point, velocity, weight: w * dt });
            }
        }
        nodes
    }
}

fn non_finite<T: Real>(p: &Point<T>) -> MaslovError {
    MaslovError::NonFiniteField { x: p[0].as_f64(), y: p[1].as_f64(), z: p[2].as_f64() }
}

/// Integral of a 2-form over the oriented surface. The form is given by its
/// value on an ordered pair of tangent vectors at a point.
pub fn integrate_2form<T: Real, V: FieldValue<T>>(
    surface: &RefSurface<T>,
    field: impl Fn(&Point<T>, &Point<T>, &Point<T>) -> V,
    rule: &QuadratureRule<T>,
) -> Result<V> {
    try_integrate_2form(surface, |p, u, v| Ok(field(p, u, v)), rule)
}

/// [`integrate_2form`] for fields whose evaluation can fail.
pub fn try_integrate_2form<T: Real, V: FieldValue<T>>(
    surface: &RefSurface<T>,
    field: impl Fn(&Point<T>, &Point<T>, &Point<T>) -> Result<V>,
    rule: &QuadratureRule<T>,
) -> Result<V> {
    let nodes = rule.surface_nodes(surface);
    // antisymmetry spot check on a few nodes spread over the mesh
    let stride = (nodes.len() / 3).max(1);
    for n in nodes.iter().step_by(stride).take(3) {
        let a = field(&n.point, &n.u, &n.v)?;
        let b = field(&n.point, &n.v, &n.u)?;
        let scale = T::one().max(a.magnitude());
        let residual = (a + b).magnitude() / scale;
        if residual > T::tol(1e-10) {
            return Err(MaslovError::NotAntisymmetric { residual: residual.as_f64() });
        }
    }
    let mut total = V::zero();
    for n in &nodes {
        let value = field(&n.point, &n.u, &n.v)?;
        if !value.is_finite_value() {
            return Err(non_finite(&n.point));
        }
        total += value * n.weight;
    }
    Ok(total)
}

/// Integral of a 1-form along a loop, given by its value on the velocity.
pub fn integrate_1form<T: Real, V: FieldValue<T>>(
    lp: &BoundaryLoop<T>,
    field: impl Fn(&Point<T>, &Point<T>) -> V,
    rule: &QuadratureRule<T>,
) -> Result<V> {
    let mut total = V::zero();
    for n in rule.loop_nodes(lp) {
        let value = field(&n.point, &n.velocity);
        if !value.is_finite_value() {
            return Err(non_finite(&n.point));
        }
        total += value * n.weight;
    }
    Ok(total)
}
