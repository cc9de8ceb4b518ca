//! Chern-Weil and topological Maslov index of a bundle pair.

use num_complex::Complex;
use num_traits::Zero;

use super::connection::{check_unitary_at, contract, i_unit, not_unitary};
use super::pair::BundlePair;
use crate::domain::{try_integrate_2form, LoopNode, QuadratureRule};
use crate::error::{MaslovError, Result};
use crate::numerics::diff::{check_step, derivative_unchecked};
use crate::numerics::{theta_of_velocity, CMatrix, Frame, PhaseTrack};
use crate::scalar::{norm3, Point, Real};

fn trace_along<T: Real>(pair: &BundlePair<T>, patch: usize, p: &Point<T>, v: &Point<T>) -> Complex<T> {
    contract(&pair.connection.patch(patch).eval(p), v).trace()
}

/// Directional derivative of `x -> tr A(x)(w)` along the unit vector `dir`.
fn d_trace<T: Real>(pair: &BundlePair<T>, patch: usize, p: &Point<T>, dir: &Point<T>, w: &Point<T>, h: T) -> Complex<T> {
    derivative_unchecked(|s: T| trace_along(pair, patch, &[p[0] + s * dir[0], p[1] + s * dir[1], p[2] + s * dir[2]], w), T::zero(), h)
}

fn step_at<T: Real>(pair: &BundlePair<T>, p: &Point<T>) -> Result<T> {
    let h = pair.fd_step * T::one().max(norm3(p));
    check_step(h)?;
    Ok(h)
}

/// `tr R(u, v) = d(tr A)(u, v)` at `p`, by central differences in the gauge
/// of the patch containing `p`.
pub fn curvature_trace_on<T: Real>(pair: &BundlePair<T>, p: &Point<T>, u: &Point<T>, v: &Point<T>) -> Result<Complex<T>> {
    let h = step_at(pair, p)?;
    let patch = pair.connection.patch_index(p);
    let (nu, nv) = (norm3(u), norm3(v));
    if nu == T::zero() || nv == T::zero() {
        return Ok(Complex::zero());
    }
    let du = [u[0] / nu, u[1] / nu, u[2] / nu];
    let dv = [v[0] / nv, v[1] / nv, v[2] / nv];
    Ok(d_trace(pair, patch, p, &du, v, h) * nu - d_trace(pair, patch, p, &dv, u, h) * nv)
}

/// `tr R` on the reference basis `(e_x, e_y)`: `d_x tr A_y - d_y tr A_x`.
pub fn curvature_trace<T: Real>(pair: &BundlePair<T>, p: &Point<T>) -> Result<Complex<T>> {
    let (o, l) = (T::zero(), T::one());
    curvature_trace_on(pair, p, &[l, o, o], &[o, l, o])
}

/// Largest `|tr(A(e_a) A(e_b) - A(e_b) A(e_a))|` over coordinate pairs at `p`.
/// Identically zero; kept as a numerical cross-check.
pub fn trace_wedge_residual<T: Real>(pair: &BundlePair<T>, p: &Point<T>) -> T {
    let a = pair.connection.coefficients(p);
    let mut worst = T::zero();
    for i in 0..3 {
        for j in (i + 1)..3 {
            let c = &(&a[i] * &a[j]) - &(&a[j] * &a[i]);
            worst = worst.max(c.trace().norm());
        }
    }
    worst
}

/// `∫_Σ tr R`.
pub fn integrate_curvature_trace<T: Real>(pair: &BundlePair<T>, rule: &QuadratureRule<T>) -> Result<Complex<T>> {
    try_integrate_2form(&pair.surface, |p, u, v| curvature_trace_on(pair, p, u, v), rule)
}

/// One sample of the boundary connection 1-form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSample<T> {
    pub node: LoopNode<T>,
    /// `θ(γ'(t))`, purely imaginary.
    pub value: Complex<T>,
}

/// Covariant derivatives `dσ_i/dt + A(γ') σ_i` of the boundary frame at `t`.
pub(crate) fn frame_covariant_derivatives<T: Real>(pair: &BundlePair<T>, loop_index: usize, t: T, point: &Point<T>, velocity: &Point<T>) -> (Frame<T>, Vec<Vec<Complex<T>>>) {
    let lp = &pair.surface.boundary_loops()[loop_index];
    let dt = T::one() / T::from_usize(lp.segments()).unwrap();
    let frame = pair.boundary.frame(loop_index, t);
    let d: Vec<Vec<Complex<T>>> = derivative_unchecked(|s: T| pair.boundary.frame(loop_index, s).vectors().to_vec(), t, dt);
    let a = pair.connection.along(point, velocity);
    let derivs = frame
        .vectors()
        .iter()
        .zip(d)
        .map(|(sigma, ds)| {
            let av = a.mul_vec(sigma);
            ds.into_iter().zip(av).map(|(x, y)| x + y).collect()
        })
        .collect();
    (frame, derivs)
}

/// `θ(γ'(t))` at every Gauss node of boundary loop `loop_index`.
pub fn boundary_theta<T: Real>(pair: &BundlePair<T>, loop_index: usize, rule: &QuadratureRule<T>) -> Result<Vec<ThetaSample<T>>> {
    let lp = pair
        .surface
        .boundary_loops()
        .get(loop_index)
        .ok_or(MaslovError::DimensionMismatch { expected: pair.surface.boundary_loops().len(), found: loop_index })?;
    if !pair.connection.is_unitary() {
        let p = lp.eval(T::zero()).0;
        let r = super::connection::unitarity_residual(&pair.connection.coefficients(&p), &pair.metric, &p, pair.fd_step, 3);
        return Err(not_unitary(r));
    }
    let mut out = Vec::new();
    for node in rule.loop_nodes(lp) {
        let coeffs = pair.connection.coefficients(&node.point);
        check_unitary_at(&coeffs, &pair.metric, &node.point, pair.fd_step, 3)?;
        let (frame, derivs) = frame_covariant_derivatives(pair, loop_index, node.t, &node.point, &node.velocity);
        let value = theta_of_velocity(&frame, &derivs, &pair.metric.at(&node.point))?;
        out.push(ThetaSample { node, value });
    }
    Ok(out)
}

/// `∮ θ` over boundary loop `loop_index`.
pub fn integrate_theta<T: Real>(pair: &BundlePair<T>, loop_index: usize, rule: &QuadratureRule<T>) -> Result<Complex<T>> {
    let samples = boundary_theta(pair, loop_index, rule)?;
    let mut total = Complex::zero();
    for s in samples {
        if !(s.value.re.is_finite() && s.value.im.is_finite()) {
            return Err(MaslovError::NonFiniteField { x: s.node.point[0].as_f64(), y: s.node.point[1].as_f64(), z: s.node.point[2].as_f64() });
        }
        total = total + s.value * s.node.weight;
    }
    Ok(total)
}

/// Components of the curvature-plus-boundary computation.
#[derive(Debug, Clone, PartialEq)]
pub struct ChernWeil<T> {
    /// `∫_Σ tr R`.
    pub int_curvature: Complex<T>,
    /// `∮_{∂Σ} θ` per boundary loop.
    pub int_theta: Vec<Complex<T>>,
    /// `(i/π)(∫ tr R - ∮ θ)`, real part.
    pub mu: T,
    /// Imaginary part of the same expression; zero up to roundoff for a
    /// unitary connection.
    pub imaginary_part: T,
}

impl<T: Real> ChernWeil<T> {
    pub fn total_theta(&self) -> Complex<T> {
        self.int_theta.iter().fold(Complex::zero(), |a, b| a + b)
    }
}

/// `μ = (i/π)(∫_Σ tr R − ∮_{∂Σ} θ)`.
pub fn maslov_chern_weil<T: Real>(pair: &BundlePair<T>, rule: &QuadratureRule<T>) -> Result<ChernWeil<T>> {
    let int_curvature = integrate_curvature_trace(pair, rule)?;
    let int_theta = (0..pair.surface.boundary_loops().len()).map(|i| integrate_theta(pair, i, rule)).collect::<Result<Vec<_>>>()?;
    let total = int_theta.iter().fold(Complex::zero(), |a, b| a + b);
    let value = i_unit::<T>() * (int_curvature - total) / T::PI();
    Ok(ChernWeil { int_curvature, int_theta, mu: value.re, imaginary_part: value.im })
}

/// Topological index with its per-loop contributions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topological {
    pub mu: i64,
    /// Winding of `det^2 / |det|^2` along each boundary loop.
    pub loop_windings: Vec<i64>,
    /// Winding of the gluing determinant (closed surfaces only).
    pub clutching_winding: Option<i64>,
}

/// Relative drop of the projected determinant that triggers re-anchoring.
const REANCHOR_RATIO: f64 = 0.1;

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn projected_det<T: Real>(frame: &Frame<T>, rows: &[usize]) -> Complex<T> {
    let k = frame.rank();
    CMatrix::from_fn(k, k, |i, j| frame.vectors()[j][rows[i]]).det()
}

fn best_subset<T: Real>(frame: &Frame<T>, choices: &[Vec<usize>]) -> (usize, Complex<T>) {
    choices
        .iter()
        .enumerate()
        .map(|(i, s)| (i, projected_det(frame, s)))
        .fold((0, Complex::zero()), |best, cur| if cur.1.norm() > best.1.norm() { cur } else { best })
}

/// Complex determinant of each frame sample. For `k < n` the frames are
/// projected on a coordinate `k`-subspace chosen where the projection is
/// largest; when it degenerates along the loop a new subspace is chosen and
/// the phase is stitched across the switch.
pub fn determinant_samples<T: Real>(frames: &[Frame<T>]) -> Result<Vec<Complex<T>>> {
    let first = frames.first().ok_or(MaslovError::ZeroSample { index: 0 })?;
    let (n, k) = (first.dim(), first.rank());
    if k == n {
        return Ok(frames.iter().map(|f| f.as_matrix().det()).collect());
    }
    let choices = subsets(n, k);
    let (mut anchor, d0) = best_subset(first, &choices);
    if d0.norm() == T::zero() {
        return Err(MaslovError::ProjectionDegenerate);
    }
    let mut gauge = Complex::new(T::one(), T::zero());
    let mut running = d0.norm();
    let mut out = Vec::with_capacity(frames.len() + 1);
    out.push(d0);
    for j in 1..frames.len() {
        let mut d = projected_det(&frames[j], &choices[anchor]);
        if d.norm() < T::lit(REANCHOR_RATIO) * running {
            let (next, dn) = best_subset(&frames[j], &choices);
            if dn.norm() < T::lit(REANCHOR_RATIO) * running {
                return Err(MaslovError::ProjectionDegenerate);
            }
            // continue the phase from the previous sample in the new gauge
            let prev_old = projected_det(&frames[j - 1], &choices[anchor]);
            let prev_new = projected_det(&frames[j - 1], &choices[next]);
            if prev_new.norm() == T::zero() {
                return Err(MaslovError::ProjectionDegenerate);
            }
            gauge = gauge * prev_old / prev_new;
            anchor = next;
            running = dn.norm();
            d = dn;
        }
        running = running.max(d.norm());
        out.push(d * gauge);
    }
    // closing value in the final gauge so the track returns to its start
    if anchor != 0 || gauge != Complex::new(T::one(), T::zero()) {
        out.push(projected_det(first, &choices[anchor]) * gauge);
    }
    Ok(out)
}

/// Winding number of `det^2 / |det|^2` along a closed loop of frames.
pub fn frame_loop_winding<T: Real>(frames: &[Frame<T>]) -> Result<i64> {
    let dets = determinant_samples(frames)?;
    let squares = dets.into_iter().map(|d| d * d / d.norm_sqr()).collect();
    let track = PhaseTrack::new(squares)?;
    Ok(crate::numerics::winding_number(&track))
}

/// Connection-free index: windings of the squared boundary determinants plus,
/// on closed surfaces, twice the winding of the gluing determinant.
pub fn maslov_topological<T: Real>(pair: &BundlePair<T>) -> Result<Topological> {
    let mut loop_windings = Vec::new();
    for (i, lp) in pair.surface.boundary_loops().iter().enumerate() {
        let frames: Vec<Frame<T>> = lp.sample_parameters().into_iter().map(|t| pair.boundary.frame(i, t)).collect();
        loop_windings.push(frame_loop_winding(&frames)?);
    }
    let clutching_winding = match &pair.clutching {
        Some(c) => {
            let n = T::from_usize(c.samples()).unwrap();
            let samples = (0..c.samples()).map(|j| c.eval(T::from_usize(j).unwrap() / n)).collect();
            Some(crate::numerics::winding_number(&PhaseTrack::new(samples)?))
        }
        None => None,
    };
    let mu = loop_windings.iter().sum::<i64>() + 2 * clutching_winding.unwrap_or(0);
    Ok(Topological { mu, loop_windings, clutching_winding })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(v: Vec<Vec<Complex<f64>>>) -> Frame<f64> {
        Frame::new(v).unwrap()
    }

    #[test]
    fn subsets_enumerate_combinations() {
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(2, 2).len(), 1);
    }

    #[test]
    fn projected_winding_of_a_line_in_c2() {
        // real line spanned by e^{i m t}(cos a, sin a) in C^2, k = 1 < n = 2
        let n = 256;
        for m in [-2i64, 1, 3] {
            let frames: Vec<_> = (0..n)
                .map(|j| {
                    let t = j as f64 / n as f64;
                    let a = std::f64::consts::TAU * t;
                    let z = Complex::from_polar(1.0, m as f64 * a);
                    frame(vec![vec![z * a.cos(), z * a.sin()]])
                })
                .collect();
            // the coordinate projections vanish along the loop, forcing re-anchoring
            let w = frame_loop_winding(&frames).unwrap();
            assert_eq!(w, 2 * m);
        }
    }
}
