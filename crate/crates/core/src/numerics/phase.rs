//! Phase tracking of closed loops in `C*`.

use num_complex::Complex;

use crate::error::{MaslovError, Result};
use crate::scalar::Real;

/// Samples of a closed loop in `C*` together with their cumulative argument.
///
/// The loop closes from the last sample back to the first; that closing
/// step obeys the same jump bound as every other step.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrack<T> {
    samples: Vec<Complex<T>>,
    unwrapped: Vec<T>,
    closing: T,
}

impl<T: Real> PhaseTrack<T> {
    pub fn new(samples: Vec<Complex<T>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(MaslovError::ZeroSample { index: 0 });
        }
        let max = samples.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        let floor = T::lit(1e-13) * max;
        for (index, z) in samples.iter().enumerate() {
            let r = z.norm();
            if !(r > floor) || !r.is_finite() {
                return Err(MaslovError::ZeroSample { index });
            }
        }
        let limit = T::FRAC_PI_2();
        let step = |a: &Complex<T>, b: &Complex<T>| (b * a.conj()).arg();
        let mut unwrapped = Vec::with_capacity(samples.len());
        unwrapped.push(samples[0].arg());
        for i in 1..samples.len() {
            let jump = step(&samples[i - 1], &samples[i]);
            if jump.abs() >= limit {
                return Err(MaslovError::NeedRefinement { index: i, jump: jump.as_f64() });
            }
            let prev = unwrapped[i - 1];
            unwrapped.push(prev + jump);
        }
        let closing = step(samples.last().unwrap(), &samples[0]);
        if closing.abs() >= limit {
            return Err(MaslovError::NeedRefinement { index: 0, jump: closing.as_f64() });
        }
        Ok(Self { samples, unwrapped, closing })
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn unwrapped_angles(&self) -> &[T] {
        &self.unwrapped
    }

    /// Total change of argument around the closed loop.
    pub fn total_angle(&self) -> T {
        *self.unwrapped.last().unwrap() - self.unwrapped[0] + self.closing
    }
}

/// Number of times the loop winds around the origin.
pub fn winding_number<T: Real>(track: &PhaseTrack<T>) -> i64 {
    let turns = track.total_angle() / T::TAU();
    turns.round().to_i64().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn loop_of(n: usize, f: impl Fn(f64) -> Complex<f64>) -> Vec<Complex<f64>> {
        (0..n).map(|j| f(TAU * j as f64 / n as f64)).collect()
    }

    #[test]
    fn constant_loop_has_zero_winding() {
        let t = PhaseTrack::new(vec![Complex::new(2.0, 1.0); 10]).unwrap();
        assert_eq!(winding_number(&t), 0);
    }

    #[test]
    fn canonical_generator_winds_once() {
        let t = PhaseTrack::new(loop_of(64, |p| Complex::from_polar(1.0, p))).unwrap();
        assert_eq!(winding_number(&t), 1);
        let turns = t.total_angle() / TAU;
        assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn positive_modulus_perturbation_keeps_winding() {
        let t = PhaseTrack::new(loop_of(64, |p| Complex::from_polar(1.0 + 0.2 * p.cos(), 3.0 * p))).unwrap();
        assert_eq!(winding_number(&t), 3);
    }

    #[test]
    fn coarse_sampling_is_rejected() {
        let err = PhaseTrack::new(loop_of(8, |p| Complex::from_polar(1.0, 3.0 * p))).unwrap_err();
        assert!(matches!(err, MaslovError::NeedRefinement { .. }));
    }

    #[test]
    fn vanishing_sample_is_rejected() {
        let mut s = loop_of(16, |p| Complex::from_polar(1.0, p));
        s[5] = Complex::new(0.0, 0.0);
        assert_eq!(PhaseTrack::new(s).unwrap_err(), MaslovError::ZeroSample { index: 5 });
    }

    #[test]
    fn single_precision_track() {
        let s: Vec<Complex<f32>> = (0..32).map(|j| Complex::from_polar(1.0f32, -2.0 * std::f32::consts::TAU * j as f32 / 32.0)).collect();
        assert_eq!(winding_number(&PhaseTrack::new(s).unwrap()), -2);
    }

    proptest! {
        #[test]
        fn winding_is_additive_and_odd(m1 in -4i64..=4, m2 in -4i64..=4, a in 0.0f64..0.5, b in 0.0f64..TAU) {
            let n = 128;
            let s1 = loop_of(n, |p| Complex::from_polar(1.0 + a * (p + b).sin(), m1 as f64 * p + b));
            let s2 = loop_of(n, |p| Complex::from_polar(2.0, m2 as f64 * p) + Complex::new(a * p.cos(), 0.0));
            let w1 = winding_number(&PhaseTrack::new(s1.clone()).unwrap());
            let w2 = winding_number(&PhaseTrack::new(s2.clone()).unwrap());
            let prod: Vec<_> = s1.iter().zip(&s2).map(|(x, y)| x * y).collect();
            prop_assert_eq!(winding_number(&PhaseTrack::new(prod).unwrap()), w1 + w2);
            let conj: Vec<_> = s1.iter().map(|z| z.conj()).collect();
            prop_assert_eq!(winding_number(&PhaseTrack::new(conj).unwrap()), -w1);
            let scaled: Vec<_> = s1.iter().enumerate().map(|(j, z)| z * (1.5 + (j as f64).sin())).collect();
            prop_assert_eq!(winding_number(&PhaseTrack::new(scaled).unwrap()), w1);
            prop_assert_eq!(w1, m1);
        }
    }
}
