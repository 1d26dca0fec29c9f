//! Periodic trapezoidal quadrature and deterministic summation.

use num_complex::Complex64;
use std::f64::consts::TAU;

pub const DEFAULT_POINTS: usize = 64;

/// Trapezoidal rule on one period `[base, base + 2π)` per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    pub points: usize,
    pub base: Vec<f64>,
}

impl Quadrature {
    pub fn new(points: usize, base: Vec<f64>) -> Self {
        Quadrature { points, base }
    }

    pub fn standard(n: usize) -> Self {
        Quadrature { points: DEFAULT_POINTS, base: vec![0.0; n] }
    }

    pub fn with_points(n: usize, points: usize) -> Self {
        Quadrature { points, base: vec![0.0; n] }
    }

    pub fn nodes(&self, axis: usize) -> Vec<f64> {
        let h = TAU / self.points as f64;
        (0..self.points).map(|i| self.base[axis] + h * i as f64).collect()
    }

    pub fn weight(&self) -> f64 {
        TAU / self.points as f64
    }
}

const LEAF: usize = 32;

/// Pairwise sum with a fixed tree, so the result does not depend on threading.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    if values.len() <= LEAF {
        return values.iter().fold(Complex64::new(0.0, 0.0), |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_real(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_real(&values[..mid]) + pairwise_sum_real(&values[mid..])
}
