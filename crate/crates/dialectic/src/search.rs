//! Box search domains and pole populations for the dialectical optimizer.

use rand::Rng;

use crate::error::{Error, Result};
use crate::real::{distance, Real};

/// Axis-aligned box domain `[r_1,s_1] x ... x [r_n,s_n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBox<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Real> SearchBox<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::DimensionMismatch(format!(
                "box bounds must be non-empty and equal-length ({} vs {})",
                lower.len(),
                upper.len()
            )));
        }
        if lower.iter().zip(&upper).any(|(&r, &s)| !(s > r)) {
            return Err(Error::InvalidConfig(
                "box requires upper > lower in every component".into(),
            ));
        }
        Ok(Self { lower, upper })
    }

    /// The unit box `[0,1]^n`.
    pub fn unit(dim: usize) -> Self {
        Self::new(vec![T::zero(); dim], vec![T::one(); dim]).expect("unit box is valid")
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    /// Euclidean length of the main diagonal `s - r`.
    pub fn diameter(&self) -> T {
        distance(&self.upper, &self.lower)
    }

    /// Component-wise uniform sample.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&r, &s)| T::sample_uniform(rng, r, s))
            .collect()
    }

    /// Absolute antithesis: the box reflection `s_j - w_j + r_j`.
    pub fn antithesis(&self, w: &[T]) -> Vec<T> {
        w.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&wj, (&r, &s))| s - wj + r)
            .collect()
    }

    /// Clamp a point into the box, component-wise.
    pub fn clamp(&self, w: &mut [T]) {
        for (wj, (&r, &s)) in w.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            if *wj < r {
                *wj = r;
            } else if *wj > s {
                *wj = s;
            }
        }
    }

    pub fn contains(&self, w: &[T]) -> bool {
        w.len() == self.dim()
            && w.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&wj, (&r, &s))| wj >= r && wj <= s)
    }
}

/// A candidate solution: weight vector plus its cached objective value.
///
/// The cached value is refreshed by the optimizer whenever the weights move.
#[derive(Debug, Clone, PartialEq)]
pub struct Pole<T> {
    pub weights: Vec<T>,
    pub objective: T,
}

impl<T: Real> Pole<T> {
    pub fn new(weights: Vec<T>, objective: T) -> Self {
        Self { weights, objective }
    }
}

/// The dialectical system: the pole population at some instant.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet<T> {
    pub poles: Vec<Pole<T>>,
    pub phase_index: usize,
    pub iteration_index: usize,
}

impl<T: Real> PoleSet<T> {
    pub fn new(poles: Vec<Pole<T>>) -> Result<Self> {
        if poles.is_empty() {
            return Err(Error::DegenerateConfiguration(
                "a pole set must contain at least one pole".into(),
            ));
        }
        Ok(Self {
            poles,
            phase_index: 0,
            iteration_index: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn objectives(&self) -> impl Iterator<Item = T> + '_ {
        self.poles.iter().map(|p| p.objective)
    }
}

/// Normalized contradiction between two poles: their Euclidean distance
/// divided by the box diameter, so the value always lies in `[0, 1]`.
pub fn contradiction<T: Real>(p: &[T], q: &[T], domain: &SearchBox<T>) -> T {
    distance(p, q) / domain.diameter()
}

/// Synthesis of a thesis-antithesis pair: the component-wise midpoint.
pub fn synthesis<T: Real>(p: &[T], q: &[T]) -> Vec<T> {
    let half = T::from_f64(0.5).unwrap();
    p.iter().zip(q).map(|(&a, &b)| (a + b) * half).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antithesis_examples() {
        let unit2 = SearchBox::<f64>::unit(2);
        // midpoint is a fixed point
        assert_eq!(unit2.antithesis(&[0.5, 0.5]), vec![0.5, 0.5]);
        let unit1 = SearchBox::<f64>::unit(1);
        assert_eq!(unit1.antithesis(&[0.2]), vec![0.8]);
    }

    #[test]
    fn contradiction_examples() {
        let unit2 = SearchBox::<f64>::unit(2);
        assert_eq!(contradiction(&[0.3, 0.3], &[0.3, 0.3], &unit2), 0.0);
        // opposite corners normalize to 1
        let c = contradiction(&[0.0, 0.0], &[1.0, 1.0], &unit2);
        assert!((c - 1.0).abs() < 1e-15);
        let c = contradiction(&[0.0, 0.0], &[0.3, 0.4], &unit2);
        assert!((c - 0.5 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn synthesis_is_midpoint() {
        assert_eq!(synthesis(&[0.0, 1.0], &[1.0, 0.0]), vec![0.5, 0.5]);
    }

    #[test]
    fn clamp_and_contains() {
        let b = SearchBox::new(vec![-1.0f64, 0.0], vec![1.0, 2.0]).unwrap();
        let mut w = vec![-3.0, 5.0];
        b.clamp(&mut w);
        assert_eq!(w, vec![-1.0, 2.0]);
        assert!(b.contains(&w));
        assert!(!b.contains(&[0.0, 2.1]));
    }

    #[test]
    fn rejects_inverted_bounds() {
        assert!(SearchBox::new(vec![1.0f64], vec![1.0]).is_err());
    }
}
