//! Shared tuning-problem plumbing: the box-shaped search domain and the
//! unit-box scaling both optimizers work in (the gain components have
//! incommensurate units, so distances are always taken after scaling).

use alloc::vec::Vec;

/// Axis-aligned search box.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SearchBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(
            lo.iter().zip(&hi).all(|(a, b)| a.is_finite() && b.is_finite() && a < b),
            "degenerate search box"
        );
        SearchBox { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(xi, (lo, hi))| *xi >= lo - 1e-12 && *xi <= hi + 1e-12)
    }

    /// Map a point into `[0, 1]^d`.
    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(xi, (lo, hi))| (xi - lo) / (hi - lo))
            .collect()
    }

    /// Map a unit-box point back into the box.
    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(ui, (lo, hi))| lo + ui * (hi - lo))
            .collect()
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (xi, (lo, hi)) in x.iter_mut().zip(self.lo.iter().zip(&self.hi)) {
            *xi = xi.clamp(*lo, *hi);
        }
    }
}

/// Deterministic low-discrepancy mesh: Halton sequence in `[0, 1]^d`.
pub fn halton(index: usize, dim: usize) -> Vec<f64> {
    const PRIMES: [usize; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    assert!(dim <= PRIMES.len());
    (0..dim).map(|d| radical_inverse(index + 1, PRIMES[d])).collect()
}

fn radical_inverse(mut n: usize, base: usize) -> f64 {
    let mut inv = 0.0;
    let mut denom = 1.0;
    while n > 0 {
        denom *= base as f64;
        inv += (n % base) as f64 / denom;
        n /= base;
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_scaling_roundtrip() {
        let b = SearchBox::new(vec![0.01, 0.05, 0.0], vec![5.0, 10.0, 0.5]);
        let x = vec![1.0, 0.4, 0.3];
        let u = b.to_unit(&x);
        assert!(u.iter().all(|v| (0.0..=1.0).contains(v)));
        let back = b.from_unit(&u);
        for (a, c) in x.iter().zip(&back) {
            assert!((a - c).abs() < 1e-12);
        }
    }

    #[test]
    fn halton_is_in_unit_box_and_deterministic() {
        for i in 0..100 {
            let p = halton(i, 3);
            assert!(p.iter().all(|v| (0.0..1.0).contains(v)));
            assert_eq!(p, halton(i, 3));
        }
        // first few base-2 values
        assert_eq!(halton(0, 1)[0], 0.5);
        assert_eq!(halton(1, 1)[0], 0.25);
        assert_eq!(halton(2, 1)[0], 0.75);
    }
}
