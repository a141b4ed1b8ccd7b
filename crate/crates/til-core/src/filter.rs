//! Discrete-time rational filters in `z^{-1}` form, bilinear (Tustin)
//! discretization of continuous prototypes, and the streaming realization
//! used by the reference generator, the sensor noise model and VRFT.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Rational discrete-time transfer function
/// `H(z) = (b0 + b1 z^-1 + ...) / (a0 + a1 z^-1 + ...)`, `a0 != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tf {
    pub b: Vec<f64>,
    pub a: Vec<f64>,
}

impl Tf {
    pub fn new(b: Vec<f64>, a: Vec<f64>) -> Self {
        assert!(!a.is_empty() && a[0] != 0.0, "denominator must be causal (a0 != 0)");
        assert!(!b.is_empty());
        Tf { b, a }
    }

    /// Unit pass-through.
    pub fn unity() -> Self {
        Tf { b: vec![1.0], a: vec![1.0] }
    }

    /// One-sample delay `z^{-1}`.
    pub fn delay(samples: usize) -> Self {
        let mut b = vec![0.0; samples + 1];
        b[samples] = 1.0;
        Tf { b, a: vec![1.0] }
    }

    /// Series interconnection (polynomial product of numerators/denominators).
    pub fn series(&self, other: &Tf) -> Tf {
        Tf { b: poly_mul(&self.b, &other.b), a: poly_mul(&self.a, &other.a) }
    }

    pub fn dc_gain(&self) -> f64 {
        let num: f64 = self.b.iter().sum();
        let den: f64 = self.a.iter().sum();
        num / den
    }

    /// Magnitude of the frequency response at `omega = 2*pi*f*T_s` [rad/sample].
    pub fn magnitude_at(&self, omega: f64) -> f64 {
        let (nr, ni) = poly_eval_unit_circle(&self.b, omega);
        let (dr, di) = poly_eval_unit_circle(&self.a, omega);
        ((nr * nr + ni * ni) / (dr * dr + di * di)).sqrt()
    }

    /// All denominator roots strictly inside the unit circle
    /// (Schur-Cohn reflection-coefficient test).
    pub fn is_stable(&self) -> bool {
        schur_cohn_stable(&self.a, 1e-9)
    }

    /// Batch filtering from zero initial conditions.
    pub fn filter(&self, x: &[f64]) -> Vec<f64> {
        let mut st = FilterState::new(self.clone());
        x.iter().map(|&xi| st.step(xi)).collect()
    }

    /// Sum of squared impulse-response samples: the white-noise variance gain
    /// of the filter. Truncated once the tail contribution is negligible.
    pub fn noise_energy(&self) -> f64 {
        let mut st = FilterState::new(self.clone());
        let mut e = 0.0;
        let mut h = st.step(1.0);
        e += h * h;
        for _ in 0..200_000 {
            h = st.step(0.0);
            let h2 = h * h;
            e += h2;
            if h2 < 1e-18 * e.max(1e-300) {
                break;
            }
        }
        e
    }
}

/// Streaming Direct Form II transposed realization.
#[derive(Debug, Clone)]
pub struct FilterState {
    b: Vec<f64>,
    a: Vec<f64>,
    z: Vec<f64>,
}

impl FilterState {
    pub fn new(tf: Tf) -> Self {
        let a0 = tf.a[0];
        let n = tf.a.len().max(tf.b.len());
        let mut b = vec![0.0; n];
        let mut a = vec![0.0; n];
        for (i, &bi) in tf.b.iter().enumerate() {
            b[i] = bi / a0;
        }
        for (i, &ai) in tf.a.iter().enumerate() {
            a[i] = ai / a0;
        }
        FilterState { z: vec![0.0; n - 1], b, a }
    }

    pub fn reset(&mut self) {
        for z in &mut self.z {
            *z = 0.0;
        }
    }

    pub fn step(&mut self, x: f64) -> f64 {
        let y = self.b[0] * x + self.z.first().copied().unwrap_or(0.0);
        let n = self.z.len();
        for i in 0..n {
            let znext = if i + 1 < n { self.z[i + 1] } else { 0.0 };
            self.z[i] = znext + self.b[i + 1] * x - self.a[i + 1] * y;
        }
        y
    }
}

/// Polynomial product (coefficient convolution).
pub fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, &pi) in p.iter().enumerate() {
        for (j, &qj) in q.iter().enumerate() {
            out[i + j] += pi * qj;
        }
    }
    out
}

fn poly_eval_unit_circle(p: &[f64], omega: f64) -> (f64, f64) {
    // Evaluate sum p_k z^{-k} at z = e^{j omega}.
    let mut re = 0.0;
    let mut im = 0.0;
    for (k, &pk) in p.iter().enumerate() {
        let phi = -(k as f64) * omega;
        re += pk * phi.cos();
        im += pk * phi.sin();
    }
    (re, im)
}

/// Schur-Cohn stability of the polynomial `a0 + a1 z^-1 + ... + an z^-n`
/// (roots of `z^n a(z^-1)` inside the unit circle). `margin` shrinks the
/// admissible reflection coefficients away from 1.
pub fn schur_cohn_stable(a: &[f64], margin: f64) -> bool {
    let mut c: Vec<f64> = a.to_vec();
    // normalize and trim trailing zeros
    while c.len() > 1 && c.last().is_some_and(|&x| x == 0.0) {
        c.pop();
    }
    let a0 = c[0];
    if a0 == 0.0 {
        return false;
    }
    for x in &mut c {
        *x /= a0;
    }
    while c.len() > 1 {
        let k = *c.last().unwrap();
        if k.abs() >= 1.0 - margin {
            return false;
        }
        let n = c.len() - 1;
        let mut next = Vec::with_capacity(n);
        let denom = 1.0 - k * k;
        for i in 0..n {
            next.push((c[i] - k * c[n - i]) / denom);
        }
        c = next;
    }
    true
}

/// Bilinear transform of a continuous prototype
/// `(num_s, den_s)` (ascending powers of `s`) with sample time `ts`.
/// `prewarp_hz` pins the frequency mapping at one frequency.
pub fn tustin(num_s: &[f64], den_s: &[f64], ts: f64, prewarp_hz: Option<f64>) -> Tf {
    let k = match prewarp_hz {
        Some(f) => {
            let w = 2.0 * core::f64::consts::PI * f;
            w / (w * ts / 2.0).tan()
        }
        None => 2.0 / ts,
    };
    let n = num_s.len().max(den_s.len()) - 1;
    let b = bilinear_poly(num_s, n, k);
    let a = bilinear_poly(den_s, n, k);
    Tf::new(b, a)
}

/// Substitute `s = k (1 - z^-1)/(1 + z^-1)` into `sum c_i s^i`, clearing the
/// denominator `(1 + z^-1)^n`.
fn bilinear_poly(c: &[f64], n: usize, k: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for (i, &ci) in c.iter().enumerate() {
        if ci == 0.0 {
            continue;
        }
        // c_i k^i (1 - z^-1)^i (1 + z^-1)^(n-i)
        let mut term = vec![ci * k.powi(i as i32)];
        for _ in 0..i {
            term = poly_mul(&term, &[1.0, -1.0]);
        }
        for _ in 0..(n - i) {
            term = poly_mul(&term, &[1.0, 1.0]);
        }
        for (o, t) in out.iter_mut().zip(&term) {
            *o += t;
        }
    }
    out
}

/// First-order low-pass `w/(s+w)` at `cutoff_hz`, Tustin discretized.
pub fn lowpass1(cutoff_hz: f64, ts: f64, prewarp: bool) -> Tf {
    let w = 2.0 * core::f64::consts::PI * cutoff_hz;
    tustin(&[w], &[w, 1.0], ts, prewarp.then_some(cutoff_hz))
}

/// Two coincident poles with unit DC gain, `w^2/(s+w)^2` at `cutoff_hz`.
pub fn lowpass2(cutoff_hz: f64, ts: f64, prewarp: bool) -> Tf {
    let w = 2.0 * core::f64::consts::PI * cutoff_hz;
    tustin(&[w * w], &[w * w, 2.0 * w, 1.0], ts, prewarp.then_some(cutoff_hz))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tustin_preserves_dc_gain() {
        let tf = lowpass1(3.5, 0.01, false);
        assert!((tf.dc_gain() - 1.0).abs() < 1e-12);
        let tf2 = lowpass2(6.3, 0.01, true);
        assert!((tf2.dc_gain() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lowpass_poles_inside_unit_circle() {
        assert!(lowpass1(3.5, 0.01, false).is_stable());
        assert!(lowpass2(6.3, 0.01, true).is_stable());
        // z - 1 pole (integrator) is not strictly stable
        let integ = Tf::new(vec![0.005, 0.005], vec![1.0, -1.0]);
        assert!(!integ.is_stable());
    }

    #[test]
    fn streaming_matches_batch_convolution() {
        let tf = Tf::new(vec![0.5, 0.25], vec![1.0, -0.3, 0.1]);
        let x = [1.0, -0.5, 2.0, 0.0, 0.3, -1.0];
        let y = tf.filter(&x);
        // direct difference equation
        let mut yref = vec![0.0; x.len()];
        for k in 0..x.len() {
            let mut acc = 0.5 * x[k];
            if k >= 1 {
                acc += 0.25 * x[k - 1] + 0.3 * yref[k - 1];
            }
            if k >= 2 {
                acc -= 0.1 * yref[k - 2];
            }
            yref[k] = acc;
        }
        for (a, b) in y.iter().zip(&yref) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_input_converges_to_dc_gain() {
        let tf = lowpass2(6.3, 0.01, true);
        let mut st = FilterState::new(tf);
        let mut y = 0.0;
        for _ in 0..2000 {
            y = st.step(2.5);
        }
        assert!((y - 2.5).abs() < 1e-9);
    }

    #[test]
    fn noise_energy_matches_geometric_series() {
        // y_k = p y_{k-1} + x_k has h_k = p^k, energy 1/(1-p^2).
        let p: f64 = 0.8;
        let tf = Tf::new(vec![1.0], vec![1.0, -p]);
        let e = tf.noise_energy();
        assert!((e - 1.0 / (1.0 - p * p)).abs() < 1e-9);
    }
}
