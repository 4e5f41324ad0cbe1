//! Gauss–Legendre quadrature and orthonormal associated Legendre functions.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes in descending order. Exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, p_prev) = legendre_pair(n, x);
            dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (p, p_prev) = legendre_pair(n, x);
        if p != 0.0 {
            dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// `(P_n(x), P_{n-1}(x))` by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Values of the sphere-normalized associated Legendre functions
/// `P̃_ℓ^m(cos θ)` for `0 <= m <= ℓ <= lmax` at one point, with the
/// Condon–Shortley phase, so that `Y_ℓ^m(θ, φ) = P̃_ℓ^m(cos θ) e^{imφ}` is
/// orthonormal for the surface measure.
pub struct LegendreTable {
    lmax: usize,
    values: Vec<f64>,
}

impl LegendreTable {
    pub fn new(lmax: usize, x: f64) -> Self {
        let mut values = vec![0.0; (lmax + 1) * (lmax + 2) / 2];
        let s = (1.0 - x * x).max(0.0).sqrt();
        let mut pmm = 1.0 / (4.0 * PI).sqrt();
        for m in 0..=lmax {
            if m > 0 {
                pmm *= -((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
            }
            values[index(m, m)] = pmm;
            if m == lmax {
                break;
            }
            let mut p_prev = pmm;
            let mut p = ((2 * m + 3) as f64).sqrt() * x * pmm;
            values[index(m + 1, m)] = p;
            for l in m + 2..=lmax {
                let (lf, mf) = (l as f64, m as f64);
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0) * (lf - 1.0) - mf * mf)
                    / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                    .sqrt();
                let next = a * (x * p - b * p_prev);
                p_prev = p;
                p = next;
                values[index(l, m)] = p;
            }
        }
        Self { lmax, values }
    }

    /// `P̃_ℓ^m` for any `|m| <= ℓ`, using `P̃_ℓ^{-m} = (-1)^m P̃_ℓ^m`.
    pub fn get(&self, l: u32, m: i32) -> f64 {
        let l = l as usize;
        debug_assert!(l <= self.lmax);
        let am = m.unsigned_abs() as usize;
        let v = self.values[index(l, am)];
        if m < 0 && am % 2 == 1 {
            -v
        } else {
            v
        }
    }
}

fn index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1usize, 2, 5, 17, 64, 129] {
            let (x, w) = gauss_legendre(n);
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n={n}");
            for deg in 0..2 * n {
                let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((approx - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn closed_forms() {
        let x: f64 = 0.3;
        let s = (1.0 - x * x).sqrt();
        let t = LegendreTable::new(3, x);
        let c = 1.0 / (4.0 * PI);
        assert!((t.get(0, 0) - c.sqrt()).abs() < 1e-15);
        assert!((t.get(1, 0) - (3.0 * c).sqrt() * x).abs() < 1e-15);
        assert!((t.get(1, 1) + (3.0 / (8.0 * PI)).sqrt() * s).abs() < 1e-15);
        assert!((t.get(1, -1) - (3.0 / (8.0 * PI)).sqrt() * s).abs() < 1e-15);
        let y20 = (5.0 * c).sqrt() * 0.5 * (3.0 * x * x - 1.0);
        assert!((t.get(2, 0) - y20).abs() < 1e-15);
        let y22 = 0.25 * (15.0 / (2.0 * PI)).sqrt() * s * s;
        assert!((t.get(2, 2) - y22).abs() < 1e-15);
        let y30 = (7.0 * c).sqrt() * 0.5 * (5.0 * x.powi(3) - 3.0 * x);
        assert!((t.get(3, 0) - y30).abs() < 1e-15);
    }

    #[test]
    fn orthonormal_in_cos_theta() {
        // ∫ P̃_ℓ^m P̃_ℓ'^m dx · 2π = δ_ℓℓ'
        let lmax = 40;
        let (xs, ws) = gauss_legendre(lmax + 1);
        let tables: Vec<_> = xs.iter().map(|&x| LegendreTable::new(lmax, x)).collect();
        for m in [0i32, 1, 7, 40] {
            for l1 in m as u32..=lmax as u32 {
                for l2 in [m as u32, l1, lmax as u32] {
                    if l2 < m as u32 {
                        continue;
                    }
                    let ip: f64 = tables
                        .iter()
                        .zip(&ws)
                        .map(|(t, w)| w * t.get(l1, m) * t.get(l2, m))
                        .sum::<f64>()
                        * 2.0
                        * PI;
                    let expect = if l1 == l2 { 1.0 } else { 0.0 };
                    assert!((ip - expect).abs() < 1e-12, "m={m} l1={l1} l2={l2} ip={ip}");
                }
            }
        }
    }
}
