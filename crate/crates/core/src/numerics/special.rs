//! Riccati-Bessel functions and orthonormal spherical harmonics.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::NumericsError;

/// Riccati-Bessel function `ĵ_l(x) = x j_l(x)`, with `ĵ_0(x) = sin x`.
///
/// Upward recurrence is used for `x > l`, where it is stable; otherwise the
/// values are built by downward (Miller) recurrence and normalised against
/// `ĵ_0` or `ĵ_1`, whichever is larger in magnitude.
pub fn riccati_bessel_j(l: u32, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let j0 = x.sin();
    if l == 0 {
        return j0;
    }
    let j1 = x.sin() / x - x.cos();
    if l == 1 {
        return j1;
    }

    if x.abs() > l as f64 {
        let (mut prev, mut cur) = (j0, j1);
        for n in 1..l {
            let next = (2 * n + 1) as f64 / x * cur - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }

    let start = l + 20 + (x.abs().max(l as f64) * 2.0).sqrt().ceil() as u32 * 4;
    let (mut upper, mut cur) = (0.0f64, 1e-300f64);
    let mut at_l = 0.0;
    let mut at_1 = 0.0;
    let mut n = start;
    while n > 0 {
        // ĵ_{n-1} = (2n+1)/x ĵ_n − ĵ_{n+1}
        let lower = (2 * n + 1) as f64 / x * cur - upper;
        upper = cur;
        cur = lower;
        n -= 1;
        if n == l {
            at_l = cur;
        }
        if n == 1 {
            at_1 = cur;
        }
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            upper *= s;
            at_l *= s;
            at_1 *= s;
        }
    }
    // `cur` now holds the unnormalised ĵ_0
    if j0.abs() >= j1.abs() {
        at_l * (j0 / cur)
    } else {
        at_l * (j1 / at_1)
    }
}

/// Orthonormal spherical harmonic `Y_l^m(θ, φ)` with the Condon-Shortley
/// phase, `∫ |Y_l^m|² dΩ = 1`.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64, NumericsError> {
    let abs_m = m.unsigned_abs();
    if abs_m > l {
        return Err(NumericsError::InvalidQuantumNumbers { l, m });
    }
    let x = theta.cos();
    let plm = normalized_legendre(l, abs_m, x);
    let y = Complex64::from_polar(plm, abs_m as f64 * phi);
    if m < 0 {
        let sign = if abs_m % 2 == 0 { 1.0 } else { -1.0 };
        Ok(y.conj() * sign)
    } else {
        Ok(y)
    }
}

/// `sqrt((2l+1)/4π (l−m)!/(l+m)!) P_l^m(x)` for `m ≥ 0`, including the
/// Condon-Shortley phase, computed by the normalised recurrence in `l`.
fn normalized_legendre(l: u32, m: u32, x: f64) -> f64 {
    let s = (1.0 - x * x).max(0.0).sqrt();
    // P̄_m^m
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for k in 1..=m {
        pmm *= -((2 * k + 1) as f64 / (2 * k) as f64).sqrt() * s;
    }
    if l == m {
        return pmm;
    }
    // P̄_{m+1}^m
    let mut pm1 = x * ((2 * m + 3) as f64).sqrt() * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut prev = pmm;
    for n in (m + 2)..=l {
        let n_f = n as f64;
        let m_f = m as f64;
        let a = ((4.0 * n_f * n_f - 1.0) / (n_f * n_f - m_f * m_f)).sqrt();
        let b = (((n_f - 1.0).powi(2) - m_f * m_f) / (4.0 * (n_f - 1.0).powi(2) - 1.0)).sqrt();
        let next = a * (x * pm1 - b * prev);
        prev = pm1;
        pm1 = next;
    }
    pm1
}
