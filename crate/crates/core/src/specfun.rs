//! Gamma function and the Gauss hypergeometric function on the real
//! domain the closed-form trace expressions need (2F1 at nonpositive
//! argument).

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments away from the nonpositive integers,
/// via the Lanczos approximation with reflection for x < 1/2.
pub fn gamma_fn(x: f64) -> f64 {
    if x < 0.5 {
        if x == x.floor() {
            return f64::NAN;
        }
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_fn(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + k as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Gauss hypergeometric function 2F1(a, b; c; z) for real parameters and
/// z <= 0 (plus a margin of the convergent disc, z < 1).
///
/// For z in (-1, 1) the defining series is summed directly; for z <= -1 the
/// Pfaff transformation maps the argument into [1/2, 1) first.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if c <= 0.0 && c == c.floor() {
        return Err(Error::Domain(format!(
            "2F1 undefined at nonpositive integer c = {c}"
        )));
    }
    if z >= 1.0 {
        return Err(Error::Domain(format!("2F1 argument out of range: z = {z}")));
    }
    if z > -1.0 {
        hyp2f1_series(a, b, c, z)
    } else {
        // Pfaff: 2F1(a,b;c;z) = (1-z)^{-a} 2F1(a, c-b; c; z/(z-1)).
        let w = z / (z - 1.0);
        Ok((1.0 - z).powf(-a) * hyp2f1_series(a, c - b, c, w)?)
    }
}

fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 0..200_000u64 {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1.0) {
            return Ok(sum);
        }
    }
    Err(Error::Precision(format!(
        "2F1 series did not converge for ({a}, {b}; {c}; {z})"
    )))
}
