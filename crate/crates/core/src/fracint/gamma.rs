//! The Gamma function and fractional orders.

use serde::{Deserialize, Serialize};

use crate::error::{FifError, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos(x: f64) -> f64 {
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * lanczos(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// `Γ(x)` for `x > 0`.
pub fn gamma_eval(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(FifError::Domain(format!("Gamma is evaluated for x > 0 only, got {x}")));
    }
    if x == x.floor() && x <= 171.0 {
        return Ok((1..x as u64).map(|k| k as f64).product());
    }
    Ok(lanczos(x))
}

/// Order `β > 0` of a Riemann–Liouville integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FracOrder {
    beta: f64,
    gamma: f64,
}

impl FracOrder {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(FifError::Domain(format!("fractional order must be positive, got {beta}")));
        }
        Ok(Self {
            beta,
            gamma: gamma_eval(beta)?,
        })
    }

    pub fn value(&self) -> f64 {
        self.beta
    }

    /// `Γ(β)`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl TryFrom<f64> for FracOrder {
    type Error = FifError;
    fn try_from(beta: f64) -> Result<Self> {
        Self::new(beta)
    }
}

impl From<FracOrder> for f64 {
    fn from(b: FracOrder) -> f64 {
        b.beta
    }
}
