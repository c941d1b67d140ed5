//! Roots of the Moran equation `Σ ρ_k^s = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{FifError, Result};

pub const DEFAULT_MORAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoranRoot {
    pub s: f64,
    /// `|Σ ρ_k^s - 1|` at the returned root.
    pub residual: f64,
    pub iterations: usize,
}

fn moran_sum(ratios: &[f64], s: f64) -> f64 {
    ratios.iter().map(|r| r.powf(s)).sum()
}

/// Bisection on the strictly decreasing map `s ↦ Σ ρ_k^s - 1`.
///
/// The bracket starts at `[0, 1]` and its upper end doubles until the sum
/// falls below one. Bisection continues until the bracket collapses to
/// adjacent floats, so the residual is usually far below `tol`.
pub fn moran_solve(ratios: &[f64], tol: f64) -> Result<MoranRoot> {
    if ratios.is_empty() {
        return Err(FifError::Domain("Moran equation needs at least one ratio".into()));
    }
    if let Some(r) = ratios.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
        return Err(FifError::Domain(format!("contraction ratio {r} not in (0, 1)")));
    }
    if !(tol > 0.0) {
        return Err(FifError::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if ratios.len() == 1 {
        return Ok(MoranRoot {
            s: 0.0,
            residual: 0.0,
            iterations: 0,
        });
    }
    let f = |s: f64| moran_sum(ratios, s) - 1.0;
    let mut lo = 0.0;
    let mut hi: f64 = 1.0;
    let mut iterations = 0;
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        iterations += 1;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || iterations > 2000 {
            break;
        }
        iterations += 1;
        let v = f(mid);
        if v == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = (f(lo).abs(), f(hi).abs());
    let (s, residual) = if flo <= fhi { (lo, flo) } else { (hi, fhi) };
    if residual > tol {
        log::debug!("Moran root {s} has residual {residual:e} above tol {tol:e}");
    }
    Ok(MoranRoot {
        s,
        residual,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn closed_forms() {
        let r = moran_solve(&[0.5, 0.5], DEFAULT_MORAN_TOL).unwrap();
        assert!((r.s - 1.0).abs() < 1e-10);
        let r = moran_solve(&[0.5, 0.5, 0.5], DEFAULT_MORAN_TOL).unwrap();
        assert!((r.s - 3f64.ln() / 2f64.ln()).abs() < 1e-10);
        assert!(r.residual <= DEFAULT_MORAN_TOL);
    }

    #[test]
    fn golden_ratio_case() {
        // u = 2^{-s} solves u + u^2 = 1, so u = (√5 - 1)/2
        let u = (5f64.sqrt() - 1.0) / 2.0;
        let want = -u.log2();
        assert!((want - 0.69424).abs() < 1e-5);
        let r = moran_solve(&[0.5, 0.25], DEFAULT_MORAN_TOL).unwrap();
        assert!((r.s - want).abs() < 1e-10);
    }

    #[test]
    fn large_root_needs_bracket_growth() {
        let r = moran_solve(&[0.99, 0.99, 0.99], DEFAULT_MORAN_TOL).unwrap();
        let want = 3f64.ln() / (1.0 / 0.99f64).ln();
        assert!(want > 100.0);
        assert!((r.s - want).abs() < 1e-9 * want);
    }

    #[test]
    fn single_ratio_root_is_zero() {
        assert_eq!(moran_solve(&[0.3], 1e-12).unwrap().s, 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(moran_solve(&[], 1e-12).is_err());
        assert!(moran_solve(&[0.0, 0.5], 1e-12).is_err());
        assert!(moran_solve(&[1.0, 0.5], 1e-12).is_err());
        assert!(moran_solve(&[0.5, 0.5], 0.0).is_err());
    }

    proptest! {
        #[test]
        fn equal_ratios_closed_form(m in 2usize..12, rho in 0.01f64..0.99) {
            let r = moran_solve(&vec![rho; m], DEFAULT_MORAN_TOL).unwrap();
            let want = (m as f64).ln() / (1.0 / rho).ln();
            prop_assert!((r.s - want).abs() <= 1e-10 * want.max(1.0));
        }
    }
}
