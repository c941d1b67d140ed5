//! Dimension statements for the graph of a fractional integral.

use serde::{Deserialize, Serialize};

use super::gamma::FracOrder;
use crate::dimension::SpacePredicateReport;
use crate::error::{FifError, Result};
use crate::fif::FifSystem;
use crate::measure::{entropy_dimension_bound, ProbabilityVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatementKind {
    /// Bounded-variation regime, `0 < β < 1`: the graph has dimension 1.
    BvGraph,
    /// Hölder regime with `β + σ ≤ 1`: each component graph has upper box
    /// dimension at most `2 - β - σ`.
    HolderComponents,
    /// Hölder regime with `β + σ > 1`: the integral is differentiable and
    /// its graph has dimension 1.
    SmoothGraph,
    /// Hölder regime with `β + σ > 1`: each component of the derivative has
    /// upper box dimension at most `3 - β - σ`.
    DerivativeComponents,
    /// `β ≥ 1`: the graph has dimension 1 without further hypotheses.
    RegularIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equals,
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statement {
    pub kind: StatementKind,
    pub relation: Relation,
    pub value: f64,
    /// Empirical check matching the statement.
    pub estimator: String,
    /// Slack allowed between estimate and value.
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FracDimReport {
    pub beta: f64,
    pub sigma: f64,
    pub statements: Vec<Statement>,
    /// `s_k = max(|a_k|, |a_k^β α_k|)`.
    pub ratios: Vec<f64>,
    pub probabilities: Vec<f64>,
    /// `Σ p_k log p_k / Σ p_k log s_k`, bounding the dimension of the
    /// invariant measure on the graph of the integral.
    pub entropy_bound: f64,
}

/// Collect the dimension statements whose hypotheses hold for `sys`.
pub fn fractional_dimension_report(
    sys: &FifSystem,
    beta: FracOrder,
    sigma: f64,
    predicates: &SpacePredicateReport,
    p: &ProbabilityVector,
) -> Result<FracDimReport> {
    if sigma != predicates.witnesses.sigma {
        return Err(FifError::Domain(format!(
            "predicates were evaluated at exponent {}, not {sigma}",
            predicates.witnesses.sigma
        )));
    }
    let b = beta.value();
    let mesh = "box_count_polyline on the rendered graph of the integral";
    let osc = "box_count_oscillation on each component of the integral";
    let mut statements = Vec::new();
    if b >= 1.0 {
        statements.push(Statement {
            kind: StatementKind::RegularIntegral,
            relation: Relation::Equals,
            value: 1.0,
            estimator: mesh.into(),
            tolerance: 0.1,
        });
    } else {
        if predicates.bv.holds {
            statements.push(Statement {
                kind: StatementKind::BvGraph,
                relation: Relation::Equals,
                value: 1.0,
                estimator: mesh.into(),
                tolerance: 0.1,
            });
        }
        if predicates.holder.holds && sigma < 1.0 {
            if b + sigma <= 1.0 {
                statements.push(Statement {
                    kind: StatementKind::HolderComponents,
                    relation: Relation::AtMost,
                    value: 2.0 - b - sigma,
                    estimator: osc.into(),
                    tolerance: 0.15,
                });
            } else {
                statements.push(Statement {
                    kind: StatementKind::SmoothGraph,
                    relation: Relation::Equals,
                    value: 1.0,
                    estimator: mesh.into(),
                    tolerance: 0.1,
                });
                statements.push(Statement {
                    kind: StatementKind::DerivativeComponents,
                    relation: Relation::AtMost,
                    value: 3.0 - b - sigma,
                    estimator: "box_count_oscillation on each component of the sampled derivative of the integral".into(),
                    tolerance: 0.15,
                });
            }
        }
    }
    let ratios: Vec<f64> = sys
        .branches()
        .iter()
        .map(|br| {
            let a = br.base.slope.abs();
            a.max((a.powf(b) * br.alpha).abs())
        })
        .collect();
    let entropy_bound = entropy_dimension_bound(p, &ratios)?;
    Ok(FracDimReport {
        beta: b,
        sigma,
        statements,
        ratios,
        probabilities: p.as_slice().to_vec(),
        entropy_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::space_predicates;
    use crate::fif::InterpolationData;

    fn tent(alphas: Vec<f64>) -> FifSystem {
        let d = InterpolationData::scalar(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        FifSystem::affine(d, alphas).unwrap()
    }

    fn kinds(r: &FracDimReport) -> Vec<StatementKind> {
        r.statements.iter().map(|s| s.kind).collect()
    }

    #[test]
    fn bv_regime_statement() {
        let sys = tent(vec![0.3, 0.3]);
        let pred = space_predicates(&sys, 0.5, 1.0).unwrap();
        let p = ProbabilityVector::uniform(2).unwrap();
        let r = fractional_dimension_report(&sys, FracOrder::new(0.5).unwrap(), 0.5, &pred, &p).unwrap();
        assert!(kinds(&r).contains(&StatementKind::BvGraph));
        assert!(r.entropy_bound > 0.0);
    }

    #[test]
    fn holder_regime_statements() {
        let sys = tent(vec![0.6, -0.6]);
        let pred = space_predicates(&sys, 0.3, 1.0).unwrap();
        assert!(pred.holder.holds && !pred.bv.holds);
        let p = ProbabilityVector::uniform(2).unwrap();
        let r = fractional_dimension_report(&sys, FracOrder::new(0.5).unwrap(), 0.3, &pred, &p).unwrap();
        assert_eq!(kinds(&r), vec![StatementKind::HolderComponents]);
        assert!((r.statements[0].value - 1.2).abs() < 1e-12);
        assert!((r.statements[0].value + r.statements[0].tolerance - 1.35).abs() < 1e-12);
        let r = fractional_dimension_report(&sys, FracOrder::new(0.8).unwrap(), 0.3, &pred, &p).unwrap();
        assert_eq!(
            kinds(&r),
            vec![StatementKind::SmoothGraph, StatementKind::DerivativeComponents]
        );
        assert!((r.statements[1].value - 1.9).abs() < 1e-12);
    }

    #[test]
    fn no_hypothesis_gives_no_statement() {
        let sys = tent(vec![0.9, 0.9]);
        let pred = space_predicates(&sys, 0.5, 1.0).unwrap();
        let p = ProbabilityVector::uniform(2).unwrap();
        let r = fractional_dimension_report(&sys, FracOrder::new(0.5).unwrap(), 0.5, &pred, &p).unwrap();
        assert!(r.statements.is_empty());
        assert!(fractional_dimension_report(&sys, FracOrder::new(0.5).unwrap(), 0.4, &pred, &p).is_err());
    }

    #[test]
    fn entropy_uses_derived_ratios() {
        let sys = tent(vec![0.9, -0.9]);
        let pred = space_predicates(&sys, 0.5, 1.0).unwrap();
        let p = ProbabilityVector::uniform(2).unwrap();
        let beta = 0.5;
        let r = fractional_dimension_report(&sys, FracOrder::new(beta).unwrap(), 0.5, &pred, &p).unwrap();
        let s = 0.9 * 0.5f64.powf(beta);
        assert!((r.ratios[0] - s).abs() < 1e-15);
        assert!((r.entropy_bound - 2f64.ln() / -s.ln()).abs() < 1e-12);
        let one = fractional_dimension_report(&sys, FracOrder::new(1.0).unwrap(), 0.5, &pred, &p).unwrap();
        assert_eq!(kinds(&one), vec![StatementKind::RegularIntegral]);
        assert_eq!(one.entropy_bound, 1.0);
    }
}
