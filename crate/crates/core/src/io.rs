//! JSON system specifications and artifact writers.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{FifError, Result};
use crate::fif::{
    weierstrass_forcings, FifSystem, ForcingFunction, InterpolationData, SampledGrid,
    WeierstrassShape,
};
use crate::fracint::{FracIntSystem, IdentityCheck};
use crate::measure::ProbabilityVector;

/// Forcing functions sampled on shared nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSpec {
    pub nodes: Vec<f64>,
    /// Indexed by branch, node, component.
    pub values: Vec<Vec<Vec<f64>>>,
}

impl SampledSpec {
    pub fn from_grids(grids: &[SampledGrid]) -> Result<Self> {
        let nodes = grids
            .first()
            .ok_or_else(|| FifError::InvalidData("no forcing grids".into()))?
            .nodes()
            .to_vec();
        if grids.iter().any(|g| g.nodes() != nodes.as_slice()) {
            return Err(FifError::GridMismatch("forcing grids use different nodes".into()));
        }
        let values = grids
            .iter()
            .map(|g| (0..nodes.len()).map(|j| g.row(j).to_vec()).collect())
            .collect();
        Ok(Self { nodes, values })
    }

    fn to_forcings(&self, dim: usize) -> Result<Vec<ForcingFunction>> {
        self.values
            .iter()
            .map(|rows| {
                if rows.len() != self.nodes.len() {
                    return Err(FifError::DimensionMismatch {
                        expected: self.nodes.len(),
                        got: rows.len(),
                    });
                }
                if let Some(r) = rows.iter().find(|r| r.len() != dim) {
                    return Err(FifError::DimensionMismatch {
                        expected: dim,
                        got: r.len(),
                    });
                }
                Ok(ForcingFunction::SampledGrid(SampledGrid::new(
                    self.nodes.clone(),
                    rows.concat(),
                    dim,
                )?))
            })
            .collect()
    }
}

/// How the forcing functions `q_k` are given.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ForcingSpec {
    /// Affine `q_k` fixed by the endpoint conditions.
    #[default]
    Affine,
    /// Coefficients indexed by branch, component, ascending power of `t`.
    Polynomial { coefficients: Vec<Vec<Vec<f64>>> },
    Sampled(SampledSpec),
    /// Endpoint-corrected lacunary cosine series.
    Weierstrass(WeierstrassShape),
}

/// A FIF system as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub knots: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub forcing: ForcingSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_end: Option<f64>,
}

impl SystemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Assemble the system. Scaling factors are not range-checked here so
    /// that invalid systems can still be validated and reported.
    pub fn build(&self) -> Result<FifSystem> {
        let data = InterpolationData::new(self.knots.clone(), self.values.clone())?;
        let sys = match &self.forcing {
            ForcingSpec::Affine => FifSystem::affine_unchecked(data, self.alphas.clone())?,
            ForcingSpec::Polynomial { coefficients } => {
                let forcings = coefficients
                    .iter()
                    .map(|c| ForcingFunction::polynomial(c.clone()))
                    .collect::<Result<Vec<_>>>()?;
                FifSystem::new(data, self.alphas.clone(), forcings)?
            }
            ForcingSpec::Sampled(s) => {
                let forcings = s.to_forcings(data.dim())?;
                FifSystem::new(data, self.alphas.clone(), forcings)?
            }
            ForcingSpec::Weierstrass(shape) => {
                let forcings = weierstrass_forcings(&data, &self.alphas, shape)?;
                FifSystem::new(data, self.alphas.clone(), forcings)?
            }
        };
        Ok(match self.tau_end {
            Some(t) if t > 0.0 => sys.with_tau_end(t),
            Some(t) => return Err(FifError::InvalidData(format!("tau_end must be positive, got {t}"))),
            None => sys,
        })
    }

    /// The stored probability vector, or uniform weights.
    pub fn probability_vector(&self) -> Result<ProbabilityVector> {
        match &self.probabilities {
            Some(p) => ProbabilityVector::new(p.clone()),
            None => ProbabilityVector::uniform(self.alphas.len()),
        }
    }
}

/// The derived system of a fractional integral, as written to disk. The
/// embedded system spec carries endpoint-corrected forcings so it can be
/// rendered directly; `Q` holds the uncorrected samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FracIntJson {
    #[serde(flatten)]
    pub system: SystemSpec,
    pub beta: f64,
    pub derived_alphas: Vec<f64>,
    pub base_alphas: Vec<f64>,
    #[serde(rename = "Q")]
    pub q: SampledSpec,
    pub endpoint_defects: Vec<[f64; 2]>,
    /// Every endpoint defect is within the identity budget.
    pub endpoint_within_budget: bool,
    pub identity: IdentityCheck,
}

impl FracIntJson {
    pub fn new(fsys: &FracIntSystem, identity: IdentityCheck) -> Result<Self> {
        let corrected = fsys.to_fif_system()?;
        let grids: Vec<SampledGrid> = corrected
            .branches()
            .iter()
            .map(|b| match &b.forcing {
                ForcingFunction::SampledGrid(g) => Ok(g.clone()),
                _ => Err(FifError::InvalidData("derived forcing is not sampled".into())),
            })
            .collect::<Result<_>>()?;
        let data = fsys.data();
        let defects: Vec<[f64; 2]> = fsys.endpoint_defects().into_iter().map(|(a, b)| [a, b]).collect();
        let endpoint_within_budget = defects.iter().flatten().all(|d| *d <= identity.budget);
        Ok(Self {
            system: SystemSpec {
                knots: data.knots().to_vec(),
                values: data.values().to_vec(),
                alphas: fsys.derived_alphas().to_vec(),
                forcing: ForcingSpec::Sampled(SampledSpec::from_grids(&grids)?),
                probabilities: None,
                tau_end: None,
            },
            beta: fsys.beta().value(),
            derived_alphas: fsys.derived_alphas().to_vec(),
            base_alphas: fsys.base().alphas(),
            q: SampledSpec::from_grids(fsys.forcings())?,
            endpoint_defects: defects,
            endpoint_within_budget,
            identity,
        })
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
