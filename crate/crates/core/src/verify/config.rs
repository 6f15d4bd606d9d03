use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Distribution of random weights and bilinear coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoeffModel {
    /// Uniform on the closed unit disc, by rejection from the square.
    UnitDisc,
    /// Uniform `±1`.
    Signs,
    Zero,
    Ones,
}

impl CoeffModel {
    pub fn name(&self) -> &'static str {
        match self {
            CoeffModel::UnitDisc => "unit-disc",
            CoeffModel::Signs => "signs",
            CoeffModel::Zero => "zero",
            CoeffModel::Ones => "ones",
        }
    }
}

impl fmt::Display for CoeffModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoeffModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "unit-disc" => Ok(CoeffModel::UnitDisc),
            "signs" => Ok(CoeffModel::Signs),
            "zero" => Ok(CoeffModel::Zero),
            "ones" => Ok(CoeffModel::Ones),
            other => Err(Error::Parse(format!("unknown coefficient model {other:?}"))),
        }
    }
}

/// Parameters of a verification sweep. Identical configs give identical reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub q_min: u64,
    pub q_max: u64,
    pub seed: u64,
    /// Random trials per `(q, χ)` cell.
    pub trials: u32,
    /// Random parameter samples where a sweep is not exhaustive.
    pub samples: u32,
    pub coeff_model: CoeffModel,
    /// Exponent slack in the `q^{1/2+ε}` incomplete-sum normalization.
    pub epsilon: f64,
    /// Exponent in the small-prime hypothesis `P_min(q) ≥ log^γ N`.
    pub gamma: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            q_min: 3,
            q_max: 30,
            seed: 0,
            trials: 4,
            samples: 256,
            coeff_model: CoeffModel::UnitDisc,
            epsilon: 0.1,
            gamma: 1.5,
        }
    }
}

impl ExperimentConfig {
    pub fn with_range(q_min: u64, q_max: u64) -> Self {
        ExperimentConfig {
            q_min,
            q_max,
            ..Default::default()
        }
    }

    pub fn moduli(&self) -> std::ops::RangeInclusive<u64> {
        self.q_min..=self.q_max
    }
}

/// Parameters of a bilinear-form experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearConfig {
    pub moduli: Vec<u64>,
    /// Dyadic scales `(A, M, N)`.
    pub shapes: Vec<(u64, u64, u64)>,
    pub trials: u32,
    pub seed: u64,
    pub coeff_model: CoeffModel,
    /// Character index; a random primitive character per instance when absent.
    pub character: Option<u64>,
    pub epsilon: f64,
    pub gamma: f64,
}

impl Default for BilinearConfig {
    fn default() -> Self {
        BilinearConfig {
            moduli: vec![101],
            shapes: vec![(8, 8, 8)],
            trials: 5,
            seed: 0,
            coeff_model: CoeffModel::UnitDisc,
            character: None,
            epsilon: 0.1,
            gamma: 1.5,
        }
    }
}
