//! State-dependent joint disturbance torques.

use serde::{Deserialize, Serialize};

use crate::error::{GimbalError, Result};
use crate::ident::regressor::{b, features, pair_index, BIAS, N_TERMS};
use crate::kinematics::GimbalState;

/// Regressor coefficients for both axes, in the canonical term order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceCoefficients {
    pub k_a: Vec<f64>,
    pub k_m: Vec<f64>,
}

impl DisturbanceCoefficients {
    pub fn zeros() -> Self {
        Self {
            k_a: vec![0.0; N_TERMS],
            k_m: vec![0.0; N_TERMS],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_a.len() != N_TERMS || self.k_m.len() != N_TERMS {
            return Err(GimbalError::InvalidParams(format!(
                "coefficient vectors need {N_TERMS} entries, got {} and {}",
                self.k_a.len(),
                self.k_m.len()
            )));
        }
        if self.k_a.iter().chain(&self.k_m).any(|v| !v.is_finite()) {
            return Err(GimbalError::InvalidParams(
                "non-finite disturbance coefficient".into(),
            ));
        }
        Ok(())
    }

    /// The built-in polynomial disturbance expressed in regressor coordinates.
    pub fn builtin() -> Self {
        let mut k = Self::zeros();
        let a = &mut k.k_a;
        a[b::THETA_DOT] = -0.08;
        a[b::THETA] = -0.01;
        a[b::THETA_SQ] = -0.02;
        a[b::PSI_DOT] = -0.2;
        a[b::PSI] = -0.01;
        a[pair_index(b::THETA, b::PSI)] = -0.01;
        a[pair_index(b::THETA, b::THETA_SQ)] = -0.02;
        a[pair_index(b::THETA, b::PSI_SQ)] = -0.1;
        a[pair_index(b::PSI, b::THETA_SQ)] = -0.05;
        a[BIAS] = -0.00045;
        let m = &mut k.k_m;
        m[b::THETA_DOT] = -0.08;
        m[b::THETA] = -0.05;
        m[b::THETA_SQ] = -0.08;
        m[b::PSI_DOT] = -0.02;
        m[b::PSI] = -0.01;
        m[b::PSI_SQ] = -0.02;
        m[pair_index(b::THETA, b::PSI)] = -0.03;
        m[pair_index(b::THETA, b::PSI_SQ)] = -0.02;
        m[pair_index(b::PSI, b::THETA_SQ)] = -0.02;
        m[BIAS] = -0.00045;
        k
    }

    pub fn eval(&self, s: &GimbalState) -> (f64, f64) {
        let phi = features(s);
        let dot = |k: &[f64]| k.iter().zip(phi.iter()).map(|(k, p)| k * p).sum::<f64>();
        (dot(&self.k_a), dot(&self.k_m))
    }
}

/// Disturbance torque model `(T_da, T_dm)` as a function of the joint state.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DisturbanceModel {
    #[default]
    None,
    /// Fixed polynomial friction/cogging model of the bench plant.
    Builtin,
    Coefficients {
        coefficients: DisturbanceCoefficients,
    },
    /// Coefficients plus a Coulomb term `-level·sign(rate)` on each axis,
    /// which lies outside the regressor span.
    CoefficientsPlusCoulomb {
        coefficients: DisturbanceCoefficients,
        level: f64,
    },
    /// The built-in model plus the same Coulomb term.
    BuiltinPlusCoulomb { level: f64 },
    /// Constant torques, mainly for observer and compensation tests.
    Constant { t_da: f64, t_dm: f64 },
}

impl DisturbanceModel {
    pub fn builtin_plus_coulomb(level: f64) -> Self {
        DisturbanceModel::CoefficientsPlusCoulomb {
            coefficients: DisturbanceCoefficients::builtin(),
            level,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DisturbanceModel::Coefficients { coefficients } => coefficients.validate(),
            DisturbanceModel::CoefficientsPlusCoulomb {
                coefficients,
                level,
            } => {
                coefficients.validate()?;
                check_level(*level)
            }
            DisturbanceModel::BuiltinPlusCoulomb { level } => check_level(*level),
            _ => Ok(()),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, DisturbanceModel::None)
    }

    /// `(T_da, T_dm)` in N·m.
    pub fn eval(&self, s: &GimbalState) -> (f64, f64) {
        match self {
            DisturbanceModel::None => (0.0, 0.0),
            DisturbanceModel::Builtin => builtin(s),
            DisturbanceModel::Coefficients { coefficients } => coefficients.eval(s),
            DisturbanceModel::CoefficientsPlusCoulomb {
                coefficients,
                level,
            } => {
                let (a, m) = coefficients.eval(s);
                (
                    a - level * sign(s.psi_a_dot),
                    m - level * sign(s.theta_m_dot),
                )
            }
            DisturbanceModel::BuiltinPlusCoulomb { level } => {
                let (a, m) = builtin(s);
                (
                    a - level * sign(s.psi_a_dot),
                    m - level * sign(s.theta_m_dot),
                )
            }
            DisturbanceModel::Constant { t_da, t_dm } => (*t_da, *t_dm),
        }
    }
}

fn check_level(level: f64) -> Result<()> {
    if level.is_finite() {
        Ok(())
    } else {
        Err(GimbalError::InvalidParams(
            "Coulomb level must be finite".into(),
        ))
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn disturbance_eval(model: &DisturbanceModel, s: &GimbalState) -> (f64, f64) {
    model.eval(s)
}

fn builtin(s: &GimbalState) -> (f64, f64) {
    let (th, thd, ps, psd) = (s.theta_m, s.theta_m_dot, s.psi_a, s.psi_a_dot);
    let t_da = -0.08 * thd
        - 0.01 * th
        - 0.02 * th * th
        - 0.2 * psd
        - 0.01 * ps
        - 0.01 * th * ps
        - 0.02 * th * th * th
        - 0.1 * th * ps * ps
        - 0.05 * ps * th * th
        - 0.00045;
    let t_dm = -0.08 * thd
        - 0.05 * th
        - 0.08 * th * th
        - 0.02 * psd
        - 0.01 * ps
        - 0.02 * ps * ps
        - 0.03 * th * ps
        - 0.02 * th * ps * ps
        - 0.02 * ps * th * th
        - 0.00045;
    (t_da, t_dm)
}
