//! Experiment configuration: one TOML document per run, unknown keys rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::carleman::BumpQuadrature;
use crate::error::{Error, Result};
use crate::tolerances as tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Curvature,
    Bilaplacian,
    Evolution,
    Convexity,
    GaussianDecay,
    Commutator,
    Carleman,
    CarlemanHeat,
    CarlemanQlog,
    Mollifier,
    Asymptotics,
    Kinematics,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Curvature,
        Suite::Bilaplacian,
        Suite::Evolution,
        Suite::Convexity,
        Suite::GaussianDecay,
        Suite::Commutator,
        Suite::Carleman,
        Suite::CarlemanHeat,
        Suite::CarlemanQlog,
        Suite::Mollifier,
        Suite::Asymptotics,
        Suite::Kinematics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Curvature => "curvature",
            Suite::Bilaplacian => "bilaplacian",
            Suite::Evolution => "evolution",
            Suite::Convexity => "convexity",
            Suite::GaussianDecay => "gaussian-decay",
            Suite::Commutator => "commutator",
            Suite::Carleman => "carleman",
            Suite::CarlemanHeat => "carleman-heat",
            Suite::CarlemanQlog => "carleman-qlog",
            Suite::Mollifier => "mollifier",
            Suite::Asymptotics => "asymptotics",
            Suite::Kinematics => "kinematics",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown check '{s}'")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub rho_max: Option<f64>,
    pub cells: Option<usize>,
    pub ntheta: Option<usize>,
}

/// Coefficients of d_t u = (a + ib)(Delta u + V u + F) with a constant
/// potential V and a forcing F = forcing * exp(-rho^2).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub gamma: Option<f64>,
    pub potential: Option<[f64; 2]>,
    pub forcing: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub mu: Option<f64>,
    pub eps: Option<f64>,
    pub r: Option<f64>,
    pub ell: Option<u32>,
    pub sigma: Option<f64>,
    pub rho0: Option<f64>,
    /// Constant in mu = C R^{6/(3-Q)}.
    pub c_cal: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    pub size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub bilaplacian_interval: f64,
    pub curvature_oracle: f64,
    pub curvature_exact: f64,
    pub riccati_bochner: f64,
    pub kinematics: f64,
    pub phase_error: f64,
    pub order_slack: f64,
    pub commutator_gap: f64,
    pub commutator_bound: f64,
    pub alpha_ode: f64,
    pub convexity: f64,
    pub n_hat_stability: f64,
    pub mollifier_slope: f64,
    pub carleman: f64,
    pub virial: f64,
    pub q_identity: f64,
    pub laplace_ratio: f64,
    pub laplace_lower_limit: f64,
    pub norm_drift: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            bilaplacian_interval: tol::BILAPLACIAN_INTERVAL,
            curvature_oracle: tol::CURVATURE_ORACLE,
            curvature_exact: tol::CURVATURE_EXACT,
            riccati_bochner: tol::RICCATI_BOCHNER,
            kinematics: tol::KINEMATICS_FD,
            phase_error: tol::PHASE_ERROR,
            order_slack: tol::ORDER_SLACK,
            commutator_gap: tol::COMMUTATOR_GAP,
            commutator_bound: tol::COMMUTATOR_BOUND,
            alpha_ode: tol::ALPHA_ODE,
            convexity: tol::CONVEXITY,
            n_hat_stability: tol::N_HAT_STABILITY,
            mollifier_slope: tol::MOLLIFIER_SLOPE,
            carleman: tol::CARLEMAN,
            virial: tol::VIRIAL,
            q_identity: tol::Q_IDENTITY,
            laplace_ratio: tol::LAPLACE_RATIO,
            laplace_lower_limit: tol::LAPLACE_LOWER_LIMIT,
            norm_drift: tol::NORM_DRIFT,
        }
    }
}

impl ToleranceConfig {
    fn entries(&self) -> [(&'static str, f64); 19] {
        [
            ("bilaplacian_interval", self.bilaplacian_interval),
            ("curvature_oracle", self.curvature_oracle),
            ("curvature_exact", self.curvature_exact),
            ("riccati_bochner", self.riccati_bochner),
            ("kinematics", self.kinematics),
            ("phase_error", self.phase_error),
            ("order_slack", self.order_slack),
            ("commutator_gap", self.commutator_gap),
            ("commutator_bound", self.commutator_bound),
            ("alpha_ode", self.alpha_ode),
            ("convexity", self.convexity),
            ("n_hat_stability", self.n_hat_stability),
            ("mollifier_slope", self.mollifier_slope),
            ("carleman", self.carleman),
            ("virial", self.virial),
            ("q_identity", self.q_identity),
            ("laplace_ratio", self.laplace_ratio),
            ("laplace_lower_limit", self.laplace_lower_limit),
            ("norm_drift", self.norm_drift),
        ]
    }
}

/// Unset fields fall back to per-suite defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub check: Option<Suite>,
    pub n: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub physics: PhysicsConfig,
    #[serde(default)]
    pub weight: WeightConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub corpus: CorpusConfig,
    pub quadrature: Option<BumpQuadrature>,
}

fn default_seed() -> u64 {
    20_240_601
}

impl ExperimentConfig {
    pub fn for_suite(suite: Suite) -> Self {
        ExperimentConfig {
            check: Some(suite),
            seed: default_seed(),
            ..Default::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| e.context(path.display().to_string()))
    }

    pub fn suite(&self) -> Result<Suite> {
        self.check.ok_or_else(|| Error::Config("check: missing suite name".into()))
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(path: &str, why: String) -> Error {
            Error::Config(format!("{path}: {why}"))
        }
        let positive = |path: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(bad(path, format!("must be positive, got {x}"))),
            _ => Ok(()),
        };
        let non_negative = |path: &str, v: Option<f64>| match v {
            Some(x) if !(x >= 0.0 && x.is_finite()) => Err(bad(path, format!("must be non-negative, got {x}"))),
            _ => Ok(()),
        };
        if let Some(n) = self.n {
            if !(2..=8).contains(&n) {
                return Err(bad("n", format!("must lie in 2..=8, got {n}")));
            }
        }
        positive("grid.rho_max", self.grid.rho_max)?;
        if let Some(c) = self.grid.cells {
            if c < 10 {
                return Err(bad("grid.cells", format!("must be at least 10, got {c}")));
            }
        }
        if let Some(c) = self.grid.ntheta {
            if c < 4 {
                return Err(bad("grid.ntheta", format!("must be at least 4, got {c}")));
            }
        }
        non_negative("physics.a", self.physics.a)?;
        non_negative("physics.gamma", self.physics.gamma)?;
        if let Some(b) = self.physics.b {
            if !b.is_finite() {
                return Err(bad("physics.b", "must be finite".into()));
            }
        }
        if let Some([re, im]) = self.physics.potential {
            if !(re.is_finite() && im.is_finite()) {
                return Err(bad("physics.potential", "must be finite".into()));
            }
        }
        if let Some(f) = self.physics.forcing {
            if !f.is_finite() {
                return Err(bad("physics.forcing", "must be finite".into()));
            }
        }
        positive("weight.mu", self.weight.mu)?;
        positive("weight.eps", self.weight.eps)?;
        positive("weight.r", self.weight.r)?;
        positive("weight.sigma", self.weight.sigma)?;
        positive("weight.rho0", self.weight.rho0)?;
        positive("weight.c_cal", self.weight.c_cal)?;
        if self.weight.ell == Some(0) {
            return Err(bad("weight.ell", "must be a positive integer".into()));
        }
        for (name, v) in self.tolerances.entries() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(&format!("tolerances.{name}"), format!("must be positive, got {v}")));
            }
        }
        if let Some(s) = self.corpus.size {
            if s > 100_000 {
                return Err(bad("corpus.size", format!("at most 100000, got {s}")));
            }
        }
        if let Some(q) = &self.quadrature {
            let fields = [
                ("r_panels", q.r_panels),
                ("r_order", q.r_order),
                ("npsi", q.npsi),
                ("t_panels", q.t_panels),
                ("t_order", q.t_order),
            ];
            for (name, v) in fields {
                if v == 0 {
                    return Err(bad(&format!("quadrature.{name}"), "must be positive".into()));
                }
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_eps_names_the_field() {
        let err = ExperimentConfig::from_toml("check = \"carleman\"\n[weight]\neps = -1.0\n").unwrap_err();
        assert!(err.to_string().contains("weight.eps"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml("check = \"carleman\"\n[tolerances]\ncarelman = 0.1\n").unwrap_err();
        assert!(err.to_string().contains("carelman"), "{err}");
        assert!(ExperimentConfig::from_toml("chek = \"carleman\"\n").is_err());
    }

    #[test]
    fn round_trip() {
        let mut c = ExperimentConfig::for_suite(Suite::CarlemanQlog);
        c.weight.ell = Some(3);
        c.grid.cells = Some(80);
        let back = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
    }
}
