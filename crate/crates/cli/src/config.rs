//! Config-file schema. One JSON document drives every subcommand; unknown
//! keys are rejected so typos fail fast with a line-numbered message.

use pdmforge_core::field::{make_exp_map, Interval, MassProfile, SmoothMap1D};
use pdmforge_core::pct::{DeltaQ, Grid1D};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub system: Option<SystemConfig>,
    pub grid: GridConfig,
    #[serde(default)]
    pub perturbation: Option<PerturbationConfig>,
    #[serde(default)]
    pub solver: Option<SolverConfig>,
    #[serde(default)]
    pub problem: Option<ProblemConfig>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub beta: f64,
    pub nu: f64,
    pub n_max: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n_points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    /// "two_over_g" for the closed-form generator, "custom" for a named
    /// built-in from the registry.
    pub kind: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub coefficient: Option<f64>,
    /// Level the generator is applied to; defaults to the ground state.
    #[serde(default)]
    pub level: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub k: usize,
    #[serde(default)]
    pub solver_tol: Option<f64>,
    #[serde(default)]
    pub boundary_tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MassSpec {
    Constant {
        value: f64,
    },
    Exponential {
        rate: f64,
    },
    /// `M(x) = (a + x²)/(b + x²)` with `a, b > 0`.
    Rational {
        a: f64,
        b: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    Harmonic { strength: f64 },
    Exponential { amplitude: f64, rate: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VonRoosSpec {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub mass: MassSpec,
    pub potential: PotentialSpec,
    pub von_roos: VonRoosSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub write_vectors: bool,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid1D, String> {
        Grid1D::new(self.x_lo, self.x_hi, self.n_points).map_err(|e| e.to_string())
    }
}

impl MassSpec {
    pub fn label(&self) -> String {
        match self {
            MassSpec::Constant { value } => format!("constant({value})"),
            MassSpec::Exponential { rate } => format!("exponential(rate={rate})"),
            MassSpec::Rational { a, b } => format!("rational(a={a}, b={b})"),
        }
    }

    pub fn build(&self, window: Interval) -> Result<MassProfile, String> {
        let map = match self {
            MassSpec::Constant { value } => SmoothMap1D::constant(*value),
            MassSpec::Exponential { rate } => make_exp_map(*rate, 0.0),
            MassSpec::Rational { a, b } => {
                if *a <= 0.0 || *b <= 0.0 || a.is_nan() || b.is_nan() {
                    return Err(format!(
                        "rational mass needs positive a and b, got a={a}, b={b}"
                    ));
                }
                SmoothMap1D::product(
                    SmoothMap1D::poly(&[*a, 0.0, 1.0]),
                    SmoothMap1D::recip(SmoothMap1D::poly(&[*b, 0.0, 1.0])),
                )
                .map_err(|e| e.to_string())?
            }
        };
        MassProfile::new(map, window).map_err(|e| e.to_string())
    }
}

impl PotentialSpec {
    pub fn label(&self) -> String {
        match self {
            PotentialSpec::Zero => "zero".to_string(),
            PotentialSpec::Harmonic { strength } => format!("harmonic(strength={strength})"),
            PotentialSpec::Exponential { amplitude, rate } => {
                format!("exponential(amplitude={amplitude}, rate={rate})")
            }
        }
    }

    pub fn build(&self) -> SmoothMap1D {
        match self {
            PotentialSpec::Zero => SmoothMap1D::constant(0.0),
            PotentialSpec::Harmonic { strength } => SmoothMap1D::poly(&[0.0, 0.0, *strength]),
            PotentialSpec::Exponential { amplitude, rate } => {
                SmoothMap1D::scale(*amplitude, make_exp_map(*rate, 0.0))
            }
        }
    }
}

impl PerturbationConfig {
    pub fn level(&self) -> usize {
        self.level.unwrap_or(0)
    }

    /// Builds the generator for the "custom" kind from the built-in
    /// registry of named closed forms.
    pub fn build_custom(&self) -> Result<DeltaQ, String> {
        let name = self
            .name
            .as_deref()
            .ok_or("perturbation kind \"custom\" requires a \"name\"")?;
        match name {
            "zero" => Ok(DeltaQ::Zero),
            "constant" => {
                let c = self
                    .coefficient
                    .ok_or("generator \"constant\" requires a \"coefficient\"")?;
                Ok(DeltaQ::Constant(c))
            }
            "two_over_g" => Ok(DeltaQ::TwoOverG),
            "linear_in_g" => {
                let a = self
                    .coefficient
                    .ok_or("generator \"linear_in_g\" requires a \"coefficient\"")?;
                Ok(DeltaQ::LinearInG(a))
            }
            other => Err(format!(
                "unknown generator \"{other}\"; the registry has zero, constant, two_over_g, \
                 linear_in_g"
            )),
        }
    }
}
