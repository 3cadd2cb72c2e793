//! Drift vector fields with declared growth and dissipativity constants.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::noise::RngSeed;

type Field = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// Radius of the bounded cloud on which the cubic drift's growth constants
/// are certified.
pub const CUBIC_GROWTH_RADIUS: f64 = 10.0;

/// A drift `f: R^d -> R^d` with constants for
/// `|f(x)| <= l |x| + M` and `<x - y, f(x) - f(y)> <= -L |x - y|^2`.
#[derive(Clone)]
pub struct DriftSpec {
    name: String,
    field: Arc<Field>,
    linear_growth_l: f64,
    linear_growth_m: f64,
    dissipativity_l: f64,
    /// Growth constants hold for `|x| <= growth_radius`.
    growth_radius: f64,
}

impl fmt::Debug for DriftSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DriftSpec")
            .field("name", &self.name)
            .field("l", &self.linear_growth_l)
            .field("M", &self.linear_growth_m)
            .field("L", &self.dissipativity_l)
            .finish()
    }
}

impl DriftSpec {
    pub fn custom(
        name: impl Into<String>,
        linear_growth_l: f64,
        linear_growth_m: f64,
        dissipativity_l: f64,
        field: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(linear_growth_l > 0.0) || !(linear_growth_m >= 0.0) || !(dissipativity_l > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "drift constants must satisfy l > 0, M >= 0, L > 0 (got {linear_growth_l}, {linear_growth_m}, {dissipativity_l})"
            )));
        }
        Ok(Self {
            name: name.into(),
            field: Arc::new(field),
            linear_growth_l,
            linear_growth_m,
            dissipativity_l,
            growth_radius: f64::INFINITY,
        })
    }

    /// `f(x) = -rate * x`.
    pub fn linear(rate: f64) -> Result<Self> {
        Self::custom(format!("linear({rate})"), rate, 0.0, rate, move |x, out| {
            for (o, xi) in out.iter_mut().zip(x) {
                *o = -rate * xi;
            }
        })
    }

    /// `f(x) = -rate * x + offset`; the offset is broadcast if it has length 1.
    pub fn affine(rate: f64, offset: Vec<f64>) -> Result<Self> {
        if offset.is_empty() {
            return Err(Error::InvalidParameter("affine offset is empty".into()));
        }
        let m = linalg::norm(&offset);
        let name = format!("affine({rate}, {offset:?})");
        Self::custom(name, rate, m, rate, move |x, out| {
            for (i, (o, xi)) in out.iter_mut().zip(x).enumerate() {
                *o = -rate * xi + offset[if offset.len() == 1 { 0 } else { i }];
            }
        })
    }

    /// `f(x) = -x^3 - x` componentwise. One-sided Lipschitz with `L = 1`
    /// everywhere; the growth constants are only certified on the ball of
    /// radius [`CUBIC_GROWTH_RADIUS`].
    pub fn cubic_dissipative() -> Self {
        let r = CUBIC_GROWTH_RADIUS;
        let mut spec = Self::custom("cubic-dissipative", r * r + 1.0, 0.0, 1.0, |x, out| {
            for (o, xi) in out.iter_mut().zip(x) {
                *o = -xi * xi * xi - xi;
            }
        })
        .expect("constants are valid");
        spec.growth_radius = r;
        spec
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn linear_growth_l(&self) -> f64 {
        self.linear_growth_l
    }

    pub fn linear_growth_m(&self) -> f64 {
        self.linear_growth_m
    }

    pub fn dissipativity_l(&self) -> f64 {
        self.dissipativity_l
    }

    pub fn growth_radius(&self) -> f64 {
        self.growth_radius
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        (self.field)(x, out)
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.eval_into(x, &mut out);
        out
    }

    /// Sampled check of the linear growth bound on a Gaussian cloud scaled to
    /// `radius` (capped at the certified radius).
    pub fn check_linear_growth(&self, dim: usize, radius: f64, samples: usize, seed: RngSeed) -> ConditionCheck {
        let radius = radius.min(self.growth_radius);
        let mut rng = seed.rng();
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..samples {
            let x = cloud_point(&mut rng, dim, radius);
            let lhs = linalg::norm(&self.eval(&x));
            let rhs = self.linear_growth_l * linalg::norm(&x) + self.linear_growth_m;
            worst = worst.max(lhs - rhs);
        }
        ConditionCheck::new(worst, 0.0, samples)
    }

    /// Sampled check of one-sided dissipativity on random pairs.
    pub fn check_dissipativity(&self, dim: usize, radius: f64, samples: usize, seed: RngSeed) -> ConditionCheck {
        let mut rng = seed.rng();
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..samples {
            let x = cloud_point(&mut rng, dim, radius);
            let y = cloud_point(&mut rng, dim, radius);
            let (fx, fy) = (self.eval(&x), self.eval(&y));
            let dx: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            let df: Vec<f64> = fx.iter().zip(&fy).map(|(a, b)| a - b).collect();
            let excess = linalg::dot(&dx, &df) + self.dissipativity_l * linalg::norm_sq(&dx);
            worst = worst.max(excess);
        }
        ConditionCheck::new(worst, 1e-9, samples)
    }
}

fn cloud_point<R: Rng>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    // Gaussian direction, radius uniform in [0, radius]
    let dir: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
    let n = linalg::norm(&dir).max(f64::MIN_POSITIVE);
    let r = radius * rng.random::<f64>();
    dir.into_iter().map(|v| v * r / n).collect()
}

/// Worst excess `lhs - rhs` of a sampled inequality.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConditionCheck {
    pub worst_excess: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub pass: bool,
}

impl ConditionCheck {
    fn new(worst_excess: f64, tolerance: f64, samples: usize) -> Self {
        Self {
            worst_excess,
            tolerance,
            samples,
            pass: worst_excess <= tolerance,
        }
    }
}

/// Catalog entries accepted in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DriftCatalog {
    Linear {
        #[serde(default = "one")]
        rate: f64,
    },
    Affine {
        #[serde(default = "one")]
        rate: f64,
        offset: Vec<f64>,
    },
    CubicDissipative,
}

fn one() -> f64 {
    1.0
}

impl DriftCatalog {
    pub fn build(&self) -> Result<DriftSpec> {
        match self {
            Self::Linear { rate } => DriftSpec::linear(*rate),
            Self::Affine { rate, offset } => DriftSpec::affine(*rate, offset.clone()),
            Self::CubicDissipative => Ok(DriftSpec::cubic_dissipative()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_values() {
        let f = DriftSpec::affine(1.0, vec![1.0]).unwrap();
        assert_eq!(f.eval(&[2.0, -1.0]), vec![-1.0, 2.0]);
        let c = DriftSpec::cubic_dissipative();
        assert_eq!(c.eval(&[2.0]), vec![-10.0]);
        assert_eq!(DriftSpec::linear(3.0).unwrap().eval(&[1.0]), vec![-3.0]);
    }

    #[test]
    fn declared_constants_hold() {
        let seed = RngSeed::new(3, 0);
        for f in [
            DriftSpec::linear(1.0).unwrap(),
            DriftSpec::affine(1.0, vec![1.0, -2.0]).unwrap(),
            DriftSpec::cubic_dissipative(),
        ] {
            assert!(f.check_linear_growth(2, 50.0, 2000, seed).pass, "{f:?}");
            assert!(f.check_dissipativity(2, 50.0, 2000, seed).pass, "{f:?}");
        }
    }

    #[test]
    fn false_constants_are_caught() {
        let bad = DriftSpec::custom("expanding", 1.0, 0.0, 1.0, |x, out| {
            for (o, xi) in out.iter_mut().zip(x) {
                *o = 2.0 * xi;
            }
        })
        .unwrap();
        let seed = RngSeed::new(4, 0);
        assert!(!bad.check_linear_growth(1, 10.0, 200, seed).pass);
        assert!(!bad.check_dissipativity(1, 10.0, 200, seed).pass);
    }

    #[test]
    fn catalog_json() {
        let c: DriftCatalog = serde_json::from_str(r#"{"kind":"affine","offset":[1.0]}"#).unwrap();
        assert_eq!(c, DriftCatalog::Affine { rate: 1.0, offset: vec![1.0] });
        assert!(serde_json::from_str::<DriftCatalog>(r#"{"kind":"quartic"}"#).is_err());
        assert!(serde_json::from_str::<DriftCatalog>(r#"{"kind":"linear","bogus":1}"#).is_err());
    }
}
