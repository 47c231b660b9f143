//! Initial fields `u_0(x)` to be projected onto the discretisation.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{HolifdError, Result};
use crate::grid::Grid;
use crate::polyfield::{GaussLegendre, PiecewiseField, Side};

/// A unit of mass `w` released at local coordinate `eta` of element `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub k: usize,
    pub eta: f64,
    #[serde(default = "unit")]
    pub w: f64,
}

const MOLLIFIED_QUAD_ORDER: usize = 32;

fn unit() -> f64 {
    1.0
}

fn unit_modes() -> u32 {
    1
}

/// Named closed-form profiles usable from JSON configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum Profile {
    Constant {
        value: f64,
    },
    /// Periodised Gaussian of total mass `mass` on top of `background`.
    Gaussian {
        centre: f64,
        sigma: f64,
        #[serde(default = "unit")]
        mass: f64,
        #[serde(default)]
        background: f64,
    },
    /// `background + amplitude * sin(2 pi modes x / L + phase)`.
    Sine {
        amplitude: f64,
        #[serde(default = "unit_modes")]
        modes: u32,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        background: f64,
    },
    /// `sum_k coeffs[k] x^k`, not periodised.
    Polynomial {
        coeffs: Vec<f64>,
    },
}

impl Profile {
    pub fn eval(&self, x: f64, grid: &Grid) -> f64 {
        let length = grid.length();
        match self {
            Profile::Constant { value } => *value,
            Profile::Gaussian { centre, sigma, mass, background } => {
                let norm = mass / (sigma * (2.0 * std::f64::consts::PI).sqrt());
                let d = (x - centre).rem_euclid(length);
                let d = if d >= 0.5 * length { d - length } else { d };
                let images: f64 = (-2..=2)
                    .map(|n| {
                        let s = (d - n as f64 * length) / sigma;
                        (-0.5 * s * s).exp()
                    })
                    .sum();
                background + norm * images
            }
            Profile::Sine { amplitude, modes, phase, background } => {
                let k = 2.0 * std::f64::consts::PI * *modes as f64 / length;
                background + amplitude * (k * x + phase).sin()
            }
            Profile::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Profile::Gaussian { sigma, .. } if !(sigma.is_finite() && *sigma > 0.0) => {
                Err(HolifdError::InvalidConfig(format!("gaussian sigma must be positive, got {sigma}")))
            }
            _ => Ok(()),
        }
    }
}

/// Source of an analytic initial field.
#[derive(Clone)]
pub enum AnalyticSource {
    Profile(Profile),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for AnalyticSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticSource::Profile(p) => write!(f, "{p:?}"),
            AnalyticSource::Function(_) => write!(f, "<function>"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum InitialField {
    Analytic { source: AnalyticSource, quad_order: usize },
    Piecewise(PiecewiseField<f64>),
    Points(Vec<PointMass>),
}

impl InitialField {
    pub fn profile(profile: Profile) -> Self {
        InitialField::Analytic {
            source: AnalyticSource::Profile(profile),
            quad_order: GaussLegendre::DEFAULT_ORDER,
        }
    }

    pub fn function(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        InitialField::Analytic {
            source: AnalyticSource::Function(Arc::new(f)),
            quad_order: GaussLegendre::DEFAULT_ORDER,
        }
    }

    pub fn point(k: usize, eta: f64, w: f64) -> Self {
        InitialField::Points(vec![PointMass { k, eta, w }])
    }

    pub fn with_quad_order(self, order: usize) -> Self {
        match self {
            InitialField::Analytic { source, .. } => InitialField::Analytic { source, quad_order: order },
            other => other,
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        match self {
            InitialField::Analytic { source, quad_order } => {
                if *quad_order == 0 {
                    return Err(HolifdError::InvalidConfig("quadrature order must be positive".into()));
                }
                if let AnalyticSource::Profile(p) = source {
                    p.validate()?;
                }
                Ok(())
            }
            InitialField::Piecewise(f) => check_field_grid(f, grid),
            InitialField::Points(points) => {
                for p in points {
                    if !(-0.5..=0.5).contains(&p.eta) {
                        return Err(HolifdError::CoordinateOutOfRange(p.eta));
                    }
                    if p.k >= grid.m() {
                        return Err(HolifdError::GridMismatch(format!(
                            "point mass in element {} of a {}-element grid",
                            p.k,
                            grid.m()
                        )));
                    }
                    if !p.w.is_finite() {
                        return Err(HolifdError::NonFinite("point mass weight".into()));
                    }
                }
                Ok(())
            }
        }
    }

    /// Pointwise value; point masses have none and yield `None`.
    pub fn value_at(&self, x: f64, grid: &Grid) -> Option<f64> {
        match self {
            InitialField::Analytic { source, .. } => Some(match source {
                AnalyticSource::Profile(p) => p.eval(x, grid),
                AnalyticSource::Function(f) => f(x),
            }),
            InitialField::Piecewise(f) => {
                let (j, xi) = grid.locate(x);
                Some(f.piece(j).map(|p| p.eval(&xi)).unwrap_or(0.0))
            }
            InitialField::Points(_) => None,
        }
    }

    /// `<z, u_0> = (1/h) int z u_0 dx`.
    pub fn inner(&self, z: &PiecewiseField<f64>, grid: &Grid) -> Result<f64> {
        check_field_grid(z, grid)?;
        let h = grid.h();
        match self {
            InitialField::Analytic { quad_order, .. } => {
                let rule = GaussLegendre::new(*quad_order);
                let mut acc = 0.0;
                for (j, p) in z.pieces() {
                    acc += rule.integrate(|xi| {
                        let u = self.value_at(grid.position(j, xi), grid).unwrap_or(0.0);
                        p.eval(&xi) * u
                    });
                }
                if !acc.is_finite() {
                    return Err(HolifdError::Quadrature("non-finite quadrature sum".into()));
                }
                Ok(acc)
            }
            InitialField::Piecewise(f) => z.inner(f),
            InitialField::Points(points) => points.iter().try_fold(0.0, |acc, p| {
                Ok(acc + p.w * z.evaluate(p.k, &p.eta, Side::Interior)? / h)
            }),
        }
    }

    /// Total mass `int u_0 dx` over the periodic domain.
    pub fn mass(&self, grid: &Grid) -> Result<f64> {
        let one = PiecewiseField::uniform(grid.m(), grid.h(), crate::polyfield::Polynomial::constant(1.0));
        Ok(grid.h() * self.inner(&one, grid)?)
    }

    /// Replaces point masses by Gaussians of standard deviation `h/8`; other
    /// fields are returned unchanged.
    pub fn mollified(&self, grid: &Grid) -> InitialField {
        match self {
            InitialField::Points(points) => {
                let sigma = grid.h() / 8.0;
                let bumps: Vec<Profile> = points
                    .iter()
                    .map(|p| Profile::Gaussian {
                        centre: grid.position(p.k, p.eta),
                        sigma,
                        mass: p.w,
                        background: 0.0,
                    })
                    .collect();
                let g = *grid;
                InitialField::function(move |x| bumps.iter().map(|b| b.eval(x, &g)).sum())
                    .with_quad_order(MOLLIFIED_QUAD_ORDER)
            }
            other => other.clone(),
        }
    }
}

fn check_field_grid(f: &PiecewiseField<f64>, grid: &Grid) -> Result<()> {
    if f.m() != grid.m() || *f.h() != grid.h() {
        return Err(HolifdError::GridMismatch(format!(
            "field on {} elements of width {} used with a {}-element grid of width {}",
            f.m(),
            f.h(),
            grid.m(),
            grid.h()
        )));
    }
    Ok(())
}

/// JSON form of an [`InitialField`]: `{"kind": "analytic" | "piecewise" | "points", ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialFieldSpec {
    Analytic {
        #[serde(flatten)]
        profile: Profile,
        #[serde(default = "default_quad_order")]
        quad_order: usize,
    },
    Piecewise {
        field: serde_json::Value,
    },
    Points {
        points: Vec<PointMass>,
    },
}

fn default_quad_order() -> usize {
    GaussLegendre::DEFAULT_ORDER
}

impl InitialFieldSpec {
    pub fn build(&self, grid: &Grid) -> Result<InitialField> {
        let field = match self {
            InitialFieldSpec::Analytic { profile, quad_order } => {
                InitialField::profile(profile.clone()).with_quad_order(*quad_order)
            }
            InitialFieldSpec::Piecewise { field } => InitialField::Piecewise(PiecewiseField::from_json(field)?),
            InitialFieldSpec::Points { points } => InitialField::Points(points.clone()),
        };
        field.validate(grid)?;
        Ok(field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfield::Polynomial;

    fn grid() -> Grid {
        Grid::new(16, 0.5, 0.0).unwrap()
    }

    #[test]
    fn point_mass_sifting() {
        let g = grid();
        let chi = PiecewiseField::characteristic(16, 0.5, 5);
        let u0 = InitialField::point(5, 0.3, 1.0);
        assert!((u0.inner(&chi, &g).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_mass_is_its_parameter() {
        let g = grid();
        let u0 = InitialField::profile(Profile::Gaussian { centre: 3.0, sigma: 0.4, mass: 2.5, background: 0.0 });
        assert!((u0.mass(&g).unwrap() - 2.5).abs() < 1e-10);
    }

    #[test]
    fn spec_parsing() {
        let g = grid();
        let spec: InitialFieldSpec =
            serde_json::from_str(r#"{"kind": "analytic", "profile": "sine", "amplitude": 2.0}"#).unwrap();
        let u0 = spec.build(&g).unwrap();
        let x = 1.3;
        assert!((u0.value_at(x, &g).unwrap() - 2.0 * (2.0 * std::f64::consts::PI * x / 8.0).sin()).abs() < 1e-14);
        let spec: InitialFieldSpec =
            serde_json::from_str(r#"{"kind": "points", "points": [{"k": 3, "eta": 0.75}]}"#).unwrap();
        assert!(spec.build(&g).is_err());
    }

    #[test]
    fn piecewise_grid_mismatch() {
        let g = grid();
        let f = PiecewiseField::uniform(8, 0.5, Polynomial::constant(1.0));
        let u0 = InitialField::Piecewise(f);
        assert!(u0.validate(&g).is_err());
    }

    #[test]
    fn mollified_point_keeps_mass_and_centroid() {
        let g = grid();
        let u0 = InitialField::point(7, 0.25, 1.0).mollified(&g);
        let mass = u0.mass(&g).unwrap();
        assert!((mass - 1.0).abs() < 1e-10, "{mass}");
    }
}
