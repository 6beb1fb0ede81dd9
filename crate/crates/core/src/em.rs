//! Point-to-point propagation kernels and per-element field evaluation.
//!
//! Three kernels are provided, all restricted to the Y-polarized
//! transmit/receive chain except [`green_exact`], which returns the full
//! dyad:
//!
//! * [`green_exact`]: the free-space dyadic Green's function with its
//!   radiative (1/r), induction (1/r²) and quasi-static (1/r³) terms.
//! * [`kernel_near`]: the radiative term only, evaluated at the exact
//!   source-receiver displacement (spherical wavefront).
//! * [`kernel_far`]: the radiative term with the source position linearized
//!   around the array center (planar wavefront, phase-only dependence on the
//!   source).
//!
//! Time convention is `e^{+j2πft}`, so outgoing waves carry `e^{-jkr}`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

pub type Vec3 = Vector3<f64>;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Characteristic impedance of free space, Ω.
pub const FREE_SPACE_IMPEDANCE: f64 = 376.730_313_668;

/// Monochromatic, homogeneous, isotropic medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    /// η = √(μ/ε) in ohms.
    pub impedance: f64,
    /// λ in meters.
    pub wavelength: f64,
    /// f in hertz.
    pub frequency: f64,
}

impl Medium {
    /// Free-space medium at carrier `frequency`; λ = c/f.
    pub fn free_space(frequency: f64) -> Result<Self> {
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(Error::config("frequency_hz", "must be finite and > 0"));
        }
        Ok(Self {
            impedance: FREE_SPACE_IMPEDANCE,
            wavelength: SPEED_OF_LIGHT / frequency,
            frequency,
        })
    }

    /// Medium with an explicit wavelength and impedance. The frequency is
    /// the free-space one for that wavelength.
    pub fn with_wavelength(wavelength: f64, impedance: f64) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::config("wavelength", "must be finite and > 0"));
        }
        if !(impedance.is_finite() && impedance > 0.0) {
            return Err(Error::config("impedance", "must be finite and > 0"));
        }
        Ok(Self {
            impedance,
            wavelength,
            frequency: SPEED_OF_LIGHT / wavelength,
        })
    }

    /// Wavenumber 2π/λ.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// `-jη/(2λ) · e^{-j2π·dist/λ}`, the factor shared by every term of
    /// the Green's function.
    fn outgoing_wave(&self, dist: f64) -> Complex64 {
        Complex64::new(0.0, -self.impedance / (2.0 * self.wavelength))
            * Complex64::from_polar(1.0, -self.wavenumber() * dist)
    }
}

/// Which kernel approximates the Green's function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Exact,
    Near,
    Far,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Exact => "exact",
            Model::Near => "near",
            Model::Far => "far",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Model::Exact),
            "near" => Ok(Model::Near),
            "far" => Ok(Model::Far),
            other => Err(Error::config("model", format!("unknown model {other:?} (exact|near|far)"))),
        }
    }
}

/// A 3×3 complex dyad. Every dyad built here has the form `αI + βx̂x̂ᵀ` and
/// is therefore symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexDyad(pub Matrix3<Complex64>);

impl ComplexDyad {
    /// `alpha·I + beta·x̂x̂ᵀ`.
    fn isotropic_plus_outer(alpha: Complex64, beta: Complex64, unit: &Vec3) -> Self {
        let mut m = Matrix3::from_element(Complex64::new(0.0, 0.0));
        for i in 0..3 {
            for j in 0..3 {
                let delta = if i == j { 1.0 } else { 0.0 };
                m[(i, j)] = alpha * delta + beta * (unit[i] * unit[j]);
            }
        }
        ComplexDyad(m)
    }

    pub fn yy(&self) -> Complex64 {
        self.0[(1, 1)]
    }

    pub fn transpose(&self) -> Self {
        ComplexDyad(self.0.transpose())
    }
}

impl std::ops::Add for ComplexDyad {
    type Output = ComplexDyad;
    fn add(self, rhs: Self) -> Self {
        ComplexDyad(self.0 + rhs.0)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexDyad {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

/// The three terms of the dyadic Green's function, each already multiplied
/// by the common outgoing-wave factor.
#[derive(Debug, Clone, Copy)]
pub struct GreenTerms {
    /// `(1/‖x‖)(I − x̂x̂ᵀ)`
    pub radiative: ComplexDyad,
    /// `(jλ/(2π‖x‖²))(I − 3x̂x̂ᵀ)`
    pub induction: ComplexDyad,
    /// `−(λ²/(4π²‖x‖³))(I − 3x̂x̂ᵀ)`
    pub quasi_static: ComplexDyad,
}

impl GreenTerms {
    pub fn total(&self) -> ComplexDyad {
        self.radiative + self.induction + self.quasi_static
    }
}

fn checked_norm(x: &Vec3) -> Result<f64> {
    let n = x.norm();
    if n > 0.0 && n.is_finite() {
        Ok(n)
    } else if n == 0.0 {
        Err(Error::SingularDisplacement("kernel undefined at the source point"))
    } else {
        Err(Error::SingularDisplacement("non-finite displacement"))
    }
}

/// Term-by-term dyadic Green's function at displacement `x = r − s`.
pub fn green_terms(x: &Vec3, medium: &Medium) -> Result<GreenTerms> {
    let dist = checked_norm(x)?;
    let unit = Vec3::new(x.x / dist, x.y / dist, x.z / dist);
    let lambda = medium.wavelength;
    let wave = medium.outgoing_wave(dist);

    let c1 = wave * (1.0 / dist);
    let c2 = wave * Complex64::new(0.0, lambda / (2.0 * PI * dist * dist));
    let c3 = wave * (-(lambda * lambda) / (4.0 * PI * PI * dist * dist * dist));

    // The radiative yy entry is built exactly as in `kernel_near` so the two
    // agree bit for bit.
    let mut radiative = ComplexDyad::isotropic_plus_outer(c1, -c1, &unit);
    for i in 0..3 {
        radiative.0[(i, i)] = wave * ((1.0 - unit[i] * unit[i]) / dist);
    }

    Ok(GreenTerms {
        radiative,
        induction: ComplexDyad::isotropic_plus_outer(c2, c2 * -3.0, &unit),
        quasi_static: ComplexDyad::isotropic_plus_outer(c3, c3 * -3.0, &unit),
    })
}

/// Full dyadic Green's function `G₀(x)`, `x = r − s`.
pub fn green_exact(x: &Vec3, medium: &Medium) -> Result<ComplexDyad> {
    Ok(green_terms(x, medium)?.total())
}

/// yy entry of [`green_exact`] without assembling the other eight.
pub fn green_exact_yy(x: &Vec3, medium: &Medium) -> Result<Complex64> {
    let dist = checked_norm(x)?;
    let uy = x.y / dist;
    let lambda = medium.wavelength;
    let wave = medium.outgoing_wave(dist);
    let radiative = wave * ((1.0 - uy * uy) / dist);
    let polar = 1.0 - 3.0 * uy * uy;
    let induction = wave * Complex64::new(0.0, lambda / (2.0 * PI * dist * dist)) * polar;
    let quasi_static = wave * (-(lambda * lambda) / (4.0 * PI * PI * dist * dist * dist)) * polar;
    Ok(radiative + induction + quasi_static)
}

/// Near-field (spherical-wavefront) kernel, yy component.
pub fn kernel_near(r: &Vec3, s: &Vec3, medium: &Medium) -> Result<Complex64> {
    let x = r - s;
    let dist = checked_norm(&x)?;
    let uy = x.y / dist;
    Ok(medium.outgoing_wave(dist) * ((1.0 - uy * uy) / dist))
}

/// Far-field (planar-wavefront) kernel, yy component. The source enters
/// only through the phase `e^{+j(2π/λ) r̂ᵀs}`.
pub fn kernel_far(r: &Vec3, s: &Vec3, medium: &Medium) -> Result<Complex64> {
    let dist = checked_norm(r)?;
    let unit = Vec3::new(r.x / dist, r.y / dist, r.z / dist);
    let uy = unit.y;
    let steering = Complex64::from_polar(1.0, medium.wavenumber() * unit.dot(s));
    Ok(medium.outgoing_wave(dist) * ((1.0 - uy * uy) / dist) * steering)
}

/// Square, Y-polarized patch in a plane of constant z with normal +Z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchElement {
    pub center: Vec3,
    /// Side length `a` in meters.
    pub side: f64,
}

impl PatchElement {
    pub fn new(center: Vec3, side: f64) -> Result<Self> {
        if !(side.is_finite() && side > 0.0) {
            return Err(Error::config("element_side", "must be finite and > 0"));
        }
        Ok(Self { center, side })
    }

    /// Patches must be electrically small: `a ≤ λ/2`.
    pub fn check_small(&self, medium: &Medium) -> Result<()> {
        if self.side > 0.5 * medium.wavelength * (1.0 + 1e-12) {
            return Err(Error::config(
                "element_side",
                format!("{} m exceeds half a wavelength ({} m)", self.side, 0.5 * medium.wavelength),
            ));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    /// True when `r` lies on the closed patch surface.
    pub fn contains(&self, r: &Vec3) -> bool {
        let half = 0.5 * self.side;
        r.z == self.center.z && (r.x - self.center.x).abs() <= half && (r.y - self.center.y).abs() <= half
    }
}

/// Default tensor Gauss–Legendre order for the exact model.
pub const DEFAULT_QUADRATURE_ORDER: usize = 8;

/// Evaluates `gₙ(r) = ∫ G(r, s) ds` over a patch for one model.
///
/// The exact model integrates the yy entry of the Green's function with an
/// `order × order` tensor Gauss–Legendre rule. The near and far models use
/// the constant-field closed form `a²·G(r, sₙ)`.
#[derive(Debug, Clone)]
pub struct FieldEvaluator {
    medium: Medium,
    model: Model,
    rule: Option<GaussLegendre>,
}

impl FieldEvaluator {
    pub fn new(medium: Medium, model: Model, quadrature_order: usize) -> Result<Self> {
        if quadrature_order < 1 {
            return Err(Error::config("quadrature_order", "must be >= 1"));
        }
        let rule = (model == Model::Exact).then(|| GaussLegendre::new(quadrature_order));
        Ok(Self { medium, model, rule })
    }

    pub fn medium(&self) -> &Medium {
        &self.medium
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn field(&self, r: &Vec3, elem: &PatchElement) -> Result<Complex64> {
        match self.model {
            Model::Near => Ok(kernel_near(r, &elem.center, &self.medium)? * elem.area()),
            Model::Far => Ok(kernel_far(r, &elem.center, &self.medium)? * elem.area()),
            Model::Exact => {
                if elem.contains(r) {
                    return Err(Error::SingularDisplacement("receiver lies on the patch surface"));
                }
                let rule = self.rule.as_ref().expect("exact model carries a rule");
                let mut acc = Complex64::new(0.0, 0.0);
                for (sx, sy, w) in rule.square_rule(elem.center.x, elem.center.y, elem.side) {
                    let x = Vec3::new(r.x - sx, r.y - sy, r.z - elem.center.z);
                    acc += green_exact_yy(&x, &self.medium)? * w;
                }
                Ok(acc)
            }
        }
    }
}

/// One-shot convenience wrapper around [`FieldEvaluator`].
pub fn element_field(
    r: &Vec3,
    elem: &PatchElement,
    medium: &Medium,
    model: Model,
    quadrature_order: usize,
) -> Result<Complex64> {
    FieldEvaluator::new(*medium, model, quadrature_order)?.field(r, elem)
}
