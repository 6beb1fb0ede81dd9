//! Uniform planar transmit array, channel vectors and matched-filter
//! beamforming.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::em::{FieldEvaluator, Medium, Model, PatchElement, Vec3, DEFAULT_QUADRATURE_ORDER};
use crate::error::{Error, Result};

/// Rectangular grid of identical patches in the z = 0 plane, centered at the
/// origin.
///
/// Element `n = iy·nx + ix` sits at
/// `((ix − (nx−1)/2)·Δ, (iy − (ny−1)/2)·Δ, 0)`: row-major with x varying
/// fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TxArray {
    pub nx: usize,
    pub ny: usize,
    pub element_side: f64,
    pub spacing: f64,
    elements: Vec<PatchElement>,
}

/// Builds the uniform planar array. Requires `element_side ≤ spacing`.
pub fn build_array(nx: usize, ny: usize, element_side: f64, spacing: f64) -> Result<TxArray> {
    if nx == 0 {
        return Err(Error::config("nx", "must be >= 1"));
    }
    if ny == 0 {
        return Err(Error::config("ny", "must be >= 1"));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::config("spacing", "must be finite and > 0"));
    }
    if element_side > spacing {
        return Err(Error::OverlappingElements {
            side: element_side,
            spacing,
        });
    }
    let x0 = 0.5 * (nx as f64 - 1.0);
    let y0 = 0.5 * (ny as f64 - 1.0);
    let mut elements = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let c = Vec3::new((ix as f64 - x0) * spacing, (iy as f64 - y0) * spacing, 0.0);
            elements.push(PatchElement::new(c, element_side)?);
        }
    }
    Ok(TxArray {
        nx,
        ny,
        element_side,
        spacing,
        elements,
    })
}

impl TxArray {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PatchElement] {
        &self.elements
    }

    /// Center-to-center extents `((nx−1)Δ, (ny−1)Δ)`.
    pub fn center_extents(&self) -> (f64, f64) {
        (
            (self.nx as f64 - 1.0) * self.spacing,
            (self.ny as f64 - 1.0) * self.spacing,
        )
    }

    /// Physical aperture extents, edge to edge: `(n−1)Δ + a` per axis.
    pub fn aperture_extents(&self) -> (f64, f64) {
        let (cx, cy) = self.center_extents();
        (cx + self.element_side, cy + self.element_side)
    }

    /// Same array with its elements listed in a different order. Used to
    /// check that nothing downstream depends on element labels.
    pub fn permuted(&self, order: &[usize]) -> Result<TxArray> {
        if order.len() != self.len() {
            return Err(Error::LengthMismatch {
                left: order.len(),
                right: self.len(),
            });
        }
        let mut seen = vec![false; self.len()];
        let mut elements = Vec::with_capacity(self.len());
        for &i in order {
            if i >= self.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::config("order", "not a permutation"));
            }
            elements.push(self.elements[i]);
        }
        Ok(TxArray { elements, ..self.clone() })
    }
}

/// `g(r) = [g₁(r), …, g_N(r)]ᵀ` for one model.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    pub entries: Vec<Complex64>,
    pub model: Model,
    pub rx_position: Vec3,
}

impl ChannelVector {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|g| g.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `ĝ = g/‖g‖`.
    pub fn normalized(&self) -> Result<Vec<Complex64>> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NullChannel);
        }
        Ok(self.entries.iter().map(|g| g / n).collect())
    }
}

/// Channel vector with the default quadrature order for the exact model.
pub fn channel_vector(array: &TxArray, r: &Vec3, medium: &Medium, model: Model) -> Result<ChannelVector> {
    let eval = FieldEvaluator::new(*medium, model, DEFAULT_QUADRATURE_ORDER)?;
    channel_vector_with(array, r, &eval)
}

pub fn channel_vector_with(array: &TxArray, r: &Vec3, eval: &FieldEvaluator) -> Result<ChannelVector> {
    let field = |(index, elem): (usize, &PatchElement)| {
        eval.field(r, elem).map_err(|e| Error::Element {
            index,
            source: Box::new(e),
        })
    };
    let entries = if eval.model() == Model::Exact {
        array.elements.par_iter().enumerate().map(field).collect::<Result<Vec<_>>>()?
    } else {
        array.elements.iter().enumerate().map(field).collect::<Result<Vec<_>>>()?
    };
    Ok(ChannelVector {
        entries,
        model: eval.model(),
        rx_position: *r,
    })
}

/// Unit-power transmit excitation.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub weights: Vec<Complex64>,
    pub focus: Vec3,
}

impl Beamformer {
    pub fn power(&self) -> f64 {
        self.weights.iter().map(|w| w.norm_sqr()).sum()
    }
}

/// `Jₙ = gₙ*/‖g‖`.
pub fn mf_beamformer(g: &ChannelVector) -> Result<Beamformer> {
    let unit = g.normalized()?;
    Ok(Beamformer {
        weights: unit.into_iter().map(|w| w.conj()).collect(),
        focus: g.rx_position,
    })
}

/// `P = a²·|Σₙ Jₙ gₙ|²`.
pub fn received_power(bf: &Beamformer, g_eval: &ChannelVector, element_side: f64) -> Result<f64> {
    if bf.weights.len() != g_eval.len() {
        return Err(Error::LengthMismatch {
            left: bf.weights.len(),
            right: g_eval.len(),
        });
    }
    let field: Complex64 = bf.weights.iter().zip(&g_eval.entries).map(|(w, g)| w * g).sum();
    Ok(element_side * element_side * field.norm_sqr())
}

/// `|ĝ(r)ᴴĝ(r′)|²`, in `[0, 1]`.
pub fn inner_product_factor(a: &ChannelVector, b: &ChannelVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let ua = a.normalized()?;
    let ub = b.normalized()?;
    let ip: Complex64 = ua.iter().zip(&ub).map(|(x, y)| x.conj() * y).sum();
    Ok(ip.norm_sqr())
}

/// A matched-filter beam focused at one position, reusable across many
/// evaluation points.
#[derive(Debug, Clone)]
pub struct FocusedBeam<'a> {
    array: &'a TxArray,
    eval: FieldEvaluator,
    beamformer: Beamformer,
}

impl<'a> FocusedBeam<'a> {
    pub fn new(array: &'a TxArray, focus: &Vec3, eval: FieldEvaluator) -> Result<Self> {
        let g = channel_vector_with(array, focus, &eval)?;
        let beamformer = mf_beamformer(&g)?;
        Ok(Self { array, eval, beamformer })
    }

    pub fn beamformer(&self) -> &Beamformer {
        &self.beamformer
    }

    /// `P_E(r_focus, r_eval)`.
    pub fn power_at(&self, r_eval: &Vec3) -> Result<f64> {
        let g = channel_vector_with(self.array, r_eval, &self.eval)?;
        received_power(&self.beamformer, &g, self.array.element_side)
    }
}

/// `P_E(r, r′) = a²‖g(r′)‖²|ĝ(r)ᴴĝ(r′)|²` with a matched filter focused at
/// `r_focus`.
pub fn beam_power(r_focus: &Vec3, r_eval: &Vec3, array: &TxArray, medium: &Medium, model: Model) -> Result<f64> {
    let eval = FieldEvaluator::new(*medium, model, DEFAULT_QUADRATURE_ORDER)?;
    FocusedBeam::new(array, r_focus, eval)?.power_at(r_eval)
}

/// Focus used as the 0 dB anchor for normalized power.
pub const REFERENCE_POSITION: [f64; 3] = [0.0, 0.0, 0.1];

/// Lowest dB value written to result files.
pub const DB_FLOOR: f64 = -200.0;

/// Reference power `P_E(r_u, r_u)` under the near model. All curves, far
/// model included, share this one anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerReference {
    pub position: [f64; 3],
    pub power: f64,
}

impl PowerReference {
    pub fn near_field(array: &TxArray, medium: &Medium) -> Result<Self> {
        Self::near_field_at(array, medium, Vec3::from(REFERENCE_POSITION))
    }

    pub fn near_field_at(array: &TxArray, medium: &Medium, position: Vec3) -> Result<Self> {
        let power = beam_power(&position, &position, array, medium, Model::Near)?;
        Ok(Self {
            position: position.into(),
            power,
        })
    }

    pub fn from_power(power: f64) -> Self {
        Self {
            position: [f64::NAN; 3],
            power,
        }
    }
}

/// `10·log₁₀(p/p_ref)`. Returns `-∞` for `p ≤ 0`; use [`clamp_db`] before
/// writing it out.
pub fn normalized_power_db(p: f64, reference: &PowerReference) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    10.0 * (p / reference.power).log10()
}

/// Clamps to [`DB_FLOOR`]. The flag is true when the floor was applied.
pub fn clamp_db(db: f64) -> (f64, bool) {
    if db < DB_FLOOR || db.is_nan() {
        (DB_FLOOR, true)
    } else {
        (db, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fraunhofer {
    /// Aperture diagonal D in meters.
    pub aperture_diagonal: f64,
    /// 2D²/λ in meters.
    pub distance: f64,
}

/// Fraunhofer distance `2D²/λ`, with D the edge-to-edge diagonal of the
/// aperture. For `a = Δ` this is `Δ·√(N_x² + N_y²)`.
pub fn fraunhofer_distance(array: &TxArray, medium: &Medium) -> Fraunhofer {
    let (lx, ly) = array.aperture_extents();
    let d = lx.hypot(ly);
    Fraunhofer {
        aperture_diagonal: d,
        distance: 2.0 * d * d / medium.wavelength,
    }
}
