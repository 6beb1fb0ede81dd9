//! Scenario configuration and the experiments exposed by the CLI.
//!
//! Every report embeds the fully resolved [`Scenario`] and a schema tag so
//! output files are self-describing.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{
    build_array, clamp_db, fraunhofer_distance, normalized_power_db, FocusedBeam, PowerReference, TxArray,
};
use crate::em::{FieldEvaluator, Medium, Model, Vec3, DEFAULT_QUADRATURE_ORDER};
use crate::error::{Error, Result};
use crate::multiaccess::{db_to_linear, heuristic_select_with_model, z_grid, UserSet};

pub const BEAM_SWEEP_SCHEMA: &str = "nearfield.beam-sweep.v1";
pub const SCHEDULE_SCHEMA: &str = "nearfield.schedule.v1";
pub const FRAUNHOFER_SCHEMA: &str = "nearfield.fraunhofer.v1";

/// Carrier, array geometry and model choice. λ is always derived as c/f.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub frequency_hz: f64,
    pub nx: usize,
    pub ny: usize,
    pub element_side_over_lambda: f64,
    pub spacing_over_lambda: f64,
    pub model: Model,
    pub quadrature_order: usize,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            frequency_hz: 30e9,
            nx: 20,
            ny: 200,
            element_side_over_lambda: 0.5,
            spacing_over_lambda: 0.5,
            model: Model::Near,
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
        }
    }
}

impl Scenario {
    /// Parses a flat TOML document using the field names of [`Scenario`].
    /// Missing keys take their defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| {
            let span = e.span().map(|s| line_of(text, s.start));
            let field = match span {
                Some(line) => format!("config line {line}"),
                None => "config".to_string(),
            };
            Error::config(field, e.message().trim().to_string())
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frequency_hz.is_finite() && self.frequency_hz > 0.0) {
            return Err(Error::config("frequency_hz", "must be finite and > 0"));
        }
        if self.nx == 0 {
            return Err(Error::config("nx", "must be >= 1"));
        }
        if self.ny == 0 {
            return Err(Error::config("ny", "must be >= 1"));
        }
        if !(self.spacing_over_lambda > 0.0 && self.spacing_over_lambda <= 1.0) {
            return Err(Error::config("spacing_over_lambda", "must lie in (0, 1]"));
        }
        if !(self.element_side_over_lambda > 0.0 && self.element_side_over_lambda <= 0.5) {
            return Err(Error::config("element_side_over_lambda", "must lie in (0, 0.5]"));
        }
        if self.element_side_over_lambda > self.spacing_over_lambda {
            return Err(Error::config(
                "element_side_over_lambda",
                "must not exceed spacing_over_lambda (overlapping elements)",
            ));
        }
        if self.quadrature_order == 0 {
            return Err(Error::config("quadrature_order", "must be >= 1"));
        }
        Ok(())
    }

    pub fn medium(&self) -> Result<Medium> {
        Medium::free_space(self.frequency_hz)
    }

    pub fn wavelength(&self) -> f64 {
        crate::em::SPEED_OF_LIGHT / self.frequency_hz
    }

    pub fn array(&self) -> Result<TxArray> {
        self.validate()?;
        let lambda = self.wavelength();
        build_array(
            self.nx,
            self.ny,
            self.element_side_over_lambda * lambda,
            self.spacing_over_lambda * lambda,
        )
    }

    fn evaluator(&self, medium: Medium, model: Model) -> Result<FieldEvaluator> {
        FieldEvaluator::new(medium, model, self.quadrature_order)
    }
}

fn line_of(text: &str, byte: usize) -> usize {
    text[..byte.min(text.len())].matches('\n').count() + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// Receiver at `(0, 0, d)`; the sweep variable is `d` in meters.
    Z,
    /// Receiver at `radius·(0, sin θ, cos θ)`, an arc in the YZ plane; the
    /// sweep variable is θ in degrees from broadside.
    Angle,
}

/// Evaluation grid for a beam sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub focus: [f64; 3],
    /// Arc radius for [`SweepAxis::Angle`]; defaults to `‖focus‖`.
    pub radius: Option<f64>,
}

impl SweepSpec {
    pub fn z_axis(focus_z: f64, start: f64, stop: f64, count: usize) -> Self {
        Self {
            axis: SweepAxis::Z,
            start,
            stop,
            count,
            focus: [0.0, 0.0, focus_z],
            radius: None,
        }
    }

    pub fn arc(focus_z: f64, start_deg: f64, stop_deg: f64, count: usize) -> Self {
        Self {
            axis: SweepAxis::Angle,
            start: start_deg,
            stop: stop_deg,
            count,
            focus: [0.0, 0.0, focus_z],
            radius: None,
        }
    }

    /// `count == 1` is a single point and needs `start == stop`; otherwise
    /// `start < stop`.
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::config("count", "must be >= 1"));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::config("start", "start and stop must be finite"));
        }
        if self.count == 1 && self.start != self.stop {
            return Err(Error::config("stop", "a single-point sweep needs start == stop"));
        }
        if self.count >= 2 && self.start >= self.stop {
            return Err(Error::config("start", "must be < stop"));
        }
        if self.focus.iter().any(|c| !c.is_finite()) {
            return Err(Error::config("focus", "must be finite"));
        }
        match self.axis {
            SweepAxis::Z => {
                if self.start <= 0.0 {
                    return Err(Error::config("start", "z sweep must stay in front of the array (z > 0)"));
                }
            }
            SweepAxis::Angle => {
                if self.start <= -90.0 || self.stop >= 90.0 {
                    return Err(Error::config("start", "angles must lie in (-90, 90) degrees"));
                }
                let r = self.arc_radius();
                if !(r > 0.0 && r.is_finite()) {
                    return Err(Error::config("radius", "must be finite and > 0"));
                }
            }
        }
        Ok(())
    }

    pub fn arc_radius(&self) -> f64 {
        self.radius.unwrap_or_else(|| Vec3::from(self.focus).norm())
    }

    /// `(sweep variable, position)` pairs.
    pub fn points(&self) -> Vec<(f64, Vec3)> {
        let params = z_grid(self.count, self.start, self.stop);
        match self.axis {
            SweepAxis::Z => params.into_iter().map(|d| (d, Vec3::new(0.0, 0.0, d))).collect(),
            SweepAxis::Angle => {
                let r = self.arc_radius();
                params
                    .into_iter()
                    .map(|deg| {
                        let t = deg.to_radians();
                        (deg, Vec3::new(0.0, r * t.sin(), r * t.cos()))
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// Distance (m) or angle (deg), depending on the axis.
    pub param: f64,
    pub position: [f64; 3],
    pub near_db: f64,
    pub far_db: f64,
    pub gap_db: f64,
    /// Present only when the scenario model is `exact`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_db: Option<f64>,
    /// True when any reported dB value hit the floor.
    pub floored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamSweepReport {
    pub schema: &'static str,
    pub scenario: Scenario,
    pub wavelength_m: f64,
    pub sweep: SweepSpec,
    pub reference: PowerReference,
    pub rows: Vec<SweepRow>,
}

impl BeamSweepReport {
    pub fn max_gap_db(&self) -> f64 {
        self.rows.iter().map(|r| r.gap_db).fold(0.0, f64::max)
    }
}

/// Normalized MF beam power of near and far models along a sweep.
///
/// Both curves use the same 0 dB anchor, the near-model power at the
/// reference position.
pub fn cmd_beam_sweep(scenario: &Scenario, sweep: &SweepSpec) -> Result<BeamSweepReport> {
    scenario.validate()?;
    sweep.validate()?;
    let medium = scenario.medium()?;
    let array = scenario.array()?;
    let reference = PowerReference::near_field(&array, &medium)?;
    let focus = Vec3::from(sweep.focus);

    let near = FocusedBeam::new(&array, &focus, scenario.evaluator(medium, Model::Near)?)?;
    let far = FocusedBeam::new(&array, &focus, scenario.evaluator(medium, Model::Far)?)?;
    let exact = if scenario.model == Model::Exact {
        Some(FocusedBeam::new(&array, &focus, scenario.evaluator(medium, Model::Exact)?)?)
    } else {
        None
    };

    let rows = sweep
        .points()
        .into_par_iter()
        .map(|(param, r)| {
            let (near_db, f1) = clamp_db(normalized_power_db(near.power_at(&r)?, &reference));
            let (far_db, f2) = clamp_db(normalized_power_db(far.power_at(&r)?, &reference));
            let (exact_db, f3) = match &exact {
                Some(beam) => {
                    let (v, f) = clamp_db(normalized_power_db(beam.power_at(&r)?, &reference));
                    (Some(v), f)
                }
                None => (None, false),
            };
            Ok(SweepRow {
                param,
                position: r.into(),
                near_db,
                far_db,
                gap_db: (near_db - far_db).abs(),
                exact_db,
                floored: f1 || f2 || f3,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(BeamSweepReport {
        schema: BEAM_SWEEP_SCHEMA,
        scenario: scenario.clone(),
        wavelength_m: scenario.wavelength(),
        sweep: sweep.clone(),
        reference,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectedUser {
    pub index: usize,
    pub position: [f64; 3],
    pub distance_m: f64,
}

/// Normalized power along the user grid with the beam focused on one
/// selected user.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerProfile {
    pub user_index: usize,
    pub power_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleReport {
    pub schema: &'static str,
    pub scenario: Scenario,
    pub wavelength_m: f64,
    pub k: usize,
    pub d_min_m: f64,
    pub d_max_m: f64,
    pub gamma_db: f64,
    pub gamma_linear: f64,
    pub model: Model,
    /// User z-coordinates; also the abscissa of every power profile.
    pub grid_m: Vec<f64>,
    pub selected_count: usize,
    pub selected: Vec<SelectedUser>,
    /// Smallest pairwise SIR among selected users; `null` when fewer than
    /// two are selected or every pair is orthogonal.
    pub min_selected_sir_db: Option<f64>,
    /// Pairwise SIR in dB; `null` marks an infinite SIR.
    pub sir_matrix_db: Vec<Vec<Option<f64>>>,
    /// Profiles normalized to 0 dB at the selected user closest to the array.
    pub profiles: Vec<PowerProfile>,
}

/// Greedy scheduling of `k` users equally spaced on the Z axis.
pub fn cmd_schedule(scenario: &Scenario, k: usize, d_min: f64, d_max: f64, gamma_db: f64) -> Result<ScheduleReport> {
    scenario.validate()?;
    if !gamma_db.is_finite() {
        return Err(Error::config("gamma_db", "must be finite"));
    }
    let medium = scenario.medium()?;
    let array = scenario.array()?;
    let users = if k == 1 {
        if !(d_min > 0.0 && d_min.is_finite()) {
            return Err(Error::config("d_min", "must be finite and > 0"));
        }
        UserSet::new(vec![Vec3::new(0.0, 0.0, d_min)])?
    } else {
        UserSet::on_z_axis(k, d_min, d_max)?
    };
    let model = scenario.model;
    let result = heuristic_select_with_model(&users, gamma_db, &array, &medium, model)?;

    let selected: Vec<SelectedUser> = result
        .selected
        .iter()
        .map(|&i| {
            let p = users.positions()[i];
            SelectedUser {
                index: i,
                position: p.into(),
                distance_m: p.norm(),
            }
        })
        .collect();

    // Selection order is nearest first, so the anchor is the first pick.
    let anchor = users.positions()[result.selected[0]];
    let anchor_beam = FocusedBeam::new(&array, &anchor, scenario.evaluator(medium, model)?)?;
    let reference = PowerReference::from_power(anchor_beam.power_at(&anchor)?);
    let profiles = result
        .selected
        .par_iter()
        .map(|&i| {
            let beam = FocusedBeam::new(&array, &users.positions()[i], scenario.evaluator(medium, model)?)?;
            let power_db = users
                .positions()
                .iter()
                .map(|r| Ok(clamp_db(normalized_power_db(beam.power_at(r)?, &reference)).0))
                .collect::<Result<Vec<_>>>()?;
            Ok(PowerProfile { user_index: i, power_db })
        })
        .collect::<Result<Vec<_>>>()?;

    let min_sir = result.min_selected_sir();
    Ok(ScheduleReport {
        schema: SCHEDULE_SCHEMA,
        scenario: scenario.clone(),
        wavelength_m: scenario.wavelength(),
        k,
        d_min_m: d_min,
        d_max_m: if k == 1 { d_min } else { d_max },
        gamma_db,
        gamma_linear: db_to_linear(gamma_db),
        model,
        grid_m: users.positions().iter().map(|p| p.z).collect(),
        selected_count: selected.len(),
        selected,
        min_selected_sir_db: min_sir.is_finite().then(|| 10.0 * min_sir.log10()),
        sir_matrix_db: result.sir_matrix.to_db(),
        profiles,
    })
}

/// Half of the uniform-aperture half-power beamwidth, `0.886·λ/L`.
const HALF_POWER_HALF_WIDTH: f64 = 0.443;

/// Half-power half-width of the broadside main lobe in the YZ plane, in
/// degrees: `asin(0.443·λ/L_y)` with `L_y = N_y·Δ`.
pub fn main_lobe_half_width_deg(array: &TxArray, medium: &Medium) -> f64 {
    let ly = array.ny as f64 * array.spacing;
    (HALF_POWER_HALF_WIDTH * medium.wavelength / ly).min(1.0).asin().to_degrees()
}

/// Points used for broadside gap measurements.
pub const GAP_SWEEP_POINTS: usize = 201;

/// Near/far sweep over the half-power main lobe, on an arc of radius `d`
/// with both beams focused at `(0, 0, d)`. The angular window depends on the
/// array only, so it is the same for every `d`.
pub fn broadside_main_lobe_gap(scenario: &Scenario, d: f64) -> Result<BeamSweepReport> {
    let medium = scenario.medium()?;
    let array = scenario.array()?;
    let half = main_lobe_half_width_deg(&array, &medium);
    let sweep = SweepSpec::arc(d, -half, half, GAP_SWEEP_POINTS);
    let mut near_far = scenario.clone();
    near_far.model = Model::Near;
    cmd_beam_sweep(&near_far, &sweep)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapAtDistance {
    pub fraunhofer_fraction: f64,
    pub distance_m: f64,
    pub max_gap_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FraunhoferReport {
    pub schema: &'static str,
    pub scenario: Scenario,
    pub wavelength_m: f64,
    pub aperture_diagonal_m: f64,
    pub fraunhofer_distance_m: f64,
    /// Half-width (degrees) of the broadside arc over which gaps are taken.
    pub main_lobe_half_width_deg: f64,
    pub gaps: Vec<GapAtDistance>,
}

pub const FRAUNHOFER_FRACTIONS: [f64; 3] = [0.01, 0.1, 1.0];

pub fn cmd_fraunhofer(scenario: &Scenario) -> Result<FraunhoferReport> {
    cmd_fraunhofer_at(scenario, &FRAUNHOFER_FRACTIONS)
}

/// Fraunhofer diagnostic with near/far gaps at chosen fractions of `2D²/λ`.
pub fn cmd_fraunhofer_at(scenario: &Scenario, fractions: &[f64]) -> Result<FraunhoferReport> {
    scenario.validate()?;
    let medium = scenario.medium()?;
    let array = scenario.array()?;
    let f = fraunhofer_distance(&array, &medium);
    let gaps = fractions
        .iter()
        .map(|&fraction| {
            let d = fraction * f.distance;
            Ok(GapAtDistance {
                fraunhofer_fraction: fraction,
                distance_m: d,
                max_gap_db: broadside_main_lobe_gap(scenario, d)?.max_gap_db(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FraunhoferReport {
        schema: FRAUNHOFER_SCHEMA,
        scenario: scenario.clone(),
        wavelength_m: medium.wavelength,
        aperture_diagonal_m: f.aperture_diagonal,
        fraunhofer_distance_m: f.distance,
        main_lobe_half_width_deg: main_lobe_half_width_deg(&array, &medium),
        gaps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

fn fmt_num(v: f64) -> String {
    format!("{v:.9e}")
}

fn write_scenario_preamble<W: Write>(out: &mut W, schema: &str, scenario: &Scenario) -> std::io::Result<()> {
    writeln!(out, "# schema = {schema}")?;
    for line in scenario.to_toml_string().lines() {
        writeln!(out, "# {line}")?;
    }
    Ok(())
}

fn write_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(std::io::Error::other)?;
    writeln!(out)
}

impl BeamSweepReport {
    pub fn write<W: Write>(&self, out: &mut W, format: OutputFormat) -> std::io::Result<()> {
        match format {
            OutputFormat::Json => write_json(out, self),
            OutputFormat::Csv => {
                write_scenario_preamble(out, self.schema, &self.scenario)?;
                let axis = match self.sweep.axis {
                    SweepAxis::Z => "z",
                    SweepAxis::Angle => "angle",
                };
                let [fx, fy, fz] = self.sweep.focus;
                writeln!(
                    out,
                    "# sweep: axis={axis} start={} stop={} count={} focus=({fx},{fy},{fz}) radius={}",
                    self.sweep.start,
                    self.sweep.stop,
                    self.sweep.count,
                    self.sweep.arc_radius()
                )?;
                writeln!(out, "# reference_power = {}", fmt_num(self.reference.power))?;
                let param = match self.sweep.axis {
                    SweepAxis::Z => "d_m",
                    SweepAxis::Angle => "angle_deg",
                };
                let exact = self.scenario.model == Model::Exact;
                write!(out, "{param},x_m,y_m,z_m,near_db,far_db,gap_db")?;
                if exact {
                    write!(out, ",exact_db")?;
                }
                writeln!(out, ",floored")?;
                for r in &self.rows {
                    write!(
                        out,
                        "{},{},{},{},{:.6},{:.6},{:.6}",
                        fmt_num(r.param),
                        fmt_num(r.position[0]),
                        fmt_num(r.position[1]),
                        fmt_num(r.position[2]),
                        r.near_db,
                        r.far_db,
                        r.gap_db
                    )?;
                    if let Some(e) = r.exact_db {
                        write!(out, ",{e:.6}")?;
                    }
                    writeln!(out, ",{}", u8::from(r.floored))?;
                }
                Ok(())
            }
        }
    }
}

impl ScheduleReport {
    pub fn write<W: Write>(&self, out: &mut W, format: OutputFormat) -> std::io::Result<()> {
        match format {
            OutputFormat::Json => write_json(out, self),
            OutputFormat::Csv => {
                write_scenario_preamble(out, self.schema, &self.scenario)?;
                writeln!(
                    out,
                    "# k = {} d_min_m = {} d_max_m = {} gamma_db = {} model = {} selected_count = {}",
                    self.k, self.d_min_m, self.d_max_m, self.gamma_db, self.model, self.selected_count
                )?;
                writeln!(out, "index,x_m,y_m,z_m,distance_m")?;
                for s in &self.selected {
                    writeln!(
                        out,
                        "{},{},{},{},{}",
                        s.index,
                        fmt_num(s.position[0]),
                        fmt_num(s.position[1]),
                        fmt_num(s.position[2]),
                        fmt_num(s.distance_m)
                    )?;
                }
                Ok(())
            }
        }
    }
}

impl FraunhoferReport {
    pub fn write<W: Write>(&self, out: &mut W, format: OutputFormat) -> std::io::Result<()> {
        match format {
            OutputFormat::Json => write_json(out, self),
            OutputFormat::Csv => {
                write_scenario_preamble(out, self.schema, &self.scenario)?;
                writeln!(out, "# aperture_diagonal_m = {}", fmt_num(self.aperture_diagonal_m))?;
                writeln!(out, "# fraunhofer_distance_m = {}", fmt_num(self.fraunhofer_distance_m))?;
                writeln!(out, "fraunhofer_fraction,distance_m,max_gap_db")?;
                for g in &self.gaps {
                    writeln!(out, "{},{},{:.6}", g.fraunhofer_fraction, fmt_num(g.distance_m), g.max_gap_db)?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Scenario {
        Scenario {
            nx: 4,
            ny: 20,
            ..Scenario::default()
        }
    }

    #[test]
    fn defaults_are_the_reference_configuration() {
        let s = Scenario::default();
        assert_eq!((s.nx, s.ny, s.quadrature_order, s.model), (20, 200, 8, Model::Near));
        assert_eq!(s.frequency_hz, 30e9);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn toml_round_trip_and_partial_files() {
        let s = Scenario::from_toml_str("nx = 8\nmodel = \"far\"\n").unwrap();
        assert_eq!(s.nx, 8);
        assert_eq!(s.model, Model::Far);
        assert_eq!(s.ny, 200);
        assert_eq!(Scenario::from_toml_str(&s.to_toml_string()).unwrap(), s);
    }

    #[test]
    fn toml_errors_name_line_or_field() {
        let err = Scenario::from_toml_str("nx = 8\nbogus = 1\n").unwrap_err();
        match err {
            Error::Config { field, reason } => {
                assert_eq!(field, "config line 2");
                assert!(reason.contains("bogus"), "{reason}");
            }
            other => panic!("{other:?}"),
        }
        let err = Scenario::from_toml_str("spacing_over_lambda = 1.5\n").unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "spacing_over_lambda"));
        let err = Scenario::from_toml_str("element_side_over_lambda = 0.5\nspacing_over_lambda = 0.4\n").unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "element_side_over_lambda"));
    }

    #[test]
    fn sweep_validation() {
        assert!(SweepSpec::z_axis(0.1, 0.2, 0.1, 5).validate().is_err());
        assert!(SweepSpec::z_axis(0.1, 0.0, 0.1, 5).validate().is_err());
        assert!(SweepSpec::z_axis(0.1, 0.1, 0.2, 1).validate().is_err());
        assert!(SweepSpec::z_axis(0.1, 0.1, 0.1, 1).validate().is_ok());
        assert!(SweepSpec::arc(1.0, -95.0, 10.0, 5).validate().is_err());
        let pts = SweepSpec::arc(2.0, -30.0, 30.0, 3).points();
        assert!((pts[0].1 - Vec3::new(0.0, -1.0, 3f64.sqrt())).norm() < 1e-12);
        assert_eq!(pts[1].1, Vec3::new(0.0, 0.0, 2.0));
    }

    #[test]
    fn single_point_sweep_at_reference_is_zero_db() {
        let rep = cmd_beam_sweep(&small(), &SweepSpec::z_axis(0.1, 0.1, 0.1, 1)).unwrap();
        assert_eq!(rep.rows.len(), 1);
        assert!(rep.rows[0].near_db.abs() < 1e-9);
        assert!((rep.rows[0].gap_db - (rep.rows[0].far_db - rep.rows[0].near_db).abs()).abs() < 1e-12);
    }

    #[test]
    fn exact_column_only_for_exact_model() {
        let mut s = Scenario {
            nx: 2,
            ny: 4,
            quadrature_order: 4,
            ..Scenario::default()
        };
        let sweep = SweepSpec::z_axis(0.2, 0.1, 0.3, 3);
        let rep = cmd_beam_sweep(&s, &sweep).unwrap();
        assert!(rep.rows.iter().all(|r| r.exact_db.is_none()));
        s.model = Model::Exact;
        let rep = cmd_beam_sweep(&s, &sweep).unwrap();
        assert!(rep.rows.iter().all(|r| r.exact_db.is_some()));
        let mut buf = Vec::new();
        rep.write(&mut buf, OutputFormat::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("d_m,x_m,y_m,z_m,near_db,far_db,gap_db,exact_db,floored"));
    }

    #[test]
    fn schedule_single_user() {
        let rep = cmd_schedule(&small(), 1, 0.5, 0.5, 18.0).unwrap();
        assert_eq!(rep.selected_count, 1);
        assert_eq!(rep.selected[0].index, 0);
        assert_eq!(rep.profiles[0].power_db, vec![0.0]);
        assert_eq!(rep.min_selected_sir_db, None);
    }

    #[test]
    fn schedule_profiles_anchor_at_nearest_selected() {
        let rep = cmd_schedule(&small(), 10, 0.05, 0.5, 3.0).unwrap();
        let first = rep.selected[0].index;
        assert!(rep.profiles[0].power_db[first].abs() < 1e-9);
        for w in rep.selected.windows(2) {
            assert!(w[0].distance_m < w[1].distance_m);
        }
    }
}
