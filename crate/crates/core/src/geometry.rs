//! Radar scene geometry and the discretized range-azimuth candidate grid.
//!
//! The radar sits at the origin with its array broadside along the x-axis.
//! Every angle is measured counter-clockwise from the x-axis in this single
//! global frame, and surface arrays are assumed to share that broadside, so
//! the angles computed here feed the steering vectors unchanged.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance below which a surface is considered to sit on the target.
pub const COINCIDENCE_TOL: f64 = 1e-9;

/// Grid cells closer than this to the target are dropped from the grid.
pub const GRID_EXCLUSION_RADIUS: f64 = 1e-6;

// Slack on the K_θ·μ ≤ 2π check so that μ = 2π/K_θ typed as a decimal passes.
const WRAP_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point2D { x, y }
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }

    /// Angle of the vector `self -> other`, in [0, 2π).
    pub fn bearing_to(&self, other: &Point2D) -> f64 {
        wrap_angle((other.y - self.y).atan2(other.x - self.x))
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Maps an angle onto [0, 2π).
pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Converts polar coordinates around the radar into Cartesian ones.
pub fn polar_to_cartesian(range: f64, azimuth: f64) -> Point2D {
    debug_assert!(range >= 0.0, "negative range {range}");
    Point2D::new(range * azimuth.cos(), range * azimuth.sin())
}

/// Inverse of [`polar_to_cartesian`]; the azimuth is returned in [0, 2π).
pub fn cartesian_to_polar(p: &Point2D) -> (f64, f64) {
    (p.x.hypot(p.y), Point2D::ORIGIN.bearing_to(p))
}

/// Discretization of the coverage area into `range_count × azimuth_count`
/// cells. Ranges are `δ, 2δ, …, K_r·δ` and azimuths `μ, 2μ, …, K_θ·μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub range_count: usize,
    pub range_step: f64,
    pub azimuth_count: usize,
    pub azimuth_step: f64,
}

impl GridSpec {
    /// Grid with azimuths spread evenly over the full circle.
    pub fn full_circle(range_count: usize, range_step: f64, azimuth_count: usize) -> Self {
        GridSpec {
            range_count,
            range_step,
            azimuth_count,
            azimuth_step: TAU / azimuth_count.max(1) as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.range_count == 0 {
            return Err(Error::InvalidGrid("range_count must be at least 1".into()));
        }
        if self.azimuth_count == 0 {
            return Err(Error::InvalidGrid(
                "azimuth_count must be at least 1".into(),
            ));
        }
        if !(self.range_step.is_finite() && self.range_step > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "range_step must be positive, got {}",
                self.range_step
            )));
        }
        if !(self.azimuth_step.is_finite() && self.azimuth_step > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "azimuth_step must be positive, got {}",
                self.azimuth_step
            )));
        }
        let sweep = self.azimuth_count as f64 * self.azimuth_step;
        if sweep > TAU * (1.0 + WRAP_SLACK) {
            return Err(Error::InvalidGrid(format!(
                "azimuths wrap: {} × {} = {sweep} exceeds 2π",
                self.azimuth_count, self.azimuth_step
            )));
        }
        Ok(())
    }

    pub fn ranges(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.range_count).map(move |k| k as f64 * self.range_step)
    }

    pub fn azimuths(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.azimuth_count).map(move |k| wrap_angle(k as f64 * self.azimuth_step))
    }

    pub fn cell_count(&self) -> usize {
        self.range_count * self.azimuth_count
    }

    pub fn max_range(&self) -> f64 {
        self.range_count as f64 * self.range_step
    }
}

/// Radar/target configuration shared by every candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scene {
    radar_position: Point2D,
    target_position: Point2D,
    target_range: f64,
    target_azimuth: f64,
    noise_power: f64,
    transmit_power: f64,
    samples: usize,
}

impl Scene {
    pub fn new(
        target_range: f64,
        target_azimuth: f64,
        noise_power: f64,
        transmit_power: f64,
        samples: usize,
    ) -> Result<Self> {
        if !(target_range.is_finite() && target_range > 0.0) {
            return Err(Error::InvalidScene(format!(
                "target range must be positive, got {target_range}"
            )));
        }
        if !target_azimuth.is_finite() {
            return Err(Error::InvalidScene("target azimuth must be finite".into()));
        }
        if !(noise_power.is_finite() && noise_power > 0.0) {
            return Err(Error::InvalidScene(format!(
                "noise power must be positive, got {noise_power}"
            )));
        }
        if !(transmit_power.is_finite() && transmit_power > 0.0) {
            return Err(Error::InvalidScene(format!(
                "transmit power must be positive, got {transmit_power}"
            )));
        }
        if samples == 0 {
            return Err(Error::InvalidScene(
                "sample count must be at least 1".into(),
            ));
        }
        let target_azimuth = wrap_angle(target_azimuth);
        Ok(Scene {
            radar_position: Point2D::ORIGIN,
            target_position: polar_to_cartesian(target_range, target_azimuth),
            target_range,
            target_azimuth,
            noise_power,
            transmit_power,
            samples,
        })
    }

    pub fn radar_position(&self) -> Point2D {
        self.radar_position
    }

    pub fn target_position(&self) -> Point2D {
        self.target_position
    }

    /// Radar-target distance `d_tr`.
    pub fn target_range(&self) -> f64 {
        self.target_range
    }

    /// Radar-target angle `θ_tr`, in [0, 2π).
    pub fn target_azimuth(&self) -> f64 {
        self.target_azimuth
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn transmit_power(&self) -> f64 {
        self.transmit_power
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// `P_T / σ²`.
    pub fn snr(&self) -> f64 {
        self.transmit_power / self.noise_power
    }
}

/// Bearing and distance from a surface at `position` to the target.
pub fn scene_angles(position: &Point2D, scene: &Scene) -> Result<(f64, f64)> {
    let target = scene.target_position();
    let dist = position.distance(&target);
    if dist < COINCIDENCE_TOL {
        return Err(Error::CoincidentWithTarget {
            x: position.x,
            y: position.y,
        });
    }
    Ok((position.bearing_to(&target), dist))
}

/// One cell of the range-azimuth grid with its derived geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub index: usize,
    /// Position of the cell in the (range, azimuth) lattice.
    pub range_slot: usize,
    pub azimuth_slot: usize,
    pub range: f64,
    pub azimuth: f64,
    pub position: Point2D,
    /// Radar → surface angle; equals `azimuth`.
    pub theta_ri: f64,
    /// Surface → target angle.
    pub theta_ti: f64,
    /// Radar–surface distance; equals `range`.
    pub d_ri: f64,
    /// Surface–target distance.
    pub d_ti: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    spec: GridSpec,
    candidates: Vec<Candidate>,
    excluded: Vec<(usize, usize)>,
}

impl CandidateSet {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Candidate> {
        self.candidates.get(index)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Candidate> {
        self.candidates.iter()
    }

    pub fn as_slice(&self) -> &[Candidate] {
        &self.candidates
    }

    /// Lattice cells dropped because they sit on the target, as
    /// `(range_slot, azimuth_slot)`.
    pub fn excluded(&self) -> &[(usize, usize)] {
        &self.excluded
    }
}

impl<'a> IntoIterator for &'a CandidateSet {
    type Item = &'a Candidate;
    type IntoIter = std::slice::Iter<'a, Candidate>;

    fn into_iter(self) -> Self::IntoIter {
        self.candidates.iter()
    }
}

/// Builds the candidate set in range-major order. Indices are contiguous
/// after dropping cells on top of the target.
pub fn build_candidate_grid(spec: &GridSpec, scene: &Scene) -> Result<CandidateSet> {
    spec.validate()?;
    let azimuths: Vec<f64> = spec.azimuths().collect();
    let mut candidates = Vec::with_capacity(spec.cell_count());
    let mut excluded = Vec::new();

    for (range_slot, range) in spec.ranges().enumerate() {
        for (azimuth_slot, &azimuth) in azimuths.iter().enumerate() {
            let position = polar_to_cartesian(range, azimuth);
            if position.distance(&scene.target_position()) < GRID_EXCLUSION_RADIUS {
                excluded.push((range_slot, azimuth_slot));
                continue;
            }
            let (theta_ti, d_ti) = scene_angles(&position, scene)?;
            candidates.push(Candidate {
                index: candidates.len(),
                range_slot,
                azimuth_slot,
                range,
                azimuth,
                position,
                theta_ri: azimuth,
                theta_ti,
                d_ri: range,
                d_ti,
            });
        }
    }
    if !excluded.is_empty() {
        log::warn!(
            "{} grid cell(s) coincide with the target and were dropped",
            excluded.len()
        );
    }
    if candidates.is_empty() {
        return Err(Error::InvalidGrid(
            "every grid cell coincides with the target".into(),
        ));
    }

    Ok(CandidateSet {
        spec: *spec,
        candidates,
        excluded,
    })
}
