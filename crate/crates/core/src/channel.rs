//! NLoS channel synthesis for the radar → surface → target → surface → radar
//! path.
//!
//! For one surface the cascade `H_ir Φ H_ti H_it Φ H_ri` collapses to
//! `c² · a_r(θ_ri) a_tᵀ(θ_ri)` where `c = bᵀ(θ_ri) Φ b(θ_ti)` is the scalar
//! gain of a single surface hop. [`nlos_channel`] builds the closed form;
//! [`nlos_channel_explicit`] multiplies out the hop matrices and exists so
//! the two can be checked against each other.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Candidate;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Radar and surface array layout. Spacings are in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArraySpec {
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_irs_elems: usize,
    pub tx_spacing: f64,
    pub irs_spacing: f64,
    /// Carrier wavelength in meters. Phases only depend on the spacings
    /// expressed in wavelengths, so this is informational.
    pub wavelength: f64,
}

impl Default for ArraySpec {
    fn default() -> Self {
        ArraySpec {
            n_tx: 8,
            n_rx: 8,
            n_irs_elems: 16,
            tx_spacing: 0.5,
            irs_spacing: 0.125,
            wavelength: 0.03,
        }
    }
}

impl ArraySpec {
    pub fn validate(&self) -> Result<()> {
        for (name, n) in [
            ("n_tx", self.n_tx),
            ("n_rx", self.n_rx),
            ("n_irs_elems", self.n_irs_elems),
        ] {
            if n == 0 {
                return Err(Error::InvalidArray(format!("{name} must be at least 1")));
            }
        }
        for (name, v) in [
            ("tx_spacing", self.tx_spacing),
            ("irs_spacing", self.irs_spacing),
            ("wavelength", self.wavelength),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArray(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.irs_spacing > self.tx_spacing {
            return Err(Error::InvalidArray(format!(
                "irs_spacing {} exceeds tx_spacing {}",
                self.irs_spacing, self.tx_spacing
            )));
        }
        Ok(())
    }
}

/// Uniform linear array response; entry `k` is `exp(j·2π·spacing·k·sin θ)`.
pub fn steering_vector(n: usize, spacing: f64, theta: f64) -> CVector {
    let step = TAU * spacing * theta.sin();
    CVector::from_iterator(
        n,
        (0..n).map(|k| Complex64::from_polar(1.0, step * k as f64)),
    )
}

/// Per-element phase shifts of one surface, each in [0, 2π).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhaseProfile(Vec<f64>);

impl PhaseProfile {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::InvalidArray("phase profile is empty".into()));
        }
        if let Some(bad) = phases.iter().find(|p| !(0.0..TAU).contains(*p)) {
            return Err(Error::InvalidArray(format!("phase {bad} outside [0, 2π)")));
        }
        Ok(PhaseProfile(phases))
    }

    /// All elements at zero phase.
    pub fn zeros(n: usize) -> Self {
        PhaseProfile(vec![0.0; n.max(1)])
    }

    pub fn phases(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Diagonal entries of Φ.
    pub fn diagonal(&self) -> CVector {
        CVector::from_iterator(
            self.len(),
            self.0.iter().map(|&p| Complex64::from_polar(1.0, p)),
        )
    }
}

pub fn random_phase_profile<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PhaseProfile {
    let phases = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
    PhaseProfile(phases)
}

/// One independent profile per candidate, drawn in candidate index order.
pub fn draw_phase_profiles<R: Rng + ?Sized>(
    count: usize,
    spec: &ArraySpec,
    rng: &mut R,
) -> Vec<PhaseProfile> {
    (0..count)
        .map(|_| random_phase_profile(spec.n_irs_elems, rng))
        .collect()
}

/// `bᵀ(θ_ri) · Φ · b(θ_ti)`.
pub fn cascade_gain(
    profile: &PhaseProfile,
    theta_ri: f64,
    theta_ti: f64,
    spec: &ArraySpec,
) -> Complex64 {
    let step = TAU * spec.irs_spacing * (theta_ri.sin() + theta_ti.sin());
    profile
        .phases()
        .iter()
        .enumerate()
        .map(|(k, &phi)| Complex64::from_polar(1.0, phi + step * k as f64))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub entries: CMatrix,
    pub source: usize,
}

impl ChannelMatrix {
    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }
}

/// Closed-form `α · c² · a_r(θ_ri) a_tᵀ(θ_ri)`.
pub fn nlos_channel(
    candidate: &Candidate,
    profile: &PhaseProfile,
    spec: &ArraySpec,
    alpha: Complex64,
) -> ChannelMatrix {
    let c = cascade_gain(profile, candidate.theta_ri, candidate.theta_ti, spec);
    let a_r = steering_vector(spec.n_rx, spec.tx_spacing, candidate.theta_ri);
    let a_t = steering_vector(spec.n_tx, spec.tx_spacing, candidate.theta_ri);
    ChannelMatrix {
        entries: (a_r * a_t.transpose()) * (alpha * c * c),
        source: candidate.index,
    }
}

/// The four per-hop matrices of one surface path.
#[derive(Debug, Clone)]
pub struct HopMatrices {
    /// Radar → surface, `N_m × N_t`.
    pub radar_to_irs: CMatrix,
    /// Surface → target, `1 × N_m`.
    pub irs_to_target: CMatrix,
    /// Target → surface, `N_m × 1`.
    pub target_to_irs: CMatrix,
    /// Surface → radar, `N_r × N_m`.
    pub irs_to_radar: CMatrix,
    pub phase_shift: CMatrix,
}

pub fn hop_matrices(
    candidate: &Candidate,
    profile: &PhaseProfile,
    spec: &ArraySpec,
) -> HopMatrices {
    let b_ri = steering_vector(spec.n_irs_elems, spec.irs_spacing, candidate.theta_ri);
    let b_ti = steering_vector(spec.n_irs_elems, spec.irs_spacing, candidate.theta_ti);
    let a_t = steering_vector(spec.n_tx, spec.tx_spacing, candidate.theta_ri);
    let a_r = steering_vector(spec.n_rx, spec.tx_spacing, candidate.theta_ri);
    HopMatrices {
        radar_to_irs: &b_ri * a_t.transpose(),
        irs_to_target: CMatrix::from_row_slice(1, b_ti.len(), b_ti.as_slice()),
        target_to_irs: CMatrix::from_column_slice(b_ti.len(), 1, b_ti.as_slice()),
        irs_to_radar: a_r * b_ri.transpose(),
        phase_shift: CMatrix::from_diagonal(&profile.diagonal()),
    }
}

/// `α · H_ir Φ H_ti H_it Φ H_ri`, multiplied out factor by factor.
pub fn nlos_channel_explicit(
    candidate: &Candidate,
    profile: &PhaseProfile,
    spec: &ArraySpec,
    alpha: Complex64,
) -> ChannelMatrix {
    let hops = hop_matrices(candidate, profile, spec);
    let product = &hops.irs_to_radar
        * &hops.phase_shift
        * &hops.target_to_irs
        * &hops.irs_to_target
        * &hops.phase_shift
        * &hops.radar_to_irs;
    ChannelMatrix {
        entries: product * alpha,
        source: candidate.index,
    }
}

/// Target reflectivity per surface path.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ReflectivityModel {
    /// `α = 1`.
    #[default]
    Unit,
    /// `α = 1 / (d_ri² · d_ti²)`.
    InverseSquareProduct,
    /// Explicit value per candidate index.
    FixedList(Vec<Complex64>),
}

pub fn reflectivity(model: &ReflectivityModel, candidate: &Candidate) -> Result<Complex64> {
    match model {
        ReflectivityModel::Unit => Ok(Complex64::new(1.0, 0.0)),
        ReflectivityModel::InverseSquareProduct => {
            let d2 = candidate.d_ri * candidate.d_ri * candidate.d_ti * candidate.d_ti;
            Ok(Complex64::new(1.0 / d2, 0.0))
        }
        ReflectivityModel::FixedList(values) => values
            .get(candidate.index)
            .copied()
            .ok_or(Error::MissingReflectivity(candidate.index)),
    }
}

/// Draws `Y = (Σ H_m) X + W` with `W` circular complex Gaussian of
/// per-entry variance `noise_power`. `n_rx` fixes the output height when
/// `channels` is empty.
pub fn simulate_snapshot<R: Rng + ?Sized>(
    channels: &[ChannelMatrix],
    n_rx: usize,
    x: &CMatrix,
    noise_power: f64,
    rng: &mut R,
) -> Result<CMatrix> {
    let n_tx = x.nrows();
    let mut sum = CMatrix::zeros(n_rx, n_tx);
    for ch in channels {
        if ch.nrows() != n_rx || ch.ncols() != n_tx {
            return Err(Error::DimensionMismatch(format!(
                "channel {} is {}×{}, expected {n_rx}×{n_tx}",
                ch.source,
                ch.nrows(),
                ch.ncols()
            )));
        }
        sum += &ch.entries;
    }
    if !(noise_power.is_finite() && noise_power >= 0.0) {
        return Err(Error::InvalidScene(format!(
            "noise power {noise_power} is invalid"
        )));
    }
    let mut y = sum * x;
    if noise_power > 0.0 {
        let scale = (noise_power / 2.0).sqrt();
        for v in y.iter_mut() {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *v += Complex64::new(re * scale, im * scale);
        }
    }
    Ok(y)
}
