//! The log-determinant placement objective
//! `f(S) = ln det(H_S H_Sᴴ + I)` and its information-theoretic wrappers.
//!
//! Each candidate `u` contributes a rank-1 Gram increment
//! `G_u = ρ_u · v_u v_uᴴ` with `v_u = conj(a_t(θ_ri,u))` and
//! `ρ_u = (P_T/σ²)·N_r·|α_u c_u²|²`, so every evaluation runs on the
//! `N_t × N_t` matrix `A_S = I + Σ_{u∈S} G_u` no matter how many blocks are
//! stacked. [`GramState`] caches `A_S` and its Cholesky factor so that the
//! gain of adding one more candidate is a single triangular solve:
//! `f(S ∪ {u}) − f(S) = ln(1 + ρ_u · v_uᴴ A_S⁻¹ v_u)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{
    cascade_gain, draw_phase_profiles, nlos_channel, reflectivity, steering_vector, ArraySpec,
    CMatrix, CVector, ChannelMatrix, PhaseProfile, ReflectivityModel,
};
use crate::error::{Error, Result};
use crate::geometry::{build_candidate_grid, CandidateSet, GridSpec, Scene};
use crate::linalg::Cholesky;

/// Everything needed to evaluate `f` on subsets of the candidate grid.
#[derive(Debug, Clone)]
pub struct ObjectiveContext {
    grid: CandidateSet,
    scene: Scene,
    array: ArraySpec,
    profiles: Vec<PhaseProfile>,
    alphas: Vec<Complex64>,
    cascade: Vec<Complex64>,
    directions: Vec<CVector>,
    weights: Vec<f64>,
}

impl ObjectiveContext {
    pub fn new(
        grid: CandidateSet,
        scene: Scene,
        array: ArraySpec,
        profiles: Vec<PhaseProfile>,
        model: &ReflectivityModel,
    ) -> Result<Self> {
        array.validate()?;
        if profiles.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} phase profiles for {} candidates",
                profiles.len(),
                grid.len()
            )));
        }
        let snr = scene.snr();
        let n_rx = array.n_rx as f64;
        let mut alphas = Vec::with_capacity(grid.len());
        let mut cascade = Vec::with_capacity(grid.len());
        let mut directions = Vec::with_capacity(grid.len());
        let mut weights = Vec::with_capacity(grid.len());
        for (cand, profile) in grid.iter().zip(&profiles) {
            if profile.len() != array.n_irs_elems {
                return Err(Error::DimensionMismatch(format!(
                    "candidate {} has {} phases, array has {} elements",
                    cand.index,
                    profile.len(),
                    array.n_irs_elems
                )));
            }
            let alpha = reflectivity(model, cand)?;
            let c = cascade_gain(profile, cand.theta_ri, cand.theta_ti, &array);
            let a_t = steering_vector(array.n_tx, array.tx_spacing, cand.theta_ri);
            alphas.push(alpha);
            cascade.push(c);
            directions.push(a_t.map(|z| z.conj()));
            weights.push(snr * n_rx * (alpha * c * c).norm_sqr());
        }
        Ok(ObjectiveContext {
            grid,
            scene,
            array,
            profiles,
            alphas,
            cascade,
            directions,
            weights,
        })
    }

    /// Builds the grid and draws one random phase profile per candidate.
    pub fn generate<R: Rng + ?Sized>(
        grid_spec: &GridSpec,
        scene: Scene,
        array: ArraySpec,
        model: &ReflectivityModel,
        rng: &mut R,
    ) -> Result<Self> {
        array.validate()?;
        let grid = build_candidate_grid(grid_spec, &scene)?;
        let profiles = draw_phase_profiles(grid.len(), &array, rng);
        Self::new(grid, scene, array, profiles, model)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn grid(&self) -> &CandidateSet {
        &self.grid
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn array(&self) -> &ArraySpec {
        &self.array
    }

    pub fn n_tx(&self) -> usize {
        self.array.n_tx
    }

    pub fn profile(&self, u: usize) -> &PhaseProfile {
        &self.profiles[u]
    }

    pub fn alpha(&self, u: usize) -> Complex64 {
        self.alphas[u]
    }

    pub fn cascade(&self, u: usize) -> Complex64 {
        self.cascade[u]
    }

    /// `ρ_u`.
    pub fn weight(&self, u: usize) -> f64 {
        self.weights[u]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `v_u = conj(a_t(θ_ri,u))`.
    pub fn direction(&self, u: usize) -> &CVector {
        &self.directions[u]
    }

    pub fn gram_increment(&self, u: usize) -> CMatrix {
        let v = &self.directions[u];
        v * v.adjoint() * Complex64::new(self.weights[u], 0.0)
    }

    /// Unscaled `α_u H_u`.
    pub fn channel(&self, u: usize) -> Result<ChannelMatrix> {
        let cand = self.grid.get(u).ok_or(Error::UnknownCandidate(u))?;
        Ok(nlos_channel(
            cand,
            &self.profiles[u],
            &self.array,
            self.alphas[u],
        ))
    }

    fn check_set(&self, set: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.len()];
        for &u in set {
            if u >= self.len() {
                return Err(Error::UnknownCandidate(u));
            }
            if std::mem::replace(&mut seen[u], true) {
                return Err(Error::AlreadySelected(u));
            }
        }
        Ok(())
    }

    /// Vertical stack of `(√P_T/σ)·α_u H_u` over `set`, in iteration order.
    pub fn stacked_channel(&self, set: &[usize]) -> Result<CMatrix> {
        self.check_set(set)?;
        let n_rx = self.array.n_rx;
        let scale = Complex64::new(self.scene.snr().sqrt(), 0.0);
        let mut out = CMatrix::zeros(set.len() * n_rx, self.n_tx());
        for (block, &u) in set.iter().enumerate() {
            let h = self.channel(u)?.entries * scale;
            out.view_mut((block * n_rx, 0), (n_rx, self.n_tx()))
                .copy_from(&h);
        }
        Ok(out)
    }

    /// `I + Σ_{u∈set} G_u`.
    pub fn gram_matrix(&self, set: &[usize]) -> Result<CMatrix> {
        let n = self.n_tx();
        Ok(self.increment_sum(set)? + CMatrix::identity(n, n))
    }

    /// `Σ_{u∈set} G_u`.
    pub fn increment_sum(&self, set: &[usize]) -> Result<CMatrix> {
        self.check_set(set)?;
        let mut g = CMatrix::zeros(self.n_tx(), self.n_tx());
        for &u in set {
            self.add_increment(&mut g, u, 1.0);
        }
        Ok(g)
    }

    pub(crate) fn add_increment(&self, a: &mut CMatrix, u: usize, sign: f64) {
        let v = &self.directions[u];
        let w = sign * self.weights[u];
        let n = v.len();
        for j in 0..n {
            let vj = v[j].conj() * w;
            for i in 0..n {
                a[(i, j)] += v[i] * vj;
            }
        }
    }

    /// `f(S)`.
    pub fn objective_value(&self, set: &[usize]) -> Result<f64> {
        let g = self.increment_sum(set)?;
        Ok(Cholesky::factor_identity_plus(&g)?.log_det())
    }

    /// `H(Y | X) = (N/2)·ln det(H̄ Σ_X H̄ᴴ + σ²I) + (N·N_r/2)(1 + ln 2π)`
    /// with `Σ_X = P_T I` and `I` of the receive dimension `N_r`.
    pub fn conditional_entropy(&self, set: &[usize]) -> Result<f64> {
        let n = self.scene.samples() as f64;
        let n_rx = self.array.n_rx as f64;
        let log_det = self.objective_value(set)? + n_rx * self.scene.noise_power().ln();
        Ok(n * log_det / 2.0 + n * n_rx / 2.0 * (1.0 + TAU.ln()))
    }

    /// Entropy of the noise-only observation, i.e. the entropy with `H̄ = 0`.
    pub fn noise_entropy(&self) -> f64 {
        let n = self.scene.samples() as f64;
        let n_rx = self.array.n_rx as f64;
        n * n_rx * (1.0 + TAU.ln() + self.scene.noise_power().ln()) / 2.0
    }

    /// `I(Y; H̄ | X) = H(Y | X) − H(W)`.
    pub fn mutual_information(&self, set: &[usize]) -> Result<f64> {
        Ok(self.conditional_entropy(set)? - self.noise_entropy())
    }

    /// Fresh empty Gram state for this context.
    pub fn empty_state(&self) -> GramState {
        GramState::empty(self)
    }

    /// Gram state for `set`, built by successive rank-1 updates.
    pub fn state_for(&self, set: &[usize]) -> Result<GramState> {
        set.iter()
            .try_fold(self.empty_state(), |state, &u| state.update(u, self))
    }
}

/// Cached `Σ_{u∈S} G_u`, the factorization of `A_S = I + Σ G_u`, and `f(S)`.
#[derive(Debug, Clone)]
pub struct GramState {
    selected: Vec<usize>,
    member: Vec<bool>,
    sum: CMatrix,
    factor: Cholesky,
    value: f64,
}

impl GramState {
    pub fn empty(ctx: &ObjectiveContext) -> Self {
        let n = ctx.n_tx();
        let sum = CMatrix::zeros(n, n);
        let factor = Cholesky::factor_identity_plus(&sum).expect("identity is positive definite");
        GramState {
            selected: Vec::new(),
            member: vec![false; ctx.len()],
            sum,
            factor,
            value: 0.0,
        }
    }

    /// Selected candidates in insertion order.
    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn contains(&self, u: usize) -> bool {
        self.member.get(u).copied().unwrap_or(false)
    }

    /// `Σ_{u∈S} G_u`, without the identity.
    pub fn increment_sum(&self) -> &CMatrix {
        &self.sum
    }

    pub fn factor(&self) -> &Cholesky {
        &self.factor
    }

    /// `f(S)`.
    pub fn value(&self) -> f64 {
        self.value
    }

    fn check_candidate(&self, u: usize) -> Result<()> {
        if u >= self.member.len() {
            return Err(Error::UnknownCandidate(u));
        }
        if self.member[u] {
            return Err(Error::AlreadySelected(u));
        }
        Ok(())
    }

    /// `f(S ∪ {u}) − f(S)`.
    pub fn marginal_gain(&self, u: usize, ctx: &ObjectiveContext) -> Result<f64> {
        self.check_candidate(u)?;
        Ok(self.gain_unchecked(u, ctx))
    }

    /// Gain without the membership check; `u` must be a valid unselected index.
    #[inline]
    pub(crate) fn gain_unchecked(&self, u: usize, ctx: &ObjectiveContext) -> f64 {
        let rho = ctx.weight(u);
        if rho == 0.0 {
            return 0.0;
        }
        (rho * self.factor.inverse_quad_form(ctx.direction(u))).ln_1p()
    }

    /// State for `S ∪ {u}`. The factorization is recomputed from scratch.
    pub fn update(&self, u: usize, ctx: &ObjectiveContext) -> Result<GramState> {
        self.check_candidate(u)?;
        let gain = self.gain_unchecked(u, ctx);
        let mut sum = self.sum.clone();
        ctx.add_increment(&mut sum, u, 1.0);
        let factor = Cholesky::factor_identity_plus(&sum)?;
        let mut selected = self.selected.clone();
        selected.push(u);
        let mut member = self.member.clone();
        member[u] = true;
        Ok(GramState {
            selected,
            member,
            sum,
            factor,
            value: self.value + gain,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::random_phase_profile;
    use crate::geometry::GridSpec;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, LN_2};

    fn small_ctx(seed: u64) -> ObjectiveContext {
        let scene = Scene::new(7.0, 1.0, 0.5, 2.0, 3).unwrap();
        let array = ArraySpec {
            n_tx: 4,
            n_rx: 3,
            n_irs_elems: 5,
            ..ArraySpec::default()
        };
        let grid = GridSpec::full_circle(3, 2.0, 4);
        ObjectiveContext::generate(
            &grid,
            scene,
            array,
            &ReflectivityModel::Unit,
            &mut ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap()
    }

    fn scalar_ctx() -> ObjectiveContext {
        let scene = Scene::new(10.0, FRAC_PI_4, 1.0, 1.0, 2).unwrap();
        let array = ArraySpec {
            n_tx: 1,
            n_rx: 1,
            n_irs_elems: 1,
            ..ArraySpec::default()
        };
        let grid = build_candidate_grid(&GridSpec::full_circle(1, 3.0, 1), &scene).unwrap();
        ObjectiveContext::new(
            grid,
            scene,
            array,
            vec![PhaseProfile::zeros(1)],
            &ReflectivityModel::Unit,
        )
        .unwrap()
    }

    // Reference from the tall side: ln det(H Hᴴ + I) through nalgebra's LU.
    fn stacked_reference(ctx: &ObjectiveContext, set: &[usize]) -> f64 {
        let h = ctx.stacked_channel(set).unwrap();
        let a = &h * h.adjoint() + CMatrix::identity(h.nrows(), h.nrows());
        a.determinant().re.ln()
    }

    #[test]
    fn empty_set_is_zero() {
        let ctx = small_ctx(1);
        assert_eq!(ctx.objective_value(&[]).unwrap(), 0.0);
        assert_eq!(ctx.stacked_channel(&[]).unwrap().shape(), (0, 4));
        assert_eq!(ctx.mutual_information(&[]).unwrap(), 0.0);
    }

    #[test]
    fn scalar_case_is_ln_two() {
        let ctx = scalar_ctx();
        assert_relative_eq!(ctx.weight(0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(
            ctx.objective_value(&[0]).unwrap(),
            LN_2,
            max_relative = 1e-15
        );
        // N = 2, N_r = 1, σ² = 1: H = ln 2 + (1 + ln 2π)
        let h = ctx.conditional_entropy(&[0]).unwrap();
        assert_relative_eq!(h, LN_2 + 1.0 + TAU.ln(), max_relative = 1e-14);
    }

    #[test]
    fn noise_only_entropy() {
        let scene = Scene::new(10.0, 0.3, 1.0, 1.0, 1).unwrap();
        let array = ArraySpec {
            n_tx: 2,
            n_rx: 2,
            n_irs_elems: 2,
            ..ArraySpec::default()
        };
        let grid = build_candidate_grid(&GridSpec::full_circle(1, 1.0, 2), &scene).unwrap();
        let profiles = vec![PhaseProfile::zeros(2); grid.len()];
        let ctx =
            ObjectiveContext::new(grid, scene, array, profiles, &ReflectivityModel::Unit).unwrap();
        assert_relative_eq!(
            ctx.conditional_entropy(&[]).unwrap(),
            1.0 + TAU.ln(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn entropy_and_information_track_objective() {
        let ctx = small_ctx(3);
        let n = ctx.scene().samples() as f64;
        let h0 = ctx.conditional_entropy(&[]).unwrap();
        for set in [vec![0], vec![4, 1], vec![2, 7, 11]] {
            let f = ctx.objective_value(&set).unwrap();
            let h = ctx.conditional_entropy(&set).unwrap();
            assert_relative_eq!(h - h0, n / 2.0 * f, max_relative = 1e-10);
            assert_relative_eq!(
                ctx.mutual_information(&set).unwrap(),
                n / 2.0 * f,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn information_ignores_common_phase_on_alpha() {
        let scene = Scene::new(9.0, 0.5, 1.0, 1.0, 4).unwrap();
        let array = ArraySpec {
            n_tx: 3,
            n_rx: 2,
            n_irs_elems: 4,
            ..ArraySpec::default()
        };
        let spec = GridSpec::full_circle(2, 3.0, 3);
        let grid = build_candidate_grid(&spec, &scene).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let profiles: Vec<_> = (0..grid.len())
            .map(|_| random_phase_profile(4, &mut rng))
            .collect();
        let alphas: Vec<Complex64> = (0..grid.len())
            .map(|k| Complex64::new(0.5 + k as f64 * 0.1, -0.2))
            .collect();
        let rot = Complex64::from_polar(1.0, 1.234);
        let rotated: Vec<Complex64> = alphas.iter().map(|a| a * rot).collect();
        let a = ObjectiveContext::new(
            grid.clone(),
            scene,
            array,
            profiles.clone(),
            &ReflectivityModel::FixedList(alphas),
        )
        .unwrap();
        let b = ObjectiveContext::new(
            grid,
            scene,
            array,
            profiles,
            &ReflectivityModel::FixedList(rotated),
        )
        .unwrap();
        let set = [0, 2, 5];
        assert_relative_eq!(
            a.mutual_information(&set).unwrap(),
            b.mutual_information(&set).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn gram_side_matches_stacked_side() {
        let ctx = small_ctx(11);
        for set in [vec![3], vec![0, 5], vec![9, 2, 6], vec![1, 4, 7, 10]] {
            let f = ctx.objective_value(&set).unwrap();
            assert_relative_eq!(f, stacked_reference(&ctx, &set), max_relative = 1e-10);
        }
    }

    #[test]
    fn swapped_stack_has_same_gram_product() {
        let ctx = small_ctx(4);
        let h1 = ctx.stacked_channel(&[2, 9]).unwrap();
        let h2 = ctx.stacked_channel(&[9, 2]).unwrap();
        let n_rx = ctx.array().n_rx;
        assert_eq!(h1.rows(0, n_rx), h2.rows(n_rx, n_rx));
        let g1 = h1.adjoint() * &h1;
        let g2 = h2.adjoint() * &h2;
        for (x, y) in g1.iter().zip(g2.iter()) {
            assert!((x - y).norm() <= 1e-12 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn set_order_does_not_matter() {
        let ctx = small_ctx(2);
        let a = ctx.objective_value(&[1, 5, 8]).unwrap();
        let b = ctx.objective_value(&[8, 5, 1]).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-13);
    }

    #[test]
    fn rejects_bad_sets() {
        let ctx = small_ctx(2);
        assert_eq!(ctx.objective_value(&[99]), Err(Error::UnknownCandidate(99)));
        assert_eq!(ctx.objective_value(&[1, 1]), Err(Error::AlreadySelected(1)));
        assert!(ctx.stacked_channel(&[50]).is_err());
    }

    #[test]
    fn gain_matches_recomputation() {
        let ctx = small_ctx(6);
        let state = ctx.state_for(&[3, 8]).unwrap();
        for u in [0, 5, 11] {
            let gain = state.marginal_gain(u, &ctx).unwrap();
            let direct =
                ctx.objective_value(&[3, 8, u]).unwrap() - ctx.objective_value(&[3, 8]).unwrap();
            assert_relative_eq!(gain, direct, max_relative = 1e-9);
            assert!(gain >= 0.0);
        }
    }

    #[test]
    fn empty_state_gain_is_singleton_value() {
        let ctx = small_ctx(6);
        let empty = ctx.empty_state();
        for u in 0..ctx.len() {
            let expected = (ctx.weight(u) * ctx.n_tx() as f64).ln_1p();
            assert_relative_eq!(
                empty.marginal_gain(u, &ctx).unwrap(),
                expected,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn dead_channel_adds_nothing() {
        let scene = Scene::new(10.0, 0.7, 1.0, 1.0, 1).unwrap();
        let array = ArraySpec {
            n_tx: 2,
            n_rx: 2,
            n_irs_elems: 2,
            ..ArraySpec::default()
        };
        let grid = build_candidate_grid(&GridSpec::full_circle(1, 1.0, 2), &scene).unwrap();
        let profiles = vec![PhaseProfile::zeros(2), PhaseProfile::zeros(2)];
        let model =
            ReflectivityModel::FixedList(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        let ctx = ObjectiveContext::new(grid, scene, array, profiles, &model).unwrap();
        assert_eq!(ctx.weight(0), 0.0);
        let s = ctx.state_for(&[1]).unwrap();
        assert_eq!(s.marginal_gain(0, &ctx).unwrap(), 0.0);
        let t = s.update(0, &ctx).unwrap();
        assert_eq!(t.value(), s.value());
    }

    #[test]
    fn update_tracks_from_scratch_value() {
        let ctx = small_ctx(9);
        let order = [4, 0, 10, 7, 2];
        let mut state = ctx.empty_state();
        for (k, &u) in order.iter().enumerate() {
            state = state.update(u, &ctx).unwrap();
            let direct = ctx.objective_value(&order[..=k]).unwrap();
            assert_relative_eq!(state.value(), direct, max_relative = 1e-9);
            assert_relative_eq!(state.factor().log_det(), direct, max_relative = 1e-9);
        }
    }

    #[test]
    fn update_order_is_irrelevant() {
        let ctx = small_ctx(9);
        let a = ctx.state_for(&[3, 6]).unwrap();
        let b = ctx.state_for(&[6, 3]).unwrap();
        assert_relative_eq!(a.value(), b.value(), max_relative = 1e-9);
    }

    #[test]
    fn update_rejects_duplicates() {
        let ctx = small_ctx(9);
        let s = ctx.state_for(&[3]).unwrap();
        assert_eq!(s.update(3, &ctx).unwrap_err(), Error::AlreadySelected(3));
        assert_eq!(
            s.marginal_gain(3, &ctx).unwrap_err(),
            Error::AlreadySelected(3)
        );
        assert_eq!(
            s.marginal_gain(1000, &ctx).unwrap_err(),
            Error::UnknownCandidate(1000)
        );
    }

    #[test]
    fn increments_are_rank_one_psd() {
        let ctx = small_ctx(12);
        for u in 0..ctx.len() {
            let g = ctx.gram_increment(u);
            let eig = g.clone().symmetric_eigenvalues();
            let max = eig.iter().cloned().fold(0.0, f64::max);
            assert!(eig.iter().all(|&l| l >= -1e-9 * max.max(1.0)));
            assert_relative_eq!(max, ctx.weight(u) * ctx.n_tx() as f64, max_relative = 1e-9);
        }
    }

    #[test]
    fn rejects_profile_count_mismatch() {
        let scene = Scene::new(10.0, 0.7, 1.0, 1.0, 1).unwrap();
        let grid = build_candidate_grid(&GridSpec::full_circle(1, 1.0, 2), &scene).unwrap();
        let err = ObjectiveContext::new(
            grid,
            scene,
            ArraySpec::default(),
            vec![],
            &ReflectivityModel::Unit,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }
}
