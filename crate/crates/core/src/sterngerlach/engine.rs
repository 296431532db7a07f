//! Split-operator propagation of the spinor wavepacket: half kinetic step in
//! momentum space, full potential step as an exact 2×2 spin rotation per
//! grid point, half kinetic step. Every factor is unitary, so the discrete
//! norm is conserved to rounding.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::operator::Operator;

use super::SgParams;

/// Spinor wavefunction ψ_s(y,z), s ∈ {+,−}, on an n×n periodic grid.
/// Layout: `psi[s*n*n + iy*n + iz]`, z contiguous.
#[derive(Debug, Clone)]
pub struct GridState {
    n: usize,
    extent: f64,
    dy: f64,
    psi: Vec<C64>,
}

impl GridState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// Grid spacing (same on both axes).
    pub fn spacing(&self) -> f64 {
        self.dy
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.psi
    }

    /// Position coordinate of grid index i.
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - (self.n / 2) as f64) * self.dy
    }

    /// Momentum coordinate of FFT index j.
    pub fn momentum(&self, j: usize) -> f64 {
        let n = self.n;
        let dp = 2.0 * std::f64::consts::PI / (n as f64 * self.dy);
        if j < n / 2 {
            j as f64 * dp
        } else {
            (j as f64 - n as f64) * dp
        }
    }

    /// Discrete ‖ψ‖².
    pub fn norm_squared(&self) -> f64 {
        let w = self.dy * self.dy;
        self.psi.iter().map(|c| c.norm_sqr()) .sum::<f64>() * w
    }

    /// Reduced 2×2 spin state Tr_space |ψ⟩⟨ψ| (not trace-normalized if the
    /// grid norm has drifted; drift stays at rounding level).
    #[allow(clippy::needless_range_loop)]
    pub fn spin_density_matrix(&self) -> Operator {
        let nn = self.n * self.n;
        let w = self.dy * self.dy;
        let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
        for s1 in 0..2 {
            for s2 in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..nn {
                    acc += self.psi[s1 * nn + i] * self.psi[s2 * nn + i].conj();
                }
                rho[s1][s2] = acc * w;
            }
        }
        Operator::from_rows(2, &[rho[0][0], rho[0][1], rho[1][0], rho[1][1]])
            .expect("finite amplitudes")
    }

    /// (⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩).
    pub fn sigma_expectations(&self) -> [f64; 3] {
        let rho = self.spin_density_matrix();
        let r01 = rho.entry(0, 1);
        [
            2.0 * r01.re,
            -2.0 * r01.im,
            rho.entry(0, 0).re - rho.entry(1, 1).re,
        ]
    }

    /// Momentum-space probability density, normalized to sum 1, shape n×n
    /// (y index major).
    pub fn momentum_density(&self) -> Vec<f64> {
        let n = self.n;
        let nn = n * n;
        let fft = Fft2::new(n);
        let mut dens = vec![0.0; nn];
        for s in 0..2 {
            let mut buf = self.psi[s * nn..(s + 1) * nn].to_vec();
            fft.forward(&mut buf);
            for (d, c) in dens.iter_mut().zip(buf.iter()) {
                *d += c.norm_sqr();
            }
        }
        let total: f64 = dens.iter().sum();
        for d in &mut dens {
            *d /= total;
        }
        dens
    }

    /// (⟨P_y⟩, ⟨P_z⟩).
    pub fn mean_momentum(&self) -> (f64, f64) {
        let n = self.n;
        let dens = self.momentum_density();
        let mut py = 0.0;
        let mut pz = 0.0;
        for jy in 0..n {
            for jz in 0..n {
                let d = dens[jy * n + jz];
                py += d * self.momentum(jy);
                pz += d * self.momentum(jz);
            }
        }
        (py, pz)
    }

    /// ⟨L_x⟩ = ⟨Y P_z − Z P_y⟩ with spectral momentum application.
    pub fn mean_orbital_lx(&self) -> f64 {
        let n = self.n;
        let nn = n * n;
        let fft = Fft2::new(n);
        let w = self.dy * self.dy;
        let mut total = 0.0;
        for s in 0..2 {
            let comp = &self.psi[s * nn..(s + 1) * nn];
            let mut pz_psi = comp.to_vec();
            fft.apply_momentum_z(&mut pz_psi, self);
            let mut py_psi = comp.to_vec();
            fft.apply_momentum_y(&mut py_psi, self);
            for iy in 0..n {
                let y = self.coord(iy);
                for iz in 0..n {
                    let z = self.coord(iz);
                    let idx = iy * n + iz;
                    let val = comp[idx].conj() * (pz_psi[idx] * y - py_psi[idx] * z);
                    total += val.re;
                }
            }
        }
        total * w
    }
}

/// Gaussian packet at the origin with ⟨P⟩ = 0, carrying the given spin.
pub fn build_initial_state(params: &SgParams, spin: &DVector<C64>) -> Result<GridState> {
    params.validate()?;
    if spin.len() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "spin vector has length {}, expected 2",
            spin.len()
        )));
    }
    let spin_norm = spin.norm();
    if (spin_norm - 1.0).abs() > 1e-10 {
        return Err(Error::Unnormalized(spin_norm));
    }
    let n = params.grid_n;
    let nn = n * n;
    let dy = 2.0 * params.extent / n as f64;
    let w2 = 4.0 * params.packet_width * params.packet_width;
    let mut envelope = vec![0.0f64; nn];
    let mut norm2 = 0.0;
    for iy in 0..n {
        let y = (iy as f64 - (n / 2) as f64) * dy;
        for iz in 0..n {
            let z = (iz as f64 - (n / 2) as f64) * dy;
            let g = (-(y * y + z * z) / w2).exp();
            envelope[iy * n + iz] = g;
            norm2 += g * g;
        }
    }
    let scale = 1.0 / (norm2 * dy * dy).sqrt();
    let mut psi = vec![C64::new(0.0, 0.0); 2 * nn];
    for s in 0..2 {
        for i in 0..nn {
            psi[s * nn + i] = spin[s] * envelope[i] * scale;
        }
    }
    Ok(GridState {
        n,
        extent: params.extent,
        dy,
        psi,
    })
}

/// One observable sample along a run.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TimeSample {
    pub t: f64,
    pub mean_py: f64,
    pub mean_pz: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub sigma_z: f64,
    pub norm: f64,
}

fn sample_at(state: &GridState, t: f64) -> TimeSample {
    let (mean_py, mean_pz) = state.mean_momentum();
    let [sigma_x, sigma_y, sigma_z] = state.sigma_expectations();
    TimeSample {
        t,
        mean_py,
        mean_pz,
        sigma_x,
        sigma_y,
        sigma_z,
        norm: state.norm_squared().sqrt(),
    }
}

/// Propagate through the full interaction time τ.
pub fn evolve_sg(state: &GridState, params: &SgParams) -> Result<GridState> {
    Ok(evolve_impl(state, params, None)?.0)
}

/// Propagate and record observables every `sample_every` steps (plus the
/// initial and final instants).
pub fn evolve_sg_recording(
    state: &GridState,
    params: &SgParams,
    sample_every: usize,
) -> Result<(GridState, Vec<TimeSample>)> {
    let every = sample_every.max(1);
    let (out, samples) = evolve_impl(state, params, Some(every))?;
    Ok((out, samples.expect("recording requested")))
}

fn evolve_impl(
    state: &GridState,
    params: &SgParams,
    record_every: Option<usize>,
) -> Result<(GridState, Option<Vec<TimeSample>>)> {
    let steps = params.resolved_steps()?;
    let n = params.grid_n;
    if state.n != n || (state.extent - params.extent).abs() > 1e-12 {
        return Err(Error::DimensionMismatch(format!(
            "state grid {}x{} (extent {}) does not match params ({}x{}, extent {})",
            state.n, state.n, state.extent, n, n, params.extent
        )));
    }
    let nn = n * n;
    let dt = params.tau / steps as f64;
    let fft = Fft2::new(n);

    // half-step kinetic phases exp(−i (p_y²+p_z²)/(2m) · dt/2)
    let mut kin = vec![C64::new(0.0, 0.0); nn];
    for jy in 0..n {
        let py = state.momentum(jy);
        for jz in 0..n {
            let pz = state.momentum(jz);
            let phase = -(py * py + pz * pz) / (2.0 * params.mass) * dt / 2.0;
            kin[jy * n + jz] = C64::new(0.0, phase).exp();
        }
    }

    // per-site exact spin rotation exp(−i dt (α σ_y + β σ_z))
    let a_eff = params.variant.effective_a(params.a);
    let half_mu = params.mu / 2.0;
    let mut pot = vec![[C64::new(0.0, 0.0); 4]; nn];
    for iy in 0..n {
        let y = state.coord(iy);
        let alpha = if params.variant.has_y_coupling() {
            half_mu * params.b * y
        } else {
            0.0
        };
        for iz in 0..n {
            let z = state.coord(iz);
            let beta = half_mu * (a_eff - params.b * z);
            let theta = alpha.hypot(beta);
            let c = (theta * dt).cos();
            let s_eff = if theta > 0.0 {
                (theta * dt).sin() / theta
            } else {
                dt
            };
            pot[iy * n + iz] = [
                C64::new(c, -s_eff * beta),
                C64::new(-s_eff * alpha, 0.0),
                C64::new(s_eff * alpha, 0.0),
                C64::new(c, s_eff * beta),
            ];
        }
    }

    let mut psi = state.psi.clone();
    let mut samples = record_every.map(|_| {
        vec![sample_at(state, 0.0)]
    });

    let kin_half = |psi: &mut [C64]| {
        for s in 0..2 {
            let comp = &mut psi[s * nn..(s + 1) * nn];
            fft.forward(comp);
            for (c, k) in comp.iter_mut().zip(kin.iter()) {
                *c *= k;
            }
            fft.inverse(comp);
        }
    };

    for step in 0..steps {
        kin_half(&mut psi);
        for i in 0..nn {
            let u = &pot[i];
            let up = psi[i];
            let dn = psi[nn + i];
            psi[i] = u[0] * up + u[1] * dn;
            psi[nn + i] = u[2] * up + u[3] * dn;
        }
        kin_half(&mut psi);
        if let (Some(samples), Some(every)) = (samples.as_mut(), record_every) {
            let done = step + 1;
            if done % every == 0 || done == steps {
                let snapshot = GridState {
                    n,
                    extent: state.extent,
                    dy: state.dy,
                    psi: psi.clone(),
                };
                samples.push(sample_at(&snapshot, done as f64 * dt));
            }
        }
    }

    let out = GridState {
        n,
        extent: state.extent,
        dy: state.dy,
        psi,
    };
    Ok((out, samples))
}

/// Cached forward/inverse plans for the n×n grid.
struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    /// In-place 2D forward transform of one n×n component.
    fn forward(&self, data: &mut [C64]) {
        self.fwd.process(data); // all rows (z axis)
        transpose(self.n, data);
        self.fwd.process(data); // all columns (y axis)
        transpose(self.n, data);
    }

    /// In-place 2D inverse transform, normalized.
    fn inverse(&self, data: &mut [C64]) {
        self.inv.process(data);
        transpose(self.n, data);
        self.inv.process(data);
        transpose(self.n, data);
        let scale = 1.0 / (self.n * self.n) as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
    }

    /// ψ ← P_z ψ (spectral derivative along the contiguous axis).
    fn apply_momentum_z(&self, data: &mut [C64], grid: &GridState) {
        let n = self.n;
        self.fwd.process(data);
        for row in data.chunks_mut(n) {
            for (jz, c) in row.iter_mut().enumerate() {
                *c *= grid.momentum(jz);
            }
        }
        self.inv.process(data);
        let scale = 1.0 / n as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
    }

    /// ψ ← P_y ψ.
    fn apply_momentum_y(&self, data: &mut [C64], grid: &GridState) {
        let n = self.n;
        transpose(n, data);
        self.fwd.process(data);
        for row in data.chunks_mut(n) {
            for (jy, c) in row.iter_mut().enumerate() {
                *c *= grid.momentum(jy);
            }
        }
        self.inv.process(data);
        let scale = 1.0 / n as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
        transpose(n, data);
    }
}

fn transpose(n: usize, data: &mut [C64]) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit;
    use crate::sterngerlach::SgVariant;

    fn small_params(variant: SgVariant) -> SgParams {
        SgParams {
            grid_n: 64,
            ..SgParams::defaults_for(variant)
        }
    }

    #[test]
    fn initial_state_has_unit_norm_and_zero_momentum() {
        let params = small_params(SgVariant::Ideal);
        for spin in [qubit::ket_z_plus(), qubit::ket_x_plus(), super::super::generic_spin()] {
            let state = build_initial_state(&params, &spin).unwrap();
            assert!((state.norm_squared() - 1.0).abs() < 1e-12);
            let (py, pz) = state.mean_momentum();
            assert!(py.abs() < 1e-8 && pz.abs() < 1e-8);
        }
    }

    #[test]
    fn initial_state_spin_expectations() {
        let params = small_params(SgVariant::Ideal);
        let z = build_initial_state(&params, &qubit::ket_z_plus()).unwrap();
        assert!((z.sigma_expectations()[2] - 1.0).abs() < 1e-12);
        let x = build_initial_state(&params, &qubit::ket_x_plus()).unwrap();
        let [sx, _, sz] = x.sigma_expectations();
        assert!((sx - 1.0).abs() < 1e-12 && sz.abs() < 1e-12);
        let y = build_initial_state(&params, &qubit::ket_y_plus()).unwrap();
        assert!((y.sigma_expectations()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unnormalized_spin_is_rejected() {
        let params = small_params(SgVariant::Ideal);
        let spin = DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(matches!(
            build_initial_state(&params, &spin),
            Err(Error::Unnormalized(_))
        ));
    }

    #[test]
    fn free_packet_keeps_zero_momentum() {
        let params = SgParams {
            b: 0.0,
            steps: Some(16),
            ..small_params(SgVariant::Ideal)
        };
        let state = build_initial_state(&params, &qubit::ket_z_plus()).unwrap();
        let out = evolve_sg(&state, &params).unwrap();
        let (py, pz) = out.mean_momentum();
        assert!(py.abs() < 1e-8 && pz.abs() < 1e-8);
        assert!((out.norm_squared() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn ideal_drift_matches_heisenberg_solution() {
        // ⟨P_z⟩(τ) = (μ/2)·b·τ·⟨σ_z⟩(0)
        let params = small_params(SgVariant::Ideal);
        let state = build_initial_state(&params, &qubit::ket_z_plus()).unwrap();
        let out = evolve_sg(&state, &params).unwrap();
        let (_, pz) = out.mean_momentum();
        let target = 0.5 * params.mu * params.b * params.tau;
        assert!(
            (pz - target).abs() / target < 5e-3,
            "pz {pz} target {target}"
        );
        assert!((out.sigma_expectations()[2] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn norm_is_conserved_over_full_runs() {
        let params = small_params(SgVariant::Quadrupole);
        let state = build_initial_state(&params, &super::super::generic_spin()).unwrap();
        let out = evolve_sg(&state, &params).unwrap();
        assert!((out.norm_squared() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn recording_covers_initial_and_final_instants() {
        let params = SgParams {
            steps: Some(180),
            ..small_params(SgVariant::Corrected)
        };
        let state = build_initial_state(&params, &qubit::ket_z_plus()).unwrap();
        let (_, samples) = evolve_sg_recording(&state, &params, 45).unwrap();
        assert_eq!(samples.len(), 5);
        assert_eq!(samples[0].t, 0.0);
        assert!((samples.last().unwrap().t - params.tau).abs() < 1e-12);
    }
}
