//! Cross-module integration: Stern-Gerlach statistics feeding the
//! nonideality calculus, Wigner inversion and sampling, plus the abstract
//! two-probe joint-measurement chain.

use measim_core::nonideality::{check_martens, nonideality_matrix};
use measim_core::premeasurement::{extract_bivariate_effects, two_probe_qubit_model};
use measim_core::sampling::sample_outcomes;
use measim_core::sterngerlach::{
    self, build_initial_state, evolve_sg, readout_joint_bins, SgParams, SgVariant,
};
use measim_core::wigner::{reconstruct_ideal_probs, wigner_measure};
use measim_core::{
    max_abs_diff, qubit, BivariateEffectSet, JointProbabilities, Operator, StochasticMatrix,
    Tolerances,
};
use num_complex::Complex64 as C64;

fn quad_params() -> SgParams {
    SgParams {
        grid_n: 64,
        ..SgParams::defaults_for(SgVariant::Quadrupole)
    }
}

/// λ recovered by calibration equals the nonideality matrix of the
/// tomographically extracted POVM, and inverting it recovers the ideal
/// σ_z projectors from the univariate degenerate Wigner construction.
#[test]
fn corrected_chain_recovers_ideal_projectors() {
    let params = SgParams {
        grid_n: 64,
        ..SgParams::defaults_for(SgVariant::Corrected)
    };
    let (effects, _) = sterngerlach::extract_effects(&params).unwrap();
    let (lam, residual) = nonideality_matrix(&effects, &qubit::pvm_z()).unwrap();
    assert!(residual <= 1e-3);

    // single-column bivariate grid: the univariate degenerate case
    let tol = Tolerances::grid_extracted();
    let grid: Vec<Vec<Operator>> = effects.effects().iter().map(|m| vec![m.clone()]).collect();
    let biv = BivariateEffectSet::new(
        grid,
        effects.labels().to_vec(),
        vec!["all".into()],
        &tol,
    )
    .unwrap();
    let mu = StochasticMatrix::identity(vec!["all".into()]);
    let w = wigner_measure(&biv, &lam, &mu, &Tolerances::default()).unwrap();
    for kp in 0..2 {
        assert!(
            max_abs_diff(w.element(kp, 0), qubit::pvm_z().projector(kp)) < 1e-9,
            "ideal projector {kp} not recovered"
        );
    }
}

#[test]
fn quadrupole_chain_satisfies_martens_and_marginal_identities() {
    let params = quad_params();
    let (biv, _) = sterngerlach::extract_bivariate_effects(&params).unwrap();
    let tol = Tolerances::grid_extracted();
    let (lam, _) = nonideality_matrix(&biv.row_marginals(&tol).unwrap(), &qubit::pvm_y()).unwrap();
    let (mu, _) = nonideality_matrix(&biv.col_marginals(&tol).unwrap(), &qubit::pvm_z()).unwrap();

    let report = check_martens(&lam, &mu, &qubit::pvm_y(), &qubit::pvm_z()).unwrap();
    assert!(report.satisfied);
    assert!(report.lhs >= std::f64::consts::LN_2 - 1e-6);

    let w = wigner_measure(&biv, &lam, &mu, &Tolerances::default()).unwrap();
    let rows = w.row_marginals();
    let cols = w.col_marginals();
    for k in 0..2 {
        assert!(max_abs_diff(&rows[k], qubit::pvm_y().projector(k)) <= 1e-3);
        assert!(max_abs_diff(&cols[k], qubit::pvm_z().projector(k)) <= 1e-3);
    }
}

#[test]
fn quadrupole_probabilities_invert_to_ideal_statistics() {
    let params = quad_params();
    let state = build_initial_state(&params, &qubit::ket_z_plus()).unwrap();
    let evolved = evolve_sg(&state, &params).unwrap();
    let joint = readout_joint_bins(&evolved).unwrap();

    let (biv, _) = sterngerlach::extract_bivariate_effects(&params).unwrap();
    let tol = Tolerances::grid_extracted();
    let (lam, _) = nonideality_matrix(&biv.row_marginals(&tol).unwrap(), &qubit::pvm_y()).unwrap();
    let (mu, _) = nonideality_matrix(&biv.col_marginals(&tol).unwrap(), &qubit::pvm_z()).unwrap();

    // exact (noise-free) statistics: p_F = (1, 0) for the σ_z eigenstate
    let (p_e, p_f) = reconstruct_ideal_probs(&joint, &lam, &mu, &Tolerances::default()).unwrap();
    assert!((p_f.values[0] - 1.0).abs() <= 1e-3, "p_F = {:?}", p_f.values);
    assert!((p_e.sum() - 1.0).abs() <= 1e-9);
    assert!((p_e.values[0] - 0.5).abs() <= 1e-3, "σ_y statistics of ∣z+⟩");

    // sampled statistics at n = 1e6 stay within the binomial propagation bound
    let flat = joint.flatten(&tol).unwrap();
    let counts = sample_outcomes(&flat, 1_000_000, 99).unwrap();
    let sampled = JointProbabilities::new(
        joint.row_labels.clone(),
        joint.col_labels.clone(),
        counts.frequencies(),
    )
    .unwrap();
    let (se, sf) = reconstruct_ideal_probs(&sampled, &lam, &mu, &Tolerances::default()).unwrap();
    for (a, b) in se.values.iter().zip(p_e.values.iter()) {
        assert!((a - b).abs() <= 5e-3, "σ_y recovery drifted: {a} vs {b}");
    }
    for (a, b) in sf.values.iter().zip(p_f.values.iter()) {
        assert!((a - b).abs() <= 5e-3, "σ_z recovery drifted: {a} vs {b}");
    }
}

#[test]
fn two_probe_model_marginals_fit_exactly_and_invert() {
    for (ty, tz) in [(0.7, 0.9), (1.1, 0.5), (0.4, 0.4)] {
        let model = two_probe_qubit_model(ty, tz).unwrap();
        let biv = extract_bivariate_effects(
            &model,
            2,
            2,
            vec!["+".into(), "-".into()],
            vec!["+".into(), "-".into()],
        )
        .unwrap();
        let tol = Tolerances::extracted();
        let (lam, res_y) =
            nonideality_matrix(&biv.row_marginals(&tol).unwrap(), &qubit::pvm_y()).unwrap();
        let (mu, res_z) =
            nonideality_matrix(&biv.col_marginals(&tol).unwrap(), &qubit::pvm_z()).unwrap();
        assert!(res_y <= 1e-9, "sequential couplings give exact λ-form, got {res_y}");
        assert!(res_z <= 1e-9, "sequential couplings give exact μ-form, got {res_z}");

        // closed forms worked out by hand: the probe-1 record has sharpness
        // sin θ_y; the probe-2 record sees σ_z shrunk by the cos θ_y
        // dephasing of the first coupling
        let lam_diag = (1.0 + ty.sin()) / 2.0;
        let mu_diag = (1.0 + tz.sin() * ty.cos()) / 2.0;
        assert!((lam.entry(0, 0) - lam_diag).abs() < 1e-9, "λ₀₀ vs sin θ_y");
        assert!((lam.entry(1, 1) - lam_diag).abs() < 1e-9);
        assert!((mu.entry(0, 0) - mu_diag).abs() < 1e-9, "μ₀₀ vs sin θ_z cos θ_y");
        assert!((mu.entry(1, 1) - mu_diag).abs() < 1e-9);

        let report = check_martens(&lam, &mu, &qubit::pvm_y(), &qubit::pvm_z()).unwrap();
        assert!(report.satisfied, "θ = ({ty}, {tz})");

        let w = wigner_measure(&biv, &lam, &mu, &Tolerances::default()).unwrap();
        for k in 0..2 {
            assert!(max_abs_diff(&w.row_marginals()[k], qubit::pvm_y().projector(k)) <= 1e-8);
            assert!(max_abs_diff(&w.col_marginals()[k], qubit::pvm_z().projector(k)) <= 1e-8);
        }
    }
}

/// Two object states sent through the same corrected-variant premeasurement
/// induce different Schmidt bases on the spatial (ancilla) side; the
/// decomposition tracks the preparation, not the instrument.
#[test]
fn grid_schmidt_bases_depend_on_preparation() {
    use measim_core::schmidt::schmidt_decompose;

    let params = SgParams {
        grid_n: 16,
        extent: 16.0,
        packet_width: 2.0,
        b: 1.0,
        steps: Some(32),
        ..SgParams::defaults_for(SgVariant::Corrected)
    };
    let mut right_bases = Vec::new();
    for spin in [qubit::ket_z_plus(), qubit::ket_x_plus()] {
        let state = build_initial_state(&params, &spin).unwrap();
        let out = evolve_sg(&state, &params).unwrap();
        // flatten to a spin ⊗ space state vector, normalized
        let n2 = params.grid_n * params.grid_n;
        let mut amps: Vec<C64> = out.amplitudes().to_vec();
        let scale = out.spacing();
        for a in &mut amps {
            *a *= scale;
        }
        let psi = nalgebra::DVector::from_vec(amps);
        let s = schmidt_decompose(&psi, (2, n2)).unwrap();
        right_bases.push(s.right_basis[0].clone());
    }
    let overlap = right_bases[0].dotc(&right_bases[1]).norm();
    assert!(
        1.0 - overlap > 1e-3,
        "spatial Schmidt vectors should differ, overlap {overlap}"
    );
}
