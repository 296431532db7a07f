//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `cargo test --test acceptance -- --nocapture`).
//! Every tolerance is pinned here; nothing is deferred to calibration.

use std::time::Instant;

use measim_core::nonideality::{
    check_martens, nonideality_matrix, robertson_bound, row_entropy_j, total_uncertainty,
    von_neumann_entropy,
};
use measim_core::sampling::{convergence_report, sample_outcomes};
use measim_core::sterngerlach::{
    self, build_initial_state, evolve_sg, generic_spin, readout_momentum_bins,
    ConservedObservable, SgParams, SgVariant,
};
use measim_core::wigner::{quorum_reconstruct, wigner_measure};
use measim_core::{
    max_abs_diff, qubit, BivariateEffectSet, DensityOperator, Interaction, MeasurementModel,
    Operator, ProbabilityRecord, ProjectiveMeasure, StochasticMatrix, Tolerances,
};
use num_complex::Complex64 as C64;

fn verdict(criterion: u32, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("acceptance criterion {criterion:>2} [{name}]: {status} ({detail})");
    assert!(pass, "criterion {criterion} [{name}] failed: {detail}");
}

fn random_model(rng: &mut rand_chacha::ChaCha12Rng, d_o: usize, d_a: usize) -> MeasurementModel {
    let u = measim_core::random::unitary(rng, d_o * d_a);
    let anc = measim_core::random::density(rng, d_a);
    let pointer = measim_core::random::effect_set(rng, d_a, d_a.min(3));
    MeasurementModel::new(d_o, d_a, Interaction::Unitary(u), anc, pointer).unwrap()
}

/// Criterion 1: pointer statistics equal extracted-POVM expectations,
/// max_k |p_(a)k(T) − Tr(ρ_o M_k(T))| ≤ 1e-9 over 100 random pairs, < 10 s.
#[test]
fn criterion_01_probability_identity() {
    let start = Instant::now();
    let mut rng = measim_core::random::rng(2023, 1);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let d_o = 2 + (i % 2);
        let d_a = 2 + (i % 3);
        let model = random_model(&mut rng, d_o, d_a);
        let rho = measim_core::random::density(&mut rng, d_o);
        let dev = model.check_probability_identity(&rho).unwrap();
        worst = worst.max(dev);
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        1,
        "probability identity",
        worst <= 1e-9 && elapsed < 10.0,
        &format!("max deviation {worst:.2e}, {elapsed:.2} s"),
    );
}

/// Criterion 2: ideal strong-coupling sign correlation ≥ 0.99 for ∣z±⟩,
/// exact (½, ½) at b = 0, < 60 s at gridN = 128.
#[test]
fn criterion_02_strict_correlation() {
    let start = Instant::now();
    let params = SgParams::defaults_for(SgVariant::Ideal);
    let run = |p: &SgParams, spin: nalgebra::DVector<C64>| {
        let state = build_initial_state(p, &spin).unwrap();
        readout_momentum_bins(&evolve_sg(&state, p).unwrap(), p.variant).unwrap()
    };
    let up = run(&params, qubit::ket_z_plus());
    let down = run(&params, qubit::ket_z_minus());

    let free = SgParams {
        b: 0.0,
        steps: Some(32),
        ..params.clone()
    };
    let split = run(&free, qubit::ket_z_plus());
    let sym_dev = (split.get(0) - 0.5).abs().max((split.get(1) - 0.5).abs());

    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        2,
        "strict correlation",
        up.get(0) >= 0.99 && down.get(1) >= 0.99 && sym_dev <= 1e-8 && elapsed < 60.0,
        &format!(
            "p(upper|z+) {:.6}, p(lower|z−) {:.6}, b=0 dev {sym_dev:.2e}, {elapsed:.2} s",
            up.get(0),
            down.get(1)
        ),
    );
}

/// Criterion 3: ⟨P_z⟩(τ) matches the Heisenberg drift ½bτ⟨σ_z⟩(0) within
/// 0.5% relative (ideal variant, μ = 1).
#[test]
fn criterion_03_ehrenfest_drift() {
    let params = SgParams::defaults_for(SgVariant::Ideal);
    let mut worst: f64 = 0.0;
    for spin in [qubit::ket_z_plus(), qubit::ket_z_minus(), generic_spin()] {
        let state = build_initial_state(&params, &spin).unwrap();
        let sz0 = state.sigma_expectations()[2];
        let out = evolve_sg(&state, &params).unwrap();
        let (_, pz) = out.mean_momentum();
        let target = 0.5 * params.b * params.tau * sz0;
        worst = worst.max((pz - target).abs() / target.abs());
    }
    verdict(
        3,
        "Ehrenfest drift",
        worst <= 0.005,
        &format!("max relative error {worst:.2e}"),
    );
}

/// Criterion 4: σ_z conserved (ideal) and broken (corrected); L_x − σ_x/2
/// conserved by the corrected variant within discretization, the residual
/// at least halving under 2× grid refinement.
#[test]
fn criterion_04_constants_of_motion() {
    let ideal = SgParams::defaults_for(SgVariant::Ideal);
    let r_ideal = sterngerlach::conserved_quantity_residual(&ideal, ConservedObservable::SigmaZ)
        .unwrap();

    let corrected = SgParams::defaults_for(SgVariant::Corrected);
    let r_sz = sterngerlach::conserved_quantity_residual(&corrected, ConservedObservable::SigmaZ)
        .unwrap();
    let r_g = sterngerlach::conserved_quantity_residual(
        &corrected,
        ConservedObservable::LxMinusHalfSigmaX,
    )
    .unwrap();

    // refinement study in the truncation-dominated regime: the coarse grid
    // carries visible momentum-space truncation error, the fine grid does not
    let coarse = SgParams {
        grid_n: 64,
        ..corrected.clone()
    };
    let fine = SgParams {
        grid_n: 128,
        ..corrected.clone()
    };
    let r_coarse = sterngerlach::conserved_quantity_residual(
        &coarse,
        ConservedObservable::LxMinusHalfSigmaX,
    )
    .unwrap();
    let r_fine =
        sterngerlach::conserved_quantity_residual(&fine, ConservedObservable::LxMinusHalfSigmaX)
            .unwrap();

    let pass = r_ideal <= 1e-8
        && r_sz > 1e-3
        && r_g <= 1e-4
        && r_coarse <= 1e-4
        && r_fine <= r_coarse / 2.0;
    verdict(
        4,
        "constants of motion",
        pass,
        &format!(
            "ideal σ_z {r_ideal:.2e}; corrected σ_z {r_sz:.2e}; L_x−σ_x/2 {r_g:.2e}; \
             refinement {r_coarse:.2e} → {r_fine:.2e}"
        ),
    );
}

/// Criterion 5: calibration-path λ equals tomography-path λ within 1e-6;
/// J(identity) = 0; J ≥ 0 on 1000 random left-stochastic matrices.
#[test]
fn criterion_05_nonideality_calculus() {
    let params = SgParams::defaults_for(SgVariant::Corrected);
    let lam_cal = sterngerlach::calibrate(&params).unwrap();
    let (effects, _) = sterngerlach::extract_effects(&params).unwrap();
    let (lam_tomo, _) = nonideality_matrix(&effects, &qubit::pvm_z()).unwrap();
    let mut path_diff: f64 = 0.0;
    for k in 0..2 {
        for kp in 0..2 {
            path_diff = path_diff.max((lam_cal.entry(k, kp) - lam_tomo.entry(k, kp)).abs());
        }
    }

    let ident = StochasticMatrix::identity(vec!["+".into(), "-".into()]);
    let j_ident = row_entropy_j(&ident);

    let mut rng = measim_core::random::rng(2023, 5);
    let mut j_min = f64::INFINITY;
    for i in 0..1000 {
        let rows = 2 + (i % 3);
        let cols = 2 + (i % 2);
        let m = measim_core::random::left_stochastic(&mut rng, rows, cols);
        let lam = StochasticMatrix::new(
            m,
            (0..rows).map(|k| format!("r{k}")).collect(),
            (0..cols).map(|k| format!("c{k}")).collect(),
        )
        .unwrap();
        j_min = j_min.min(row_entropy_j(&lam));
    }

    verdict(
        5,
        "nonideality calculus",
        path_diff <= 1e-6 && j_ident == 0.0 && j_min >= -1e-12,
        &format!("path diff {path_diff:.2e}, J(I) {j_ident}, min J {j_min:.2e}"),
    );
}

/// Criterion 6: the quadrupole extraction satisfies the Martens bound
/// J_λ + J_μ ≥ ln 2 − 1e-6, and the generalized-Martens slack equals H_vN
/// to 1e-12 on random inputs.
#[test]
fn criterion_06_martens() {
    let params = SgParams::defaults_for(SgVariant::Quadrupole);
    let (biv, _) = sterngerlach::extract_bivariate_effects(&params).unwrap();
    let tol = Tolerances::grid_extracted();
    let (lam, _) = nonideality_matrix(&biv.row_marginals(&tol).unwrap(), &qubit::pvm_y()).unwrap();
    let (mu, _) = nonideality_matrix(&biv.col_marginals(&tol).unwrap(), &qubit::pvm_z()).unwrap();
    let report = check_martens(&lam, &mu, &qubit::pvm_y(), &qubit::pvm_z()).unwrap();

    let mut rng = measim_core::random::rng(2023, 6);
    let mut worst_slack_dev: f64 = 0.0;
    for _ in 0..100 {
        let rho = measim_core::random::density(&mut rng, 3);
        let l = StochasticMatrix::new(
            measim_core::random::left_stochastic(&mut rng, 3, 3),
            vec!["a".into(), "b".into(), "c".into()],
            vec!["x".into(), "y".into(), "z".into()],
        )
        .unwrap();
        let m = StochasticMatrix::new(
            measim_core::random::left_stochastic(&mut rng, 2, 3),
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into(), "z".into()],
        )
        .unwrap();
        let rep = total_uncertainty(&rho, &l, Some(&m));
        worst_slack_dev = worst_slack_dev.max((rep.slack - von_neumann_entropy(&rho)).abs());
    }

    verdict(
        6,
        "Martens inequality",
        report.lhs >= std::f64::consts::LN_2 - 1e-6 && worst_slack_dev <= 1e-12,
        &format!(
            "J_λ+J_μ {:.6} ≥ ln2−1e-6; slack−H_vN max {worst_slack_dev:.2e}",
            report.lhs
        ),
    );
}

/// Criterion 7: Robertson inequality on 1000 random Hermitian pairs and
/// states, and saturation lhs = rhs = 1 at (σ_y, σ_z, ∣x+⟩).
#[test]
fn criterion_07_robertson() {
    let mut rng = measim_core::random::rng(2023, 7);
    let mut worst_violation = f64::INFINITY;
    for i in 0..1000 {
        let dim = 2 + (i % 3);
        let a = measim_core::random::hermitian(&mut rng, dim);
        let b = measim_core::random::hermitian(&mut rng, dim);
        let psi = measim_core::random::pure_state(&mut rng, dim);
        let (lhs, rhs) = robertson_bound(&a, &b, &psi).unwrap();
        worst_violation = worst_violation.min(lhs - rhs);
    }
    let (lhs, rhs) =
        robertson_bound(&qubit::sigma_y(), &qubit::sigma_z(), &qubit::ket_x_plus()).unwrap();
    let saturated = (lhs - 1.0).abs() <= 1e-12 && (rhs - 1.0).abs() <= 1e-12;
    verdict(
        7,
        "Robertson inequality",
        worst_violation >= -1e-10 && saturated,
        &format!("min(lhs−rhs) {worst_violation:.2e}; ∣x+⟩ case ({lhs}, {rhs})"),
    );
}

/// Criterion 8: Wigner marginal identities within 1e-8 on generated
/// bivariate models, exact univariate recovery of the PVM, and a negativity
/// witness instance.
#[test]
fn criterion_08_wigner_machinery() {
    let tol = Tolerances::default();

    // generated bivariate models: unsharp mixtures over the η disc
    let mut rng = measim_core::random::rng(2023, 8);
    use rand::Rng;
    let mut worst_marginal: f64 = 0.0;
    let mut witness: Option<f64> = None;
    for _ in 0..50 {
        let r: f64 = 0.2 + 0.75 * rng.gen::<f64>();
        let phi: f64 = 0.1 + 1.35 * rng.gen::<f64>();
        let (biv, lam, mu) = eta_family(r * phi.cos(), r * phi.sin());
        let w = wigner_measure(&biv, &lam, &mu, &tol).unwrap();
        for k in 0..2 {
            worst_marginal = worst_marginal
                .max(max_abs_diff(&w.row_marginals()[k], qubit::pvm_y().projector(k)))
                .max(max_abs_diff(&w.col_marginals()[k], qubit::pvm_z().projector(k)));
        }
        let min_eig = w.min_eigenvalue();
        if min_eig < -1e-8 {
            witness = Some(witness.map_or(min_eig, |w: f64| w.min(min_eig)));
        }
    }

    // univariate degenerate case: W_k' = E_k' exactly
    let lam = StochasticMatrix::new(
        vec![vec![0.8, 0.3], vec![0.2, 0.7]],
        vec!["+".into(), "-".into()],
        vec!["+".into(), "-".into()],
    )
    .unwrap();
    let pvm = qubit::pvm_z();
    let grid: Vec<Vec<Operator>> = (0..2)
        .map(|k| {
            vec![
                &pvm.projector(0).scaled(C64::new(lam.entry(k, 0), 0.0))
                    + &pvm.projector(1).scaled(C64::new(lam.entry(k, 1), 0.0)),
            ]
        })
        .collect();
    let biv = BivariateEffectSet::new(
        grid,
        vec!["+".into(), "-".into()],
        vec!["all".into()],
        &tol,
    )
    .unwrap();
    let mu = StochasticMatrix::identity(vec!["all".into()]);
    let w = wigner_measure(&biv, &lam, &mu, &tol).unwrap();
    let mut univariate_err: f64 = 0.0;
    for kp in 0..2 {
        univariate_err = univariate_err.max(max_abs_diff(w.element(kp, 0), pvm.projector(kp)));
    }

    let witness_found = witness.is_some();
    verdict(
        8,
        "Wigner machinery",
        worst_marginal <= 1e-8 && univariate_err <= 1e-10 && witness_found,
        &format!(
            "marginal residual {worst_marginal:.2e}; univariate {univariate_err:.2e}; \
             negativity witness min eigenvalue {:?}",
            witness
        ),
    );
}

fn eta_family(eta_y: f64, eta_z: f64) -> (BivariateEffectSet, StochasticMatrix, StochasticMatrix) {
    let labels = vec!["+".to_string(), "-".to_string()];
    let mut grid = Vec::new();
    for s in [1.0, -1.0] {
        let mut row = Vec::new();
        for t in [1.0, -1.0] {
            let m = &(&Operator::identity(2)
                + &qubit::sigma_y().scaled(C64::new(s * eta_y, 0.0)))
                + &qubit::sigma_z().scaled(C64::new(t * eta_z, 0.0));
            row.push(m.scaled(C64::new(0.25, 0.0)));
        }
        grid.push(row);
    }
    let biv =
        BivariateEffectSet::new(grid, labels.clone(), labels.clone(), &Tolerances::default())
            .unwrap();
    let mix = |eta: f64| {
        StochasticMatrix::new(
            vec![
                vec![(1.0 + eta) / 2.0, (1.0 - eta) / 2.0],
                vec![(1.0 - eta) / 2.0, (1.0 + eta) / 2.0],
            ],
            labels.clone(),
            labels.clone(),
        )
        .unwrap()
    };
    (biv, mix(eta_y), mix(eta_z))
}

/// Criterion 9: quorum reconstruction of random qubit states — exact
/// statistics recover ρ within 1e-10, n = 10⁶ samples within 5e-3.
#[test]
fn criterion_09_quorum_reconstruction() {
    let tol = Tolerances::default();
    let pvms = [qubit::pvm_x(), qubit::pvm_y(), qubit::pvm_z()];
    let mut rng = measim_core::random::rng(2023, 9);

    let mut worst_exact: f64 = 0.0;
    for _ in 0..20 {
        let rho = measim_core::random::density(&mut rng, 2);
        let measurements: Vec<(ProjectiveMeasure, ProbabilityRecord)> = pvms
            .iter()
            .map(|pvm| {
                let probs: Vec<f64> =
                    pvm.projectors().iter().map(|e| rho.expectation(e)).collect();
                (
                    pvm.clone(),
                    ProbabilityRecord::new(pvm.labels().to_vec(), probs).unwrap(),
                )
            })
            .collect();
        let rec = quorum_reconstruct(&measurements, &tol).unwrap();
        worst_exact = worst_exact.max(max_abs_diff(rec.rho.op(), rho.op()));
    }

    let rho = DensityOperator::pure(&generic_spin()).unwrap();
    let sampled: Vec<(ProjectiveMeasure, ProbabilityRecord)> = pvms
        .iter()
        .enumerate()
        .map(|(idx, pvm)| {
            let probs: Vec<f64> = pvm.projectors().iter().map(|e| rho.expectation(e)).collect();
            let record = ProbabilityRecord::new(pvm.labels().to_vec(), probs).unwrap();
            let counts = sample_outcomes(&record, 1_000_000, 2023 + idx as u64).unwrap();
            (
                pvm.clone(),
                ProbabilityRecord::new(pvm.labels().to_vec(), counts.frequencies()).unwrap(),
            )
        })
        .collect();
    let rec = quorum_reconstruct(&sampled, &tol).unwrap();
    let sampled_err = max_abs_diff(rec.rho.op(), rho.op());

    verdict(
        9,
        "quorum reconstruction",
        worst_exact <= 1e-10 && sampled_err <= 5e-3,
        &format!("exact {worst_exact:.2e}; sampled(1e6) {sampled_err:.2e}"),
    );
}

/// Criterion 10: law of large numbers — fixed-seed frequency error ≤ 0.01
/// at n = 1e5 for p = ½, and log-log slope in [−0.65, −0.35] over 1e2–1e6.
#[test]
fn criterion_10_sampling_lln() {
    let probs = ProbabilityRecord::new(vec!["+".into(), "-".into()], vec![0.5, 0.5]).unwrap();
    let counts = sample_outcomes(&probs, 100_000, 2023).unwrap();
    let freq_err = counts.max_abs_error(&probs);

    let report = convergence_report(&probs, &[100, 1000, 10_000, 100_000, 1_000_000], 2023)
        .unwrap();
    let slope = report.fitted_slope.unwrap_or(f64::NAN);

    verdict(
        10,
        "sampling LLN",
        freq_err <= 0.01 && (-0.65..=-0.35).contains(&slope),
        &format!("freq error {freq_err:.4}; slope {slope:.3}"),
    );
}

/// Criterion 11: identical config + seed reproduce every report payload
/// byte-for-byte across independent CLI invocations.
#[test]
fn criterion_11_determinism() {
    let bin = env!("CARGO_BIN_EXE_measim");
    let base = tempfile::tempdir().unwrap();
    let dirs = [base.path().join("run-a"), base.path().join("run-b")];
    let commands: Vec<Vec<String>> = vec![
        vec![
            "sg".into(),
            "run".into(),
            "--variant".into(),
            "corrected".into(),
            "--grid-n".into(),
            "64".into(),
            "--spin".into(),
            "x+".into(),
            "--calibrate".into(),
            "--samples".into(),
            "5000".into(),
            "--seed".into(),
            "11".into(),
        ],
        vec![
            "convergence".into(),
            "--p".into(),
            "0.25,0.75".into(),
            "--schedule".into(),
            "100,1000,10000".into(),
            "--seed".into(),
            "3".into(),
        ],
        vec![
            "tomography".into(),
            "--demo".into(),
            "controlled-flip".into(),
            "--quorum-spin".into(),
            "y+".into(),
            "--quorum-samples".into(),
            "20000".into(),
            "--seed".into(),
            "5".into(),
        ],
    ];

    for dir in &dirs {
        for cmd in &commands {
            let status = std::process::Command::new(bin)
                .args(cmd)
                .arg("--out")
                .arg(dir)
                .stdout(std::process::Stdio::null())
                .status()
                .unwrap();
            assert!(status.success(), "command {cmd:?} failed");
        }
    }

    let mut names: Vec<String> = std::fs::read_dir(&dirs[0])
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(!names.is_empty());
    let mut all_equal = true;
    for name in &names {
        let a = std::fs::read(dirs[0].join(name)).unwrap();
        let b = std::fs::read(dirs[1].join(name)).unwrap();
        if a != b {
            all_equal = false;
            eprintln!("artifact {name} differs between identical runs");
        }
    }
    verdict(
        11,
        "determinism",
        all_equal,
        &format!("{} artifacts byte-identical", names.len()),
    );
}
