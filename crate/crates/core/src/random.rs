//! Seeded generators for operators, states, models and stochastic matrices.
//!
//! Everything here is deterministic given (seed, stream): the generator is
//! ChaCha12, a counter-based stream cipher whose output is identical across
//! platforms. Test suites and the randomized searches in reports (e.g. the
//! Wigner negativity witness) all draw from this module.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::density::DensityOperator;
use crate::measure::EffectSet;
use crate::operator::Operator;
use crate::tolerances::Tolerances;

/// The crate-wide seeded generator: ChaCha12 on (seed, stream).
pub fn rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut r = ChaCha12Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn c_std(rng: &mut ChaCha12Rng) -> C64 {
    // Box-Muller pairs; unit-variance complex Gaussian.
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let th = 2.0 * std::f64::consts::PI * u2;
    C64::new(r * th.cos(), r * th.sin()) * std::f64::consts::FRAC_1_SQRT_2
}

/// Square matrix of iid complex Gaussians.
pub fn ginibre(rng: &mut ChaCha12Rng, dim: usize) -> Operator {
    Operator::from_fn(dim, |_, _| c_std(rng)).expect("finite by construction")
}

/// Random Hermitian operator (G + G†)/2.
pub fn hermitian(rng: &mut ChaCha12Rng, dim: usize) -> Operator {
    let g = ginibre(rng, dim);
    (&g + &g.adjoint()).scaled(C64::new(0.5, 0.0))
}

/// Haar-like random unitary from the QR factorization of a Ginibre matrix,
/// with the R diagonal phase-fixed so the result is deterministic.
pub fn unitary(rng: &mut ChaCha12Rng, dim: usize) -> Operator {
    let g = ginibre(rng, dim);
    let qr = g.into_matrix().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase.conj();
        }
    }
    Operator::from_matrix(q).expect("unitary from QR")
}

/// Random normalized state vector.
pub fn pure_state(rng: &mut ChaCha12Rng, dim: usize) -> DVector<C64> {
    let mut v = DVector::from_fn(dim, |_, _| c_std(rng));
    let n = v.norm();
    v /= C64::new(n, 0.0);
    v
}

/// Random full-rank density operator GG†/Tr(GG†).
pub fn density(rng: &mut ChaCha12Rng, dim: usize) -> DensityOperator {
    let g = ginibre(rng, dim);
    let m = g.matrix() * g.matrix().adjoint();
    let tr = m.trace().re;
    DensityOperator::new(
        Operator::from_matrix(m / C64::new(tr, 0.0)).expect("finite"),
    )
    .expect("normalized Wishart matrix is a density operator")
}

/// Random NODI with `outcomes` effects: M_k = S^{-1/2} A_k S^{-1/2} with
/// A_k = G_k G_k† and S = ΣA_k.
pub fn effect_set(rng: &mut ChaCha12Rng, dim: usize, outcomes: usize) -> EffectSet {
    let parts: Vec<Operator> = (0..outcomes)
        .map(|_| {
            let g = ginibre(rng, dim);
            Operator::from_matrix(g.matrix() * g.matrix().adjoint()).expect("finite")
        })
        .collect();
    let mut sum = Operator::zeros(dim);
    for p in &parts {
        sum = &sum + p;
    }
    let inv_sqrt = sum
        .hermitian_eigen(1e-9)
        .expect("sum of PSD parts is Hermitian")
        .apply(|x| C64::new(1.0 / x.max(1e-300).sqrt(), 0.0));
    let effects: Vec<Operator> = parts
        .iter()
        .map(|a| &(&inv_sqrt * a) * &inv_sqrt)
        .collect();
    let labels = (0..outcomes).map(|k| format!("m{k}")).collect();
    EffectSet::with_tolerances(
        effects,
        labels,
        &Tolerances {
            matrix: 1e-8,
            positivity: 1e-8,
            ..Tolerances::default()
        },
    )
    .expect("whitened Wishart effects form a NODI")
}

/// Random left-stochastic matrix (each column sums to one), entries > 0.
pub fn left_stochastic(rng: &mut ChaCha12Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; cols]; rows];
    for c in 0..cols {
        let mut col: Vec<f64> = (0..rows)
            .map(|_| -(rng.gen::<f64>().max(f64::MIN_POSITIVE)).ln())
            .collect();
        let s: f64 = col.iter().sum();
        for v in &mut col {
            *v /= s;
        }
        for (row, v) in out.iter_mut().zip(col) {
            row[c] = v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic_per_seed() {
        let a = hermitian(&mut rng(5, 1), 3);
        let b = hermitian(&mut rng(5, 1), 3);
        assert_eq!(a.matrix(), b.matrix());
        let c = hermitian(&mut rng(5, 2), 3);
        assert!(crate::operator::max_abs_diff(&a, &c) > 1e-6);
    }

    #[test]
    fn unitary_is_unitary() {
        let u = unitary(&mut rng(6, 0), 4);
        assert!(u.unitarity_defect() < 1e-12);
    }

    #[test]
    fn effect_set_is_valid_nodi() {
        let set = effect_set(&mut rng(7, 0), 3, 4);
        assert!(set.completeness_defect() < 1e-9);
        assert!(set.min_eigenvalue(1e-9).unwrap() > -1e-9);
    }

    #[test]
    fn left_stochastic_columns_sum_to_one() {
        let m = left_stochastic(&mut rng(8, 0), 3, 5);
        for c in 0..5 {
            let s: f64 = m.iter().map(|row| row[c]).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
