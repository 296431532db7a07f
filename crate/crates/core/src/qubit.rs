//! Spin-1/2 constants: Pauli operators, the named kets ∣z±⟩, ∣x±⟩, ∣y±⟩ and
//! their projective measures.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::measure::ProjectiveMeasure;
use crate::operator::Operator;

pub fn sigma_x() -> Operator {
    Operator::from_rows(
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    )
    .expect("static matrix")
}

pub fn sigma_y() -> Operator {
    Operator::from_rows(
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ],
    )
    .expect("static matrix")
}

pub fn sigma_z() -> Operator {
    Operator::from_rows(
        2,
        &[
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        ],
    )
    .expect("static matrix")
}

pub fn ket(c0: C64, c1: C64) -> DVector<C64> {
    DVector::from_vec(vec![c0, c1])
}

pub fn ket_z_plus() -> DVector<C64> {
    ket(C64::new(1.0, 0.0), C64::new(0.0, 0.0))
}

pub fn ket_z_minus() -> DVector<C64> {
    ket(C64::new(0.0, 0.0), C64::new(1.0, 0.0))
}

pub fn ket_x_plus() -> DVector<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ket(C64::new(s, 0.0), C64::new(s, 0.0))
}

pub fn ket_x_minus() -> DVector<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ket(C64::new(s, 0.0), C64::new(-s, 0.0))
}

pub fn ket_y_plus() -> DVector<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ket(C64::new(s, 0.0), C64::new(0.0, s))
}

pub fn ket_y_minus() -> DVector<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ket(C64::new(s, 0.0), C64::new(0.0, -s))
}

fn pvm_from_kets(plus: DVector<C64>, minus: DVector<C64>) -> ProjectiveMeasure {
    ProjectiveMeasure::new(
        vec![Operator::outer(&plus), Operator::outer(&minus)],
        vec!["+".into(), "-".into()],
    )
    .expect("static PVM")
}

/// Eigenprojectors of σ_z, labels "+", "-".
pub fn pvm_z() -> ProjectiveMeasure {
    pvm_from_kets(ket_z_plus(), ket_z_minus())
}

/// Eigenprojectors of σ_x, labels "+", "-".
pub fn pvm_x() -> ProjectiveMeasure {
    pvm_from_kets(ket_x_plus(), ket_x_minus())
}

/// Eigenprojectors of σ_y, labels "+", "-".
pub fn pvm_y() -> ProjectiveMeasure {
    pvm_from_kets(ket_y_plus(), ket_y_minus())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{commutator, max_abs_diff};

    #[test]
    fn pauli_algebra() {
        let expected = sigma_z().scaled(C64::new(0.0, 2.0));
        assert!(max_abs_diff(&commutator(&sigma_x(), &sigma_y()), &expected) < 1e-15);
    }

    #[test]
    fn named_kets_are_eigenvectors() {
        for (op, plus, minus) in [
            (sigma_z(), ket_z_plus(), ket_z_minus()),
            (sigma_x(), ket_x_plus(), ket_x_minus()),
            (sigma_y(), ket_y_plus(), ket_y_minus()),
        ] {
            assert!((op.expectation(&plus).re - 1.0).abs() < 1e-15);
            assert!((op.expectation(&minus).re + 1.0).abs() < 1e-15);
        }
    }
}
