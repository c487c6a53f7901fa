use num_complex::Complex;
use proptest::prelude::*;
use wgqed::qcore::{
    conjugate, expm_skew, herm_eigen, on_qubit, partial_trace3, pauli, tensor, tensor_all,
    trace_out_qubit, ComplexMatrix, DensityMatrix, Subsystem,
};

fn matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2 * dim * dim).prop_map(move |v| {
        ComplexMatrix::from_rows(
            v.chunks_exact(2)
                .map(|p| Complex::new(p[0], p[1]))
                .collect(),
        )
        .unwrap()
    })
}

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix<f64>> {
    matrix(dim).prop_map(|m| (&m + &m.adjoint()).scale_real(0.5))
}

/// Random density matrix `A A† / tr(A A†)`.
fn density(dim: usize) -> impl Strategy<Value = ComplexMatrix<f64>> {
    matrix(dim).prop_map(|a| {
        let p = &a * &a.adjoint();
        let tr = p.trace().re;
        p.scale_real(1.0 / tr)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_is_associative(a in matrix(2), b in matrix(2), c in matrix(2)) {
        let left = tensor(&tensor(&a, &b).unwrap(), &c).unwrap();
        let right = tensor(&a, &tensor(&b, &c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) < 1e-14);
    }

    #[test]
    fn tensor_mixed_product(a in matrix(2), b in matrix(2), c in matrix(2), d in matrix(2)) {
        let lhs = &tensor(&a, &b).unwrap() * &tensor(&c, &d).unwrap();
        let rhs = tensor(&(&a * &c), &(&b * &d)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-13);
    }

    #[test]
    fn partial_trace_of_product(a in density(2), b in density(2), c in density(2)) {
        let rho = tensor_all(&[&a, &b, &c]).unwrap();
        let bc = tensor(&b, &c).unwrap();
        let ac = tensor(&a, &c).unwrap();
        let ab = tensor(&a, &b).unwrap();
        prop_assert!(partial_trace3(&rho, Subsystem::First).unwrap().max_abs_diff(&bc) < 1e-14);
        prop_assert!(partial_trace3(&rho, Subsystem::Middle).unwrap().max_abs_diff(&ac) < 1e-14);
        prop_assert!(partial_trace3(&rho, Subsystem::Last).unwrap().max_abs_diff(&ab) < 1e-14);
        prop_assert!(trace_out_qubit(&tensor(&a, &b).unwrap(), 1).unwrap().max_abs_diff(&a) < 1e-14);
    }

    #[test]
    fn expm_is_unitary(h in hermitian(4), theta in -5.0f64..5.0) {
        let u = expm_skew(&h, theta, 1).unwrap();
        let id = ComplexMatrix::identity(4);
        prop_assert!((&u * &u.adjoint()).max_abs_diff(&id) < 1e-12);
        let back = expm_skew(&h, theta, -1).unwrap();
        prop_assert!((&u * &back).max_abs_diff(&id) < 1e-12);
    }

    #[test]
    fn eigen_reconstructs(h in hermitian(8)) {
        let eig = herm_eigen(&h).unwrap();
        let rebuilt = eig.map_spectrum(|l| Complex::new(l, 0.0));
        prop_assert!(rebuilt.max_abs_diff(&h) < 1e-12);
        let sum: f64 = eig.values.iter().sum();
        prop_assert!((sum - h.trace().re).abs() < 1e-12);
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn conjugation_keeps_density(rho in density(4), h in hermitian(4), theta in -3.0f64..3.0) {
        let u = expm_skew(&h, theta, 1).unwrap();
        let out = DensityMatrix::new(conjugate(&u, &rho)).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_bounds(a in density(4), b in density(4)) {
        let (ra, rb) = (DensityMatrix::new(a).unwrap(), DensityMatrix::new(b).unwrap());
        let fab = ra.fidelity(&rb).unwrap();
        let fba = rb.fidelity(&ra).unwrap();
        prop_assert!(fab > -1e-12 && fab < 1.0 + 1e-9);
        prop_assert!((fab - fba).abs() < 1e-8);
        prop_assert!((ra.fidelity(&ra).unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn operator_embedding_matches_explicit_kron() {
    let l = pauli::lower::<f64>();
    let id = ComplexMatrix::identity(2);
    let embedded = on_qubit(&l, 1, 3).unwrap();
    let explicit = tensor_all(&[&id, &l, &id]).unwrap();
    assert_eq!(embedded, explicit);
}

#[test]
fn register_limit() {
    let m = ComplexMatrix::<f64>::identity(4);
    assert!(tensor(&m, &tensor(&m, &ComplexMatrix::identity(2)).unwrap()).is_err());
}

#[test]
fn single_precision_density() {
    let m = ComplexMatrix::<f32>::diag(&[0.25, 0.75]);
    let rho = wgqed::DensityMatrix32::with_tolerance(m, 1e-5).unwrap();
    let purity = (rho.matrix() * rho.matrix()).trace().re;
    assert!((purity - 0.625).abs() < 1e-6);
}
