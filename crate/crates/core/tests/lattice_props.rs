use proptest::prelude::*;

use hypercrystal::lattice::{
    check_ccr, commutator, coord_mu, induced_matrix, induced_matrix_with_margin, partial_mu, poincare_basis, AffineGenerator,
    LatticeWindow, Point, DIM,
};
use hypercrystal::vacua::MetricForm;
use hypercrystal::{Matrix, Scalar};

fn small() -> impl Strategy<Value = i64> {
    -2i64..=2
}

fn combo(coeffs: &[i64]) -> AffineGenerator {
    let basis = poincare_basis(MetricForm::null_form().matrix());
    let mut alpha = vec![Scalar::zero(); DIM];
    let mut omega = Matrix::zeros(DIM, DIM);
    for (c, g) in coeffs.iter().zip(&basis) {
        let c = Scalar::from_i64(*c);
        for (a, b) in alpha.iter_mut().zip(&g.alpha) {
            *a += &(&c * b);
        }
        omega = &omega + &g.omega.scale(&c);
    }
    AffineGenerator { label: "combo".into(), alpha, omega }
}

fn interior_point(n: i32) -> impl Strategy<Value = Point> {
    prop::array::uniform4(-(n - 1)..=(n - 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ccr_on_interior_kets(n in 2u32..=4, mu in 1usize..=DIM, lambda in 1usize..=DIM, seed in any::<u64>()) {
        let w = LatticeWindow::new(n).unwrap();
        let pts: Vec<Point> = w.interior_points();
        let p = pts[(seed % pts.len() as u64) as usize];
        let c = commutator(&partial_mu(mu, w).unwrap(), &coord_mu(lambda, w).unwrap()).unwrap();
        let expect = if mu == lambda { vec![(p, Scalar::one())] } else { vec![] };
        prop_assert_eq!(c.apply_point(&p), expect);
    }

    #[test]
    fn interior_action_is_independent_of_window(coeffs in prop::collection::vec(small(), 10), p in interior_point(2)) {
        // Same generator at N=2 and N=3 agrees on kets whose images stay inside both.
        let gen = combo(&coeffs);
        let a = gen.lattice_op(LatticeWindow::new(2).unwrap()).unwrap();
        let b = gen.lattice_op(LatticeWindow::new(3).unwrap()).unwrap();
        if p.iter().all(|x| x.abs() <= 1) {
            prop_assert_eq!(a.apply_point(&p), b.apply_point(&p));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn induced_matrix_is_a_homomorphism(a in prop::collection::vec(small(), 10), b in prop::collection::vec(small(), 10)) {
        let w = LatticeWindow::new(4).unwrap();
        let (ga, gb) = (combo(&a), combo(&b));
        let (oa, ob) = (ga.lattice_op(w).unwrap(), gb.lattice_op(w).unwrap());
        let ia = induced_matrix_with_margin(&oa, 3).unwrap();
        let ib = induced_matrix_with_margin(&ob, 3).unwrap();
        prop_assert_eq!(&ia, &ga.omega);
        let ic = induced_matrix_with_margin(&commutator(&oa, &ob).unwrap(), 3).unwrap();
        prop_assert_eq!(ic, ia.commutator(&ib));
    }
}

#[test]
fn ccr_reports_agree_at_two_and_three() {
    let r2 = check_ccr(LatticeWindow::new(2).unwrap()).unwrap();
    let r3 = check_ccr(LatticeWindow::new(3).unwrap()).unwrap();
    assert!(r2.passed() && r3.passed());
    assert_eq!((r2.index_pairs, r3.index_pairs), (16, 16));
}

#[test]
fn induced_basis_matrices_agree_at_three_and_four() {
    for gen in poincare_basis(MetricForm::null_form().matrix()) {
        let m3 = induced_matrix(&gen.lattice_op(LatticeWindow::new(3).unwrap()).unwrap()).unwrap();
        let m4 = induced_matrix(&gen.lattice_op(LatticeWindow::new(4).unwrap()).unwrap()).unwrap();
        assert_eq!(m3, m4, "{}", gen.label);
    }
}
