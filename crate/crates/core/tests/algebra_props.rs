use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hypercrystal::exterior::{anticommutator, clifford_product, pairing, sectors, wedge};
use hypercrystal::metatensor::{
    lift_derivation, lift_substitution, node, number_operator, point, unitize, DepthOperator, LabelMap, MatrixMap, NumberKind,
    SlGenerator,
};
use hypercrystal::symmetry::random_network;
use hypercrystal::{Atom, Extensor, Label, Matrix, Scalar, Word};

// ------------------------------------------------------------ strategies

fn scalar() -> impl Strategy<Value = Scalar> {
    prop::array::uniform4((-4i64..=4, 1i64..=3)).prop_map(|parts| {
        let [a, b, c, d] = parts.map(|(n, m)| Scalar::ratio(n, m));
        let i = Scalar::i();
        let r = Scalar::sqrt3();
        &(&(&a + &(&b * &i)) + &(&c * &r)) + &(&(&d * &i) * &r)
    })
}

fn small_int() -> impl Strategy<Value = Scalar> {
    (-3i64..=3).prop_map(Scalar::from_i64)
}

/// Labels 0..8: `v` primal 0..4, `v` dual 0..2, `u` primal 0..2.
fn atom(k: u8) -> Label {
    match k {
        0..=3 => Atom::primal("v", &[k as i32]).into(),
        4..=5 => Atom::dual_of("v", &[(k - 4) as i32]).into(),
        _ => Atom::primal("u", &[(k - 6) as i32]).into(),
    }
}

fn word_labels() -> impl Strategy<Value = Vec<Label>> {
    prop::collection::vec(0u8..8, 0..5).prop_map(|ks| ks.into_iter().map(atom).collect())
}

/// Grade-`k` extensor with up to 3 terms.
fn homogeneous(k: usize) -> impl Strategy<Value = Extensor> {
    prop::collection::vec((prop::collection::btree_set(0u8..8, k..=k), small_int()), 1..=3).prop_map(|terms| {
        let mut out = Extensor::zero();
        for (ks, c) in terms {
            out.add_scaled(&Extensor::from_labels(ks.into_iter().map(atom).collect(), Scalar::one()), &c);
        }
        out
    })
}

fn mixed() -> impl Strategy<Value = Extensor> {
    (0usize..=3).prop_flat_map(homogeneous)
}

fn grade_one(dual_ok: bool) -> impl Strategy<Value = Extensor> {
    let top = if dual_ok { 6u8 } else { 4u8 };
    prop::collection::vec((0u8..top, small_int()), 1..=4).prop_map(|terms| {
        let mut out = Extensor::zero();
        for (k, c) in terms {
            out.add_scaled(&Extensor::from_label(atom(k)), &c);
        }
        out
    })
}

#[derive(Clone, Debug)]
enum Tree {
    Leaf(u8),
    Node(Vec<Tree>),
}

fn tree() -> impl Strategy<Value = Tree> {
    let leaf = (0u8..8).prop_map(Tree::Leaf);
    leaf.prop_recursive(2, 12, 3, |inner| prop::collection::vec(inner, 1..=3).prop_map(Tree::Node))
}

fn build(t: &Tree) -> Extensor {
    match t {
        Tree::Leaf(k) => Extensor::from_label(atom(*k)),
        Tree::Node(children) => unitize(&children.iter().fold(Extensor::unit(), |acc, c| wedge(&acc, &build(c)))),
    }
}

fn metatensor() -> impl Strategy<Value = Extensor> {
    prop::collection::vec((prop::collection::vec(tree(), 1..=3), small_int()), 1..=2).prop_map(|terms| {
        let mut out = Extensor::zero();
        for (trees, c) in terms {
            let w = trees.iter().fold(Extensor::unit(), |acc, t| wedge(&acc, &build(t)));
            out.add_scaled(&w, &c);
        }
        out
    })
}

fn matrix4() -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-2i64..=2, 16).prop_map(|v| Matrix::from_fn(4, 4, |i, j| Scalar::from_i64(v[i * 4 + j])))
}

fn v_map(m: Matrix) -> MatrixMap {
    MatrixMap::new((0..4).map(|k| atom(k as u8)).collect(), m).unwrap()
}

fn inversion_sign(p: &[usize]) -> i8 {
    let mut s = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

/// Brute-force Leibniz: sum over every slot of the word, recursing into nodes.
fn leibniz(map: &dyn LabelMap, x: &Extensor) -> Extensor {
    let mut out = Extensor::zero();
    for (w, c) in x.terms() {
        let labels = w.labels();
        for j in 0..labels.len() {
            let image = match &labels[j] {
                Label::Node(p) => unitize(&leibniz(map, &Extensor::from_word((**p).clone(), Scalar::one()))),
                l => map.map_label(l).unwrap_or_else(Extensor::zero),
            };
            let pre = Extensor::from_labels(labels[..j].to_vec(), Scalar::one());
            let post = Extensor::from_labels(labels[j + 1..].to_vec(), Scalar::one());
            out.add_scaled(&wedge(&pre, &wedge(&image, &post)), c);
        }
    }
    out
}

// ------------------------------------------------------------ scalars

#[test]
fn tower_generators() {
    let three = Scalar::from_i64(3);
    assert_eq!(&Scalar::sqrt3() * &Scalar::sqrt3(), three);
    assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::from_i64(-1));
}

proptest! {
    #[test]
    fn scalar_field_identities(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
            prop_assert_eq!(b.div(&a).unwrap(), &b * &a.inv().unwrap());
        } else {
            prop_assert!(a.inv().is_err());
        }
    }

    // -------------------------------------------------------- exterior

    #[test]
    fn wedge_is_graded_commutative(
        (ka, kb, a, b) in (0usize..=3, 0usize..=3).prop_flat_map(|(ka, kb)| (Just(ka), Just(kb), homogeneous(ka), homogeneous(kb)))
    ) {
        let ba = wedge(&b, &a);
        let expect = if (ka * kb) % 2 == 1 { ba.neg() } else { ba };
        prop_assert_eq!(wedge(&a, &b), expect);
    }

    #[test]
    fn wedge_is_associative(a in mixed(), b in mixed(), c in mixed()) {
        prop_assert_eq!(wedge(&wedge(&a, &b), &c), wedge(&a, &wedge(&b, &c)));
    }

    #[test]
    fn clifford_product_is_associative(a in mixed(), b in mixed(), c in mixed()) {
        prop_assert_eq!(clifford_product(&clifford_product(&a, &b), &c), clifford_product(&a, &clifford_product(&b, &c)));
    }

    #[test]
    fn anticommutator_is_twice_the_symmetric_pairing(u in grade_one(true), v in grade_one(true)) {
        let split = |x: &Extensor| (x.primal_part(), x.sub(&x.primal_part()));
        let ((up, ud), (vp, vd)) = (split(&u), split(&v));
        let pair = |p: &Extensor, d: &Extensor| if p.is_zero() || d.is_zero() { Scalar::zero() } else { pairing(p, d).unwrap() };
        // ‖x‖ = ω(x) polarises to ⟨u,v⟩ = ½(u†(v) + v†(u)).
        let expect = &pair(&up, &vd) + &pair(&vp, &ud);
        prop_assert_eq!(anticommutator(&u, &v), Extensor::scalar(expect));
    }

    #[test]
    fn primal_vectors_anticommute(u in grade_one(false), v in grade_one(false)) {
        prop_assert!(anticommutator(&u, &v).is_zero());
    }

    #[test]
    fn normal_form_is_unique(labels in word_labels(), perm_seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..labels.len()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
        let shuffled: Vec<Label> = perm.iter().map(|&i| labels[i].clone()).collect();
        match (Word::normalize(labels.clone()), Word::normalize(shuffled)) {
            (Some((w1, s1)), Some((w2, s2))) => {
                prop_assert_eq!(&w1, &w2);
                prop_assert_eq!(s2, s1 * inversion_sign(&perm));
                let mut sorted = w1.labels().to_vec();
                sorted.dedup();
                prop_assert_eq!(sorted.len(), w1.grade());
            }
            (None, None) => {
                let distinct: std::collections::BTreeSet<_> = labels.iter().collect();
                prop_assert!(distinct.len() < labels.len());
            }
            _ => prop_assert!(false, "normalization disagrees under permutation"),
        }
    }

    // -------------------------------------------------------- metatensors

    #[test]
    fn derivation_lift_is_leibniz(m in matrix4(), x in metatensor()) {
        let map = v_map(m);
        prop_assert_eq!(lift_derivation(&map, &x), leibniz(&map, &x));
    }

    #[test]
    fn lifts_commute_with_unitization(m in matrix4(), x in metatensor()) {
        let map = v_map(m);
        prop_assert_eq!(lift_derivation(&map, &unitize(&x)), unitize(&lift_derivation(&map, &x)));
        prop_assert_eq!(lift_substitution(&map, &unitize(&x)), unitize(&lift_substitution(&map, &x)));
    }

    #[test]
    fn substitution_is_multiplicative(m in matrix4(), a in metatensor(), b in metatensor()) {
        let map = v_map(m);
        prop_assert_eq!(lift_substitution(&map, &wedge(&a, &b)), wedge(&lift_substitution(&map, &a), &lift_substitution(&map, &b)));
    }

    #[test]
    fn unitization_is_linear(a in metatensor(), b in metatensor(), s in scalar()) {
        let lhs = unitize(&a.add(&b.scale(&s)));
        prop_assert_eq!(lhs, unitize(&a).add(&unitize(&b).scale(&s)));
        if !a.is_zero() {
            prop_assert_eq!(unitize(&a).level(), a.level() + 1);
        }
    }

    #[test]
    fn depth_one_create_and_annihilate_are_dual(x in metatensor(), target in prop::collection::btree_set(0u8..4, 1..=2)) {
        let q = Word::normalize(target.into_iter().map(atom).collect()).unwrap().0;
        let c = DepthOperator::create(1, q.clone());
        let d = DepthOperator::annihilate(1, q);
        let cd = c.apply(&d.apply(&x).unwrap()).unwrap();
        let dc = d.apply(&c.apply(&x).unwrap()).unwrap();
        prop_assert_eq!(cd.add(&dc), x);
    }

    #[test]
    fn number_operators_commute(seed in any::<u64>()) {
        let x = random_network(&mut ChaCha8Rng::seed_from_u64(seed));
        let kinds = [NumberKind::Network, NumberKind::Link, NumberKind::Point];
        for a in kinds {
            for b in kinds {
                let ab = number_operator(a, &number_operator(b, &x));
                let ba = number_operator(b, &number_operator(a, &x));
                prop_assert_eq!(ab, ba);
            }
        }
    }

    #[test]
    fn traceless_generator_annihilates_top_power(m in matrix4(), keys in prop::collection::btree_set(0i32..10, 4..=4)) {
        let mut m = m;
        let partial: Scalar = (0..3).fold(Scalar::zero(), |acc, i| &acc + m.get(i, i));
        m.set(3, 3, -partial);
        let points: Vec<Label> = keys.iter().map(|&k| point(sectors::POINT, k)).collect();
        let top = points.iter().fold(Extensor::unit(), |acc, p| wedge(&acc, &Extensor::from_label(node(Word::single(p.clone())))));
        prop_assert!(!top.is_zero());
        prop_assert!(SlGenerator::new(points, m).unwrap().apply(&top).is_zero());
    }
}
