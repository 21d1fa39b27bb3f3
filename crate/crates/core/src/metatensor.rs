//! Multilevel layer: unitization, depth bookkeeping, depth-indexed
//! creation/annihilation, number operators, derivation lifting and the
//! factor/subfactor exchange operations behind point parastatistics.
//!
//! A metatensor is an [`Extensor`] whose labels may be unitization nodes.
//! `ι` is linear: `ι(Σ cᵢ wᵢ) = Σ cᵢ ι(wᵢ)`, one node per payload basis word.
//! Depth counts down from the top: depth-1 constituents are the top-level
//! factors of a word, depth-2 constituents the payload labels of depth-1
//! nodes, and so on.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exterior::{wedge, Atom, Extensor, Label, Word};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub type Metatensor = Extensor;
pub type NodeExpr = Label;

/// `ι(w)` for a basis word.
pub fn node(w: Word) -> Label {
    Label::Node(Arc::new(w))
}

/// Linear unitization: a grade-1 element one level up.
pub fn unitize(t: &Extensor) -> Extensor {
    let mut out = Extensor::zero();
    for (w, c) in t.terms() {
        out.add_term(Word::single(node(w.clone())), c.clone());
    }
    out
}

/// Number of constituents at each depth `1..` of a word.
pub fn depth_grades(w: &Word) -> Vec<usize> {
    let mut grades = Vec::new();
    let mut layer: Vec<&Word> = vec![w];
    while !layer.is_empty() {
        let count: usize = layer.iter().map(|x| x.grade()).sum();
        if count == 0 {
            break;
        }
        grades.push(count);
        layer = layer.iter().flat_map(|x| x.labels().iter().filter_map(Label::payload)).collect();
    }
    grades
}

/// Grade at depth `d` (1-based).
pub fn grade_at_depth(w: &Word, d: usize) -> usize {
    depth_grades(w).get(d.wrapping_sub(1)).copied().unwrap_or(0)
}

/// Replaces label `j` of `w` by `rep` and renormalizes.
pub fn replace_slot(w: &Word, j: usize, rep: &Extensor) -> Extensor {
    let labels = w.labels();
    let prefix = Word::normalize(labels[..j].to_vec()).expect("sub-word").0;
    let suffix = Word::normalize(labels[j + 1..].to_vec()).expect("sub-word").0;
    let pre = Extensor::from_word(prefix, Scalar::one());
    let suf = Extensor::from_word(suffix, Scalar::one());
    wedge(&pre, &wedge(rep, &suf))
}

/// A linear map on basis labels, used to build derivations and substitutions.
///
/// `None` means the map does not touch the label: atoms are then zero for a
/// derivation and fixed for a substitution, and nodes are handled by
/// recursing into their payloads.
pub trait LabelMap: Sync {
    fn map_label(&self, label: &Label) -> Option<Extensor>;
}

impl<F> LabelMap for F
where
    F: Fn(&Label) -> Option<Extensor> + Sync,
{
    fn map_label(&self, label: &Label) -> Option<Extensor> {
        self(label)
    }
}

/// Matrix on an ordered list of labels: `basis[j] ↦ Σᵢ M[i][j] basis[i]`.
#[derive(Clone, Debug)]
pub struct MatrixMap {
    basis: Vec<Label>,
    matrix: Matrix,
}

impl MatrixMap {
    pub fn new(basis: Vec<Label>, matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != basis.len() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix on {} labels",
                matrix.rows(),
                matrix.cols(),
                basis.len()
            )));
        }
        Ok(MatrixMap { basis, matrix })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

impl LabelMap for MatrixMap {
    fn map_label(&self, label: &Label) -> Option<Extensor> {
        let j = self.basis.iter().position(|b| b == label)?;
        let mut out = Extensor::zero();
        for (i, b) in self.basis.iter().enumerate() {
            out.add_term(Word::single(b.clone()), self.matrix.get(i, j).clone());
        }
        Some(out)
    }
}

/// Tries each map in turn; the first that touches a label wins.
pub struct Combined<'a>(pub Vec<&'a dyn LabelMap>);

impl LabelMap for Combined<'_> {
    fn map_label(&self, label: &Label) -> Option<Extensor> {
        self.0.iter().find_map(|m| m.map_label(label))
    }
}

fn derive_label(map: &dyn LabelMap, l: &Label) -> Extensor {
    if let Some(img) = map.map_label(l) {
        return img;
    }
    match l {
        Label::Atom(_) => Extensor::zero(),
        Label::Node(p) => unitize(&derive_word(map, p)),
    }
}

fn derive_word(map: &dyn LabelMap, w: &Word) -> Extensor {
    let mut out = Extensor::zero();
    for (j, l) in w.labels().iter().enumerate() {
        let d = derive_label(map, l);
        if !d.is_zero() {
            out.add_assign(&replace_slot(w, j, &d));
        }
    }
    out
}

/// Lifts a label map to an even derivation through every level: Leibniz over
/// `∨`, and `D(ι t) = ι(D t)`.
///
/// When the map acts on duals contragrediently (`⟨b| ↦ −⟨b|G` for
/// `|a⟩ ↦ G|a⟩`) the lift is also Leibniz over the Clifford product.
pub fn lift_derivation(map: &dyn LabelMap, x: &Extensor) -> Extensor {
    let mut out = Extensor::zero();
    for (w, c) in x.terms() {
        out.add_scaled(&derive_word(map, w), c);
    }
    out
}

fn substitute_label(map: &dyn LabelMap, l: &Label) -> Extensor {
    if let Some(img) = map.map_label(l) {
        return img;
    }
    match l {
        Label::Atom(_) => Extensor::from_label(l.clone()),
        Label::Node(p) => unitize(&substitute_word(map, p)),
    }
}

fn substitute_word(map: &dyn LabelMap, w: &Word) -> Extensor {
    let mut acc = Extensor::unit();
    for l in w.labels() {
        acc = wedge(&acc, &substitute_label(map, l));
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// Lifts a label map to an algebra morphism: `φ(a ∨ b) = φa ∨ φb`,
/// `φ(ι t) = ι(φ t)`.
pub fn lift_substitution(map: &dyn LabelMap, x: &Extensor) -> Extensor {
    let mut out = Extensor::zero();
    for (w, c) in x.terms() {
        out.add_scaled(&substitute_word(map, w), c);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DepthMode {
    Create,
    Annihilate,
}

/// `c^D_Q` or its dual `∂^Q_D`, acting on the factors `ι|Q⟩` at depth `D`.
#[derive(Clone, Debug)]
pub struct DepthOperator {
    pub depth: usize,
    /// Payload `Q` of the node being created or removed.
    pub target: Word,
    pub mode: DepthMode,
}

impl DepthOperator {
    pub fn create(depth: usize, target: Word) -> Self {
        DepthOperator { depth, target, mode: DepthMode::Create }
    }

    pub fn annihilate(depth: usize, target: Word) -> Self {
        DepthOperator { depth, target, mode: DepthMode::Annihilate }
    }

    /// Depth `D` reaches the constituents of depth-`(D−1)` payloads, so it
    /// needs `D ≤ level + 1`; depth 1 is always available.
    pub fn apply(&self, x: &Extensor) -> Result<Extensor> {
        let level = x.level();
        if self.depth == 0 || self.depth > level + 1 {
            return Err(Error::DepthExceedsLevel { depth: self.depth, level });
        }
        let factor = node(self.target.clone());
        let mut out = Extensor::zero();
        for (w, c) in x.terms() {
            out.add_scaled(&self.apply_word(w, self.depth, &factor), c);
        }
        Ok(out)
    }

    fn apply_word(&self, w: &Word, depth: usize, factor: &Label) -> Extensor {
        if depth == 1 {
            return match self.mode {
                DepthMode::Create => {
                    wedge(&Extensor::from_label(factor.clone()), &Extensor::from_word(w.clone(), Scalar::one()))
                }
                DepthMode::Annihilate => match w.position(factor) {
                    Some(j) => {
                        let (rest, s) = w.remove_at(j);
                        Extensor::from_word(rest, Scalar::from_i64(s as i64))
                    }
                    None => Extensor::zero(),
                },
            };
        }
        // Signed derivation into payloads: Koszul sign of passing the j
        // earlier top-level factors.
        let mut out = Extensor::zero();
        for (j, l) in w.labels().iter().enumerate() {
            let Label::Node(p) = l else { continue };
            let inner = self.apply_word(p, depth - 1, factor);
            if inner.is_zero() {
                continue;
            }
            let rep = unitize(&inner);
            let term = replace_slot(w, j, &rep);
            if j % 2 == 0 {
                out.add_assign(&term);
            } else {
                out = out.sub(&term);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NumberKind {
    /// Total top-level grade.
    Network,
    /// Depth-1 unitized factors.
    Link,
    /// Depth-2 constituents, with multiplicity.
    Point,
}

/// Eigenvalue of a number operator on a basis word.
pub fn number_eigenvalue(kind: NumberKind, w: &Word) -> usize {
    match kind {
        NumberKind::Network => w.grade(),
        NumberKind::Link => w.labels().iter().filter(|l| l.payload().is_some()).count(),
        NumberKind::Point => w.labels().iter().filter_map(Label::payload).map(Word::grade).sum(),
    }
}

/// The diagonal number operator applied to `x`.
pub fn number_operator(kind: NumberKind, x: &Extensor) -> Extensor {
    let mut out = Extensor::zero();
    for (w, c) in x.terms() {
        let n = number_eigenvalue(kind, w) as i64;
        out.add_term(w.clone(), c * &Scalar::from_i64(n));
    }
    out
}

/// `Σ_P L^Q_P c¹_Q ∂₁^P` for a traceless `L` over a list of point labels.
#[derive(Clone, Debug)]
pub struct SlGenerator {
    points: Vec<Label>,
    matrix: Matrix,
}

impl SlGenerator {
    pub fn new(points: Vec<Label>, matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != points.len() {
            return Err(Error::Dimension(format!("{}x{} matrix on {} points", matrix.rows(), matrix.cols(), points.len())));
        }
        let tr = matrix.trace();
        if !tr.is_zero() {
            return Err(Error::NonzeroTrace(tr.to_string()));
        }
        Ok(SlGenerator { points, matrix })
    }

    /// Replaces one depth-1 factor `ι|P⟩` at a time by `Σ_Q L^Q_P ι|Q⟩`.
    pub fn apply(&self, x: &Extensor) -> Extensor {
        let nodes: Vec<Label> = self.points.iter().map(|p| node(Word::single(p.clone()))).collect();
        let mut out = Extensor::zero();
        for (w, c) in x.terms() {
            for (j, l) in w.labels().iter().enumerate() {
                let Some(col) = nodes.iter().position(|n| n == l) else { continue };
                let mut img = Extensor::zero();
                for (row, n) in nodes.iter().enumerate() {
                    img.add_term(Word::single(n.clone()), self.matrix.get(row, col).clone());
                }
                out.add_scaled(&replace_slot(w, j, &img), c);
            }
        }
        out
    }
}

fn check_factor(w: &Word, i: usize) -> Result<&Label> {
    w.labels().get(i).ok_or_else(|| Error::BadPosition(format!("factor {i} of a grade-{} word", w.grade())))
}

/// Exchanges top-level factors `i` and `j` of a basis word.
pub fn swap_factors(w: &Word, i: usize, j: usize) -> Result<Extensor> {
    check_factor(w, i)?;
    check_factor(w, j)?;
    let mut labels = w.labels().to_vec();
    labels.swap(i, j);
    Ok(Extensor::from_labels(labels, Scalar::one()))
}

/// Position of a depth-2 constituent: (top-level factor, slot in its payload).
pub type SubfactorPos = (usize, usize);

fn subfactor(w: &Word, (f, s): SubfactorPos) -> Result<(&Word, &Label)> {
    let payload = check_factor(w, f)?
        .payload()
        .ok_or_else(|| Error::BadPosition(format!("factor {f} is not a unitized node")))?;
    let l = payload.labels().get(s).ok_or_else(|| Error::BadPosition(format!("slot {s} of factor {f}")))?;
    Ok((payload, l))
}

fn swapped_payloads(w: &Word, a: SubfactorPos, b: SubfactorPos) -> Result<(Vec<Label>, Vec<Label>)> {
    let (pa, x) = subfactor(w, a)?;
    let (pb, y) = subfactor(w, b)?;
    let mut na = pa.labels().to_vec();
    na[a.1] = y.clone();
    let mut nb = pb.labels().to_vec();
    nb[b.1] = x.clone();
    Ok((na, nb))
}

/// Equal-label cases where a subfactor exchange collapses to zero or to a
/// multiple of the input word: a repeated label inside a new payload, a new
/// payload equal to an existing factor's, or the two factors trading places.
pub fn subfactor_swap_is_degenerate(w: &Word, a: SubfactorPos, b: SubfactorPos) -> Result<bool> {
    let (na, nb) = swapped_payloads(w, a, b)?;
    let (Some((wa, _)), Some((wb, _))) = (Word::normalize(na), Word::normalize(nb)) else {
        return Ok(true);
    };
    let others: Vec<&Word> = w
        .labels()
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != a.0 && *k != b.0)
        .filter_map(|(_, l)| l.payload())
        .collect();
    let (pa, _) = subfactor(w, a)?;
    let (pb, _) = subfactor(w, b)?;
    Ok(wa == wb || &wa == pa || &wa == pb || others.contains(&&wa) || others.contains(&&wb))
}

/// Exchanges two depth-2 constituents lying in different top-level factors.
pub fn swap_subfactors(w: &Word, a: SubfactorPos, b: SubfactorPos) -> Result<Extensor> {
    if a.0 == b.0 {
        return Err(Error::BadPosition("subfactors must lie in different factors".into()));
    }
    let (na, nb) = swapped_payloads(w, a, b)?;
    let (Some((wa, sa)), Some((wb, sb))) = (Word::normalize(na), Word::normalize(nb)) else {
        return Ok(Extensor::zero());
    };
    let mut labels = w.labels().to_vec();
    labels[a.0] = node(wa);
    labels[b.0] = node(wb);
    Ok(Extensor::from_labels(labels, Scalar::from_i64((sa * sb) as i64)))
}

/// One-line canonical serialization.
pub fn canonical_text(x: &Extensor) -> String {
    x.to_string()
}

/// One term per line, in canonical order.
pub fn canonical_lines(x: &Extensor) -> Vec<String> {
    x.terms().map(|(w, c)| crate::exterior::term_string(w, c)).collect()
}

/// A point label in a named sector, for examples and tests.
pub fn point(sector: &str, k: i32) -> Label {
    Label::Atom(Atom::primal(sector, &[k]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(k: i32) -> Label {
        point("p", k)
    }

    fn iota(labels: &[Label]) -> Extensor {
        unitize(&Extensor::from_labels(labels.to_vec(), Scalar::one()))
    }

    fn two_factor(a: &[Label], b: &[Label]) -> Word {
        let e = wedge(&iota(a), &iota(b));
        let (w, c) = e.single_term().unwrap();
        assert!(c.is_one() || (-c).is_one());
        w.clone()
    }

    #[test]
    fn unitize_is_linear() {
        assert!(unitize(&Extensor::zero()).is_zero());
        let a = Extensor::from_label(p(1));
        let b = Extensor::from_label(p(2)).scale(&Scalar::from_i64(3));
        let lhs = unitize(&a.add(&b));
        assert!(lhs.sub(&unitize(&a)).sub(&unitize(&b)).is_zero());
        assert_eq!(unitize(&a).level(), 1);
    }

    #[test]
    fn unitized_partials_wedge_nonzero() {
        let d1 = Extensor::atom(Atom::primal("∂", &[0]));
        let d2 = Extensor::atom(Atom::primal("∂", &[1]));
        let w = wedge(&unitize(&d1), &unitize(&d2));
        assert_eq!(w.homogeneous_grade(), Some(2));
    }

    #[test]
    fn depth_grades_of_two_links() {
        let w = two_factor(&[p(1), p(2)], &[p(3), p(4)]);
        assert_eq!(depth_grades(&w), vec![2, 4]);
        assert_eq!(grade_at_depth(&w, 2), 4);
        assert_eq!(grade_at_depth(&w, 3), 0);
    }

    #[test]
    fn create_and_annihilate_at_depth_one() {
        let q = Word::single(p(7));
        let c = DepthOperator::create(1, q.clone());
        let a = DepthOperator::annihilate(1, q.clone());
        let empty = Extensor::unit();
        let made = c.apply(&empty).unwrap();
        assert_eq!(made, Extensor::from_label(node(q.clone())));
        assert!(a.apply(&empty).unwrap().is_zero());
        assert!(c.apply(&made).unwrap().is_zero());
        assert_eq!(a.apply(&made).unwrap(), empty);
    }

    #[test]
    fn deeper_operators_need_levels() {
        let c2 = DepthOperator::create(2, Word::single(p(9)));
        assert!(c2.apply(&Extensor::from_label(p(1))).is_err());
        let w = Extensor::from_word(two_factor(&[p(1), p(2)], &[p(3), p(4)]), Scalar::one());
        let out = c2.apply(&w).unwrap();
        // one new point inside each of the two links
        assert_eq!(out.len(), 2);
        for (word, _) in out.terms() {
            assert_eq!(number_eigenvalue(NumberKind::Point, word), 5);
        }
        assert!(DepthOperator::create(3, Word::single(p(9))).apply(&w).is_err());
    }

    #[test]
    fn number_operator_examples() {
        let w = two_factor(&[p(1), p(2)], &[p(3), p(4)]);
        assert_eq!(number_eigenvalue(NumberKind::Link, &w), 2);
        assert_eq!(number_eigenvalue(NumberKind::Point, &w), 4);
        assert_eq!(number_eigenvalue(NumberKind::Network, &w), 2);
    }

    #[test]
    fn sl_generator_examples() {
        let pts = vec![p(1), p(2)];
        let e12 = Matrix::from_i64(&[&[0, 1], &[0, 0]]);
        let gen = SlGenerator::new(pts.clone(), e12).unwrap();
        let x = iota(&[p(2)]);
        assert_eq!(gen.apply(&x), iota(&[p(1)]));
        let zero = SlGenerator::new(pts.clone(), Matrix::zeros(2, 2)).unwrap();
        assert!(zero.apply(&x).is_zero());
        assert!(matches!(SlGenerator::new(pts, Matrix::identity(2)), Err(Error::NonzeroTrace(_))));
    }

    #[test]
    fn swap_examples() {
        let a = iota(&[p(1)]);
        let b = iota(&[p(2)]);
        let ab = wedge(&a, &b);
        let (w, _) = ab.single_term().unwrap();
        assert_eq!(swap_factors(w, 0, 1).unwrap(), Extensor::from_word(w.clone(), Scalar::from_i64(-1)));
        assert!(swap_factors(w, 0, 2).is_err());

        let w = two_factor(&[p(1), p(2)], &[p(3), p(4)]);
        let swapped = swap_subfactors(&w, (0, 0), (1, 0)).unwrap();
        let expected = wedge(&iota(&[p(3), p(2)]), &iota(&[p(1), p(4)]));
        assert_eq!(swapped, expected);
        assert!(swapped.ratio_to(&Extensor::from_word(w.clone(), Scalar::one())).is_none());
        assert!(!subfactor_swap_is_degenerate(&w, (0, 0), (1, 0)).unwrap());
    }

    #[test]
    fn degenerate_subfactor_swap() {
        let w = two_factor(&[p(1), p(2)], &[p(1), p(3)]);
        assert!(subfactor_swap_is_degenerate(&w, (0, 0), (1, 0)).unwrap());
        assert_eq!(swap_subfactors(&w, (0, 0), (1, 0)).unwrap(), Extensor::from_word(w.clone(), Scalar::one()));
        // shared p1: exchanging the other labels just swaps the two links
        assert!(subfactor_swap_is_degenerate(&w, (0, 1), (1, 1)).unwrap());
        assert_eq!(swap_subfactors(&w, (0, 1), (1, 1)).unwrap(), Extensor::from_word(w.clone(), Scalar::from_i64(-1)));
        // p2 lands next to p1 again: repeated label, zero word
        assert!(swap_subfactors(&w, (0, 1), (1, 0)).unwrap().is_zero());
        assert!(swap_subfactors(&w, (0, 0), (0, 1)).is_err());
    }

    #[test]
    fn derivation_respects_unitization() {
        let map = |l: &Label| (l == &p(1)).then(|| Extensor::from_label(p(2)));
        let t = Extensor::from_labels(vec![p(1), p(3)], Scalar::one());
        let lifted = lift_derivation(&map, &unitize(&t));
        assert_eq!(lifted, unitize(&lift_derivation(&map, &t)));
        assert!(lift_derivation(&|_: &Label| None, &unitize(&t)).is_zero());
    }
}
