//! Metric form, Kähler γ-representation, and the vacuum metatensors.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{apply_operator, sectors, wedge, Atom, BasisSpace, Extensor, Label, Word};
use crate::lattice::{partial_mu, LatticeOperator, LatticeWindow, DIM};
use crate::linalg::Matrix;
use crate::metatensor::unitize;
use crate::scalar::{Scalar, Tower};

/// Symmetric nondegenerate 4×4 form `g^{μν}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricForm {
    g: Matrix,
}

impl MetricForm {
    pub fn new(g: Matrix) -> Result<Self> {
        if g.rows() != DIM || !g.is_square() {
            return Err(Error::Dimension(format!("metric must be {DIM}x{DIM}")));
        }
        if g.transpose() != g {
            return Err(Error::DegenerateMetric("metric is not symmetric".into()));
        }
        if g.det()?.is_zero() {
            return Err(Error::DegenerateMetric("metric has zero determinant".into()));
        }
        Ok(MetricForm { g })
    }

    /// `g^{μν} = 1 − δ^{μν}`.
    pub fn null_form() -> Self {
        let g = Matrix::from_fn(DIM, DIM, |i, j| Scalar::from_i64(if i == j { 0 } else { 1 }));
        MetricForm { g }
    }

    /// `δ^{μν}`.
    pub fn euclidean() -> Self {
        MetricForm { g: Matrix::identity(DIM) }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.g
    }

    pub fn get(&self, mu: usize, nu: usize) -> &Scalar {
        self.g.get(mu, nu)
    }

    pub fn det(&self) -> Scalar {
        self.g.det().expect("square")
    }

    /// `g_{μν}`, the inverse form.
    pub fn lowered(&self) -> Matrix {
        self.g.inverse().expect("nondegenerate by construction")
    }

    /// Coefficients `c₀..c₄` of `det(x·1 − g) = Σ c_k x^k` (Faddeev–LeVerrier).
    pub fn characteristic_polynomial(&self) -> Vec<Scalar> {
        let n = DIM;
        let mut coeffs = vec![Scalar::zero(); n + 1];
        coeffs[n] = Scalar::one();
        let mut m = Matrix::zeros(n, n);
        for k in 1..=n {
            let shifted = &m + &Matrix::identity(n).scale(&coeffs[n - k + 1]);
            m = &self.g * &shifted;
            let c = -(m.trace().div(&Scalar::from_i64(k as i64)).expect("k > 0"));
            coeffs[n - k] = c;
        }
        coeffs
    }

    /// Rational eigenvalues with multiplicity, sorted descending. Integer
    /// forms have only integer rational roots, found among divisors of `c₀`.
    pub fn rational_eigenvalues(&self) -> Vec<Scalar> {
        let mut p = self.characteristic_polynomial();
        let mut roots = Vec::new();
        let bound = p.iter().filter_map(Scalar::as_i64).map(i64::abs).max().unwrap_or(0).max(1);
        let mut candidates: Vec<i64> = (-bound..=bound).collect();
        candidates.sort_by_key(|c| std::cmp::Reverse(*c));
        for c in candidates {
            let x = Scalar::from_i64(c);
            while p.len() > 1 {
                let (q, r) = synthetic_division(&p, &x);
                if !r.is_zero() {
                    break;
                }
                roots.push(x.clone());
                p = q;
            }
        }
        roots
    }

    /// `(positive, negative)` eigenvalue counts by Descartes' rule, exact for
    /// symmetric forms since all roots are real.
    pub fn signature(&self) -> (usize, usize) {
        let p: Vec<BigRational> =
            self.characteristic_polynomial().iter().map(|s| s.as_rational().cloned().expect("rational metric")).collect();
        let changes = |cs: Vec<BigRational>| {
            let nz: Vec<BigRational> = cs.into_iter().filter(|c| !c.is_zero()).collect();
            nz.windows(2).filter(|w| w[0].is_negative() != w[1].is_negative()).count()
        };
        let pos = changes(p.clone());
        let neg = changes(p.iter().enumerate().map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() }).collect());
        (pos, neg)
    }

    /// `P g Pᵀ = g` for the permutation matrix of `perm`.
    pub fn is_invariant_under(&self, perm: &[usize; DIM]) -> bool {
        (0..DIM).all(|i| (0..DIM).all(|j| self.g.get(perm[i], perm[j]) == self.g.get(i, j)))
    }
}

fn synthetic_division(p: &[Scalar], x: &Scalar) -> (Vec<Scalar>, Scalar) {
    // p is low-to-high; returns (quotient, remainder)
    let n = p.len() - 1;
    let mut q = vec![Scalar::zero(); n];
    let mut acc = Scalar::zero();
    for k in (0..=n).rev() {
        acc = &(&acc * x) + &p[k];
        if k > 0 {
            q[k - 1] = acc.clone();
        }
    }
    (q, acc)
}

/// All 24 permutations of `0..4`, lexicographic.
pub fn permutations() -> Vec<[usize; DIM]> {
    let mut out = Vec::with_capacity(24);
    let mut p = [0, 1, 2, 3];
    loop {
        out.push(p);
        let Some(i) = (0..DIM - 1).rev().find(|&i| p[i] < p[i + 1]) else { break };
        let j = (i + 1..DIM).rev().find(|&j| p[j] > p[i]).expect("successor exists");
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

pub fn permutation_sign(p: &[usize]) -> i64 {
    let inv = (0..p.len()).flat_map(|i| (i + 1..p.len()).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Matrix `U` with `U e_μ = e_{π(μ)}`.
pub fn permutation_matrix(p: &[usize; DIM]) -> Matrix {
    Matrix::from_fn(DIM, DIM, |i, j| if p[j] == i { Scalar::one() } else { Scalar::zero() })
}

/// Wedge-plus-contraction Clifford action on `Λ(aux)`, `dim = 16`.
#[derive(Clone, Debug)]
pub struct GammaRep {
    metric: MetricForm,
    carrier: Vec<Word>,
    gammas: Vec<Matrix>,
    gamma5: Matrix,
}

impl GammaRep {
    pub fn new(metric: &MetricForm) -> Self {
        let aux = BasisSpace::indexed(sectors::KAHLER, DIM, true);
        let carrier = aux.fock_basis();
        let index: BTreeMap<&Word, usize> = carrier.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let gammas: Vec<Matrix> = (0..DIM)
            .map(|mu| {
                let mut op = Extensor::atom(aux.ket(&[mu as i32]).expect("indexed"));
                for nu in 0..DIM {
                    op.add_scaled(&Extensor::atom(aux.bra(&[nu as i32]).expect("indexed")), metric.get(mu, nu));
                }
                let mut m = Matrix::zeros(carrier.len(), carrier.len());
                for (j, w) in carrier.iter().enumerate() {
                    let img = apply_operator(&op, &Extensor::from_word(w.clone(), Scalar::one()));
                    for (v, c) in img.terms() {
                        m.set(index[v], j, c.clone());
                    }
                }
                m
            })
            .collect();
        let gamma5 = volume_element(&gammas).scale(&Scalar::sqrt3().inv().expect("nonzero"));
        GammaRep { metric: metric.clone(), carrier, gammas, gamma5 }
    }

    pub fn metric(&self) -> &MetricForm {
        &self.metric
    }

    /// The 16 Fock basis forms of the auxiliary space.
    pub fn carrier(&self) -> &[Word] {
        &self.carrier
    }

    pub fn dim(&self) -> usize {
        self.carrier.len()
    }

    pub fn gamma(&self, mu: usize) -> &Matrix {
        &self.gammas[mu]
    }

    pub fn gammas(&self) -> &[Matrix] {
        &self.gammas
    }

    pub fn identity(&self) -> Matrix {
        Matrix::identity(self.dim())
    }

    /// Antisymmetrized volume element over `√(−det g) = √3`.
    pub fn gamma5(&self) -> &Matrix {
        &self.gamma5
    }

    /// `P_± = (1 ∓ iγ⁵)/2`.
    pub fn chiral_projector(&self, plus: bool) -> Matrix {
        let s = if plus { -Scalar::i() } else { Scalar::i() };
        let half = Scalar::ratio(1, 2);
        (&self.identity() + &self.gamma5.scale(&s)).scale(&half)
    }

    /// `σ^μ = P₋ γ^μ P₊`.
    pub fn sigma(&self, mu: usize) -> Matrix {
        &(&self.chiral_projector(false) * &self.gammas[mu]) * &self.chiral_projector(true)
    }

    pub fn sigmas(&self) -> Vec<Matrix> {
        (0..DIM).map(|mu| self.sigma(mu)).collect()
    }

    /// `S(ω) = ¼ ω_{μν} γ^μ γ^ν` with `ω_{μν} = g_{μα} ω^α_ν`.
    pub fn spin(&self, omega: &Matrix) -> Matrix {
        let low = &self.metric.lowered() * omega;
        let quarter = Scalar::ratio(1, 4);
        let mut s = Matrix::zeros(self.dim(), self.dim());
        for mu in 0..DIM {
            for nu in 0..DIM {
                let c = low.get(mu, nu);
                if !c.is_zero() {
                    s = &s + &(&self.gammas[mu] * &self.gammas[nu]).scale(&(c * &quarter));
                }
            }
        }
        s
    }

    /// Matrix `A` on the 4 generators `basis` with `[S(ω), b_λ] = Σ_ν A[ν][λ] b_ν`.
    pub fn spin_action(&self, omega: &Matrix, basis: &[Matrix]) -> Result<Matrix> {
        let s = self.spin(omega);
        let mut a = Matrix::zeros(DIM, DIM);
        for (lambda, b) in basis.iter().enumerate() {
            let coeffs = Matrix::decompose(&s.commutator(b), basis)
                .ok_or_else(|| Error::Dimension("spin commutator leaves the generator span".into()))?;
            for (nu, c) in coeffs.into_iter().enumerate() {
                a.set(nu, lambda, c);
            }
        }
        Ok(a)
    }
}

/// `(1/4!) Σ_π sgn(π) γ^{π0} γ^{π1} γ^{π2} γ^{π3}`.
fn volume_element(gammas: &[Matrix]) -> Matrix {
    let n = gammas[0].rows();
    let mut acc = Matrix::zeros(n, n);
    for p in permutations() {
        let prod = &(&(&gammas[p[0]] * &gammas[p[1]]) * &gammas[p[2]]) * &gammas[p[3]];
        acc = &acc + &prod.scale(&Scalar::from_i64(permutation_sign(&p)));
    }
    acc.scale(&Scalar::ratio(1, 24))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VacuumTag {
    Dipole,
    Dalembertian,
    Dirac,
    Left,
}

impl VacuumTag {
    pub const ALL: [VacuumTag; 4] = [VacuumTag::Dipole, VacuumTag::Dalembertian, VacuumTag::Dirac, VacuumTag::Left];

    pub fn name(self) -> &'static str {
        match self {
            VacuumTag::Dipole => "dipole",
            VacuumTag::Dalembertian => "dalembertian",
            VacuumTag::Dirac => "dirac",
            VacuumTag::Left => "left",
        }
    }

    /// Whether the vacuum carries the metric (as opposed to the volume only).
    pub fn is_metric(self) -> bool {
        !matches!(self, VacuumTag::Dipole)
    }

    /// Sector of the spinor-type factor, if any.
    pub fn spinor_sector(self) -> Option<&'static str> {
        match self {
            VacuumTag::Dirac => Some(sectors::GAMMA),
            VacuumTag::Left => Some(sectors::SIGMA),
            _ => None,
        }
    }
}

impl fmt::Display for VacuumTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VacuumTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VacuumTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown vacuum tag `{s}`")))
    }
}

/// Realization of the `∂_μ` constituents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DSector {
    /// Formal symbols `∂_μ` with the free monomial product `∂_μ∘∂_ν`.
    Abstract,
    /// Shift operators on a truncated window.
    Lattice(LatticeWindow),
}

impl DSector {
    pub fn mode_name(&self) -> &'static str {
        match self {
            DSector::Abstract => "abstract",
            DSector::Lattice(_) => "lattice",
        }
    }

    pub fn window(&self) -> Option<LatticeWindow> {
        match self {
            DSector::Abstract => None,
            DSector::Lattice(w) => Some(*w),
        }
    }

    /// `∂_μ` (0-based) as an element.
    pub fn partial(&self, mu: usize) -> Result<Extensor> {
        match self {
            DSector::Abstract => Ok(Extensor::atom(Atom::primal(sectors::PARTIAL, &[mu as i32]))),
            DSector::Lattice(w) => Ok(partial_mu(mu + 1, *w)?.to_extensor()),
        }
    }

    /// `∂_μ ∘ ∂_ν` (0-based).
    pub fn partial_product(&self, mu: usize, nu: usize) -> Result<Extensor> {
        match self {
            DSector::Abstract => Ok(Extensor::atom(Atom::primal(sectors::PARTIAL, &[mu as i32, nu as i32]))),
            DSector::Lattice(w) => {
                let a: LatticeOperator = partial_mu(mu + 1, *w)?;
                Ok(a.compose(&partial_mu(nu + 1, *w)?)?.to_extensor())
            }
        }
    }
}

/// A constructed vacuum with its provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VacuumState {
    pub tag: VacuumTag,
    pub sector: DSector,
    pub element: Extensor,
    /// Constituent sector names, in label order.
    pub sectors: Vec<String>,
}

impl VacuumState {
    pub fn mode_name(&self) -> &'static str {
        self.sector.mode_name()
    }
}

/// `ι∂₁ ∨ ι∂₂ ∨ ι∂₃ ∨ ι∂₄`. Infeasible on a lattice: each `ι∂_μ` is a sum
/// over the window, and the wedge has `~|window|⁴` words.
pub fn dipole_vacuum(sector: DSector) -> Result<VacuumState> {
    if let DSector::Lattice(w) = sector {
        return Err(Error::Infeasible(format!(
            "lattice dipole vacuum at N={} would expand to about {}^4 words",
            w.half_width(),
            w.len()
        )));
    }
    let mut acc = Extensor::unit();
    for mu in 0..DIM {
        acc = wedge(&acc, &unitize(&sector.partial(mu)?));
    }
    Ok(VacuumState { tag: VacuumTag::Dipole, sector, element: acc, sectors: vec![sectors::PARTIAL.into()] })
}

/// `ι( Σ g^{μν} ι(∂_μ ∘ ∂_ν) )`.
pub fn dalembertian_vacuum(g: &MetricForm, sector: DSector) -> Result<VacuumState> {
    let mut inner = Extensor::zero();
    for mu in 0..DIM {
        for nu in 0..DIM {
            let c = g.get(mu, nu);
            if !c.is_zero() {
                inner.add_scaled(&unitize(&sector.partial_product(mu, nu)?), c);
            }
        }
    }
    let names = match sector {
        DSector::Abstract => vec![sectors::PARTIAL.into()],
        DSector::Lattice(_) => vec![sectors::POINT.into()],
    };
    Ok(VacuumState { tag: VacuumTag::Dalembertian, sector, element: unitize(&inner), sectors: names })
}

/// `Σ_μ ι(γ^μ ∨ ι∂_μ)` with `γ^μ` the generator labels of `spinor`.
fn spinor_vacuum(tag: VacuumTag, spinor: &str, sector: DSector) -> Result<VacuumState> {
    let mut names = vec![spinor.to_string()];
    match sector {
        DSector::Abstract => {
            if spinor == sectors::PARTIAL {
                return Err(Error::SectorMismatch("spinor sector collides with the ∂ sector".into()));
            }
            names.push(sectors::PARTIAL.into())
        }
        DSector::Lattice(_) => {
            if spinor == sectors::POINT {
                return Err(Error::SectorMismatch("spinor sector collides with the point sector".into()));
            }
            names.push(sectors::POINT.into())
        }
    }
    names.sort();
    let mut out = Extensor::zero();
    for mu in 0..DIM {
        let g = Extensor::from_label(Label::Atom(Atom::primal(spinor, &[mu as i32])));
        out.add_assign(&unitize(&wedge(&g, &unitize(&sector.partial(mu)?))));
    }
    Ok(VacuumState { tag, sector, element: out, sectors: names })
}

/// `Σ_μ ι(γ^μ ∨ ι∂_μ)`. The γ labels stand for the generators of `rep`.
pub fn dirac_vacuum(_rep: &GammaRep, sector: DSector) -> Result<VacuumState> {
    spinor_vacuum(VacuumTag::Dirac, sectors::GAMMA, sector)
}

/// `Σ_μ ι(σ^μ ∨ ι∂_μ)` with `σ^μ = P₋γ^μP₊`; needs the full tower for `P_±`.
pub fn left_handed_vacuum(_rep: &GammaRep, tower: Tower, sector: DSector) -> Result<VacuumState> {
    if tower < Tower::QiSqrt3 {
        return Err(Error::TowerTooSmall { have: tower.to_string(), need: Tower::QiSqrt3.to_string() });
    }
    spinor_vacuum(VacuumTag::Left, sectors::SIGMA, sector)
}

/// Builds any vacuum by tag.
pub fn build(tag: VacuumTag, g: &MetricForm, rep: &GammaRep, tower: Tower, sector: DSector) -> Result<VacuumState> {
    match tag {
        VacuumTag::Dipole => dipole_vacuum(sector),
        VacuumTag::Dalembertian => dalembertian_vacuum(g, sector),
        VacuumTag::Dirac => dirac_vacuum(rep, sector),
        VacuumTag::Left => left_handed_vacuum(rep, tower, sector),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metatensor::{number_eigenvalue, NumberKind};

    #[test]
    fn null_form_spectrum() {
        let g = MetricForm::null_form();
        assert_eq!(g.det(), Scalar::from_i64(-3));
        let ev: Vec<i64> = g.rational_eigenvalues().iter().map(|s| s.as_i64().unwrap()).collect();
        assert_eq!(ev, vec![3, -1, -1, -1]);
        assert_eq!(g.signature(), (1, 3));
        assert!((0..4).all(|m| g.get(m, m).is_zero()));
        assert!(permutations().iter().all(|p| g.is_invariant_under(p)));
        assert_eq!(permutations().len(), 24);
        let low = g.lowered();
        assert_eq!(low.get(0, 0), &Scalar::ratio(-2, 3));
        assert_eq!(low.get(0, 1), &Scalar::ratio(1, 3));
    }

    #[test]
    fn degenerate_metrics_rejected() {
        let ones = Matrix::from_fn(4, 4, |_, _| Scalar::one());
        assert!(matches!(MetricForm::new(ones), Err(Error::DegenerateMetric(_))));
        let asym = Matrix::from_fn(4, 4, |i, j| Scalar::from_i64((i * 4 + j) as i64));
        assert!(MetricForm::new(asym).is_err());
    }

    #[test]
    fn clifford_relation() {
        let g = MetricForm::null_form();
        let rep = GammaRep::new(&g);
        assert_eq!(rep.dim(), 16);
        let id = rep.identity();
        for mu in 0..4 {
            assert!((rep.gamma(mu) * rep.gamma(mu)).is_zero());
            for nu in 0..4 {
                let ac = rep.gamma(mu).anticommutator(rep.gamma(nu));
                assert_eq!(ac, id.scale(&(g.get(mu, nu) * &Scalar::from_i64(2))));
            }
        }
    }

    #[test]
    fn volume_element_and_projectors() {
        let rep = GammaRep::new(&MetricForm::null_form());
        let g5 = rep.gamma5();
        assert_eq!(g5 * g5, rep.identity().scale(&Scalar::from_i64(-1)));
        assert!(g5.trace().is_zero());
        for mu in 0..4 {
            assert!(g5.anticommutator(rep.gamma(mu)).is_zero());
        }
        let (p, m) = (rep.chiral_projector(true), rep.chiral_projector(false));
        assert_eq!(&p + &m, rep.identity());
        assert!((&p * &m).is_zero());
        assert_eq!(&p * &p, p);
        assert_eq!(p.rank(), 8);
        assert_eq!(rep.sigma(0), rep.gamma(0) * &p);
    }

    #[test]
    fn vacuum_shapes() {
        let g = MetricForm::null_form();
        let rep = GammaRep::new(&g);
        let dip = dipole_vacuum(DSector::Abstract).unwrap();
        let (w, c) = dip.element.single_term().unwrap();
        assert!(c.is_one());
        assert_eq!(number_eigenvalue(NumberKind::Network, w), 4);
        let dal = dalembertian_vacuum(&g, DSector::Abstract).unwrap();
        assert_eq!(dal.element.len(), 12);
        assert_eq!(dal.element.level(), 2);
        let dir = dirac_vacuum(&rep, DSector::Abstract).unwrap();
        assert_eq!(dir.element.len(), 4);
        for (w, _) in dir.element.terms() {
            let payload = w.labels()[0].payload().unwrap();
            assert_eq!(payload.grade(), 2);
            assert!(payload.labels()[0].atom().is_some() && payload.labels()[1].payload().is_some());
        }
        assert!(matches!(left_handed_vacuum(&rep, Tower::Qi, DSector::Abstract), Err(Error::TowerTooSmall { .. })));
        assert_eq!(left_handed_vacuum(&rep, Tower::QiSqrt3, DSector::Abstract).unwrap().element.len(), 4);
        let win = LatticeWindow::new(2).unwrap();
        assert!(matches!(dipole_vacuum(DSector::Lattice(win)), Err(Error::Infeasible(_))));
    }

    #[test]
    fn operator_product_keeps_diagonal() {
        let dal = dalembertian_vacuum(&MetricForm::euclidean(), DSector::Abstract).unwrap();
        assert_eq!(dal.element.len(), 4);
        // the Grassmann version of the symmetric contraction vanishes
        let g = MetricForm::null_form();
        let mut wedge_sum = Extensor::zero();
        for mu in 0..4 {
            for nu in 0..4 {
                let a = DSector::Abstract.partial(mu).unwrap();
                let b = DSector::Abstract.partial(nu).unwrap();
                wedge_sum.add_scaled(&wedge(&a, &b), g.get(mu, nu));
            }
        }
        assert!(wedge_sum.is_zero());
    }

    #[test]
    fn constructors_are_deterministic() {
        let g = MetricForm::null_form();
        let a = dalembertian_vacuum(&g, DSector::Abstract).unwrap();
        let b = dalembertian_vacuum(&g, DSector::Abstract).unwrap();
        assert_eq!(a.element.to_string(), b.element.to_string());
    }
}
