//! Truncated `Z⁴` point-ket window with down-shift `∂_μ` and scaled up-shift
//! `x^μ` operators, their commutators, and the affine-diffeomorphism
//! (Poincaré, shear, dilation) generators `δΛ = −δx·∂`.
//!
//! Shifts that leave the window annihilate: the coefficient is dropped. All
//! truncation-free identities are therefore asserted on interior kets only.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::exterior::{sectors, Atom, Extensor, Label, Word};
use crate::linalg::{Matrix, RowReducer};
use crate::metatensor::LabelMap;
use crate::scalar::Scalar;

pub const DIM: usize = 4;

pub type Point = [i32; DIM];

/// Checks a 1-based axis and returns it 0-based.
pub fn axis(mu: usize) -> Result<usize> {
    if (1..=DIM).contains(&mu) {
        Ok(mu - 1)
    } else {
        Err(Error::BadAxis(mu))
    }
}

pub fn unit(axis: usize) -> Point {
    let mut p = [0; DIM];
    p[axis] = 1;
    p
}

fn shifted(p: &Point, axis: usize, by: i32) -> Point {
    let mut q = *p;
    q[axis] += by;
    q
}

/// Points `n` with every `|n^μ| ≤ N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LatticeWindow {
    half_width: u32,
}

impl LatticeWindow {
    pub fn new(half_width: u32) -> Result<Self> {
        if half_width == 0 {
            return Err(Error::Config("window half-width must be positive".into()));
        }
        Ok(LatticeWindow { half_width })
    }

    pub fn half_width(&self) -> u32 {
        self.half_width
    }

    fn side(&self) -> usize {
        2 * self.half_width as usize + 1
    }

    pub fn len(&self) -> usize {
        self.side().pow(DIM as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: &Point) -> bool {
        let n = self.half_width as i32;
        p.iter().all(|x| (-n..=n).contains(x))
    }

    /// All coordinates at least `margin` steps away from the edge.
    pub fn within(&self, p: &Point, margin: u32) -> bool {
        let n = self.half_width as i32 - margin as i32;
        n >= 0 && p.iter().all(|x| x.abs() <= n)
    }

    /// `|n^μ| ≤ N − 1` for every μ.
    pub fn is_interior(&self, p: &Point) -> bool {
        self.within(p, 1)
    }

    /// Member of the outermost `width` layers.
    pub fn in_shell(&self, p: &Point, width: u32) -> bool {
        self.contains(p) && !self.within(p, width)
    }

    pub fn index(&self, p: &Point) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let n = self.half_width as i32;
        let side = self.side();
        Some(p.iter().rev().fold(0, |acc, &x| acc * side + (x + n) as usize))
    }

    pub fn point(&self, mut idx: usize) -> Point {
        let n = self.half_width as i32;
        let side = self.side();
        let mut p = [0; DIM];
        for x in p.iter_mut() {
            *x = (idx % side) as i32 - n;
            idx /= side;
        }
        p
    }

    /// Every window point, in index order; each appears exactly once.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    pub fn interior_points(&self) -> Vec<Point> {
        self.points().filter(|p| self.is_interior(p)).collect()
    }
}

pub fn point_ket(p: &Point) -> Atom {
    Atom::primal(sectors::POINT, p)
}

pub fn point_bra(p: &Point) -> Atom {
    Atom::dual_of(sectors::POINT, p)
}

fn atom_point(a: &Atom) -> Option<Point> {
    if a.sector.name() != sectors::POINT || a.key.len() != DIM {
        return None;
    }
    Some([a.key[0], a.key[1], a.key[2], a.key[3]])
}

/// Sparse linear map on the window, stored by column: `columns[b]` lists
/// `(a, c)` for the dyads `c·|a⟩⟨b|`, sorted by `a`.
#[derive(Clone, PartialEq, Eq)]
pub struct LatticeOperator {
    window: LatticeWindow,
    columns: Vec<Vec<(usize, Scalar)>>,
}

impl LatticeOperator {
    pub fn zero(window: LatticeWindow) -> Self {
        LatticeOperator { window, columns: vec![Vec::new(); window.len()] }
    }

    pub fn identity(window: LatticeWindow) -> Self {
        let columns = (0..window.len()).map(|i| vec![(i, Scalar::one())]).collect();
        LatticeOperator { window, columns }
    }

    /// Builds `Σ_b f(b)` where `f` lists the images of `|b⟩`; images outside
    /// the window are dropped.
    pub fn from_images(window: LatticeWindow, f: impl Fn(&Point) -> Vec<(Point, Scalar)> + Sync) -> Self {
        let columns = exec::map_range(window.len(), |b| {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (p, c) in f(&window.point(b)) {
                if let Some(a) = window.index(&p) {
                    *acc.entry(a).or_default() += &c;
                }
            }
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
        });
        LatticeOperator { window, columns }
    }

    pub fn window(&self) -> LatticeWindow {
        self.window
    }

    /// Number of stored dyads.
    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    /// `A|b⟩` as `(point, coefficient)` pairs.
    pub fn apply_point(&self, b: &Point) -> Vec<(Point, Scalar)> {
        match self.window.index(b) {
            Some(i) => self.columns[i].iter().map(|(a, c)| (self.window.point(*a), c.clone())).collect(),
            None => Vec::new(),
        }
    }

    pub fn column(&self, b: usize) -> &[(usize, Scalar)] {
        &self.columns[b]
    }

    fn same_window(&self, other: &LatticeOperator) -> Result<()> {
        if self.window != other.window {
            return Err(Error::SectorMismatch("operators on different windows".into()));
        }
        Ok(())
    }

    fn combine(&self, other: &LatticeOperator, sign: &Scalar) -> LatticeOperator {
        let columns = exec::map_range(self.window.len(), |b| {
            let mut acc: BTreeMap<usize, Scalar> = self.columns[b].iter().cloned().collect();
            for (a, c) in &other.columns[b] {
                *acc.entry(*a).or_default() += &(c * sign);
            }
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
        });
        LatticeOperator { window: self.window, columns }
    }

    pub fn add(&self, other: &LatticeOperator) -> Result<LatticeOperator> {
        self.same_window(other)?;
        Ok(self.combine(other, &Scalar::one()))
    }

    pub fn sub(&self, other: &LatticeOperator) -> Result<LatticeOperator> {
        self.same_window(other)?;
        Ok(self.combine(other, &Scalar::from_i64(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> LatticeOperator {
        if s.is_zero() {
            return LatticeOperator::zero(self.window);
        }
        let columns = self.columns.iter().map(|col| col.iter().map(|(a, c)| (*a, c * s)).collect()).collect();
        LatticeOperator { window: self.window, columns }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &LatticeOperator) -> Result<LatticeOperator> {
        self.same_window(other)?;
        let columns = exec::map_range(self.window.len(), |b| {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (k, c1) in &other.columns[b] {
                for (a, c2) in &self.columns[*k] {
                    *acc.entry(*a).or_default() += &(c1 * c2);
                }
            }
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
        });
        Ok(LatticeOperator { window: self.window, columns })
    }

    pub fn transpose(&self) -> LatticeOperator {
        let mut columns = vec![Vec::new(); self.window.len()];
        for (b, col) in self.columns.iter().enumerate() {
            for (a, c) in col {
                columns[*a].push((b, c.clone()));
            }
        }
        LatticeOperator { window: self.window, columns }
    }

    /// Sum of dyads `c·|a⟩∨⟨b|` in the point sector.
    pub fn to_extensor(&self) -> Extensor {
        let mut out = Extensor::zero();
        for (b, col) in self.columns.iter().enumerate() {
            let bra = point_bra(&self.window.point(b));
            for (a, c) in col {
                out.add_scaled(&crate::exterior::dyad(&point_ket(&self.window.point(*a)), &bra), c);
            }
        }
        out
    }

    /// Inverse of [`to_extensor`](Self::to_extensor); errors on non-dyad words.
    pub fn from_extensor(window: LatticeWindow, x: &Extensor) -> Result<LatticeOperator> {
        let mut columns: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); window.len()];
        for (w, c) in x.terms() {
            let bad = || Error::WrongGrade(format!("`{w}` is not a point dyad"));
            let (k, b, s) = crate::exterior::as_dyad(w).ok_or_else(bad)?;
            let (Some(kp), Some(bp)) = (atom_point(k), atom_point(b)) else { return Err(bad()) };
            let (Some(ki), Some(bi)) = (window.index(&kp), window.index(&bp)) else { return Err(bad()) };
            let v = if s < 0 { -c } else { c.clone() };
            *columns[bi].entry(ki).or_default() += &v;
        }
        let columns = columns.into_iter().map(|m| m.into_iter().filter(|(_, c)| !c.is_zero()).collect()).collect();
        Ok(LatticeOperator { window, columns })
    }

    /// Derivation on point labels induced by commutation with `self`:
    /// `|a⟩ ↦ G|a⟩`, `⟨b| ↦ −⟨b|G`.
    pub fn derivation_map(&self) -> LatticeDerivation {
        LatticeDerivation { gen: self.clone(), rows: self.transpose() }
    }
}

impl fmt::Debug for LatticeOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatticeOperator(N={}, {} dyads)", self.window.half_width, self.nnz())
    }
}

/// See [`LatticeOperator::derivation_map`].
pub struct LatticeDerivation {
    gen: LatticeOperator,
    rows: LatticeOperator,
}

impl LabelMap for LatticeDerivation {
    fn map_label(&self, label: &Label) -> Option<Extensor> {
        let a = label.atom()?;
        let p = atom_point(a)?;
        let w = self.gen.window;
        let i = w.index(&p)?;
        let mut out = Extensor::zero();
        if a.dual {
            for (c, v) in self.rows.column(i) {
                out.add_term(Word::single(Label::Atom(point_bra(&w.point(*c)))), -v);
            }
        } else {
            for (k, v) in self.gen.column(i) {
                out.add_term(Word::single(Label::Atom(point_ket(&w.point(*k)))), v.clone());
            }
        }
        Some(out)
    }
}

/// Axis permutation acting on point labels: `n ↦ n'` with `n'^{π(μ)} = n^μ`,
/// so that `∂_μ ↦ ∂_{π(μ)}`.
pub struct LatticePermutation {
    pub perm: [usize; DIM],
}

impl LabelMap for LatticePermutation {
    fn map_label(&self, label: &Label) -> Option<Extensor> {
        let a = label.atom()?;
        let p = atom_point(a)?;
        let mut q = [0; DIM];
        for mu in 0..DIM {
            q[self.perm[mu]] = p[mu];
        }
        let img = if a.dual { point_bra(&q) } else { point_ket(&q) };
        Some(Extensor::atom(img))
    }
}

/// `∂_μ = Σ_n |n − 1_μ⟩∨⟨n|` (μ is 1-based).
pub fn partial_mu(mu: usize, window: LatticeWindow) -> Result<LatticeOperator> {
    let ax = axis(mu)?;
    Ok(LatticeOperator::from_images(window, |n| vec![(shifted(n, ax, -1), Scalar::one())]))
}

/// `x^μ = Σ_n |n + 1_μ⟩∨⟨n| (n^μ + 1)` (μ is 1-based).
pub fn coord_mu(mu: usize, window: LatticeWindow) -> Result<LatticeOperator> {
    let ax = axis(mu)?;
    Ok(LatticeOperator::from_images(window, |n| vec![(shifted(n, ax, 1), Scalar::from_i64(n[ax] as i64 + 1))]))
}

/// `AB − BA`.
pub fn commutator(a: &LatticeOperator, b: &LatticeOperator) -> Result<LatticeOperator> {
    a.compose(b)?.sub(&b.compose(a)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CcrFailure {
    pub mu: usize,
    pub lambda: usize,
    pub ket: Point,
}

/// Outcome of checking `[∂_μ, x^λ]|n⟩ = δ^λ_μ |n⟩` on the interior.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CcrReport {
    pub half_width: u32,
    pub interior_kets: usize,
    pub index_pairs: usize,
    pub checks: usize,
    pub failures: Vec<CcrFailure>,
}

impl CcrReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exact CCR check on every interior ket and all 16 index pairs.
pub fn check_ccr(window: LatticeWindow) -> Result<CcrReport> {
    let mut comms = Vec::with_capacity(DIM * DIM);
    for mu in 1..=DIM {
        let d = partial_mu(mu, window)?;
        for lambda in 1..=DIM {
            comms.push((mu, lambda, commutator(&d, &coord_mu(lambda, window)?)?));
        }
    }
    let interior = window.interior_points();
    let per_ket = exec::map(&interior, |n| {
        comms
            .iter()
            .filter(|(mu, lambda, c)| {
                let mut expect = Vec::new();
                if mu == lambda {
                    expect.push((*n, Scalar::one()));
                }
                c.apply_point(n) != expect
            })
            .map(|(mu, lambda, _)| CcrFailure { mu: *mu, lambda: *lambda, ket: *n })
            .collect::<Vec<_>>()
    });
    Ok(CcrReport {
        half_width: window.half_width(),
        interior_kets: interior.len(),
        index_pairs: comms.len(),
        checks: interior.len() * comms.len(),
        failures: per_ket.into_iter().flatten().collect(),
    })
}

/// One monomial term `coeff · x^e · e_component` of a polynomial vector field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldTerm {
    /// 0-based component μ of `δx^μ`.
    pub component: usize,
    pub coeff: Scalar,
    pub exponents: [u32; DIM],
}

/// Polynomial vector field `δx^μ(x)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VectorField {
    pub terms: Vec<FieldTerm>,
}

impl VectorField {
    /// `δx^μ = α^μ + ω^μ_ν x^ν`.
    pub fn affine(alpha: &[Scalar], omega: &Matrix) -> Self {
        let mut terms = Vec::new();
        for (mu, a) in alpha.iter().enumerate().take(DIM) {
            if !a.is_zero() {
                terms.push(FieldTerm { component: mu, coeff: a.clone(), exponents: [0; DIM] });
            }
            for nu in 0..DIM {
                let w = omega.get(mu, nu);
                if !w.is_zero() {
                    let mut e = [0; DIM];
                    e[nu] = 1;
                    terms.push(FieldTerm { component: mu, coeff: w.clone(), exponents: e });
                }
            }
        }
        VectorField { terms }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.exponents.iter().sum()).max().unwrap_or(0)
    }
}

/// `δΛ = −Σ_μ δx^μ(x) ∘ ∂_μ`, coordinates to the left of the shift.
pub fn diffeo_rep(field: &VectorField, window: LatticeWindow) -> Result<LatticeOperator> {
    let deg = field.degree();
    if deg > 1 {
        return Err(Error::DegreeTooHigh(deg));
    }
    let mut out = LatticeOperator::zero(window);
    for t in &field.terms {
        let d = partial_mu(t.component + 1, window)?;
        let term = match t.exponents.iter().position(|&e| e == 1) {
            None => d,
            Some(nu) => coord_mu(nu + 1, window)?.compose(&d)?,
        };
        out = out.sub(&term.scale(&t.coeff))?;
    }
    Ok(out)
}

/// `ωg + gωᵀ`; zero exactly for the g-antisymmetric (Lorentz) ω.
pub fn lorentz_defect(omega: &Matrix, g: &Matrix) -> Matrix {
    &(omega * g) + &(g * &omega.transpose())
}

fn matrix_unit(i: usize, j: usize) -> Matrix {
    Matrix::from_fn(DIM, DIM, |r, c| if (r, c) == (i, j) { Scalar::one() } else { Scalar::zero() })
}

fn null_space_of_linear_conditions(conds: impl Fn(&Matrix) -> Vec<Scalar>) -> Vec<Matrix> {
    // Columns: the 16 entries of ω; rows: coordinates of the condition.
    let images: Vec<Vec<Scalar>> = (0..DIM * DIM).map(|k| conds(&matrix_unit(k / DIM, k % DIM))).collect();
    let rows = images[0].len();
    let mut red = RowReducer::new(DIM * DIM);
    for r in 0..rows {
        let row: Vec<Scalar> = images.iter().map(|im| im[r].clone()).collect();
        red.insert_dense(&row);
    }
    red.null_space().into_iter().map(|v| Matrix::from_fn(DIM, DIM, |i, j| v[i * DIM + j].clone())).collect()
}

/// Basis of `{ω : ωg + gωᵀ = 0}` (6-dimensional for nondegenerate g).
pub fn rotation_basis(g: &Matrix) -> Vec<Matrix> {
    null_space_of_linear_conditions(|w| lorentz_defect(w, g).entries().to_vec())
}

/// Basis of the traceless g-symmetric ω: `ωg = gωᵀ`, `tr ω = 0`.
pub fn shear_basis(g: &Matrix) -> Vec<Matrix> {
    null_space_of_linear_conditions(|w| {
        let mut v = (&(w * g) - &(g * &w.transpose())).entries().to_vec();
        v.push(w.trace());
        v
    })
}

/// Traceless basis of `sl(4)`: the 12 off-diagonal units, then
/// `E_ii − E_{i+1,i+1}`.
pub fn sl_basis() -> Vec<Matrix> {
    let mut out = Vec::new();
    for i in 0..DIM {
        for j in 0..DIM {
            if i != j {
                out.push(matrix_unit(i, j));
            }
        }
    }
    for i in 0..DIM - 1 {
        out.push(&matrix_unit(i, i) - &matrix_unit(i + 1, i + 1));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorClass {
    Poincare,
    ShearDilation,
}

/// Affine generator `δx^μ = α^μ + ω^μ_ν x^ν`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineGenerator {
    pub label: String,
    pub alpha: Vec<Scalar>,
    pub omega: Matrix,
}

impl AffineGenerator {
    pub fn translation(axis: usize) -> Self {
        let alpha = (0..DIM).map(|k| if k == axis { Scalar::one() } else { Scalar::zero() }).collect();
        AffineGenerator { label: format!("translation/{}", axis + 1), alpha, omega: Matrix::zeros(DIM, DIM) }
    }

    pub fn linear(label: String, omega: Matrix) -> Self {
        AffineGenerator { label, alpha: vec![Scalar::zero(); DIM], omega }
    }

    pub fn classify(&self, g: &Matrix) -> GeneratorClass {
        if lorentz_defect(&self.omega, g).is_zero() {
            GeneratorClass::Poincare
        } else {
            GeneratorClass::ShearDilation
        }
    }

    pub fn field(&self) -> VectorField {
        VectorField::affine(&self.alpha, &self.omega)
    }

    pub fn lattice_op(&self, window: LatticeWindow) -> Result<LatticeOperator> {
        diffeo_rep(&self.field(), window)
    }
}

/// Poincaré generator with its classification. Violating `ωg + gωᵀ = 0`
/// still yields an operator, flagged as shear/dilation.
pub fn poincare_gen(alpha: &[Scalar], omega: &Matrix, g: &Matrix, window: LatticeWindow) -> Result<(LatticeOperator, GeneratorClass)> {
    let gen = AffineGenerator { label: String::new(), alpha: alpha.to_vec(), omega: omega.clone() };
    Ok((gen.lattice_op(window)?, gen.classify(g)))
}

/// The 10 generators: 4 translations, then the rotation basis.
pub fn poincare_basis(g: &Matrix) -> Vec<AffineGenerator> {
    let mut out: Vec<AffineGenerator> = (0..DIM).map(AffineGenerator::translation).collect();
    for (k, w) in rotation_basis(g).into_iter().enumerate() {
        out.push(AffineGenerator::linear(format!("rotation/{}", k + 1), w));
    }
    out
}

/// Matrix `M` with `[gen, ∂_λ] = M^μ_λ ∂_μ`, read at the origin and verified
/// on every ket at least `margin` steps inside the window.
pub fn induced_matrix_with_margin(gen: &LatticeOperator, margin: u32) -> Result<Matrix> {
    let window = gen.window();
    if !window.within(&[0; DIM], margin) {
        return Err(Error::Config(format!("window N={} too small for margin {margin}", window.half_width())));
    }
    let mut m = Matrix::zeros(DIM, DIM);
    let mut comms = Vec::with_capacity(DIM);
    for lambda in 0..DIM {
        let d = partial_mu(lambda + 1, window)?;
        let c = commutator(gen, &d)?;
        for (p, v) in c.apply_point(&[0; DIM]) {
            let mu = (0..DIM)
                .find(|&mu| p == shifted(&[0; DIM], mu, -1))
                .ok_or_else(|| Error::NonAffine(format!("[gen, ∂{}] reaches {p:?} from the origin", lambda + 1)))?;
            m.set(mu, lambda, v);
        }
        comms.push(c);
    }
    let kets: Vec<Point> = window.points().filter(|p| window.within(p, margin)).collect();
    let bad = exec::map(&kets, |n| {
        (0..DIM).find(|&lambda| {
            let mut expect: Vec<(Point, Scalar)> = (0..DIM)
                .filter(|&mu| !m.get(mu, lambda).is_zero())
                .map(|mu| (shifted(n, mu, -1), m.get(mu, lambda).clone()))
                .collect();
            expect.sort_by_key(|a| window.index(&a.0));
            comms[lambda].apply_point(n) != expect
        })
    });
    if let Some((n, lambda)) = kets.iter().zip(bad).find_map(|(n, b)| b.map(|l| (n, l))) {
        return Err(Error::NonAffine(format!("[gen, ∂{}] is not a constant shift combination at {n:?}", lambda + 1)));
    }
    Ok(m)
}

/// [`induced_matrix_with_margin`] on doubly-interior kets.
pub fn induced_matrix(gen: &LatticeOperator) -> Result<Matrix> {
    induced_matrix_with_margin(gen, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(n: u32) -> LatticeWindow {
        LatticeWindow::new(n).unwrap()
    }

    fn g_null() -> Matrix {
        Matrix::from_fn(DIM, DIM, |i, j| Scalar::from_i64(if i == j { 0 } else { 1 }))
    }

    #[test]
    fn window_enumeration() {
        let win = w(2);
        assert_eq!(win.len(), 625);
        let mut seen: Vec<usize> = win.points().map(|p| win.index(&p).unwrap()).collect();
        seen.dedup();
        assert_eq!(seen.len(), 625);
        assert_eq!(win.interior_points().len(), 81);
        assert!(win.in_shell(&[2, 0, 0, 0], 2) && win.in_shell(&[0, -1, 0, 0], 2));
        assert!(!win.in_shell(&[0, 0, 0, 0], 2));
    }

    #[test]
    fn shift_examples() {
        let win = w(3);
        let d1 = partial_mu(1, win).unwrap();
        assert_eq!(d1.apply_point(&[0, 0, 0, 0]), vec![([-1, 0, 0, 0], Scalar::one())]);
        assert!(d1.apply_point(&[-3, 0, 0, 0]).is_empty());
        let x1 = coord_mu(1, win).unwrap();
        assert_eq!(x1.apply_point(&[0, 0, 0, 0]), vec![([1, 0, 0, 0], Scalar::one())]);
        assert!(x1.apply_point(&[-1, 0, 0, 0]).is_empty());
        assert!(x1.apply_point(&[3, 0, 0, 0]).is_empty());
        assert!(partial_mu(0, win).is_err());
        assert!(coord_mu(5, win).is_err());
    }

    #[test]
    fn commutator_examples() {
        let win = w(2);
        let d1 = partial_mu(1, win).unwrap();
        let d2 = partial_mu(2, win).unwrap();
        let c = commutator(&d1, &coord_mu(1, win).unwrap()).unwrap();
        assert_eq!(c.apply_point(&[0; 4]), vec![([0; 4], Scalar::one())]);
        assert!(commutator(&d1, &d2).unwrap().is_zero());
        let c12 = commutator(&d1, &coord_mu(2, win).unwrap()).unwrap();
        assert!(win.interior_points().iter().all(|p| c12.apply_point(p).is_empty()));
    }

    #[test]
    fn extensor_round_trip_and_dyad_action() {
        let win = w(1);
        let d = partial_mu(3, win).unwrap();
        let e = d.to_extensor();
        assert_eq!(e.len(), d.nnz());
        assert_eq!(LatticeOperator::from_extensor(win, &e).unwrap(), d);
        let ket = Extensor::atom(point_ket(&[0, 0, 1, 0]));
        let out = crate::exterior::apply_operator(&e, &ket);
        assert_eq!(out, Extensor::atom(point_ket(&[0, 0, 0, 0])));
    }

    #[test]
    fn ccr_small_windows() {
        for n in [1, 2] {
            let r = check_ccr(w(n)).unwrap();
            assert!(r.passed(), "N={n}: {:?}", r.failures.first());
        }
        assert_eq!(check_ccr(w(1)).unwrap().interior_kets, 1);
    }

    #[test]
    fn diffeo_examples() {
        let win = w(3);
        let zero = diffeo_rep(&VectorField::default(), win).unwrap();
        assert!(zero.is_zero());
        let quad = VectorField { terms: vec![FieldTerm { component: 0, coeff: Scalar::one(), exponents: [2, 0, 0, 0] }] };
        assert!(matches!(diffeo_rep(&quad, win), Err(Error::DegreeTooHigh(2))));
        let t = AffineGenerator::translation(0).lattice_op(win).unwrap();
        assert_eq!(t, partial_mu(1, win).unwrap().scale(&Scalar::from_i64(-1)));
        let c = commutator(&t, &partial_mu(2, win).unwrap()).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn generator_space_dimensions() {
        let g = g_null();
        assert_eq!(rotation_basis(&g).len(), 6);
        assert_eq!(shear_basis(&g).len(), 9);
        assert_eq!(poincare_basis(&g).len(), 10);
        assert_eq!(sl_basis().len(), 15);
        let dil = AffineGenerator::linear("dilation".into(), Matrix::identity(4));
        assert_eq!(dil.classify(&g), GeneratorClass::ShearDilation);
        for gen in poincare_basis(&g) {
            assert_eq!(gen.classify(&g), GeneratorClass::Poincare);
        }
    }

    #[test]
    fn induced_matrices() {
        let win = w(3);
        let g = g_null();
        let t = AffineGenerator::translation(2).lattice_op(win).unwrap();
        assert!(induced_matrix(&t).unwrap().is_zero());
        let rots = rotation_basis(&g);
        let a = AffineGenerator::linear("a".into(), rots[0].clone()).lattice_op(win).unwrap();
        let b = AffineGenerator::linear("b".into(), rots[3].clone()).lattice_op(win).unwrap();
        assert_eq!(induced_matrix(&a).unwrap(), rots[0]);
        assert_eq!(induced_matrix(&a.add(&b).unwrap()).unwrap(), &rots[0] + &rots[3]);
        // a bare coordinate is not a derivation-type generator
        assert!(matches!(induced_matrix(&coord_mu(1, win).unwrap()), Err(Error::NonAffine(_))));
    }
}
