//! Invariance, statistics and representation checks on the vacuum states.
//!
//! Infinitesimal actions are lifted as derivations and the residual is the
//! lifted image of the vacuum. Finite actions are lifted as substitutions and
//! the residual is `φ(v) − v`. Every verdict is an exact comparison.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::exterior::{sectors, term_string, wedge, Atom, Extensor, Key, Label, Word};
use crate::lattice::{
    lorentz_defect, poincare_basis, rotation_basis, shear_basis, sl_basis, AffineGenerator, LatticeOperator,
    LatticePermutation, LatticeWindow, Point, DIM,
};
use crate::linalg::{Matrix, RowReducer};
use crate::metatensor::{
    depth_grades, lift_derivation, lift_substitution, number_eigenvalue, number_operator, point, subfactor_swap_is_degenerate,
    swap_factors, swap_subfactors, unitize, Combined, LabelMap, NumberKind,
};
use crate::scalar::Scalar;
use crate::vacua::{permutation_matrix, permutation_sign, permutations, GammaRep, MetricForm, VacuumState, VacuumTag};

/// Width of the boundary shell excluded from lattice claims.
pub const SHELL_WIDTH: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    Derivation,
    Substitution,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Poincare,
    ShearDilation,
    Discrete,
    Sl4,
    Parity,
}

impl CheckKind {
    pub const ALL: [CheckKind; 5] =
        [CheckKind::Poincare, CheckKind::ShearDilation, CheckKind::Discrete, CheckKind::Sl4, CheckKind::Parity];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Poincare => "poincare",
            CheckKind::ShearDilation => "shear-dilation",
            CheckKind::Discrete => "discrete",
            CheckKind::Sl4 => "sl4",
            CheckKind::Parity => "parity",
        }
    }
}

impl std::str::FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckKind::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| Error::Parse(format!("unknown check `{s}`")))
    }
}

/// Lattice realization of an action on point labels.
#[derive(Clone, Debug)]
pub enum LatticeAction {
    Generator(LatticeOperator),
    Permutation([usize; DIM]),
}

/// An infinitesimal or finite action on the constituent sectors.
#[derive(Clone, Debug)]
pub struct SymmetryAction {
    pub label: String,
    pub kind: ActionKind,
    /// `∂_λ ↦ Σ_μ M[μ][λ] ∂_μ`, extended to `∂∘∂` monomials.
    pub partial: Matrix,
    /// The same convention on the spinor generators (γ or σ).
    pub spinor: Option<Matrix>,
    pub lattice: Option<LatticeAction>,
}

/// Matrix acting on the first-slot keys of one sector. Monomial keys
/// `[k₁, …, k_m]` transform by Leibniz (derivation) or by the tensor power
/// (substitution).
pub struct SectorMatrixMap {
    sector: &'static str,
    matrix: Matrix,
    kind: ActionKind,
}

impl SectorMatrixMap {
    pub fn new(sector: &'static str, matrix: Matrix, kind: ActionKind) -> Self {
        SectorMatrixMap { sector, matrix, kind }
    }

    fn column(&self, k: i32) -> Vec<(i32, &Scalar)> {
        (0..self.matrix.rows())
            .map(|i| (i as i32, self.matrix.get(i, k as usize)))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }
}

impl LabelMap for SectorMatrixMap {
    fn map_label(&self, label: &Label) -> Option<Extensor> {
        let a = label.atom()?;
        if a.sector.name() != self.sector || a.dual {
            return None;
        }
        let mut out = Extensor::zero();
        match self.kind {
            ActionKind::Derivation => {
                for slot in 0..a.key.len() {
                    for (i, c) in self.column(a.key[slot]) {
                        let mut k = a.key.clone();
                        k[slot] = i;
                        out.add_term(Word::single(Label::Atom(Atom::primal(self.sector, &k))), c.clone());
                    }
                }
            }
            ActionKind::Substitution => {
                let mut partial: Vec<(Key, Scalar)> = vec![(Key::new(), Scalar::one())];
                for &k in &a.key {
                    let col = self.column(k);
                    partial = partial
                        .iter()
                        .flat_map(|(key, s)| {
                            col.iter().map(move |(i, c)| {
                                let mut nk = key.clone();
                                nk.push(*i);
                                (nk, s * c)
                            })
                        })
                        .collect();
                }
                for (k, c) in partial {
                    out.add_term(Word::single(Label::Atom(Atom::primal(self.sector, &k))), c);
                }
            }
        }
        Some(out)
    }
}

/// The residual metatensor: lifted derivation image, or `φ(v) − v`.
pub fn residual(v: &VacuumState, a: &SymmetryAction) -> Result<Extensor> {
    Ok(image(v, a)?.1)
}

/// `(φ(v) for substitutions, residual)`.
fn image(v: &VacuumState, a: &SymmetryAction) -> Result<(Option<Extensor>, Extensor)> {
    let spinor = v.tag.spinor_sector().zip(a.spinor.clone()).map(|(s, m)| SectorMatrixMap::new(s, m, a.kind));
    let mut maps: Vec<Box<dyn LabelMap>> = Vec::new();
    match v.sector.window() {
        None => maps.push(Box::new(SectorMatrixMap::new(sectors::PARTIAL, a.partial.clone(), a.kind))),
        Some(w) => match &a.lattice {
            Some(LatticeAction::Generator(op)) if a.kind == ActionKind::Derivation => {
                if op.window() != w {
                    return Err(Error::SectorMismatch("lattice generator on a different window".into()));
                }
                maps.push(Box::new(op.derivation_map()));
            }
            Some(LatticeAction::Permutation(p)) if a.kind == ActionKind::Substitution => {
                maps.push(Box::new(LatticePermutation { perm: *p }));
            }
            _ => return Err(Error::SectorMismatch(format!("action `{}` has no lattice realization", a.label))),
        },
    }
    if let Some(s) = spinor {
        maps.push(Box::new(s));
    }
    let refs: Vec<&dyn LabelMap> = maps.iter().map(|m| m.as_ref()).collect();
    let map = Combined(refs);
    Ok(match a.kind {
        ActionKind::Derivation => (None, lift_derivation(&map, &v.element)),
        ActionKind::Substitution => {
            let img = lift_substitution(&map, &v.element);
            let res = img.sub(&v.element);
            (Some(img), res)
        }
    })
}

/// Claimed outcome of a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Zero,
    Nonzero,
    /// `φ(v) = s·v`.
    Sign(i64),
    /// Every residual term touches the boundary shell.
    ShellOnly,
    /// Some residual term avoids the boundary shell.
    OffShell,
    /// Whether a spinor-sector intertwiner realizing the relabeling exists.
    Intertwiner(bool),
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::Zero => f.write_str("zero"),
            Expectation::Nonzero => f.write_str("nonzero"),
            Expectation::Sign(s) => write!(f, "sign {s:+}"),
            Expectation::ShellOnly => f.write_str("shell-only"),
            Expectation::OffShell => f.write_str("off-shell"),
            Expectation::Intertwiner(true) => f.write_str("intertwiner"),
            Expectation::Intertwiner(false) => f.write_str("no-intertwiner"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryInfo {
    pub half_width: u32,
    pub shell_width: u32,
    pub off_shell_terms: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub vacuum: VacuumTag,
    pub check: CheckKind,
    pub action: String,
    pub kind: ActionKind,
    pub mode: String,
    pub residual_zero: bool,
    pub residual_terms: usize,
    pub witnesses: Vec<String>,
    pub sign: Option<String>,
    pub boundary: Option<BoundaryInfo>,
    pub intertwiner_dim: Option<usize>,
    pub expected: Expectation,
    pub pass: bool,
    pub seed: u64,
    #[serde(skip)]
    pub order: usize,
}

impl InvarianceReport {
    pub fn sort_key(&self) -> (VacuumTag, CheckKind, String, usize) {
        (self.vacuum, self.check, self.mode.clone(), self.order)
    }
}

fn collect_points(w: &Word, out: &mut Vec<Point>) {
    for l in w.labels() {
        match l {
            Label::Atom(a) if a.sector.name() == sectors::POINT && a.key.len() == DIM => {
                out.push([a.key[0], a.key[1], a.key[2], a.key[3]]);
            }
            Label::Atom(_) => {}
            Label::Node(p) => collect_points(p, out),
        }
    }
}

/// Whether any point label of `w` lies in the outermost `SHELL_WIDTH` layers.
pub fn touches_shell(w: &Word, window: LatticeWindow) -> bool {
    let mut pts = Vec::new();
    collect_points(w, &mut pts);
    pts.iter().any(|p| window.in_shell(p, SHELL_WIDTH))
}

struct Outcome {
    residual: Extensor,
    image: Option<Extensor>,
}

fn build_report(
    v: &VacuumState,
    check: CheckKind,
    a: &SymmetryAction,
    out: Outcome,
    expected: Expectation,
    intertwiner_dim: Option<usize>,
    seed: u64,
) -> InvarianceReport {
    let res = &out.residual;
    let sign = out.image.as_ref().and_then(|img| img.ratio_to(&v.element));
    let boundary = v.sector.window().map(|w| BoundaryInfo {
        half_width: w.half_width(),
        shell_width: SHELL_WIDTH,
        off_shell_terms: res.terms().filter(|(t, _)| !touches_shell(t, w)).count(),
    });
    let mut ranked: Vec<(&Word, &Scalar)> = res.terms().collect();
    if let Some(w) = v.sector.window() {
        ranked.sort_by_key(|(t, _)| touches_shell(t, w));
    }
    let witnesses = ranked.into_iter().take(3).map(|(t, c)| term_string(t, c)).collect();
    let residual_zero = res.is_zero();
    let off = boundary.as_ref().map_or(0, |b| b.off_shell_terms);
    let pass = match expected {
        Expectation::Zero => residual_zero,
        Expectation::Nonzero => !residual_zero,
        Expectation::Sign(s) => sign.as_ref() == Some(&Scalar::from_i64(s)),
        Expectation::ShellOnly => boundary.is_some() && off == 0,
        Expectation::OffShell => boundary.is_some() && off > 0,
        Expectation::Intertwiner(exists) => residual_zero && intertwiner_dim.map(|d| d > 0) == Some(exists),
    };
    InvarianceReport {
        vacuum: v.tag,
        check,
        action: a.label.clone(),
        kind: a.kind,
        mode: v.mode_name().to_string(),
        residual_zero,
        residual_terms: res.len(),
        witnesses,
        sign: sign.map(|s| s.to_string()),
        boundary,
        intertwiner_dim,
        expected,
        pass,
        seed,
        order: 0,
    }
}

/// `[a b c d; …]` with rows separated by `;`.
pub fn matrix_text(m: &Matrix) -> String {
    let rows: Vec<String> =
        (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect::<Vec<_>>().join(" ")).collect();
    format!("[{}]", rows.join("; "))
}

/// One-line notation, 1-based: `[2 1 3 4]` for the transposition (1 2).
pub fn perm_text(p: &[usize; DIM]) -> String {
    format!("[{}]", p.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" "))
}

fn elementary(i: usize, j: usize, k: i64) -> Matrix {
    let mut m = Matrix::identity(DIM);
    m.set(i, j, Scalar::from_i64(k));
    m
}

/// Product of 1 to 8 elementary shears `1 + k·E_ij`, `k ∈ {±1, ±2}`.
pub fn random_unimodular(rng: &mut ChaCha8Rng) -> Matrix {
    let n = rng.gen_range(1..=8);
    let mut m = Matrix::identity(DIM);
    for _ in 0..n {
        let i = rng.gen_range(0..DIM);
        let mut j = rng.gen_range(0..DIM - 1);
        if j >= i {
            j += 1;
        }
        let k = [-2, -1, 1, 2][rng.gen_range(0..4)];
        m = &m * &elementary(i, j, k);
    }
    m
}

fn unflatten(v: &[Scalar], n: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| v[i * n + j].clone())
}

/// Null space of `M a_k = b_k M` for all k, as flattened row-major `n×n`
/// vectors. With `commute_with = Some(c)` the search runs inside the
/// commutant of `c`, whose basis is found first.
pub fn intertwiner_space(a: &[Matrix], b: &[Matrix], commute_with: Option<&Matrix>) -> Vec<Vec<Scalar>> {
    let n = a[0].rows();
    let Some(c) = commute_with else {
        return solve_intertwining(a, b);
    };
    let commutant: Vec<Matrix> = solve_intertwining(std::slice::from_ref(c), std::slice::from_ref(c))
        .iter()
        .map(|v| unflatten(v, n))
        .collect();
    // Σ_k x_k (K_k a − b K_k) = 0, one column per commutant element.
    let images: Vec<Vec<Matrix>> =
        commutant.iter().map(|k| a.iter().zip(b).map(|(x, y)| &(k * x) - &(y * k)).collect()).collect();
    let mut red = RowReducer::new(commutant.len());
    'rows: for eq in 0..a.len() {
        for e in 0..n * n {
            if red.rank() == commutant.len() {
                break 'rows;
            }
            let row: Vec<(usize, Scalar)> = images
                .iter()
                .enumerate()
                .map(|(k, im)| (k, im[eq].entries()[e].clone()))
                .filter(|(_, v)| !v.is_zero())
                .collect();
            if !row.is_empty() {
                red.insert(row);
            }
        }
    }
    red.null_space()
        .into_iter()
        .map(|x| {
            let mut m = Matrix::zeros(n, n);
            for (k, xk) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                m = &m + &commutant[k].scale(xk);
            }
            m.entries().to_vec()
        })
        .collect()
}

fn solve_intertwining(a: &[Matrix], b: &[Matrix]) -> Vec<Vec<Scalar>> {
    let n = a[0].rows();
    let mut red = RowReducer::new(n * n);
    for (lhs, rhs) in a.iter().zip(b) {
        // (M·lhs − rhs·M)_{ij} = Σ_l M_{il} lhs_{lj} − Σ_l rhs_{il} M_{lj}
        for i in 0..n {
            for j in 0..n {
                if red.rank() == n * n {
                    return Vec::new();
                }
                let mut row: BTreeMap<usize, Scalar> = BTreeMap::new();
                for l in 0..n {
                    let x = lhs.get(l, j);
                    if !x.is_zero() {
                        *row.entry(i * n + l).or_default() += x;
                    }
                    let y = rhs.get(i, l);
                    if !y.is_zero() {
                        *row.entry(l * n + j).or_default() -= y;
                    }
                }
                let row: Vec<(usize, Scalar)> = row.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                if !row.is_empty() {
                    red.insert(row);
                }
            }
        }
    }
    red.null_space()
}

/// Drives every invariance and representation check for one metric.
pub struct Checker {
    g: MetricForm,
    rep: GammaRep,
    sigmas: Vec<Matrix>,
    seed: u64,
    intertwiners: Mutex<BTreeMap<(VacuumTag, [usize; DIM]), usize>>,
}

impl Checker {
    pub fn new(g: &MetricForm, seed: u64) -> Self {
        let rep = GammaRep::new(g);
        let sigmas = rep.sigmas();
        Checker { g: g.clone(), rep, sigmas, seed, intertwiners: Mutex::new(BTreeMap::new()) }
    }

    pub fn metric(&self) -> &MetricForm {
        &self.g
    }

    pub fn rep(&self) -> &GammaRep {
        &self.rep
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn spinor_basis(&self, tag: VacuumTag) -> Option<&[Matrix]> {
        match tag {
            VacuumTag::Dirac => Some(self.rep.gammas()),
            VacuumTag::Left => Some(&self.sigmas),
            _ => None,
        }
    }

    /// Affine generator acting on ∂ by `ω`, on spinors by `[S(ω), ·]`.
    pub fn affine_action(&self, tag: VacuumTag, gen: &AffineGenerator, window: Option<LatticeWindow>) -> Result<SymmetryAction> {
        let spinor = match self.spinor_basis(tag) {
            Some(b) => Some(self.rep.spin_action(&gen.omega, b)?),
            None => None,
        };
        let lattice = match window {
            Some(w) => Some(LatticeAction::Generator(gen.lattice_op(w)?)),
            None => None,
        };
        Ok(SymmetryAction { label: gen.label.clone(), kind: ActionKind::Derivation, partial: gen.omega.clone(), spinor, lattice })
    }

    /// Relabeling `∂_μ ↦ ∂_{π(μ)}`, and `γ^μ ↦ γ^{π(μ)}` on a spinor sector.
    pub fn permutation_action(&self, tag: VacuumTag, p: &[usize; DIM], window: Option<LatticeWindow>) -> SymmetryAction {
        let u = permutation_matrix(p);
        SymmetryAction {
            label: format!("perm{}", perm_text(p)),
            kind: ActionKind::Substitution,
            partial: u.clone(),
            spinor: self.spinor_basis(tag).map(|_| u),
            lattice: window.map(|_| LatticeAction::Permutation(*p)),
        }
    }

    fn linear_substitution(&self, label: String, u: Matrix) -> SymmetryAction {
        SymmetryAction { label, kind: ActionKind::Substitution, partial: u, spinor: None, lattice: None }
    }

    fn run(
        &self,
        v: &VacuumState,
        check: CheckKind,
        items: Vec<(SymmetryAction, Expectation, Option<usize>)>,
    ) -> Result<Vec<InvarianceReport>> {
        let results = exec::map(&items, |(a, e, dim)| -> Result<InvarianceReport> {
            let (image, residual) = image(v, a)?;
            Ok(build_report(v, check, a, Outcome { residual, image }, *e, *dim, self.seed))
        });
        let mut out = Vec::with_capacity(results.len());
        for (k, r) in results.into_iter().enumerate() {
            let mut r = r?;
            r.order = k;
            out.push(r);
        }
        Ok(out)
    }

    fn lattice_or(&self, v: &VacuumState, abstract_claim: Expectation, lattice_claim: Expectation) -> Expectation {
        if v.sector.window().is_some() {
            lattice_claim
        } else {
            abstract_claim
        }
    }

    /// 4 translations and 6 rotations; all vacua are claimed invariant.
    pub fn check_poincare(&self, v: &VacuumState) -> Result<Vec<InvarianceReport>> {
        let w = v.sector.window();
        let claim = self.lattice_or(v, Expectation::Zero, Expectation::ShellOnly);
        let items = poincare_basis(self.g.matrix())
            .iter()
            .map(|gen| Ok((self.affine_action(v.tag, gen, w)?, claim, None)))
            .collect::<Result<Vec<_>>>()?;
        self.run(v, CheckKind::Poincare, items)
    }

    /// Dilation and the 9 traceless g-symmetric shears. Only the dipole is
    /// claimed shear-invariant; nothing is dilation-invariant.
    pub fn check_shear_dilation(&self, v: &VacuumState) -> Result<Vec<InvarianceReport>> {
        let w = v.sector.window();
        // Below N = 3 the shell covers every point but the origin, so only
        // `nonzero` is claimed for moved vacua there.
        let off_shell = match w {
            Some(w) if w.half_width() < 3 => Expectation::Nonzero,
            _ => Expectation::OffShell,
        };
        let moved = self.lattice_or(v, Expectation::Nonzero, off_shell);
        let fixed = self.lattice_or(v, Expectation::Zero, Expectation::ShellOnly);
        let mut gens = vec![(AffineGenerator::linear("dilation".into(), Matrix::identity(DIM)), moved)];
        for (k, s) in shear_basis(self.g.matrix()).into_iter().enumerate() {
            let claim = if v.tag.is_metric() { moved } else { fixed };
            gens.push((AffineGenerator::linear(format!("shear/{}", k + 1), s), claim));
        }
        let items =
            gens.iter().map(|(g, e)| Ok((self.affine_action(v.tag, g, w)?, *e, None))).collect::<Result<Vec<_>>>()?;
        self.run(v, CheckKind::ShearDilation, items)
    }

    /// Dimension of the spinor-sector intertwiners for `p`: `M γ^μ = γ^{p(μ)} M`
    /// on the Dirac side, `M σ^μ = σ^{p(μ)} M` with `[M, γ⁵] = 0` on the
    /// left-handed side.
    pub fn intertwiner_dim(&self, tag: VacuumTag, p: &[usize; DIM]) -> Result<usize> {
        let basis = self
            .spinor_basis(tag)
            .ok_or_else(|| Error::SectorMismatch(format!("vacuum `{tag}` has no spinor sector")))?;
        if let Some(d) = self.intertwiners.lock().expect("poisoned").get(&(tag, *p)) {
            return Ok(*d);
        }
        let target: Vec<Matrix> = (0..DIM).map(|mu| basis[p[mu]].clone()).collect();
        let chiral = (tag == VacuumTag::Left).then(|| self.rep.gamma5());
        let d = intertwiner_space(basis, &target, chiral).len();
        self.intertwiners.lock().expect("poisoned").insert((tag, *p), d);
        Ok(d)
    }

    /// [`intertwiner_dim`](Self::intertwiner_dim) restricted to odd `p`.
    pub fn parity_intertwiner(&self, tag: VacuumTag, p: &[usize; DIM]) -> Result<usize> {
        if permutation_sign(p) > 0 {
            return Err(Error::EvenPermutation);
        }
        self.intertwiner_dim(tag, p)
    }

    fn prefill_intertwiners(&self, tag: VacuumTag, perms: &[[usize; DIM]]) -> Result<()> {
        if self.spinor_basis(tag).is_none() {
            return Ok(());
        }
        for r in exec::map(perms, |p| self.intertwiner_dim(tag, p)) {
            r?;
        }
        Ok(())
    }

    fn permutation_claim(&self, v: &VacuumState, p: &[usize; DIM]) -> Expectation {
        match v.tag {
            VacuumTag::Dipole => Expectation::Sign(permutation_sign(p)),
            VacuumTag::Dalembertian => Expectation::Zero,
            VacuumTag::Dirac => Expectation::Intertwiner(true),
            VacuumTag::Left => Expectation::Intertwiner(permutation_sign(p) > 0),
        }
    }

    fn permutation_reports(&self, v: &VacuumState, check: CheckKind, perms: &[[usize; DIM]]) -> Result<Vec<InvarianceReport>> {
        self.prefill_intertwiners(v.tag, perms)?;
        let w = v.sector.window();
        let items = perms
            .iter()
            .map(|p| {
                let dim = match self.spinor_basis(v.tag) {
                    Some(_) => Some(self.intertwiner_dim(v.tag, p)?),
                    None => None,
                };
                Ok((self.permutation_action(v.tag, p, w), self.permutation_claim(v, p), dim))
            })
            .collect::<Result<Vec<_>>>()?;
        self.run(v, check, items)
    }

    /// All 24 axis permutations.
    pub fn check_discrete(&self, v: &VacuumState) -> Result<Vec<InvarianceReport>> {
        self.permutation_reports(v, CheckKind::Discrete, &permutations())
    }

    /// The 12 odd permutations, for vacua with a spinor sector.
    pub fn check_parity(&self, v: &VacuumState) -> Result<Vec<InvarianceReport>> {
        if self.spinor_basis(v.tag).is_none() {
            return Ok(Vec::new());
        }
        let odd: Vec<[usize; DIM]> = permutations().into_iter().filter(|p| permutation_sign(p) < 0).collect();
        self.permutation_reports(v, CheckKind::Parity, &odd)
    }

    /// The seeded determinant-1 integer matrices used by [`sl4_invariance`](Self::sl4_invariance).
    pub fn unimodular_samples(&self, samples: usize) -> Vec<Matrix> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..samples).map(|_| random_unimodular(&mut rng)).collect()
    }

    /// 15 traceless generators (derivations) and `samples` seeded unimodular
    /// substitutions. For the metric vacua the claim is invariance exactly
    /// when the matrix preserves `g`.
    pub fn sl4_invariance(&self, v: &VacuumState, samples: usize) -> Result<Vec<InvarianceReport>> {
        if v.sector.window().is_some() || v.tag.spinor_sector().is_some() {
            return Ok(Vec::new());
        }
        let g = self.g.matrix();
        let mut items = Vec::new();
        let names = ["E12", "E13", "E14", "E21", "E23", "E24", "E31", "E32", "E34", "E41", "E42", "E43", "H1", "H2", "H3"];
        for (l, name) in sl_basis().into_iter().zip(names) {
            let claim = if !v.tag.is_metric() || lorentz_defect(&l, g).is_zero() { Expectation::Zero } else { Expectation::Nonzero };
            items.push((AffineGenerator::linear(format!("generator/{name}"), l), claim));
        }
        let mut acts: Vec<(SymmetryAction, Expectation, Option<usize>)> = items
            .iter()
            .map(|(gen, e)| Ok((self.affine_action(v.tag, gen, None)?, *e, None)))
            .collect::<Result<Vec<_>>>()?;
        for (k, u) in self.unimodular_samples(samples).into_iter().enumerate() {
            let preserves = &(&u * g) * &u.transpose() == *g;
            let claim = if !v.tag.is_metric() || preserves { Expectation::Zero } else { Expectation::Nonzero };
            acts.push((self.linear_substitution(format!("finite/{:02} {}", k + 1, matrix_text(&u)), u), claim, None));
        }
        self.run(v, CheckKind::Sl4, acts)
    }

    /// Any single check by kind.
    pub fn check(&self, kind: CheckKind, v: &VacuumState, samples: usize) -> Result<Vec<InvarianceReport>> {
        match kind {
            CheckKind::Poincare => self.check_poincare(v),
            CheckKind::ShearDilation => self.check_shear_dilation(v),
            CheckKind::Discrete => self.check_discrete(v),
            CheckKind::Sl4 => self.sl4_invariance(v, samples),
            CheckKind::Parity => self.check_parity(v),
        }
    }

    /// Exact Clifford/Kähler identities of the γ-representation.
    pub fn clifford_report(&self) -> CliffordReport {
        let rep = &self.rep;
        let id = rep.identity();
        let mut pairs = 0;
        let mut anticommutators_ok = true;
        for mu in 0..DIM {
            for nu in mu..DIM {
                pairs += 1;
                let expect = id.scale(&(self.g.get(mu, nu) * &Scalar::from_i64(2)));
                anticommutators_ok &= rep.gamma(mu).anticommutator(rep.gamma(nu)) == expect;
            }
        }
        let g5 = rep.gamma5();
        let gamma5_square_is_minus_one = g5 * g5 == id.scale(&Scalar::from_i64(-1));
        let gamma5_traceless = g5.trace().is_zero();
        let gamma5_anticommutes = rep.gammas().iter().all(|g| g5.anticommutator(g).is_zero());
        let spin_identity: Vec<bool> = rotation_basis(self.g.matrix())
            .iter()
            .map(|w| {
                let s = rep.spin(w);
                (0..DIM).all(|lambda| {
                    let mut expect = Matrix::zeros(rep.dim(), rep.dim());
                    for nu in 0..DIM {
                        expect = &expect - &rep.gamma(nu).scale(w.get(lambda, nu));
                    }
                    s.commutator(rep.gamma(lambda)) == expect
                })
            })
            .collect();
        let spin_commutes_with_gamma5 =
            rotation_basis(self.g.matrix()).iter().all(|w| rep.spin(w).commutator(g5).is_zero());
        let projector_ranks = [rep.chiral_projector(true).rank(), rep.chiral_projector(false).rank()];
        let pass = anticommutators_ok
            && gamma5_square_is_minus_one
            && gamma5_traceless
            && gamma5_anticommutes
            && spin_identity.iter().all(|b| *b)
            && spin_commutes_with_gamma5
            && projector_ranks == [8, 8];
        CliffordReport {
            carrier_forms: rep.dim(),
            index_pairs: pairs,
            anticommutators_ok,
            gamma5_square_is_minus_one,
            gamma5_traceless,
            gamma5_anticommutes,
            spin_identity,
            spin_commutes_with_gamma5,
            projector_ranks,
            pass,
            seed: self.seed,
        }
    }

    /// Factor and subfactor swaps over `count` seeded random two-factor words
    /// and over the dipole's factors.
    pub fn parastatistics(&self, count: usize) -> ParastatisticsReport {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x5057_4150);
        let mut report = ParastatisticsReport { seed: self.seed, words: 0, ..Default::default() };
        while report.words < count {
            let a = random_payload(&mut rng, 3);
            let b = random_payload(&mut rng, 3);
            let x = wedge(&unitize(&a), &unitize(&b));
            let Some((w, _)) = x.single_term() else { continue };
            let w = w.clone();
            report.words += 1;
            let minus_w = Extensor::from_word(w.clone(), Scalar::from_i64(-1));
            if swap_factors(&w, 0, 1).ok().as_ref() == Some(&minus_w) {
                report.factor_swaps_negated += 1;
            } else {
                report.failures.push(format!("factor swap of {w}"));
            }
            let ga = w.labels()[0].payload().map_or(0, Word::grade);
            let gb = w.labels()[1].payload().map_or(0, Word::grade);
            let pa = (0, rng.gen_range(0..ga));
            let pb = (1, rng.gen_range(0..gb));
            if subfactor_swap_is_degenerate(&w, pa, pb).unwrap_or(true) {
                report.degenerate.push(format!("{w} @ {pa:?}<->{pb:?}"));
                continue;
            }
            report.subfactor_swaps += 1;
            let input = Extensor::from_word(w.clone(), Scalar::one());
            match swap_subfactors(&w, pa, pb) {
                Ok(r) if !r.is_zero() && r.ratio_to(&input).is_none() => report.subfactor_independent += 1,
                _ => report.failures.push(format!("subfactor swap of {w} @ {pa:?}<->{pb:?}")),
            }
        }
        if let Ok(dip) = crate::vacua::dipole_vacuum(crate::vacua::DSector::Abstract) {
            let (w, _) = dip.element.single_term().expect("single word");
            let minus = Extensor::from_word(w.clone(), Scalar::from_i64(-1));
            for i in 0..DIM {
                for j in i + 1..DIM {
                    report.vacuum_factor_swaps += 1;
                    if swap_factors(w, i, j).ok().as_ref() != Some(&minus) {
                        report.failures.push(format!("dipole factor swap ({i} {j})"));
                    }
                }
            }
        }
        report.pass = report.failures.is_empty()
            && report.factor_swaps_negated == report.words
            && report.subfactor_independent == report.subfactor_swaps;
        report
    }

    /// Network, link and point numbers on `count` seeded random words,
    /// compared against the depth-grade bookkeeping.
    pub fn number_operators(&self, count: usize) -> NumberReport {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x4e55_4d42);
        let mut samples = Vec::new();
        let mut mismatches = Vec::new();
        while samples.len() < count {
            let x = random_network(&mut rng);
            let Some((w, _)) = x.single_term() else { continue };
            let w = w.clone();
            let counts = [NumberKind::Network, NumberKind::Link, NumberKind::Point].map(|k| {
                let n = number_eigenvalue(k, &w);
                let diag = number_operator(k, &Extensor::from_word(w.clone(), Scalar::one()));
                let ok = diag == Extensor::from_word(w.clone(), Scalar::from_i64(n as i64))
                    || (n == 0 && diag.is_zero());
                (n, ok)
            });
            let grades = depth_grades(&w);
            let links = w.labels().iter().filter(|l| l.payload().is_some()).count();
            let expect = [grades[0], links, grades.get(1).copied().unwrap_or(0)];
            if counts.iter().zip(expect).any(|((n, ok), e)| !ok || *n != e) {
                mismatches.push(w.to_string());
            }
            samples.push(NumberSample { word: w.to_string(), network: counts[0].0, link: counts[1].0, point: counts[2].0 });
        }
        NumberReport { seed: self.seed, words: samples.len(), pass: mismatches.is_empty(), mismatches, samples }
    }
}

/// Random word of 1 to `max` distinct point labels from a pool of 6.
fn random_payload(rng: &mut ChaCha8Rng, max: usize) -> Extensor {
    let n = rng.gen_range(1..=max);
    let mut keys: Vec<i32> = (0..6).collect();
    for i in 0..n {
        let j = rng.gen_range(i..keys.len());
        keys.swap(i, j);
    }
    Extensor::from_labels(keys[..n].iter().map(|&k| point(sectors::POINT, k)).collect(), Scalar::one())
}

/// Random network word: bare points, links, and links holding nested links.
pub fn random_network(rng: &mut ChaCha8Rng) -> Extensor {
    let mut acc = Extensor::unit();
    for _ in 0..rng.gen_range(0..=2) {
        acc = wedge(&acc, &Extensor::from_label(point(sectors::POINT, rng.gen_range(10..16))));
    }
    for _ in 0..rng.gen_range(1..=3) {
        let mut payload = random_payload(rng, 3);
        if rng.gen_bool(0.3) {
            payload = wedge(&payload, &unitize(&random_payload(rng, 2)));
        }
        acc = wedge(&acc, &unitize(&payload));
    }
    acc
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ParastatisticsReport {
    pub seed: u64,
    pub words: usize,
    pub factor_swaps_negated: usize,
    pub subfactor_swaps: usize,
    pub subfactor_independent: usize,
    pub vacuum_factor_swaps: usize,
    pub degenerate: Vec<String>,
    pub failures: Vec<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NumberSample {
    pub word: String,
    pub network: usize,
    pub link: usize,
    pub point: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NumberReport {
    pub seed: u64,
    pub words: usize,
    pub mismatches: Vec<String>,
    pub pass: bool,
    pub samples: Vec<NumberSample>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliffordReport {
    pub carrier_forms: usize,
    pub index_pairs: usize,
    pub anticommutators_ok: bool,
    pub gamma5_square_is_minus_one: bool,
    pub gamma5_traceless: bool,
    pub gamma5_anticommutes: bool,
    pub spin_identity: Vec<bool>,
    pub spin_commutes_with_gamma5: bool,
    pub projector_ranks: [usize; 2],
    pub pass: bool,
    pub seed: u64,
}

/// Conjugacy classes of S₄ by cycle type, with class sizes.
const CLASSES: [(&str, usize); 5] = [("1", 1), ("(12)", 6), ("(12)(34)", 3), ("(123)", 8), ("(1234)", 6)];

/// Irreducible characters of S₄ on [`CLASSES`].
const CHARACTERS: [(&str, [i64; 5]); 5] = [
    ("trivial", [1, 1, 1, 1, 1]),
    ("sign", [1, -1, 1, 1, -1]),
    ("two", [2, 0, 2, -1, 0]),
    ("standard", [3, 1, -1, 0, -1]),
    ("standard-sign", [3, -1, -1, 0, 1]),
];

fn cycle_class(p: &[usize; DIM]) -> usize {
    let mut seen = [false; DIM];
    let mut lens = Vec::new();
    for s in 0..DIM {
        if seen[s] {
            continue;
        }
        let (mut x, mut len) = (s, 0);
        while !seen[x] {
            seen[x] = true;
            x = p[x];
            len += 1;
        }
        lens.push(len);
    }
    lens.sort_unstable();
    match lens.as_slice() {
        [1, 1, 1, 1] => 0,
        [1, 1, 2] => 1,
        [2, 2] => 2,
        [1, 3] => 3,
        _ => 4,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Isotypic {
    pub irrep: String,
    pub multiplicity: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectorDecomposition {
    pub sector: String,
    pub dim: usize,
    pub character: Vec<i64>,
    pub isotypic: Vec<Isotypic>,
    pub commutant_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellReport {
    pub classes: Vec<String>,
    pub sectors: Vec<SectorDecomposition>,
    pub seed: u64,
}

/// The representation `π ↦ ρ(π)` on the ∂ sector (`perm_matrix`) or on
/// `∂∘∂` monomials (its tensor square).
pub fn sector_representation(p: &[usize; DIM], square: bool) -> Matrix {
    let u = permutation_matrix(p);
    if !square {
        return u;
    }
    Matrix::from_fn(DIM * DIM, DIM * DIM, |r, c| u.get(r / DIM, c / DIM) * u.get(r % DIM, c % DIM))
}

fn decompose_sector(name: &str, square: bool) -> SectorDecomposition {
    let perms = permutations();
    let reps: Vec<(usize, Matrix)> = perms.iter().map(|p| (cycle_class(p), sector_representation(p, square))).collect();
    let dim = reps[0].1.rows();
    let mut character = vec![0i64; CLASSES.len()];
    for (c, m) in &reps {
        character[*c] = m.trace().as_i64().expect("integer trace");
    }
    let mut isotypic = Vec::new();
    let mut commutant_dim = 0;
    for (irrep, chi) in CHARACTERS {
        // P_χ = (χ(1)/|G|) Σ_g χ(g) ρ(g); its rank is the isotypic dimension.
        let mut proj = Matrix::zeros(dim, dim);
        for (c, m) in &reps {
            proj = &proj + &m.scale(&Scalar::from_i64(chi[*c]));
        }
        let proj = proj.scale(&Scalar::ratio(chi[0], perms.len() as i64));
        let d = proj.rank();
        if d > 0 {
            let mult = d / chi[0] as usize;
            commutant_dim += mult * mult;
            isotypic.push(Isotypic { irrep: irrep.to_string(), multiplicity: mult, dim: d });
        }
    }
    SectorDecomposition { sector: name.to_string(), dim, character, isotypic, commutant_dim }
}

/// Isotypic decomposition and commutant dimension of the S₄ cell action on
/// the ∂ sector and on the `∂∘∂` monomials.
pub fn cell_rep_report(seed: u64) -> CellReport {
    let (a, b) = exec::join(|| decompose_sector("∂", false), || decompose_sector("∂∘∂", true));
    CellReport { classes: CLASSES.iter().map(|(n, _)| n.to_string()).collect(), sectors: vec![a, b], seed }
}

/// Matrix `C` of `Σ C^{αβ} ιι(∂_α∘∂_β)` for an abstract two-level residual.
pub fn partial_pair_coefficients(x: &Extensor) -> Result<Matrix> {
    let mut m = Matrix::zeros(DIM, DIM);
    for (w, c) in x.terms() {
        let bad = || Error::WrongGrade(format!("`{w}` is not a doubly unitized ∂∘∂ monomial"));
        let inner = w.labels().first().and_then(Label::payload).and_then(|p| p.labels().first()).and_then(Label::payload);
        let atom = inner.and_then(|p| p.labels().first()).and_then(Label::atom).ok_or_else(bad)?;
        if w.grade() != 1 || atom.sector.name() != sectors::PARTIAL || atom.key.len() != 2 {
            return Err(bad());
        }
        m.set(atom.key[0] as usize, atom.key[1] as usize, c.clone());
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vacua::{dalembertian_vacuum, dipole_vacuum, dirac_vacuum, left_handed_vacuum, DSector};
    use crate::Tower;

    fn checker() -> Checker {
        Checker::new(&MetricForm::null_form(), 7)
    }

    #[test]
    fn translation_and_rotation_on_dalembertian() {
        let c = checker();
        let v = dalembertian_vacuum(c.metric(), DSector::Abstract).unwrap();
        let reports = c.check_poincare(&v).unwrap();
        assert_eq!(reports.len(), 10);
        assert!(reports.iter().all(|r| r.residual_zero && r.pass));
    }

    #[test]
    fn dilation_gives_twice_the_metric() {
        let c = checker();
        let v = dalembertian_vacuum(c.metric(), DSector::Abstract).unwrap();
        let a = c.affine_action(v.tag, &AffineGenerator::linear("d".into(), Matrix::identity(4)), None).unwrap();
        let r = residual(&v, &a).unwrap();
        let m = partial_pair_coefficients(&r).unwrap();
        assert_eq!(m, c.metric().matrix().scale(&Scalar::from_i64(2)));
    }

    #[test]
    fn dipole_signs_and_dalembertian_permutations() {
        let c = checker();
        let dip = dipole_vacuum(DSector::Abstract).unwrap();
        let rs = c.check_discrete(&dip).unwrap();
        assert_eq!(rs.len(), 24);
        assert!(rs.iter().all(|r| r.pass), "{:?}", rs.iter().find(|r| !r.pass));
        let dal = dalembertian_vacuum(c.metric(), DSector::Abstract).unwrap();
        assert!(c.check_discrete(&dal).unwrap().iter().all(|r| r.residual_zero));
    }

    #[test]
    fn spinor_vacua_poincare() {
        let c = checker();
        let dir = dirac_vacuum(c.rep(), DSector::Abstract).unwrap();
        let left = left_handed_vacuum(c.rep(), Tower::QiSqrt3, DSector::Abstract).unwrap();
        for v in [dir, left] {
            let rs = c.check_poincare(&v).unwrap();
            assert!(rs.iter().all(|r| r.residual_zero), "{:?}", rs.iter().find(|r| !r.residual_zero));
            let sd = c.check_shear_dilation(&v).unwrap();
            assert!(sd.iter().all(|r| !r.residual_zero));
        }
    }

    #[test]
    fn sl4_on_dipole() {
        let c = checker();
        let dip = dipole_vacuum(DSector::Abstract).unwrap();
        let rs = c.sl4_invariance(&dip, 5).unwrap();
        assert_eq!(rs.len(), 20);
        assert!(rs.iter().all(|r| r.residual_zero));
        let diag = Matrix::from_fn(4, 4, |i, j| match (i, j) {
            (0, 0) => Scalar::from_i64(2),
            (3, 3) => Scalar::ratio(1, 2),
            _ if i == j => Scalar::one(),
            _ => Scalar::zero(),
        });
        let a = c.linear_substitution("diag".into(), diag);
        assert!(residual(&dip, &a).unwrap().is_zero());
        let dal = dalembertian_vacuum(c.metric(), DSector::Abstract).unwrap();
        let a = c.linear_substitution("E12".into(), elementary(0, 1, 1));
        assert!(!residual(&dal, &a).unwrap().is_zero());
    }

    #[test]
    fn unimodular_samples_are_unimodular_and_seeded() {
        let c = checker();
        let a = c.unimodular_samples(10);
        assert_eq!(a, c.unimodular_samples(10));
        assert!(a.iter().all(|m| m.det().unwrap().is_one()));
    }

    #[test]
    fn intertwiner_dimensions() {
        let c = checker();
        let p = [0, 1, 3, 2];
        assert_eq!(c.parity_intertwiner(VacuumTag::Dirac, &p).unwrap(), 16);
        assert_eq!(c.parity_intertwiner(VacuumTag::Left, &p).unwrap(), 0);
        assert!(matches!(c.parity_intertwiner(VacuumTag::Dirac, &[0, 1, 2, 3]), Err(Error::EvenPermutation)));
        assert!(c.intertwiner_dim(VacuumTag::Left, &[1, 2, 0, 3]).unwrap() > 0);
    }

    #[test]
    fn statistics_and_numbers() {
        let c = checker();
        let p = c.parastatistics(30);
        assert!(p.pass, "{:?}", p.failures);
        assert_eq!(p.words, 30);
        assert!(c.number_operators(20).pass);
    }

    #[test]
    fn cell_decomposition() {
        let r = cell_rep_report(0);
        let d = &r.sectors[0];
        assert_eq!(d.character[1], 2);
        assert_eq!(d.isotypic.iter().map(|i| i.dim).collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(d.commutant_dim, 2);
        assert_eq!(r.sectors[1].commutant_dim, 15);
    }

    #[test]
    fn clifford_identities() {
        assert!(checker().clifford_report().pass);
    }
}
