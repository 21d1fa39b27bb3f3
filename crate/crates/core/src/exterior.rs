//! Graded Grassmann/Clifford algebra over labeled spaces with formal duals.
//!
//! Basis labels are either primitive [`Atom`]s (a primal vector or its dual
//! in a named sector) or unitization nodes wrapping a lower-level basis word
//! (see [`crate::metatensor`]). Words are kept in normal form: labels strictly
//! increasing under the global order
//!
//! * atoms before nodes;
//! * atoms by sector name, then primal before dual, then key;
//! * nodes by their payload words, lexicographically.
//!
//! The Clifford product uses the Chevalley construction on the exterior
//! algebra with the non-symmetric form `B(ω, v) = ω(v)`, `B(v, ω) = 0`. Its
//! symmetric part is the pairing norm `‖v ⊕ ω‖ = ω(v)`, and with this choice
//! a normal-form word is exactly the Clifford product of its labels taken in
//! order: primal labels act as creators, duals as annihilators, and
//! `|a⟩∨⟨b|` is the normal-ordered one-body operator.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use arrayvec::ArrayVec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sector names used by the built-in constructions.
pub mod sectors {
    /// Lattice point kets `|n¹,n²,n³,n⁴⟩`.
    pub const POINT: &str = "P";
    /// Abstract translation symbols and their operator monomials.
    pub const PARTIAL: &str = "∂";
    /// Dirac γ symbols.
    pub const GAMMA: &str = "γ";
    /// Chiral σ symbols.
    pub const SIGMA: &str = "σ";
    /// Auxiliary 4-space carrying the Kähler γ representation.
    pub const KAHLER: &str = "k";
}

/// Integer key identifying a label inside its sector.
pub type Key = ArrayVec<i32, 4>;

pub fn key(parts: &[i32]) -> Key {
    parts.iter().copied().collect()
}

/// Sector name; ordered by string.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sector(Arc<str>);

impl Sector {
    pub fn new(name: &str) -> Self {
        Sector(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A primitive basis label: primal vector or formal dual.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub sector: Sector,
    pub dual: bool,
    pub key: Key,
}

impl Atom {
    pub fn primal(sector: &str, k: &[i32]) -> Self {
        Atom { sector: Sector::new(sector), dual: false, key: key(k) }
    }

    pub fn dual_of(sector: &str, k: &[i32]) -> Self {
        Atom { sector: Sector::new(sector), dual: true, key: key(k) }
    }

    /// The same label on the other side of the pairing.
    pub fn flipped(&self) -> Self {
        Atom { sector: self.sector.clone(), dual: !self.dual, key: self.key.clone() }
    }

    /// `ω(v)` for `self = ω` dual and `v` primal, 0 otherwise.
    fn contracts(&self, v: &Atom) -> bool {
        self.dual && !v.dual && self.sector == v.sector && self.key == v.key
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |sep: &str, shift: i32| {
            self.key.iter().map(|k| (k + shift).to_string()).collect::<Vec<_>>().join(sep)
        };
        match self.sector.name() {
            sectors::POINT if self.dual => write!(f, "⟨{}|", join(",", 0)),
            sectors::POINT => write!(f, "|{}⟩", join(",", 0)),
            sectors::PARTIAL => {
                let s: Vec<String> = self.key.iter().map(|k| format!("∂{}", k + 1)).collect();
                write!(f, "{}{}", s.join("∘"), if self.dual { "†" } else { "" })
            }
            sectors::GAMMA | sectors::SIGMA => {
                write!(f, "{}{}{}", self.sector.name(), join(",", 1), if self.dual { "†" } else { "" })
            }
            name => write!(f, "{}{}{}", name, join(",", 0), if self.dual { "†" } else { "" }),
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A grade-1 basis label.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Atom(Atom),
    /// Unitization `ι(w)` of a lower-level basis word.
    Node(Arc<Word>),
}

impl Label {
    pub fn atom(&self) -> Option<&Atom> {
        match self {
            Label::Atom(a) => Some(a),
            Label::Node(_) => None,
        }
    }

    pub fn payload(&self) -> Option<&Word> {
        match self {
            Label::Node(w) => Some(w),
            Label::Atom(_) => None,
        }
    }

    /// Atoms are level 0; `ι(w)` sits one level above its payload.
    pub fn level(&self) -> usize {
        match self {
            Label::Atom(_) => 0,
            Label::Node(w) => w.level() + 1,
        }
    }

    pub fn is_dual(&self) -> bool {
        matches!(self, Label::Atom(a) if a.dual)
    }
}

impl From<Atom> for Label {
    fn from(a: Atom) -> Self {
        Label::Atom(a)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Atom(a) => write!(f, "{a}"),
            Label::Node(w) => write!(f, "ι({w})"),
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A normal-form Grassmann monomial: strictly increasing labels.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Label>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn single(l: Label) -> Self {
        Word(vec![l])
    }

    /// Sorts `labels` into normal form. Returns `None` for a repeated label,
    /// otherwise the word and the parity of the sorting permutation.
    pub fn normalize(mut labels: Vec<Label>) -> Option<(Word, i8)> {
        let mut sign = 1i8;
        // insertion sort: words are short
        for i in 1..labels.len() {
            let mut j = i;
            while j > 0 {
                match labels[j - 1].cmp(&labels[j]) {
                    std::cmp::Ordering::Greater => {
                        labels.swap(j - 1, j);
                        sign = -sign;
                        j -= 1;
                    }
                    std::cmp::Ordering::Equal => return None,
                    std::cmp::Ordering::Less => break,
                }
            }
        }
        Some((Word(labels), sign))
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn grade(&self) -> usize {
        self.0.len()
    }

    /// Highest label level in the word (0 for the unit word).
    pub fn level(&self) -> usize {
        self.0.iter().map(Label::level).max().unwrap_or(0)
    }

    pub fn has_dual(&self) -> bool {
        self.0.iter().any(Label::is_dual)
    }

    /// `self ∨ other` as a signed word.
    pub fn wedge(&self, other: &Word) -> Option<(Word, i8)> {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut inversions = 0usize;
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    // b[j] jumps over the remaining a's
                    inversions += a.len() - i;
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => return None,
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
        Some((Word(out), sign))
    }

    /// The word with position `j` removed and the sign `(−1)^j` of moving it
    /// to the front.
    pub fn remove_at(&self, j: usize) -> (Word, i8) {
        let mut v = self.0.clone();
        v.remove(j);
        (Word(v), if j.is_multiple_of(2) { 1 } else { -1 })
    }

    pub fn position(&self, l: &Label) -> Option<usize> {
        self.0.binary_search(l).ok()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (n, l) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str("∨")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Sparse graded element: normal-form words with nonzero coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Extensor {
    terms: BTreeMap<Word, Scalar>,
}

impl Extensor {
    pub fn zero() -> Self {
        Extensor::default()
    }

    /// The unit word with coefficient 1.
    pub fn unit() -> Self {
        Extensor::from_word(Word::unit(), Scalar::one())
    }

    pub fn scalar(s: Scalar) -> Self {
        Extensor::from_word(Word::unit(), s)
    }

    pub fn from_word(w: Word, c: Scalar) -> Self {
        let mut e = Extensor::zero();
        e.add_term(w, c);
        e
    }

    pub fn from_label(l: Label) -> Self {
        Extensor::from_word(Word::single(l), Scalar::one())
    }

    pub fn atom(a: Atom) -> Self {
        Extensor::from_label(Label::Atom(a))
    }

    /// Normalizes an arbitrary label sequence; zero on a repeated label.
    pub fn from_labels(labels: Vec<Label>, c: Scalar) -> Self {
        match Word::normalize(labels) {
            Some((w, s)) => Extensor::from_word(w, if s < 0 { -c } else { c }),
            None => Extensor::zero(),
        }
    }

    /// Adds `c·w`, dropping the entry if it cancels.
    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add_signed(&mut self, w: Word, c: &Scalar, sign: i8) {
        if sign < 0 {
            self.add_term(w, -c);
        } else {
            self.add_term(w, c.clone());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Word, Scalar)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Grades present, ascending.
    pub fn grades(&self) -> Vec<usize> {
        let mut g: Vec<usize> = self.terms.keys().map(Word::grade).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    /// `Some(g)` when every word has grade `g` (the zero element has none).
    pub fn homogeneous_grade(&self) -> Option<usize> {
        match self.grades().as_slice() {
            [g] => Some(*g),
            _ => None,
        }
    }

    /// Projection onto grade `g`.
    pub fn grade_part(&self, g: usize) -> Extensor {
        Extensor {
            terms: self.terms.iter().filter(|(w, _)| w.grade() == g).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    /// Highest level among the labels.
    pub fn level(&self) -> usize {
        self.terms.keys().map(Word::level).max().unwrap_or(0)
    }

    pub fn scale(&self, s: &Scalar) -> Extensor {
        if s.is_zero() {
            return Extensor::zero();
        }
        Extensor { terms: self.terms.iter().map(|(w, c)| (w.clone(), c * s)).collect() }
    }

    pub fn add(&self, other: &Extensor) -> Extensor {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Extensor) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Extensor, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c * s);
        }
    }

    pub fn sub(&self, other: &Extensor) -> Extensor {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Extensor {
        self.scale(&Scalar::from_i64(-1))
    }

    /// Sum of many extensors.
    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Extensor>) -> Extensor {
        let mut out = Extensor::zero();
        for e in items {
            out.add_assign(e);
        }
        out
    }

    /// Drops every word containing a dual label.
    pub fn primal_part(&self) -> Extensor {
        Extensor {
            terms: self.terms.iter().filter(|(w, _)| !w.has_dual()).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    /// Collects the distinct top-level labels in use.
    pub fn support_labels(&self) -> Vec<Label> {
        let mut v: Vec<Label> = self.terms.keys().flat_map(|w| w.labels().iter().cloned()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// The sole word when this is `c·w` for a single basis word.
    pub fn single_term(&self) -> Option<(&Word, &Scalar)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// `Some(s)` when `self = s·other` for a scalar `s` (both nonzero).
    pub fn ratio_to(&self, other: &Extensor) -> Option<Scalar> {
        if self.len() != other.len() || other.is_zero() {
            return None;
        }
        let (w0, c0) = other.terms.iter().next()?;
        let s = self.terms.get(w0)?.div(c0).ok()?;
        other.terms.iter().all(|(w, c)| self.terms.get(w) == Some(&(c * &s))).then_some(s)
    }
}

impl fmt::Display for Extensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (w, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write_term(f, w, c)?;
        }
        Ok(())
    }
}

pub(crate) fn write_term(f: &mut impl fmt::Write, w: &Word, c: &Scalar) -> fmt::Result {
    if w.grade() == 0 {
        write!(f, "{c}")
    } else if c.is_one() {
        write!(f, "{w}")
    } else if (-c).is_one() {
        write!(f, "-{w}")
    } else {
        write!(f, "{c}·{w}")
    }
}

/// Canonical text for one term, used for report witnesses.
pub fn term_string(w: &Word, c: &Scalar) -> String {
    let mut s = String::new();
    write_term(&mut s, w, c).expect("string write");
    s
}

impl fmt::Debug for Extensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A finite labeled space, optionally with formal duals adjoined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisSpace {
    sector: Sector,
    labels: Vec<Key>,
    duals: bool,
}

impl BasisSpace {
    pub fn new(sector: &str, labels: Vec<Key>, duals: bool) -> Result<Self> {
        let mut seen = labels.clone();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::SectorMismatch(format!("duplicate label in sector `{sector}`")));
        }
        Ok(BasisSpace { sector: Sector::new(sector), labels, duals })
    }

    /// Labels `0..n` as one-component keys.
    pub fn indexed(sector: &str, n: usize, duals: bool) -> Self {
        BasisSpace::new(sector, (0..n as i32).map(|i| key(&[i])).collect(), duals).expect("distinct labels")
    }

    pub fn sector(&self) -> &Sector {
        &self.sector
    }

    pub fn labels(&self) -> &[Key] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn has_duals(&self) -> bool {
        self.duals
    }

    fn check(&self, k: &[i32]) -> Result<Key> {
        let k = key(k);
        if self.labels.contains(&k) {
            Ok(k)
        } else {
            Err(Error::UnknownLabel { sector: self.sector.name().to_string(), label: format!("{k:?}") })
        }
    }

    pub fn ket(&self, k: &[i32]) -> Result<Atom> {
        Ok(Atom { sector: self.sector.clone(), dual: false, key: self.check(k)? })
    }

    pub fn bra(&self, k: &[i32]) -> Result<Atom> {
        if !self.duals {
            return Err(Error::SectorMismatch(format!("sector `{}` has no duals", self.sector.name())));
        }
        Ok(Atom { sector: self.sector.clone(), dual: true, key: self.check(k)? })
    }

    /// `|ket⟩ ∨ ⟨bra|` as a signed normal-form word.
    pub fn dyad(&self, ket: &[i32], bra: &[i32]) -> Result<Extensor> {
        Ok(dyad(&self.ket(ket)?, &self.bra(bra)?))
    }

    /// The Fock basis of the exterior algebra over the primal labels, by
    /// grade and then label order (`2^dim` words).
    pub fn fock_basis(&self) -> Vec<Word> {
        let n = self.labels.len();
        let mut words: Vec<Word> = (0u64..1 << n)
            .map(|mask| {
                let labels = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| Label::Atom(Atom { sector: self.sector.clone(), dual: false, key: self.labels[i].clone() }))
                    .collect();
                Word::normalize(labels).expect("distinct labels").0
            })
            .collect();
        words.sort_by(|a, b| a.grade().cmp(&b.grade()).then_with(|| a.cmp(b)));
        words
    }
}

/// Grassmann product, bilinear and graded-anticommutative.
pub fn wedge(a: &Extensor, b: &Extensor) -> Extensor {
    let mut out = Extensor::zero();
    for (wa, ca) in a.terms() {
        for (wb, cb) in b.terms() {
            if let Some((w, s)) = wa.wedge(wb) {
                out.add_signed(w, &(ca * cb), s);
            }
        }
    }
    out
}

/// `ω(v)` for a grade-1 primal `v` and a grade-1 dual `w`.
pub fn pairing(v: &Extensor, w: &Extensor) -> Result<Scalar> {
    let primal = grade_one_atoms(v, false, "first pairing argument must be grade-1 primal")?;
    let dual = grade_one_atoms(w, true, "second pairing argument must be grade-1 dual")?;
    let mut s = Scalar::zero();
    for (a, ca) in &primal {
        for (b, cb) in &dual {
            if b.contracts(a) {
                s += &(ca * cb);
            }
        }
    }
    Ok(s)
}

fn grade_one_atoms(x: &Extensor, dual: bool, msg: &str) -> Result<Vec<(Atom, Scalar)>> {
    x.terms()
        .map(|(w, c)| match w.labels() {
            [Label::Atom(a)] if a.dual == dual => Ok((a.clone(), c.clone())),
            _ => Err(Error::WrongGrade(msg.to_string())),
        })
        .collect()
}

/// Left Clifford action of a single label: `l ∘ x = l ∨ x + l ⌋ x`.
fn label_times(l: &Label, x: &Extensor, fock: bool) -> Extensor {
    let mut out = Extensor::zero();
    let single = Word::single(l.clone());
    for (w, c) in x.terms() {
        if !(fock && l.is_dual()) {
            if let Some((nw, s)) = single.wedge(w) {
                out.add_signed(nw, c, s);
            }
        }
        if let Label::Atom(a) = l {
            if a.dual {
                for (j, lj) in w.labels().iter().enumerate() {
                    if matches!(lj, Label::Atom(b) if a.contracts(b)) {
                        let (rest, s) = w.remove_at(j);
                        out.add_signed(rest, c, s);
                    }
                }
            }
        }
    }
    out
}

fn word_times(w: &Word, x: &Extensor, fock: bool) -> Extensor {
    // In normal form no label contracts with a later one, so a word is the
    // ordered Clifford product of its labels.
    let mut acc = x.clone();
    for l in w.labels().iter().rev() {
        acc = label_times(l, &acc, fock);
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// Clifford product over `V ⊕ V†`.
pub fn clifford_product(a: &Extensor, b: &Extensor) -> Extensor {
    let mut out = Extensor::zero();
    for (w, c) in a.terms() {
        out.add_scaled(&word_times(w, b, false), c);
    }
    out
}

/// Symmetric part of the Clifford form: `u∘v + v∘u` for grade-1 `u, v`.
pub fn anticommutator(a: &Extensor, b: &Extensor) -> Extensor {
    clifford_product(a, b).add(&clifford_product(b, a))
}

/// `|ket⟩ ∨ ⟨bra|`.
pub fn dyad(ket: &Atom, bra: &Atom) -> Extensor {
    Extensor::from_labels(vec![Label::Atom(ket.clone()), Label::Atom(bra.clone())], Scalar::one())
}

/// Fock action: operator elements act on primal-only states with primal
/// labels creating and duals annihilating.
pub fn apply_operator(op: &Extensor, target: &Extensor) -> Extensor {
    let mut out = Extensor::zero();
    for (w, c) in op.terms() {
        out.add_scaled(&word_times(w, target, true), c);
    }
    out.primal_part()
}

/// Reads a grade-2 word as a dyad `|ket⟩⟨bra|` with its sign.
pub fn as_dyad(w: &Word) -> Option<(&Atom, &Atom, i8)> {
    match w.labels() {
        [Label::Atom(x), Label::Atom(y)] if !x.dual && y.dual => Some((x, y, 1)),
        [Label::Atom(y), Label::Atom(x)] if y.dual && !x.dual => Some((x, y, -1)),
        _ => None,
    }
}

/// Composition of one-body operators (sums of dyads) as linear maps on kets.
///
/// This is the part of the Clifford product that survives on single-ket
/// states; the two-body words of the full product annihilate them.
pub fn operator_compose(a: &Extensor, b: &Extensor) -> Result<Extensor> {
    let split = |x: &Extensor| -> Result<Vec<(Atom, Atom, Scalar)>> {
        x.terms()
            .map(|(w, c)| {
                let (k, b, s) = as_dyad(w).ok_or_else(|| Error::WrongGrade(format!("`{w}` is not a dyad")))?;
                Ok((k.clone(), b.clone(), if s < 0 { -c } else { c.clone() }))
            })
            .collect()
    };
    let (da, db) = (split(a)?, split(b)?);
    let mut by_ket: BTreeMap<Atom, Vec<(Atom, Scalar)>> = BTreeMap::new();
    for (k, br, c) in db {
        by_ket.entry(k).or_default().push((br, c));
    }
    let mut out = Extensor::zero();
    for (k, br, c) in &da {
        if let Some(rest) = by_ket.get(&br.flipped()) {
            for (br2, c2) in rest {
                out.add_scaled(&dyad(k, br2), &(c * c2));
            }
        }
    }
    Ok(out)
}
