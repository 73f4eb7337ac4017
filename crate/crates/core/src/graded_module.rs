//! Degree-truncated PBW models of the vacuum module V(ℓ,0) and the
//! generalized Verma module M(ℓ,λ).
//!
//! A state is a combination of normal-ordered words of creation modes applied
//! to the lowest-weight vector. Any generator mode acts by commuting it to the
//! right through the word with the loop bracket (K acting as ℓ) until it hits
//! the lowest-weight vector.

use std::collections::BTreeMap;
use std::fmt;

use dashmap::DashMap;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::algebra_data::AlgebraDatum;
use crate::error::{Error, Result};
use crate::loop_algebra::{bracket_symbols, LoopElement, ModeSymbol, Parity};
use crate::scalar::{format_scalar, frac, int, sign, HalfInt, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ModuleKind {
    /// V(ℓ,0), created by modes m ≤ −1.
    VacuumV,
    /// M(ℓ,λ), created by modes m ≤ 0.
    VermaM,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleConfig {
    pub datum: AlgebraDatum,
    pub ell: Scalar,
    pub lambda: Vec<Scalar>,
    pub kind: ModuleKind,
    pub max_degree: HalfInt,
}

impl ModuleConfig {
    pub fn new(
        datum: AlgebraDatum,
        ell: Scalar,
        lambda: Vec<Scalar>,
        kind: ModuleKind,
        max_degree: HalfInt,
    ) -> Result<Self> {
        datum.check_shapes()?;
        if lambda.len() != datum.dim_a {
            return Err(Error::DimensionMismatch(format!(
                "lambda has length {} but dim_a is {}",
                lambda.len(),
                datum.dim_a
            )));
        }
        if kind == ModuleKind::VacuumV && lambda.iter().any(|x| !x.is_zero()) {
            return Err(Error::InvalidConfig("the vacuum module requires lambda = 0".into()));
        }
        if max_degree < HalfInt::ZERO {
            return Err(Error::InvalidConfig(format!("max_degree {max_degree} is negative")));
        }
        Ok(ModuleConfig { datum, ell, lambda, kind, max_degree })
    }

    pub fn vacuum(datum: AlgebraDatum, ell: Scalar, max_degree: HalfInt) -> Result<Self> {
        let lambda = vec![Scalar::zero(); datum.dim_a];
        Self::new(datum, ell, lambda, ModuleKind::VacuumV, max_degree)
    }

    pub fn verma(datum: AlgebraDatum, ell: Scalar, lambda: Vec<Scalar>, max_degree: HalfInt) -> Result<Self> {
        Self::new(datum, ell, lambda, ModuleKind::VermaM, max_degree)
    }

    pub fn is_creation(&self, s: ModeSymbol) -> bool {
        match self.kind {
            ModuleKind::VacuumV => s.mode <= -1,
            ModuleKind::VermaM => s.mode <= 0,
        }
    }

    /// λ(ω), the L(0)-eigenvalue of the lowest-weight vector.
    pub fn lowest_weight(&self) -> Option<Scalar> {
        let omega = self.datum.omega()?;
        Some(omega.iter().zip(&self.lambda).map(|(a, b)| a * b).sum())
    }
}

/// A normal-ordered word of creation modes: modes ascending, even before odd,
/// index ascending, no odd symbol twice.
pub type Monomial = Vec<ModeSymbol>;

pub fn monomial_degree(word: &[ModeSymbol]) -> HalfInt {
    word.iter().fold(HalfInt::ZERO, |acc, s| acc + s.degree())
}

pub fn monomial_parity(word: &[ModeSymbol]) -> Parity {
    Parity::from_bit(word.iter().filter(|s| s.is_odd()).count() as u8)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModuleVector {
    entries: BTreeMap<Monomial, Scalar>,
}

impl ModuleVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn lowest() -> Self {
        Self::monomial(Vec::new())
    }

    pub fn monomial(word: Monomial) -> Self {
        Self::term(word, Scalar::one())
    }

    pub fn term(word: Monomial, c: Scalar) -> Self {
        let mut v = Self::zero();
        v.add_term(word, c);
        v
    }

    pub fn add_term(&mut self, word: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.entries.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &ModuleVector, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (w, x) in &other.entries {
            self.add_term(w.clone(), x * c);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> ModuleVector {
        let mut out = ModuleVector::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.entries.iter()
    }

    pub fn coeff(&self, word: &[ModeSymbol]) -> Scalar {
        self.entries.get(word).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Degree of a homogeneous nonzero vector.
    pub fn degree(&self) -> Option<HalfInt> {
        let mut it = self.entries.keys().map(|w| monomial_degree(w));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.entries.keys().map(|w| monomial_parity(w));
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    /// Drops every monomial above `max`; reports whether anything was dropped.
    pub fn truncate(&mut self, max: HalfInt) -> bool {
        let before = self.entries.len();
        self.entries.retain(|w, _| monomial_degree(w) <= max);
        before != self.entries.len()
    }

    /// Coordinates against an ordered basis. Monomials outside the basis are
    /// ignored.
    pub fn coords(&self, basis: &[Monomial]) -> Vec<Scalar> {
        basis.iter().map(|w| self.coeff(w)).collect()
    }

    pub fn from_coords(basis: &[Monomial], coords: &[Scalar]) -> Self {
        let mut v = Self::zero();
        for (w, c) in basis.iter().zip(coords) {
            v.add_term(w.clone(), c.clone());
        }
        v
    }
}

impl std::ops::AddAssign<&ModuleVector> for ModuleVector {
    fn add_assign(&mut self, rhs: &ModuleVector) {
        self.add_scaled(rhs, &Scalar::one());
    }
}

impl Serialize for ModuleVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            word: &'a Monomial,
            coeff: String,
        }
        let entries: Vec<Entry> =
            self.entries.iter().map(|(word, c)| Entry { word, coeff: format_scalar(c) }).collect();
        entries.serialize(s)
    }
}

impl fmt::Display for ModuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(w, c)| {
                let word: Vec<String> = w.iter().map(ToString::to_string).collect();
                format!("{}·{}|0>", format_scalar(c), word.join(""))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Result of a truncated action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Action {
    pub vector: ModuleVector,
    pub truncated: bool,
}

/// A module together with a memo table for the action of single modes on
/// single words. The table only ever holds exact results, so it is invisible
/// to callers.
pub struct GradedModule {
    cfg: ModuleConfig,
    cache: DashMap<(ModeSymbol, Monomial), ModuleVector>,
}

impl fmt::Debug for GradedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GradedModule").field("cfg", &self.cfg).finish_non_exhaustive()
    }
}

impl GradedModule {
    pub fn new(cfg: ModuleConfig) -> Self {
        GradedModule { cfg, cache: DashMap::new() }
    }

    pub fn config(&self) -> &ModuleConfig {
        &self.cfg
    }

    pub fn datum(&self) -> &AlgebraDatum {
        &self.cfg.datum
    }

    pub fn max_degree(&self) -> HalfInt {
        self.cfg.max_degree
    }

    pub fn lowest_weight_vector(&self) -> ModuleVector {
        ModuleVector::lowest()
    }

    fn check_symbol(&self, s: ModeSymbol) -> Result<()> {
        let bound = if s.is_odd() { self.cfg.datum.dim_u } else { self.cfg.datum.dim_a };
        if s.index < bound {
            Ok(())
        } else {
            Err(Error::DatumMismatch(format!("{s} but dimension is {bound}")))
        }
    }

    /// The action of `s` on `v`, truncated at the module's maximal degree.
    pub fn apply_mode(&self, s: ModeSymbol, v: &ModuleVector) -> Result<Action> {
        self.check_symbol(s)?;
        let mut vector = self.act(s, v);
        let truncated = vector.truncate(self.cfg.max_degree);
        Ok(Action { vector, truncated })
    }

    /// Exact action of a single mode, with no truncation.
    pub fn act(&self, s: ModeSymbol, v: &ModuleVector) -> ModuleVector {
        let mut out = ModuleVector::zero();
        for (w, c) in v.iter() {
            out.add_scaled(&self.act_word(s, w), c);
        }
        out
    }

    /// Exact action of a loop element, with K acting as ℓ.
    pub fn act_element(&self, x: &LoopElement, v: &ModuleVector) -> ModuleVector {
        let mut out = v.scaled(&(x.k_coeff() * &self.cfg.ell));
        for (s, c) in x.terms() {
            out.add_scaled(&self.act(*s, v), c);
        }
        out
    }

    /// Applies `word` right to left to `v`, i.e. s₁(s₂(⋯(s_k v))).
    pub fn act_word_on(&self, word: &[ModeSymbol], v: &ModuleVector) -> ModuleVector {
        word.iter().rev().fold(v.clone(), |acc, s| self.act(*s, &acc))
    }

    /// x(y·w) − (−1)^{|x||y|} y(x·w) − [x,y]·w, with K acting as ℓ.
    pub fn commutation_residual(&self, x: ModeSymbol, y: ModeSymbol, w: &ModuleVector) -> ModuleVector {
        let mut out = self.act(x, &self.act(y, w));
        out.add_scaled(&self.act(y, &self.act(x, w)), &-sign(x.is_odd() && y.is_odd()));
        out.add_scaled(&self.act_element(&bracket_symbols(&self.cfg.datum, x, y), w), &-Scalar::one());
        out
    }

    fn act_element_word(&self, x: &LoopElement, word: &[ModeSymbol]) -> ModuleVector {
        let mut out = ModuleVector::term(word.to_vec(), x.k_coeff() * &self.cfg.ell);
        for (s, c) in x.terms() {
            out.add_scaled(&self.act_word(*s, word), c);
        }
        out
    }

    fn act_word(&self, s: ModeSymbol, word: &[ModeSymbol]) -> ModuleVector {
        let creation = self.cfg.is_creation(s);
        let Some((&first, rest)) = word.split_first() else {
            if creation {
                return ModuleVector::monomial(vec![s]);
            }
            if self.cfg.kind == ModuleKind::VermaM && !s.is_odd() && s.mode == 1 {
                return ModuleVector::term(Vec::new(), self.cfg.lambda[s.index].clone());
            }
            return ModuleVector::zero();
        };
        if creation && (s < first || (s == first && !s.is_odd())) {
            let mut w = Vec::with_capacity(word.len() + 1);
            w.push(s);
            w.extend_from_slice(word);
            return ModuleVector::monomial(w);
        }
        let key = (s, word.to_vec());
        if let Some(hit) = self.cache.get(&key) {
            return hit.clone();
        }
        let d = &self.cfg.datum;
        let result = if s == first {
            // u(m)u(m) = ½[u(m),u(m)]₊
            self.act_element_word(&bracket_symbols(d, s, s), rest).scaled(&frac(1, 2))
        } else {
            let inner = self.act_word(s, rest);
            let mut out = self.act(first, &inner).scaled(&sign(s.is_odd() && first.is_odd()));
            out += &self.act_element_word(&bracket_symbols(d, s, first), rest);
            out
        };
        self.cache.insert(key, result.clone());
        result
    }

    fn creation_symbols_up_to(&self, d: HalfInt) -> Vec<ModeSymbol> {
        let datum = &self.cfg.datum;
        let top = match self.cfg.kind {
            ModuleKind::VacuumV => -1,
            ModuleKind::VermaM => 0,
        };
        let mut out = Vec::new();
        let mut m = top;
        loop {
            let even_ok = ModeSymbol::even(0, m).degree() <= d;
            let odd_ok = ModeSymbol::odd(0, m).degree() <= d;
            if !even_ok && !odd_ok {
                break;
            }
            if even_ok {
                out.extend((0..datum.dim_a).map(|i| ModeSymbol::even(i, m)));
            }
            if odd_ok {
                out.extend((0..datum.dim_u).map(|i| ModeSymbol::odd(i, m)));
            }
            m -= 1;
        }
        out.sort();
        out
    }

    fn check_degree(&self, d: HalfInt) -> Result<()> {
        if d < HalfInt::ZERO || d > self.cfg.max_degree {
            return Err(Error::DegreeOutOfRange { degree: d, max: self.cfg.max_degree });
        }
        Ok(())
    }

    /// All normal-ordered monomials of exact degree `d`, in ascending order.
    pub fn basis(&self, d: HalfInt) -> Result<Vec<Monomial>> {
        self.check_degree(d)?;
        let symbols = self.creation_symbols_up_to(d);
        let mut out = Vec::new();
        let mut word = Vec::new();
        enumerate(&symbols, 0, d.twice(), &mut word, &mut out);
        out.sort();
        Ok(out)
    }

    pub fn graded_dimension(&self, d: HalfInt) -> Result<usize> {
        Ok(self.basis(d)?.len())
    }

    /// The derivation D with D𝟏 = 0 and [D, x(n)] = −n·x(n−1), defined on the
    /// vacuum module only.
    pub fn translation_d(&self, v: &ModuleVector) -> Result<ModuleVector> {
        if self.cfg.kind != ModuleKind::VacuumV {
            return Err(Error::Unsupported("D is only defined on the vacuum module".into()));
        }
        let mut out = ModuleVector::zero();
        for (word, c) in v.iter() {
            for j in 0..word.len() {
                let s = word[j];
                if s.mode == 0 {
                    continue;
                }
                let mut w = word.clone();
                w[j] = s.with_mode(s.mode - 1);
                let image = self.act_word_on(&w, &ModuleVector::lowest());
                out.add_scaled(&image, &(c * int(-s.mode)));
            }
        }
        Ok(out)
    }
}

fn enumerate(
    symbols: &[ModeSymbol],
    start: usize,
    remaining: i64,
    word: &mut Vec<ModeSymbol>,
    out: &mut Vec<Monomial>,
) {
    if remaining == 0 {
        out.push(word.clone());
        return;
    }
    for i in start..symbols.len() {
        let s = symbols[i];
        let deg = s.degree().twice();
        if deg > remaining {
            continue;
        }
        word.push(s);
        let next = if s.is_odd() { i + 1 } else { i };
        enumerate(symbols, next, remaining - deg, word, out);
        word.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_data::build_ns;
    use crate::scalar::{frac, int};

    fn ns_vacuum(max: i64) -> GradedModule {
        GradedModule::new(ModuleConfig::vacuum(build_ns(), int(1), HalfInt::from_int(max)).unwrap())
    }

    fn w(m: i64) -> ModeSymbol {
        ModeSymbol::even(0, m)
    }

    fn g(m: i64) -> ModeSymbol {
        ModeSymbol::odd(0, m)
    }

    #[test]
    fn config_validation() {
        let d = build_ns();
        assert!(matches!(
            ModuleConfig::new(d.clone(), int(1), vec![int(1)], ModuleKind::VacuumV, HalfInt::ZERO),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            ModuleConfig::new(d.clone(), int(1), vec![], ModuleKind::VermaM, HalfInt::ZERO),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            ModuleConfig::vacuum(d, int(1), HalfInt::from_twice(-1)),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn vacuum_annihilators() {
        let m = ns_vacuum(4);
        let one = m.lowest_weight_vector();
        for n in 0..4 {
            assert!(m.apply_mode(w(n), &one).unwrap().vector.is_zero());
            assert!(m.apply_mode(g(n), &one).unwrap().vector.is_zero());
        }
    }

    #[test]
    fn verma_lowest_weight() {
        let h = frac(3, 7);
        let cfg = ModuleConfig::verma(build_ns(), int(2), vec![h.clone()], HalfInt::from_int(3)).unwrap();
        let m = GradedModule::new(cfg);
        let v = m.lowest_weight_vector();
        assert_eq!(m.act(w(1), &v), v.scaled(&h));
        assert!(m.act(g(1), &v).is_zero());
        assert!(m.act(w(2), &v).is_zero());
        assert_eq!(m.graded_dimension(HalfInt::from_int(1)).unwrap(), 1);
    }

    #[test]
    fn vacuum_pairings() {
        let ell = frac(5, 3);
        let m = GradedModule::new(ModuleConfig::vacuum(build_ns(), ell.clone(), HalfInt::from_int(4)).unwrap());
        let om = ModuleVector::monomial(vec![w(-1)]);
        assert_eq!(m.act(w(3), &om), ModuleVector::term(vec![], &ell / int(2)));
        let gv = ModuleVector::monomial(vec![g(-1)]);
        assert_eq!(m.act(g(2), &gv), ModuleVector::term(vec![], &ell * frac(2, 3)));
        assert_eq!(m.act(w(1), &om), om.scaled(&int(2)));
    }

    #[test]
    fn ns_vacuum_dimensions() {
        let m = ns_vacuum(6);
        let dims: Vec<usize> =
            HalfInt::from_int(6).steps_from_zero().map(|d| m.graded_dimension(d).unwrap()).collect();
        assert_eq!(dims, vec![1, 0, 0, 1, 1, 1, 1, 2, 3, 3, 3, 5, 7]);
        assert_eq!(m.basis(HalfInt::from_twice(3)).unwrap(), vec![vec![g(-1)]]);
        assert!(matches!(m.basis(HalfInt::from_int(7)), Err(Error::DegreeOutOfRange { .. })));
    }

    #[test]
    fn translation() {
        let m = ns_vacuum(5);
        let om = ModuleVector::monomial(vec![w(-1)]);
        assert_eq!(m.translation_d(&om).unwrap(), ModuleVector::monomial(vec![w(-2)]));
        assert!(m.translation_d(&ModuleVector::lowest()).unwrap().is_zero());
        let gv = ModuleVector::monomial(vec![g(-1)]);
        assert_eq!(m.translation_d(&gv).unwrap(), ModuleVector::monomial(vec![g(-2)]));
        assert_eq!(m.act(w(0), &gv), ModuleVector::monomial(vec![g(-2)]));

        let verma = GradedModule::new(ModuleConfig::verma(build_ns(), int(1), vec![int(0)], HalfInt::ZERO).unwrap());
        assert!(matches!(verma.translation_d(&ModuleVector::lowest()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn odd_square_resolves_through_circ() {
        let m = ns_vacuum(4);
        let gv = ModuleVector::monomial(vec![g(-1)]);
        // g(−1)g(−1) = ½(g∘g)(−2) = ω(−2)
        assert_eq!(m.act(g(-1), &gv), ModuleVector::monomial(vec![w(-2)]));
    }

    #[test]
    fn truncation_flag() {
        let m = ns_vacuum(2);
        let a = m.apply_mode(w(-2), &ModuleVector::monomial(vec![w(-1)])).unwrap();
        assert!(a.truncated);
        assert!(a.vector.is_zero());
        let b = m.apply_mode(w(-1), &ModuleVector::lowest()).unwrap();
        assert!(!b.truncated);
    }
}
