//! Elements of 𝓛(A,U) = A⊗ℚ[t,t⁻¹] ⊕ U⊗ℚ[t,t⁻¹] ⊕ ℚK and the super-bracket
//!
//! ```text
//! [a(m), b(n)]  = ½(m−n)(ab)(m+n−1) + C(m,3)⟨a,b⟩ δ_{m+n,2} K
//! [a(m), u(n)]  = ¼(m−2n)(au)(m+n−1)
//! [u(m), v(n)]₊ = (u∘v)(m+n) + ½m(m−1)⟨u,v⟩ δ_{m+n,1} K
//! ```
//!
//! where x(m) stands for x⊗tᵐ.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::algebra_data::AlgebraDatum;
use crate::error::{Error, Result};
use crate::scalar::{binomial, format_scalar, frac, sign, HalfInt, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn bit(self) -> u8 {
        self as u8
    }

    pub fn from_bit(bit: u8) -> Parity {
        if bit.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// A generator mode x(m) = x⊗tᵐ for a basis vector x of A (even) or U (odd).
///
/// The derived order (mode, then even before odd, then index) is the normal
/// order used for PBW words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeSymbol {
    pub mode: i64,
    pub kind: Parity,
    pub index: usize,
}

impl ModeSymbol {
    pub fn even(index: usize, mode: i64) -> Self {
        ModeSymbol { mode, kind: Parity::Even, index }
    }

    pub fn odd(index: usize, mode: i64) -> Self {
        ModeSymbol { mode, kind: Parity::Odd, index }
    }

    pub fn is_odd(self) -> bool {
        self.kind.is_odd()
    }

    /// deg a(m) = 1 − m, deg u(m) = ½ − m.
    pub fn degree(self) -> HalfInt {
        match self.kind {
            Parity::Even => HalfInt::from_twice(2 - 2 * self.mode),
            Parity::Odd => HalfInt::from_twice(1 - 2 * self.mode),
        }
    }

    pub fn with_mode(self, mode: i64) -> Self {
        ModeSymbol { mode, ..self }
    }
}

impl fmt::Display for ModeSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = if self.is_odd() { 'f' } else { 'e' };
        write!(f, "{letter}{}({})", self.index, self.mode)
    }
}

impl Serialize for ModeSymbol {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeTuple;
        let mut t = s.serialize_tuple(3)?;
        t.serialize_element(&self.kind)?;
        t.serialize_element(&self.index)?;
        t.serialize_element(&self.mode)?;
        t.end()
    }
}

/// A finite combination of generator modes plus a multiple of K.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoopElement {
    terms: BTreeMap<ModeSymbol, Scalar>,
    k_coeff: Scalar,
}

impl LoopElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn symbol(s: ModeSymbol) -> Self {
        Self::term(s, Scalar::from_integer(1.into()))
    }

    pub fn term(s: ModeSymbol, c: Scalar) -> Self {
        let mut e = Self::zero();
        e.add_term(s, c);
        e
    }

    pub fn central(c: Scalar) -> Self {
        LoopElement { terms: BTreeMap::new(), k_coeff: c }
    }

    /// Σ coords[i]·x_i(mode) for the A-basis (even) or U-basis (odd).
    pub fn from_coords(kind: Parity, coords: &[Scalar], mode: i64) -> Self {
        let mut e = Self::zero();
        for (index, c) in coords.iter().enumerate() {
            e.add_term(ModeSymbol { mode, kind, index }, c.clone());
        }
        e
    }

    pub fn add_term(&mut self, s: ModeSymbol, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(s).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&s);
        }
    }

    pub fn add_k(&mut self, c: Scalar) {
        self.k_coeff += c;
    }

    pub fn add_scaled(&mut self, other: &LoopElement, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (s, x) in &other.terms {
            self.add_term(*s, x * c);
        }
        self.k_coeff += &other.k_coeff * c;
    }

    pub fn scaled(&self, c: &Scalar) -> LoopElement {
        let mut out = LoopElement::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ModeSymbol, &Scalar)> {
        self.terms.iter()
    }

    pub fn k_coeff(&self) -> &Scalar {
        &self.k_coeff
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.k_coeff.is_zero()
    }

    /// ℤ₂-parity, or `None` for a mixed element. Zero and K are even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|s| s.kind);
        match it.next() {
            None => Some(Parity::Even),
            Some(p) => {
                if it.all(|q| q == p) && (p == Parity::Even || self.k_coeff.is_zero()) {
                    Some(p)
                } else {
                    None
                }
            }
        }
    }

    /// Degree of a homogeneous element, `None` for zero or mixed degree. K has
    /// degree 0.
    pub fn degree(&self) -> Option<HalfInt> {
        let mut degrees = self.terms.keys().map(|s| s.degree());
        if !self.k_coeff.is_zero() {
            let rest: Vec<_> = degrees.collect();
            return rest.iter().all(|d| *d == HalfInt::ZERO).then_some(HalfInt::ZERO);
        }
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    fn split_by_parity(&self) -> [LoopElement; 2] {
        let mut even = LoopElement::central(self.k_coeff.clone());
        let mut odd = LoopElement::zero();
        for (s, c) in &self.terms {
            if s.is_odd() {
                odd.add_term(*s, c.clone());
            } else {
                even.add_term(*s, c.clone());
            }
        }
        [even, odd]
    }
}

impl Serialize for LoopElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(Serialize)]
        struct Term<'a> {
            symbol: &'a ModeSymbol,
            coeff: String,
        }
        let terms: Vec<Term> = self
            .terms
            .iter()
            .map(|(symbol, c)| Term { symbol, coeff: format_scalar(c) })
            .collect();
        let mut st = s.serialize_struct("LoopElement", 2)?;
        st.serialize_field("terms", &terms)?;
        st.serialize_field("k", &format_scalar(&self.k_coeff))?;
        st.end()
    }
}

impl fmt::Display for LoopElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> =
            self.terms.iter().map(|(s, c)| format!("{}·{s}", format_scalar(c))).collect();
        if !self.k_coeff.is_zero() {
            parts.push(format!("{}·K", format_scalar(&self.k_coeff)));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

fn check_symbol(d: &AlgebraDatum, s: ModeSymbol) -> Result<()> {
    let bound = if s.is_odd() { d.dim_u } else { d.dim_a };
    if s.index < bound {
        Ok(())
    } else {
        Err(Error::DatumMismatch(format!("{s} but dimension is {bound}")))
    }
}

fn check_element(d: &AlgebraDatum, x: &LoopElement) -> Result<()> {
    x.terms.keys().try_for_each(|s| check_symbol(d, *s))
}

/// The super-bracket of two generator modes. Indices are assumed in range.
pub fn bracket_symbols(d: &AlgebraDatum, x: ModeSymbol, y: ModeSymbol) -> LoopElement {
    let (m, n) = (x.mode, y.mode);
    match (x.kind, y.kind) {
        (Parity::Even, Parity::Even) => {
            let c = frac(m - n, 2);
            let mut out = LoopElement::from_coords(Parity::Even, &d.mul_a[x.index][y.index], m + n - 1)
                .scaled(&c);
            if m + n == 2 {
                out.add_k(Scalar::from_integer(binomial(m, 3)) * &d.form_a[x.index][y.index]);
            }
            out
        }
        (Parity::Even, Parity::Odd) => {
            LoopElement::from_coords(Parity::Odd, &d.act[x.index][y.index], m + n - 1)
                .scaled(&frac(m - 2 * n, 4))
        }
        (Parity::Odd, Parity::Even) => {
            LoopElement::from_coords(Parity::Odd, &d.act[y.index][x.index], m + n - 1)
                .scaled(&frac(-(n - 2 * m), 4))
        }
        (Parity::Odd, Parity::Odd) => {
            let mut out = LoopElement::from_coords(Parity::Even, &d.circ[x.index][y.index], m + n);
            if m + n == 1 {
                let c = Scalar::from_integer(BigInt::from(m * (m - 1))) / Scalar::from_integer(2.into());
                out.add_k(c * &d.form_u[x.index][y.index]);
            }
            out
        }
    }
}

/// Bilinear super-bracket. K is central; mixed-parity inputs are handled by
/// bilinearity over their homogeneous components.
pub fn bracket(d: &AlgebraDatum, x: &LoopElement, y: &LoopElement) -> Result<LoopElement> {
    check_element(d, x)?;
    check_element(d, y)?;
    let mut out = LoopElement::zero();
    for (sx, cx) in &x.terms {
        for (sy, cy) in &y.terms {
            out.add_scaled(&bracket_symbols(d, *sx, *sy), &(cx * cy));
        }
    }
    Ok(out)
}

/// [x,[y,z]] − (−1)^{|x||y|}[y,[x,z]] − [[x,y],z]; zero iff the super Jacobi
/// identity holds on the triple.
pub fn super_jacobi_residual(
    d: &AlgebraDatum,
    x: &LoopElement,
    y: &LoopElement,
    z: &LoopElement,
) -> Result<LoopElement> {
    let px = x.parity().ok_or(Error::NonHomogeneous)?;
    let py = y.parity().ok_or(Error::NonHomogeneous)?;
    z.parity().ok_or(Error::NonHomogeneous)?;
    let mut out = bracket(d, x, &bracket(d, y, z)?)?;
    out.add_scaled(&bracket(d, y, &bracket(d, x, z)?)?, &-sign(px.is_odd() && py.is_odd()));
    out.add_scaled(&bracket(d, &bracket(d, x, y)?, z)?, &Scalar::from_integer((-1).into()));
    Ok(out)
}

/// Skew-symmetry defect [x,y] + (−1)^{|x||y|}[y,x].
pub fn skew_residual(d: &AlgebraDatum, x: &LoopElement, y: &LoopElement) -> Result<LoopElement> {
    let mut out = LoopElement::zero();
    for xs in x.split_by_parity() {
        for ys in y.split_by_parity() {
            let (Some(px), Some(py)) = (xs.parity(), ys.parity()) else { continue };
            out.add_scaled(&bracket(d, &xs, &ys)?, &Scalar::from_integer(1.into()));
            out.add_scaled(&bracket(d, &ys, &xs)?, &sign(px.is_odd() && py.is_odd()));
        }
    }
    Ok(out)
}

pub const DEFAULT_WINDOW: i64 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JacobiWitness {
    pub symbols: [ModeSymbol; 3],
    pub residual: LoopElement,
}

fn generators(d: &AlgebraDatum) -> Vec<(Parity, usize)> {
    (0..d.dim_a)
        .map(|i| (Parity::Even, i))
        .chain((0..d.dim_u).map(|p| (Parity::Odd, p)))
        .collect()
}

/// Evaluates the super Jacobi residual on every triple of basis generators
/// with modes in `[-window, window]` and returns the nonzero ones.
pub fn jacobi_scan(d: &AlgebraDatum, window: i64) -> Result<Vec<JacobiWitness>> {
    d.check_shapes()?;
    let gens = generators(d);
    let modes: Vec<i64> = (-window..=window).collect();
    let mut pairs = Vec::new();
    for &g in &gens {
        for &m in &modes {
            pairs.push(ModeSymbol { mode: m, kind: g.0, index: g.1 });
        }
    }
    let found: Vec<JacobiWitness> = pairs
        .par_iter()
        .flat_map_iter(|&x| {
            let mut local = Vec::new();
            for &y in &pairs {
                for &z in &pairs {
                    let r = jacobi_symbols(d, x, y, z);
                    if !r.is_zero() {
                        local.push(JacobiWitness { symbols: [x, y, z], residual: r });
                    }
                }
            }
            local
        })
        .collect();
    Ok(found)
}

fn jacobi_symbols(d: &AlgebraDatum, x: ModeSymbol, y: ModeSymbol, z: ModeSymbol) -> LoopElement {
    let br = |a: ModeSymbol, e: &LoopElement| {
        let mut out = LoopElement::zero();
        for (s, c) in &e.terms {
            out.add_scaled(&bracket_symbols(d, a, *s), c);
        }
        out
    };
    let mut out = br(x, &bracket_symbols(d, y, z));
    out.add_scaled(&br(y, &bracket_symbols(d, x, z)), &-sign(x.is_odd() && y.is_odd()));
    let xy = bracket_symbols(d, x, y);
    for (s, c) in &xy.terms {
        out.add_scaled(&bracket_symbols(d, *s, z), &-c.clone());
    }
    out
}

/// Pairs of basis generators in the window whose bracket is not
/// super-antisymmetric.
pub fn skew_scan(d: &AlgebraDatum, window: i64) -> Result<Vec<(ModeSymbol, ModeSymbol, LoopElement)>> {
    d.check_shapes()?;
    let gens = generators(d);
    let mut out = Vec::new();
    for &(kx, ix) in &gens {
        for &(ky, iy) in &gens {
            for m in -window..=window {
                for n in -window..=window {
                    let x = ModeSymbol { mode: m, kind: kx, index: ix };
                    let y = ModeSymbol { mode: n, kind: ky, index: iy };
                    let mut r = bracket_symbols(d, x, y);
                    r.add_scaled(&bracket_symbols(d, y, x), &sign(x.is_odd() && y.is_odd()));
                    if !r.is_zero() {
                        out.push((x, y, r));
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_data::{build_ns, build_trunc_poly, AlgebraDatum};
    use crate::scalar::int;

    fn w(m: i64) -> LoopElement {
        LoopElement::symbol(ModeSymbol::even(0, m))
    }

    fn g(m: i64) -> LoopElement {
        LoopElement::symbol(ModeSymbol::odd(0, m))
    }

    #[test]
    fn ns_virasoro_bracket() {
        let d = build_ns();
        let r = bracket(&d, &w(4), &w(-2)).unwrap();
        let mut expect = LoopElement::term(ModeSymbol::even(0, 1), int(6));
        expect.add_k(int(2));
        assert_eq!(r, expect);
    }

    #[test]
    fn ns_odd_anticommutator() {
        let d = build_ns();
        let r = bracket(&d, &g(2), &g(-1)).unwrap();
        let mut expect = LoopElement::term(ModeSymbol::even(0, 1), int(2));
        expect.add_k(frac(2, 3));
        assert_eq!(r, expect);
    }

    #[test]
    fn k_is_central() {
        let d = build_ns();
        let k = LoopElement::central(int(1));
        assert!(bracket(&d, &w(3), &k).unwrap().is_zero());
        assert!(bracket(&d, &k, &g(-2)).unwrap().is_zero());
        assert!(super_jacobi_residual(&d, &k, &g(1), &w(0)).unwrap().is_zero());
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let d = build_ns();
        let bad = LoopElement::symbol(ModeSymbol::odd(3, 0));
        assert!(matches!(bracket(&d, &bad, &w(0)), Err(Error::DatumMismatch(_))));
    }

    #[test]
    fn ns_jacobi_samples() {
        let d = build_ns();
        assert!(super_jacobi_residual(&d, &w(1), &w(0), &w(-1)).unwrap().is_zero());
        assert!(super_jacobi_residual(&d, &w(0), &g(1), &g(-1)).unwrap().is_zero());
        let mixed = {
            let mut e = w(0);
            e.add_scaled(&g(0), &int(1));
            e
        };
        assert_eq!(super_jacobi_residual(&d, &mixed, &w(0), &w(0)), Err(Error::NonHomogeneous));
    }

    #[test]
    fn scans() {
        assert!(jacobi_scan(&build_ns(), 4).unwrap().is_empty());
        assert!(jacobi_scan(&AlgebraDatum::zero(1, 1), 4).unwrap().is_empty());
        assert!(skew_scan(&build_ns(), 4).unwrap().is_empty());
    }

    #[test]
    fn idempotent_perturbation_is_detected() {
        // x·x = x in ℚ[x]/(x²) leaves A associative but breaks the form and
        // the module structure; the scan must still see it.
        let mut d = build_trunc_poly(1, &[int(0), int(1)]).unwrap();
        d.mul_a[1][1][1] = int(1);
        assert!(!jacobi_scan(&d, 4).unwrap().is_empty());
    }

    #[test]
    fn grading_is_additive() {
        let d = build_ns();
        for m in -3..=3 {
            for n in -3..=3 {
                for (x, y) in [(w(m), w(n)), (w(m), g(n)), (g(m), g(n))] {
                    let b = bracket(&d, &x, &y).unwrap();
                    if let Some(deg) = b.degree() {
                        assert_eq!(deg, x.degree().unwrap() + y.degree().unwrap());
                    }
                }
            }
        }
    }
}
