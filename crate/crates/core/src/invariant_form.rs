//! The invariant bilinear form, its radical and the graded characters of the
//! simple quotients.
//!
//! The pairing is contravariant for the anti-involution σ(a(n)) = a(2−n),
//! σ(u(n)) = u(1−n), σ(K) = K: ⟨s·x, y⟩ = ⟨x, σ(s)·y⟩ with ⟨v, v⟩ = 1 on the
//! lowest-weight vector. Odd adjoints carry no complex factor, so the values
//! stay rational. This changes individual entries but not ranks or kernels.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded_module::{monomial_degree, GradedModule, ModuleConfig, ModuleVector, Monomial};
use crate::linalg::{rank, right_kernel, rref, Matrix};
use crate::loop_algebra::ModeSymbol;
use crate::scalar::{format_scalar, HalfInt, Scalar};

/// σ on generator modes.
pub fn adjoint(s: ModeSymbol) -> ModeSymbol {
    if s.is_odd() {
        s.with_mode(1 - s.mode)
    } else {
        s.with_mode(2 - s.mode)
    }
}

fn pair_words(m: &GradedModule, x: &[ModeSymbol], y: &ModuleVector) -> Scalar {
    let mut cur = y.clone();
    for s in x {
        if cur.is_zero() {
            break;
        }
        cur = m.act(adjoint(*s), &cur);
    }
    cur.coeff(&[])
}

/// ⟨x, y⟩; components of unequal degree pair to zero.
pub fn pairing(m: &GradedModule, x: &ModuleVector, y: &ModuleVector) -> Scalar {
    let mut total = Scalar::zero();
    for (xw, a) in x.iter() {
        let dx = monomial_degree(xw);
        let mut same = ModuleVector::zero();
        for (yw, b) in y.iter() {
            if monomial_degree(yw) == dx {
                same.add_term(yw.clone(), b.clone());
            }
        }
        if !same.is_zero() {
            total += a * pair_words(m, xw, &same);
        }
    }
    total
}

/// As [`pairing`], but homogeneous inputs of different degree are an error.
pub fn pairing_strict(m: &GradedModule, x: &ModuleVector, y: &ModuleVector) -> Result<Scalar> {
    if let (Some(dx), Some(dy)) = (x.degree(), y.degree()) {
        if dx != dy {
            return Err(Error::DegreeMismatch(dx, dy));
        }
    }
    Ok(pairing(m, x, y))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    pub degree: HalfInt,
    pub basis: Vec<Monomial>,
    pub entries: Matrix,
}

impl GramMatrix {
    pub fn rank(&self) -> usize {
        rank(&self.entries)
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.entries.len();
        (0..n).all(|i| (0..i).all(|j| self.entries[i][j] == self.entries[j][i]))
    }
}

impl Serialize for GramMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let entries: Vec<Vec<String>> =
            self.entries.iter().map(|r| r.iter().map(format_scalar).collect()).collect();
        let mut st = s.serialize_struct("GramMatrix", 5)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("dim", &self.basis.len())?;
        st.serialize_field("rank", &self.rank())?;
        st.serialize_field("basis", &self.basis)?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

pub fn gram(m: &GradedModule, d: HalfInt) -> Result<GramMatrix> {
    let basis = m.basis(d)?;
    Ok(gram_on(m, d, basis))
}

/// The Gram matrix against a caller-chosen ordering of the degree-`d` basis.
pub fn gram_on(m: &GradedModule, d: HalfInt, basis: Vec<Monomial>) -> GramMatrix {
    let cols: Vec<ModuleVector> = basis.iter().map(|w| ModuleVector::monomial(w.clone())).collect();
    let entries: Matrix = basis
        .par_iter()
        .map(|x| cols.iter().map(|y| pair_words(m, x, y)).collect())
        .collect();
    GramMatrix { degree: d, basis, entries }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RadicalBasis {
    pub degree: HalfInt,
    pub vectors: Vec<ModuleVector>,
}

impl RadicalBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn coords(&self, basis: &[Monomial]) -> Matrix {
        self.vectors.iter().map(|v| v.coords(basis)).collect()
    }
}

pub fn radical_basis(m: &GradedModule, d: HalfInt) -> Result<RadicalBasis> {
    let g = gram(m, d)?;
    Ok(radical_of(&g))
}

pub fn radical_of(g: &GramMatrix) -> RadicalBasis {
    let vectors = right_kernel(&g.entries, g.basis.len())
        .iter()
        .map(|k| ModuleVector::from_coords(&g.basis, k))
        .collect();
    RadicalBasis { degree: g.degree, vectors }
}

/// Monomials whose images form a basis of the simple quotient in degree `d`.
pub fn quotient_representatives(g: &GramMatrix) -> Vec<Monomial> {
    let mut work = g.entries.clone();
    rref(&mut work).into_iter().map(|c| g.basis[c].clone()).collect()
}

fn lowering_symbols(m: &GradedModule, drop: HalfInt) -> Vec<ModeSymbol> {
    // Modes of degree −drop: even a(1+drop), odd u(½+drop).
    let d = m.datum();
    let t = drop.twice();
    if t % 2 == 0 {
        (0..d.dim_a).map(|i| ModeSymbol::even(i, 1 + t / 2)).collect()
    } else {
        (0..d.dim_u).map(|p| ModeSymbol::odd(p, (t + 1) / 2)).collect()
    }
}

/// The joint kernel of every word of lowering generator modes that maps the
/// degree-`d` space to the lowest-weight line. Built one degree at a time:
/// the functionals on degree e are those on lower degrees composed with a
/// single lowering mode.
pub fn brute_force_radical(m: &GradedModule, d: HalfInt) -> Result<RadicalBasis> {
    if d < HalfInt::ZERO || d > m.max_degree() {
        return Err(Error::DegreeOutOfRange { degree: d, max: m.max_degree() });
    }
    let mut functionals: Vec<(Vec<Monomial>, Matrix)> = Vec::new();
    for e in d.steps_from_zero() {
        let basis = m.basis(e)?;
        let rows = if e == HalfInt::ZERO {
            vec![vec![Scalar::from_integer(1.into())]]
        } else {
            let mut rows: Matrix = Vec::new();
            for (k, (lower_basis, lower_rows)) in functionals.iter().enumerate() {
                if lower_rows.is_empty() {
                    continue;
                }
                let drop = e - HalfInt::from_twice(k as i64);
                let images: Vec<Vec<Vec<Scalar>>> = lowering_symbols(m, drop)
                    .par_iter()
                    .map(|s| {
                        basis
                            .iter()
                            .map(|w| m.act(*s, &ModuleVector::monomial(w.clone())).coords(lower_basis))
                            .collect()
                    })
                    .collect();
                for image in &images {
                    for phi in lower_rows {
                        rows.push(
                            image
                                .iter()
                                .map(|col| phi.iter().zip(col).map(|(a, b)| a * b).sum())
                                .collect(),
                        );
                    }
                }
            }
            let r = rref(&mut rows).len();
            rows.truncate(r);
            rows
        };
        functionals.push((basis, rows));
    }
    let (basis, rows) = functionals.pop().expect("at least degree zero");
    let vectors =
        right_kernel(&rows, basis.len()).iter().map(|k| ModuleVector::from_coords(&basis, k)).collect();
    Ok(RadicalBasis { degree: d, vectors })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterEntry {
    pub degree: HalfInt,
    pub dim: usize,
    pub dim_radical: usize,
    pub dim_simple: usize,
}

pub fn character(m: &GradedModule, max_d: HalfInt) -> Result<Vec<CharacterEntry>> {
    if max_d > m.max_degree() {
        return Err(Error::DegreeOutOfRange { degree: max_d, max: m.max_degree() });
    }
    let degrees: Vec<HalfInt> = max_d.steps_from_zero().collect();
    degrees
        .par_iter()
        .map(|&d| {
            let g = gram(m, d)?;
            let dim = g.basis.len();
            let r = g.rank();
            Ok(CharacterEntry { degree: d, dim, dim_radical: dim - r, dim_simple: r })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdjointFailure {
    pub symbol: ModeSymbol,
    pub x: Monomial,
    pub y: Monomial,
    #[serde(serialize_with = "ser_scalar")]
    pub lhs: Scalar,
    #[serde(serialize_with = "ser_scalar")]
    pub rhs: Scalar,
}

fn ser_scalar<S: serde::Serializer>(x: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_scalar(x))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContragredientReport {
    pub adjoint_pairs_checked: usize,
    pub adjoint_failures: Vec<AdjointFailure>,
    pub eigenvalue_failures: Vec<usize>,
    pub asymmetric_degrees: Vec<HalfInt>,
}

impl ContragredientReport {
    pub fn passes(&self) -> bool {
        self.adjoint_failures.is_empty()
            && self.eigenvalue_failures.is_empty()
            && self.asymmetric_degrees.is_empty()
    }
}

/// Checks ⟨s·x, y⟩ = ⟨x, σ(s)·y⟩ for the given generator modes on basis
/// vectors of degree ≤ `top`.
pub fn adjoint_failures(m: &GradedModule, symbols: &[ModeSymbol], top: HalfInt) -> (usize, Vec<AdjointFailure>) {
    let top = top.min(m.max_degree());
    let bases: Vec<(HalfInt, Vec<Monomial>)> =
        top.steps_from_zero().map(|d| (d, m.basis(d).expect("degree in range"))).collect();
    let mut jobs = Vec::new();
    for &s in symbols {
        for (dx, bx) in &bases {
            let target = *dx + s.degree();
            let Some((_, by)) = bases.iter().find(|(dy, _)| *dy == target) else { continue };
            for x in bx {
                for y in by {
                    jobs.push((s, x.clone(), y.clone()));
                }
            }
        }
    }
    let failures = jobs
        .par_iter()
        .filter_map(|(s, x, y)| {
            let xv = ModuleVector::monomial(x.clone());
            let yv = ModuleVector::monomial(y.clone());
            let lhs = pairing(m, &m.act(*s, &xv), &yv);
            let rhs = pairing(m, &xv, &m.act(adjoint(*s), &yv));
            (lhs != rhs).then(|| AdjointFailure { symbol: *s, x: x.clone(), y: y.clone(), lhs, rhs })
        })
        .collect();
    (jobs.len(), failures)
}

/// For a Verma module: adjoint relation for even generators with modes in
/// [−2, 4] on degrees ≤ max_degree − 3, the a(1)-eigenvalue read through the
/// form, and symmetry of every Gram matrix up to max_degree.
pub fn contragredient_check(m: &GradedModule) -> Result<ContragredientReport> {
    let cfg = m.config();
    let d = m.datum();
    let symbols: Vec<ModeSymbol> =
        (0..d.dim_a).flat_map(|i| (-2..=4).map(move |n| ModeSymbol::even(i, n))).collect();
    let top = m.max_degree() - HalfInt::from_int(3);
    let (checked, failures) = if top >= HalfInt::ZERO {
        adjoint_failures(m, &symbols, top)
    } else {
        (0, Vec::new())
    };
    let v = m.lowest_weight_vector();
    let eigenvalue_failures = (0..d.dim_a)
        .filter(|&i| {
            let s = ModeSymbol::even(i, 1);
            let left = pairing(m, &m.act(s, &v), &v);
            let right = pairing(m, &v, &m.act(s, &v));
            left != cfg.lambda[i] || right != cfg.lambda[i]
        })
        .collect();
    let mut asymmetric_degrees = Vec::new();
    for deg in m.max_degree().steps_from_zero() {
        if !gram(m, deg)?.is_symmetric() {
            asymmetric_degrees.push(deg);
        }
    }
    Ok(ContragredientReport {
        adjoint_pairs_checked: checked,
        adjoint_failures: failures,
        eigenvalue_failures,
        asymmetric_degrees,
    })
}

/// Rank of the degree-`d` Gram matrix as the level varies.
pub fn ell_scan(base: &ModuleConfig, d: HalfInt, ells: &[Scalar]) -> Result<Vec<(Scalar, usize)>> {
    ells.par_iter()
        .map(|ell| {
            let mut cfg = base.clone();
            cfg.ell = ell.clone();
            let m = GradedModule::new(cfg);
            Ok((ell.clone(), gram(&m, d)?.rank()))
        })
        .collect()
}
