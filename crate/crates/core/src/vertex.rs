//! Vertex operator modes vₙ of arbitrary states of V(ℓ,0) and exact checks of
//! the vertex superalgebra identities they satisfy.
//!
//! Modes of a word x(m)v′ are obtained by peeling the leading symbol with the
//! iterate formula
//!
//! ```text
//! (u_m v)_n = Σ_{i≥0} (−1)^i C(m,i) (u_{m−i} v_{n+i} − (−1)^{|u||v|}(−1)^m v_{m+n−i} u_i)
//! ```
//!
//! with u = x(−1)𝟏, whose modes are the loop modes x(k). Both sums are finite
//! on a fixed state because negative degrees vanish.

use dashmap::DashMap;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra_data::AlgebraDatum;
use crate::error::{Error, Result};
use crate::graded_module::{
    monomial_degree, monomial_parity, GradedModule, ModuleConfig, ModuleKind, ModuleVector, Monomial,
};
use crate::linalg::{rank, Matrix};
use crate::loop_algebra::{LoopElement, ModeSymbol, Parity};
use crate::scalar::{binomial, factorial, frac, int, sign, HalfInt, Scalar};

/// One evaluated identity: the residual is LHS − RHS.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub identity_id: String,
    pub witness: String,
    pub residual_norm_is_zero: bool,
    pub residual: ModuleVector,
}

impl IdentityCheck {
    pub fn new(identity_id: &str, witness: String, residual: ModuleVector) -> Self {
        IdentityCheck {
            identity_id: identity_id.to_string(),
            witness,
            residual_norm_is_zero: residual.is_zero(),
            residual,
        }
    }
}

pub fn all_zero(checks: &[IdentityCheck]) -> bool {
    checks.iter().all(|c| c.residual_norm_is_zero)
}

pub fn failures(checks: &[IdentityCheck]) -> Vec<&IdentityCheck> {
    checks.iter().filter(|c| !c.residual_norm_is_zero).collect()
}

/// Highest degree occurring in `v` (0 for the zero vector).
pub fn weight(v: &ModuleVector) -> HalfInt {
    v.iter().map(|(w, _)| monomial_degree(w)).max().unwrap_or(HalfInt::ZERO)
}

fn parity_of(v: &ModuleVector) -> Result<Parity> {
    if v.is_zero() {
        return Ok(Parity::Even);
    }
    v.parity().ok_or(Error::NonHomogeneous)
}

/// Largest integer i with 2i ≤ twice.
fn floor_half(twice: i64) -> i64 {
    twice.div_euclid(2)
}

/// The vacuum module viewed as a vertex superalgebra.
pub struct VertexAlgebra {
    module: GradedModule,
    cache: DashMap<(Monomial, i64, Monomial), ModuleVector>,
}

impl VertexAlgebra {
    pub fn new(cfg: ModuleConfig) -> Result<Self> {
        if cfg.kind != ModuleKind::VacuumV {
            return Err(Error::Unsupported("vertex operators need the vacuum module".into()));
        }
        Ok(VertexAlgebra { module: GradedModule::new(cfg), cache: DashMap::new() })
    }

    pub fn vacuum(datum: AlgebraDatum, ell: Scalar, max_degree: HalfInt) -> Result<Self> {
        Self::new(ModuleConfig::vacuum(datum, ell, max_degree)?)
    }

    pub fn module(&self) -> &GradedModule {
        &self.module
    }

    pub fn datum(&self) -> &AlgebraDatum {
        self.module.datum()
    }

    pub fn ell(&self) -> &Scalar {
        &self.module.config().ell
    }

    pub fn max_degree(&self) -> HalfInt {
        self.module.max_degree()
    }

    /// x(−1)𝟏 for an A-basis vector (even) or U-basis vector (odd).
    pub fn generator(&self, kind: Parity, index: usize) -> ModuleVector {
        ModuleVector::monomial(vec![ModeSymbol { mode: -1, kind, index }])
    }

    /// Σ coords[i]·x_i(−1)𝟏.
    pub fn generator_from_coords(&self, kind: Parity, coords: &[Scalar]) -> ModuleVector {
        let mut v = ModuleVector::zero();
        for (index, c) in coords.iter().enumerate() {
            v.add_term(vec![ModeSymbol { mode: -1, kind, index }], c.clone());
        }
        v
    }

    /// vₙw, refusing when the output degree lies above the truncation degree.
    pub fn composite_mode(&self, v: &ModuleVector, n: i64, w: &ModuleVector) -> Result<ModuleVector> {
        let max = self.max_degree();
        for (vw, _) in v.iter() {
            for (ww, _) in w.iter() {
                let out = monomial_degree(vw) - HalfInt::from_int(n + 1) + monomial_degree(ww);
                if out > max {
                    return Err(Error::TruncationUncertain { requested: out, max });
                }
            }
        }
        Ok(self.mode(v, n, w))
    }

    /// vₙw computed exactly, with no regard to the truncation degree.
    pub fn mode(&self, v: &ModuleVector, n: i64, w: &ModuleVector) -> ModuleVector {
        let mut out = ModuleVector::zero();
        for (vw, a) in v.iter() {
            for (ww, b) in w.iter() {
                out.add_scaled(&self.mode_word(vw, n, ww), &(a * b));
            }
        }
        out
    }

    fn mode_on(&self, word: &[ModeSymbol], n: i64, w: &ModuleVector) -> ModuleVector {
        let mut out = ModuleVector::zero();
        for (ww, b) in w.iter() {
            out.add_scaled(&self.mode_word(word, n, ww), b);
        }
        out
    }

    fn mode_word(&self, word: &[ModeSymbol], n: i64, w: &[ModeSymbol]) -> ModuleVector {
        let Some((&x, rest)) = word.split_first() else {
            return if n == -1 { ModuleVector::monomial(w.to_vec()) } else { ModuleVector::zero() };
        };
        let key = (word.to_vec(), n, w.to_vec());
        if let Some(hit) = self.cache.get(&key) {
            return hit.clone();
        }
        let m = x.mode;
        let w_deg = monomial_degree(w).twice();
        let rest_wt = monomial_degree(rest).twice();
        let u_wt = x.with_mode(-1).degree().twice();
        let wvec = ModuleVector::monomial(w.to_vec());
        let swap = sign(x.is_odd() && monomial_parity(rest).is_odd()) * sign(m.rem_euclid(2) == 1);

        let mut out = ModuleVector::zero();
        for i in 0..=floor_half(w_deg + rest_wt - 2 * n - 2) {
            let c = sign(i % 2 == 1) * Scalar::from_integer(binomial(m, i as u32));
            let inner = self.mode_on(rest, n + i, &wvec);
            if !inner.is_zero() {
                out.add_scaled(&self.module.act(x.with_mode(m - i), &inner), &c);
            }
        }
        for i in 0..=floor_half(w_deg + u_wt - 2) {
            let c = -(sign(i % 2 == 1) * Scalar::from_integer(binomial(m, i as u32))) * &swap;
            let uw = self.module.act(x.with_mode(i), &wvec);
            if !uw.is_zero() {
                out.add_scaled(&self.mode_on(rest, m + n - i, &uw), &c);
            }
        }
        self.cache.insert(key, out.clone());
        out
    }

    /// L(−1) = D.
    pub fn l_minus_one(&self, v: &ModuleVector) -> ModuleVector {
        self.module.translation_d(v).expect("vacuum module")
    }

    /// u_m v_n w − (−1)^{|u||v|} v_n u_m w − Σ_{i≥0} C(m,i)(u_i v)_{m+n−i} w.
    pub fn verify_commutator(
        &self,
        u: &ModuleVector,
        v: &ModuleVector,
        m: i64,
        n: i64,
        w: &ModuleVector,
    ) -> Result<ModuleVector> {
        let s = sign(parity_of(u)?.is_odd() && parity_of(v)?.is_odd());
        let mut out = self.mode(u, m, &self.mode(v, n, w));
        out.add_scaled(&self.mode(v, n, &self.mode(u, m, w)), &-s);
        let top = floor_half((weight(u) + weight(v)).twice() - 2);
        for i in 0..=top {
            if m >= 0 && i > m {
                break;
            }
            let uiv = self.mode(u, i, v);
            if uiv.is_zero() {
                continue;
            }
            let c = Scalar::from_integer(binomial(m, i as u32));
            out.add_scaled(&self.mode(&uiv, m + n - i, w), &-c);
        }
        Ok(out)
    }

    /// uₙv − (−1)^{|u||v|}(−1)^{n+1} Σ_{i≥0} ((−1)^i/i!) L(−1)^i v_{n+i}u.
    ///
    /// The sum stops once v_{n+i}u has negative degree.
    pub fn verify_skew_symmetry(&self, u: &ModuleVector, v: &ModuleVector, n: i64) -> Result<ModuleVector> {
        let s = sign(parity_of(u)?.is_odd() && parity_of(v)?.is_odd()) * sign((n + 1).rem_euclid(2) == 1);
        let mut out = self.mode(u, n, v);
        let top = floor_half((weight(u) + weight(v)).twice() - 2 * n - 2);
        for i in 0..=top {
            let mut term = self.mode(v, n + i, u);
            for _ in 0..i {
                term = self.l_minus_one(&term);
            }
            let c = sign(i % 2 == 1) / Scalar::from_integer(factorial(i as u32)) * &s;
            out.add_scaled(&term, &-c);
        }
        Ok(out)
    }

    /// Commutator and skew-symmetry formulas for all pairs of basis states of
    /// degree ≤ `field_degree`, modes in `[-window, window]`, applied to basis
    /// states of degree ≤ `state_degree`.
    pub fn verify_formula_grids(
        &self,
        window: i64,
        field_degree: HalfInt,
        state_degree: HalfInt,
    ) -> Result<Vec<IdentityCheck>> {
        let fields: Vec<Monomial> =
            self.basis_states(field_degree).into_iter().filter(|w| !w.is_empty()).collect();
        let states = self.basis_states(state_degree);
        let mut jobs = Vec::new();
        for u in &fields {
            for v in &fields {
                for m in -window..=window {
                    jobs.push((u, v, m));
                }
            }
        }
        let nested: Vec<Result<Vec<IdentityCheck>>> = jobs
            .par_iter()
            .map(|&(u, v, m)| {
                let uv = ModuleVector::monomial(u.clone());
                let vv = ModuleVector::monomial(v.clone());
                let mut out = vec![IdentityCheck::new(
                    "SKEW_SYMMETRY",
                    format!("u={} v={} n={m}", fmt_word(u), fmt_word(v)),
                    self.verify_skew_symmetry(&uv, &vv, m)?,
                )];
                for n in -window..=window {
                    for w in &states {
                        let r = self.verify_commutator(&uv, &vv, m, n, &ModuleVector::monomial(w.clone()))?;
                        out.push(IdentityCheck::new(
                            "COMMUTATOR_FORMULA",
                            format!("u={} v={} m={m} n={n} w={}", fmt_word(u), fmt_word(v), fmt_word(w)),
                            r,
                        ));
                    }
                }
                Ok(out)
            })
            .collect();
        let mut checks = Vec::new();
        for r in nested {
            checks.extend(r?);
        }
        Ok(checks)
    }

    fn basis_states(&self, top: HalfInt) -> Vec<Monomial> {
        let top = top.min(self.max_degree());
        top.steps_from_zero().flat_map(|d| self.module.basis(d).expect("degree in range")).collect()
    }

    fn even_gens(&self) -> Vec<(usize, ModuleVector)> {
        (0..self.datum().dim_a).map(|i| (i, self.generator(Parity::Even, i))).collect()
    }

    fn odd_gens(&self) -> Vec<(usize, ModuleVector)> {
        (0..self.datum().dim_u).map(|p| (p, self.generator(Parity::Odd, p))).collect()
    }

    /// Evaluates the structural identities of the weight-3/2 and weight-2
    /// spaces on every basis pair or triple, and the mode brackets on a grid
    /// of modes in `[-window, window]` and basis states of degree ≤ `state_degree`.
    pub fn verify_structure_identities(&self, window: i64, state_degree: HalfInt) -> Vec<IdentityCheck> {
        let d = self.datum();
        let ell = self.ell().clone();
        let one = ModuleVector::lowest();
        let evens = self.even_gens();
        let odds = self.odd_gens();
        let e = |i: usize| format!("e{i}");
        let f = |p: usize| format!("f{p}");
        let mut checks = Vec::new();

        for (i, a) in &evens {
            for (j, b) in &evens {
                let tag = format!("a={} b={}", e(*i), e(*j));
                let a1b = self.mode(a, 1, b);
                let ab = self.generator_from_coords(Parity::Even, &d.mul_a[*i][*j]);
                checks.push(IdentityCheck::new("A1B_PRODUCT", tag.clone(), diff(&a1b, &ab)));
                let a3b = self.mode(a, 3, b);
                let form = one.scaled(&(&ell * &d.form_a[*i][*j]));
                checks.push(IdentityCheck::new("A3B_FORM", tag.clone(), diff(&a3b, &form)));
                let a0b = self.mode(a, 0, b);
                let half_d = self.l_minus_one(&a1b).scaled(&frac(1, 2));
                checks.push(IdentityCheck::new("A0B_HALF_TRANSLATION", tag, diff(&a0b, &half_d)));
            }
            for (p, u) in &odds {
                let tag = format!("a={} u={}", e(*i), f(*p));
                let a1u = self.mode(a, 1, u);
                let au = self.generator_from_coords(Parity::Odd, &d.act[*i][*p]).scaled(&frac(3, 4));
                checks.push(IdentityCheck::new("A1U_ACTION", tag.clone(), diff(&a1u, &au)));
                let a0u = self.mode(a, 0, u);
                let rhs = self.l_minus_one(&a1u).scaled(&frac(2, 3));
                checks.push(IdentityCheck::new("A0U_TRANSLATION", tag.clone(), diff(&a0u, &rhs)));
                let u0a = self.mode(u, 0, a);
                let rhs = self.l_minus_one(&self.mode(u, 1, a)).scaled(&frac(1, 3));
                checks.push(IdentityCheck::new("U0A_TRANSLATION", tag, diff(&u0a, &rhs)));
            }
        }

        for (p, u) in &odds {
            for (q, v) in &odds {
                let tag = format!("u={} v={}", f(*p), f(*q));
                let u0v = self.mode(u, 0, v);
                let circ = self.generator_from_coords(Parity::Even, &d.circ[*p][*q]);
                checks.push(IdentityCheck::new("U0V_CIRC", tag.clone(), diff(&u0v, &circ)));
                let u2v = self.mode(u, 2, v);
                let form = one.scaled(&(&ell * &d.form_u[*p][*q]));
                checks.push(IdentityCheck::new("U2V_FORM", tag.clone(), diff(&u2v, &form)));
                checks.push(IdentityCheck::new("U1V_ZERO", tag, self.mode(u, 1, v)));

                for (i, a) in &evens {
                    let tag = format!("a={} u={} v={}", e(*i), f(*p), f(*q));
                    let dot = |x: &ModuleVector| self.mode(a, 1, x).scaled(&frac(4, 3));
                    let au = dot(u);
                    let av = dot(v);
                    let lhs = self.mode(&au, 2, v);
                    let mid = self.mode(u, 2, &av);
                    let rhs = self.mode(a, 3, &u0v).scaled(&frac(4, 3));
                    checks.push(IdentityCheck::new("FORM_ACTION_SYM", tag.clone(), diff(&lhs, &mid)));
                    checks.push(IdentityCheck::new("FORM_ACTION_CIRC", tag.clone(), diff(&mid, &rhs)));
                    let lhs = self.mode(&au, 0, v);
                    let mid = self.mode(a, 1, &u0v);
                    let rhs = self.mode(u, 0, &av);
                    checks.push(IdentityCheck::new("CIRC_ACTION_LEFT", tag.clone(), diff(&lhs, &mid)));
                    checks.push(IdentityCheck::new("CIRC_ACTION_RIGHT", tag, diff(&mid, &rhs)));
                }

                for (r, x) in &odds {
                    let tag = format!("u={} v={} w={}", f(*p), f(*q), f(*r));
                    let pv = diff(&self.mode(v, -1, x), &self.l_minus_one(&self.mode(v, 0, x)).scaled(&frac(1, 2)));
                    let lhs = self.mode(u, 2, &pv);
                    let mut rhs = x.scaled(&(&ell * &d.form_u[*p][*q]));
                    rhs.add_scaled(v, &-(&ell * &d.form_u[*p][*r]));
                    checks.push(IdentityCheck::new("U2_P_VECTOR", tag, diff(&lhs, &rhs)));
                }
            }
        }

        checks.extend(self.bracket_checks(window, state_degree));
        checks
    }

    fn bracket_checks(&self, window: i64, state_degree: HalfInt) -> Vec<IdentityCheck> {
        let d = self.datum();
        let states = self.basis_states(state_degree);
        let evens = self.even_gens();
        let odds = self.odd_gens();
        let omega = d.omega();
        let modes: Vec<i64> = (-window..=window).collect();

        let mut jobs: Vec<(ModuleVector, ModuleVector, char, String)> = Vec::new();
        for (i, a) in &evens {
            for (j, b) in &evens {
                jobs.push((a.clone(), b.clone(), 'E', format!("a=e{i} b=e{j}")));
            }
            for (p, u) in &odds {
                jobs.push((a.clone(), u.clone(), 'M', format!("a=e{i} u=f{p}")));
            }
        }
        for (p, u) in &odds {
            for (q, v) in &odds {
                jobs.push((u.clone(), v.clone(), 'O', format!("u=f{p} v=f{q}")));
            }
        }

        let mut grid = Vec::new();
        for job in 0..jobs.len() {
            for &m in &modes {
                for &n in &modes {
                    for s in 0..states.len() {
                        grid.push((job, m, n, s));
                    }
                }
            }
        }
        let mut checks: Vec<IdentityCheck> = grid
            .par_iter()
            .map(|&(job, m, n, s)| {
                let (x, y, kind, tag) = &jobs[job];
                let w = ModuleVector::monomial(states[s].clone());
                let sgn = if *kind == 'O' { -Scalar::one() } else { Scalar::one() };
                let mut lhs = self.mode(x, m, &self.mode(y, n, &w));
                lhs.add_scaled(&self.mode(y, n, &self.mode(x, m, &w)), &-sgn);
                let rhs = match kind {
                    'E' => {
                        let a1b = self.mode(x, 1, y);
                        let mut r = self.mode(&a1b, m + n - 1, &w).scaled(&frac(m - n, 2));
                        if m + n == 2 {
                            let c = self.mode(x, 3, y).coeff(&[]);
                            r.add_scaled(&w, &(Scalar::from_integer(binomial(m, 3)) * c));
                        }
                        r
                    }
                    'M' => self.mode(&self.mode(x, 1, y), m + n - 1, &w).scaled(&frac(m - 2 * n, 3)),
                    _ => {
                        let mut r = self.mode(&self.mode(x, 0, y), m + n, &w);
                        if m + n == 1 {
                            let c = self.mode(x, 2, y).coeff(&[]);
                            r.add_scaled(&w, &(frac(m * (m - 1), 2) * c));
                        }
                        r
                    }
                };
                let id = match kind {
                    'E' => "BRACKET_EVEN_EVEN",
                    'M' => "BRACKET_EVEN_ODD",
                    _ => "BRACKET_ODD_ODD",
                };
                IdentityCheck::new(id, format!("{tag} m={m} n={n} w={}", fmt_word(&states[s])), diff(&lhs, &rhs))
            })
            .collect();

        if let Some(omega) = omega {
            let l1 = LoopElement::from_coords(Parity::Even, &omega, 2);
            let gens: Vec<(ModeSymbol, i64)> = (0..d.dim_a)
                .map(|i| (ModeSymbol::even(i, 0), 2))
                .chain((0..d.dim_u).map(|p| (ModeSymbol::odd(p, 0), 1)))
                .collect();
            let mut cor = Vec::new();
            for &(g, h) in &gens {
                for &n in &modes {
                    for s in &states {
                        let w = ModuleVector::monomial(s.clone());
                        let x = g.with_mode(n);
                        let m = &self.module;
                        let mut lhs = m.act_element(&l1, &m.act(x, &w));
                        lhs.add_scaled(&m.act(x, &m.act_element(&l1, &w)), &-Scalar::one());
                        let rhs = m.act(g.with_mode(n + 1), &w).scaled(&int(h - n));
                        cor.push(IdentityCheck::new(
                            "L1_GENERATOR_BRACKET",
                            format!("x={x} w={}", fmt_word(s)),
                            diff(&lhs, &rhs),
                        ));
                    }
                }
            }
            checks.extend(cor);
        }
        checks
    }

    /// Dimensions of P = span{u₋₁v − ½L(−1)u₀v}, of L(−1)V₂ and of V₃,
    /// and whether V₃ = L(−1)V₂ ⊕ P.
    pub fn p_subspace_dim(&self) -> Result<PSubspace> {
        let three = HalfInt::from_int(3);
        let basis3 = self.module.basis(three)?;
        let basis2 = self.module.basis(HalfInt::from_int(2))?;
        let odds = self.odd_gens();
        let mut p_rows: Matrix = Vec::new();
        for (_, u) in &odds {
            for (_, v) in &odds {
                let mut x = self.mode(u, -1, v);
                x.add_scaled(&self.l_minus_one(&self.mode(u, 0, v)), &frac(-1, 2));
                p_rows.push(x.coords(&basis3));
            }
        }
        let l_rows: Matrix = basis2
            .iter()
            .map(|w| self.l_minus_one(&ModuleVector::monomial(w.clone())).coords(&basis3))
            .collect();
        let dim_p = rank(&p_rows);
        let dim_l1v2 = rank(&l_rows);
        let both: Matrix = p_rows.iter().chain(&l_rows).cloned().collect();
        let dim_sum = rank(&both);
        Ok(PSubspace {
            dim_p,
            dim_l1v2,
            dim_degree3: basis3.len(),
            direct: dim_sum == dim_p + dim_l1v2,
            spans: dim_sum == basis3.len(),
        })
    }

    /// Virasoro relations among L(m) = ω(m+1) and their brackets with the
    /// generators, on basis states of degree ≤ max_degree − window − 1 and
    /// modes in `[-window, window]`. Also L(−1) = D and L(0) = degree.
    pub fn verify_virasoro(&self, window: i64) -> Result<VirasoroReport> {
        let d = self.datum();
        let omega = d.omega().ok_or(Error::NoIdentity)?;
        let ell = self.ell().clone();
        let normalized = crate::algebra_data::conformal_normalization_check(d)?;
        let m = &self.module;
        let l = |k: i64| LoopElement::from_coords(Parity::Even, &omega, k + 1);
        let states = self.basis_states(self.max_degree() - HalfInt::from_int(window + 1));
        let modes: Vec<i64> = (-window..=window).collect();
        let form_omega: Vec<Scalar> = (0..d.dim_a)
            .map(|i| omega.iter().zip(&d.form_a).map(|(c, row)| c * &row[i]).sum())
            .collect();
        let c_over_12 = d.form_a_vec(&omega, &omega) * int(2) * &ell / int(12);

        let mut tasks = Vec::new();
        for s in 0..states.len() {
            for &a in &modes {
                tasks.push((s, a));
            }
        }
        let mut checks: Vec<IdentityCheck> = tasks
            .par_iter()
            .flat_map_iter(|&(s, a)| {
                let word = &states[s];
                let w = ModuleVector::monomial(word.clone());
                let mut out = Vec::new();
                for &b in &modes {
                    let mut lhs = m.act_element(&l(a), &m.act_element(&l(b), &w));
                    lhs.add_scaled(&m.act_element(&l(b), &m.act_element(&l(a), &w)), &-Scalar::one());
                    let mut rhs = m.act_element(&l(a + b), &w).scaled(&int(a - b));
                    if a + b == 0 {
                        rhs.add_scaled(&w, &(int(a * a * a - a) * &c_over_12));
                    }
                    out.push(IdentityCheck::new(
                        "VIRASORO_LL",
                        format!("m={a} n={b} w={}", fmt_word(word)),
                        diff(&lhs, &rhs),
                    ));
                    for i in 0..d.dim_a {
                        let x = ModeSymbol::even(i, b);
                        let mut lhs = m.act_element(&l(a), &m.act(x, &w));
                        lhs.add_scaled(&m.act(x, &m.act_element(&l(a), &w)), &-Scalar::one());
                        let mut rhs = m.act(x.with_mode(a + b), &w).scaled(&int(a + 1 - b));
                        if a + b == 1 {
                            let c = int(a * a * a - a) / int(6) * &form_omega[i] * &ell;
                            rhs.add_scaled(&w, &c);
                        }
                        out.push(IdentityCheck::new(
                            "VIRASORO_LA",
                            format!("m={a} x={x} w={}", fmt_word(word)),
                            diff(&lhs, &rhs),
                        ));
                    }
                    for p in 0..d.dim_u {
                        let x = ModeSymbol::odd(p, b);
                        let mut lhs = m.act_element(&l(a), &m.act(x, &w));
                        lhs.add_scaled(&m.act(x, &m.act_element(&l(a), &w)), &-Scalar::one());
                        let rhs = m.act(x.with_mode(a + b), &w).scaled(&frac(a + 1 - 2 * b, 2));
                        out.push(IdentityCheck::new(
                            "VIRASORO_LU",
                            format!("m={a} x={x} w={}", fmt_word(word)),
                            diff(&lhs, &rhs),
                        ));
                    }
                }
                out
            })
            .collect();

        let all_states = self.basis_states(self.max_degree() - HalfInt::from_int(1));
        for word in &all_states {
            let w = ModuleVector::monomial(word.clone());
            let tag = format!("w={}", fmt_word(word));
            let lm1 = m.act_element(&l(-1), &w);
            checks.push(IdentityCheck::new("L_MINUS_ONE_IS_D", tag.clone(), diff(&lm1, &self.l_minus_one(&w))));
            let l0 = m.act_element(&l(0), &w);
            let grade = w.scaled(&monomial_degree(word).to_scalar());
            checks.push(IdentityCheck::new("L_ZERO_IS_DEGREE", tag, diff(&l0, &grade)));
        }

        let central_charge = &c_over_12 * int(12);
        Ok(VirasoroReport { central_charge, conformal_normalization: normalized, checks })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PSubspace {
    pub dim_p: usize,
    pub dim_l1v2: usize,
    pub dim_degree3: usize,
    pub direct: bool,
    pub spans: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VirasoroReport {
    #[serde(with = "crate::scalar::serde_scalar")]
    pub central_charge: Scalar,
    pub conformal_normalization: bool,
    pub checks: Vec<IdentityCheck>,
}

fn diff(a: &ModuleVector, b: &ModuleVector) -> ModuleVector {
    let mut out = a.clone();
    out.add_scaled(b, &-Scalar::one());
    out
}

fn fmt_word(word: &[ModeSymbol]) -> String {
    if word.is_empty() {
        return "1".into();
    }
    word.iter().map(ToString::to_string).collect()
}
