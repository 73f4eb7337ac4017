//! Input data `(A, ⟨·,·⟩_A, U, A-action, ∘, ⟨·,·⟩_U)` as structure-constant
//! tensors, the compatibility verifier, and the standard builders.
//!
//! Conventions: `mul_a[i][j][k]` is the `e_k` coordinate of `e_i e_j`;
//! `act[i][p][q]` is the `f_q` coordinate of `e_i · f_p`; `circ[p][q][k]` is
//! the `e_k` coordinate of `f_p ∘ f_q`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{format_scalar, frac, int, parse_scalar, Scalar};

type Tensor3 = Vec<Vec<Vec<Scalar>>>;
type Tensor2 = Vec<Vec<Scalar>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraDatum {
    pub dim_a: usize,
    pub dim_u: usize,
    pub mul_a: Tensor3,
    pub form_a: Tensor2,
    pub act: Tensor3,
    pub circ: Tensor3,
    pub form_u: Tensor2,
    pub identity_a: Option<Vec<Scalar>>,
}

impl AlgebraDatum {
    /// A datum with every structure constant zero.
    pub fn zero(dim_a: usize, dim_u: usize) -> Self {
        AlgebraDatum {
            dim_a,
            dim_u,
            mul_a: vec![vec![vec![Scalar::zero(); dim_a]; dim_a]; dim_a],
            form_a: vec![vec![Scalar::zero(); dim_a]; dim_a],
            act: vec![vec![vec![Scalar::zero(); dim_u]; dim_u]; dim_a],
            circ: vec![vec![vec![Scalar::zero(); dim_a]; dim_u]; dim_u],
            form_u: vec![vec![Scalar::zero(); dim_u]; dim_u],
            identity_a: None,
        }
    }

    pub fn check_shapes(&self) -> Result<()> {
        let (na, nu) = (self.dim_a, self.dim_u);
        if na == 0 || nu == 0 {
            return Err(Error::DimensionMismatch("dim_a and dim_u must be positive".into()));
        }
        check3("mul_a", &self.mul_a, [na, na, na])?;
        check2("form_a", &self.form_a, [na, na])?;
        check3("act", &self.act, [na, nu, nu])?;
        check3("circ", &self.circ, [nu, nu, na])?;
        check2("form_u", &self.form_u, [nu, nu])?;
        if let Some(e) = &self.identity_a {
            if e.len() != na {
                return Err(Error::DimensionMismatch(format!(
                    "identity_a has length {}, expected {na}",
                    e.len()
                )));
            }
        }
        Ok(())
    }

    /// Checks that `identity_a`, when present, really is a two-sided identity
    /// of A acting as the identity on U.
    pub fn check_identity(&self) -> Result<()> {
        let Some(e) = &self.identity_a else {
            return Ok(());
        };
        for j in 0..self.dim_a {
            if self.mul_vec(e, &unit(self.dim_a, j)) != unit(self.dim_a, j) {
                return Err(Error::InvalidIdentity(format!("e·e_{j} ≠ e_{j}")));
            }
        }
        for p in 0..self.dim_u {
            if self.act_vec(e, &unit(self.dim_u, p)) != unit(self.dim_u, p) {
                return Err(Error::InvalidIdentity(format!("e·f_{p} ≠ f_{p}")));
            }
        }
        Ok(())
    }

    pub fn mul_vec(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.dim_a];
        for (i, xi) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let c = xi * yj;
                for (o, t) in out.iter_mut().zip(&self.mul_a[i][j]) {
                    *o += &c * t;
                }
            }
        }
        out
    }

    pub fn act_vec(&self, a: &[Scalar], u: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.dim_u];
        for (i, ai) in a.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (p, up) in u.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let c = ai * up;
                for (o, t) in out.iter_mut().zip(&self.act[i][p]) {
                    *o += &c * t;
                }
            }
        }
        out
    }

    pub fn circ_vec(&self, u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.dim_a];
        for (p, up) in u.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (q, vq) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let c = up * vq;
                for (o, t) in out.iter_mut().zip(&self.circ[p][q]) {
                    *o += &c * t;
                }
            }
        }
        out
    }

    pub fn form_a_vec(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        bilinear(&self.form_a, x, y)
    }

    pub fn form_u_vec(&self, u: &[Scalar], v: &[Scalar]) -> Scalar {
        bilinear(&self.form_u, u, v)
    }

    /// ω = 2·identity, when the identity is known.
    pub fn omega(&self) -> Option<Vec<Scalar>> {
        self.identity_a
            .as_ref()
            .map(|e| e.iter().map(|c| c * int(2)).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DatumJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("datum JSON: {e}")))?;
        let d = raw.into_datum()?;
        d.check_shapes()?;
        d.check_identity()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DatumJson::from_datum(self)).expect("datum serializes")
    }
}

fn unit(n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); n];
    v[i] = Scalar::one();
    v
}

fn bilinear(form: &Tensor2, x: &[Scalar], y: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (i, xi) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        for (j, yj) in y.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            acc += xi * yj * &form[i][j];
        }
    }
    acc
}

fn check3(name: &str, t: &Tensor3, shape: [usize; 3]) -> Result<()> {
    let ok = t.len() == shape[0]
        && t.iter().all(|m| {
            m.len() == shape[1] && m.iter().all(|r| r.len() == shape[2])
        });
    if ok {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("{name} must have shape {shape:?}")))
    }
}

fn check2(name: &str, t: &Tensor2, shape: [usize; 2]) -> Result<()> {
    if t.len() == shape[0] && t.iter().all(|r| r.len() == shape[1]) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("{name} must have shape {shape:?}")))
    }
}

/// Wire form of a datum: every scalar is a rational string.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatumJson {
    dim_a: usize,
    dim_u: usize,
    mul_a: Vec<Vec<Vec<String>>>,
    act: Vec<Vec<Vec<String>>>,
    circ: Vec<Vec<Vec<String>>>,
    form_a: Vec<Vec<String>>,
    form_u: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    identity_a: Option<Vec<String>>,
}

fn parse1(v: &[String]) -> Result<Vec<Scalar>> {
    v.iter().map(|s| parse_scalar(s)).collect()
}

fn parse2(v: &[Vec<String>]) -> Result<Tensor2> {
    v.iter().map(|r| parse1(r)).collect()
}

fn parse3(v: &[Vec<Vec<String>>]) -> Result<Tensor3> {
    v.iter().map(|m| parse2(m)).collect()
}

fn fmt1(v: &[Scalar]) -> Vec<String> {
    v.iter().map(format_scalar).collect()
}

fn fmt2(v: &Tensor2) -> Vec<Vec<String>> {
    v.iter().map(|r| fmt1(r)).collect()
}

fn fmt3(v: &Tensor3) -> Vec<Vec<Vec<String>>> {
    v.iter().map(fmt2).collect()
}

impl DatumJson {
    fn into_datum(self) -> Result<AlgebraDatum> {
        Ok(AlgebraDatum {
            dim_a: self.dim_a,
            dim_u: self.dim_u,
            mul_a: parse3(&self.mul_a)?,
            form_a: parse2(&self.form_a)?,
            act: parse3(&self.act)?,
            circ: parse3(&self.circ)?,
            form_u: parse2(&self.form_u)?,
            identity_a: self.identity_a.as_deref().map(parse1).transpose()?,
        })
    }

    fn from_datum(d: &AlgebraDatum) -> Self {
        DatumJson {
            dim_a: d.dim_a,
            dim_u: d.dim_u,
            mul_a: fmt3(&d.mul_a),
            act: fmt3(&d.act),
            circ: fmt3(&d.circ),
            form_a: fmt2(&d.form_a),
            form_u: fmt2(&d.form_u),
            identity_a: d.identity_a.as_deref().map(fmt1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Condition {
    CommA,
    AssocA,
    FormASym,
    FormAAssoc,
    ModuleAxiom,
    FormUSym,
    CircSym,
    CondIiiForm,
    CondIiiCircAction,
    CondIiiCircModule,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    pub witness: Vec<usize>,
    #[serde(serialize_with = "ser_vec")]
    pub lhs: Vec<Scalar>,
    #[serde(serialize_with = "ser_vec")]
    pub rhs: Vec<Scalar>,
}

fn ser_vec<S: serde::Serializer>(v: &[Scalar], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_scalar))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DatumReport {
    pub violations: Vec<Violation>,
    /// Informational: nondegeneracy is not part of the compatibility
    /// conditions, but the simple-quotient statements need it.
    pub rank_form_a: usize,
    pub rank_form_u: usize,
}

impl DatumReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn conditions(&self) -> Vec<Condition> {
        let mut c: Vec<Condition> = self.violations.iter().map(|v| v.condition).collect();
        c.sort();
        c.dedup();
        c
    }
}

/// Checks every compatibility condition on every basis tuple. The conditions
/// are multilinear, so basis tuples decide them.
pub fn verify_datum(d: &AlgebraDatum) -> Result<DatumReport> {
    d.check_shapes()?;
    let (na, nu) = (d.dim_a, d.dim_u);
    let ea = |i| unit(na, i);
    let fu = |p| unit(nu, p);
    let mut out = Vec::new();
    let mut push = |condition, witness: Vec<usize>, lhs: Vec<Scalar>, rhs: Vec<Scalar>| {
        if lhs != rhs {
            out.push(Violation { condition, witness, lhs, rhs });
        }
    };

    for i in 0..na {
        for j in 0..na {
            push(Condition::CommA, vec![i, j], d.mul_a[i][j].clone(), d.mul_a[j][i].clone());
            push(
                Condition::FormASym,
                vec![i, j],
                vec![d.form_a[i][j].clone()],
                vec![d.form_a[j][i].clone()],
            );
            for k in 0..na {
                let ab = d.mul_vec(&ea(i), &ea(j));
                let bc = d.mul_vec(&ea(j), &ea(k));
                push(
                    Condition::AssocA,
                    vec![i, j, k],
                    d.mul_vec(&ab, &ea(k)),
                    d.mul_vec(&ea(i), &bc),
                );
                push(
                    Condition::FormAAssoc,
                    vec![i, j, k],
                    vec![d.form_a_vec(&ab, &ea(k))],
                    vec![d.form_a_vec(&ea(i), &bc)],
                );
            }
            for p in 0..nu {
                let bu = d.act_vec(&ea(j), &fu(p));
                let ab = d.mul_vec(&ea(i), &ea(j));
                push(
                    Condition::ModuleAxiom,
                    vec![i, j, p],
                    d.act_vec(&ea(i), &bu),
                    d.act_vec(&ab, &fu(p)),
                );
            }
        }
    }

    for p in 0..nu {
        for q in 0..nu {
            push(
                Condition::FormUSym,
                vec![p, q],
                vec![d.form_u[p][q].clone()],
                vec![d.form_u[q][p].clone()],
            );
            push(Condition::CircSym, vec![p, q], d.circ[p][q].clone(), d.circ[q][p].clone());
        }
    }

    let four_thirds = frac(4, 3);
    for i in 0..na {
        let a = ea(i);
        for p in 0..nu {
            let u = fu(p);
            let au = d.act_vec(&a, &u);
            for q in 0..nu {
                let v = fu(q);
                let av = d.act_vec(&a, &v);
                let uv = d.circ_vec(&u, &v);
                // ⟨v, au⟩ = 4/3 ⟨a, u∘v⟩; the ⟨u, av⟩ half is the (q, p) instance.
                push(
                    Condition::CondIiiForm,
                    vec![i, p, q],
                    vec![d.form_u_vec(&v, &au)],
                    vec![&four_thirds * d.form_a_vec(&a, &uv)],
                );
                let a_uv = d.mul_vec(&a, &uv);
                push(Condition::CondIiiCircAction, vec![i, p, q], a_uv.clone(), d.circ_vec(&v, &au));
                push(Condition::CondIiiCircAction, vec![i, p, q], a_uv, d.circ_vec(&u, &av));
            }
        }
    }
    for p in 0..nu {
        for q in 0..nu {
            for r in 0..nu {
                let (u, v, w) = (fu(p), fu(q), fu(r));
                let first = d.act_vec(&d.circ_vec(&u, &v), &w);
                push(
                    Condition::CondIiiCircModule,
                    vec![p, q, r],
                    first.clone(),
                    d.act_vec(&d.circ_vec(&v, &w), &u),
                );
                push(
                    Condition::CondIiiCircModule,
                    vec![p, q, r],
                    first,
                    d.act_vec(&d.circ_vec(&w, &u), &v),
                );
            }
        }
    }

    Ok(DatumReport {
        violations: out,
        rank_form_a: linalg::rank(&d.form_a),
        rank_form_u: linalg::rank(&d.form_u),
    })
}

/// Solves `e·x = x` on A and `e·f = f` on U. Returns the unique solution.
pub fn find_identity(d: &AlgebraDatum) -> Option<Vec<Scalar>> {
    let na = d.dim_a;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for j in 0..na {
        for k in 0..na {
            rows.push((0..na).map(|i| d.mul_a[i][j][k].clone()).collect());
            rhs.push(if j == k { Scalar::one() } else { Scalar::zero() });
        }
    }
    for p in 0..d.dim_u {
        for q in 0..d.dim_u {
            rows.push((0..na).map(|i| d.act[i][p][q].clone()).collect());
            rhs.push(if p == q { Scalar::one() } else { Scalar::zero() });
        }
    }
    match linalg::solve(&rows, &rhs, na) {
        Some((x, 0)) => Some(x),
        _ => None,
    }
}

/// Like [`find_identity`], storing the result in `identity_a`.
pub fn with_identity(mut d: AlgebraDatum) -> AlgebraDatum {
    d.identity_a = find_identity(&d);
    d
}

/// Whether ⟨ω,ω⟩_A = ½ for ω = 2·identity, the normalization under which the
/// Virasoro central charge equals the level.
pub fn conformal_normalization_check(d: &AlgebraDatum) -> Result<bool> {
    let omega = d.omega().ok_or(Error::NoIdentity)?;
    Ok(d.form_a_vec(&omega, &omega) == frac(1, 2))
}

/// The datum whose loop algebra contains the Neveu–Schwarz superalgebra:
/// A = ℚω, U = ℚg with ωω = 2ω, ωg = 2g, g∘g = 2ω, ⟨ω,ω⟩ = ½, ⟨g,g⟩ = ⅔.
pub fn build_ns() -> AlgebraDatum {
    let mut d = AlgebraDatum::zero(1, 1);
    d.mul_a[0][0][0] = int(2);
    d.form_a[0][0] = frac(1, 2);
    d.act[0][0][0] = int(2);
    d.circ[0][0][0] = int(2);
    d.form_u[0][0] = frac(2, 3);
    d.identity_a = Some(vec![frac(1, 2)]);
    d
}

/// A = ℚ[x]/(xⁿ⁺¹) on the basis 1, x, …, xⁿ with ⟨u,v⟩ = f(uv), and U = A as
/// an ideal module. `f` lists f(1), f(x), …, f(xⁿ); f(1) is replaced by ⅛ so
/// that ⟨ω,ω⟩ = ½.
pub fn build_trunc_poly(n: usize, f: &[Scalar]) -> Result<AlgebraDatum> {
    if f.len() != n + 1 {
        return Err(Error::DimensionMismatch(format!(
            "f must have {} entries, got {}",
            n + 1,
            f.len()
        )));
    }
    if f[n].is_zero() {
        return Err(Error::DegeneratePivot(n));
    }
    let mut f = f.to_vec();
    f[0] = frac(1, 8);
    let dim = n + 1;
    let mut d = AlgebraDatum::zero(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            if i + j <= n {
                d.mul_a[i][j][i + j] = Scalar::one();
                d.form_a[i][j] = f[i + j].clone();
            }
        }
    }
    let mut id = vec![Scalar::zero(); dim];
    id[0] = Scalar::one();
    d.identity_a = Some(id);
    Ok(build_ideal_module(&d))
}

/// U = A as a module over itself, with u∘v = ¾uv and ⟨·,·⟩_U = ⟨·,·⟩_A.
pub fn build_ideal_module(a: &AlgebraDatum) -> AlgebraDatum {
    let three_quarters = frac(3, 4);
    AlgebraDatum {
        dim_a: a.dim_a,
        dim_u: a.dim_a,
        mul_a: a.mul_a.clone(),
        form_a: a.form_a.clone(),
        act: a.mul_a.clone(),
        circ: a
            .mul_a
            .iter()
            .map(|m| m.iter().map(|r| r.iter().map(|c| c * &three_quarters).collect()).collect())
            .collect(),
        form_u: a.form_a.clone(),
        identity_a: a.identity_a.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trunc1() -> AlgebraDatum {
        build_trunc_poly(1, &[int(0), int(1)]).unwrap()
    }

    #[test]
    fn ns_datum_passes() {
        let d = build_ns();
        assert_eq!(d.circ[0][0], vec![int(2)]);
        assert_eq!(d.form_u[0][0], frac(2, 3));
        let r = verify_datum(&d).unwrap();
        assert!(r.passes(), "{:?}", r.violations);
        assert_eq!((r.rank_form_a, r.rank_form_u), (1, 1));
    }

    #[test]
    fn ns_with_wrong_odd_form_fails_condition_iii() {
        let mut d = build_ns();
        d.form_u[0][0] = int(1);
        let r = verify_datum(&d).unwrap();
        assert_eq!(r.conditions(), vec![Condition::CondIiiForm]);
        let v = &r.violations[0];
        assert_eq!(v.witness, vec![0, 0, 0]);
        assert_eq!(v.lhs, vec![int(2)]);
        assert_eq!(v.rhs, vec![frac(4, 3)]);
    }

    #[test]
    fn zero_datum_passes() {
        assert!(verify_datum(&AlgebraDatum::zero(2, 3)).unwrap().passes());
    }

    #[test]
    fn shape_errors_are_reported() {
        let mut d = build_ns();
        d.circ[0][0].push(int(1));
        assert!(matches!(verify_datum(&d), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn identities() {
        assert_eq!(find_identity(&build_ns()), Some(vec![frac(1, 2)]));
        assert_eq!(find_identity(&AlgebraDatum::zero(1, 1)), None);
        assert_eq!(find_identity(&trunc1()), Some(vec![int(1), int(0)]));
    }

    #[test]
    fn conformal_normalization() {
        assert!(conformal_normalization_check(&build_ns()).unwrap());
        let mut d = build_ns();
        d.form_a[0][0] = int(1);
        assert!(!conformal_normalization_check(&d).unwrap());
        assert!(conformal_normalization_check(&trunc1()).unwrap());
        assert_eq!(
            conformal_normalization_check(&AlgebraDatum::zero(1, 1)),
            Err(Error::NoIdentity)
        );
    }

    #[test]
    fn trunc_poly_builder() {
        let d = trunc1();
        assert_eq!(d.form_a, vec![vec![frac(1, 8), int(1)], vec![int(1), int(0)]]);
        assert_eq!(linalg::rank(&d.form_a), 2);
        assert!(verify_datum(&d).unwrap().passes());
        let d0 = build_trunc_poly(0, &[int(5)]).unwrap();
        assert_eq!((d0.dim_a, d0.dim_u), (1, 1));
        assert_eq!(d0.mul_a[0][0], vec![int(1)]);
        assert!(verify_datum(&d0).unwrap().passes());
        let d2 = build_trunc_poly(2, &[int(0), int(3), frac(-1, 2)]).unwrap();
        assert!(verify_datum(&d2).unwrap().passes());
        assert_eq!(
            build_trunc_poly(1, &[int(1), int(0)]),
            Err(Error::DegeneratePivot(1))
        );
    }

    #[test]
    fn ideal_module_builder() {
        let mut even = AlgebraDatum::zero(1, 1);
        even.mul_a[0][0][0] = int(2);
        even.form_a[0][0] = frac(1, 2);
        let d = build_ideal_module(&even);
        assert_eq!(d.circ[0][0], vec![frac(3, 2)]);
        assert!(verify_datum(&d).unwrap().passes());
        assert_eq!(build_ideal_module(&AlgebraDatum::zero(2, 1)), AlgebraDatum::zero(2, 2));
        let t = trunc1();
        for p in 0..2 {
            for q in 0..2 {
                let expect: Vec<Scalar> = t.mul_a[p][q].iter().map(|c| c * frac(3, 4)).collect();
                assert_eq!(t.circ[p][q], expect);
            }
        }
        assert!(verify_datum(&build_ideal_module(&build_ns())).unwrap().passes());
    }

    #[test]
    fn json_round_trip() {
        let d = trunc1();
        let back = AlgebraDatum::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        assert!(matches!(AlgebraDatum::from_json("{"), Err(Error::Parse(_))));
        let bad_identity = d.to_json().replace("\"identity_a\": [\n    \"1\"", "\"identity_a\": [\n    \"2\"");
        assert!(matches!(AlgebraDatum::from_json(&bad_identity), Err(Error::InvalidIdentity(_))));
    }
}
