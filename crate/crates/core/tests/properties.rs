use proptest::prelude::*;

use vosa_core::algebra_data::{build_ideal_module, build_ns, build_trunc_poly, verify_datum};
use vosa_core::graded_module::{monomial_degree, GradedModule, ModuleConfig, ModuleVector, Monomial};
use vosa_core::invariant_form::{
    adjoint_failures, brute_force_radical, gram, gram_on, radical_basis,
};
use vosa_core::linalg::{rank, same_span};
use vosa_core::loop_algebra::{
    bracket, jacobi_scan, skew_residual, super_jacobi_residual, LoopElement, ModeSymbol, Parity,
};
use vosa_core::scalar::{frac, int};
use vosa_core::vertex::VertexAlgebra;
use vosa_core::{AlgebraDatum, HalfInt, Scalar};

fn arb_scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| frac(n, d))
}

fn arb_nonzero() -> impl Strategy<Value = Scalar> {
    arb_scalar().prop_filter("nonzero", |x| *x != int(0))
}

fn arb_trunc(max_n: usize) -> impl Strategy<Value = AlgebraDatum> {
    (0..=max_n).prop_flat_map(|n| {
        (prop::collection::vec(arb_scalar(), n), arb_nonzero()).prop_map(move |(mut f, top)| {
            f.push(top);
            build_trunc_poly(n, &f).unwrap()
        })
    })
}

/// Data known to satisfy every compatibility condition.
fn arb_datum(max_n: usize) -> impl Strategy<Value = AlgebraDatum> {
    prop_oneof![
        Just(build_ns()),
        Just(build_ideal_module(&build_ns())),
        arb_trunc(max_n),
    ]
}

fn arb_symbol(d: &AlgebraDatum, window: i64) -> BoxedStrategy<ModeSymbol> {
    let (na, nu) = (d.dim_a, d.dim_u);
    (any::<bool>(), 0..na.max(nu), -window..=window)
        .prop_map(move |(odd, i, m)| {
            if odd {
                ModeSymbol::odd(i % nu, m)
            } else {
                ModeSymbol::even(i % na, m)
            }
        })
        .boxed()
}

fn datum_and_symbols(max_n: usize, window: i64, count: usize) -> impl Strategy<Value = (AlgebraDatum, Vec<ModeSymbol>)> {
    arb_datum(max_n).prop_flat_map(move |d| {
        let s = prop::collection::vec(arb_symbol(&d, window), count);
        (Just(d), s)
    })
}

fn states_up_to(m: &GradedModule, top: HalfInt) -> Vec<Monomial> {
    top.min(m.max_degree()).steps_from_zero().flat_map(|d| m.basis(d).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn builders_always_verify(d in arb_datum(3)) {
        prop_assert!(verify_datum(&d).unwrap().passes());
    }

    #[test]
    fn bracket_is_super_antisymmetric((d, s) in datum_and_symbols(3, 6, 2)) {
        let x = LoopElement::symbol(s[0]);
        let y = LoopElement::symbol(s[1]);
        prop_assert!(skew_residual(&d, &x, &y).unwrap().is_zero());
    }

    #[test]
    fn bracket_is_graded((d, s) in datum_and_symbols(3, 6, 2)) {
        let b = bracket(&d, &LoopElement::symbol(s[0]), &LoopElement::symbol(s[1])).unwrap();
        if !b.is_zero() {
            prop_assert_eq!(b.degree(), Some(s[0].degree() + s[1].degree()));
        }
    }

    #[test]
    fn jacobi_far_outside_the_window((d, s) in datum_and_symbols(3, 40, 3)) {
        let e: Vec<LoopElement> = s.iter().map(|x| LoopElement::symbol(*x)).collect();
        prop_assert!(super_jacobi_residual(&d, &e[0], &e[1], &e[2]).unwrap().is_zero());
    }

    #[test]
    fn json_round_trip(d in arb_datum(2)) {
        prop_assert_eq!(AlgebraDatum::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn commutation_soundness((d, s) in datum_and_symbols(2, 3, 2), ell in arb_scalar()) {
        let m = GradedModule::new(ModuleConfig::vacuum(d, ell, HalfInt::from_int(5)).unwrap());
        for w in states_up_to(&m, HalfInt::from_int(2)) {
            let r = m.commutation_residual(s[0], s[1], &ModuleVector::monomial(w));
            prop_assert!(r.is_zero());
        }
    }

    #[test]
    fn verma_commutation_soundness((d, s) in datum_and_symbols(1, 3, 2), ell in arb_scalar(), h in arb_scalar()) {
        let mut lambda = vec![int(0); d.dim_a];
        lambda[0] = h;
        let m = GradedModule::new(ModuleConfig::verma(d, ell, lambda, HalfInt::from_int(4)).unwrap());
        for w in states_up_to(&m, HalfInt::from_twice(3)) {
            let r = m.commutation_residual(s[0], s[1], &ModuleVector::monomial(w));
            prop_assert!(r.is_zero());
        }
    }

    #[test]
    fn l0_reads_the_degree(d in arb_datum(2), ell in arb_scalar(), lam in prop::collection::vec(arb_scalar(), 3)) {
        let lambda: Vec<Scalar> = lam.into_iter().take(d.dim_a).chain(std::iter::repeat(int(0))).take(d.dim_a).collect();
        let cfg = ModuleConfig::verma(d.clone(), ell, lambda, HalfInt::from_int(3)).unwrap();
        let h = cfg.lowest_weight().unwrap();
        let m = GradedModule::new(cfg);
        let l0 = LoopElement::from_coords(Parity::Even, &d.omega().unwrap(), 1);
        for w in states_up_to(&m, HalfInt::from_int(3)) {
            let v = ModuleVector::monomial(w.clone());
            let expect = v.scaled(&(monomial_degree(&w).to_scalar() + &h));
            prop_assert_eq!(m.act_element(&l0, &v), expect);
        }
    }

    #[test]
    fn action_shifts_degree((d, s) in datum_and_symbols(2, 4, 1), ell in arb_scalar()) {
        let m = GradedModule::new(ModuleConfig::vacuum(d, ell, HalfInt::from_int(4)).unwrap());
        for w in states_up_to(&m, HalfInt::from_int(3)) {
            let out = m.act(s[0], &ModuleVector::monomial(w.clone()));
            if !out.is_zero() {
                prop_assert_eq!(out.degree(), Some(monomial_degree(&w) + s[0].degree()));
            }
        }
    }

    #[test]
    fn truncation_is_monotone((d, s) in datum_and_symbols(2, 3, 1), ell in arb_scalar()) {
        let small = GradedModule::new(ModuleConfig::vacuum(d.clone(), ell.clone(), HalfInt::from_int(3)).unwrap());
        let big = GradedModule::new(ModuleConfig::vacuum(d, ell, HalfInt::from_int(5)).unwrap());
        for w in states_up_to(&small, HalfInt::from_int(3)) {
            let w = ModuleVector::monomial(w);
            let a = small.apply_mode(s[0], &w).unwrap().vector;
            let mut b = big.apply_mode(s[0], &w).unwrap().vector;
            b.truncate(HalfInt::from_int(3));
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn composite_modes_obey_the_weight_law(d in arb_datum(1), ell in arb_scalar(), n in -2i64..=3) {
        let va = VertexAlgebra::vacuum(d, ell, HalfInt::from_int(6)).unwrap();
        let m = va.module();
        let fields = states_up_to(m, HalfInt::from_int(3));
        let states = states_up_to(m, HalfInt::from_int(2));
        for v in &fields {
            for w in &states {
                let out = va.mode(&ModuleVector::monomial(v.clone()), n, &ModuleVector::monomial(w.clone()));
                if !out.is_zero() {
                    let expect = monomial_degree(v) - HalfInt::from_int(n + 1) + monomial_degree(w);
                    prop_assert_eq!(out.degree(), Some(expect));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn passing_data_have_no_jacobi_residual(d in arb_datum(1)) {
        prop_assert!(jacobi_scan(&d, 5).unwrap().is_empty());
    }

    #[test]
    fn perturbations_are_reported(
        d in arb_datum(1),
        which in 0usize..5,
        slot in 0usize..64,
        delta in arb_nonzero(),
    ) {
        let mut d = d;
        let (na, nu) = (d.dim_a, d.dim_u);
        match which {
            0 => d.mul_a[slot % na][slot / na % na][slot / (na * na) % na] += delta,
            1 => d.form_a[slot % na][slot / na % na] += delta,
            2 => d.act[slot % na][slot / na % nu][slot / (na * nu) % nu] += delta,
            3 => d.circ[slot % nu][slot / nu % nu][slot / (nu * nu) % na] += delta,
            _ => d.form_u[slot % nu][slot / nu % nu] += delta,
        }
        let report = verify_datum(&d).unwrap();
        let jacobi = jacobi_scan(&d, 4).unwrap();
        if !jacobi.is_empty() {
            prop_assert!(!report.passes());
            prop_assert!(report.violations.iter().all(|v| !v.witness.is_empty()));
        }
        if report.passes() {
            prop_assert!(jacobi.is_empty());
        }
    }

    #[test]
    fn radical_matches_brute_force(d in arb_datum(1), ell in prop_oneof![Just(int(0)), arb_scalar()]) {
        let m = GradedModule::new(ModuleConfig::vacuum(d, ell, HalfInt::from_int(3)).unwrap());
        for deg in HalfInt::from_int(3).steps_from_zero() {
            let basis = m.basis(deg).unwrap();
            let a = radical_basis(&m, deg).unwrap().coords(&basis);
            let b = brute_force_radical(&m, deg).unwrap().coords(&basis);
            prop_assert!(same_span(&a, &b));
        }
    }

    #[test]
    fn radical_is_stable_under_generator_modes(d in arb_datum(1), ell in prop_oneof![Just(int(0)), arb_scalar()]) {
        let top = HalfInt::from_int(4);
        let m = GradedModule::new(ModuleConfig::vacuum(d.clone(), ell, top).unwrap());
        let symbols: Vec<ModeSymbol> = (-2..=2)
            .flat_map(|n| {
                (0..d.dim_a).map(move |i| ModeSymbol::even(i, n))
                    .chain((0..d.dim_u).map(move |p| ModeSymbol::odd(p, n)))
            })
            .collect();
        for deg in (top - HalfInt::from_int(2)).steps_from_zero() {
            let rad = radical_basis(&m, deg).unwrap();
            for s in &symbols {
                let target = deg + s.degree();
                if target < HalfInt::ZERO || target > top {
                    continue;
                }
                let tb = m.basis(target).unwrap();
                let target_rad = radical_basis(&m, target).unwrap().coords(&tb);
                for v in &rad.vectors {
                    let image = m.act(*s, v).coords(&tb);
                    let mut both = target_rad.clone();
                    both.push(image);
                    prop_assert_eq!(rank(&both), rank(&target_rad));
                }
            }
        }
    }

    #[test]
    fn gram_rank_ignores_basis_order(d in arb_datum(2), ell in arb_scalar(), seed in any::<u64>()) {
        let m = GradedModule::new(ModuleConfig::vacuum(d, ell, HalfInt::from_int(4)).unwrap());
        for deg in HalfInt::from_int(4).steps_from_zero() {
            let g = gram(&m, deg).unwrap();
            let mut basis = g.basis.clone();
            let n = basis.len();
            for i in (1..n).rev() {
                let j = (seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64) >> 33) as usize % (i + 1);
                basis.swap(i, j);
            }
            prop_assert_eq!(gram_on(&m, deg, basis).rank(), g.rank());
            prop_assert!(g.is_symmetric());
        }
    }

    #[test]
    fn form_is_invariant_for_all_generators(d in arb_datum(1), ell in arb_scalar()) {
        let m = GradedModule::new(ModuleConfig::vacuum(d.clone(), ell, HalfInt::from_int(4)).unwrap());
        let symbols: Vec<ModeSymbol> = (-2..=4)
            .flat_map(|n| {
                (0..d.dim_a).map(move |i| ModeSymbol::even(i, n))
                    .chain((0..d.dim_u).map(move |p| ModeSymbol::odd(p, n)))
            })
            .collect();
        let (_, failures) = adjoint_failures(&m, &symbols, HalfInt::from_int(3));
        prop_assert!(failures.is_empty());
    }

    #[test]
    fn nondegenerate_data_embed(d in arb_datum(2), ell in arb_nonzero()) {
        let m = GradedModule::new(ModuleConfig::vacuum(d.clone(), ell, HalfInt::from_int(2)).unwrap());
        let zero = GradedModule::new(ModuleConfig::vacuum(d, int(0), HalfInt::from_int(2)).unwrap());
        for deg in [HalfInt::from_twice(3), HalfInt::from_int(2)] {
            prop_assert_eq!(radical_basis(&m, deg).unwrap().dim(), 0);
            prop_assert_eq!(radical_basis(&zero, deg).unwrap().dim(), zero.graded_dimension(deg).unwrap());
        }
    }
}
