use c2forms::fields::{Element, FieldTower, FiniteField};
use c2forms::quadforms::{parse_quad, rewrite_equiv, Mode, Obstruction, QuadForm, RewriteOptions};
use c2forms::valuations::{
    anisotropic_certificate, default_chain, equivalence_obstruction, isotropy_search, residue_forms, residue_mismatch,
    val_residue, val_split, witt_trivial, AnisotropyCertificate, IsotropyOptions, ResidueCase, ValuationContext, ValuationError,
};
use c2forms::TriState;
use proptest::prelude::*;

fn f() -> FieldTower {
    FieldTower::xy(2).unwrap()
}

fn e(t: &FieldTower, s: &str) -> Element {
    t.parse(s).unwrap()
}

fn y_adic() -> ValuationContext {
    ValuationContext::zero_of(1)
}

const ZETA: &str = "x*y*(1 + y^2*x^3 + x*y)";

fn diag(t: &FieldTower, entries: &[&str]) -> QuadForm {
    QuadForm::new(Vec::new(), entries.iter().map(|s| e(t, s)).collect(), 0).unwrap()
}

#[test]
fn splitting_examples() {
    let t = f();
    assert_eq!(val_split(&e(&t, "x^-2*y^-1"), &y_adic()).unwrap(), (-1, e(&t, "x^-2")));
    assert_eq!(val_split(&t.one(), &y_adic()).unwrap(), (0, t.one()));
    assert_eq!(val_split(&t.zero(), &y_adic()), Err(ValuationError::ZeroElement));
    let a = format!("y^-1*(1+x)");
    let b = e(&t, &format!("x^-3*y^-2 + {ZETA}*({a})^2"));
    let (eps, u) = val_split(&b, &y_adic()).unwrap();
    assert_eq!(eps, -2);
    assert_eq!(val_residue(&u, &y_adic()).unwrap(), (0, e(&t, "x^-3")));
    // x^-1-adic valuation is minus the degree
    let inf = ValuationContext::infinity_of(0);
    assert_eq!(val_split(&e(&t, "x^3 + x"), &inf).unwrap().0, -3);
    assert_eq!(val_residue(&e(&t, "(x^3+x)/(w*x^3 + 1)"), &inf).unwrap(), (0, t.constant(3)));
    assert_eq!(ValuationContext::parse(&t, "x^-1"), Some(inf));
    assert_eq!(y_adic().residue_field(&t), "GF(4)(x)");
}

#[test]
fn residue_case_a() {
    let t = f();
    let phi = parse_quad("[x, 1+y]", &t, 0).unwrap();
    let r = residue_forms(&phi, &y_adic(), &t).unwrap();
    assert_eq!(r.first, parse_quad("[x, 1]", &t, 0).unwrap());
    assert_eq!(r.second.dim(), 0);
    assert_eq!(r.cases, vec![(ResidueCase::A, false)]);
}

#[test]
fn residue_case_b_and_scaled_block() {
    let t = f();
    let phi = parse_quad("[1, x^-2*y^-1]", &t, 0).unwrap();
    let r = residue_forms(&phi, &y_adic(), &t).unwrap();
    assert_eq!(r.first, diag(&t, &["1"]));
    assert_eq!(r.second, diag(&t, &["x^-2"]));
    assert!(residue_mismatch(&r.second, &diag(&t, &["1"]), &t).is_none());
    let scaled = parse_quad("x*(1 + y^2*x^3 + x*y)*[1, x^-2*y^-1]", &t, 0).unwrap();
    let s = residue_forms(&scaled, &y_adic(), &t).unwrap();
    assert_eq!(s.first, diag(&t, &["x"]));
    assert!(residue_mismatch(&r.first, &s.first, &t).is_some());
}

#[test]
fn residue_cases_for_the_shifted_slot() {
    let t = f();
    // A = y^-1 (1+x): slot of even valuation, case C
    let b1 = format!("x^-3*y^-2 + {ZETA}*(y^-1*(1+x))^2");
    let r = residue_forms(&QuadForm::binary(t.one(), e(&t, &b1), 0).unwrap(), &y_adic(), &t).unwrap();
    assert_eq!(r.cases, vec![(ResidueCase::C, false)]);
    assert!(residue_mismatch(&r.first, &diag(&t, &["1", "x"]), &t).is_none());
    assert_eq!(r.second.dim(), 0);
    // A = y^-2 (1+x): odd valuation, case B, second residue ⟨x ū²⟩ ≅ ⟨x⟩
    let b2 = format!("x^-3*y^-2 + {ZETA}*(y^-2*(1+x))^2");
    let r = residue_forms(&QuadForm::binary(t.one(), e(&t, &b2), 0).unwrap(), &y_adic(), &t).unwrap();
    assert_eq!(r.cases, vec![(ResidueCase::B, false)]);
    assert_eq!(r.second, diag(&t, &["x*(1+x)^2"]));
    assert!(residue_mismatch(&r.second, &diag(&t, &["x"]), &t).is_none());
    assert!(residue_mismatch(&r.second, &diag(&t, &["1"]), &t).is_some());
}

#[test]
fn odd_coefficient_swaps_residues() {
    let t = f();
    let r = residue_forms(&parse_quad("y*[1, x] + <y^3*x, x>", &t, 0).unwrap(), &y_adic(), &t).unwrap();
    assert_eq!(r.first.blocks.len(), 0);
    assert_eq!(r.second.blocks.len(), 1);
    assert_eq!(r.first.singular, vec![e(&t, "x")]);
    assert_eq!(r.second.singular, vec![e(&t, "x")]);
    assert_eq!(r.cases[0], (ResidueCase::A, true));
}

#[test]
fn residue_errors() {
    let t = f();
    let pos = QuadForm::binary(t.one(), e(&t, "y"), 0).unwrap();
    assert!(matches!(residue_forms(&pos, &y_adic(), &t), Err(ValuationError::OutsideCases(_))));
    let square = QuadForm::binary(t.one(), e(&t, "x^2*y^-2"), 0).unwrap();
    assert!(matches!(residue_forms(&square, &y_adic(), &t), Err(ValuationError::UncertifiedCaseC(_))));
    let mut s = FieldTower::xy(2).unwrap();
    s.adjoin_artin_schreier(e(&s, "x")).unwrap();
    let lifted = QuadForm::binary(s.one(), s.parse("A1").unwrap(), 1).unwrap();
    assert_eq!(residue_forms(&lifted, &y_adic(), &s), Err(ValuationError::ExtensionLevel));
}

#[test]
fn anisotropy_one_variable() {
    let t = FieldTower::new(FiniteField::gf4(), &["x"]).unwrap();
    let chain = [ValuationContext::zero_of(0)];
    for s in ["[1, x^-3]", "[1, w*x^-1]", "[1, (1+x)*x^-5]", "[1, w] + x*[1, w]"] {
        let phi = parse_quad(s, &t, 0).unwrap();
        let c = anisotropic_certificate(&phi, &chain, &t).unwrap();
        assert!(c.is_proven(), "{s}: {c:?}");
        let opts = IsotropyOptions { degree_bound: 6, max_candidates: 2000 };
        assert!(isotropy_search(&phi, &t, &opts).is_none(), "{s}");
    }
    for s in ["[1, x^-1] + [1, x^-1]", "[1, x^-1] + x*[1, x^-3]"] {
        let iso = parse_quad(s, &t, 0).unwrap();
        let w = anisotropic_certificate(&iso, &chain, &t).unwrap().refuted().unwrap();
        assert!(iso.value(&w).is_zero());
    }
}

#[test]
fn finite_field_isotropy() {
    let t = FieldTower::new(FiniteField::gf4(), &[]).unwrap();
    let phi = parse_quad("[1, 1]", &t, 0).unwrap();
    let w = anisotropic_certificate(&phi, &[], &t).unwrap().refuted().unwrap();
    assert!(phi.value(&w).is_zero() && w.iter().any(|c| !c.is_zero()));
    let an = parse_quad("[1, w]", &t, 0).unwrap();
    assert!(matches!(anisotropic_certificate(&an, &[], &t).unwrap().proven(), Some(AnisotropyCertificate::Finite { .. })));
    let h = parse_quad("[0, 0]", &t, 0).unwrap();
    let w = isotropy_search(&h, &t, &IsotropyOptions::default()).unwrap();
    assert!(h.value(&w).is_zero());
}

#[test]
fn shifted_slot_forms_are_anisotropic() {
    let t = f();
    let chain = default_chain(&t);
    for a in ["y^-1*(1+x)", "y^-2*x", "1 + x"] {
        let b = format!("x^-2*y^-1 + {ZETA}*({a})^2");
        let phi = QuadForm::binary(t.one(), e(&t, &b), 0).unwrap();
        let c = anisotropic_certificate(&phi, &chain, &t).unwrap();
        let cert = c.proven().unwrap_or_else(|| panic!("{a}"));
        assert!(cert.depth() >= 1);
        let js = cert.to_json(&t);
        assert_eq!(js["kind"], "residues");
        assert_eq!(js["uniformizer"], "y");
    }
}

#[test]
fn residue_refutation_of_scaled_isometry() {
    let t = f();
    let left = parse_quad("[1, x^-2*y^-1]", &t, 0).unwrap();
    let right = parse_quad("x*(1 + y^2*x^3 + x*y)*[1, x^-2*y^-1]", &t, 0).unwrap();
    let ob = equivalence_obstruction(&left, &right, Mode::Isometry, &t).unwrap();
    assert!(matches!(ob, Obstruction::Residue(_)), "{ob:?}");
    let opts = RewriteOptions { max_nodes: 300, max_depth: 3, ..Default::default() };
    let r = rewrite_equiv(&left, &right, Mode::Isometry, &t, &opts).unwrap();
    assert!(r.is_refuted(), "{r:?}");
    let w = equivalence_obstruction(&left, &right, Mode::Witt, &t).unwrap();
    assert!(matches!(w, Obstruction::Anisotropic(_)));
    assert!(equivalence_obstruction(&left, &left, Mode::Isometry, &t).is_none());
}

#[test]
fn quasilinear_span_comparison() {
    let t = f();
    assert!(residue_mismatch(&diag(&t, &["1", "x"]), &diag(&t, &["x", "1+x"]), &t).is_none());
    assert!(residue_mismatch(&diag(&t, &["1", "x"]), &diag(&t, &["1", "y"]), &t).is_some());
    assert!(residue_mismatch(&diag(&t, &["1"]), &diag(&t, &["1", "x"]), &t).is_some());
    assert!(residue_mismatch(&diag(&t, &["x^3"]), &diag(&t, &["x^-1"]), &t).is_none());
}

fn random_form(seed: u64, t: &FieldTower) -> QuadForm {
    let mut r = c2forms::random::rng(seed);
    let mut pick = || Element::from_ratfun(c2forms::random::ratfun(&mut r, t.base(), 2, 2));
    let mut blocks = Vec::new();
    for _ in 0..2 {
        let a = pick();
        let b = pick();
        if !a.is_zero() {
            blocks.push(c2forms::quadforms::Binary::new(a, b).unwrap());
        }
    }
    QuadForm::from_blocks(blocks, 0).unwrap()
}

/// Dimensions add up at every residue step of a certificate.
fn check_dims(c: &AnisotropyCertificate, dim: usize) {
    if let AnisotropyCertificate::Residues { pair, first, second, .. } = c {
        assert_eq!(pair.first.dim() + pair.second.dim(), dim);
        check_dims(first, pair.first.dim());
        check_dims(second, pair.second.dim());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn split_reconstructs(seed in any::<u64>(), which in 0usize..3) {
        let t = f();
        let mut r = c2forms::random::rng(seed);
        let a = Element::from_ratfun(c2forms::random::ratfun(&mut r, t.base(), 2, 3));
        let b = Element::from_ratfun(c2forms::random::ratfun(&mut r, t.base(), 2, 3));
        prop_assume!(!a.is_zero() && !b.is_zero());
        let ctx = [ValuationContext::zero_of(0), ValuationContext::zero_of(1), ValuationContext::infinity_of(1)][which];
        let (ea, ua) = val_split(&a, &ctx).unwrap();
        let (eb, _) = val_split(&b, &ctx).unwrap();
        prop_assert_eq!(val_split(&ua, &ctx).unwrap().0, 0);
        let pi = match ctx.place { c2forms::fields::Place::Zero(v) => Element::var(t.base(), v), c2forms::fields::Place::Infinity(v) => Element::var(t.base(), v).inv().unwrap() };
        prop_assert_eq!(pi.pow(ea).unwrap().mul(&ua), a.clone());
        let ab = a.mul(&b);
        prop_assert_eq!(val_split(&ab, &ctx).unwrap().0, ea + eb);
        let (_, ra) = val_residue(&a, &ctx).unwrap();
        let (_, rb) = val_residue(&b, &ctx).unwrap();
        prop_assert_eq!(val_residue(&ab, &ctx).unwrap().1, ra.mul(&rb));
        let s = a.add(&b);
        if !s.is_zero() {
            prop_assert!(val_split(&s, &ctx).unwrap().0 >= ea.min(eb));
        }
    }

    #[test]
    fn certificates_and_witnesses_exclude_each_other(seed in any::<u64>()) {
        let t = f();
        let phi = random_form(seed, &t);
        let opts = IsotropyOptions { degree_bound: 2, max_candidates: 150 };
        let witness = isotropy_search(&phi, &t, &opts);
        if let Some(w) = &witness {
            prop_assert!(phi.value(w).is_zero());
        }
        if let Ok(c) = anisotropic_certificate(&phi, &default_chain(&t), &t) {
            if let Some(cert) = c.proven() {
                prop_assert!(witness.is_none());
                check_dims(&cert, phi.dim());
            }
        }
    }
}

#[test]
fn witt_triviality() {
    let t = f();
    let opts = IsotropyOptions::default();
    let split = parse_quad("[1, x] + x*[1, x] + [0, 0]", &t, 0).unwrap();
    let r = witt_trivial(&split, &t, &opts).unwrap();
    // x is the value of [1,x] at (0,1), so the Pfister part is hyperbolic too
    assert_eq!(r.proven().map(|z| z.len()), Some(3));

    let arf = parse_quad("[1, x] + [0, 0]", &t, 0).unwrap();
    assert!(matches!(witt_trivial(&arf, &t, &opts).unwrap(), TriState::Refuted(Obstruction::Arf(_))));

    // trivial Arf invariant but anisotropic
    let pfister = parse_quad(&format!("[1, x^-2*y^-1] + ({ZETA})*[1, x^-2*y^-1]"), &t, 0).unwrap();
    let r = witt_trivial(&pfister, &t, &opts).unwrap();
    assert!(matches!(r, TriState::Refuted(Obstruction::Anisotropic(_))), "{r:?}");
}
