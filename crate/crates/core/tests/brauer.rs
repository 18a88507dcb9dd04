use c2forms::brauer::{
    adapted_decomposition_check, adapted_decomposition_search, associated_form, clifford_class, kernel_generators,
    parse_class, parse_symbol, replay_symbols, symbol_equal, AdaptedFailure, BrauerClass, BrauerError, FamilyKind,
    KernelShape, QSymbol, SymbolOptions,
};
use c2forms::fields::{Element, FieldTower};
use c2forms::quadforms::{parse_quad, replay, rewrite_equiv, Mode, QuadForm, RewriteOptions};
use proptest::prelude::*;

const B: &str = "x^-2*y^-1 + 1";
const C: &str = "x^-3*(y^-2 + x*y^-1 + x^3)";

fn e(t: &FieldTower, s: &str) -> Element {
    t.parse(s).unwrap()
}

fn sym(t: &FieldTower, a: &str, b: &str) -> QSymbol {
    QSymbol::new(e(t, a), e(t, b)).unwrap()
}

fn class(t: &FieldTower, src: &str) -> BrauerClass {
    parse_class(src, t, 0).unwrap()
}

fn check_script(c1: &BrauerClass, c2: &BrauerClass, t: &FieldTower) {
    let r = symbol_equal(c1, c2, t, &SymbolOptions::default()).unwrap();
    let script = r.proven().expect("classes are equal");
    assert!(replay_symbols(&c1.sum(c2).unwrap(), &script).unwrap().is_empty());
}

#[test]
fn clifford_classes_of_forms() {
    let t = FieldTower::xy(2).unwrap();
    let phi = parse_quad("x*[1, y] + [1, x^-1]", &t, 0).unwrap();
    let c = clifford_class(&phi).unwrap();
    assert_eq!(c.symbols, vec![sym(&t, "y", "x"), sym(&t, "x^-1", "1")]);
    let h = parse_quad("[0,0]", &t, 0).unwrap();
    check_script(&clifford_class(&h).unwrap(), &BrauerClass::split(0), &t);
    let singular = QuadForm::new(Vec::new(), vec![t.one()], 0).unwrap();
    assert_eq!(clifford_class(&singular), Err(BrauerError::SingularForm));
    // sums of forms give unions of symbols
    let psi = parse_quad("y*[1, x*y]", &t, 0).unwrap();
    let both = clifford_class(&phi.orth_sum(&psi).unwrap()).unwrap();
    assert_eq!(both, c.sum(&clifford_class(&psi).unwrap()).unwrap());
}

#[test]
fn symbol_syntax_round_trips() {
    let t = FieldTower::xy(2).unwrap();
    let c = class(&t, "[x, y^2) + [x^-1*(1+y), x*y)");
    assert_eq!(c.len(), 2);
    let shown = c.display(&t).to_string();
    assert_eq!(parse_class(&shown, &t, 0).unwrap(), c);
    assert!(class(&t, "0").is_empty());
    assert_eq!(parse_symbol("[x, 0)", &t, 0), Err(BrauerError::ZeroNormSlot));
    assert!(matches!(parse_class("[x, y) [", &t, 0), Err(BrauerError::Parse(_))));
}

#[test]
fn square_norm_slot_is_split() {
    let t = FieldTower::xy(2).unwrap();
    check_script(&class(&t, "[x, y^2)"), &BrauerClass::split(0), &t);
    // a·(square) is the norm of a multiple of the generator
    check_script(&class(&t, "[x^-3*y^-2, x)"), &BrauerClass::split(0), &t);
    // additivity and multiplicativity
    check_script(&class(&t, "[x, y) + [y^-1, y)"), &class(&t, "[x + y^-1, y)"), &t);
    check_script(&class(&t, "[x, y) + [x, x*y)"), &class(&t, "[x, x)"), &t);
}

#[test]
fn star_norm_forms_have_equal_classes() {
    let mut t = FieldTower::xy(2).unwrap();
    t.adjoin_artin_schreier(e(&t, "x")).unwrap();
    let step = t.step(1).unwrap().clone();
    let nb = e(&t, "x*A1").norm_trace(&step).unwrap().0;
    let ng = e(&t, "y^-1 + x*A1").norm_trace(&step).unwrap().0;
    let left = QuadForm::pfister(&t, &[nb], e(&t, B), 0).unwrap();
    let right = QuadForm::pfister(&t, &[ng], e(&t, C), 0).unwrap();
    check_script(&clifford_class(&right).unwrap(), &clifford_class(&left).unwrap(), &t);
}

#[test]
fn nonsplit_symbol_is_refuted() {
    let t = FieldTower::new(c2forms::fields::FiniteField::gf4(), &["x"]).unwrap();
    let c = class(&t, "[w, x)");
    let r = symbol_equal(&c, &BrauerClass::split(0), &t, &SymbolOptions::default()).unwrap();
    let o = r.refuted().expect("quaternion algebra is not split");
    assert_eq!(o.form.dim(), 4);
    assert_eq!(o.form, associated_form(&o.state, &t).unwrap());
    // two distinct symbols differ by a nonsplit class; the Albert form is anisotropic
    let t2 = FieldTower::xy(2).unwrap();
    let r = symbol_equal(&class(&t2, "[w, x)"), &class(&t2, "[w, y)"), &t2, &SymbolOptions::default()).unwrap();
    assert!(r.is_refuted(), "{r:?}");
    let lvl = BrauerClass::split(1);
    assert_eq!(symbol_equal(&c, &lvl, &t, &SymbolOptions::default()), Err(BrauerError::LevelMismatch));
}

#[test]
fn kernel_generator_families() {
    let mut t = FieldTower::xy(2).unwrap();
    t.adjoin_radical(e(&t, "x")).unwrap();
    let fams = kernel_generators(&t, 1).unwrap();
    assert_eq!(fams.len(), 1);
    assert_eq!(KernelShape::of_tower(&t).unwrap().name(), "K");
    let member = fams[0].instantiate(&t, &[e(&t, "y^-1")]).unwrap();
    assert_eq!(member.dim(), 4);
    let script = fams[0].vanishing_script(&member).unwrap();
    assert_eq!(replay(&c2forms::transfers::extend_to(&member, 1).unwrap(), &script, Mode::Witt).unwrap().dim(), 0);

    t.adjoin_artin_schreier(e(&t, "y^-1")).unwrap();
    let fams = kernel_generators(&t, 2).unwrap();
    assert_eq!(KernelShape::of_tower(&t).unwrap().name(), "K(alpha)");
    assert!(matches!(fams[1].kind, FamilyKind::ArtinSchreier { .. }));
    for f in &fams {
        let member = f.instantiate(&t, &[e(&t, "y"), e(&t, "x*y^-1 + 1")]).unwrap();
        assert_eq!(member.dim(), 8);
        f.vanishing_script(&member).unwrap();
        assert!(matches!(f.instantiate(&t, &[e(&t, "y")]), Err(BrauerError::ArityMismatch { .. })));
    }

    t.adjoin_artin_schreier(e(&t, "x^-1*y^-1")).unwrap();
    assert_eq!(kernel_generators(&t, 1).unwrap().len(), 3);
    assert_eq!(KernelShape::of_tower(&t).unwrap().name(), "K(alpha,beta)");

    let mut bad = FieldTower::xy(2).unwrap();
    bad.adjoin_artin_schreier(e(&bad, "x^-1")).unwrap();
    assert!(matches!(kernel_generators(&bad, 1), Err(BrauerError::UnsupportedShape(_))));
}

#[test]
fn adapted_decompositions() {
    let t0 = FieldTower::xy(2).unwrap();
    let opts = SymbolOptions::default();
    // one Artin-Schreier step
    let mut t = t0.clone();
    t.adjoin_artin_schreier(e(&t0, "y^-1")).unwrap();
    let c = class(&t, "[y^-1, x)");
    let cand = vec![sym(&t, "y^-1", "x")];
    let r = adapted_decomposition_check(&c, t.steps(), &cand, &BrauerClass::split(0), &t, &opts).unwrap();
    assert!(r.is_proven());
    let wrong = vec![sym(&t, "x^-1", "x")];
    let r = adapted_decomposition_check(&c, t.steps(), &wrong, &BrauerClass::split(0), &t, &opts).unwrap();
    assert_eq!(r.refuted(), Some(AdaptedFailure::StepNotContained { index: 0 }));
    assert!(matches!(
        adapted_decomposition_check(&c, t.steps(), &[], &BrauerClass::split(0), &t, &opts),
        Err(BrauerError::ArityMismatch { expected: 1, got: 0 })
    ));
    // radical steps with class ⊗ [cᵢ, aᵢ)
    let mut r2 = t0.clone();
    r2.adjoin_radical(e(&t0, "x")).unwrap();
    r2.adjoin_radical(e(&t0, "y")).unwrap();
    let c = class(&r2, "[x^-1*y^-1, x) + [y^-1 + x, y*x^2) + [x^-1, x*y)");
    let cand = vec![sym(&r2, "x^-1*y^-1", "x"), sym(&r2, "y^-1 + x", "y*x^2")];
    let rest = class(&r2, "[x^-1, x*y)");
    assert!(adapted_decomposition_check(&c, r2.steps(), &cand, &rest, &r2, &opts).unwrap().is_proven());
    let found = adapted_decomposition_search(&c, r2.steps(), 1, &r2, &opts).unwrap();
    assert!(found.is_proven());
}

#[test]
fn pfister_isometry_implies_equal_classes() {
    let mut t = FieldTower::xy(2).unwrap();
    t.adjoin_artin_schreier(e(&t, "x")).unwrap();
    let ropts = RewriteOptions::default();
    let mut proven = 0;
    for (r, s, u, v, f) in [("y", "x^-1", "1", "1", "y"), ("x*y", "y^-1", "x", "1", "x^-1"), ("y^-1", "x^-1*y", "0", "y", "1")] {
        let (r, s) = (e(&t, r), e(&t, s));
        let n = e(&t, u).square().add(&e(&t, u).mul(&e(&t, v))).add(&s.mul(&e(&t, v).square()));
        let s2 = s.add(&e(&t, f).wp());
        let p1 = QuadForm::pfister(&t, &[r.clone()], s.clone(), 0).unwrap();
        let p2 = QuadForm::pfister(&t, &[r.mul(&n)], s2, 0).unwrap();
        if rewrite_equiv(&p1, &p2, Mode::Isometry, &t, &ropts).unwrap().is_proven() {
            check_script(&clifford_class(&p1).unwrap(), &clifford_class(&p2).unwrap(), &t);
            proven += 1;
        }
    }
    assert!(proven >= 2, "only {proven} isometries found");
}

fn small_class(t: &FieldTower, seed: u64, n: usize) -> BrauerClass {
    let mut r = c2forms::random::rng(seed);
    let syms = (0..n)
        .map(|_| {
            let a = c2forms::random::element(&mut r, t, 0, 1);
            let b = c2forms::random::nonzero_element(&mut r, t, 0, 1);
            QSymbol::new(a, b).unwrap()
        })
        .collect();
    BrauerClass::new(syms, 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn symbol_equality_is_reflexive_and_symmetric(s1 in any::<u64>(), s2 in any::<u64>(), n in 1usize..3) {
        let t = FieldTower::xy(2).unwrap();
        let opts = SymbolOptions { obstructions: false, ..Default::default() };
        let c1 = small_class(&t, s1, n);
        let c2 = small_class(&t, s2, n);
        prop_assert!(symbol_equal(&c1, &c1, &t, &opts).unwrap().is_proven());
        let ab = symbol_equal(&c1, &c2, &t, &opts).unwrap().status();
        let ba = symbol_equal(&c2, &c1, &t, &opts).unwrap().status();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn associated_form_dimension(seed in any::<u64>(), n in 0usize..4) {
        let t = FieldTower::xy(2).unwrap();
        let c = small_class(&t, seed, n);
        let f = associated_form(&c, &t).unwrap();
        prop_assert_eq!(f.dim(), if n == 0 { 0 } else { 2 * n + 2 });
        if n > 0 {
            prop_assert!(t.is_in_wp(&f.arf().unwrap(), 0).is_proven());
        }
    }
}
