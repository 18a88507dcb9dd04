use c2forms::diffforms::{
    d, kato_e, kato_e_pair_slot, kato_f, log_symbol, wp_diff, wp_diff_sum, DiffError, DiffForm, LogTerm,
};
use c2forms::fields::{Element, FieldTower};
use c2forms::quadforms::{BilinForm, QuadForm};
use proptest::prelude::*;

fn e(t: &FieldTower, s: &str) -> Element {
    t.parse(s).unwrap()
}

#[test]
fn exterior_derivative_examples() {
    let t = FieldTower::xy(2).unwrap();
    let dxy = d(&DiffForm::function(e(&t, "x*y")), &t).unwrap();
    assert_eq!(dxy, DiffForm::one_form(e(&t, "y"), e(&t, "x")));
    assert_eq!(dxy.display(&t).to_string(), "(y) dx + (x) dy");
    assert!(d(&DiffForm::function(e(&t, "x^2")), &t).unwrap().is_zero());
    let w = DiffForm::one_form(e(&t, "y"), t.zero());
    assert_eq!(d(&w, &t).unwrap(), DiffForm::two_form(t.one()));
    assert_eq!(d(&DiffForm::two_form(t.one()), &t), Err(DiffError::DegreeOverflow));
    let mut r = FieldTower::xy(2).unwrap();
    r.adjoin_radical(e(&r, "x")).unwrap();
    assert_eq!(d(&DiffForm::function(r.one()), &r), Err(DiffError::RadicalStep));
}

#[test]
fn logarithmic_symbols() {
    let t = FieldTower::xy(2).unwrap();
    assert_eq!(log_symbol(&[e(&t, "x")], &t).unwrap(), DiffForm::one_form(e(&t, "x^-1"), t.zero()));
    let zeta = e(&t, "x*y*(1 + y^2*x^3 + x*y)");
    assert!(!log_symbol(&[zeta], &t).unwrap().is_zero());
    assert!(log_symbol(&[e(&t, "(x+y)^2")], &t).unwrap().is_zero());
    let two = log_symbol(&[e(&t, "x"), e(&t, "y")], &t).unwrap();
    assert_eq!(two, DiffForm::two_form(e(&t, "x^-1*y^-1")));
    assert_eq!(log_symbol(&[t.zero()], &t), Err(DiffError::ZeroElement));
    assert_eq!(log_symbol(&[t.one(), t.one(), t.one()], &t), Err(DiffError::DegreeOverflow));
}

#[test]
fn artin_schreier_differentials() {
    let t = FieldTower::xy(2).unwrap();
    let dx = log_symbol(&[e(&t, "x")], &t).unwrap();
    assert!(wp_diff(&t.zero(), &dx).is_zero());
    assert_eq!(wp_diff(&e(&t, "w"), &dx), dx);
    let c = e(&t, "x*y^-1");
    assert_eq!(wp_diff(&c, &dx), dx.scale(&c.square().add(&c)));
    let terms = vec![
        LogTerm { coeff: e(&t, "w"), slots: vec![e(&t, "x")] },
        LogTerm { coeff: e(&t, "w"), slots: vec![e(&t, "x")] },
    ];
    assert!(wp_diff_sum(&terms, 1, &t).unwrap().is_zero());
    // dα = da over an Artin-Schreier step
    let mut s = FieldTower::xy(2).unwrap();
    s.adjoin_artin_schreier(e(&s, "x^-1*y")).unwrap();
    let da = d(&DiffForm::function(e(&s, "A1")), &s).unwrap();
    assert_eq!(da, d(&DiffForm::function(e(&s, "x^-1*y")), &s).unwrap());
}

#[test]
fn kato_translations() {
    let t = FieldTower::xy(2).unwrap();
    let (a, b) = (e(&t, "x*y"), e(&t, "y^-1"));
    let phi = QuadForm::pfister(&t, std::slice::from_ref(&a), b.clone(), 0).unwrap();
    assert_eq!(kato_e(&phi, &t).unwrap(), log_symbol(&[a.clone()], &t).unwrap().scale(&b));
    let bil = BilinForm::pfister(&t, std::slice::from_ref(&a), 0).unwrap();
    assert_eq!(kato_f(&bil, &t).unwrap(), log_symbol(&[a], &t).unwrap());
    let sq = BilinForm::pfister(&t, &[e(&t, "x^2")], 0).unwrap();
    assert!(kato_f(&sq, &t).unwrap().is_zero());
    let two = QuadForm::pfister(&t, &[e(&t, "x"), e(&t, "y")], b.clone(), 0).unwrap();
    assert_eq!(kato_e(&two, &t).unwrap(), DiffForm::two_form(b.mul(&e(&t, "x^-1*y^-1"))));
    let three = QuadForm::pfister(&t, &[e(&t, "x"), e(&t, "y"), e(&t, "x+y")], b, 0).unwrap();
    assert_eq!(kato_e(&three, &t), Err(DiffError::DegreeOverflow));
    let not = QuadForm::from_blocks(
        vec![c2forms::quadforms::Binary::new(t.one(), e(&t, "x")).unwrap(), c2forms::quadforms::Binary::new(e(&t, "y"), e(&t, "y")).unwrap()],
        0,
    )
    .unwrap();
    assert_eq!(kato_e(&not, &t), Err(DiffError::NotPfisterShape));
}

#[test]
fn slot_exchange_changes_kato_by_an_exact_form() {
    let t = FieldTower::xy(2).unwrap();
    let (before, after, f) = kato_e_pair_slot(&e(&t, "x^-1*y + y^3"), &e(&t, "x^-3"), &t).unwrap();
    let df = d(&DiffForm::function(f), &t).unwrap();
    assert_eq!(before.add(&after).unwrap(), df);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_squared_vanishes_and_leibniz_holds(s1 in any::<u64>(), s2 in any::<u64>()) {
        let t = FieldTower::xy(2).unwrap();
        let mut r = c2forms::random::rng(s1 ^ (s2 << 1));
        let f = c2forms::random::element(&mut r, &t, 0, 3);
        let g = c2forms::random::element(&mut r, &t, 0, 3);
        let df = d(&DiffForm::function(f.clone()), &t).unwrap();
        prop_assert!(d(&df, &t).unwrap().is_zero());
        let dg = d(&DiffForm::function(g.clone()), &t).unwrap();
        let dfg = d(&DiffForm::function(f.mul(&g)), &t).unwrap();
        prop_assert_eq!(dfg, dg.scale(&f).add(&df.scale(&g)).unwrap());
        prop_assert!(d(&DiffForm::function(f.square()), &t).unwrap().is_zero());
    }
}
