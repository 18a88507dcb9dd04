use c2forms::fields::{Element, FieldTower};
use c2forms::quadforms::{parse_quad, rewrite_equiv, Mode, QuadForm, RewriteOptions};
use c2forms::transfers::{
    diagonalize, extend_to, pcex2_check, trace_transfer_binary, transfer_bilin, transfer_quad, transfer_quad_direct,
    transfer_quad_frobenius, verify_descent, CriterionFailure, CriterionInput, GramMatrix, Representation,
    TransferError, TransferKind, TransferMap,
};
use c2forms::TriState;
use proptest::prelude::*;

const B: &str = "x^-2*y^-1 + 1";
const C: &str = "x^-3*(y^-2 + x*y^-1 + x^3)";

fn star() -> FieldTower {
    let mut t = FieldTower::xy(2).unwrap();
    t.adjoin_artin_schreier(t.parse("x").unwrap()).unwrap();
    t
}

fn e(t: &FieldTower, s: &str) -> Element {
    t.parse(s).unwrap()
}

fn smap(t: &FieldTower) -> TransferMap {
    TransferMap::for_level(t, 1, TransferKind::Scharlau).unwrap()
}

fn same_square_classes(t: &FieldTower, a: &[Element], b: &[Element]) -> bool {
    let mut used = vec![false; b.len()];
    a.len() == b.len()
        && a.iter().all(|x| {
            let k = (0..b.len()).find(|&k| !used[k] && t.sqrt(&x.mul(&b[k]), 0).unwrap().is_some());
            k.map(|k| used[k] = true).is_some()
        })
}

#[test]
fn bilinear_transfers_of_the_star_elements() {
    let t = star();
    let m = smap(&t);
    let beta = transfer_bilin(&e(&t, "x*A1"), &m).unwrap();
    assert_eq!(beta.gram.0, vec![vec![e(&t, "x"), e(&t, "x")], vec![e(&t, "x"), e(&t, "x + x^2")]]);
    assert!(beta.gram.is_symmetric());
    assert!(same_square_classes(&t, &beta.diagonal, &[t.one(), e(&t, "x")]));
    let one = transfer_bilin(&t.one(), &m).unwrap();
    assert_eq!(one.gram.0[0][0], t.zero());
    assert_eq!(one.is_witt_trivial(&t, 0), Some(true));
    let gamma = transfer_bilin(&e(&t, "y^-1 + x*A1"), &m).unwrap();
    assert_eq!(gamma.gram.0[0][1], e(&t, "x + y^-1"));
    assert_eq!(gamma.diagonal, vec![e(&t, "x"), e(&t, "y^-1 + x^2 + x^-1*y^-2")]);
    assert_eq!(transfer_bilin(&t.zero(), &m), Err(TransferError::ZeroElement));
}

#[test]
fn diagonalization_splits_alternating_planes() {
    let t = FieldTower::xy(2).unwrap();
    let (o, z, x) = (t.one(), t.zero(), e(&t, "x"));
    let g = GramMatrix(vec![
        vec![z.clone(), o.clone(), z.clone()],
        vec![o.clone(), z.clone(), x.clone()],
        vec![z.clone(), x.clone(), z.clone()],
    ]);
    let r = diagonalize(&g);
    assert_eq!((r.diagonal.len(), r.metabolic_planes, r.radical), (0, 1, 1));
    let g2 = GramMatrix(vec![vec![x.clone(), o.clone()], vec![o.clone(), z.clone()]]);
    let r2 = diagonalize(&g2);
    assert_eq!(r2.diagonal, vec![x.clone(), x.inv().unwrap()]);
}

fn star_phi(t: &FieldTower) -> QuadForm {
    parse_quad(&format!("x*A1*[1, {B}] + (y^-1 + x*A1)*[1, {C}]"), t, 1).unwrap()
}

#[test]
fn frobenius_and_direct_transfers_agree() {
    let t = star();
    let m = smap(&t);
    let phi = star_phi(&t);
    let fr = transfer_quad_frobenius(&phi, &m, &t).unwrap().unwrap();
    let dir = transfer_quad_direct(&phi, &m, &t).unwrap();
    assert_eq!(fr.dim(), 8);
    assert_eq!(dir.dim(), 8);
    assert_eq!(fr.level, 0);
    let r = rewrite_equiv(&fr, &dir, Mode::Witt, &t, &RewriteOptions::default()).unwrap();
    assert!(r.is_proven(), "{r:?}");
    // a single block β[1,b]: x⟨1, N(β)⟩_b ⊗ [1,b] up to square classes
    let one = parse_quad(&format!("x*A1*[1, {B}]"), &t, 1).unwrap();
    let got = transfer_quad(&one, &m, &t).unwrap();
    let nb = e(&t, &format!("x*A1")).norm_trace(m.step.as_ref()).unwrap().0;
    assert_eq!(nb, e(&t, "x^3"));
    let coeffs: Vec<Element> = got.blocks.iter().map(|b| b.a.clone()).collect();
    assert!(same_square_classes(&t, &coeffs, &[e(&t, "x"), e(&t, "x").mul(&nb)]));
    assert!(got.blocks.iter().all(|b| b.b == e(&t, B)));
}

#[test]
fn transfer_of_a_form_over_f_is_witt_trivial() {
    let t = star();
    let m = smap(&t);
    let psi = parse_quad("[1, x^-1*y^-1] + y*[1, x]", &t, 1).unwrap();
    let tr = transfer_quad(&psi, &m, &t).unwrap();
    let zero = QuadForm::zero(0);
    let r = rewrite_equiv(&tr, &zero, Mode::Witt, &t, &RewriteOptions::default()).unwrap();
    assert!(r.is_proven(), "{r:?}");
    let singular = QuadForm::new(Vec::new(), vec![t.one()], 1).unwrap();
    assert_eq!(transfer_quad(&singular, &m, &t), Err(TransferError::SingularForm));
}

#[test]
fn trace_transfer_of_binary_forms() {
    let mut t = FieldTower::xy(2).unwrap();
    t.adjoin_artin_schreier(e(&t, "x^-3*y^-2")).unwrap();
    let m = TransferMap::for_level(&t, 1, TransferKind::Trace).unwrap();
    assert_eq!(trace_transfer_binary(&e(&t, "A1"), &m, &t).unwrap(), parse_quad("[1,1]", &t, 0).unwrap());
    assert_eq!(trace_transfer_binary(&e(&t, "x*y"), &m, &t).unwrap(), parse_quad("[1,0]", &t, 0).unwrap());
    let zeta = "x*y*(1 + y^2*x^3 + x*y)";
    let z = e(&t, &format!("{zeta}*(x + (1+y)*A1)^2"));
    let want = QuadForm::binary(t.one(), e(&t, &format!("{zeta}*(1+y)^2")), 0).unwrap();
    assert_eq!(trace_transfer_binary(&z, &m, &t).unwrap(), want);
    let mut r = FieldTower::xy(2).unwrap();
    r.adjoin_radical(e(&r, "x")).unwrap();
    assert!(matches!(TransferMap::for_level(&r, 1, TransferKind::Trace), Err(TransferError::InseparableStep)));
}

fn input(t: &FieldTower, s: &str, tt: &str, u: &str, v: &str, b: &str, c: &str) -> CriterionInput {
    CriterionInput { s: e(t, s), t: e(t, tt), u: e(t, u), v: e(t, v), b: e(t, b), c: e(t, c), hint: None }
}

#[test]
fn criterion_on_the_star_instance() {
    let t = star();
    let m = smap(&t);
    let r = pcex2_check(&input(&t, "0", "x", "y^-1", "x", B, C), &m, &t, &RewriteOptions::default()).unwrap();
    let proof = r.proven().expect("criterion holds");
    assert_eq!(proof.norm_gamma, e(&t, C).mul(&proof.norm_beta));
    assert!(matches!(proof.representation, Some(Representation::Square { ref root }) if *root == e(&t, "x")));
}

#[test]
fn criterion_with_beta_in_f() {
    let t = star();
    let m = smap(&t);
    let r = pcex2_check(&input(&t, "1", "0", "x", "0", "x^-1", "x^-1"), &m, &t, &RewriteOptions::default()).unwrap();
    assert!(r.proven().unwrap().representation.is_none());
}

#[test]
fn criterion_refuted_by_anisotropy() {
    let t = star();
    let m = smap(&t);
    let r = pcex2_check(&input(&t, "0", "1", "1", "0", "y^-1", "y^-1"), &m, &t, &RewriteOptions::default()).unwrap();
    assert!(matches!(r, TriState::Refuted(CriterionFailure::Isometry(_))), "{r:?}");
}

#[test]
fn descent_of_the_star_form() {
    let t = star();
    let phi = star_phi(&t);
    let psi = parse_quad("y^-1*[1, x^-3*y^-2] + [0,0]", &t, 0).unwrap();
    let r = verify_descent(&phi, &psi, &t, &RewriteOptions::default()).unwrap();
    let proof = r.proven().expect("descent verifies");
    let lifted = extend_to(&psi, 1).unwrap();
    match proof.mode {
        Mode::Isometry => {
            let replayed = c2forms::quadforms::replay(&lifted, &proof.script, proof.mode).unwrap();
            assert_eq!(replayed.sorted(), phi.sorted());
        }
        Mode::Witt => {
            let both = lifted.orth_sum(&phi).unwrap();
            assert_eq!(c2forms::quadforms::replay(&both, &proof.script, proof.mode).unwrap().dim(), 0);
        }
    }
    // the wrong Arf class is refuted
    let bad = parse_quad("y^-1*[1, x^-3*y^-2] + [1, y^-1]", &t, 0).unwrap();
    let r = verify_descent(&phi, &bad, &t, &RewriteOptions::default()).unwrap();
    assert!(r.is_refuted(), "{r:?}");
    let short = parse_quad("[0,0]", &t, 0).unwrap();
    assert_eq!(verify_descent(&phi, &short, &t, &RewriteOptions::default()), Err(TransferError::DimensionMismatch(4, 2)));
    // a form with coefficients in F descends to itself
    let own = parse_quad("x*[1, y^-1] + [1, x^-1]", &t, 0).unwrap();
    let r = verify_descent(&extend_to(&own, 1).unwrap(), &own, &t, &RewriteOptions::default()).unwrap();
    assert!(r.is_proven());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Transfers of λ[1,b] with b ∈ F: the two computations agree in the Witt group.
    #[test]
    fn reciprocity_matches_direct_transfer(seed in any::<u64>()) {
        let t = star();
        let m = smap(&t);
        let mut r = c2forms::random::rng(seed);
        let lam = c2forms::random::nonzero_element(&mut r, &t, 1, 1);
        let b = Element::from_poly(c2forms::random::nonzero_poly(&mut r, t.base(), 2, 1, 2));
        let phi = QuadForm::binary(lam, b, 1).unwrap();
        let fr = transfer_quad_frobenius(&phi, &m, &t).unwrap().unwrap();
        let dir = transfer_quad_direct(&phi, &m, &t).unwrap();
        prop_assert_eq!(fr.dim(), 4);
        prop_assert!(t.is_in_wp(&fr.arf().unwrap().add(&dir.arf().unwrap()), 0).is_proven());
        let opts = RewriteOptions { max_nodes: 3000, ..Default::default() };
        let res = rewrite_equiv(&fr, &dir, Mode::Witt, &t, &opts).unwrap();
        prop_assert!(!res.is_refuted());
    }
}
