//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line, whatever the outcome.

use std::time::{Duration, Instant};

use rand::Rng;
use serde_json::Value;

use c2forms::fields::{Element, FieldTower, FiniteField};
use c2forms::quadforms::{
    i2_membership, parse_quad, replay, Binary, Mode, Move, QuadForm, RewriteOptions, RewriteScript,
};
use c2forms::scenarios::{build_star, run_all, run_step, ScenarioOptions, StarInstance, LEVEL_K};
use c2forms::transfers::{pcex2_check, transfer_quad, CriterionInput, TransferKind, TransferMap};
use c2forms::valuations::{
    anisotropic_certificate, default_chain, isotropy_search, residue_forms, residue_mismatch, val_split,
    witt_trivial, IsotropyOptions, ResidueCase, ValuationContext,
};
use c2forms::{random, Status};

type Check = Result<String, String>;

/// Time limits, in seconds, per criterion.
const LIMIT_STAR_IDENTITIES: f64 = 1.0;
const LIMIT_PFISTER_CHAIN: f64 = 5.0;
const LIMIT_TRANSFER_GRAMS: f64 = 1.0;
const LIMIT_RESIDUES: f64 = 30.0;
const LIMIT_LEMISO: f64 = 60.0;
const LIMIT_FULL_RUN: f64 = 300.0;
/// Largest tolerated share of undecided pcex2 instances.
const MAX_UNKNOWN_SHARE: f64 = 0.20;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit, || format!("took {:.2} s, limit {limit} s", elapsed.as_secs_f64()))
}

fn el(t: &FieldTower, s: &str) -> Element {
    t.parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn step_witness(inst: &StarInstance, name: &str) -> Result<Value, String> {
    let r = run_step(inst, name, &ScenarioOptions::default()).map_err(|e| e.to_string())?;
    ensure(r.status == Status::Proven, || format!("step {name} is {}: {}", r.status, r.witness))?;
    Ok(r.witness)
}

fn star_identities() -> Check {
    let start = Instant::now();
    let inst = build_star(1).map_err(|e| e.to_string())?;
    let t = &inst.tower;
    let step = t.step(LEVEL_K).map_err(|e| e.to_string())?;
    let nb = inst.beta.norm_trace(step).map_err(|e| e.to_string())?.0;
    let ng = inst.gamma.norm_trace(step).map_err(|e| e.to_string())?.0;
    ensure(nb == el(t, "x^3"), || format!("N(beta) = {}", t.format(&nb)))?;
    ensure(ng == el(t, "y^-2 + x*y^-1 + x^3"), || format!("N(gamma) = {}", t.format(&ng)))?;
    ensure(ng == inst.c.mul(&nb), || "N(gamma) != c N(beta)".into())?;
    ensure(inst.b == inst.c.add(&nb.inv().unwrap().mul(&el(t, "y^-2"))), || "b != c + N(beta)^-1 y^-2".into())?;
    step_witness(&inst, "norms")?;
    within(start.elapsed(), LIMIT_STAR_IDENTITIES)?;
    Ok(format!("N(beta) = {}, N(gamma) = {}", t.format(&nb), t.format(&ng)))
}

fn pfister_chain() -> Check {
    let inst = build_star(1).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let w = step_witness(&inst, "pfister-chain")?;
    let moves = w["moves"].as_array().map_or(usize::MAX, Vec::len);
    ensure(moves <= 8, || format!("{moves} moves"))?;
    ensure(w["replays"] == true, || "script does not replay".into())?;
    within(start.elapsed(), LIMIT_PFISTER_CHAIN)?;
    let labels: Vec<&str> = w["moves"].as_array().unwrap().iter().filter_map(|m| m["move"].as_str()).collect();
    Ok(format!("{moves} moves ({}), replay exact", labels.join(" ")))
}

fn same_square_class(t: &FieldTower, a: &str, b: &str) -> bool {
    let q = el(t, a).mul(&el(t, b).inv().unwrap());
    matches!(t.sqrt(&q, 0), Ok(Some(_)))
}

fn transfer_grams() -> Check {
    let inst = build_star(1).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let w = step_witness(&inst, "transfer-grams")?;
    let gram = |k: &str| serde_json::to_string(&w[k]["gram"]).unwrap();
    ensure(gram("beta") == r#"[["x","x"],["x","x^2 + x"]]"#, || format!("beta gram {}", gram("beta")))?;
    ensure(gram("gamma") == r#"[["x","x + y^-1"],["x + y^-1","x^2 + x + y^-1"]]"#, || {
        format!("gamma gram {}", gram("gamma"))
    })?;
    ensure(w["one"]["isotropic"] == true, || "transfer of <1> is not metabolic".into())?;
    let diag = |k: &str| -> Vec<String> {
        w[k]["diagonal"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect()
    };
    let (db, dg) = (diag("beta"), diag("gamma"));
    let t = &inst.tower;
    let pairs_match = |got: &[String], want: [&str; 2]| {
        got.len() == 2
            && ((same_square_class(t, &got[0], want[0]) && same_square_class(t, &got[1], want[1]))
                || (same_square_class(t, &got[0], want[1]) && same_square_class(t, &got[1], want[0])))
    };
    ensure(pairs_match(&db, ["1", "x"]), || format!("beta diagonal {db:?}"))?;
    ensure(pairs_match(&dg, ["x", "y^-1 + x^2 + x^-1*y^-2"]), || format!("gamma diagonal {dg:?}"))?;
    within(start.elapsed(), LIMIT_TRANSFER_GRAMS)?;
    Ok(format!("<{}>_b ~ <1, x>_b, <{}>_b", db.join(", "), dg.join(", ")))
}

fn diag_form(t: &FieldTower, es: &[&str]) -> QuadForm {
    QuadForm::new(Vec::new(), es.iter().map(|s| el(t, s)).collect(), 0).unwrap()
}

fn random_unit<R: Rng>(rng: &mut R, t: &FieldTower, ctx: &ValuationContext) -> Element {
    loop {
        let r = Element::from_ratfun(random::ratfun(rng, t.base(), 2, 2));
        if let Ok((_, u)) = val_split(&r, ctx) {
            return u;
        }
    }
}

fn residues() -> Check {
    let start = Instant::now();
    let t = FieldTower::xy(2).map_err(|e| e.to_string())?;
    let y_adic = ValuationContext::zero_of(1);
    let res = |s: &str| residue_forms(&parse_quad(s, &t, 0).unwrap(), &y_adic, &t).map_err(|e| e.to_string());

    let a = res("[x, 1+y]")?;
    ensure(a.cases == vec![(ResidueCase::A, false)] && a.first == parse_quad("[x, 1]", &t, 0).unwrap(), || {
        "case A".into()
    })?;
    let b = res("[1, x^-2*y^-1]")?;
    ensure(b.cases == vec![(ResidueCase::B, false)] && b.second == diag_form(&t, &["x^-2"]), || "case B".into())?;
    let zeta = "x*y*(1 + y^2*x^3 + x*y)";
    let c = res(&format!("[1, x^-3*y^-2 + {zeta}*(y^-1*(1+x))^2]"))?;
    ensure(c.cases == vec![(ResidueCase::C, false)], || format!("case C: {:?}", c.cases))?;
    ensure(residue_mismatch(&c.first, &diag_form(&t, &["1", "x"]), &t).is_none(), || "case C first residue".into())?;

    let inst = build_star(1).map_err(|e| e.to_string())?;
    let grid = step_witness(&inst, "residue-cases")?;
    let rows = grid["grid"].as_array().cloned().unwrap_or_default();
    ensure(rows.len() == 11, || format!("{} exponents", rows.len()))?;
    ensure(rows.iter().all(|g| g["passed"].as_u64() >= Some(20)), || "grid row below 20 units".into())?;

    // dimension additivity on accepted anisotropic forms
    let chain = default_chain(&t);
    let mut rng = random::rng(17);
    let (mut accepted, mut tried) = (0, 0);
    while accepted < 50 {
        tried += 1;
        ensure(tried < 5000, || format!("only {accepted} accepted forms"))?;
        let nblocks = rng.gen_range(1..=2);
        let mut blocks = Vec::new();
        for _ in 0..nblocks {
            let a = Element::from_ratfun(random::ratfun(&mut rng, t.base(), 2, 2));
            let b = Element::from_ratfun(random::ratfun(&mut rng, t.base(), 2, 2));
            if !a.is_zero() {
                blocks.push(Binary::new(a, b).unwrap());
            }
        }
        if blocks.is_empty() {
            continue;
        }
        let q = QuadForm::from_blocks(blocks, 0).unwrap();
        // accepted: certified anisotropic, with residues defined at both places
        if !matches!(anisotropic_certificate(&q, &chain, &t), Ok(r) if r.is_proven()) {
            continue;
        }
        let pairs: Vec<_> = [ValuationContext::zero_of(0), ValuationContext::zero_of(1)]
            .iter()
            .map(|ctx| residue_forms(&q, ctx, &t))
            .collect();
        if pairs.iter().any(Result::is_err) {
            continue;
        }
        accepted += 1;
        for p in pairs.into_iter().flatten() {
            ensure(p.first.dim() + p.second.dim() == q.dim(), || format!("dimension split fails for {}", q.display(&t)))?;
        }
    }
    within(start.elapsed(), LIMIT_RESIDUES)?;
    Ok(format!("cases A/B/C, 11x20 grid, additivity on {accepted} forms ({tried} drawn)"))
}

fn lemiso() -> Check {
    let start = Instant::now();
    let t = FieldTower::xy(2).map_err(|e| e.to_string())?;
    let x_adic = ValuationContext::zero_of(0);
    let chain = [x_adic.clone(), ValuationContext::zero_of(1)];
    let iso = IsotropyOptions { degree_bound: 6, max_candidates: 2000 };
    let mut rng = random::rng(5);
    let mut disagreements = Vec::new();
    for _ in 0..100 {
        let eps = -(2 * rng.gen_range(0..5i64) + 1);
        let u = random_unit(&mut rng, &t, &x_adic);
        let slot = u.mul(&el(&t, "x").pow(eps).unwrap());
        let q = QuadForm::binary(t.one(), slot, 0).unwrap();
        let cert = matches!(anisotropic_certificate(&q, &chain, &t), Ok(r) if r.is_proven());
        let witness = isotropy_search(&q, &t, &iso);
        if !cert || witness.is_some() {
            disagreements.push(format!("eps {eps}, u = {}", t.format(&u)));
        }
    }
    ensure(disagreements.is_empty(), || format!("{} disagreements, first {}", disagreements.len(), disagreements[0]))?;
    within(start.elapsed(), LIMIT_LEMISO)?;
    Ok("100 pairs with odd eps in [-9, -1], 0 disagreements".into())
}

/// Sorted table of values of a form with constant coefficients over k^dim.
fn value_multiset(f: FiniteField, q: &QuadForm) -> Vec<u32> {
    let c = |e: &Element| e.as_base().and_then(|r| r.constant_value()).expect("constant coefficient");
    let blocks: Vec<(u32, u32)> = q.blocks.iter().map(|b| (c(&b.a), c(&b.b))).collect();
    let sing: Vec<u32> = q.singular.iter().map(c).collect();
    let dim = q.dim();
    let order = f.order() as u64;
    let total = order.pow(dim as u32);
    let mut out = Vec::with_capacity(total as usize);
    let mut v = vec![0u32; dim];
    for mut n in 0..total {
        for slot in v.iter_mut() {
            *slot = (n % order) as u32;
            n /= order;
        }
        let mut val = 0;
        for (k, (a, b)) in blocks.iter().enumerate() {
            let (x, y) = (v[2 * k], v[2 * k + 1]);
            val ^= f.mul(*a, f.square(x) ^ f.mul(x, y) ^ f.mul(*b, f.square(y)));
        }
        for (k, s) in sing.iter().enumerate() {
            val ^= f.mul(*s, f.square(v[2 * blocks.len() + k]));
        }
        out.push(val);
    }
    out.sort_unstable();
    out
}

fn corpus_form<R: Rng>(rng: &mut R, t: &FieldTower) -> QuadForm {
    let order = t.base().order();
    let nblocks = rng.gen_range(1..=2usize);
    let first_slot = rng.gen_range(0..order);
    let mut blocks = vec![Binary::new(t.constant(rng.gen_range(1..order)), t.constant(first_slot)).unwrap()];
    if nblocks == 2 {
        // equal slots now and then, so that slot exchanges apply
        let slot = if rng.gen_bool(0.35) { first_slot } else { rng.gen_range(0..order) };
        blocks.push(Binary::new(t.constant(rng.gen_range(1..order)), t.constant(slot)).unwrap());
    }
    let sing = (0..rng.gen_range(0..=4 - 2 * nblocks)).map(|_| t.constant(rng.gen_range(1..order))).collect();
    QuadForm::new(blocks, sing, 0).unwrap()
}

fn candidate_moves<R: Rng>(rng: &mut R, t: &FieldTower, q: &QuadForm) -> Vec<Move> {
    let order = t.base().order();
    let mut c = || t.constant(rng.gen_range(0..order));
    let n = q.blocks.len();
    let mut moves = Vec::new();
    for i in 0..n {
        moves.push(Move::Shift { i, d: c() });
        moves.push(Move::Represent { i, x: c(), y: c() });
        moves.push(Move::Represent { i, x: c(), y: t.zero() });
    }
    if n == 2 {
        moves.extend([
            Move::Mix { i: 0, j: 1 },
            Move::Mix { i: 1, j: 0 },
            Move::PairSlot { i: 0, j: 1 },
            Move::Permute { perm: vec![1, 0] },
        ]);
    }
    moves
}

fn rewrite_soundness() -> Check {
    let mut rng = random::rng(11);
    let (mut forms, mut applied, mut violations) = (0, 0, Vec::new());
    for (degree, count) in [(2u32, 160usize), (4, 60)] {
        let t = FieldTower::new(FiniteField::new(degree).unwrap(), &[]).map_err(|e| e.to_string())?;
        for _ in 0..count {
            let q = corpus_form(&mut rng, &t);
            forms += 1;
            let reference = value_multiset(t.base(), &q);
            for m in candidate_moves(&mut rng, &t, &q) {
                let script = RewriteScript { steps: vec![m.clone()] };
                // moves whose side conditions fail are rejected by replay
                let Ok(out) = replay(&q, &script, Mode::Isometry) else { continue };
                applied += 1;
                if value_multiset(t.base(), &out) != reference {
                    violations.push(format!("{:?} on {}", m, q.display(&t)));
                }
            }
        }
    }
    ensure(forms >= 200, || format!("corpus of {forms} forms"))?;
    ensure(violations.is_empty(), || format!("{} violations, first {}", violations.len(), violations[0]))?;
    Ok(format!("{forms} forms, {applied} applied moves, 0 violations"))
}

fn pcex2_equivalence() -> Check {
    let mut t = FieldTower::xy(2).map_err(|e| e.to_string())?;
    t.adjoin_artin_schreier(el(&t, "x")).map_err(|e| e.to_string())?;
    let map = TransferMap::for_level(&t, 1, TransferKind::Scharlau).map_err(|e| e.to_string())?;
    let opts = RewriteOptions::default();
    let iso = IsotropyOptions::default();
    let coords = ["0", "1", "x", "y", "y^-1", "x*y", "x^-1", "x^-1*y"];
    let mono = ["1", "x", "y", "y^-1", "x*y", "x^-1", "x^-1*y", "x^2*y^-1"];
    let slots = ["x^-1", "y^-1", "x^-1*y^-1", "x^-3*y^-2", "x^-1*y^-2", "x^-3*y^-1", "x^-2*y^-1"];
    let (star_b, star_c) = ("x^-2*y^-1 + 1", "x^-3*(y^-2 + x*y^-1 + x^3)");
    // Families, drawn round robin: both coordinates in F, gamma = beta with
    // c = b, F-multiples of the worked instance, pure alpha-multiples, and an
    // occasional unstructured draw.
    const ROTATION: [&str; 8] = ["in-F", "doubled", "scaled-star", "alpha", "in-F", "alpha", "alpha", "free"];
    let mut rng = random::rng(23);
    let mut pick = |pool: &[&'static str]| pool[rng.gen_range(0..pool.len())].to_string();
    let (mut agree, mut descending, mut counterexamples) = (0, 0, Vec::new());
    let mut unknown = Vec::new();
    let n = 1 + 4 * ROTATION.len();
    for k in 0..n {
        let zero = || "0".to_string();
        let s: [String; 6] = if k == 0 {
            [zero(), "x".into(), "y^-1".into(), "x".into(), star_b.into(), star_c.into()]
        } else {
            match ROTATION[(k - 1) % ROTATION.len()] {
                "in-F" => [pick(&mono), zero(), pick(&mono), zero(), pick(&slots), pick(&slots)],
                "doubled" => {
                    let (a, b, c) = (pick(&coords), pick(&mono), pick(&slots));
                    [a.clone(), b.clone(), a, b, c.clone(), c]
                }
                "scaled-star" => {
                    let l = pick(&mono);
                    [zero(), format!("x*{l}"), format!("{l}*y^-1"), format!("x*{l}"), star_b.into(), star_c.into()]
                }
                "alpha" => [zero(), pick(&mono), zero(), pick(&mono), pick(&slots), pick(&slots)],
                _ => loop {
                    let d = [pick(&coords), pick(&coords), pick(&coords), pick(&coords), pick(&slots), pick(&slots)];
                    if !(d[0] == "0" && d[1] == "0" || d[2] == "0" && d[3] == "0") {
                        break d;
                    }
                },
            }
        };
        let e = |k: usize| el(&t, &s[k]);
        let input = CriterionInput { s: e(0), t: e(1), u: e(2), v: e(3), b: e(4), c: e(5), hint: None };
        let crit = pcex2_check(&input, &map, &t, &opts).map_err(|e| e.to_string())?;
        let step = &map.step;
        let beta = Element::from_coords(step, input.s.clone(), input.t.clone());
        let gamma = Element::from_coords(step, input.u.clone(), input.v.clone());
        let b = input.b.clone();
        let c = input.c.clone();
        let phi = QuadForm::binary(beta, b, 1).unwrap().orth_sum(&QuadForm::binary(gamma, c, 1).unwrap()).unwrap();
        let tr = transfer_quad(&phi, &map, &t).map_err(|e| e.to_string())?;
        let trivial = witt_trivial(&tr, &t, &iso).map_err(|e| e.to_string())?;
        match (crit.status(), trivial.status()) {
            (a, b) if a == Status::Unknown || b == Status::Unknown => unknown.push(format!("{s:?}: {a}/{b}")),
            (a, b) if a == b => {
                agree += 1;
                descending += usize::from(a == Status::Proven);
            }
            (a, b) => counterexamples.push(format!("{s:?}: pcex2 {a}, transfer {b}")),
        }
    }
    ensure(counterexamples.is_empty(), || counterexamples.join("; "))?;
    let share = unknown.len() as f64 / n as f64;
    ensure(share <= MAX_UNKNOWN_SHARE, || format!("{}/{n} unknown: {}", unknown.len(), unknown.join("; ")))?;
    ensure(descending > 0 && descending < agree, || format!("degenerate sample: {descending}/{agree} descend"))?;
    Ok(format!("{n} instances: {agree} agree ({descending} descend), {} unknown, 0 counterexamples", unknown.len()))
}

fn psi_prime_pipeline() -> Check {
    let inst = build_star(1).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let report = run_all(&inst, &ScenarioOptions::default());
    let elapsed = start.elapsed();
    for s in &report.steps {
        let want = if s.name == "lem2ex-conclusion" { Status::Assumed } else { Status::Proven };
        ensure(s.status == want, || format!("step {} is {}", s.name, s.status))?;
    }
    let w = |n: &str| report.steps.iter().find(|s| s.name == n).map(|s| s.witness.clone()).unwrap_or(Value::Null);
    ensure(w("psi-descend")["replays"] == true, || "psi_K ~ phi does not replay".into())?;
    let pp = w("psi-prime");
    ensure(pp["dim"] == 8 && pp["symbols"] == 4 && pp["i2_membership"] == "proven", || format!("psi': {pp}"))?;
    let hyp = w("psi-hyperbolic-M");
    ensure(hyp["phi_M"]["reduces_to_zero"] == true, || "phi_M not killed".into())?;
    let arf = w("corexce-arf");
    ensure(arf["arf_psi_K"] == arf["b_plus_c"] && arf["equal_mod_wp_K"] == true, || format!("Arf: {arf}"))?;

    // the same facts once more through the form API
    let t = &inst.tower;
    let psi_prime = parse_quad(pp["psi_prime"].as_str().unwrap_or(""), t, 0).map_err(|e| e.to_string())?;
    ensure(i2_membership(&psi_prime, t).map_err(|e| e.to_string())?.is_proven(), || "psi' not in I^2".into())?;
    ensure(matches!(psi_prime.arf(), Ok(_)), || "psi' has no Arf invariant".into())?;
    within(elapsed, LIMIT_FULL_RUN)?;
    Ok(format!("{} steps, 1 assumed, full run {:.2} s", report.steps.len(), elapsed.as_secs_f64()))
}

fn cli(args: &[&str]) -> c2forms_cli::RunOutput {
    c2forms_cli::run(std::iter::once("c2forms").chain(args.iter().copied()))
}

fn generated_form<R: Rng>(rng: &mut R) -> String {
    const COEFFS: [&str; 8] = ["1", "x", "y", "x^-1", "x*y + 1", "x^2*y^-3", "(1 + x)^-1", "y^3 + x^-2"];
    let c = |rng: &mut R| COEFFS[rng.gen_range(0..COEFFS.len())];
    let mut parts: Vec<String> = Vec::new();
    for _ in 0..rng.gen_range(1..4) {
        let block = format!("[{}, {}]", c(rng), c(rng));
        parts.push(if rng.gen_bool(0.5) { block } else { format!("({})*{block}", c(rng)) });
    }
    let sing: Vec<&str> = (0..rng.gen_range(0..3)).map(|_| c(rng)).collect();
    if !sing.is_empty() {
        parts.push(format!("<{}>", sing.join(", ")));
    }
    parts.join(" + ")
}

fn cli_contract() -> Check {
    let mut rng = random::rng(29);
    let normalize = |s: &str| -> Result<String, String> {
        let out = cli(&["form", "normalize", s]);
        ensure(out.code == 0, || format!("normalize {s}: {}", out.stderr))?;
        Ok(out.stdout.lines().next().unwrap_or("").to_string())
    };
    for _ in 0..100 {
        let text = generated_form(&mut rng);
        let once = normalize(&text)?;
        ensure(normalize(&once)? == once, || format!("not idempotent: {text}"))?;
    }

    let schema: Value = serde_json::from_str(c2forms_cli::OUTPUT_SCHEMA).map_err(|e| e.to_string())?;
    let compiled = jsonschema::JSONSchema::compile(&schema).map_err(|e| e.to_string())?;
    let cases: [(&[&str], i32); 5] = [
        (&["verify", "star", "--step", "norms"], 0),
        (&["rewrite", "--mode", "isometry", "Q[1,x^-2*y^-1]", "(x*(1+y^2*x^3+x*y))*Q[1,x^-2*y^-1]"], 1),
        (&["verify", "star", "--step", "lem2ex-conclusion"], 1),
        (&["form", "arf", "[1,"], 2),
        (&["--ext", "as:x", "transfer", "--step", "1", "A1*[1,y]"], 0),
    ];
    for (args, code) in cases {
        let mut full = vec!["--output", "json"];
        full.extend_from_slice(args);
        let out = cli(&full);
        ensure(out.code == code, || format!("{args:?} exited {} (expected {code})", out.code))?;
        let v: Value = serde_json::from_str(&out.stdout).map_err(|e| format!("{args:?}: {e}"))?;
        let valid = compiled.is_valid(&v);
        ensure(valid, || format!("{args:?}: output violates the schema"))?;
        let text = cli(args);
        ensure(text.code == code, || format!("{args:?}: text mode exited {}", text.code))?;
    }
    let allowed = cli(&["verify", "star", "--step", "lem2ex-conclusion", "--allow-assumed"]);
    ensure(allowed.code == 0, || "--allow-assumed not honoured".into())?;
    ensure(cli(&["no-such-command"]).code == 2, || "usage error did not exit 2".into())?;
    Ok("100 round trips, 5 schema-valid outputs, exit codes 0/1/2".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("star identities", star_identities),
        ("Pfister chain", pfister_chain),
        ("transfer Grams", transfer_grams),
        ("residue cases", residues),
        ("anisotropy of [1, u x^eps]", lemiso),
        ("rewrite soundness", rewrite_soundness),
        ("pcex2 equivalence", pcex2_equivalence),
        ("psi' pipeline", psi_prime_pipeline),
        ("CLI contract", cli_contract),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} [{secs:.2} s] {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} [{secs:.2} s] {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
