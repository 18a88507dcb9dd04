use std::error::Error;
use std::fmt::Write as _;

use serde_json::{json, Value};

use c2forms::brauer::{clifford_class, kernel_generators, KernelShape};
use c2forms::fields::FieldTower;
use c2forms::quadforms::{
    format_bilin, i2_membership, parse_form, parse_quad, rewrite_equiv, Mode, ParsedForm, QuadForm, RewriteOptions,
};
use c2forms::scenarios::{build_star, run_steps, ScenarioOptions};
use c2forms::transfers::{pcex2_check, transfer_quad, CriterionInput, Representation, TransferKind, TransferMap};
use c2forms::valuations::{residue_forms, ValuationContext};
use c2forms::{Status, TriState};

use crate::{Cli, Command, FormOp, ModeArg, OutputFormat, RunOutput, Val, VerifyTarget, OUTPUT_SCHEMA};

type CmdResult = Result<Done, Box<dyn Error>>;

/// A finished command: overall status, JSON payload and text rendering.
struct Done {
    status: Status,
    result: Value,
    text: String,
}

impl Done {
    fn info(result: Value, text: String) -> Done {
        Done { status: Status::Proven, result, text }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Form { op: FormOp::Normalize { .. } } => "form normalize",
        Command::Form { op: FormOp::Arf { .. } } => "form arf",
        Command::Form { op: FormOp::Clifford { .. } } => "form clifford",
        Command::Form { op: FormOp::I2 { .. } } => "form i2",
        Command::Residues { .. } => "residues",
        Command::Transfer { .. } => "transfer",
        Command::Rewrite { .. } => "rewrite",
        Command::Pcex2 { .. } => "pcex2",
        Command::Verify { .. } => "verify star",
        Command::KernelGens { .. } => "kernel-gens",
        Command::Schema => "schema",
    }
}

pub(crate) fn execute(cli: &Cli) -> RunOutput {
    if matches!(cli.command, Command::Schema) {
        return RunOutput { code: 0, stdout: OUTPUT_SCHEMA.to_string(), stderr: String::new() };
    }
    let name = command_name(&cli.command);
    let allow_assumed = matches!(&cli.command, Command::Verify { target: VerifyTarget::Star { allow_assumed: true, .. } });
    match dispatch(cli) {
        Ok(done) => {
            let code = match done.status {
                Status::Proven => 0,
                Status::Assumed if allow_assumed => 0,
                _ => 1,
            };
            let stdout = match cli.output {
                OutputFormat::Json => {
                    let v = json!({"command": name, "status": done.status.to_string(), "result": done.result});
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("values serialize"))
                }
                OutputFormat::Text => format!("{}status: {}\n", done.text, done.status),
            };
            RunOutput { code, stdout, stderr: String::new() }
        }
        Err(e) => {
            let stdout = match cli.output {
                OutputFormat::Json => {
                    let v = json!({"command": name, "status": "error", "error": e.to_string()});
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("values serialize"))
                }
                OutputFormat::Text => String::new(),
            };
            RunOutput { code: 2, stdout, stderr: format!("error: {e}\n") }
        }
    }
}

fn apply_ext(t: &mut FieldTower, arg: &str) -> Result<(), Box<dyn Error>> {
    let (kind, a) = arg.split_once(':').ok_or_else(|| format!("extension `{arg}` is not KIND:ELEMENT"))?;
    let a = t.parse_at(a, t.height())?;
    match kind.trim() {
        "as" => t.adjoin_artin_schreier(a)?,
        "sqrt" => t.adjoin_radical(a)?,
        other => return Err(format!("unknown extension kind `{other}` (expected as or sqrt)").into()),
    };
    Ok(())
}

fn tower(cli: &Cli, exts: &[String]) -> Result<FieldTower, Box<dyn Error>> {
    let mut t = FieldTower::xy(cli.base_degree)?;
    for e in exts {
        apply_ext(&mut t, e)?;
    }
    Ok(t)
}

fn quad(text: &str, t: &FieldTower, level: usize) -> Result<QuadForm, Box<dyn Error>> {
    Ok(parse_quad(text, t, level)?)
}

fn tri_status<P, R>(r: &TriState<P, R>) -> Status {
    r.status()
}

fn dispatch(cli: &Cli) -> CmdResult {
    let ropts = RewriteOptions { max_depth: cli.search_depth, ..Default::default() };
    match &cli.command {
        Command::Form { op } => form(cli, op),
        Command::Residues { val, form } => {
            let t = tower(cli, &cli.ext)?;
            let q = quad(form, &t, 0)?;
            let ctx = match val {
                Val::X => ValuationContext::zero_of(0),
                Val::Y => ValuationContext::zero_of(1),
                Val::Xinv => ValuationContext::infinity_of(0),
            };
            let pair = residue_forms(&q, &ctx, &t)?;
            let (first, second) = (pair.first.display(&t).to_string(), pair.second.display(&t).to_string());
            let cases: Vec<Value> = pair.cases.iter().map(|(c, s)| json!({"case": c.to_string(), "swapped": s})).collect();
            let text = format!("uniformizer: {}\nfirst: {first}\nsecond: {second}\n", ctx.uniformizer(&t));
            Ok(Done::info(
                json!({"uniformizer": ctx.uniformizer(&t), "first": first, "second": second, "cases": cases}),
                text,
            ))
        }
        Command::Transfer { step, form } => {
            let t = tower(cli, &cli.ext)?;
            if *step == 0 || *step > t.height() {
                return Err(format!("--step must be between 1 and {} for this tower", t.height()).into());
            }
            let q = quad(form, &t, *step)?;
            let map = TransferMap::for_level(&t, *step, TransferKind::Scharlau)?;
            let out = transfer_quad(&q, &map, &t)?;
            let shown = out.display(&t).to_string();
            Ok(Done::info(json!({"level": step - 1, "form": shown, "dim": out.dim()}), format!("transfer: {shown}\n")))
        }
        Command::Rewrite { mode, f1, f2 } => {
            let t = tower(cli, &cli.ext)?;
            let top = t.height();
            let (a, b) = (quad(f1, &t, top)?, quad(f2, &t, top)?);
            let mode = match mode {
                ModeArg::Isometry => Mode::Isometry,
                ModeArg::Witt => Mode::Witt,
            };
            let r = rewrite_equiv(&a, &b, mode, &t, &ropts)?;
            let status = tri_status(&r);
            let (result, text) = match r {
                TriState::Proven(script) => {
                    let source = if mode == Mode::Witt { a.orth_sum(&b)? } else { a.clone() };
                    let moves = script.render(&source, &t);
                    let mut text = String::new();
                    for (l, d) in &moves {
                        writeln!(text, "{l}: {d}")?;
                    }
                    let rows: Vec<Value> = moves.iter().map(|(l, d)| json!({"move": l, "step": d})).collect();
                    (json!({"mode": mode, "moves": rows}), text)
                }
                TriState::Refuted(o) => (json!({"mode": mode, "obstruction": o.to_string()}), format!("obstruction: {o}\n")),
                TriState::Unknown(why) => (json!({"mode": mode, "reason": why}), format!("reason: {why}\n")),
            };
            Ok(Done { status, result, text })
        }
        Command::Pcex2 { s, t: tt, u, v, b, c } => {
            let mut t = tower(cli, &cli.ext)?;
            if t.height() == 0 {
                apply_ext(&mut t, "as:x")?;
            }
            let p = |e: &str| t.parse_at(e, 0);
            let input = CriterionInput { s: p(s)?, t: p(tt)?, u: p(u)?, v: p(v)?, b: p(b)?, c: p(c)?, hint: None };
            let map = TransferMap::for_level(&t, 1, TransferKind::Scharlau)?;
            let r = pcex2_check(&input, &map, &t, &ropts)?;
            let status = tri_status(&r);
            let (result, text) = match r {
                TriState::Proven(d) => {
                    let repr = match &d.representation {
                        None => "tv = 0".to_string(),
                        Some(Representation::Square { root }) => format!("tv = ({})^2", t.format(root)),
                        Some(Representation::Vector { w, .. }) => {
                            format!("tv = value at ({})", w.iter().map(|e| t.format(e)).collect::<Vec<_>>().join(", "))
                        }
                        Some(Representation::Universal { .. }) => "Pfister form is isotropic".to_string(),
                    };
                    let (nb, ng) = (t.format(&d.norm_beta), t.format(&d.norm_gamma));
                    let text = format!("N(beta): {nb}\nN(gamma): {ng}\nisometry moves: {}\n{repr}\n", d.isometry.len());
                    (json!({"norm_beta": nb, "norm_gamma": ng, "isometry_moves": d.isometry.len(), "representation": repr}), text)
                }
                TriState::Refuted(f) => (json!({"failure": format!("{f:?}")}), format!("failure: {f:?}\n")),
                TriState::Unknown(why) => (json!({"reason": why}), format!("reason: {why}\n")),
            };
            Ok(Done { status, result, text })
        }
        Command::Verify { target: VerifyTarget::Star { step, jobs, timings, .. } } => {
            let inst = build_star(cli.base_degree / 2)?;
            let opts = ScenarioOptions {
                search_depth: cli.search_depth,
                degree_bound: cli.degree_bound,
                seed: cli.seed,
                ..ScenarioOptions::default()
            };
            let names: Vec<&str> = step.iter().map(String::as_str).collect();
            let report = run_steps(&inst, (!names.is_empty()).then_some(names.as_slice()), &opts, *jobs)?;
            let status = [Status::Refuted, Status::Unknown, Status::Assumed]
                .into_iter()
                .find(|s| report.count(*s) > 0)
                .unwrap_or(Status::Proven);
            let mut text = String::new();
            for s in &report.steps {
                if *timings {
                    writeln!(text, "{}: {} ({} ms)", s.name, s.status, s.runtime.as_millis())?;
                } else {
                    writeln!(text, "{}: {}", s.name, s.status)?;
                }
            }
            Ok(Done { status, result: report.to_json(*timings), text })
        }
        Command::KernelGens { shape, m } => {
            let exts: Vec<String> = shape.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            let t = tower(cli, &exts)?;
            let name = KernelShape::of_tower(&t)?.name();
            let fams = kernel_generators(&t, *m)?;
            let described: Vec<String> = fams.iter().map(|f| f.describe(&t)).collect();
            let mut text = format!("shape: {name}\n");
            for d in &described {
                writeln!(text, "{d}")?;
            }
            Ok(Done::info(json!({"shape": name, "m": m, "families": described}), text))
        }
        Command::Schema => unreachable!("handled before dispatch"),
    }
}

fn form(cli: &Cli, op: &FormOp) -> CmdResult {
    let t = tower(cli, &cli.ext)?;
    let top = t.height();
    match op {
        FormOp::Normalize { form } => Ok(match parse_form(form, &t, top)? {
            ParsedForm::Quad(q) => {
                let shown = q.display(&t).to_string();
                Done::info(json!({"kind": "quadratic", "form": shown, "dim": q.dim()}), format!("{shown}\n"))
            }
            ParsedForm::Bilin(b) => {
                let shown = format_bilin(&b, &t);
                Done::info(json!({"kind": "bilinear", "form": shown, "dim": b.dim()}), format!("{shown}\n"))
            }
        }),
        FormOp::Arf { form } => {
            let arf = quad(form, &t, top)?.arf()?;
            let shown = t.format(&arf);
            Ok(Done::info(json!({"arf": shown}), format!("arf: {shown}\n")))
        }
        FormOp::Clifford { form } => {
            let class = clifford_class(&quad(form, &t, top)?)?;
            let shown = class.display(&t).to_string();
            Ok(Done::info(json!({"class": shown, "symbols": class.len()}), format!("clifford: {shown}\n")))
        }
        FormOp::I2 { form } => {
            let r = i2_membership(&quad(form, &t, top)?, &t)?;
            let status = tri_status(&r);
            let (result, text) = match r {
                TriState::Proven(root) => {
                    let shown = t.format(&root);
                    (json!({"wp_root": shown}), format!("arf = wp({shown})\n"))
                }
                TriState::Refuted(o) => (json!({"obstruction": format!("{o:?}")}), format!("obstruction: {o:?}\n")),
                TriState::Unknown(why) => (json!({"reason": why}), format!("reason: {why}\n")),
            };
            Ok(Done { status, result, text })
        }
    }
}
