//! Command dispatch and JSON reports for the `wrht` binary.

pub mod parse;

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::autloop::{baut_model, cyclic_loop_model, free_loop_model, loop_checks, universal_enveloping_dims, ul_negative, Input};
use crate::barcobar::{ce_of_dgla, dgla_good_truncation, quillen_dgla};
use crate::exactlin::{axpy, Scalar, SparseVec};
use crate::graded::{CheckReport, CohomologyReport, DegreeWindow};
use crate::mapping::{mapping_space_model, tensor_linfty, verify_mc};
use crate::ooinfty::{OoStructure, FdAlgebra};
use crate::sullivan::{minimal_model, minimal_model_of_fd, segmentation};
use crate::transfer::{minimal_of_cdga, minimal_of_dgla, minimal_of_fd, vanishing_from_segmentation};
use crate::{Error, Result};

pub use parse::{emit, parse, Block, Document};

pub const COMMANDS: [&str; 12] = ["check", "cohomology", "minimal-model", "quillen", "ce", "transfer", "segment", "map-model", "aut-model", "loop-model", "ul-dims", "verify-suite"];

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub window: Option<DegreeWindow>,
    pub arity: Option<usize>,
    pub alpha: Option<Scalar>,
    pub block: Option<String>,
    pub kind: Option<String>,
    pub dim: Option<i32>,
}

impl Options {
    fn window(&self, cmd: &str) -> Result<DegreeWindow> {
        self.window.ok_or_else(|| Error::Usage(format!("{cmd} needs --window a..b")))
    }

    fn arity(&self, cmd: &str) -> Result<usize> {
        self.arity.ok_or_else(|| Error::Usage(format!("{cmd} needs --arity m")))
    }
}

/// Command outcome: the JSON body and the overall verdict.
#[derive(Clone, Debug)]
pub struct Report {
    pub value: Value,
    pub passed: bool,
}

fn dims_json(dims: &BTreeMap<(i32, i32), usize>) -> Value {
    Value::Array(dims.iter().filter(|(_, &v)| v > 0).map(|(&(n, p), &v)| json!({"degree": n, "weight": p, "dim": v})).collect())
}

fn cohomology_json(h: &CohomologyReport) -> Value {
    let mut betti = Map::new();
    for n in h.window.min..=h.window.max {
        betti.insert(n.to_string(), json!(h.degree_dim(n)));
    }
    json!({"window": h.window.to_string(), "dims": dims_json(&h.dims), "betti": betti})
}

fn check_json(r: &CheckReport) -> Value {
    let checks: Map<String, Value> = r.checks.iter().map(|(n, ok)| (n.clone(), json!(ok))).collect();
    json!({"subject": r.subject, "passed": r.passed, "checks": checks, "witness": r.witness})
}

fn gens_json(p: &crate::freecga::CdgaPresentation) -> Value {
    Value::Array(p.gens().iter().zip(p.describe()).map(|(g, (_, d))| json!({"name": g.name, "degree": g.degree, "weight": g.weight, "d": d})).collect())
}

fn lie_gens_json(p: &crate::freelie::DglaPresentation) -> Value {
    Value::Array(p.gens().iter().zip(p.describe()).map(|(g, (_, d))| json!({"name": g.name, "degree": g.degree, "weight": g.weight, "d": d})).collect())
}

fn structure_json(s: &OoStructure) -> Value {
    let ops: Vec<usize> = s.ops.iter().filter(|(_, o)| !o.is_zero()).map(|(&m, _)| m).collect();
    json!({"kind": s.kind.name(), "dims": dims_json(&s.space.dims()), "nonzero_arities": ops, "arity_bound": s.arity_bound})
}

pub fn run(cmd: &str, doc: Option<&Document>, o: &Options) -> Result<Report> {
    if !COMMANDS.contains(&cmd) {
        return Err(Error::Usage(format!("unknown command `{cmd}`; expected one of {}", COMMANDS.join(", "))));
    }
    if cmd == "verify-suite" {
        let rs = crate::corpus::invariant_suite()?;
        let passed = rs.iter().all(|r| r.passed);
        let value = json!({"objects": rs.len(), "failures": rs.iter().filter(|r| !r.passed).map(check_json).collect::<Vec<_>>()});
        return Ok(wrap(cmd, "corpus", value, passed));
    }
    let doc = doc.ok_or_else(|| Error::Usage(format!("{cmd} needs an input file")))?;
    let name = |b: &Block| b.name().to_string();
    match cmd {
        "check" => {
            let mut all = true;
            let mut out = Vec::new();
            for b in &doc.blocks {
                if o.block.as_deref().is_some_and(|n| n != b.name()) {
                    continue;
                }
                let r = match b {
                    Block::Cdga(p) => p.check(),
                    Block::Dgla(p) => p.check(),
                    Block::Fd(a) => a.check(),
                    Block::Map(_) => match doc.resolve_map(b)? {
                        parse::ResolvedMap::Cdga(m) => m.check(),
                        parse::ResolvedMap::ToFd(f) => f.check(),
                    },
                    Block::Mc(m) => match o.window {
                        Some(w) => mc_check(doc, m, w)?,
                        None => {
                            let mut r = CheckReport::new(format!("mc {}", m.name));
                            r.note("skipped_needs_window", false);
                            r
                        }
                    },
                };
                all &= r.passed;
                out.push(json!({"block": b.name(), "kind": b.kind(), "report": check_json(&r)}));
            }
            Ok(wrap(cmd, o.block.as_deref().unwrap_or("*"), json!({"blocks": out}), all))
        }
        "cohomology" => {
            let w = o.window(cmd)?;
            let b = doc.pick(o.block.as_deref(), &["cdga", "dgla", "fdalgebra"])?;
            let h = match b {
                Block::Cdga(p) => p.cohomology(w)?.1,
                Block::Dgla(p) => p.cohomology(w)?.1,
                Block::Fd(a) => a.complex().cohomology(w),
                _ => unreachable!(),
            };
            Ok(wrap(cmd, &name(b), cohomology_json(&h), true))
        }
        "minimal-model" => {
            let w = o.window(cmd)?;
            let b = doc.pick(o.block.as_deref(), &["cdga", "fdalgebra"])?;
            let m = match b {
                Block::Cdga(p) => minimal_model(p, w.max)?,
                Block::Fd(a) => minimal_model_of_fd(a, w.max)?,
                _ => unreachable!(),
            };
            let r = m.check()?;
            Ok(wrap(cmd, &name(b), json!({"generators": gens_json(&m.model), "max_degree": m.max_degree, "report": check_json(&r)}), r.passed))
        }
        "quillen" => {
            let w = o.window(cmd)?;
            let b = doc.pick(o.block.as_deref(), &["fdalgebra"])?;
            let Block::Fd(a) = b else { unreachable!() };
            let l = quillen_dgla(a, w)?;
            let r = l.presentation.check();
            Ok(wrap(cmd, &name(b), json!({"generators": lie_gens_json(&l.presentation), "report": check_json(&r)}), r.passed))
        }
        "ce" => {
            let w = o.window(cmd)?;
            let b = doc.pick(o.block.as_deref(), &["dgla"])?;
            let Block::Dgla(p) = b else { unreachable!() };
            let (_, ce) = ce_of_dgla(p, w.max + 1, w)?;
            let r = ce.presentation.check();
            Ok(wrap(cmd, &name(b), json!({"truncation_depth": w.max + 1, "generators": gens_json(&ce.presentation), "report": check_json(&r)}), r.passed))
        }
        "transfer" => {
            let m = o.arity(cmd)?;
            let b = doc.pick(o.block.as_deref(), &["cdga", "dgla", "fdalgebra"])?;
            let model = match b {
                Block::Cdga(p) => minimal_of_cdga(p, o.window(cmd)?, m)?,
                Block::Dgla(p) => minimal_of_dgla(p, o.window(cmd)?, m)?,
                Block::Fd(a) => minimal_of_fd(a, m),
                _ => unreachable!(),
            };
            let s = &model.structure;
            let rel = s.check_relations(m.min(4));
            let mut value = structure_json(s);
            value["relations"] = check_json(&rel);
            let mut passed = rel.passed;
            if !matches!(b, Block::Dgla(_)) {
                let seg = segmentation(&s.space.dims(), o.alpha.clone());
                if let (true, Some(a), Some(k)) = (seg.passed, &seg.alpha, seg.k) {
                    let v = vanishing_from_segmentation(s, a, k as usize)?;
                    passed &= v.passed;
                    value["vanishing"] = json!({"alpha": a.to_string(), "k": k, "checked_up_to": v.checked_up_to, "nonzero_above": v.nonzero_above, "passed": v.passed});
                }
            }
            Ok(wrap(cmd, &name(b), value, passed))
        }
        "segment" => {
            let b = doc.pick(o.block.as_deref(), &["cdga", "dgla", "fdalgebra"])?;
            let dims = match b {
                Block::Cdga(p) => p.cohomology(o.window(cmd)?)?.1.dims,
                Block::Dgla(p) => p.cohomology(o.window(cmd)?)?.1.dims,
                Block::Fd(a) => a.complex().cohomology(o.window.unwrap_or(a.space.window())).dims,
                _ => unreachable!(),
            };
            let s = segmentation(&dims, o.alpha.clone());
            let value = json!({"alpha": s.alpha.as_ref().map(|a| a.to_string()), "k": s.k, "support": s.support, "reason": s.reason});
            Ok(wrap(cmd, &name(b), value, s.passed))
        }
        "map-model" => {
            let w = o.window(cmd)?;
            let b = doc.pick(o.block.as_deref(), &["mc"])?;
            let Block::Mc(m) = b else { unreachable!() };
            let (a, l, tau) = mc_parts(doc, m, w)?;
            let t = tensor_linfty(&a, &l, None)?;
            let tau = verify_mc(&t.structure, &embed_tau(&t, &tau))?;
            let model = mapping_space_model(&a, &l, &tau)?;
            let rel = model.check_relations(4);
            let h = model.cohomology();
            Ok(wrap(cmd, &name(b), json!({"weight_zero": tau.weight_zero, "model": structure_json(&model), "cohomology": cohomology_json(&h), "relations": check_json(&rel)}), rel.passed))
        }
        "aut-model" => {
            let w = o.window(cmd)?;
            let b = doc.pick(o.block.as_deref(), &["cdga", "dgla"])?;
            let (m, d) = match b {
                Block::Cdga(p) => (baut_model(Input::Cdga(p), w)?, o.dim.or_else(|| formal_dimension(p))),
                Block::Dgla(p) => (baut_model(Input::Dgla(p), w)?, o.dim),
                _ => unreachable!(),
            };
            let sign = m.weight_sign();
            let mut value = json!({"cohomology": cohomology_json(&m.cohomology), "weights": sign.name()});
            let mut passed = matches!(sign, crate::sullivan::Sign::Negative | crate::sullivan::Sign::Empty);
            if let Some(d) = d {
                let v = m.interval_violations(d);
                passed &= v.is_empty();
                value["formal_dimension"] = json!(d);
                value["interval_violations"] = json!(v);
            }
            Ok(wrap(cmd, &name(b), value, passed))
        }
        "loop-model" => {
            let w = o.window(cmd)?;
            let b = doc.pick(o.block.as_deref(), &["cdga"])?;
            let Block::Cdga(p) = b else { unreachable!() };
            let model = match o.kind.as_deref().unwrap_or("free") {
                "free" => free_loop_model(p)?,
                "cyclic" => cyclic_loop_model(p)?,
                k => return Err(Error::Usage(format!("--kind must be free or cyclic, not {k}"))),
            };
            let r = loop_checks(p, &model, w.max);
            let (_, h) = model.cohomology(w)?;
            Ok(wrap(cmd, &name(b), json!({"generators": gens_json(&model), "cohomology": cohomology_json(&h), "report": check_json(&r)}), r.passed))
        }
        "ul-dims" => {
            let w = o.window(cmd)?;
            let b = doc.pick(o.block.as_deref(), &["dgla"])?;
            let Block::Dgla(p) = b else { unreachable!() };
            let (_, h) = p.cohomology(DegreeWindow { min: w.min, max: -1 })?;
            let ul = universal_enveloping_dims(&h.dims, w)?;
            let dims: Vec<Value> = ul.iter().map(|(&(n, p), &c)| json!({"degree": n, "weight": p, "dim": c})).collect();
            let neg = crate::sullivan::classify(h.dims.iter().filter(|(_, &v)| v > 0).map(|(&k, _)| k)) != crate::sullivan::Sign::Negative || ul_negative(&ul);
            Ok(wrap(cmd, &name(b), json!({"lie_cohomology": dims_json(&h.dims), "ul": dims}), neg))
        }
        _ => unreachable!(),
    }
}

fn wrap(cmd: &str, input: &str, result: Value, passed: bool) -> Report {
    Report { value: json!({"schema": 1, "command": cmd, "input": input, "passed": passed, "result": result}), passed }
}

/// Top degree of `H(p)` when it is finite within the presentation window.
fn formal_dimension(p: &crate::freecga::CdgaPresentation) -> Option<i32> {
    let w = DegreeWindow { min: 0, max: p.window.max - 1 };
    let (_, h) = p.cohomology(w).ok()?;
    let top = (0..=w.max).rev().find(|&n| h.degree_dim(n) > 0)?;
    (2 * top + 2 <= w.max).then_some(top)
}

/// The algebra, the truncated dgla and `τ` in (algebra index, Lie index) coordinates.
fn mc_parts(doc: &Document, m: &parse::McBlock, w: DegreeWindow) -> Result<(FdAlgebra, OoStructure, Vec<((usize, usize), Scalar)>)> {
    let Some(Block::Fd(a)) = doc.get(&m.algebra) else { return Err(Error::UnknownName(m.algebra.clone())) };
    let Some(Block::Dgla(p)) = doc.get(&m.lie) else { return Err(Error::UnknownName(m.lie.clone())) };
    let t = dgla_good_truncation(p, -w.min)?;
    let mut terms = Vec::new();
    for (label, x, c) in &m.coeffs {
        let i = a.space.index_of(label).ok_or_else(|| Error::UnknownName(label.clone()))?;
        let e = parse::lie_expr(&p.lie, x)?;
        for (j, y) in t.project(&e)? {
            terms.push(((i, j), c * y));
        }
    }
    Ok((a.clone(), t.structure, terms))
}

fn embed_tau(t: &crate::mapping::TensorLinfty, terms: &[((usize, usize), Scalar)]) -> SparseVec {
    let mut v = SparseVec::new();
    axpy(&mut v, &Scalar::from_integer(1.into()), &t.element(terms));
    v
}

fn mc_check(doc: &Document, m: &parse::McBlock, w: DegreeWindow) -> Result<CheckReport> {
    let (a, l, tau) = mc_parts(doc, m, w)?;
    let t = tensor_linfty(&a, &l, None)?;
    let mut r = CheckReport::new(format!("mc {}", m.name));
    match verify_mc(&t.structure, &embed_tau(&t, &tau)) {
        Ok(e) => {
            r.record("maurer_cartan", true, "");
            r.record("weight_zero", e.weight_zero, "tau has nonzero weight");
        }
        Err(e) => r.record("maurer_cartan", false, &e.to_string()),
    }
    Ok(r)
}

/// Exit status for an outcome: 0 pass, 1 verification failure, 2 usage or parse error.
pub fn exit_code(r: &Result<Report>) -> i32 {
    match r {
        Ok(rep) if rep.passed => 0,
        Ok(_) => 1,
        Err(Error::Parse { .. } | Error::Usage(_) | Error::UnknownName(_) | Error::DuplicateName(_) | Error::InvalidWindow(_)) => 2,
        Err(_) => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(w: Option<&str>, arity: Option<usize>) -> Options {
        Options { window: w.map(|s| s.parse().unwrap()), arity, ..Default::default() }
    }

    #[test]
    fn segment_on_pure_cohomology() {
        let d = parse("fdalgebra H { basis 1 : deg 0, wt 0; basis u : deg 2, wt 2; basis u^2 : deg 4, wt 4; unit 1; mul u*u = u^2; }").unwrap();
        let r = run("segment", Some(&d), &Options::default()).unwrap();
        assert!(r.passed);
        assert_eq!(r.value["result"]["alpha"], "1");
        assert_eq!(r.value["result"]["k"], 0);
    }

    #[test]
    fn transfer_on_mapping_algebra() {
        let d = parse("cdga M { gen z : deg 2, wt 2; gen y1 : deg 3, wt 4; gen y2 : deg 5, wt 6; d y1 = z^2; d y2 = z^3; window 0..14; }").unwrap();
        let r = run("transfer", Some(&d), &opts(Some("0..12"), Some(6))).unwrap();
        assert!(r.passed, "{}", r.value);
        let ops: Vec<u64> = r.value["result"]["nonzero_arities"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
        assert!(ops.iter().all(|&m| m <= 3), "{ops:?}");
    }

    #[test]
    fn aut_model_cp2() {
        let d = parse("cdga CP2 { gen x : deg 2, wt 2; gen y : deg 5, wt 6; d y = x^3; window 0..14; }").unwrap();
        let r = run("aut-model", Some(&d), &opts(Some("-6..0"), None)).unwrap();
        assert!(r.passed, "{}", r.value);
        assert_eq!(r.value["result"]["weights"], "negative");
        assert_eq!(r.value["result"]["formal_dimension"], 4);
    }

    #[test]
    fn map_model_from_text() {
        let text = "
fdalgebra A { basis 1 : deg 0, wt 0; basis u : deg 2, wt 2; unit 1; }
fdalgebra B { basis 1 : deg 0, wt 0; basis u : deg 2, wt 2; basis u^2 : deg 4, wt 4; unit 1; mul u*u = u^2; }
dgla L { gen v1 : deg -1, wt -2; gen v2 : deg -3, wt -4; d v2 = 1/2 [v1,v1]; }
mc tau : A, L { coeff u, v1 = -1; }
";
        let d = parse(text).unwrap();
        let r = run("map-model", Some(&d), &opts(Some("-6..-1"), None)).unwrap();
        assert!(r.passed, "{}", r.value);
        assert_eq!(r.value["result"]["weight_zero"], true);
        let c = run("check", Some(&d), &opts(Some("-6..-1"), None)).unwrap();
        assert!(c.passed, "{}", c.value);
    }

    #[test]
    fn usage_errors() {
        let d = parse("dgla L { gen v1 : deg -1, wt -2; }").unwrap();
        let r = run("cohomology", Some(&d), &Options::default());
        assert_eq!(exit_code(&r), 2);
        assert_eq!(exit_code(&run("frobnicate", Some(&d), &Options::default())), 2);
        let u = run("ul-dims", Some(&d), &opts(Some("-6..0"), None)).unwrap();
        assert!(u.passed);
    }
}
