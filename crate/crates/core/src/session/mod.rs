//! Session scripts: one command per line, executed in order against named
//! bindings, each producing a record with its verdict.

mod emit;
mod parse;

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::BigRational;
use serde::Serialize;

pub use emit::{render, render_error, render_record, Format};
pub use parse::{parse_line, split_list, Arg, CommandLine};

use crate::cring::{self, Hom, Presentation};
use crate::filterideal::{self, ClosedSetFilter};
use crate::order::{self, PointOrdering};
use crate::radical;
use crate::rational::{format_rational, parse_rational};
use crate::sheaf::{self, SectionOnBasic};
use crate::spectrum::{self, BasicOpen, ConstructibleBasic, SpectrumPoint};
use crate::termlang::{parse_term, RatBox, Term};
use crate::zerocert::{Point, QueryBudget, Verdict, VerdictKind, Witness};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct SessionError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub budget: QueryBudget,
    /// Box used by `ring` and `filter` when none is given; one `lo,hi` pair
    /// is repeated for every variable.
    pub default_box: Vec<(BigRational, BigRational)>,
    pub certificates: bool,
    pub timing: bool,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            budget: QueryBudget::default(),
            default_box: vec![(BigRational::from_integer((-2).into()), BigRational::from_integer(2.into()))],
            certificates: false,
            timing: true,
        }
    }
}

/// A secondary verdict reported by a command.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub label: String,
    pub verdict: VerdictKind,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Verdict>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub line: usize,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictKind>,
    pub detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub output: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<VerdictKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expectation_met: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub records: Vec<Record>,
    pub error: Option<SessionError>,
}

impl RunOutcome {
    pub fn failed_expectations(&self) -> usize {
        self.records.iter().filter(|r| r.expectation_met == Some(false)).count()
    }

    pub fn unknowns(&self) -> usize {
        let checks = self.records.iter().flat_map(|r| &r.checks).filter(|c| c.verdict == VerdictKind::Unknown);
        self.records.iter().filter(|r| r.verdict == Some(VerdictKind::Unknown)).count() + checks.count()
    }

    /// 64 on a script error, 1 on a failed expectation, 2 on an UNKNOWN
    /// when strict, else 0.
    pub fn exit_code(&self, strict: bool) -> i32 {
        if self.error.is_some() {
            64
        } else if self.failed_expectations() > 0 {
            1
        } else if strict && self.unknowns() > 0 {
            2
        } else {
            0
        }
    }
}

#[derive(Clone, Debug)]
enum Binding {
    Ring(Presentation),
    Elem { ring: String, term: Term },
    Hom(Hom),
    Open(BasicOpen),
    Filter(ClosedSetFilter),
    Section(SectionOnBasic),
}

impl Binding {
    fn kind(&self) -> &'static str {
        match self {
            Binding::Ring(_) => "ring",
            Binding::Elem { .. } => "element",
            Binding::Hom(_) => "homomorphism",
            Binding::Open(_) => "open",
            Binding::Filter(_) => "filter",
            Binding::Section(_) => "section",
        }
    }
}

/// What a command produced, before bookkeeping.
#[derive(Default)]
struct Outcome {
    verdict: Option<Verdict>,
    detail: Option<String>,
    output: Vec<String>,
    checks: Vec<(String, Verdict)>,
}

impl Outcome {
    fn verdict(v: Verdict) -> Outcome {
        Outcome { verdict: Some(v), ..Outcome::default() }
    }

    fn info(line: String) -> Outcome {
        Outcome { detail: Some(line), ..Outcome::default() }
    }
}

pub struct Session {
    options: Options,
    bindings: BTreeMap<String, Binding>,
    /// Used when a command omits `ring=`.
    last_ring: Option<String>,
}

/// Sampling resolution when a command does not give one.
const DEFAULT_RESOLUTION: usize = 8;

impl Session {
    pub fn new(options: Options) -> Session {
        Session { options, bindings: BTreeMap::new(), last_ring: None }
    }

    /// Runs every line; stops at the first script error.
    pub fn run_script(&mut self, script: &str) -> RunOutcome {
        let mut records = Vec::new();
        for (i, text) in script.lines().enumerate() {
            let cmd = match parse_line(i + 1, text) {
                Ok(Some(cmd)) => cmd,
                Ok(None) => continue,
                Err(e) => return RunOutcome { records, error: Some(e) },
            };
            match self.execute(&cmd) {
                Ok(r) => records.push(r),
                Err(e) => return RunOutcome { records, error: Some(e) },
            }
        }
        RunOutcome { records, error: None }
    }

    pub fn execute(&mut self, cmd: &CommandLine) -> Result<Record, SessionError> {
        let start = Instant::now();
        let outcome = self.dispatch(cmd)?;
        let elapsed = start.elapsed().as_secs_f64() * 1000.0;
        let kind = outcome.verdict.as_ref().map(Verdict::kind);
        if cmd.expect.is_some() && kind.is_none() {
            return Err(cmd.error(1, format!("`{}` has no verdict to expect", cmd.name)));
        }
        let detail = match (&outcome.detail, &outcome.verdict) {
            (Some(d), _) => d.clone(),
            (None, Some(v)) => v.detail(),
            (None, None) => String::new(),
        };
        let certificates = self.options.certificates;
        Ok(Record {
            line: cmd.line,
            command: cmd.name.clone(),
            verdict: kind,
            detail,
            output: outcome.output,
            checks: outcome
                .checks
                .into_iter()
                .map(|(label, v)| Check {
                    label,
                    verdict: v.kind(),
                    detail: v.detail(),
                    trace: (certificates && v.is_decided()).then_some(v),
                })
                .collect(),
            witness: outcome.verdict.as_ref().and_then(Verdict::witness).cloned(),
            trace: outcome.verdict.filter(|v| certificates && v.is_decided()),
            expect: cmd.expect,
            expectation_met: cmd.expect.map(|e| Some(e) == kind),
            timing_ms: self.options.timing.then_some(elapsed),
        })
    }

    fn dispatch(&mut self, cmd: &CommandLine) -> Result<Outcome, SessionError> {
        let budget = self.options.budget.clone();
        let b = &budget;
        match cmd.name.as_str() {
            "ring" => {
                let name = self.new_name(cmd)?;
                let n = self.usize_arg(cmd, "vars")?;
                self.allow(cmd, &["vars", "relations", "box"])?;
                let region = self.region_arg(cmd, n)?;
                let relations = match cmd.args.iter().find(|a| a.key == "relations") {
                    Some(a) => self.term_list(cmd, a, n)?,
                    None => Vec::new(),
                };
                let p = Presentation::new(n, relations, region).map_err(|e| cmd.error(1, e.to_string()))?;
                Ok(self.bind_ring(name, p))
            }
            "elem" => {
                let name = self.new_name(cmd)?;
                self.allow(cmd, &["ring", "term"])?;
                let (ring_name, p) = self.ring_arg(cmd, "ring")?;
                let term = self.term_arg(cmd, "term", &p)?;
                let line = format!("elem {name} = {term}");
                self.bindings.insert(name, Binding::Elem { ring: ring_name, term });
                Ok(Outcome::info(line))
            }
            "hom" => {
                let name = self.new_name(cmd)?;
                self.allow(cmd, &["source", "target", "images"])?;
                let (_, source) = self.ring_arg(cmd, "source")?;
                let (_, target) = self.ring_arg(cmd, "target")?;
                let images = self.list_arg(cmd, "images", &target)?;
                let h = Hom::new(source, target, images).map_err(|e| cmd.error(self.col(cmd, "images"), e.to_string()))?;
                let wd = h.well_defined(b);
                let line = format!("hom {name}: images [{}]", join(&h.images));
                self.bindings.insert(name, Binding::Hom(h));
                Ok(Outcome { verdict: Some(wd), detail: Some(line), ..Outcome::default() })
            }
            "localize" => {
                let name = self.new_name(cmd)?;
                self.allow(cmd, &["ring", "at"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let at = self.terms_arg(cmd, "at", &p)?;
                let l = p.localize_set(&at).map_err(|e| cmd.error(self.col(cmd, "at"), e.to_string()))?;
                Ok(self.bind_ring(name, l.ring))
            }
            "quotient" => {
                let name = self.new_name(cmd)?;
                self.allow(cmd, &["ring", "by"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let by = self.terms_arg(cmd, "by", &p)?;
                let q = p.quotient(&by).map_err(|e| cmd.error(1, e.to_string()))?.0;
                Ok(self.bind_ring(name, q))
            }
            "coproduct" => {
                let name = self.new_name(cmd)?;
                self.allow(cmd, &["left", "right"])?;
                let (_, l) = self.ring_arg(cmd, "left")?;
                let (_, r) = self.ring_arg(cmd, "right")?;
                Ok(self.bind_ring(name, l.coproduct(&r).0))
            }
            "adjoin" => {
                let name = self.new_name(cmd)?;
                self.allow(cmd, &["ring", "count"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let k = self.usize_arg(cmd, "count")?;
                Ok(self.bind_ring(name, p.adjoin_variables(k).0))
            }
            "idempotent-invert" => {
                self.allow(cmd, &["ring", "e"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let e = self.term_arg(cmd, "e", &p)?;
                match cring::invert_idempotent(&p, &e, b) {
                    Ok(r) => Ok(Outcome {
                        output: vec![format!("quotient: {}", r.quotient), format!("localized: {}", r.localized)],
                        checks: vec![("idempotent".into(), r.idempotent.clone())],
                        ..Outcome::verdict(r.verdict)
                    }),
                    Err(cring::CringError::NotIdempotent(w)) => {
                        Ok(Outcome { detail: Some(format!("not idempotent: witness {}", w.summary())), ..Outcome::verdict(Verdict::Refuted(*w)) })
                    }
                    Err(e) => Err(cmd.error(self.col(cmd, "e"), e.to_string())),
                }
            }
            "localize-chain" => {
                self.allow(cmd, &["ring", "b", "c", "samples"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let bt = self.term_arg(cmd, "b", &p)?;
                let ct = self.term_arg(cmd, "c", &p)?;
                let want = self.opt_usize(cmd, "samples", 20)?;
                let r = cring::localize_chain(&p, &bt, &ct, want, b).map_err(|e| cmd.error(1, e.to_string()))?;
                Ok(Outcome {
                    output: vec![format!("samples {} max deviation {:.3e}", r.samples, r.max_deviation)],
                    ..Outcome::verdict(r.verdict)
                })
            }
            "quotient-localize" => {
                self.allow(cmd, &["ring", "by", "at"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let by = self.terms_arg(cmd, "by", &p)?;
                let at = self.term_arg(cmd, "at", &p)?;
                let r = cring::quotient_localize_commute(&p, &by, &at, b).map_err(|e| cmd.error(1, e.to_string()))?;
                let structural = structural_verdict(&r.renaming);
                Ok(Outcome {
                    checks: vec![("renaming".into(), structural.clone()), ("fraction form".into(), r.fraction_form.clone())],
                    ..Outcome::verdict(structural.and(r.fraction_form))
                })
            }
            "coproduct-localize" => {
                self.allow(cmd, &["left", "right", "left-at", "right-at", "samples"])?;
                let (_, l) = self.ring_arg(cmd, "left")?;
                let (_, r) = self.ring_arg(cmd, "right")?;
                let s1 = self.terms_arg(cmd, "left-at", &l)?;
                let s2 = self.terms_arg(cmd, "right-at", &r)?;
                let want = self.opt_usize(cmd, "samples", 20)?;
                let rep = cring::coproduct_localize_commute(&l, &s1, &r, &s2, want, b).map_err(|e| cmd.error(1, e.to_string()))?;
                let mut v = structural_verdict(&rep.renaming);
                if rep.max_deviation > 1e-9 {
                    v = Verdict::unknown(format!("sample deviation {:.3e}", rep.max_deviation));
                }
                Ok(Outcome { output: vec![format!("samples {} max deviation {:.3e}", rep.samples, rep.max_deviation)], ..Outcome::verdict(v) })
            }
            "radical-member" => {
                self.allow(cmd, &["ring", "f"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let f = self.term_arg(cmd, "f", &p)?;
                Ok(Outcome::verdict(radical::radical_member(&p, &f, b).map_err(|e| cmd.error(1, e.to_string()))?))
            }
            "sat-member" => {
                self.allow(cmd, &["ring", "set", "g"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let set = self.terms_arg(cmd, "set", &p)?;
                let g = self.term_arg(cmd, "g", &p)?;
                Ok(Outcome::verdict(radical::saturation_member(&p, &set, &g, b).map_err(|e| cmd.error(1, e.to_string()))?))
            }
            "radical-compare" => {
                self.allow(cmd, &["left", "right"])?;
                let (_, i) = self.ring_arg(cmd, "left")?;
                let (_, j) = self.ring_arg(cmd, "right")?;
                Ok(Outcome::verdict(radical::radical_compare(&i, &j, b).map_err(|e| cmd.error(1, e.to_string()))?))
            }
            "nullstellensatz" => {
                self.allow(cmd, &["ring"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let v = radical::nullstellensatz_check(&p, b);
                let detail = match &v {
                    Verdict::Proved(_) => "ring trivial".to_string(),
                    Verdict::Refuted(w) => format!("point {}", w.summary()),
                    Verdict::Unknown(r) => r.to_string(),
                };
                Ok(Outcome { detail: Some(detail), ..Outcome::verdict(v) })
            }
            "separation" => {
                self.allow(cmd, &["ring", "set"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let set = self.terms_arg(cmd, "set", &p)?;
                let r = radical::separation_check(&p, &set, b).map_err(|e| cmd.error(1, e.to_string()))?;
                let agree = r.agree();
                Ok(Outcome {
                    output: vec![format!("sides agree: {agree}")],
                    checks: vec![("meets saturation".into(), r.meets_saturation)],
                    ..Outcome::verdict(r.meets_monoid)
                })
            }
            "semireal" => {
                self.allow(cmd, &["ring", "fs"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let fs = self.terms_arg(cmd, "fs", &p)?;
                Ok(Outcome::verdict(radical::semireal_check(&p, &fs, b).map_err(|e| cmd.error(1, e.to_string()))?))
            }
            "filter" => {
                let name = self.new_name(cmd)?;
                self.allow(cmd, &["vars", "gens", "box"])?;
                let n = self.usize_arg(cmd, "vars")?;
                let region = self.region_arg(cmd, n)?;
                let gens = match cmd.args.iter().find(|a| a.key == "gens") {
                    Some(a) => self.term_list(cmd, a, n)?,
                    None => Vec::new(),
                };
                let f = ClosedSetFilter::new(region, gens).map_err(|e| cmd.error(1, e.to_string()))?;
                Ok(self.bind_filter(name, f))
            }
            "filter-hat" => {
                let name = self.new_name(cmd)?;
                self.allow(cmd, &["ring"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let f = filterideal::hat(&p);
                let improper = f.is_improper(b);
                let mut o = self.bind_filter(name, f);
                o.checks.push(("improper".into(), improper));
                Ok(o)
            }
            "filter-check" => {
                self.allow(cmd, &["filter", "f"])?;
                let f = self.filter_arg(cmd, "filter")?;
                let t = self.term_in(cmd, "f", f.arity())?;
                Ok(Outcome::verdict(filterideal::check(&f, &t, b)))
            }
            "galois" => {
                self.allow(cmd, &["ring", "filter"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let f = self.filter_arg(cmd, "filter")?;
                let r = filterideal::galois_adjunction_test(&p, &f, b).map_err(|e| cmd.error(1, e.to_string()))?;
                let agree = r.agree();
                Ok(Outcome {
                    output: vec![format!("sides agree: {agree}")],
                    checks: vec![("I in check(F)".into(), r.right)],
                    ..Outcome::verdict(r.left)
                })
            }
            "closure" => {
                self.allow(cmd, &["ring", "samples"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let samples = self.terms_arg(cmd, "samples", &p)?;
                let r = filterideal::closure_equals_radical(&p, &samples, b).map_err(|e| cmd.error(1, e.to_string()))?;
                let agree = r.iter().all(|s| s.agree());
                let output = r.iter().map(|s| format!("{}: {} / {}", s.term, s.via_filter.kind(), s.via_radical.kind())).collect();
                let v = if agree { Verdict::all([]) } else { Verdict::unknown("routes disagree") };
                Ok(Outcome { output, detail: Some(format!("{} sample(s), routes agree: {agree}", r.len())), ..Outcome::verdict(v) })
            }
            "open" => {
                let name = self.new_name(cmd)?;
                self.allow(cmd, &["ring", "at"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let a = self.term_arg(cmd, "at", &p)?;
                let o = BasicOpen::new(&p, a).map_err(|e| cmd.error(1, e.to_string()))?;
                Ok(self.bind_open(name, o))
            }
            "leq" => {
                self.allow(cmd, &["left", "right"])?;
                let u = self.open_arg(cmd, "left")?;
                let v = self.open_arg(cmd, "right")?;
                Ok(Outcome::verdict(spectrum::basic_leq(&u, &v, b).map_err(|e| cmd.error(1, e.to_string()))?))
            }
            "meet" | "join" => {
                let name = self.new_name(cmd)?;
                self.allow(cmd, &["left", "right"])?;
                let u = self.open_arg(cmd, "left")?;
                let v = self.open_arg(cmd, "right")?;
                let o = if cmd.name == "meet" { spectrum::basic_meet(&u, &v) } else { spectrum::basic_join(&u, &v) };
                Ok(self.bind_open(name, o.map_err(|e| cmd.error(1, e.to_string()))?))
            }
            "covers" => {
                self.allow(cmd, &["ring", "family"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let family = self.terms_arg(cmd, "family", &p)?;
                let r = spectrum::covers(&p, &family, b).map_err(|e| cmd.error(self.col(cmd, "family"), e.to_string()))?;
                let output = if r.verdict.is_proved() {
                    vec![format!("subcover: {:?}", r.subcover)]
                } else {
                    Vec::new()
                };
                Ok(Outcome { output, ..Outcome::verdict(r.verdict) })
            }
            "points" => {
                self.allow(cmd, &["ring", "resolution", "export"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let res = self.opt_usize(cmd, "resolution", DEFAULT_RESOLUTION)?;
                let pts = spectrum::sample_points(&p, res, b);
                let lines: Vec<String> = pts.iter().map(SpectrumPoint::export_line).collect();
                if let Some(a) = cmd.args.iter().find(|a| a.key == "export") {
                    let mut text = lines.join("\n");
                    if !text.is_empty() {
                        text.push('\n');
                    }
                    std::fs::write(&a.value, text).map_err(|e| cmd.error(a.column, format!("cannot write: {e}")))?;
                }
                let certified = pts.iter().filter(|x| x.on_zero_set.is_proved()).count();
                Ok(Outcome {
                    detail: Some(format!("{} point(s), {certified} certified", pts.len())),
                    output: lines,
                    ..Outcome::default()
                })
            }
            "in-open" => {
                self.allow(cmd, &["open", "at"])?;
                let u = self.open_arg(cmd, "open")?;
                let x = self.point_arg(cmd, "at", &u.ring)?;
                Ok(Outcome::verdict(spectrum::point_in_open(&x, &u)))
            }
            "product-spectrum" => {
                self.allow(cmd, &["factors", "opens", "resolution"])?;
                let factors = self.rings_arg(cmd, "factors")?;
                let res = self.opt_usize(cmd, "resolution", DEFAULT_RESOLUTION)?;
                let mut elements = Vec::new();
                if let Some(a) = cmd.args.iter().find(|a| a.key == "opens") {
                    for (item, col) in self.list_items(cmd, a)? {
                        let parts: Vec<&str> = item.split('|').collect();
                        if parts.len() != factors.len() {
                            return Err(cmd.error(col, format!("expected {} component(s) separated by `|`", factors.len())));
                        }
                        let mut element = Vec::new();
                        for (part, f) in parts.iter().zip(&factors) {
                            element.push(self.parse_in(cmd, part.trim(), col, f.arity())?);
                        }
                        elements.push(element);
                    }
                }
                let s = spectrum::product_spectrum(&factors, &elements, res, b).map_err(|e| cmd.error(1, e.to_string()))?;
                let mut output: Vec<String> =
                    s.points.iter().map(|pp| format!("point {} of factor {}", pp.point.point, pp.factor)).collect();
                output.push(format!("glued points: {}, matched: {}", s.glued_points.len(), s.matched));
                for o in &s.opens {
                    output.push(format!("D({}) contains {:?}, glued agrees: {}", join_with(&o.element, " | "), o.members, o.agree));
                }
                let ok = s.matched && s.opens.iter().all(|o| o.agree);
                let v = if ok { Verdict::all([]) } else { Verdict::unknown("factorwise and glued spectra differ") };
                Ok(Outcome { detail: Some(format!("{} point(s)", s.points.len())), output, ..Outcome::verdict(v) })
            }
            "spectral-map" => {
                self.allow(cmd, &["hom", "open", "resolution"])?;
                let h = self.hom_arg(cmd, "hom")?;
                let u = self.open_arg(cmd, "open")?;
                let res = self.opt_usize(cmd, "resolution", DEFAULT_RESOLUTION)?;
                let r = spectrum::spectral_map(&h, &u, res, b).map_err(|e| cmd.error(1, e.to_string()))?;
                let v = if r.agree() { Verdict::all([]) } else { Verdict::unknown("preimage membership disagrees") };
                Ok(Outcome {
                    detail: Some(format!("preimage D({}), {} point(s) checked", r.preimage.term, r.checks.len())),
                    ..Outcome::verdict(v)
                })
            }
            "constructible-meet" => {
                self.allow(cmd, &["ring", "first", "second", "resolution"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let first = self.pair_arg(cmd, "first", &p)?;
                let second = self.pair_arg(cmd, "second", &p)?;
                let res = self.opt_usize(cmd, "resolution", DEFAULT_RESOLUTION)?;
                let m = spectrum::constructible_meet(&first, &second);
                let mut agree = true;
                let pts = spectrum::sample_points(&p, res, b);
                for x in &pts {
                    let both = first.contains(&x.point).and(second.contains(&x.point));
                    agree &= both.kind() == m.contains(&x.point).kind();
                }
                let v = if agree { Verdict::all([]) } else { Verdict::unknown("membership disagrees") };
                Ok(Outcome {
                    detail: Some(format!("D({}) ∩ Z({}), {} point(s) checked", m.open, m.closed, pts.len())),
                    ..Outcome::verdict(v)
                })
            }
            "nilradical" => {
                self.allow(cmd, &["ring", "f", "resolution"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let f = self.term_arg(cmd, "f", &p)?;
                let res = self.opt_usize(cmd, "resolution", DEFAULT_RESOLUTION)?;
                let r = spectrum::nilradical_point_test(&p, &f, res, b).map_err(|e| cmd.error(1, e.to_string()))?;
                Ok(Outcome {
                    output: vec![format!("{} point(s), consistent: {}", r.points.len(), r.consistent())],
                    ..Outcome::verdict(r.membership)
                })
            }
            "section" => {
                let name = self.new_name(cmd)?;
                self.allow(cmd, &["open", "num", "den"])?;
                let u = self.open_arg(cmd, "open")?;
                let num = self.term_arg(cmd, "num", &u.ring)?;
                let den = match cmd.args.iter().any(|a| a.key == "den") {
                    true => self.term_arg(cmd, "den", &u.ring)?,
                    false => Term::one(),
                };
                let s = SectionOnBasic::new(&u, num, den, b).map_err(|e| cmd.error(1, e.to_string()))?;
                Ok(self.bind_section(name, s))
            }
            "restrict" => {
                let name = self.new_name(cmd)?;
                self.allow(cmd, &["section", "to"])?;
                let s = self.section_arg(cmd, "section")?;
                let to = self.open_arg(cmd, "to")?;
                let r = sheaf::restrict(&s, &to, b).map_err(|e| cmd.error(self.col(cmd, "to"), e.to_string()))?;
                let mut o = self.bind_section(name, r.section);
                o.output.push(format!("{} sample(s), max deviation {:.3e}", r.samples, r.max_deviation));
                o.checks.push(("leq".into(), r.leq));
                Ok(o)
            }
            "germ" => {
                self.allow(cmd, &["section", "at"])?;
                let s = self.section_arg(cmd, "section")?;
                let x = self.point_arg(cmd, "at", &s.open.ring)?;
                let g = sheaf::germ_eval(&s, &x).map_err(|e| cmd.error(self.col(cmd, "at"), e.to_string()))?;
                let value = match g.value.as_exact() {
                    Some(q) => format_rational(q),
                    None => format!("{:.15e}", g.approx()),
                };
                Ok(Outcome { detail: Some(format!("value {value}, invertible {}", g.invertible.kind())), ..Outcome::verdict(g.invertible) })
            }
            "precedes" => {
                self.allow(cmd, &["ring", "f", "g"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let f = self.term_arg(cmd, "f", &p)?;
                let g = self.term_arg(cmd, "g", &p)?;
                Ok(Outcome::verdict(order::precedes(&f, &g, &p, b).map_err(|e| cmd.error(1, e.to_string()))?))
            }
            "ordering" | "harrison" => {
                let key = if cmd.name == "ordering" { "f" } else { "a" };
                self.allow(cmd, &["ring", "at", key])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let x = self.point_arg(cmd, "at", &p)?;
                let t = self.term_arg(cmd, key, &p)?;
                let o = PointOrdering::new(x);
                let v = if cmd.name == "ordering" { order::ordering_member(&o, &t) } else { order::harrison_member(&o, &t) };
                Ok(Outcome::verdict(v))
            }
            "supp" => {
                self.allow(cmd, &["ring", "at"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let x = self.point_arg(cmd, "at", &p)?;
                let s = order::supp_of(&PointOrdering::new(x));
                Ok(Outcome::info(format!("supp = m at {}", s.point)))
            }
            "supp-check" => {
                self.allow(cmd, &["ring", "a", "resolution"])?;
                let (_, p) = self.ring_arg(cmd, "ring")?;
                let a = self.term_arg(cmd, "a", &p)?;
                let res = self.opt_usize(cmd, "resolution", DEFAULT_RESOLUTION)?;
                let pts = spectrum::sample_points(&p, res, b);
                let cases = order::supp_spectral_check(&p, &a, &pts).map_err(|e| cmd.error(1, e.to_string()))?;
                let bij = order::supp_bijection_check(&pts);
                let ok = cases.iter().all(|c| c.agree()) && bij.injective && bij.onto_samples;
                let v = if ok { Verdict::all([]) } else { Verdict::unknown("support map check failed") };
                Ok(Outcome { detail: Some(format!("{} point(s), injective {}", pts.len(), bij.injective)), ..Outcome::verdict(v) })
            }
            other => Err(cmd.error(1, format!("unknown command `{other}`"))),
        }
    }

    fn bind_ring(&mut self, name: String, p: Presentation) -> Outcome {
        let line = format!("ring {name}: {p}");
        self.bindings.insert(name.clone(), Binding::Ring(p));
        self.last_ring = Some(name);
        Outcome::info(line)
    }

    fn bind_filter(&mut self, name: String, f: ClosedSetFilter) -> Outcome {
        let line = format!("filter {name}: gens [{}] box={}", join(&f.generators), f.region);
        self.bindings.insert(name, Binding::Filter(f));
        Outcome::info(line)
    }

    fn bind_open(&mut self, name: String, o: BasicOpen) -> Outcome {
        let line = format!("open {name} = D({})", o.term);
        self.bindings.insert(name, Binding::Open(o));
        Outcome::info(line)
    }

    fn bind_section(&mut self, name: String, s: SectionOnBasic) -> Outcome {
        let line = format!("section {name} = ({}) / ({}) on D({})", s.numerator, s.denominator, s.open.term);
        self.bindings.insert(name, Binding::Section(s));
        Outcome::info(line)
    }

    fn new_name(&self, cmd: &CommandLine) -> Result<String, SessionError> {
        let (name, column) = match cmd.positional.as_slice() {
            [(n, c)] => (n.clone(), *c),
            [] => return Err(cmd.error(1, format!("`{}` needs a name", cmd.name))),
            [_, (_, c), ..] => return Err(cmd.error(*c, "only one name may be given")),
        };
        let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid || is_variable(&name) {
            return Err(cmd.error(column, format!("`{name}` is not a valid binding name")));
        }
        if self.bindings.contains_key(&name) {
            return Err(cmd.error(column, format!("`{name}` is already bound")));
        }
        Ok(name)
    }

    fn allow(&self, cmd: &CommandLine, keys: &[&str]) -> Result<(), SessionError> {
        if !NAMED.contains(&cmd.name.as_str()) {
            if let Some((_, c)) = cmd.positional.first() {
                return Err(cmd.error(*c, format!("`{}` takes no name", cmd.name)));
            }
        }
        match cmd.args.iter().find(|a| !keys.contains(&a.key.as_str())) {
            Some(a) => Err(cmd.error(a.column - a.key.len() - 1, format!("unknown argument `{}`", a.key))),
            None => Ok(()),
        }
    }

    fn arg<'a>(&self, cmd: &'a CommandLine, key: &str) -> Result<&'a Arg, SessionError> {
        cmd.args
            .iter()
            .find(|a| a.key == key)
            .ok_or_else(|| cmd.error(1, format!("missing argument `{key}=`")))
    }

    fn col(&self, cmd: &CommandLine, key: &str) -> usize {
        cmd.args.iter().find(|a| a.key == key).map_or(1, |a| a.column)
    }

    fn usize_arg(&self, cmd: &CommandLine, key: &str) -> Result<usize, SessionError> {
        let a = self.arg(cmd, key)?;
        a.value.parse().map_err(|_| cmd.error(a.column, format!("`{key}` must be a natural number")))
    }

    fn opt_usize(&self, cmd: &CommandLine, key: &str, default: usize) -> Result<usize, SessionError> {
        match cmd.args.iter().any(|a| a.key == key) {
            true => self.usize_arg(cmd, key),
            false => Ok(default),
        }
    }

    fn region_arg(&self, cmd: &CommandLine, n: usize) -> Result<RatBox, SessionError> {
        let (bounds, column) = match cmd.args.iter().find(|a| a.key == "box") {
            Some(a) => {
                let r = RatBox::parse(&a.value).ok_or_else(|| cmd.error(a.column, "box must be lo,hi[;lo,hi...]"))?;
                (r.bounds().to_vec(), a.column)
            }
            None => (self.options.default_box.clone(), 1),
        };
        let bounds = match bounds.len() {
            1 => vec![bounds[0].clone(); n],
            k if k == n => bounds,
            k => return Err(cmd.error(column, format!("box has {k} interval(s) for {n} variable(s)"))),
        };
        RatBox::new(bounds).ok_or_else(|| cmd.error(column, "box bounds must satisfy lo <= hi"))
    }

    fn lookup<'a>(&'a self, cmd: &'a CommandLine, key: &str) -> Result<(&'a Binding, &'a Arg), SessionError> {
        let a = self.arg(cmd, key)?;
        let b = self.bindings.get(&a.value).ok_or_else(|| cmd.error(a.column, format!("unknown name `{}`", a.value)))?;
        Ok((b, a))
    }

    fn ring_arg(&self, cmd: &CommandLine, key: &str) -> Result<(String, Presentation), SessionError> {
        if key == "ring" && !cmd.args.iter().any(|a| a.key == key) {
            if let Some(name) = &self.last_ring {
                if let Some(Binding::Ring(p)) = self.bindings.get(name) {
                    return Ok((name.clone(), p.clone()));
                }
            }
        }
        match self.lookup(cmd, key)? {
            (Binding::Ring(p), a) => Ok((a.value.clone(), p.clone())),
            (other, a) => Err(cmd.error(a.column, format!("`{}` is a {}, not a ring", a.value, other.kind()))),
        }
    }

    fn rings_arg(&self, cmd: &CommandLine, key: &str) -> Result<Vec<Presentation>, SessionError> {
        let a = self.arg(cmd, key)?;
        self.list_items(cmd, a)?
            .into_iter()
            .map(|(name, col)| match self.bindings.get(&name) {
                Some(Binding::Ring(p)) => Ok(p.clone()),
                _ => Err(cmd.error(col, format!("`{name}` is not a ring"))),
            })
            .collect()
    }

    fn filter_arg(&self, cmd: &CommandLine, key: &str) -> Result<ClosedSetFilter, SessionError> {
        match self.lookup(cmd, key)? {
            (Binding::Filter(f), _) => Ok(f.clone()),
            (other, a) => Err(cmd.error(a.column, format!("`{}` is a {}, not a filter", a.value, other.kind()))),
        }
    }

    fn open_arg(&self, cmd: &CommandLine, key: &str) -> Result<BasicOpen, SessionError> {
        match self.lookup(cmd, key)? {
            (Binding::Open(o), _) => Ok(o.clone()),
            (other, a) => Err(cmd.error(a.column, format!("`{}` is a {}, not an open", a.value, other.kind()))),
        }
    }

    fn hom_arg(&self, cmd: &CommandLine, key: &str) -> Result<Hom, SessionError> {
        match self.lookup(cmd, key)? {
            (Binding::Hom(h), _) => Ok(h.clone()),
            (other, a) => Err(cmd.error(a.column, format!("`{}` is a {}, not a homomorphism", a.value, other.kind()))),
        }
    }

    fn section_arg(&self, cmd: &CommandLine, key: &str) -> Result<SectionOnBasic, SessionError> {
        match self.lookup(cmd, key)? {
            (Binding::Section(s), _) => Ok(s.clone()),
            (other, a) => Err(cmd.error(a.column, format!("`{}` is a {}, not a section", a.value, other.kind()))),
        }
    }

    /// A term, or the name of an element of a ring with the same arity.
    fn parse_in(&self, cmd: &CommandLine, text: &str, column: usize, arity: usize) -> Result<Term, SessionError> {
        if let Some(binding) = self.bindings.get(text) {
            return match binding {
                Binding::Elem { term, .. } if term.min_arity() <= arity => Ok(term.clone()),
                Binding::Elem { ring, .. } => Err(cmd.error(column, format!("element `{text}` of `{ring}` does not fit {arity} variable(s)"))),
                other => Err(cmd.error(column, format!("`{text}` is a {}, not an element", other.kind()))),
            };
        }
        parse_term(text, arity).map_err(|e| cmd.error(column + e.offset, format!("bad term: {}", e.kind)))
    }

    fn term_in(&self, cmd: &CommandLine, key: &str, arity: usize) -> Result<Term, SessionError> {
        let a = self.arg(cmd, key)?;
        self.parse_in(cmd, &a.value, a.column, arity)
    }

    fn term_arg(&self, cmd: &CommandLine, key: &str, p: &Presentation) -> Result<Term, SessionError> {
        self.term_in(cmd, key, p.arity())
    }

    fn list_items(&self, cmd: &CommandLine, a: &Arg) -> Result<Vec<(String, usize)>, SessionError> {
        split_list(&a.value, a.column).ok_or_else(|| cmd.error(a.column, format!("`{}` must be a [..; ..] list", a.key)))
    }

    fn term_list(&self, cmd: &CommandLine, a: &Arg, arity: usize) -> Result<Vec<Term>, SessionError> {
        self.list_items(cmd, a)?.into_iter().map(|(item, col)| self.parse_in(cmd, &item, col, arity)).collect()
    }

    fn list_arg(&self, cmd: &CommandLine, key: &str, p: &Presentation) -> Result<Vec<Term>, SessionError> {
        let a = self.arg(cmd, key)?;
        self.term_list(cmd, a, p.arity())
    }

    /// A list, or a single term standing for a one-element list.
    fn terms_arg(&self, cmd: &CommandLine, key: &str, p: &Presentation) -> Result<Vec<Term>, SessionError> {
        let a = self.arg(cmd, key)?;
        if a.value.starts_with('[') && a.value.ends_with(']') {
            self.term_list(cmd, a, p.arity())
        } else {
            Ok(vec![self.parse_in(cmd, &a.value, a.column, p.arity())?])
        }
    }

    fn pair_arg(&self, cmd: &CommandLine, key: &str, p: &Presentation) -> Result<ConstructibleBasic, SessionError> {
        let a = self.arg(cmd, key)?;
        match self.term_list(cmd, a, p.arity())?.as_slice() {
            [open, closed] => Ok(ConstructibleBasic::new(open.clone(), closed.clone())),
            _ => Err(cmd.error(a.column, format!("`{key}` must be [open; closed]"))),
        }
    }

    /// An exact point of the zero set, given as `[q1; q2; ...]`.
    fn point_arg(&self, cmd: &CommandLine, key: &str, p: &Presentation) -> Result<SpectrumPoint, SessionError> {
        let a = self.arg(cmd, key)?;
        let items = self.list_items(cmd, a)?;
        if items.len() != p.arity() {
            return Err(cmd.error(a.column, format!("point needs {} coordinate(s)", p.arity())));
        }
        let coords = items
            .iter()
            .map(|(s, col)| parse_rational(s).ok_or_else(|| cmd.error(*col, format!("`{s}` is not a rational"))))
            .collect::<Result<Vec<_>, _>>()?;
        let point = Point::exact(coords);
        if !point.within(p.region()) {
            return Err(cmd.error(a.column, "point lies outside the box"));
        }
        let x = SpectrumPoint::new(p, point);
        if x.on_zero_set.is_refuted() {
            return Err(cmd.error(a.column, "point is not on the zero set of the relations"));
        }
        Ok(x)
    }
}

/// Commands whose first word after the command is the name they bind.
const NAMED: &[&str] = &[
    "ring", "elem", "hom", "localize", "quotient", "coproduct", "adjoin", "filter", "filter-hat", "open", "meet", "join",
    "section", "restrict",
];

fn is_variable(name: &str) -> bool {
    name.strip_prefix('x').is_some_and(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
        || crate::termlang::Primitive::from_name(name).is_some()
}

fn structural_verdict(renaming: &Option<Vec<usize>>) -> Verdict {
    match renaming {
        Some(_) => Verdict::all([]),
        None => Verdict::unknown("no variable renaming identifies the presentations"),
    }
}

fn join(ts: &[Term]) -> String {
    join_with(ts, "; ")
}

fn join_with(ts: &[Term], sep: &str) -> String {
    ts.iter().map(Term::to_string).collect::<Vec<_>>().join(sep)
}
