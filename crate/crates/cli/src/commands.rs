use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::{bail, Context};
use log::info;
use matching_ekr::construct::{avoid_vertex_family, random_maximal_intersecting, star_family};
use matching_ekr::count::{family_size, identity_holds, star_size, star_size_two_term};
use matching_ekr::cycle::{
    double_count, enumerate_orders, sample_orders, sweep_lemmas, CyclicOrder, LemmaSet, LemmaSweep, Tally,
};
use matching_ekr::extremal::{is_star, sweep, MatchingVerdict, StarStatus, Strong};
use matching_ekr::general::{
    ekr_check_general, threshold_scan, ComponentsGraph, SignatureVector, ThresholdRow, PERSISTENCE,
};
use matching_ekr::matching::enumerate_family;
use matching_ekr::{Count, Error, Family, Signature, Subgraph, Vertex};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::{Cli, Command, ConstructArgs, Format, GeneralArgs, Instance, SweepArgs, VerifyArgs};
use crate::config::Settings;
use crate::report::{write_csv, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_pass(pass: bool) -> Outcome {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let settings = Settings::load(&cli.global)?;
    let mut out: Box<dyn Write> = match &cli.global.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let outcome = match &cli.command {
        Command::Count(inst) => count(*inst, &settings, &mut out),
        Command::Enumerate(inst) => enumerate(*inst, &settings, &mut out),
        Command::Verify(args) => verify(args, &settings, &mut out),
        Command::EkrSweep(args) => ekr_sweep(args, &settings, &mut out),
        Command::Doublecount(inst) => doublecount(*inst, &settings, &mut out),
        Command::Construct(args) => construct(args, &settings, &mut out),
        Command::General(args) => general(args, &settings, &mut out),
    }?;
    out.flush()?;
    Ok(outcome)
}

fn signature(inst: Instance) -> anyhow::Result<Signature> {
    let sig = Signature::new(inst.p, inst.s);
    sig.validate(inst.n)?;
    Ok(sig)
}

fn instance_json(inst: Instance) -> Value {
    json!({"n": inst.n, "p": inst.p, "s": inst.s})
}

#[derive(Serialize)]
struct CountRow {
    n: usize,
    p: usize,
    s: usize,
    family_size: Count,
    star_size: Count,
    identity: bool,
}

fn count(inst: Instance, settings: &Settings, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let sig = signature(inst)?;
    let n = inst.n;
    let row = CountRow {
        n,
        p: sig.p,
        s: sig.s,
        family_size: family_size(n, sig)?,
        star_size: star_size(n, sig)?,
        identity: identity_holds::<Count>(n, sig)?
            && star_size_two_term::<Count>(n, sig)? == star_size::<Count>(n, sig)?,
    };
    let pass = row.identity;
    match settings.format {
        Format::Text => {
            writeln!(out, "family_size {}", row.family_size)?;
            writeln!(out, "star_size {}", row.star_size)?;
            writeln!(out, "identity {}", if pass { "ok" } else { "FAILED" })?;
        }
        Format::Json => Report::new("count", instance_json(inst), vec![row], pass).write_json(out)?,
        Format::Csv => write_csv(&[row], out)?,
    }
    Ok(Outcome::from_pass(pass))
}

#[derive(Serialize)]
struct MemberRow {
    mask: String,
    vertices: String,
}

impl From<&Subgraph> for MemberRow {
    fn from(f: &Subgraph) -> MemberRow {
        MemberRow {
            mask: f.hex(),
            vertices: f.to_string(),
        }
    }
}

fn enumerate(inst: Instance, settings: &Settings, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let sig = signature(inst)?;
    let members = enumerate_family(inst.n, sig)?;
    match settings.format {
        Format::Text => {
            for f in members {
                writeln!(out, "{f}")?;
            }
        }
        Format::Json => {
            let rows: Vec<Subgraph> = members.collect();
            Report::new("enumerate", instance_json(inst), rows, true).write_json(out)?;
        }
        Format::Csv => {
            let rows: Vec<MemberRow> = members.map(|f| MemberRow::from(&f)).collect();
            write_csv(&rows, out)?;
        }
    }
    Ok(Outcome::Pass)
}

/// `star:<v>`, `avoid:<v>`, `random:<seed>` or a family file.
pub fn load_family(arg: &str, inst: Instance, sig: Signature) -> anyhow::Result<Family> {
    let named = |text: &str| -> anyhow::Result<Vertex> {
        text.parse::<Vertex>()
            .map_err(anyhow::Error::from)
            .and_then(|v| Ok(v.check(inst.n)?))
            .with_context(|| format!("bad vertex in family argument {arg:?}"))
    };
    if let Some(v) = arg.strip_prefix("star:") {
        return Ok(star_family(inst.n, sig, named(v)?)?);
    }
    if let Some(v) = arg.strip_prefix("avoid:") {
        return Ok(avoid_vertex_family(inst.n, sig, named(v)?)?);
    }
    if let Some(seed) = arg.strip_prefix("random:") {
        let seed: u64 = seed.parse().with_context(|| format!("bad seed in {arg:?}"))?;
        return Ok(random_maximal_intersecting(inst.n, sig, seed)?);
    }
    let text = std::fs::read_to_string(arg).with_context(|| format!("reading family file {arg}"))?;
    let family = Family::parse(inst.n, &text).with_context(|| format!("parsing family file {arg}"))?;
    if let Some(bad) = family.iter().find(|f| f.signature() != sig) {
        bail!("{bad} in {arg} does not have signature {sig}");
    }
    Ok(family)
}

fn construct(args: &ConstructArgs, settings: &Settings, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let inst = args.instance;
    let sig = signature(inst)?;
    let family = load_family(&args.family, inst, sig)?;
    let star = is_star(&family)?;
    let star_text = match &star {
        StarStatus::Star(v) => format!("star at {v}"),
        StarStatus::SubStar(vs) => format!("inside the stars at {}", join(vs)),
        StarStatus::None => "not a star".to_string(),
    };
    match settings.format {
        Format::Text => {
            writeln!(
                out,
                "# {} n={} p={} s={} size={} intersecting={} {}",
                args.family,
                inst.n,
                sig.p,
                sig.s,
                family.len(),
                family.is_intersecting(),
                star_text
            )?;
            write!(out, "{}", family.to_text())?;
        }
        Format::Json => {
            let result = json!({
                "size": family.len(),
                "intersecting": family.is_intersecting(),
                "star": star,
                "members": family.members(),
            });
            let instance = json!({"n": inst.n, "p": sig.p, "s": sig.s, "family": args.family});
            Report::new("construct", instance, vec![result], true).write_json(out)?;
        }
        Format::Csv => {
            let rows: Vec<MemberRow> = family.iter().map(MemberRow::from).collect();
            write_csv(&rows, out)?;
        }
    }
    Ok(Outcome::Pass)
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Serialize)]
struct LemmaRow {
    lemma: u8,
    applicable: bool,
    pass: bool,
    checked: usize,
    passed: usize,
    failed: usize,
    skipped: usize,
    reason: Option<String>,
}

impl LemmaRow {
    fn from_tally(lemma: u8, t: &Tally) -> LemmaRow {
        LemmaRow {
            lemma,
            applicable: t.applicable,
            pass: t.pass(),
            checked: t.checked,
            passed: t.passed,
            failed: t.failed,
            skipped: t.skipped,
            reason: t.reason.clone(),
        }
    }
}

fn lemma_rows(sweep: &LemmaSweep) -> Vec<LemmaRow> {
    let mut rows: Vec<LemmaRow> = [(1, &sweep.lemma1), (2, &sweep.lemma2), (3, &sweep.lemma3)]
        .into_iter()
        .filter_map(|(i, t)| t.as_ref().map(|t| LemmaRow::from_tally(i, t)))
        .collect();
    if let Some(r) = &sweep.lemma4 {
        let checked = r.transposition_checks + r.swap_checks;
        let failed = r.transposition_failures + r.swap_failures;
        rows.push(LemmaRow {
            lemma: 4,
            applicable: r.applicable,
            pass: r.pass(),
            checked,
            passed: checked - failed,
            failed,
            skipped: r.orders - r.centered,
            reason: r.reason.clone(),
        });
    }
    rows
}

fn verify(args: &VerifyArgs, settings: &Settings, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let inst = args.instance;
    let sig = signature(inst)?;
    let lemmas = LemmaSet::parse(&args.lemmas)?;
    let family = load_family(&args.family, inst, sig)?;
    let (mode, orders): (&str, Vec<CyclicOrder>) = match args.sample {
        Some(count) => ("sample", sample_orders(inst.n, true, count, settings.seed)?),
        None => match enumerate_orders(inst.n, true, settings.order_cap) {
            Ok(all) => ("exhaustive", all.collect()),
            Err(Error::CapExceeded { needed, cap, .. }) => bail!(
                "{needed} restricted orders exceed the cap of {cap}; \
                 pass --sample N (with --seed S) or raise --order-cap"
            ),
            Err(e) => return Err(e.into()),
        },
    };
    info!("checking {} orders ({mode})", orders.len());
    let sweep = sweep_lemmas(&family, sig, &orders, lemmas)?;
    let pass = sweep.pass();
    match settings.format {
        Format::Text => write_verify_text(&sweep, mode, out)?,
        Format::Json => {
            let instance = json!({
                "n": inst.n,
                "p": sig.p,
                "s": sig.s,
                "family": args.family,
                "family_size": family.len(),
                "lemmas": args.lemmas,
                "mode": mode,
                "seed": args.sample.map(|_| settings.seed),
                "orders": orders.len(),
            });
            let mut results = Vec::new();
            for (i, t) in [(1, &sweep.lemma1), (2, &sweep.lemma2), (3, &sweep.lemma3)] {
                if let Some(t) = t {
                    let mut v = serde_json::to_value(t)?;
                    v["lemma"] = json!(i);
                    v["pass"] = json!(t.pass());
                    results.push(v);
                }
            }
            if let Some(r) = &sweep.lemma4 {
                let mut v = serde_json::to_value(r)?;
                v["lemma"] = json!(4);
                v["pass"] = json!(r.pass());
                results.push(v);
            }
            Report::new("verify", instance, results, pass).write_json(out)?;
        }
        Format::Csv => write_csv(&lemma_rows(&sweep), out)?,
    }
    Ok(Outcome::from_pass(pass))
}

fn write_verify_text(sweep: &LemmaSweep, mode: &str, out: &mut dyn Write) -> anyhow::Result<()> {
    writeln!(out, "orders {} ({mode})", sweep.orders)?;
    for (i, t) in [(1, &sweep.lemma1), (2, &sweep.lemma2), (3, &sweep.lemma3)] {
        let Some(t) = t else { continue };
        if let Some(reason) = t.reason.as_ref().filter(|_| !t.applicable) {
            writeln!(out, "lemma{i} not applicable: {reason}")?;
            continue;
        }
        let verdict = if t.pass() { "pass" } else { "FAIL" };
        write!(out, "lemma{i} {verdict} {}/{}", t.passed, t.checked)?;
        if i == 1 {
            write!(out, " equality {}", t.equality)?;
        }
        if t.skipped > 0 {
            write!(out, " skipped {}", t.skipped)?;
        }
        writeln!(out)?;
        for f in &t.failures {
            writeln!(out, "  {} {}", f.order, f.detail)?;
        }
    }
    if let Some(r) = &sweep.lemma4 {
        if !r.applicable {
            writeln!(out, "lemma4 not applicable: {}", r.reason.as_deref().unwrap_or("-"))?;
        } else {
            let center = r.center.map_or("-".to_string(), |v| v.to_string());
            writeln!(
                out,
                "lemma4 {} center {center} centered {}/{} transpositions {}/{} swap s_{} {}/{}",
                if r.pass() { "pass" } else { "FAIL" },
                r.centered,
                r.orders,
                r.transposition_checks - r.transposition_failures,
                r.transposition_checks,
                r.swap_position,
                r.swap_checks - r.swap_failures,
                r.swap_checks,
            )?;
            for f in &r.swap_range {
                writeln!(
                    out,
                    "  swap s_{} keeps center {}/{}",
                    f.position, f.preserved, f.checked
                )?;
            }
            for v in &r.violations {
                writeln!(out, "  {} {}", v.order, v.operation)?;
            }
        }
    }
    Ok(())
}

/// `"5"`, `"3..6"` (inclusive; empty when reversed) or `"1,4,7"`.
pub fn parse_range(text: &str) -> anyhow::Result<Vec<usize>> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().with_context(|| format!("bad range {text:?}"))?;
        let b: usize = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .with_context(|| format!("bad range {text:?}"))?;
        return Ok((a..=b).collect());
    }
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|t| t.trim().parse().with_context(|| format!("bad value {t:?} in {text:?}")))
        .collect()
}

#[derive(Serialize)]
struct SweepRow {
    n: usize,
    p: usize,
    s: usize,
    family_size: Option<usize>,
    max_size: Option<usize>,
    star_size: Option<usize>,
    star_center: Option<String>,
    exact: bool,
    ekr: Option<bool>,
    strongly_ekr: Option<Strong>,
    maximum_families_found: Option<usize>,
    enumeration_complete: Option<bool>,
    nodes: Option<u64>,
    error: Option<String>,
}

impl SweepRow {
    fn new(n: usize, sig: Signature, v: &matching_ekr::Result<MatchingVerdict>) -> SweepRow {
        match v {
            Ok(v) => SweepRow {
                n,
                p: sig.p,
                s: sig.s,
                family_size: Some(v.verdict.family_size),
                max_size: Some(v.verdict.max_size),
                star_size: Some(v.verdict.star_size),
                star_center: Some(Vertex::from_slot(v.verdict.star_center as usize).to_string()),
                exact: v.verdict.exact,
                ekr: Some(v.verdict.ekr),
                strongly_ekr: Some(v.verdict.strongly_ekr),
                maximum_families_found: Some(v.verdict.maximum_families_found),
                enumeration_complete: Some(v.verdict.enumeration_complete),
                nodes: Some(v.verdict.nodes),
                error: None,
            },
            Err(e) => SweepRow {
                n,
                p: sig.p,
                s: sig.s,
                family_size: None,
                max_size: None,
                star_size: None,
                star_center: None,
                exact: false,
                ekr: None,
                strongly_ekr: None,
                maximum_families_found: None,
                enumeration_complete: None,
                nodes: None,
                error: Some(e.to_string()),
            },
        }
    }
}

fn family_lines(f: &Family) -> Vec<String> {
    f.iter().map(Subgraph::to_string).collect()
}

fn ekr_sweep(args: &SweepArgs, settings: &Settings, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let ns = parse_range(&args.n)?;
    let ps = parse_range(&args.p)?;
    let ss = parse_range(&args.s)?;
    let mut instances = Vec::new();
    for &n in &ns {
        for &p in &ps {
            for &s in &ss {
                let sig = Signature::new(p, s);
                if sig.validate(n).is_ok() {
                    instances.push((n, sig));
                } else {
                    info!("skipping invalid instance ({n},{p},{s})");
                }
            }
        }
    }
    instances.sort_by_key(|&(n, sig)| (n, sig.p, sig.s));
    instances.dedup();
    let verdicts = sweep(&instances, &settings.verdict(), settings.row_threads);
    let rows: Vec<SweepRow> = instances
        .iter()
        .zip(&verdicts)
        .map(|(&(n, sig), v)| SweepRow::new(n, sig, v))
        .collect();
    let pass = rows.iter().all(|r| r.exact && r.error.is_none());
    match settings.format {
        Format::Text => {
            writeln!(out, "n p s family max star ekr strongly_ekr")?;
            for r in &rows {
                match &r.error {
                    Some(e) => writeln!(out, "{} {} {} error: {e}", r.n, r.p, r.s)?,
                    None => writeln!(
                        out,
                        "{} {} {} {} {}{} {} {} {}",
                        r.n,
                        r.p,
                        r.s,
                        r.family_size.unwrap_or(0),
                        r.max_size.unwrap_or(0),
                        if r.exact { "" } else { "+" },
                        r.star_size.unwrap_or(0),
                        r.ekr.unwrap_or(false),
                        strong_text(r.strongly_ekr),
                    )?,
                }
            }
        }
        Format::Json => {
            let results = rows
                .iter()
                .zip(&verdicts)
                .map(|(row, v)| {
                    let mut value = serde_json::to_value(row)?;
                    if let Ok(v) = v {
                        value["witnesses"] = json!(v.witness_families().iter().map(family_lines).collect::<Vec<_>>());
                        value["non_star_witness"] = json!(v.non_star_family().as_ref().map(family_lines));
                    }
                    Ok(value)
                })
                .collect::<anyhow::Result<Vec<Value>>>()?;
            let instance = json!({
                "n": args.n,
                "p": args.p,
                "s": args.s,
                "max_families": settings.max_families,
                "node_limit": settings.node_limit,
                "time_limit": settings.time_limit,
            });
            Report::new("ekr-sweep", instance, results, pass).write_json(out)?;
        }
        Format::Csv => write_csv(&rows, out)?,
    }
    Ok(Outcome::from_pass(pass))
}

fn strong_text(s: Option<Strong>) -> &'static str {
    match s {
        Some(Strong::True) => "true",
        Some(Strong::False) => "false",
        Some(Strong::Unknown) | None => "unknown",
    }
}

fn doublecount(inst: Instance, settings: &Settings, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let sig = signature(inst)?;
    let rep = double_count(inst.n, sig, settings.order_cap)?;
    let pass = rep.pass;
    match settings.format {
        Format::Text => {
            writeln!(out, "orders {}", rep.orders)?;
            writeln!(out, "members {}", rep.members)?;
            writeln!(out, "formula {}", rep.formula)?;
            writeln!(
                out,
                "measured B {}..{} R {}..{}",
                rep.b_min, rep.b_max, rep.r_min, rep.r_max
            )?;
            writeln!(
                out,
                "incidences {} (orders x n = {})",
                rep.b_incidences,
                rep.orders * inst.n as u128
            )?;
            writeln!(out, "{}", if rep.pass { "pass" } else { "FAIL" })?;
        }
        Format::Json => Report::new("doublecount", instance_json(inst), vec![rep], pass).write_json(out)?,
        Format::Csv => write_csv(&[&rep], out)?,
    }
    Ok(Outcome::from_pass(pass))
}

fn general(args: &GeneralArgs, settings: &Settings, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let sig = SignatureVector::parse(&args.sig)?;
    let opts = settings.verdict();
    let (rows, extra, pass) = if args.scan {
        let scan = threshold_scan(args.m, &sig, args.n, &opts)?;
        let pass = scan.heuristic_threshold.is_some();
        let extra = json!({
            "heuristic_threshold": scan.heuristic_threshold,
            "persistence": PERSISTENCE,
            "stopped": scan.stopped,
            "note": "heuristic: first n of a run of consecutive EKR verdicts",
        });
        (scan.rows, extra, pass)
    } else {
        let g = ComponentsGraph::new(args.m, args.n)?;
        let v = ekr_check_general(g, &sig, &opts)?;
        let extra = json!({
            "star_convention": v.star_convention,
            "star_center": {"component": v.star_center.0, "vertex": v.star_center.1},
            "exact": v.verdict.exact,
            "maximum_families_found": v.verdict.maximum_families_found,
            "enumeration_complete": v.verdict.enumeration_complete,
            "nodes": v.verdict.nodes,
        });
        (vec![ThresholdRow::from(&v)], extra, v.verdict.exact)
    };
    match settings.format {
        Format::Text => {
            writeln!(out, "m n signature family star_max max ekr strongly_ekr")?;
            for r in &rows {
                writeln!(
                    out,
                    "{} {} {} {} {} {} {} {}",
                    r.m,
                    r.n,
                    r.signature,
                    r.family_size,
                    r.star_size_max,
                    r.max_intersecting,
                    r.ekr,
                    strong_text(Some(r.strongly_ekr))
                )?;
            }
            if args.scan {
                match extra["heuristic_threshold"].as_u64() {
                    Some(t) => writeln!(
                        out,
                        "heuristic threshold n = {t} ({PERSISTENCE} consecutive EKR verdicts)"
                    )?,
                    None => writeln!(out, "no threshold found: {}", extra["stopped"].as_str().unwrap_or("-"))?,
                }
            }
        }
        Format::Json => {
            let instance = json!({"m": args.m, "n": args.n, "signature": sig, "scan": args.scan, "details": extra});
            Report::new("general", instance, rows, pass).write_json(out)?;
        }
        Format::Csv => write_csv(&rows, out)?,
    }
    Ok(Outcome::from_pass(pass))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(parse_range("3..=4").unwrap(), vec![3, 4]);
        assert_eq!(parse_range("6..3").unwrap(), Vec::<usize>::new());
        assert_eq!(parse_range("1, 4,7").unwrap(), vec![1, 4, 7]);
        assert_eq!(parse_range("2").unwrap(), vec![2]);
        assert!(parse_range("a..3").is_err());
    }

    #[test]
    fn family_arguments() {
        let inst = Instance { n: 5, p: 1, s: 1 };
        let sig = Signature::new(1, 1);
        assert_eq!(load_family("star:l5", inst, sig).unwrap().len(), 12);
        assert_eq!(load_family("avoid:r2", inst, sig).unwrap().len(), 28);
        assert!(load_family("star:l6", inst, sig).is_err());
        assert!(load_family("random:3", inst, sig).unwrap().is_intersecting());
        assert!(load_family("/nonexistent/family.txt", inst, sig).is_err());
    }
}
