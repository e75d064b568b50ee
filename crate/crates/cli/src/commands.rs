use std::fmt::Write as _;
use std::sync::Arc;

use markov_core::catalog::{self, CatalogError, EntryParams, EvaluationReport, FormulaEntry, TailBound};
use markov_core::exact::Rounding;
use markov_core::markov::certificate::{sample_rational, verify_certificate, Certificate, CertificateFamily};
use markov_core::markov::solver::{four_f_three_extension, well_poised_extension};
use markov_core::markov::{
    first_pair_failure, green_rectangle, solve_multipliers_stepwise, GridFunction, MarkovError, MarkovPair,
    MultiplierForm, TermExtension, ThreePhiTwo, ThreePhiTwoFamily,
};
use markov_core::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::{Command, Format, Grid, ParamArgs, RunConfig};
use crate::records::*;
use crate::{CliError, ExitStatus, Outcome};

pub fn run(command: &Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Compute { id, digits, terms, rounding, params } => {
            compute(id, *digits, *terms, (*rounding).into(), params, cfg.format)
        }
        Command::Compare { constant, digits, rounding } => compare(constant, *digits, (*rounding).into(), cfg.format),
        Command::VerifyPair { fixture, params, grid, rect, fuzz } => {
            verify_pair(fixture, params, *grid, rect.unwrap_or(*grid), *fuzz, cfg.seed, cfg.format)
        }
        Command::VerifyCertificate { family, params, grid, random, fuzz } => {
            verify_cert(family, params, *grid, *random, *fuzz, cfg.seed, cfg.format)
        }
        Command::Solve { family, form, x_max, z_samples, params } => {
            solve(family, form.as_deref(), *x_max, *z_samples, params, cfg.format)
        }
        Command::List => list(cfg.format),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("records serialize");
    s.push('\n');
    s
}

fn csv_of<T: Serialize>(rows: &[T]) -> String {
    to_csv(rows).expect("records serialize")
}

fn entry_params(p: &ParamArgs) -> EntryParams {
    EntryParams { a: p.a.clone(), b: p.b.clone(), c: p.c.clone(), d: p.d.clone(), q: p.q.clone() }
}

fn ratio_rho(entry: &FormulaEntry) -> Option<String> {
    entry.ratio_bound().map(|b| b.rho().to_string())
}

// ---------------------------------------------------------------- compute

fn compute_record(entry: &FormulaEntry, r: &EvaluationReport, digits: usize, rounding: Rounding) -> ComputeRecord {
    ComputeRecord {
        schema: SCHEMA.into(),
        id: r.id.clone(),
        constant: r.constant.clone(),
        digits_requested: digits,
        rounding: rounding.to_string(),
        terms_used: r.terms_used,
        digits_proven: r.digits_proven,
        value: r.value(),
        lower: r.enclosure.lower().to_string(),
        upper: r.enclosure.upper().to_string(),
        tail: entry.tail.describe(),
        status: if r.meets(digits) { "ok" } else { "shortfall" }.into(),
    }
}

fn compute(
    id: &str,
    digits: usize,
    terms: Option<u64>,
    rounding: Rounding,
    params: &ParamArgs,
    format: Format,
) -> Result<Outcome, CliError> {
    if digits == 0 {
        return Err(CliError::usage("--digits must be at least 1"));
    }
    let entry = catalog::lookup(id, &entry_params(params))?;
    let mut notes = Vec::new();
    let report = match terms {
        Some(n) => catalog::evaluate_with(&entry, n, Some(digits), rounding)?,
        None => match catalog::scan_terms(&entry, digits, rounding, entry.scan_cap) {
            Ok(r) => r,
            Err(CatalogError::Shortfall { cap, .. }) => {
                notes.push(format!(
                    "{id}: {digits} digits not certified within {cap} terms ({}); showing the {cap}-term enclosure",
                    entry.tail.describe()
                ));
                catalog::evaluate_with(&entry, cap, Some(digits), rounding)?
            }
            Err(e) => return Err(e.into()),
        },
    };
    let rec = compute_record(&entry, &report, digits, rounding);
    let status = if rec.status == "ok" { ExitStatus::Ok } else { ExitStatus::Shortfall };
    if status == ExitStatus::Shortfall && notes.is_empty() {
        notes.push(format!(
            "{id}: only {} of {digits} digits certified with {} terms",
            rec.digits_proven, rec.terms_used
        ));
    }
    let body = match format {
        Format::Json => json(&rec),
        Format::Csv => csv_of(std::slice::from_ref(&rec)),
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "{} = {}", rec.constant, rec.value).unwrap();
            writeln!(s, "entry          {}", rec.id).unwrap();
            writeln!(s, "terms used     {}", rec.terms_used).unwrap();
            writeln!(s, "digits proven  {} of {} ({})", rec.digits_proven, digits, rec.rounding).unwrap();
            writeln!(s, "tail           {}", rec.tail).unwrap();
            writeln!(s, "status         {}", rec.status).unwrap();
            s
        }
    };
    Ok(Outcome { body, status, notes })
}

// ---------------------------------------------------------------- compare

fn compare(constant: &str, digits: usize, rounding: Rounding, format: Format) -> Result<Outcome, CliError> {
    let entries = catalog::entries_for(constant)
        .ok_or_else(|| CliError::usage(format!("unknown constant {constant:?}; expected zeta2 or zeta3")))?;
    let mut rows = Vec::with_capacity(entries.len());
    let mut reports = Vec::with_capacity(entries.len());
    let mut notes = Vec::new();
    for entry in &entries {
        let (report, status) = match catalog::scan_terms(entry, digits, rounding, entry.scan_cap) {
            Ok(r) => (r, "ok"),
            Err(CatalogError::Shortfall { cap, .. }) => {
                notes.push(format!("{}: {digits} digits not certified within {cap} terms", entry.id));
                (catalog::evaluate_with(entry, cap, Some(digits), rounding)?, "shortfall")
            }
            Err(e) => return Err(e.into()),
        };
        rows.push(CompareRecord {
            schema: SCHEMA.into(),
            constant: constant.into(),
            id: entry.id.clone(),
            terms_needed: report.terms_used,
            digits_proven: report.digits_proven,
            ratio_bound: ratio_rho(entry),
            tail: entry.tail.describe(),
            value: report.value(),
            lower: report.enclosure.lower().to_string(),
            upper: report.enclosure.upper().to_string(),
            status: status.into(),
        });
        reports.push(report);
    }

    // Every enclosure holds the same constant, so they must overlap, and any
    // two renderings certified to `digits` places must be identical.
    let mut agree = true;
    for (i, a) in reports.iter().enumerate() {
        for b in &reports[i + 1..] {
            let overlap = a.enclosure.intersects(&b.enclosure);
            let same = !(a.meets(digits) && b.meets(digits)) || a.value() == b.value();
            if !overlap || !same {
                agree = false;
                notes.push(format!("{} and {} disagree: {} vs {}", a.id, b.id, a.value(), b.value()));
            }
        }
    }
    let status = if !agree {
        ExitStatus::Disagreement
    } else if rows.iter().any(|r| r.status != "ok") {
        ExitStatus::Shortfall
    } else {
        ExitStatus::Ok
    };
    let body = match format {
        Format::Json => json(&CompareReport { schema: SCHEMA.into(), constant: constant.into(), digits, agree, rows }),
        Format::Csv => csv_of(&rows),
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "{constant} to {digits} digits ({rounding})").unwrap();
            writeln!(s, "{:<26} {:>7} {:>7} {:>12}  value", "entry", "terms", "digits", "ratio").unwrap();
            for r in &rows {
                let rho = r.ratio_bound.as_deref().unwrap_or("-");
                writeln!(s, "{:<26} {:>7} {:>7} {:>12}  {}", r.id, r.terms_needed, r.digits_proven, rho, r.value)
                    .unwrap();
            }
            writeln!(s, "agree: {agree}").unwrap();
            s
        }
    };
    Ok(Outcome { body, status, notes })
}

// ---------------------------------------------------------------- pairs

fn or_default(v: &Option<Rational>, n: i64, d: i64) -> Rational {
    v.clone().unwrap_or_else(|| markov_core::rat(n, d))
}

fn three_phi_two(p: &ParamArgs) -> Result<ThreePhiTwo, CliError> {
    let [a, b, c, d, q] = catalog::default_3phi2_params();
    let pick = |v: &Option<Rational>, dflt: Rational| v.clone().unwrap_or(dflt);
    Ok(ThreePhiTwo::new(&pick(&p.a, a), &pick(&p.b, b), &pick(&p.c, c), &pick(&p.d, d), &pick(&p.q, q))?)
}

fn four_f_three(p: &ParamArgs) -> Result<TermExtension, CliError> {
    Ok(four_f_three_extension(&or_default(&p.a, 1, 1), &or_default(&p.h, 1, 3), &or_default(&p.b, 2, 1))?)
}

fn well_poised(p: &ParamArgs) -> Result<TermExtension, CliError> {
    Ok(well_poised_extension(&or_default(&p.a, 1, 1), &or_default(&p.b, 2, 1))?)
}

fn param_string(params: &[(String, Rational)]) -> String {
    params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

/// A pair for `fixture` valid on `[0, x_need] × ℕ`, and its parameter list.
fn fixture_pair(fixture: &str, p: &ParamArgs, x_need: u64) -> Result<(MarkovPair, String), CliError> {
    match fixture {
        "3phi2" => {
            let s = three_phi_two(p)?;
            let ext = s.extension();
            Ok((s.pair(), param_string(ext.params())))
        }
        "4f3" | "well-poised" => {
            let (f, form) = if fixture == "4f3" {
                (four_f_three(p)?, MultiplierForm::U2)
            } else {
                (well_poised(p)?, MultiplierForm::U3)
            };
            let samples = form.unknowns() as u64 + 2;
            let data = solve_multipliers_stepwise(&f, form, x_need, samples)?;
            Ok((data.pair(&f), param_string(f.params())))
        }
        other => Err(CliError::usage(format!("unknown fixture {other:?}; expected 3phi2, 4f3 or well-poised"))),
    }
}

/// Adds a seeded nonzero rational to `V` at one seeded grid point.
fn perturb(pair: MarkovPair, grid: Grid, seed: u64) -> (MarkovPair, u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (px, pz) = (rng.gen_range(0..grid.x), rng.gen_range(0..grid.z));
    let delta = sample_rational(&mut rng);
    let inner = pair.v.clone();
    let v = GridFunction::new(
        "V+fuzz",
        Arc::new(move |x, z| {
            let base = inner.at(x, z)?;
            Ok(if (x, z) == (px, pz) { base + &delta } else { base })
        }),
    );
    (MarkovPair::new(pair.u, v, format!("{} (perturbed)", pair.provenance)), px, pz)
}

fn verify_pair(
    fixture: &str,
    p: &ParamArgs,
    grid: Grid,
    rect: Grid,
    fuzz: bool,
    seed: u64,
    format: Format,
) -> Result<Outcome, CliError> {
    let (pair, params) = fixture_pair(fixture, p, grid.x.max(rect.x))?;
    let mut notes = Vec::new();
    let pair = if fuzz {
        let (pair, px, pz) = perturb(pair, grid, seed);
        notes.push(format!("perturbed V at ({px}, {pz})"));
        pair
    } else {
        pair
    };
    let failure = first_pair_failure(&pair, grid.x - 1, grid.z - 1)?;
    let green = green_rectangle(&pair, rect.x, rect.z)?;
    let passed = failure.is_none() && green.balanced();
    let rec = PairRecord {
        schema: SCHEMA.into(),
        fixture: fixture.into(),
        params,
        grid_x: grid.x,
        grid_z: grid.z,
        points_checked: match &failure {
            Some((x, z, _)) => x * grid.z + z + 1,
            None => grid.x * grid.z,
        },
        rect_i: rect.x,
        rect_j: rect.z,
        green_lhs: green.lhs.to_string(),
        green_rhs: green.rhs.to_string(),
        failure_x: failure.as_ref().map(|f| f.0),
        failure_z: failure.as_ref().map(|f| f.1),
        residual: failure.as_ref().map(|f| f.2.to_string()),
        fuzz,
        passed,
    };
    let body = match format {
        Format::Json => json(&rec),
        Format::Csv => csv_of(std::slice::from_ref(&rec)),
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "fixture   {} ({})", rec.fixture, rec.params).unwrap();
            writeln!(s, "grid      {}x{}, {} points checked", rec.grid_x, rec.grid_z, rec.points_checked).unwrap();
            match &failure {
                Some((x, z, r)) => writeln!(s, "residual  {r} at ({x}, {z})").unwrap(),
                None => writeln!(s, "residual  0 everywhere").unwrap(),
            }
            writeln!(
                s,
                "green     {}x{}: {}",
                rect.x,
                rect.z,
                if green.balanced() { "balanced" } else { "unbalanced" }
            )
            .unwrap();
            writeln!(s, "  lhs     {}", rec.green_lhs).unwrap();
            writeln!(s, "  rhs     {}", rec.green_rhs).unwrap();
            writeln!(s, "passed    {passed}").unwrap();
            s
        }
    };
    Ok(Outcome { body, status: if passed { ExitStatus::Ok } else { ExitStatus::VerifyFailed }, notes })
}

// ---------------------------------------------------------------- certificates

/// Wraps a family, adding a fixed nonzero constant to every certificate `R`.
struct Perturbed<F> {
    inner: F,
    delta: Rational,
}

impl<F: CertificateFamily> CertificateFamily for Perturbed<F> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn param_names(&self) -> &[&'static str] {
        self.inner.param_names()
    }

    fn instantiate(&self, params: &[Rational]) -> Result<Certificate, MarkovError> {
        let mut cert = self.inner.instantiate(params)?;
        let (r, delta) = (cert.r.clone(), self.delta.clone());
        cert.r = GridFunction::new(format!("{}+fuzz", r.label()), Arc::new(move |x, z| Ok(r.at(x, z)? + &delta)));
        Ok(cert)
    }

    fn sample_params(&self, rng: &mut ChaCha8Rng) -> Vec<Rational> {
        self.inner.sample_params(rng)
    }
}

fn verify_cert(
    family: &str,
    p: &ParamArgs,
    grid: Grid,
    random: usize,
    fuzz: bool,
    seed: u64,
    format: Format,
) -> Result<Outcome, CliError> {
    if family != "3phi2" {
        return Err(CliError::usage(format!("unknown certificate family {family:?}; expected 3phi2")));
    }
    let s = three_phi_two(p)?;
    let params: Vec<Rational> = s.extension().params().iter().map(|(_, v)| v.clone()).collect();
    let base = ThreePhiTwoFamily;
    let perturbed;
    let fam: &dyn CertificateFamily = if fuzz {
        let delta = sample_rational(&mut ChaCha8Rng::seed_from_u64(seed));
        perturbed = Perturbed { inner: base, delta };
        &perturbed
    } else {
        &base
    };
    let v = verify_certificate(fam, &params, (grid.x - 1, grid.z - 1), random, seed)?;
    let names = fam.param_names();
    let named = |ps: &[Rational]| {
        param_string(&names.iter().map(|n| n.to_string()).zip(ps.iter().cloned()).collect::<Vec<_>>())
    };
    let f = v.first_failure.as_ref();
    let rec = CertificateRecord {
        schema: SCHEMA.into(),
        family: v.family.clone(),
        params: named(&v.params),
        grid_x: grid.x,
        grid_z: grid.z,
        random,
        seed,
        points_checked: v.points_checked,
        failure_params: f.map(|f| named(&f.params)),
        failure_x: f.map(|f| f.x),
        failure_z: f.map(|f| f.z),
        residual: f.map(|f| f.residual.to_string()),
        fuzz,
        passed: v.passed,
    };
    let body = match format {
        Format::Json => json(&rec),
        Format::Csv => csv_of(std::slice::from_ref(&rec)),
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "family    {} ({})", rec.family, rec.params).unwrap();
            writeln!(s, "grid      {}x{} plus {} random instances (seed {})", rec.grid_x, rec.grid_z, random, seed)
                .unwrap();
            writeln!(s, "checked   {} points", rec.points_checked).unwrap();
            if let Some(f) = f {
                writeln!(s, "residual  {} at ({}, {}) with {}", f.residual, f.x, f.z, named(&f.params)).unwrap();
            }
            writeln!(s, "passed    {}", rec.passed).unwrap();
            s
        }
    };
    let status = if v.passed { ExitStatus::Ok } else { ExitStatus::VerifyFailed };
    Ok(Outcome { body, status, notes: Vec::new() })
}

// ---------------------------------------------------------------- solve

fn solve(
    family: &str,
    form: Option<&str>,
    x_max: u64,
    z_samples: Option<u64>,
    p: &ParamArgs,
    format: Format,
) -> Result<Outcome, CliError> {
    let mut closed: Option<ThreePhiTwo> = None;
    let (f, native) = match family {
        "3phi2-u1" => {
            let s = three_phi_two(p)?;
            let form = MultiplierForm::U1 { q: s.params().q.clone() };
            let f = s.extension();
            closed = Some(s);
            (f, form)
        }
        "4f3-u2" => (four_f_three(p)?, MultiplierForm::U2),
        "well-poised-u3" => (well_poised(p)?, MultiplierForm::U3),
        other => {
            return Err(CliError::usage(format!(
                "unknown family {other:?}; expected 3phi2-u1, 4f3-u2 or well-poised-u3"
            )))
        }
    };
    let form = match form {
        None => native,
        Some("u1") => match &closed {
            Some(s) => MultiplierForm::U1 { q: s.params().q.clone() },
            None => MultiplierForm::U1 {
                q: p.q.clone().ok_or_else(|| CliError::usage("form u1 needs --q for this family"))?,
            },
        },
        Some("u2") => MultiplierForm::U2,
        // The wider polynomial ansatz applied to the family's own extension.
        Some("u3") | Some("u3-on-u1-family") => MultiplierForm::U3,
        Some(other) => {
            return Err(CliError::usage(format!("unknown form {other:?}; expected u1, u2, u3 or u3-on-u1-family")))
        }
    };
    let tag = form.tag().to_string();
    let samples = z_samples.unwrap_or(form.unknowns() as u64 + 2);

    let mut report = SolveReport {
        schema: SCHEMA.into(),
        family: family.into(),
        form: tag.clone(),
        x_max,
        status: "closed".into(),
        failing_x: None,
        message: None,
        pair_verified: None,
        closed_form_match: None,
        steps: Vec::new(),
    };
    let mut notes = Vec::new();
    let status = match solve_multipliers_stepwise(&f, form.clone(), x_max, samples) {
        Ok(data) => {
            report.steps = (0..=x_max)
                .map(|x| SolveStep {
                    x,
                    a: data.u[x as usize].iter().map(|r| r.to_string()).collect(),
                    m: data.m[x as usize].iter().map(|r| r.to_string()).collect(),
                })
                .collect();
            let verified = first_pair_failure(&data.pair(&f), x_max, x_max)?.is_none();
            report.pair_verified = Some(verified);
            if let (Some(s), MultiplierForm::U1 { .. }) = (&closed, &form) {
                let mut ok = true;
                for x in 0..=x_max {
                    ok &= data.u[x as usize][0] == s.a_coef(x)? && data.m[x as usize] == [s.b_coef(x)?, s.c_coef(x)?];
                }
                report.closed_form_match = Some(ok);
            }
            if verified && report.closed_form_match != Some(false) {
                ExitStatus::Ok
            } else {
                report.status = "verification-failed".into();
                ExitStatus::VerifyFailed
            }
        }
        Err(e @ (MarkovError::DoesNotClose(x) | MarkovError::Underdetermined(x))) => {
            report.status =
                if matches!(e, MarkovError::DoesNotClose(_)) { "does-not-close" } else { "underdetermined" }.into();
            report.failing_x = Some(x);
            report.message = Some(e.to_string());
            notes.push(format!("{family} with form {tag}: {e}"));
            ExitStatus::VerifyFailed
        }
        Err(e) => return Err(e.into()),
    };

    let body = match format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut rows = Vec::new();
            for st in &report.steps {
                for (kind, vals) in [("a", &st.a), ("m", &st.m)] {
                    for (index, v) in vals.iter().enumerate() {
                        rows.push(SolveRecord {
                            schema: SCHEMA.into(),
                            family: family.into(),
                            form: tag.clone(),
                            x: st.x,
                            kind: kind.into(),
                            index,
                            value: v.clone(),
                        });
                    }
                }
            }
            csv_of(&rows)
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "{family}, form {tag}, x = 0..={x_max}: {}", report.status).unwrap();
            if let Some(m) = &report.message {
                writeln!(s, "{m}").unwrap();
            }
            for st in &report.steps {
                writeln!(s, "x = {:<3} a = [{}]  m = [{}]", st.x, st.a.join(", "), st.m.join(", ")).unwrap();
            }
            if let Some(v) = report.pair_verified {
                writeln!(s, "pair verified on [0, {x_max}]²: {v}").unwrap();
            }
            if let Some(v) = report.closed_form_match {
                writeln!(s, "matches closed forms: {v}").unwrap();
            }
            s
        }
    };
    Ok(Outcome { body, status, notes })
}

// ---------------------------------------------------------------- list

fn list(format: Format) -> Result<Outcome, CliError> {
    let rows: Vec<ListRecord> = catalog::ENTRY_IDS
        .iter()
        .map(|id| {
            let e = catalog::lookup(id, &EntryParams::default())?;
            Ok(ListRecord {
                schema: SCHEMA.into(),
                id: e.id.clone(),
                constant: e.constant.clone(),
                tail: describe_kind(&e.tail).into(),
                description: e.description.clone(),
            })
        })
        .collect::<Result<_, CatalogError>>()?;
    let body = match format {
        Format::Json => json(&rows),
        Format::Csv => csv_of(&rows),
        Format::Text => {
            let mut s = String::new();
            for r in &rows {
                writeln!(s, "{:<26} {:<16} {}", r.id, r.tail, r.description).unwrap();
            }
            s
        }
    };
    Ok(Outcome { body, status: ExitStatus::Ok, notes: Vec::new() })
}

fn describe_kind(t: &TailBound) -> &'static str {
    match t {
        TailBound::Ratio(b) if b.is_geometric() => "geometric",
        TailBound::Ratio(_) => "alternating",
        TailBound::Raabe { .. } => "raabe",
        TailBound::Direct { em: Some(_), .. } => "euler-maclaurin",
        TailBound::Direct { .. } => "integral",
    }
}
