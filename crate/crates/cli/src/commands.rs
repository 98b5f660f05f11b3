//! Subcommand execution.

use std::collections::BTreeMap;
use std::path::PathBuf;

use ld_core::{
    build_canonical_system, content, discriminate, eval_region, expression_to_formal_sum,
    gacs_korner, kl_via_measure, multiplicity_sum, quantity, quantity_region, render_atom,
    wyner_with_config, EntropyExpr, FormalSum, InfoSystem, MultiplicityKind, QuantityKind,
    RefinementMap, SearchConfig, SetExpr,
};

use crate::document::{build_refinement, load_system, read_refinement, LoadOptions, OutcomeEntry};
use crate::report::{
    terms, unit, AtomRow, CommonReport, DiscriminateReport, ExprReport, InvarianceRow, KlReport,
    QuantityReport, RefineReport, RegionReport, Report, TableReport,
};
use crate::{Cli, Command, Failure, Method, Source};

/// A loaded system and where it came from.
struct Input {
    name: String,
    system: InfoSystem,
    refinement: Option<RefinementMap>,
    scale: f64,
}

fn load(cli: &Cli, source: &Source, stderr: &mut String) -> Result<Input, Failure> {
    match (cli.system, &source.file) {
        (Some(_), Some(path)) => Err(Failure::Usage(format!(
            "give either --system or a file, not both (got {})",
            path.display()
        ))),
        (Some(name), None) => {
            let system = build_canonical_system(name)?.system.with_base(cli.base);
            Ok(Input {
                name: name.to_string(),
                system,
                refinement: None,
                scale: 1.0,
            })
        }
        (None, Some(path)) => {
            let opts = LoadOptions {
                base: cli.base,
                normalize: cli.normalize,
                check_normalization: !cli.no_normalize_check,
                tol: cli.tol,
            };
            let loaded = load_system(path, &opts)?;
            for w in &loaded.warnings {
                stderr.push_str(&format!("warning: {w}\n"));
            }
            Ok(Input {
                name: path.display().to_string(),
                system: loaded.system,
                refinement: loaded.refinement,
                scale: loaded.scale,
            })
        }
        (None, None) => Err(Failure::Usage(
            "no system given; pass a FILE or --system NAME".into(),
        )),
    }
}

/// `--vars X Y file.json` hands the file to `--vars`; take it back when no
/// other source was given.
fn split_trailing_file(cli: &Cli, vars: &mut Vec<String>, source: &mut Source) {
    if cli.system.is_none() && source.file.is_none() && !vars.is_empty() {
        source.file = vars.pop().map(PathBuf::from);
    }
}

fn names(vars: &[String], system: &InfoSystem) -> Vec<String> {
    if vars.is_empty() {
        system.variables().iter().map(|(n, _)| n.clone()).collect()
    } else {
        vars.to_vec()
    }
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

pub fn execute(cli: Cli, stderr: &mut String) -> Result<Report, Failure> {
    if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        return Err(Failure::Usage(format!(
            "--tol must be a nonnegative number, got {}",
            cli.tol
        )));
    }
    let u = unit(cli.base);
    match &cli.command {
        Command::Table { source } => {
            let input = load(&cli, source, stderr)?;
            Ok(Report::Table(table(&input.system, u)))
        }
        Command::Quantity { kind, vars, source } => {
            let (mut vars, mut source) = (vars.clone(), source.clone());
            split_trailing_file(&cli, &mut vars, &mut source);
            let input = load(&cli, &source, stderr)?;
            Ok(Report::Quantity(quantity_report(
                &input.system,
                kind,
                &vars,
                u,
            )?))
        }
        Command::Region { expr, source } => {
            let input = load(&cli, source, stderr)?;
            let parsed: SetExpr = expr.parse()?;
            let set = eval_region(&input.system, &parsed)?;
            let space = input.system.space();
            let mut atoms: Vec<_> = set.iter().collect();
            atoms.sort_by_key(|a| a.listing_key());
            Ok(Report::Region(RegionReport {
                expr: parsed.to_string(),
                unit: u,
                value: input.system.measure(&set)?,
                atoms: atoms.into_iter().map(|a| render_atom(space, a)).collect(),
            }))
        }
        Command::Expr { entropy, source } => {
            let input = load(&cli, source, stderr)?;
            let parsed: EntropyExpr = entropy.parse()?;
            let z = expression_to_formal_sum(&input.system, &parsed)?;
            let space = input.system.space();
            Ok(Report::Expr(ExprReport {
                expression: parsed.to_string(),
                element: z.render(space),
                terms: terms(space, &z),
                unit: u,
                value: input.system.measure_sum(&z)?,
                direct: parsed.evaluate_direct(&input.system)?,
            }))
        }
        Command::Common {
            method,
            vars,
            source,
        } => {
            let (mut vars, mut source) = (vars.clone(), source.clone());
            split_trailing_file(&cli, &mut vars, &mut source);
            let input = load(&cli, &source, stderr)?;
            let vars = names(&vars, &input.system);
            let result = match method {
                Method::Gk => gacs_korner(&input.system, &refs(&vars))?,
                Method::Wyner => {
                    let config = SearchConfig {
                        ci_tol: cli.tol.max(f64::MIN_POSITIVE),
                        ..SearchConfig::default()
                    };
                    wyner_with_config(&input.system, &refs(&vars), &config)?
                }
            };
            Ok(Report::Common(CommonReport {
                method: match method {
                    Method::Gk => "gk".into(),
                    Method::Wyner => "wyner".into(),
                },
                vars,
                unit: u,
                value: result.value,
                witness: result.partition.label_blocks(input.system.space()),
                witness_atoms: result.witness_content.len(),
            }))
        }
        Command::Refine {
            map,
            check_invariance,
            source,
        } => {
            let input = load(&cli, source, stderr)?;
            let refinement = match (map, input.refinement) {
                (Some(path), _) => {
                    let splits = read_refinement(path)?;
                    // children scale with their parents when the document was normalised
                    build_refinement(
                        input.system.space(),
                        &splits,
                        input.scale,
                        &path.display().to_string(),
                    )?
                }
                (None, Some(r)) => r,
                (None, None) => {
                    return Err(Failure::Usage(format!(
                        "{} has no refinements; pass --map FILE",
                        input.name
                    )))
                }
            };
            let report = refine(&input.system, &refinement, *check_invariance, cli.tol, u)?;
            if report.invariant == Some(false) {
                stderr.push_str(&report_failure(&report));
                return Err(Failure::Semantic(
                    "refinement changed an information quantity".into(),
                ));
            }
            Ok(Report::Refine(report))
        }
        Command::Discriminate { vars, source } => {
            let (mut vars, mut source) = (vars.clone(), source.clone());
            split_trailing_file(&cli, &mut vars, &mut source);
            let input = load(&cli, &source, stderr)?;
            let vars = names(&vars, &input.system);
            Ok(Report::Discriminate(DiscriminateReport {
                value: discriminate(&input.system, &refs(&vars))?,
                system: input.name,
                vars,
                unit: u,
            }))
        }
        Command::Kl {
            bins,
            weights,
            source,
        } => {
            let weights = if weights.is_empty() {
                let input = load(&cli, source, stderr)?;
                input.system.space().weights().to_vec()
            } else if source.file.is_some() || cli.system.is_some() {
                return Err(Failure::Usage(
                    "give either --weights or a system, not both".into(),
                ));
            } else {
                weights.clone()
            };
            let value = kl_via_measure(&weights, *bins, cli.base)?;
            let n = *bins as f64;
            let direct = weights
                .iter()
                .filter(|&&p| p > 0.0)
                .map(|&p| p * (p * n).ln())
                .sum::<f64>()
                / cli.base.ln();
            Ok(Report::Kl(KlReport {
                bins: *bins,
                unit: u,
                value,
                direct,
            }))
        }
    }
}

fn table(system: &InfoSystem, unit: String) -> TableReport {
    let space = system.space();
    let mut entries: Vec<_> = system.table().iter().collect();
    entries.sort_by_key(|(a, _)| a.listing_key());
    let rows: Vec<AtomRow> = entries
        .into_iter()
        .map(|(a, mu)| AtomRow {
            atom: render_atom(space, a),
            degree: a.degree(),
            mask: a.mask(),
            mu,
        })
        .collect();
    let total = rows.iter().map(|r| r.mu).sum();
    TableReport { unit, rows, total }
}

fn quantity_report(
    system: &InfoSystem,
    kind: &str,
    vars: &[String],
    unit: String,
) -> Result<QuantityReport, Failure> {
    let v = refs(vars);
    let space = system.space();
    let (name, z) = match kind.parse::<QuantityKind>() {
        Ok(k) => {
            let region = quantity_region(system, k, &v)?;
            debug_assert!((system.measure(&region)? - quantity(system, k, &v)?).abs() < 1e-12);
            (k.name(), FormalSum::from_set(&region))
        }
        Err(_) => {
            let k: MultiplicityKind = kind.parse().map_err(|_| {
                Failure::Usage(format!(
                    "unknown quantity kind `{kind}`; expected one of {}, TC, DTC, O_information",
                    QuantityKind::ALL.map(|k| k.name()).join(", ")
                ))
            })?;
            (k.name(), multiplicity_sum(system, k, &v)?)
        }
    };
    Ok(QuantityReport {
        kind: name.into(),
        vars: vars.to_vec(),
        unit,
        value: system.measure_sum(&z)?,
        terms: terms(space, &z),
    })
}

fn refine(
    system: &InfoSystem,
    map: &RefinementMap,
    check: bool,
    tol: f64,
    unit: String,
) -> Result<RefineReport, Failure> {
    let refined = map.map_system(system)?;
    let child = refined.space();
    let outcomes = child
        .labels()
        .iter()
        .zip(child.weights())
        .map(|(l, &p)| OutcomeEntry {
            label: l.clone(),
            p,
        })
        .collect();
    let variables: BTreeMap<String, Vec<Vec<String>>> = refined
        .variables()
        .iter()
        .map(|(n, p)| (n.clone(), p.label_blocks(child)))
        .collect();
    let mut report = RefineReport {
        outcomes,
        variables,
        unit,
        checks: None,
        invariant: None,
    };
    if !check {
        return Ok(report);
    }
    let names: Vec<&str> = system.variables().iter().map(|(n, _)| n.as_str()).collect();
    let mut rows = Vec::new();
    let mut structural = true;
    let mut push = |label: String, before: f64, after: f64| {
        rows.push(InvarianceRow {
            quantity: label,
            before,
            after,
            deviation: (after - before).abs(),
        })
    };
    for (name, x) in system.variables() {
        let before = quantity(system, QuantityKind::Entropy, &[name])?;
        let after = quantity(&refined, QuantityKind::Entropy, &[name])?;
        push(format!("H({name})"), before, after);
        // the image of the content is the content of the image
        structural &= map.map_atom_set(&content(x))? == refined.content_of(name)?;
    }
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            let pair = [*a, *b];
            let before = quantity(system, QuantityKind::MutualInformation, &pair)?;
            let after = quantity(&refined, QuantityKind::MutualInformation, &pair)?;
            push(format!("I({a};{b})"), before, after);
        }
    }
    if names.len() > 2 {
        let before = quantity(system, QuantityKind::JointEntropy, &names)?;
        let after = quantity(&refined, QuantityKind::JointEntropy, &names)?;
        push(format!("H({})", names.join(",")), before, after);
    }
    let scale = system.space().total_weight().max(1.0);
    let within = rows.iter().all(|r| r.deviation <= tol * scale);
    report.checks = Some(rows);
    report.invariant = Some(within && structural);
    Ok(report)
}

fn report_failure(report: &RefineReport) -> String {
    let mut out = String::new();
    for row in report.checks.iter().flatten() {
        out.push_str(&format!(
            "{}: before {} after {} (deviation {:.3e})\n",
            row.quantity, row.before, row.after, row.deviation
        ));
    }
    out
}
