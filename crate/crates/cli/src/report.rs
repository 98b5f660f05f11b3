//! Report structures and their text rendering. JSON output is the serde
//! form of [`Report`] and parses back into an equal value.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ld_core::{render_atom, Atom, FormalSum, LogBase, OutcomeSpace};
use serde::{Deserialize, Serialize};

use crate::document::OutcomeEntry;

/// Decimal places for reals in text mode.
pub const TEXT_DECIMALS: usize = 9;

/// Unit name for entropies in `base`.
pub fn unit(base: LogBase) -> String {
    let b = base.value();
    if b == 2.0 {
        "bits".into()
    } else if b == std::f64::consts::E {
        "nats".into()
    } else if b == 10.0 {
        "hartleys".into()
    } else {
        format!("base-{b} units")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomRow {
    pub atom: String,
    pub degree: u32,
    pub mask: u32,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub atom: String,
    pub coeff: i64,
}

/// Terms of `z` in listing order.
pub fn terms(space: &OutcomeSpace, z: &FormalSum) -> Vec<Term> {
    let mut t: Vec<(Atom, i64)> = z.terms().collect();
    t.sort_by_key(|(a, _)| a.listing_key());
    t.into_iter()
        .map(|(a, coeff)| Term {
            atom: render_atom(space, a),
            coeff,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub unit: String,
    pub rows: Vec<AtomRow>,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityReport {
    pub kind: String,
    pub vars: Vec<String>,
    pub unit: String,
    pub value: f64,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub expr: String,
    pub unit: String,
    pub value: f64,
    pub atoms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExprReport {
    pub expression: String,
    pub element: String,
    pub terms: Vec<Term>,
    pub unit: String,
    pub value: f64,
    /// The same expression evaluated from joint distributions.
    pub direct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommonReport {
    pub method: String,
    pub vars: Vec<String>,
    pub unit: String,
    pub value: f64,
    pub witness: Vec<Vec<String>>,
    pub witness_atoms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceRow {
    pub quantity: String,
    pub before: f64,
    pub after: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineReport {
    pub outcomes: Vec<OutcomeEntry>,
    pub variables: BTreeMap<String, Vec<Vec<String>>>,
    pub unit: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<InvarianceRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariant: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminateReport {
    pub system: String,
    pub vars: Vec<String>,
    pub unit: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlReport {
    pub bins: usize,
    pub unit: String,
    pub value: f64,
    /// `Σ p log(p n)` computed term by term.
    pub direct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Report {
    Table(TableReport),
    Quantity(QuantityReport),
    Region(RegionReport),
    Expr(ExprReport),
    Common(CommonReport),
    Refine(RefineReport),
    Discriminate(DiscriminateReport),
    Kl(KlReport),
}

fn real(x: f64) -> String {
    // avoid printing "-0.000000000"
    let s = format!("{x:.TEXT_DECIMALS$}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn value_line(out: &mut String, value: f64, unit: &str) {
    let _ = writeln!(out, "{} {unit}", real(value));
}

fn render_terms(terms: &[Term]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        let sign = if t.coeff < 0 { "-" } else { "+" };
        match (i, t.coeff < 0) {
            (0, true) => out.push('-'),
            (0, false) => {}
            _ => {
                let _ = write!(out, " {sign} ");
            }
        }
        if t.coeff.abs() != 1 {
            let _ = write!(out, "{}*", t.coeff.abs());
        }
        out.push_str(&t.atom);
    }
    out
}

fn render_blocks(blocks: &[Vec<String>]) -> String {
    let inner: Vec<String> = blocks
        .iter()
        .map(|b| format!("{{{}}}", b.join(",")))
        .collect();
    format!("{{{}}}", inner.join(","))
}

impl Report {
    /// Aligned text. Scalar reports lead with `value unit` on the first line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Report::Table(t) => {
                let width = t
                    .rows
                    .iter()
                    .map(|r| r.atom.chars().count())
                    .max()
                    .unwrap_or(0)
                    .max(4);
                let _ = writeln!(
                    out,
                    "{:<width$}  {:>14}",
                    "atom",
                    format!("mu ({})", t.unit)
                );
                for r in &t.rows {
                    let _ = writeln!(out, "{:<width$}  {:>14}", r.atom, real(r.mu));
                }
                let _ = writeln!(out, "{:<width$}  {:>14}", "total", real(t.total));
            }
            Report::Quantity(q) => {
                value_line(&mut out, q.value, &q.unit);
                let _ = writeln!(out, "kind: {}", q.kind);
                let _ = writeln!(out, "vars: {}", q.vars.join(" "));
                let _ = writeln!(out, "atoms: {}", render_terms(&q.terms));
            }
            Report::Region(r) => {
                value_line(&mut out, r.value, &r.unit);
                let _ = writeln!(out, "region: {}", r.expr);
                let _ = writeln!(out, "atoms: {}", r.atoms.join(" "));
            }
            Report::Expr(e) => {
                value_line(&mut out, e.value, &e.unit);
                let _ = writeln!(out, "expression: {}", e.expression);
                let _ = writeln!(out, "element: {}", e.element);
                let _ = writeln!(out, "direct: {} {}", real(e.direct), e.unit);
            }
            Report::Common(c) => {
                value_line(&mut out, c.value, &c.unit);
                let _ = writeln!(out, "method: {}", c.method);
                let _ = writeln!(out, "vars: {}", c.vars.join(" "));
                let _ = writeln!(out, "witness: {}", render_blocks(&c.witness));
                let _ = writeln!(out, "witness atoms: {}", c.witness_atoms);
            }
            Report::Refine(r) => {
                let outcomes: Vec<String> = r
                    .outcomes
                    .iter()
                    .map(|o| format!("{}={}", o.label, o.p))
                    .collect();
                let _ = writeln!(out, "outcomes: {}", outcomes.join(" "));
                for (name, blocks) in &r.variables {
                    let _ = writeln!(out, "{name}: {}", render_blocks(blocks));
                }
                if let Some(rows) = &r.checks {
                    let width = rows
                        .iter()
                        .map(|c| c.quantity.chars().count())
                        .max()
                        .unwrap_or(0)
                        .max(8);
                    let _ = writeln!(
                        out,
                        "{:<width$}  {:>14}  {:>14}  {:>10}",
                        "quantity", "before", "after", "deviation"
                    );
                    for c in rows {
                        let _ = writeln!(
                            out,
                            "{:<width$}  {:>14}  {:>14}  {:>10.3e}",
                            c.quantity,
                            real(c.before),
                            real(c.after),
                            c.deviation
                        );
                    }
                }
                if let Some(ok) = r.invariant {
                    let _ = writeln!(out, "invariant: {}", if ok { "yes" } else { "no" });
                }
            }
            Report::Discriminate(d) => value_line(&mut out, d.value, &d.unit),
            Report::Kl(k) => {
                value_line(&mut out, k.value, &k.unit);
                let _ = writeln!(out, "bins: {}", k.bins);
                let _ = writeln!(out, "direct: {} {}", real(k.direct), k.unit);
            }
        }
        out
    }

    /// Pretty JSON with round-trip float formatting.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports contain only finite reals");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_have_nine_decimals_and_no_negative_zero() {
        assert_eq!(real(1.0), "1.000000000");
        assert_eq!(real(-1e-15), "0.000000000");
        assert_eq!(real(-0.25), "-0.250000000");
    }

    #[test]
    fn term_rendering() {
        let t = |atom: &str, coeff| Term {
            atom: atom.into(),
            coeff,
        };
        assert_eq!(render_terms(&[]), "0");
        assert_eq!(render_terms(&[t("12", -1), t("123", 2)]), "-12 + 2*123");
        assert_eq!(render_terms(&[t("a,b", 1), t("a,c", -3)]), "a,b - 3*a,c");
    }

    #[test]
    fn units() {
        assert_eq!(unit(LogBase::BITS), "bits");
        assert_eq!(unit(LogBase::NATS), "nats");
        assert_eq!(unit(LogBase::new(10.0).unwrap()), "hartleys");
    }

    #[test]
    fn json_round_trip() {
        let r = Report::Kl(KlReport {
            bins: 3,
            unit: "bits".into(),
            value: 0.1 + 0.2,
            direct: 1.0 / 3.0,
        });
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
