use std::fmt::Write;

use crate::curveinv::CurveInvariants;
use crate::family::{CheckStatus, FamilyAnalysis, HypothesisItem, Provenance};

use super::{EntryResult, Report};

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn inv_line(inv: &CurveInvariants) -> String {
    format!(
        "m={} r={} delta_red={} epsilon={} delta={} mu_red={} mu={}",
        inv.m, inv.r, inv.delta_red, inv.epsilon, inv.delta, inv.mu_red, inv.mu
    )
}

fn hypotheses(out: &mut String, items: &[HypothesisItem]) {
    out.push_str("  hypotheses:\n");
    for h in items {
        let tag = match h.status {
            CheckStatus::Verified => "verified",
            CheckStatus::Asserted => "asserted",
        };
        let _ = writeln!(out, "    [{tag}] {}: {}", h.item, h.detail);
    }
}

fn family(out: &mut String, a: &FamilyAnalysis) {
    let _ = writeln!(out, "  special fibre: {}", inv_line(&a.special.inv));
    let generic_src = match a.generic.provenance {
        Provenance::Computed => format!("at t = {}", a.generic.t_samples_used.join(", ")),
        Provenance::Asserted => "asserted".to_string(),
    };
    let _ = writeln!(
        out,
        "  generic fibre ({generic_src}): {}",
        inv_line(&a.generic.inv)
    );
    for c in &a.components {
        let _ = write!(out, "  component {} [class {:?}]", c.label, c.class);
        if let Some(p) = &c.pullback {
            let _ = write!(
                out,
                ": J = <{}>, l = {}, e = {}, Cohen-Macaulay: {}",
                p.ideal.join(", "),
                p.l,
                p.e,
                yes_no(p.cohen_macaulay)
            );
        }
        out.push('\n');
    }
    let v = &a.verdict;
    let _ = writeln!(out, "  b0 of generic fibre: {}", v.b0_generic_fiber);
    let _ = writeln!(
        out,
        "  constant: mu {}, m {}, delta {}, r {}",
        yes_no(a.constancy.mu),
        yes_no(a.constancy.m),
        yes_no(a.constancy.delta),
        yes_no(a.constancy.r)
    );
    let _ = writeln!(
        out,
        "  topologically trivial: {}; Whitney equisingular: {}; strong simultaneous resolution: {}",
        yes_no(v.topologically_trivial),
        yes_no(v.whitney),
        yes_no(v.strong_simultaneous_resolution)
    );
    out.push_str("  justification:\n");
    for j in &v.justification {
        let args: Vec<String> = j.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "    {} [{}] ({})", j.claim, j.rule, args.join(", "));
    }
    hypotheses(out, &a.hypotheses);
}

pub(super) fn render(report: &Report) -> String {
    let mut out = String::new();
    for e in &report.entries {
        let _ = writeln!(out, "== {} ({})", e.name, e.kind);
        match &e.result {
            EntryResult::Curve(c) => {
                let _ = writeln!(out, "  {}", inv_line(&c.invariants));
                let _ = writeln!(
                    out,
                    "  delta certified at jet order {} (conductor bound {})",
                    c.delta_certificate.jet_order, c.delta_certificate.conductor_bound
                );
                hypotheses(&mut out, &c.hypotheses);
            }
            EntryResult::Family(a) => family(&mut out, a),
        }
        if let Some(ms) = e.timing_ms {
            let _ = writeln!(out, "  time: {ms} ms");
        }
    }
    if report.entries.is_empty() {
        out.push_str("no entries\n");
    }
    out
}
