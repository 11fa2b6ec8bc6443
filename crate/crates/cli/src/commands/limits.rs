use std::collections::BTreeMap;
use std::fmt::Write as _;

use acbound::bound::BoundResult;
use acbound::{upper_limit, QuantTable};
use anyhow::Result;
use clap::Args;

use crate::args::{ComponentArg, FormatArgs, RefinementArg, ScaleArgs};
use crate::manifest::{json_artifact, RunManifest};

#[derive(Debug, Args)]
pub struct LimitsArgs {
    #[command(flatten)]
    pub scale: ScaleArgs,

    #[arg(long, value_enum, default_value = "both")]
    pub component: ComponentArg,

    #[arg(long, value_enum, default_value = "best")]
    pub refinement: RefinementArg,

    #[command(flatten)]
    pub format: FormatArgs,
}

pub fn run(args: &LimitsArgs) -> Result<String> {
    let factors = args.scale.factors();
    let mut results: Vec<BoundResult> = Vec::new();
    for component in args.component.kinds() {
        for level in args.refinement.levels() {
            for &sf in &factors {
                let q = QuantTable::annex_k_scaled(component, sf)?;
                results.push(upper_limit(component, &q, level)?);
            }
        }
    }

    let parameters = BTreeMap::from([
        ("sf".to_string(), args.scale.describe()),
        ("component".to_string(), args.component.name().to_string()),
        ("refinement".to_string(), args.refinement.name().to_string()),
    ]);
    let manifest = RunManifest::new("limits", parameters, None)?;

    if args.format.json {
        return json_artifact(&manifest, "results", &results);
    }
    if args.format.csv {
        return csv_output(&manifest, &results);
    }
    Ok(text_output(&manifest, &results, factors.len()))
}

fn text_output(manifest: &RunManifest, results: &[BoundResult], columns: usize) -> String {
    let mut out = manifest.header();
    let _ = write!(out, "{:<12} {:<17}", "component", "refinement");
    for r in &results[..columns] {
        let _ = write!(out, " {:>6}", r.sf.map(|s| s.to_string()).unwrap_or_default());
    }
    out.push('\n');
    for row in results.chunks(columns) {
        let _ = write!(out, "{:<12} {:<17}", row[0].component.to_string(), row[0].refinement.to_string());
        for r in row {
            let _ = write!(out, " {:>6}", r.limit);
        }
        out.push('\n');
    }
    out
}

fn csv_output(manifest: &RunManifest, results: &[BoundResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["component", "refinement", "sf", "ref_len", "limit", "argmax_a", "argmax_b", "max_objective"])?;
    for r in results {
        let objective = if r.max_objective.is_integer() {
            r.max_objective.to_integer().to_string()
        } else {
            format!("{}/{}", r.max_objective.numer(), r.max_objective.denom())
        };
        w.write_record([
            r.component.short_name().to_string(),
            r.refinement.to_string(),
            r.sf.map(|s| s.to_string()).unwrap_or_default(),
            r.ref_len.to_string(),
            r.limit.to_string(),
            r.argmax[0].to_string(),
            r.argmax[1].to_string(),
            objective,
        ])?;
    }
    Ok(manifest.header() + &String::from_utf8(w.into_inner()?)?)
}
