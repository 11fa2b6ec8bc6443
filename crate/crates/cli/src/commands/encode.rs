use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use acbound::transform::PixelBlock;
use acbound::verification::EncodeReport;
use acbound::{encode_block, ComponentKind, QuantTable, ScaleFactor};
use anyhow::{Context, Result};
use clap::Args;

use crate::args::parse_sf;
use crate::manifest::{json_artifact, RunManifest};

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// 8 lines of 8 whitespace-separated samples in 0..=255.
    pub block_file: PathBuf,

    #[arg(long, value_parser = parse_sf, default_value = "1")]
    pub sf: ScaleFactor,

    #[arg(long, default_value = "lum")]
    pub component: ComponentKind,

    /// Emit JSON.
    #[arg(long)]
    pub json: bool,
}

pub fn run(args: &EncodeArgs) -> Result<String> {
    let text = std::fs::read_to_string(&args.block_file)
        .with_context(|| format!("cannot read {}", args.block_file.display()))?;
    let block = PixelBlock::parse_samples(&text).with_context(|| format!("{}", args.block_file.display()))?;
    let q = QuantTable::annex_k_scaled(args.component, args.sf)?;
    let report = encode_block(&block, &q, args.component)?;

    let parameters = BTreeMap::from([
        ("block_file".to_string(), args.block_file.display().to_string()),
        ("sf".to_string(), args.sf.to_string()),
        ("component".to_string(), args.component.short_name().to_string()),
    ]);
    let manifest = RunManifest::new("encode", parameters, None)?;
    if args.json {
        return json_artifact(&manifest, "report", &report);
    }
    Ok(manifest.header() + &text_report(&report))
}

fn text_report(r: &EncodeReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "component: {}", r.component);
    let _ = writeln!(out, "sf: {}", r.sf.map(|s| s.to_string()).unwrap_or_else(|| "-".into()));
    let _ = writeln!(out, "ac_bits: {}", r.ac_bits);
    let _ = writeln!(out, "limit: {}", r.limit);
    let _ = writeln!(out, "slack: {}", r.slack);
    let sizes: Vec<String> = r.quantized_sizes.iter().map(u8::to_string).collect();
    let _ = writeln!(out, "sizes: {}", sizes.join(" "));
    let mut symbols: Vec<String> = r.symbols.symbols.iter().map(|s| format!("{}/{}", s.run, s.size)).collect();
    if r.symbols.has_eob {
        symbols.push("EOB".into());
    }
    let _ = writeln!(out, "symbols: {}", symbols.join(" "));
    out
}
