use std::collections::BTreeMap;
use std::fmt::Write as _;

use acbound::bound::{enumerate_deltas, gain_functions, loss_function, reference_length, refined_sets, Refinement};
use acbound::quantization::pow2_table;
use acbound::verification::{block_to_text, decomposition_check, soundness_fuzz, toy_oracle, MAX_TOY_POSITIONS};
use acbound::{upper_limit, ComponentKind, Error, QuantTable, ScaleFactor};
use anyhow::{bail, Result};
use clap::{Args, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{ComponentArg, ScaleArgs};
use crate::manifest::{json_artifact, RunManifest};

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(subcommand)]
    pub suite: Suite,

    /// Emit JSON.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Suite {
    /// Encode random and structured blocks and compare against the pruned limit.
    Fuzz {
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, env = "ACBOUND_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        scale: ScaleArgs,
        #[arg(long, value_enum, default_value = "both")]
        component: ComponentArg,
    },
    /// Exhaustive maximum on a small instance against the engine limits.
    Toy {
        /// Number of positions, all with exponent 0.
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Explicit exponents, overriding `--n`.
        #[arg(long, value_delimiter = ',')]
        exponents: Vec<u8>,
        #[arg(long, value_enum, default_value = "both")]
        component: ComponentArg,
    },
    /// Invariants of the loss/gain enumeration and the decomposition identity.
    Deltas {
        #[command(flatten)]
        scale: ScaleArgs,
        #[arg(long, value_enum, default_value = "both")]
        component: ComponentArg,
        /// Random reduced configurations for the decomposition identity.
        #[arg(long, default_value_t = 1_000)]
        samples: usize,
        #[arg(long, env = "ACBOUND_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: Value,
}

#[derive(Debug, Serialize)]
struct SuiteReport {
    suite: &'static str,
    passed: bool,
    checks: Vec<Check>,
}

/// Runs a suite; the flag is false when any check failed.
pub fn run(args: &VerifyArgs) -> Result<(String, bool)> {
    let (suite, parameters, seed, checks) = match &args.suite {
        Suite::Fuzz { trials, seed, scale, component } => {
            let params = BTreeMap::from([
                ("trials".to_string(), trials.to_string()),
                ("sf".to_string(), scale.describe()),
                ("component".to_string(), component.name().to_string()),
            ]);
            ("fuzz", params, Some(*seed), fuzz(*trials, *seed, &scale.factors(), component.kinds())?)
        }
        Suite::Toy { n, exponents, component } => {
            let exps = if exponents.is_empty() { vec![0; *n] } else { exponents.clone() };
            if exps.len() > MAX_TOY_POSITIONS {
                bail!(Error::OracleTooLarge(exps.len()));
            }
            let params = BTreeMap::from([
                ("exponents".to_string(), format!("{exps:?}")),
                ("component".to_string(), component.name().to_string()),
            ]);
            ("toy", params, None, toy(&exps, component.kinds())?)
        }
        Suite::Deltas { scale, component, samples, seed } => {
            let params = BTreeMap::from([
                ("sf".to_string(), scale.describe()),
                ("component".to_string(), component.name().to_string()),
                ("samples".to_string(), samples.to_string()),
            ]);
            ("deltas", params, Some(*seed), deltas(&scale.factors(), component.kinds(), *samples, *seed)?)
        }
    };
    let manifest = RunManifest::new(&format!("verify {suite}"), parameters, seed)?;
    let passed = checks.iter().all(|c| c.passed);
    let report = SuiteReport { suite, passed, checks };
    let out = if args.json { json_artifact(&manifest, "report", &report)? } else { text(&manifest, &report) };
    Ok((out, passed))
}

fn text(manifest: &RunManifest, report: &SuiteReport) -> String {
    let mut out = manifest.header();
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let mut detail = c.detail.clone();
        let block = detail.as_object_mut().and_then(|m| m.remove("counterexample"));
        let _ = writeln!(out, "{status} {} {}", c.name, detail);
        if let Some(Value::String(b)) = block {
            out.push_str(&b);
        }
    }
    let passed = report.checks.iter().filter(|c| c.passed).count();
    let _ = writeln!(out, "verify {}: {passed}/{} checks passed", report.suite, report.checks.len());
    out
}

fn cell(component: ComponentKind, sf: ScaleFactor) -> String {
    format!("{} {sf}", component.short_name())
}

fn fuzz(trials: usize, seed: u64, factors: &[ScaleFactor], components: Vec<ComponentKind>) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for component in components {
        for &sf in factors {
            let q = QuantTable::annex_k_scaled(component, sf)?;
            let name = cell(component, sf);
            checks.push(match soundness_fuzz(trials, &q, component, seed) {
                Ok(s) => Check {
                    name,
                    passed: s.min_slack >= 0,
                    detail: json!({
                        "blocks": s.random_blocks + s.structured_blocks,
                        "max_bits": s.max_bits,
                        "limit": s.limit,
                        "min_slack": s.min_slack,
                    }),
                },
                Err(Error::SoundnessViolation { bits, limit, block }) => {
                    let block = acbound::transform::PixelBlock::new(*block)?;
                    Check {
                        name,
                        passed: false,
                        detail: json!({ "bits": bits, "limit": limit, "counterexample": block_to_text(&block) }),
                    }
                }
                Err(e) => return Err(e.into()),
            });
        }
    }
    Ok(checks)
}

fn toy(exponents: &[u8], components: Vec<ComponentKind>) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for component in components {
        let out = toy_oracle(component, exponents)?;
        checks.push(Check {
            name: format!("{} {:?}", component.short_name(), exponents),
            passed: out.is_sound(),
            detail: json!({
                "exact_max": out.exact_max,
                "engine_limits": {
                    "base": out.engine_limits[0],
                    "capacity_pruned": out.engine_limits[1],
                    "maxconfig_pruned": out.engine_limits[2],
                },
                "gap": out.engine_limits[0] as i64 - out.exact_max as i64,
                "witness": out.witness,
            }),
        });
    }
    Ok(checks)
}

fn deltas(factors: &[ScaleFactor], components: Vec<ComponentKind>, samples: usize, seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for component in components {
        for &sf in factors {
            let q = QuantTable::annex_k_scaled(component, sf)?;
            let rf = reference_length(component, &pow2_table(&q))?;
            let name = cell(component, sf);

            let base = enumerate_deltas(&rf);
            let total = base.census.total();
            checks.push(Check {
                name: format!("{name} census"),
                passed: total == 20159,
                detail: json!({ "evaluated": total, "census": base.census }),
            });

            let zero = acbound::bound::Rational::from_integer(0);
            let strict = base.losses.iter().filter(|e| {
                matches!(e.kind, acbound::bound::OpKind::Op1 | acbound::bound::OpKind::Op2) && e.value <= zero
            });
            let negative = base.losses.iter().filter(|e| e.value < zero);
            let gains = base.gains9.iter().chain(&base.gains10).filter(|e| e.value <= zero);
            let violations = strict.count() + negative.count() + gains.count();
            checks.push(Check {
                name: format!("{name} sign structure"),
                passed: violations == 0,
                detail: json!({ "violations": violations }),
            });

            let mut levels = serde_json::Map::new();
            let mut limits = Vec::new();
            for level in Refinement::ALL {
                let r = upper_limit(component, &q, level)?;
                let sets = refined_sets(&rf, level)?;
                let (a1, b1) = gain_functions(&sets, 1, 1);
                let loss: Vec<String> =
                    (1..=3).map(|n| loss_function(&sets, n).map(|v| v.to_string())).collect::<acbound::Result<_>>()?;
                levels.insert(
                    level.to_string(),
                    json!({
                        "limit": r.limit,
                        "argmax": r.argmax,
                        "loss_1_to_3": loss,
                        "largest_gain_9": a1.to_string(),
                        "largest_gain_10": b1.to_string(),
                    }),
                );
                limits.push(r.limit);
            }
            checks.push(Check {
                name: format!("{name} refinement ordering"),
                passed: limits[2] <= limits[1] && limits[1] <= limits[0],
                detail: json!({ "ref_len": rf.ref_len, "levels": levels }),
            });

            let d = decomposition_check(&rf, samples, seed)?;
            checks.push(Check {
                name: format!("{name} decomposition identity"),
                passed: d.mismatches == 0,
                detail: serde_json::to_value(&d)?,
            });
        }
    }
    Ok(checks)
}
