use acbound::bound::Refinement;
use acbound::{ComponentKind, ScaleFactor};
use clap::{Args, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComponentArg {
    #[value(alias = "luma", alias = "luminance", alias = "y")]
    Lum,
    #[value(alias = "chrominance", alias = "c", alias = "cb", alias = "cr")]
    Chroma,
    Both,
}

impl ComponentArg {
    pub fn kinds(self) -> Vec<ComponentKind> {
        match self {
            ComponentArg::Lum => vec![ComponentKind::Luminance],
            ComponentArg::Chroma => vec![ComponentKind::Chrominance],
            ComponentArg::Both => ComponentKind::ALL.to_vec(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ComponentArg::Lum => "lum",
            ComponentArg::Chroma => "chroma",
            ComponentArg::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RefinementArg {
    Base,
    Capacity,
    Maxconfig,
    /// The tightest level (max-configuration pruned).
    Best,
    All,
}

impl RefinementArg {
    pub fn levels(self) -> Vec<Refinement> {
        match self {
            RefinementArg::Base => vec![Refinement::Base],
            RefinementArg::Capacity => vec![Refinement::CapacityPruned],
            RefinementArg::Maxconfig | RefinementArg::Best => vec![Refinement::MaxconfigPruned],
            RefinementArg::All => Refinement::ALL.to_vec(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RefinementArg::Base => "base",
            RefinementArg::Capacity => "capacity",
            RefinementArg::Maxconfig => "maxconfig",
            RefinementArg::Best => "best",
            RefinementArg::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SfSet {
    /// 1/64, 1/16, 1/8, 1/6, 1/4, 1/2, 1
    Standard,
}

/// Exact scale factor in `[1/64, 1]`: `p/q`, an integer, or a decimal.
pub fn parse_sf(s: &str) -> Result<ScaleFactor, String> {
    let sf: ScaleFactor = s.parse().map_err(|e| format!("{e}"))?;
    if !sf.is_supported() {
        return Err(format!("scale factor {sf} is outside [1/64, 1]"));
    }
    Ok(sf)
}

#[derive(Debug, Clone, Args)]
pub struct ScaleArgs {
    /// Scale factors, exact (`1/6` stays 1/6). Repeat or separate with commas.
    #[arg(long, value_parser = parse_sf, value_delimiter = ',')]
    pub sf: Vec<ScaleFactor>,

    /// Named set of scale factors, used when `--sf` is absent.
    #[arg(long, value_enum, conflicts_with = "sf")]
    pub sf_set: Option<SfSet>,
}

impl ScaleArgs {
    pub fn factors(&self) -> Vec<ScaleFactor> {
        if self.sf.is_empty() {
            ScaleFactor::standard_set()
        } else {
            self.sf.clone()
        }
    }

    pub fn describe(&self) -> String {
        self.factors().iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    }
}

#[derive(Debug, Clone, Copy, Args)]
pub struct FormatArgs {
    /// Emit JSON.
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,

    /// Emit CSV.
    #[arg(long)]
    pub csv: bool,
}
