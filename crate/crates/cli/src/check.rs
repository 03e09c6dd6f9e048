use std::path::PathBuf;

use clap::{Args, ValueEnum};
use liemult_core::harmonic::GroupModel;
use liemult_core::multiplier::{
    check_mikhlin, check_refined, check_symbol_class, check_torus3, empirical_lp_ratio,
    SymbolClassSpec,
};
use liemult_core::symbol::{factor_band, SymbolData};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::report::{write_atomic, Outcome, Record};
use crate::symbols::{build_symbol, format_symbol_file, parse_symbol_file};
use crate::OutputArgs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Checker {
    Mikhlin,
    Refined,
    Torus3,
    SymbolClass,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    /// `su2` or `torus-N`.
    #[arg(long, default_value = "su2")]
    pub group: String,

    /// Band up to which the symbol is built and trusted; defaults to the
    /// range plus the difference margin of the selected checkers.
    #[arg(long)]
    pub band: Option<u32>,

    /// Largest label band graded; defaults to the band minus the margin
    /// rounded down to a multiple of 8, or 24 on SU(2) and 32 on a torus.
    #[arg(long)]
    pub range: Option<u32>,

    /// `riesz:AXIS`, `laplacian-function:EXPR`, `vf-inverse:X;c`, or on a
    /// torus an expression in `k1..kn` and `abs(k)`.
    #[arg(
        long,
        conflicts_with = "symbol_file",
        required_unless_present = "symbol_file"
    )]
    pub symbol: Option<String>,

    #[arg(long)]
    pub symbol_file: Option<PathBuf>,

    /// Comma separated list.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "mikhlin")]
    pub checker: Vec<Checker>,

    /// Order of the symbol class.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub m: f64,

    /// Type of the symbol class.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,

    /// Highest difference order graded by the symbol-class checker; defaults
    /// to kappa.
    #[arg(long)]
    pub order: Option<usize>,

    /// Random trials of the empirical L^p ratio; 0 skips it.
    #[arg(long, default_value_t = 0)]
    pub lp_trials: usize,

    #[arg(long, default_value_t = 4.0)]
    pub lp_p: f64,

    /// Fourier band of the random test functions.
    #[arg(long, default_value_t = 6)]
    pub lp_band: u32,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Also write the symbol in the symbol file format.
    #[arg(long)]
    #[serde(skip)]
    pub save_symbol: Option<PathBuf>,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

/// Band consumed beyond the range by one checker.
pub fn margin(checker: Checker, model: &GroupModel, order: usize) -> u32 {
    let fb = factor_band(model);
    let kappa = model.kappa() as u32;
    match checker {
        Checker::Mikhlin => fb * kappa,
        Checker::Refined => fb * (kappa - 1).max(kappa / 2),
        Checker::Torus3 => 1,
        // the reweighted Mikhlin check runs as well
        Checker::SymbolClass => fb * (order as u32).max(kappa),
    }
}

#[derive(Debug, Serialize)]
struct Resolved {
    group: String,
    band: u32,
    range: u32,
    margin: u32,
    source: String,
}

/// Largest multiple of 8 not above `room`, so the tail windows of the
/// graders are exact quarters of the range.
fn derived_range(room: u32) -> u32 {
    if room >= 8 {
        room / 8 * 8
    } else {
        room
    }
}

fn default_range(model: &GroupModel) -> u32 {
    if model.is_su2() {
        24
    } else {
        32
    }
}

pub fn run(a: &CheckArgs) -> CliResult<Outcome> {
    let model: GroupModel = a.group.parse()?;
    let order = a.order.unwrap_or(model.kappa());
    let margin = a
        .checker
        .iter()
        .map(|&c| margin(c, &model, order))
        .max()
        .unwrap_or(0);
    let (data, band, source) = match (&a.symbol, &a.symbol_file) {
        (_, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::config(format!("cannot read symbol file {}: {e}", path.display()))
            })?;
            let data = parse_symbol_file(&text, Some(&model))?;
            let band = data.trusted_band();
            let band = a.band.map_or(band, |b| b.min(band));
            (data, band, format!("file:{}", path.display()))
        }
        (Some(spec), None) => {
            let band = match (a.band, a.range) {
                (Some(b), _) => b,
                (None, Some(r)) => r + margin,
                (None, None) => default_range(&model) + margin,
            };
            (build_symbol(spec, &model, band)?, band, spec.clone())
        }
        (None, None) => {
            return Err(CliError::config(
                "either --symbol or --symbol-file is required",
            ))
        }
    };
    let range = match (a.range, a.band.or(a.symbol_file.as_ref().map(|_| band))) {
        (Some(r), _) => r,
        (None, Some(b)) => derived_range(b.saturating_sub(margin)),
        (None, None) => default_range(&model),
    };
    if band < range + margin {
        return Err(CliError::resolution(format!(
            "band {band} is insufficient for range {range}: the selected checkers need band at least {} (range + margin {margin})",
            range + margin
        )));
    }
    let data = restrict(data, band);
    if let Some(path) = &a.save_symbol {
        write_atomic(path, &format_symbol_file(&data, band))?;
    }
    let mut out = Outcome::default();
    out.push(Record::new(
        "resolved",
        None,
        Resolved {
            group: model.to_string(),
            band,
            range,
            margin,
            source,
        },
    ));
    for &c in &a.checker {
        let report = match c {
            Checker::Mikhlin => check_mikhlin(&data, range, model.kappa()),
            Checker::Refined => check_refined(&data, range),
            Checker::Torus3 => check_torus3(&data, range),
            Checker::SymbolClass => SymbolClassSpec::new(a.m, a.rho, order)
                .and_then(|spec| check_symbol_class(&data, &spec, range)),
        }?;
        out.push(Record::new(
            report.check.clone(),
            Some(report.pass),
            &report,
        ));
    }
    if a.lp_trials > 0 {
        let stats = empirical_lp_ratio(&data, a.lp_p, a.lp_trials, a.lp_band.min(band), a.seed)?;
        out.push(Record::new("lp-ratio", None, &stats));
    }
    Ok(out)
}

fn restrict(data: SymbolData, band: u32) -> SymbolData {
    match data {
        SymbolData::Matrix(s) if s.trusted_band() > band => {
            SymbolData::Matrix(s.restrict(band).with_exact_band(Some(band)))
        }
        other => other,
    }
}
