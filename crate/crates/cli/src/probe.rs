use clap::Args;
use liemult_core::central::riesz_symbol;
use liemult_core::cz::{
    cz_probe, mollifier_slopes, negative_sobolev_decay, smallest_resolved, MollifierGrid,
    ProbeSymbol, VanishingFactor, CLASS_NODES, MIN_R_SQUARED, SLOPE_TOLERANCE,
};
use liemult_core::harmonic::{cached_grid, GroupModel, IrrepLabel};
use liemult_core::symbol::Elementary;
use liemult_core::Error;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::report::{csv_table, CsvBlock, Outcome, Record};
use crate::symbols::parse_vector;
use crate::OutputArgs;

/// Slack allowed on the mollifier scaling exponents.
pub const MOLLIFIER_SLOPE_TOLERANCE: f64 = 0.15;

#[derive(Args, Debug, Serialize)]
pub struct ProbeArgs {
    /// `su2` or `torus-N`.
    #[arg(long, default_value = "su2")]
    pub group: String,

    /// Nodes of the SU(2) class-angle rule.
    #[arg(long, default_value_t = CLASS_NODES)]
    pub nodes: usize,

    /// Band of a full group grid; required on a torus, and on SU(2) it
    /// replaces the class-angle rule.
    #[arg(long)]
    pub band: Option<u32>,

    /// Scales `r`: a comma list of numbers or `2^-a`, or a range `2^-a..2^-b`.
    #[arg(long, default_value = "2^-4..2^-9")]
    pub ladder: String,

    /// `zero`, `identity` or `riesz:AXIS`.
    #[arg(long, default_value = "riesz:D3")]
    pub symbol: String,

    /// Vanishing factor of the Sobolev decay: `one`, `rho2` or `coef:i,j`
    /// (torus: `coef:j`).
    #[arg(long, default_value = "rho2")]
    pub q: String,

    /// Negative Sobolev order.
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

fn power_of_two(s: &str) -> Option<f64> {
    let e = s.trim().strip_prefix("2^")?;
    e.parse::<i32>().ok().map(|k| 2f64.powi(k))
}

pub fn parse_ladder(s: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::config(format!("bad ladder {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let exp = |t: &str| -> CliResult<i32> {
            t.trim()
                .strip_prefix("2^")
                .and_then(|e| e.parse().ok())
                .ok_or_else(bad)
        };
        let (a, b) = (exp(a)?, exp(b)?);
        let step = if b >= a { 1 } else { -1 };
        let mut out = Vec::new();
        let mut k = a;
        loop {
            out.push(2f64.powi(k));
            if k == b {
                break;
            }
            k += step;
        }
        return Ok(out);
    }
    s.split(',')
        .map(|t| {
            power_of_two(t)
                .or_else(|| t.trim().parse::<f64>().ok())
                .filter(|r| r.is_finite())
                .ok_or_else(bad)
        })
        .collect()
}

fn probe_symbol(spec: &str, grid: &MollifierGrid) -> CliResult<ProbeSymbol> {
    let model = grid.model();
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    match (name, &grid) {
        ("zero", _) => Ok(ProbeSymbol::Zero),
        ("identity", _) => Ok(ProbeSymbol::Identity),
        ("riesz", MollifierGrid::Class { .. }) => {
            Ok(ProbeSymbol::su2_riesz(&parse_vector(arg, 3)?)?)
        }
        ("riesz", MollifierGrid::Group(g)) => {
            let dim = model.torus_dim().unwrap_or(3);
            let z = match (model.torus_dim(), arg.parse::<usize>()) {
                (Some(n), Ok(j)) if (1..=n).contains(&j) => {
                    let mut v = vec![0.0; n];
                    v[j - 1] = 1.0;
                    v
                }
                _ => parse_vector(arg, dim)?,
            };
            Ok(ProbeSymbol::Matrix(riesz_symbol(&model, &z, g.band())?))
        }
        _ => Err(CliError::config(format!(
            "unknown probe symbol {spec:?}; expected zero, identity or riesz:AXIS"
        ))),
    }
}

fn vanishing_factor(spec: &str, model: &GroupModel) -> CliResult<VanishingFactor> {
    let bad = || CliError::config(format!("bad vanishing factor {spec:?}"));
    match spec.split_once(':') {
        None if spec == "one" => Ok(VanishingFactor::One),
        None if spec == "rho2" => Ok(VanishingFactor::RhoSquared),
        Some(("coef", idx)) => {
            let idx: Vec<usize> = idx
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<CliResult<_>>()?;
            let e = match (model.torus_dim(), idx.as_slice()) {
                (None, &[i, j]) => Elementary::new(model, IrrepLabel::Su2(1), i, j)?,
                (Some(n), &[j]) if (1..=n).contains(&j) => {
                    let mut k = vec![0; n];
                    k[j - 1] = 1;
                    Elementary::new(model, IrrepLabel::Torus(k), 0, 0)?
                }
                _ => return Err(bad()),
            };
            Ok(VanishingFactor::Coefficient(e))
        }
        _ => Err(bad()),
    }
}

#[derive(Debug, Serialize)]
struct GridInfo {
    group: String,
    rule: &'static str,
    nodes_or_band: usize,
    spacing: f64,
    smallest_usable_r: f64,
    ladder: Vec<f64>,
}

/// Grid and ladder errors name the smallest scale the grid can take.
fn with_scale<T>(r: liemult_core::Result<T>, smallest: f64) -> CliResult<T> {
    r.map_err(|e| match e {
        Error::LadderTooShort { .. } | Error::Unresolved { .. } => CliError::resolution(format!(
            "{e}; the smallest usable r on this grid is {smallest:e}"
        )),
        other => other.into(),
    })
}

fn within(slope: f64, expected: f64, tol: f64) -> bool {
    (slope - expected).abs() <= tol
}

pub fn run(a: &ProbeArgs) -> CliResult<Outcome> {
    let model: GroupModel = a.group.parse()?;
    let ladder = parse_ladder(&a.ladder)?;
    if ladder.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
        return Err(CliError::config("ladder scales must lie in (0, 1]"));
    }
    let grid = match (model.is_su2(), a.band) {
        (true, None) => {
            if a.nodes < 16 || !a.nodes.is_multiple_of(2) {
                return Err(CliError::config(
                    "--nodes must be an even number of at least 16",
                ));
            }
            MollifierGrid::class(a.nodes)
        }
        (_, Some(b)) => MollifierGrid::Group(cached_grid(&model, b)?),
        (false, None) => return Err(CliError::config("a torus probe needs --band")),
    };
    // ψ_r needs the scale r/2 resolved as well
    let smallest = 2.0 * smallest_resolved(&grid);
    let sigma = probe_symbol(&a.symbol, &grid)?;
    let q = vanishing_factor(&a.q, &model)?;

    let mut out = Outcome::default();
    out.push(Record::new(
        "grid",
        None,
        GridInfo {
            group: model.to_string(),
            rule: match grid {
                MollifierGrid::Class { .. } => "class-angle",
                MollifierGrid::Group(_) => "group",
            },
            nodes_or_band: match &grid {
                MollifierGrid::Class { nodes } => *nodes,
                MollifierGrid::Group(g) => g.band() as usize,
            },
            spacing: grid.spacing(),
            smallest_usable_r: smallest,
            ladder: ladder.clone(),
        },
    ));

    let slopes = with_scale(mollifier_slopes(&grid, &ladder), smallest)?;
    let fits = [
        (&slopes.normalisation, -1.0),
        (&slopes.sup, -1.0),
        (&slopes.phi_l2, -0.5),
        (&slopes.psi_l2, -0.5),
    ];
    let ok = fits.iter().all(|(f, e)| {
        within(f.slope, *e, MOLLIFIER_SLOPE_TOLERANCE) && f.r_squared >= MIN_R_SQUARED
    });
    out.push(Record::new("mollifier-scaling", Some(ok), &slopes));

    let decay = with_scale(negative_sobolev_decay(&grid, &q, a.s, &ladder), smallest)?;
    let ok = within(decay.fit.slope, decay.expected_slope, SLOPE_TOLERANCE) && decay.fit.good();
    out.push(Record::new("negative-sobolev-decay", Some(ok), &decay));

    let probe = with_scale(cz_probe(&grid, &sigma, &ladder), smallest)?;
    out.push(Record::new("kernel-probe", Some(probe.pass), &probe));

    // one row per scale for plotting
    let used = &slopes.normalisation.ladder;
    let pick = |ladder: &[f64], values: &[f64], r: f64| {
        ladder
            .iter()
            .position(|&x| x == r)
            .map_or(f64::NAN, |i| values[i])
    };
    let rows: Vec<Vec<f64>> = used
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            vec![
                r,
                slopes.normalisation.values[i],
                slopes.sup.values[i],
                slopes.phi_l2.values[i],
                slopes.psi_l2.values[i],
                pick(&decay.fit.ladder, &decay.fit.values, r),
                probe
                    .fit
                    .as_ref()
                    .map_or(0.0, |f| pick(&f.ladder, &f.values, r)),
            ]
        })
        .collect();
    out.csv.push(CsvBlock {
        name: "ladder".into(),
        text: csv_table(
            &[
                "r", "c_r", "sup_phi", "phi_l2", "psi_l2", "sobolev", "probe",
            ],
            &rows,
        ),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladders() {
        assert_eq!(parse_ladder("2^-1..2^-3").unwrap(), vec![0.5, 0.25, 0.125]);
        assert_eq!(parse_ladder("0.5, 2^-2").unwrap(), vec![0.5, 0.25]);
        assert!(parse_ladder("2^x..2^-3").is_err());
        assert!(parse_ladder("a").is_err());
    }

    #[test]
    fn factors() {
        let su2 = GroupModel::su2();
        assert_eq!(vanishing_factor("rho2", &su2).unwrap().order(), 2);
        assert_eq!(vanishing_factor("coef:0,1", &su2).unwrap().order(), 1);
        assert!(vanishing_factor("coef:2,0", &su2).is_err());
        let t3 = GroupModel::torus(3).unwrap();
        assert!(vanishing_factor("coef:2", &t3).is_ok());
        assert!(vanishing_factor("coef:4", &t3).is_err());
    }
}
