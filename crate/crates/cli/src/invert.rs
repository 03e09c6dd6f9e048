use clap::Args;
use liemult_core::vf_inverse::{
    exceptional_set, invert_vf_symbol, is_exceptional, recursion_residual, verify_s00,
    VectorFieldSpec,
};
use liemult_core::Error;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::report::{Outcome, Record};
use crate::symbols::{parse_complex, parse_vector, vector3};
use crate::OutputArgs;

#[derive(Args, Debug, Serialize)]
pub struct InvertArgs {
    /// Vector field: `D1|D2|D3` or `x,y,z`.
    #[arg(long, default_value = "D3")]
    pub x: String,

    /// Shift, e.g. `1`, `0.5i`, `1+0.5i`.
    #[arg(long, allow_hyphen_values = true)]
    pub c: String,

    /// Band of the inverse used for the recursion residuals.
    #[arg(long, default_value_t = 12)]
    pub band: u32,

    /// Range of the S⁰₀ check.
    #[arg(long, default_value_t = 40)]
    pub range: u32,

    /// Radius of the listed part of the exceptional set.
    #[arg(long, default_value_t = 2.0)]
    pub bound: f64,

    /// Also check the difference recursion of the inverse.
    #[arg(long)]
    pub recursion_check: bool,

    /// Largest admissible recursion residual.
    #[arg(long, default_value_t = 1e-9)]
    pub recursion_tol: f64,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Serialize)]
struct ExceptionalListing {
    bound: f64,
    /// `[re, im]` pairs.
    points: Vec<[f64; 2]>,
    c: [f64; 2],
    c_exceptional: bool,
}

#[derive(Debug, Serialize)]
struct Recursion {
    band: u32,
    tolerance: f64,
    /// Residuals for `j = 0, 1`.
    residuals: Vec<liemult_core::vf_inverse::RecursionResidual>,
    max: f64,
}

pub fn run(a: &InvertArgs) -> CliResult<Outcome> {
    let x = VectorFieldSpec::new(vector3(&parse_vector(&a.x, 3)?))?;
    let c = parse_complex(&a.c)?;
    if !(a.bound.is_finite() && a.bound >= 0.0) {
        return Err(CliError::config("--bound must be finite and non-negative"));
    }
    if is_exceptional(&x, c) {
        // go high enough that the offending label is reached
        let top = (2.0 * (c.norm() + 1.0) / x.norm()).ceil() as u32 + 1;
        return Err(match invert_vf_symbol(&x, c, a.band.max(top)) {
            Err(e @ Error::Exceptional { .. }) => e.into(),
            _ => CliError::math(format!(
                "c = {c} is exceptional: ic ∈ (|X|/2)ℤ, that is ic ∈ ½ℤ for normalised X"
            )),
        });
    }
    let mut out = Outcome::default();
    out.push(Record::new(
        "exceptional-set",
        None,
        ExceptionalListing {
            bound: a.bound,
            points: exceptional_set(&x, a.bound)
                .iter()
                .map(|z| [z.re + 0.0, z.im + 0.0])
                .collect(),
            c: [c.re + 0.0, c.im + 0.0],
            c_exceptional: false,
        },
    ));
    let s00 = verify_s00(&x, c, a.range)?;
    out.push(Record::new("s00", Some(s00.pass), &s00));
    if a.recursion_check {
        let residuals = (0..2)
            .map(|j| recursion_residual(&x, c, j, a.band))
            .collect::<liemult_core::Result<Vec<_>>>()?;
        let max = residuals.iter().map(|r| r.max()).fold(0.0, f64::max);
        out.push(Record::new(
            "recursion",
            Some(max < a.recursion_tol),
            Recursion {
                band: a.band,
                tolerance: a.recursion_tol,
                residuals,
                max,
            },
        ));
    }
    Ok(out)
}
