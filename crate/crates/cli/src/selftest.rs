use clap::Args;
use liemult_core::harmonic::{fourier_selftest, GroupModel};
use serde::Serialize;

use crate::error::CliResult;
use crate::report::{Outcome, Record};
use crate::OutputArgs;

#[derive(Args, Debug, Serialize)]
pub struct SelftestArgs {
    /// Band of the SU(2) test.
    #[arg(long, default_value_t = 8)]
    pub su2_band: u32,

    /// Band of the torus-3 test.
    #[arg(long, default_value_t = 16)]
    pub torus_band: u32,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

pub fn run(a: &SelftestArgs) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    for (model, band) in [
        (GroupModel::su2(), a.su2_band),
        (GroupModel::torus(3)?, a.torus_band),
    ] {
        let t = fourier_selftest(&model, band, a.seed)?;
        out.push(Record::new(
            format!("fourier-selftest {model}"),
            Some(t.pass),
            &t,
        ));
    }
    Ok(out)
}
