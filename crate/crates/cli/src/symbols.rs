//! Named symbol builders, torus expressions and the plain-text symbol file.
//!
//! A symbol file starts with two header lines, `group <model>` and
//! `band <N>`, followed by one record per label:
//!
//! ```text
//! <label> <d> re im re im ...
//! ```
//!
//! with the `d²` entries in row-major order. Blank lines and lines starting
//! with `#` are ignored. Values are trusted up to the declared band.

use std::fmt::Write as _;
use std::str::FromStr;

use liemult_core::central::riesz_symbol;
use liemult_core::harmonic::{casimir_lambda, GroupModel, IrrepLabel};
use liemult_core::linalg::CMatrix;
use liemult_core::symbol::{MatrixSymbol, SymbolData, TorusArray};
use liemult_core::vf_inverse::{invert_vf_symbol, VectorFieldSpec};
use num_complex::Complex64;

use crate::error::{CliError, CliResult};
use crate::expr::Expr;

pub const BUILDERS: [&str; 3] = ["riesz", "laplacian-function", "vf-inverse"];

/// `D1|D2|D3` or `x,y,z`.
pub fn parse_vector(s: &str, dim: usize) -> CliResult<Vec<f64>> {
    if let Some(j) = s.strip_prefix('D') {
        if let Ok(j) = j.parse::<usize>() {
            if (1..=dim).contains(&j) {
                let mut v = vec![0.0; dim];
                v[j - 1] = 1.0;
                return Ok(v);
            }
        }
        return Err(CliError::config(format!("unknown direction {s:?}")));
    }
    let v: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if v.len() == dim && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(CliError::config(format!(
            "expected D1..D{dim} or {dim} comma separated numbers, got {s:?}"
        ))),
    }
}

/// Complex numbers written as `1`, `-0.5i`, `1+0.5i` or `i`.
pub fn parse_complex(s: &str) -> CliResult<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let fixed = match t.as_str() {
        "i" | "+i" => "1i".to_string(),
        "-i" => "-1i".to_string(),
        _ => t.replace("+i", "+1i").replace("-i", "-1i"),
    };
    Complex64::from_str(&fixed)
        .ok()
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .ok_or_else(|| CliError::config(format!("bad complex number {s:?}")))
}

/// Value with a removable `0/0` at the origin set to zero.
fn finite_or_origin(v: Complex64, at_origin: bool, what: &str) -> CliResult<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else if at_origin {
        Ok(Complex64::new(0.0, 0.0))
    } else {
        Err(CliError::math(format!("symbol is not finite at {what}")))
    }
}

fn torus_array<F>(dim: usize, band: u32, f: F) -> CliResult<TorusArray>
where
    F: Fn(&[i64]) -> Complex64 + Sync,
{
    let arr = TorusArray::from_fn(dim, band, |k| {
        let v = f(k);
        if v.re.is_finite() && v.im.is_finite() {
            v
        } else if k.iter().all(|&x| x == 0) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(f64::NAN, 0.0)
        }
    });
    if let Some(idx) = arr.values().iter().position(|v| v.re.is_nan()) {
        return Err(CliError::math(format!(
            "symbol is not finite at k = {:?}",
            arr.freq(idx)
        )));
    }
    Ok(arr)
}

/// Builds `name:arg` or, on a torus, a plain expression in `k1..kn`.
pub fn build_symbol(spec: &str, model: &GroupModel, band: u32) -> CliResult<SymbolData> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), a.trim()),
        None => (spec.trim(), ""),
    };
    match name {
        "riesz" => riesz(model, arg, band),
        "laplacian-function" => laplacian_function(model, arg, band),
        "vf-inverse" => vf_inverse(model, arg, band),
        _ if spec.contains(':') || model.is_su2() => Err(CliError::config(format!(
            "unknown symbol builder {name:?}; expected one of {}{}",
            BUILDERS.join(", "),
            if model.is_su2() {
                ""
            } else {
                " or a torus expression"
            }
        ))),
        _ => {
            let dim = model.torus_dim().unwrap();
            let e = Expr::torus(spec, dim)
                .map_err(|m| CliError::config(format!("torus expression {spec:?}: {m}")))?;
            Ok(torus_array(dim, band, |k| e.eval_freq(k))?.into())
        }
    }
}

fn riesz(model: &GroupModel, arg: &str, band: u32) -> CliResult<SymbolData> {
    match model.torus_dim() {
        None => {
            let z = parse_vector(arg, 3)?;
            Ok(riesz_symbol(model, &z, band)?
                .with_exact_band(Some(band))
                .into())
        }
        Some(dim) => {
            // riesz:j picks the j-th axis
            let z = match arg.parse::<usize>() {
                Ok(j) if (1..=dim).contains(&j) => {
                    let mut v = vec![0.0; dim];
                    v[j - 1] = 1.0;
                    v
                }
                _ => parse_vector(arg, dim)?,
            };
            let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(liemult_core::Error::NotNormalised { norm }.into());
            }
            // i k·z/|k|, matching the matrix-symbol construction
            Ok(torus_array(dim, band, |k| {
                let n = k.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
                let dot: f64 = k.iter().zip(&z).map(|(&a, b)| a as f64 * b).sum();
                Complex64::new(0.0, dot / n)
            })?
            .into())
        }
    }
}

fn laplacian_function(model: &GroupModel, arg: &str, band: u32) -> CliResult<SymbolData> {
    let e = Expr::scalar(arg, "lambda")
        .map_err(|m| CliError::config(format!("laplacian-function {arg:?}: {m}")))?;
    match model.torus_dim() {
        None => {
            let mut entries = Vec::new();
            for tj in 0..=band {
                let l = IrrepLabel::Su2(tj);
                let v = finite_or_origin(
                    e.eval(&[casimir_lambda(&l)]),
                    tj == 0,
                    &format!("label {tj}"),
                )?;
                entries.push(v);
            }
            Ok(MatrixSymbol::scalar_fn(model, band, |l| entries[l.band() as usize]).into())
        }
        Some(dim) => Ok(torus_array(dim, band, |k| {
            e.eval(&[casimir_lambda(&IrrepLabel::Torus(k.to_vec()))])
        })?
        .into()),
    }
}

fn vf_inverse(model: &GroupModel, arg: &str, band: u32) -> CliResult<SymbolData> {
    if !model.is_su2() {
        return Err(CliError::config("vf-inverse is only available on su2"));
    }
    let (x, c) = arg
        .split_once(';')
        .ok_or_else(|| CliError::config(format!("vf-inverse expects X;c, got {arg:?}")))?;
    let x = VectorFieldSpec::new(vector3(&parse_vector(x.trim(), 3)?))?;
    let c = parse_complex(c)?;
    Ok(invert_vf_symbol(&x, c, band)?.into())
}

pub fn vector3(v: &[f64]) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

/// Writes the symbol file text for `sigma`, trusted up to `band`.
pub fn format_symbol_file(data: &SymbolData, band: u32) -> String {
    let sigma = data.to_matrix().restrict(band);
    let mut out = String::new();
    let _ = writeln!(out, "group {}", sigma.model());
    let _ = writeln!(out, "band {band}");
    for (label, m) in sigma.iter() {
        let d = label.dimension();
        let _ = write!(out, "{label} {d}");
        for i in 0..d {
            for j in 0..d {
                let z = m[(i, j)];
                let _ = write!(out, " {} {}", z.re, z.im);
            }
        }
        out.push('\n');
    }
    out
}

fn header<'a>(line: Option<(usize, &'a str)>, key: &str) -> CliResult<&'a str> {
    let (no, line) =
        line.ok_or_else(|| CliError::config(format!("symbol file: missing {key} header")))?;
    match line.split_once(char::is_whitespace) {
        Some((k, v)) if k == key => Ok(v.trim()),
        _ => Err(CliError::config(format!(
            "symbol file line {}: expected `{key} ...`",
            no + 1
        ))),
    }
}

/// Parses a symbol file; the model must match `expected` when given.
pub fn parse_symbol_file(text: &str, expected: Option<&GroupModel>) -> CliResult<SymbolData> {
    let bad = |no: usize, m: String| CliError::config(format!("symbol file line {}: {m}", no + 1));
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let model = GroupModel::from_str(header(lines.next(), "group")?)
        .map_err(|e| CliError::config(format!("symbol file: {e}")))?;
    if let Some(exp) = expected {
        if exp != &model {
            return Err(CliError::config(format!(
                "symbol file is for {model}, but the run uses {exp}"
            )));
        }
    }
    let band: u32 = header(lines.next(), "band")?
        .parse()
        .map_err(|_| CliError::config("symbol file: band must be a non-negative integer"))?;
    let mut sigma = MatrixSymbol::zero(&model);
    for (no, line) in lines {
        let mut parts = line.split_whitespace();
        let label = IrrepLabel::parse_for(&model, parts.next().unwrap_or_default())
            .map_err(|e| bad(no, e.to_string()))?;
        if label.band() > band {
            return Err(bad(no, format!("label {label} lies beyond band {band}")));
        }
        let d: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad(no, "missing dimension".into()))?;
        if d != label.dimension() {
            return Err(bad(
                no,
                format!("label {label} has dimension {}, not {d}", label.dimension()),
            ));
        }
        let nums: Result<Vec<f64>, _> = parts.map(str::parse::<f64>).collect();
        let nums = nums.map_err(|_| bad(no, "entries must be decimal numbers".into()))?;
        if nums.len() != 2 * d * d {
            return Err(bad(
                no,
                format!("expected {} numbers, found {}", 2 * d * d, nums.len()),
            ));
        }
        if nums.iter().any(|x| !x.is_finite()) {
            return Err(bad(no, "entries must be finite".into()));
        }
        if sigma.get(&label).is_some() {
            return Err(bad(no, format!("label {label} appears twice")));
        }
        let m = CMatrix::from_fn(d, d, |i, j| {
            Complex64::new(nums[2 * (i * d + j)], nums[2 * (i * d + j) + 1])
        });
        sigma.insert(label, m).map_err(|e| bad(no, e.to_string()))?;
    }
    Ok(sigma.with_exact_band(Some(band)).into())
}
