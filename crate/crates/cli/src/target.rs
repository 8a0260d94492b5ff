//! Parsing of compile targets, tomography input states and angle literals.

use std::path::Path;

use nvq3_core::algebra::{exp_generator, DensityMatrix3, StateVector3, Unitary3};
use nvq3_core::compiler::DqRotation;
use nvq3_core::io::{self, MatrixFile};
use nvq3_core::random::{haar_u3, random_density, seeded};
use nvq3_core::{Error, Result};

use crate::config::read_text;

/// Parse `1.5`, `pi`, `-pi/4`, `3pi/8`, `0.25*pi` (and `π` for `pi`).
pub fn parse_angle(text: &str) -> Result<f64> {
    let bad = || Error::Argument(format!("cannot parse angle `{text}`"));
    let s = text.trim().replace('π', "pi");
    let value = match s.find("pi") {
        None => s.parse::<f64>().map_err(|_| bad())?,
        Some(i) => {
            let coef = s[..i].trim_end_matches('*');
            let coef = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            let rest = &s[i + 2..];
            let div = match rest.strip_prefix('/') {
                Some(d) => d.parse::<f64>().map_err(|_| bad())?,
                None if rest.is_empty() => 1.0,
                None => return Err(bad()),
            };
            coef * std::f64::consts::PI / div
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Split `name:args` or `name(args)` into the name and its argument list.
fn split_named(text: &str) -> (&str, Vec<&str>) {
    let (name, args) = if let Some((n, a)) = text.split_once(':') {
        (n, a)
    } else if let (Some(open), true) = (text.find('('), text.ends_with(')')) {
        (&text[..open], &text[open + 1..text.len() - 1])
    } else {
        return (text, Vec::new());
    };
    (name, args.split(',').map(str::trim).collect())
}

fn arity(name: &str, args: &[&str], n: usize) -> Result<()> {
    if args.len() == n {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "`{name}` takes {n} argument(s), got {}",
            args.len()
        )))
    }
}

fn parse_seed(s: &str) -> Result<u64> {
    s.parse()
        .map_err(|_| Error::Argument(format!("seed must be an unsigned integer, got `{s}`")))
}

/// A named gate from the built-in set, or a matrix file path.
pub fn parse_target(text: &str, unitarity_tol: f64) -> Result<Unitary3> {
    let (name, args) = split_named(text);
    match name {
        "identity" => {
            arity(name, &args, 0)?;
            Ok(Unitary3::identity())
        }
        "lambda5" | "lambda8" => {
            arity(name, &args, 1)?;
            exp_generator(if name == "lambda5" { 5 } else { 8 }, parse_angle(args[0])?)
        }
        "dq-rotation" => {
            arity(name, &args, 2)?;
            let rot = DqRotation {
                axis: parse_angle(args[0])?,
                angle: parse_angle(args[1])?,
                zero_phase: 0.0,
            };
            Ok(rot.unitary())
        }
        "random" => {
            arity(name, &args, 1)?;
            Unitary3::new(haar_u3(&mut seeded(parse_seed(args[0])?)))
        }
        _ if Path::new(text).exists() => {
            let file: MatrixFile = io::from_json(&read_text(Path::new(text))?)?;
            Unitary3::with_tolerance(file.parity_matrix()?, unitarity_tol)
        }
        _ => Err(Error::Argument(format!(
            "`{text}` is neither a file nor a named gate (identity, lambda5:θ, lambda8:θ, dq-rotation:axis,θ, random:seed)"
        ))),
    }
}

/// A named state (zero, plus, minus, mixed, random:seed) or a density-matrix file.
pub fn parse_state(text: &str) -> Result<DensityMatrix3> {
    let (name, args) = split_named(text);
    match name {
        "zero" | "plus" | "minus" | "mixed" => {
            arity(name, &args, 0)?;
            Ok(match name {
                "zero" => DensityMatrix3::pure(&StateVector3::zero()),
                "plus" => DensityMatrix3::pure(&StateVector3::plus()),
                "minus" => DensityMatrix3::pure(&StateVector3::minus()),
                _ => DensityMatrix3::maximally_mixed(),
            })
        }
        "random" => {
            arity(name, &args, 1)?;
            Ok(random_density(&mut seeded(parse_seed(args[0])?)))
        }
        _ if Path::new(text).exists() => {
            let file: MatrixFile = io::from_json(&read_text(Path::new(text))?)?;
            io::density_from_file(&file)
        }
        _ => Err(Error::Argument(format!(
            "`{text}` is neither a file nor a named state (zero, plus, minus, mixed, random:seed)"
        ))),
    }
}
