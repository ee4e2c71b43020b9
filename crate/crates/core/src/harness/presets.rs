//! Named attractors used in the experiments.
//!
//! Names take an optional parenthesised parameter, e.g. `cantor(1/3)` or
//! `cantor-dust(0.2501)`. Parameters may be decimals or simple fractions.

use std::f64::consts::{FRAC_PI_6, SQRT_2};

use crate::error::{Error, Result};
use crate::ifs::{Attractor, Similarity};

/// Catalogue entry for a preset.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PresetInfo {
    pub name: &'static str,
    pub syntax: &'static str,
    pub description: &'static str,
}

pub const PRESETS: &[PresetInfo] = &[
    PresetInfo {
        name: "cantor",
        syntax: "cantor(rho)",
        description: "Cantor set in [0,1], maps rho*x and rho*x + 1 - rho, 0 < rho <= 1/2 (default 1/3)",
    },
    PresetInfo {
        name: "interval",
        syntax: "interval",
        description: "[0,1] as the attractor of x/2 and x/2 + 1/2",
    },
    PresetInfo {
        name: "cantor-dust",
        syntax: "cantor-dust(rho)",
        description: "Cantor dust in [0,1]^2 with four corner maps, 0 < rho < 1/2 (default 1/3); alias table1-I",
    },
    PresetInfo {
        name: "table1-II",
        syntax: "table1-II",
        description: "four maps with ratio 0.41 towards the vertices and centre of a triangle; disjoint, hull-touching",
    },
    PresetInfo {
        name: "table1-III",
        syntax: "table1-III",
        description: "Cantor dust rho=1/3 plus s5 = x/27 + (4/27, 4/27); non-uniform",
    },
    PresetInfo {
        name: "vicsek",
        syntax: "vicsek",
        description: "Vicsek fractal: Cantor dust rho=1/3 plus the centre map; not disjoint; alias table1-IV",
    },
    PresetInfo {
        name: "koch-snowflake",
        syntax: "koch-snowflake",
        description: "Koch snowflake as a seven-map non-uniform IFS with d = 2",
    },
    PresetInfo {
        name: "fig3-cantor",
        syntax: "fig3-cantor",
        description: "non-uniform Cantor set with maps x/2 and x/4 + 3/4",
    },
    PresetInfo {
        name: "eq62-nonuniform",
        syntax: "eq62-nonuniform",
        description: "hull-disjoint non-uniform planar IFS with ratios 1/4, 1/4, 1/4, 1/2 and quarter turns",
    },
];

fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::invalid(format!("cannot parse preset parameter '{s}'"));
    if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        return Ok(a / b);
    }
    s.parse().map_err(|_| bad())
}

fn split_name(spec: &str) -> Result<(&str, Option<f64>)> {
    let spec = spec.trim();
    match spec.split_once('(') {
        None => Ok((spec, None)),
        Some((name, rest)) => {
            let arg = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::invalid(format!("unbalanced parentheses in preset '{spec}'")))?;
            Ok((name.trim(), Some(parse_number(arg)?)))
        }
    }
}

fn no_param(name: &str, param: Option<f64>) -> Result<()> {
    match param {
        Some(_) => Err(Error::invalid(format!("preset '{name}' takes no parameter"))),
        None => Ok(()),
    }
}

/// Builds a preset attractor from its name.
pub fn preset(spec: &str) -> Result<Attractor> {
    let (name, param) = split_name(spec)?;
    match name {
        "cantor" => {
            let rho = param.unwrap_or(1.0 / 3.0);
            if !(rho > 0.0 && rho <= 0.5) {
                return Err(Error::invalid(format!("cantor needs 0 < rho <= 1/2, got {rho}")));
            }
            cantor(rho)
        }
        "interval" => {
            no_param(name, param)?;
            cantor(0.5)
        }
        "cantor-dust" | "table1-I" => {
            let rho = param.unwrap_or(1.0 / 3.0);
            if !(rho > 0.0 && rho < 0.5) {
                return Err(Error::invalid(format!("cantor-dust needs 0 < rho < 1/2, got {rho}")));
            }
            Attractor::new(dust_maps(rho)?, 2, None, Some(SQRT_2))
        }
        "table1-II" => {
            no_param(name, param)?;
            let rho = 0.41;
            let s = 1.0 - rho;
            let shifts = [
                [0.0, 0.0],
                [s, 0.0],
                [0.5 * s, 0.5 * 3f64.sqrt() * s],
                [0.5 * s, s / (2.0 * 3f64.sqrt())],
            ];
            let maps = shifts
                .iter()
                .map(|&b| Similarity::plane_scaling(rho, b))
                .collect::<Result<Vec<_>>>()?;
            Attractor::new(maps, 2, None, Some(1.0))
        }
        "table1-III" => {
            no_param(name, param)?;
            let mut maps = dust_maps(1.0 / 3.0)?;
            maps.push(Similarity::plane_scaling(1.0 / 27.0, [4.0 / 27.0, 4.0 / 27.0])?);
            Attractor::new(maps, 2, None, Some(SQRT_2))
        }
        "vicsek" | "table1-IV" => {
            no_param(name, param)?;
            let rho = 1.0 / 3.0;
            let mut maps = dust_maps(rho)?;
            maps.push(Similarity::plane_scaling(rho, [rho, rho])?);
            Attractor::new(maps, 2, None, Some(SQRT_2))
        }
        "koch-snowflake" => {
            no_param(name, param)?;
            let mut maps = Vec::with_capacity(7);
            for m in 1..=6 {
                let alpha = (2 * m - 1) as f64 * FRAC_PI_6;
                maps.push(Similarity::plane_scaling(
                    1.0 / 3.0,
                    [2.0 / 3.0 * alpha.cos(), 2.0 / 3.0 * alpha.sin()],
                )?);
            }
            let (s, c) = FRAC_PI_6.sin_cos();
            maps.push(Similarity::plane(1.0 / 3f64.sqrt(), [[c, -s], [s, c]], [0.0, 0.0])?);
            Attractor::new(maps, 2, None, Some(2.0))
        }
        "fig3-cantor" => {
            no_param(name, param)?;
            let maps = vec![Similarity::line(0.5, 1.0, 0.0)?, Similarity::line(0.25, 1.0, 0.75)?];
            Attractor::new(maps, 1, None, Some(1.0))
        }
        "eq62-nonuniform" => {
            no_param(name, param)?;
            let a = [[0.0, -1.0], [1.0, 0.0]];
            let maps = vec![
                Similarity::plane_scaling(0.25, [0.0, 0.0])?,
                Similarity::plane(0.25, a, [0.75, 0.0])?,
                Similarity::plane(0.25, a, [0.0, 0.75])?,
                Similarity::plane_scaling(0.5, [0.5, 0.5])?,
            ];
            Attractor::new(maps, 2, None, Some(SQRT_2))
        }
        _ => Err(Error::invalid(format!("unknown preset '{spec}'"))),
    }
}

fn cantor(rho: f64) -> Result<Attractor> {
    let maps = vec![Similarity::line(rho, 1.0, 0.0)?, Similarity::line(rho, 1.0, 1.0 - rho)?];
    Attractor::new(maps, 1, None, Some(1.0))
}

fn dust_maps(rho: f64) -> Result<Vec<Similarity>> {
    let s = 1.0 - rho;
    [[0.0, s], [s, s], [0.0, 0.0], [s, 0.0]]
        .iter()
        .map(|&b| Similarity::plane_scaling(rho, b))
        .collect()
}
