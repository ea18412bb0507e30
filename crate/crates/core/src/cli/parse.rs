//! Parsers for the compact command-line notations.

use std::collections::BTreeMap;

use crate::harness::TestKind;
use crate::orlicz::YoungSpec;
use crate::profile::Profile;
use crate::quadrature::Grid;
use crate::rearrange::{decreasing_rearrangement, SampledFunction};
use crate::ri_norms::SpaceDescriptor;

/// `name:key=value,key=value` split into the name and its parameters.
fn keyed(s: &str) -> Result<(String, BTreeMap<String, f64>), String> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut params = BTreeMap::new();
    for kv in rest.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| format!("expected key=value in '{kv}'"))?;
        params.insert(k.trim().to_string(), parse_real(v)?);
    }
    Ok((name.trim().to_string(), params))
}

pub fn parse_real(s: &str) -> Result<f64, String> {
    crate::ext_real::parse(s.trim()).ok_or_else(|| format!("not a real number: '{s}'"))
}

fn get(params: &BTreeMap<String, f64>, key: &str, default: Option<f64>) -> Result<f64, String> {
    params
        .get(key)
        .copied()
        .or(default)
        .ok_or_else(|| format!("missing parameter '{key}'"))
}

/// `v@w;v@w;…`: values with their measures.
pub fn parse_atoms(s: &str) -> Result<SampledFunction, String> {
    let atoms = s
        .split(';')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|a| {
            let (v, w) = a.split_once('@').ok_or_else(|| format!("expected value@measure, got '{a}'"))?;
            Ok((parse_real(v)?, parse_real(w)?))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let f = SampledFunction::new(atoms);
    f.validate().map_err(|e| e.to_string())?;
    Ok(f)
}

/// `indicator:a=4[,c=1]`, `exp:c=1,rate=2`, `power:c=1,power=-0.5,a=1`,
/// `atoms:v@w;…` or `zero`.
pub fn parse_profile(s: &str) -> Result<Profile, String> {
    if let Some(rest) = s.strip_prefix("atoms:") {
        return Ok(Profile::Step(decreasing_rearrangement(&parse_atoms(rest)?)));
    }
    let (name, p) = keyed(s)?;
    let prof = match name.as_str() {
        "zero" => Profile::zero(),
        "indicator" => {
            let (a, c) = (get(&p, "a", None)?, get(&p, "c", Some(1.0))?);
            if !(a >= 0.0) {
                return Err("indicator needs a ≥ 0".into());
            }
            Profile::indicator_scaled(a, c)
        }
        "exp" => Profile::exp_decay(get(&p, "c", Some(1.0))?, get(&p, "rate", Some(1.0))?),
        "power" => Profile::power_on(get(&p, "c", Some(1.0))?, get(&p, "power", None)?, get(&p, "a", Some(1.0))?),
        other => return Err(format!("unknown profile kind '{other}'")),
    };
    Ok(prof)
}

/// A space descriptor in its JSON form.
pub fn parse_space(s: &str) -> Result<SpaceDescriptor, String> {
    let d: SpaceDescriptor = serde_json::from_str(s).map_err(|e| format!("invalid space descriptor: {e}"))?;
    Ok(d)
}

/// JSON Young function, or `power:p=2`, `power-log:p=1,b=1`, `linear-then-power:p=4`,
/// `exp:gamma=1[,double=1]`, `linfty`.
pub fn parse_young(s: &str) -> Result<YoungSpec, String> {
    if s.trim_start().starts_with('{') {
        return serde_json::from_str(s).map_err(|e| format!("invalid Young function: {e}"));
    }
    let (name, p) = keyed(s)?;
    Ok(match name.as_str() {
        "power" => YoungSpec::power(get(&p, "p", None)?),
        "power-log" => YoungSpec::power_log(get(&p, "p", None)?, get(&p, "b", Some(0.0))?),
        "linear-then-power" => YoungSpec::linear_then_power(get(&p, "p", None)?),
        "exp" => YoungSpec::exp_growth(get(&p, "gamma", Some(1.0))?, get(&p, "double", Some(0.0))? != 0.0),
        "linfty" => YoungSpec::Linfty,
        other => return Err(format!("unknown Young function '{other}'")),
    })
}

/// `gaussian`, `power-decay:beta=3`, `plateau:radius=1,ramp=1`, `affine-plus-gaussian`, `constant`.
pub fn parse_kind(s: &str) -> Result<TestKind, String> {
    let (name, p) = keyed(s)?;
    Ok(match name.as_str() {
        "gaussian" => TestKind::Gaussian,
        "constant" => TestKind::Constant,
        "affine-plus-gaussian" => TestKind::AffinePlusGaussian,
        "power-decay" => TestKind::PowerDecay {
            beta: get(&p, "beta", None)?,
        },
        "plateau" => TestKind::Plateau {
            radius: get(&p, "radius", Some(1.0))?,
            ramp: get(&p, "ramp", Some(1.0))?,
        },
        other => return Err(format!("unknown test function '{other}'")),
    })
}

/// `t_min,t_max,nodes_per_decade`.
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("grid needs t_min,t_max,nodes_per_decade, got '{s}'"));
    }
    let npd: usize = parts[2]
        .parse()
        .map_err(|_| format!("nodes_per_decade must be a positive integer, got '{}'", parts[2]))?;
    Grid::new(parse_real(parts[0])?, parse_real(parts[1])?, npd).map_err(|e| e.to_string())
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(parse_real).collect()
}
