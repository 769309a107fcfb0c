//! Distribution, sample-file and order-grid parsing.

use crate::CliError;
use ctent::{Distribution, EmpiricalSample};
use serde_json::{Map, Value};
use std::path::Path;

/// Build a catalog law from `--dist NAME` and `--param k=v` pairs.
///
/// `uniform` is shorthand for `power_uniform` with `beta = 1`. The keys
/// `scale`, `shift` and `negate` apply the affine map and reflection.
pub fn distribution(name: &str, params: &[String]) -> Result<Distribution, CliError> {
    let mut obj = Map::new();
    let name = match name {
        "uniform" => {
            obj.insert("beta".into(), Value::from(1.0));
            "power_uniform"
        }
        other => other,
    };
    obj.insert("name".into(), Value::from(name));
    for p in params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| CliError::Parse(format!("--param expects k=v, got `{p}`")))?;
        let x: f64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("parameter `{k}` is not a number: `{v}`")))?;
        let value = if k == "negate" { Value::from(x != 0.0) } else { Value::from(x) };
        obj.insert(k.trim().to_string(), value);
    }
    let text = Value::Object(obj).to_string();
    Distribution::from_json(&text).map_err(|e| match e {
        ctent::Error::Domain(msg) if msg.starts_with("invalid distribution description") => CliError::Parse(msg),
        other => CliError::Core(other),
    })
}

/// Read a sample file: one number per line, blank lines and `#` comments skipped.
pub fn sample_file(path: &Path) -> Result<EmpiricalSample, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let x: f64 = body
            .parse()
            .map_err(|_| CliError::Parse(format!("{}:{}: not a number: `{body}`", path.display(), i + 1)))?;
        values.push(x);
    }
    Ok(EmpiricalSample::new(values)?)
}

/// `a:b:n`, `n` equally spaced points from `a` to `b` inclusive.
pub fn grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Parse(format!("grid must look like a:b:n, got `{text}`"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    match n {
        0 => Err(bad()),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive() {
        assert_eq!(grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(grid("2:5:1").unwrap(), vec![2.0]);
        assert!(grid("0:1").is_err());
        assert!(grid("0:1:0").is_err());
    }

    #[test]
    fn uniform_alias_and_affine_keys() {
        let d = distribution("uniform", &["scale=2".into(), "shift=1".into()]).unwrap();
        assert_eq!(d, Distribution::uniform().affine(2.0, 1.0).unwrap());
        let l = distribution("lomax", &["beta=2.5".into()]).unwrap();
        assert_eq!(l, Distribution::lomax(2.5).unwrap());
    }

    #[test]
    fn bad_params_are_parse_errors() {
        assert!(matches!(distribution("lomax", &["beta".into()]), Err(CliError::Parse(_))));
        assert!(matches!(distribution("nosuch", &[]), Err(CliError::Parse(_))));
        assert!(matches!(distribution("lomax", &["beta=-1".into()]), Err(CliError::Core(_))));
    }
}
