//! Flat `key = value` configuration with `[plates]`, `[sphere]` and
//! `[tolerances]` sections. Lists are comma separated; `#` starts a comment.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::sweep::{Pipeline, SweepSpec};

const SECTIONS: [&str; 3] = ["plates", "sphere", "tolerances"];

/// Parsed file: section -> key -> raw value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::InvalidConfig(format!("line {}: {msg}", no + 1));
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if !SECTIONS.contains(&name) {
                    return Err(bad(format!("unknown section [{name}]")));
                }
                current = Some(name.to_string());
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| bad(format!("expected key = value, got '{line}'")))?;
            let section = current.clone().ok_or_else(|| bad("key outside of any section".into()))?;
            let entry = sections.entry(section).or_default();
            if entry.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(bad(format!("duplicate key '{}'", k.trim())));
            }
        }
        Ok(Self { sections })
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    /// Writes every recognized key into `spec`, rejecting unknown ones.
    pub fn apply(&self, spec: &mut SweepSpec) -> Result<()> {
        for (section, entries) in &self.sections {
            for (key, value) in entries {
                apply_key(spec, section, key, value)?;
            }
        }
        Ok(())
    }
}

pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|t| parse_f64(key, t)).collect()
}

fn parse_f64(key: &str, t: &str) -> Result<f64> {
    let t = t.trim();
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::InvalidConfig(format!("{key}: '{t}' is not a finite number"))),
    }
}

fn parse_usize(key: &str, t: &str) -> Result<usize> {
    t.trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{key}: '{t}' is not a non-negative integer")))
}

pub fn parse_pipelines(value: &str) -> Result<Vec<Pipeline>> {
    value.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
}

pub fn parse_direction(key: &str, value: &str) -> Result<[f64; 2]> {
    match parse_list(key, value)?.as_slice() {
        &[x, y] => Ok([x, y]),
        _ => Err(Error::InvalidConfig(format!("{key}: expected two components, got '{value}'"))),
    }
}

fn apply_key(spec: &mut SweepSpec, section: &str, key: &str, value: &str) -> Result<()> {
    let name = format!("{section}.{key}");
    match (section, key) {
        ("plates", "a") => spec.plates.a = parse_list(&name, value)?,
        ("plates", "sigma_bar") => spec.plates.sigma_bar = parse_list(&name, value)?,
        ("plates", "ratio") => spec.plates.ratio = parse_list(&name, value)?,
        ("plates", "rapidity") => spec.plates.rapidity = parse_list(&name, value)?,
        ("plates", "direction") => spec.plates.direction = parse_direction(&name, value)?,
        ("sphere", "a") => spec.sphere.a = parse_list(&name, value)?,
        ("sphere", "sigma") => spec.sphere.sigma = parse_list(&name, value)?,
        ("sphere", "ratio") => spec.sphere.ratio = parse_list(&name, value)?,
        ("sphere", "phi") => spec.sphere.phi = parse_list(&name, value)?,
        ("sphere", "l_max") => spec.sphere.l_max = parse_usize(&name, value)?,
        ("tolerances", "quad_tol") => spec.tolerances.oracle.quad_tol = parse_f64(&name, value)?,
        ("tolerances", "k_max_factor") => spec.tolerances.oracle.k_max_factor = parse_f64(&name, value)?,
        ("tolerances", "n_max") => spec.tolerances.oracle.n_max = Some(parse_usize(&name, value)?),
        ("tolerances", "sphere_tol") => spec.tolerances.sphere_tol = parse_f64(&name, value)?,
        ("tolerances", "da") => spec.tolerances.da_rel = parse_f64(&name, value)?,
        ("plates" | "sphere", "pipelines") => {
            // only meaningful for the matching kind of observable
            if (section == "sphere") == spec.observable.is_sphere() {
                spec.pipelines = parse_pipelines(value)?;
            }
        }
        _ => return Err(Error::InvalidConfig(format!("unknown key '{name}'"))),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::sweep::Observable;
    use super::*;

    const SAMPLE: &str = "
# plate grid
[plates]
a = 1, 2
sigma_bar = 0.01,0.005   # two cutoffs
pipelines = closed

[tolerances]
quad_tol = 1e-8
da = 1e-3
";

    #[test]
    fn parses_and_applies() {
        let c = ConfigFile::parse(SAMPLE).unwrap();
        assert_eq!(c.get("plates", "a"), Some("1, 2"));
        let mut spec = SweepSpec::new(Observable::Pressure);
        c.apply(&mut spec).unwrap();
        assert_eq!(spec.plates.a, vec![1.0, 2.0]);
        assert_eq!(spec.plates.sigma_bar, vec![0.01, 0.005]);
        assert_eq!(spec.pipelines, vec![Pipeline::Closed]);
        assert_eq!(spec.tolerances.oracle.quad_tol, 1e-8);
        assert_eq!(spec.tolerances.da_rel, 1e-3);
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["a = 1", "[plates]\na 1", "[nope]", "[plates]\na=1\na=2", "[plates]\nwidth=3"] {
            let parsed = ConfigFile::parse(bad).and_then(|c| c.apply(&mut SweepSpec::new(Observable::Pressure)));
            assert!(matches!(parsed, Err(Error::InvalidConfig(_))), "{bad}");
        }
        assert!(parse_list("x", "1, nan").is_err());
        assert!(parse_direction("d", "1").is_err());
    }

    #[test]
    fn sphere_pipelines_ignored_for_plates() {
        let c = ConfigFile::parse("[sphere]\npipelines = integral").unwrap();
        let mut spec = SweepSpec::new(Observable::Pressure);
        c.apply(&mut spec).unwrap();
        assert_eq!(spec.pipelines, Observable::Pressure.default_pipelines());
    }
}
