use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use weakwave::dynamics1d::Trajectory;

use crate::error::{CliError, CliResult};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Pretty JSON with every float written through [`fmt17`]. Non-finite
/// floats become strings since JSON has no literal for them.
pub fn to_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.push_str(&"  ".repeat(d));
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            out.push_str(&fmt17(x));
        }
        Value::Array(items) if !items.is_empty() => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// A float that may be NaN or infinite, as a JSON value.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(fmt17(x)))
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

pub fn header(scenario: &str, epsilon: f64, mollifier: &str) -> String {
    format!("# scenario={scenario} epsilon={} mollifier={mollifier}\n", fmt17(epsilon))
}

pub fn trajectory_text(t: &Trajectory) -> String {
    let mut s = header(&t.scenario, t.epsilon, &t.mollifier);
    s.push_str("t,phi1,phi2,u1,u2,v1,v2,rho\n");
    for r in &t.records {
        let row = [r.t, r.phi1, r.phi2, r.u1, r.u2, r.v1, r.v2, r.rho].map(fmt17);
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}

pub fn profile_text(head: &str, xs: &[f64], us: &[f64]) -> String {
    let mut s = head.to_string();
    s.push_str("x,u\n");
    for (x, u) in xs.iter().zip(us) {
        let _ = writeln!(s, "{},{}", fmt17(*x), fmt17(*u));
    }
    s
}

/// Parse a profile written by [`profile_text`].
pub fn parse_profile(text: &str) -> Option<(Vec<f64>, Vec<f64>)> {
    let mut xs = Vec::new();
    let mut us = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let (x, u) = line.split_once(',')?;
        xs.push(x.trim().parse().ok()?);
        us.push(u.trim().parse().ok()?);
    }
    Some((xs, us))
}

/// Named file contents, written together or not at all.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    /// Write into a hidden sibling directory, then rename it into place.
    pub fn commit(&self, dir: &Path, force: bool) -> CliResult<()> {
        if dir.exists() {
            let empty = fs::read_dir(dir).map_err(CliError::io(dir))?.next().is_none();
            if !empty && !force {
                return Err(CliError::Config(format!(
                    "output directory {} exists and is not empty (use --force to replace it)",
                    dir.display()
                )));
            }
        }
        let staging = staging_path(dir);
        if staging.exists() {
            fs::remove_dir_all(&staging).map_err(CliError::io(&staging))?;
        }
        let result = self.write_all(&staging).and_then(|()| {
            if dir.exists() {
                fs::remove_dir_all(dir).map_err(CliError::io(dir))?;
            }
            fs::rename(&staging, dir).map_err(CliError::io(dir))
        });
        if result.is_err() {
            let _ = fs::remove_dir_all(&staging);
        }
        result
    }

    fn write_all(&self, root: &Path) -> CliResult<()> {
        fs::create_dir_all(root).map_err(CliError::io(root))?;
        for (name, contents) in &self.files {
            let p = root.join(name);
            fs::write(&p, contents).map_err(CliError::io(&p))?;
        }
        Ok(())
    }
}

fn staging_path(dir: &Path) -> PathBuf {
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    let parent = dir.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    parent.join(format!(".{name}.partial-{}", std::process::id()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 12345.678] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17);
        }
    }

    #[test]
    fn json_uses_full_precision() {
        let v = serde_json::json!({"a": 0.1, "b": [1, 2.5], "c": null});
        let s = to_json(&v);
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("2.5000000000000000e0"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"], v["a"]);
    }

    #[test]
    fn profiles_round_trip() {
        let text = profile_text(&header("triangle", 0.05, "erf"), &[0.0, 0.5], &[1.0, 0.25]);
        let (xs, us) = parse_profile(&text).unwrap();
        assert_eq!(xs, vec![0.0, 0.5]);
        assert_eq!(us, vec![1.0, 0.25]);
    }

    #[test]
    fn failed_commit_leaves_nothing() {
        let tmp = tempfile::tempdir().unwrap();
        let target = tmp.path().join("out");
        let mut a = Artifacts::default();
        a.add("ok.txt", "x".into());
        a.add("sub/missing/parent.txt", "y".into());
        assert!(a.commit(&target, false).is_err());
        assert!(!target.exists());
        assert_eq!(std::fs::read_dir(tmp.path()).unwrap().count(), 0);
    }
}
