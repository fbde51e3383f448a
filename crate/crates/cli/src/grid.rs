//! Parameter grids and the `key=value` scan configuration file.

use std::fmt;
use std::str::FromStr;

/// Inclusive arithmetic grid `start:stop:step`, evaluated as
/// `start + k·step` so that no error accumulates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| self.start + k as f64 * self.step)
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(format!("expected start:stop:step, got '{s}'"));
        };
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
        let grid = Grid {
            start: parse(a)?,
            stop: parse(b)?,
            step: parse(c)?,
        };
        if !(grid.start.is_finite() && grid.stop.is_finite() && grid.step.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        if !(grid.step > 0.0) {
            return Err("grid step must be > 0".into());
        }
        if !(grid.start < grid.stop) {
            return Err("grid start must be < stop".into());
        }
        if !(grid.start > 0.0) {
            return Err("grid values must be > 0".into());
        }
        Ok(grid)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

/// Splice `key=value` lines from the file named by `--config` into the
/// argument list. Flags already given on the command line win; `true`
/// turns a boolean flag on and `false` leaves it off.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if a == "--config" {
            path = args.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text =
        std::fs::read_to_string(&path).map_err(|e| format!("cannot read config '{path}': {e}"))?;
    let mut out = args;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", lineno + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(format!(
                "{path}:{}: nested config files are not supported",
                lineno + 1
            ));
        }
        let flag = format!("--{key}");
        let present = out
            .iter()
            .any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if present {
            continue;
        }
        match value {
            "true" => out.push(flag),
            "false" => {}
            v => out.push(format!("{flag}={v}")),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_grid() {
        let g: Grid = "0.1:30:0.1".parse().unwrap();
        let v = g.values();
        assert_eq!(v.len(), 300);
        assert!((v[299] - 30.0).abs() < 1e-12);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_bad_grids() {
        for s in ["1:0:0.1", "0:1:0.1", "1:2:0", "1:2", "a:b:c", "1:2:-1"] {
            assert!(s.parse::<Grid>().is_err(), "{s}");
        }
    }

    #[test]
    fn config_lines_fill_missing_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.cfg");
        std::fs::write(
            &path,
            "# scan\nn = 7\nradius_grid=0.1:1:0.1\ncenter=true\nformat=json\n",
        )
        .unwrap();
        let args: Vec<String> = [
            "ringrad",
            "spectrum",
            "--n",
            "9",
            "--config",
            path.to_str().unwrap(),
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let out = expand_config(args).unwrap();
        assert!(out.contains(&"--radius-grid=0.1:1:0.1".to_string()));
        assert!(out.contains(&"--center".to_string()));
        assert!(!out.iter().any(|a| a == "--n=7"));
    }
}
