use std::fs;
use std::path::Path;

use regmean::{Error, Interval, Result};

/// Numbers from a file (when `source` names one) or from an inline list.
/// Commas, semicolons and whitespace separate values; a leading non-numeric
/// line is treated as a header.
pub fn numbers(source: &str) -> Result<Vec<f64>> {
    let path = Path::new(source);
    let text = if path.is_file() {
        fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?
    } else {
        source.to_string()
    };
    parse_numbers(&text)
}

pub fn parse_numbers(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) => values.extend(v),
            Err(_) if i == 0 && values.is_empty() => continue,
            Err(_) => {
                return Err(Error::Configuration(format!(
                    "line {}: cannot read {line:?} as numbers",
                    i + 1
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(Error::Configuration("no numbers in input".into()));
    }
    Ok(values)
}

/// `lo:hi:steps`
pub fn grid(spec: &str) -> Result<(Interval, usize)> {
    let bad = || Error::Configuration(format!("expected lo:hi:steps, got {spec:?}"));
    let (range, steps) = spec.rsplit_once(':').ok_or_else(bad)?;
    let steps: usize = steps.trim().parse().map_err(|_| bad())?;
    if steps < 2 {
        return Err(Error::Configuration("grid needs at least 2 steps".into()));
    }
    Ok((range.parse::<Interval>()?, steps))
}
