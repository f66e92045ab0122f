//! Plain-text configuration format: `[section]` headers and `key = value`
//! lines, `#` comments. Values are bare words/numbers, quoted strings for
//! expressions, and `;`/whitespace-separated rational matrices.

use std::collections::BTreeMap;
use std::fmt;

use gradecalc_core::linalg::SparseMat;
use gradecalc_core::ring::RingSpec;
use gradecalc_core::scalar::Scalar;

use num_bigint::BigInt;
use num_traits::One;

#[derive(Debug)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error at line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn cerr(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

/// Parsed configuration: per-section key/value maps, with source line numbers
/// for error reporting.
#[derive(Debug, Default)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, (String, usize)>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut sections: BTreeMap<String, BTreeMap<String, (String, usize)>> = BTreeMap::new();
        let mut current = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            // strip the first '#' that sits outside of quotes
            let mut in_quotes = false;
            let mut cut = raw.len();
            for (pos, ch) in raw.char_indices() {
                match ch {
                    '"' => in_quotes = !in_quotes,
                    '#' if !in_quotes => {
                        cut = pos;
                        break;
                    }
                    _ => {}
                }
            }
            let line = raw[..cut].trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else {
                    return Err(cerr(line_no, "unterminated section header"));
                };
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let Some(eq) = line.find('=') else {
                return Err(cerr(line_no, "expected `key = value`"));
            };
            if current.is_empty() {
                return Err(cerr(line_no, "key outside of any [section]"));
            }
            let key = line[..eq].trim().to_string();
            let mut value = line[eq + 1..].trim().to_string();
            if value.starts_with('"') && value.ends_with('"') && value.len() >= 2 {
                value = value[1..value.len() - 1].to_string();
            }
            sections
                .get_mut(&current)
                .expect("section exists")
                .insert(key, (value, line_no));
        }
        Ok(Config { sections })
    }

    pub fn section_keys(&self, section: &str) -> Vec<String> {
        self.sections
            .get(section)
            .map(|m| m.keys().cloned().collect())
            .unwrap_or_default()
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|m| m.get(key))
            .map(|(v, _)| v.as_str())
    }

    fn line_of(&self, section: &str, key: &str) -> usize {
        self.sections
            .get(section)
            .and_then(|m| m.get(key))
            .map(|(_, l)| *l)
            .unwrap_or(0)
    }

    pub fn require(&self, section: &str, key: &str) -> Result<&str, ConfigError> {
        self.get(section, key)
            .ok_or_else(|| cerr(0, format!("missing required key `{key}` in [{section}]")))
    }

    pub fn get_usize(&self, section: &str, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v.parse::<usize>().map(Some).map_err(|_| {
                cerr(
                    self.line_of(section, key),
                    format!("`{key}` must be a non-negative integer; got `{v}`"),
                )
            }),
        }
    }

    pub fn get_i64(&self, section: &str, key: &str) -> Result<Option<i64>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v.parse::<i64>().map(Some).map_err(|_| {
                cerr(
                    self.line_of(section, key),
                    format!("`{key}` must be an integer; got `{v}`"),
                )
            }),
        }
    }

    pub fn get_bool(&self, section: &str, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some("true") => Ok(Some(true)),
            Some("false") => Ok(Some(false)),
            Some(v) => Err(cerr(
                self.line_of(section, key),
                format!("`{key}` must be true or false; got `{v}`"),
            )),
        }
    }

    /// Builds the ring from the `[ring]` section, with CLI overrides for the
    /// truncation bound.
    pub fn ring(&self, trunc_override: Option<u32>) -> Result<RingSpec, ConfigError> {
        let n_even = self.get_usize("ring", "n_even")?.unwrap_or(0);
        let n_odd = self.get_usize("ring", "n_odd")?.unwrap_or(0);
        let even_weight = self.get_usize("ring", "even_weight")?.unwrap_or(2) as u32;
        let odd_weight = self.get_usize("ring", "odd_weight")?.unwrap_or(1) as u32;
        let trunc = trunc_override
            .or(self.get_usize("ring", "trunc")?.map(|t| t as u32))
            .unwrap_or(8);
        RingSpec::with_uniform_weights(n_even, n_odd, even_weight, odd_weight, trunc)
            .map_err(|e| cerr(0, e.to_string()))
    }

    pub fn laurent(&self) -> Result<bool, ConfigError> {
        Ok(self.get_bool("ring", "laurent")?.unwrap_or(false))
    }

    /// Records the task chosen on the command line. A `[task] kind` already
    /// present in the config must agree: exactly one task per invocation.
    pub fn select_task(&mut self, task: &str) -> Result<(), ConfigError> {
        if let Some(existing) = self.get("task", "kind") {
            if existing != task {
                return Err(cerr(
                    self.line_of("task", "kind"),
                    format!(
                        "config declares task `{existing}` but the command line asked for `{task}`"
                    ),
                ));
            }
            return Ok(());
        }
        self.sections
            .entry("task".into())
            .or_default()
            .insert("kind".into(), (task.to_string(), 0));
        Ok(())
    }
}

/// Parses a rational number `p` or `p/q`.
pub fn parse_scalar(text: &str) -> Result<Scalar, String> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| format!("bad rational `{t}`"))?;
        let d: BigInt = d.trim().parse().map_err(|_| format!("bad rational `{t}`"))?;
        if d == BigInt::from(0) {
            return Err(format!("zero denominator in `{t}`"));
        }
        Ok(Scalar::new(n, d))
    } else {
        let n: BigInt = t.parse().map_err(|_| format!("bad integer `{t}`"))?;
        Ok(Scalar::new(n, BigInt::one()))
    }
}

/// Parses a rational vector: whitespace- or comma-separated entries.
pub fn parse_vector(text: &str) -> Result<Vec<Scalar>, String> {
    text.split(|ch: char| ch.is_whitespace() || ch == ',')
        .filter(|s| !s.is_empty())
        .map(parse_scalar)
        .collect()
}

/// Parses a rational matrix: rows separated by `;`, entries by whitespace or
/// commas.
pub fn parse_matrix(text: &str) -> Result<SparseMat, String> {
    let rows: Vec<Vec<Scalar>> = text
        .split(';')
        .map(parse_vector)
        .collect::<Result<_, _>>()?;
    let rows: Vec<Vec<Scalar>> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    if rows.is_empty() {
        return Ok(SparseMat::zero(0, 0));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err("ragged matrix".into());
    }
    Ok(SparseMat::from_dense(&rows))
}
