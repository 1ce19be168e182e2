//! Plain-text scenario files.
//!
//! One `key = value` pair per line, `#` starts a comment. Rates carry the
//! suffix `kappa0`, angles `rad`; `n_max` and `motion.k_qbar` are bare
//! numbers. Every key may appear at most once and unknown keys are rejected.
//!
//! ```text
//! name = fig3
//! delta = -125000 kappa0
//! delta_c = -24 kappa0
//! g = 1250 kappa0
//! omega = 12500 kappa0
//! gamma = 0 kappa0
//! kappa = 1 kappa0
//! kx1 = 0 rad
//! kx2 = 3.141592653589793 rad
//! n_max = 15
//! grid = -5 5 201 kappa0
//! outputs = spectrum, steady, coefficients, validity
//! ```
//!
//! Optional keys: `gamma_prime` (a fixed field damping from emission that
//! replaces the value derived from `gamma`), and the four
//! `motion.nu`, `motion.k_qbar`, `motion.phi1`, `motion.phi2`, which must
//! be given together.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use dipole_squeeze::{MotionParams, OmegaGrid, SystemParams};
use thiserror::Error;

pub const RATE_UNIT: &str = "kappa0";
pub const ANGLE_UNIT: &str = "rad";
/// Largest photon cutoff a scenario may request. The dense Liouvillian at
/// this cutoff already takes about 12 GB.
pub const MAX_N_MAX: usize = 40;
/// Upper bound on grid and sweep lengths.
pub const MAX_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("line {line}: `{key}` needs unit `{expected}`, found `{found}`")]
    Unit {
        line: usize,
        key: String,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}: bad value for `{key}`: {reason}")]
    Value {
        line: usize,
        key: String,
        reason: String,
    },
    #[error("motion keys must be given together; missing `{0}`")]
    PartialMotion(&'static str),
    #[error(transparent)]
    Grid(#[from] GridSpecError),
    #[error(transparent)]
    Physics(#[from] dipole_squeeze::Error),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridSpecError {
    #[error("expected `start:stop:count`, got `{0}`")]
    Shape(String),
    #[error("`{0}` is not a finite number")]
    Number(String),
    #[error("`{0}` is not a point count")]
    Count(String),
    #[error("empty range")]
    Empty,
    #[error("range is not strictly increasing")]
    NonMonotone,
    #[error("more than {MAX_POINTS} points")]
    TooLong,
}

/// `count` evenly spaced points from `start` to `stop`, both included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self, GridSpecError> {
        if !start.is_finite() {
            return Err(GridSpecError::Number(start.to_string()));
        }
        if !stop.is_finite() {
            return Err(GridSpecError::Number(stop.to_string()));
        }
        if count == 0 {
            return Err(GridSpecError::Empty);
        }
        if count > MAX_POINTS {
            return Err(GridSpecError::TooLong);
        }
        let ok = if count == 1 { start == stop } else { start < stop };
        if !ok {
            return Err(GridSpecError::NonMonotone);
        }
        Ok(Self { start, stop, count })
    }

    pub fn values(&self) -> Vec<f64> {
        self.to_grid().values().to_vec()
    }

    pub fn to_grid(&self) -> OmegaGrid {
        OmegaGrid::uniform(self.start, self.stop, self.count).expect("validated on construction")
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            start: -5.0,
            stop: 5.0,
            count: 201,
        }
    }
}

impl FromStr for GridSpec {
    type Err = GridSpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(GridSpecError::Shape(s.to_string()));
        };
        Self::new(parse_f64(a)?, parse_f64(b)?, parse_count(n)?)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

/// Sweep values: either `start:stop:count` or an explicit comma-separated
/// list, which must be strictly increasing.
pub fn parse_range(s: &str) -> Result<Vec<f64>, GridSpecError> {
    if s.contains(':') {
        return Ok(s.parse::<GridSpec>()?.values());
    }
    let values = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse_f64)
        .collect::<Result<Vec<_>, _>>()?;
    check_range(&values)?;
    Ok(values)
}

pub fn check_range(values: &[f64]) -> Result<(), GridSpecError> {
    if values.is_empty() {
        return Err(GridSpecError::Empty);
    }
    if values.len() > MAX_POINTS {
        return Err(GridSpecError::TooLong);
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(GridSpecError::Number(bad.to_string()));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(GridSpecError::NonMonotone);
    }
    Ok(())
}

fn parse_f64(s: &str) -> Result<f64, GridSpecError> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(GridSpecError::Number(s.to_string())),
    }
}

fn parse_count(s: &str) -> Result<usize, GridSpecError> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| GridSpecError::Count(s.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Output {
    Spectrum,
    Steady,
    Coefficients,
    Validity,
}

impl Output {
    pub const ALL: [Output; 4] = [
        Output::Spectrum,
        Output::Steady,
        Output::Coefficients,
        Output::Validity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::Spectrum => "spectrum",
            Output::Steady => "steady",
            Output::Coefficients => "coefficients",
            Output::Validity => "validity",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == s)
    }
}

/// Requested outputs, kept in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outputs([bool; 4]);

impl Outputs {
    pub fn all() -> Self {
        Self([true; 4])
    }

    pub fn only(o: Output) -> Self {
        let mut s = Self([false; 4]);
        s.0[o as usize] = true;
        s
    }

    pub fn contains(&self, o: Output) -> bool {
        self.0[o as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = Output> + '_ {
        Output::ALL.into_iter().filter(|o| self.contains(*o))
    }
}

impl FromIterator<Output> for Outputs {
    fn from_iter<I: IntoIterator<Item = Output>>(iter: I) -> Self {
        let mut s = Self([false; 4]);
        for o in iter {
            s.0[o as usize] = true;
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Used as the output file prefix.
    pub name: String,
    pub params: SystemParams,
    pub motion: Option<MotionParams>,
    /// Fixed emission-induced damping, used verbatim instead of the value
    /// derived from `gamma`.
    pub gamma_prime_override: Option<f64>,
    pub grid: GridSpec,
    pub outputs: Outputs,
}

impl ScenarioConfig {
    pub fn new(name: &str, params: SystemParams) -> Self {
        Self {
            name: name.to_string(),
            params,
            motion: None,
            gamma_prime_override: None,
            grid: GridSpec::default(),
            outputs: Outputs::all(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        check_name(&self.name).map_err(|reason| ConfigError::Value {
            line: 0,
            key: "name".into(),
            reason,
        })?;
        self.params.validate()?;
        if self.params.n_max > MAX_N_MAX {
            return Err(ConfigError::Value {
                line: 0,
                key: "n_max".into(),
                reason: format!("at most {MAX_N_MAX}"),
            });
        }
        if let Some(m) = &self.motion {
            m.validate()?;
        }
        if let Some(gp) = self.gamma_prime_override {
            if !(gp >= 0.0) || !gp.is_finite() {
                return Err(ConfigError::Value {
                    line: 0,
                    key: "gamma_prime".into(),
                    reason: format!("must be finite and >= 0, got {gp}"),
                });
            }
        }
        GridSpec::new(self.grid.start, self.grid.stop, self.grid.count)?;
        Ok(())
    }

    /// Canonical text form; parsing it gives back an equal config.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        line("name", self.name.clone());
        line("delta", rate(p.delta));
        line("delta_c", rate(p.delta_c));
        line("g", rate(p.g));
        line("omega", rate(p.omega));
        line("gamma", rate(p.gamma));
        line("kappa", rate(p.kappa));
        line("kx1", angle(p.kx1));
        line("kx2", angle(p.kx2));
        line("n_max", p.n_max.to_string());
        if let Some(gp) = self.gamma_prime_override {
            line("gamma_prime", rate(gp));
        }
        if let Some(m) = &self.motion {
            line("motion.nu", rate(m.nu));
            line("motion.k_qbar", m.k_qbar.to_string());
            line("motion.phi1", angle(m.phi1));
            line("motion.phi2", angle(m.phi2));
        }
        line(
            "grid",
            format!(
                "{} {} {} {RATE_UNIT}",
                self.grid.start, self.grid.stop, self.grid.count
            ),
        );
        let outs: Vec<&str> = self.outputs.iter().map(Output::name).collect();
        line("outputs", outs.join(", "));
        s
    }
}

impl fmt::Display for ScenarioConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for ScenarioConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

fn rate(v: f64) -> String {
    format!("{v} {RATE_UNIT}")
}

fn angle(v: f64) -> String {
    format!("{v} {ANGLE_UNIT}")
}

fn check_name(name: &str) -> Result<(), String> {
    if name.is_empty() {
        return Err("empty".into());
    }
    if !name
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        return Err(format!("`{name}` may only use ASCII letters, digits, `_` and `-`"));
    }
    Ok(())
}

const KEYS: [&str; 17] = [
    "name",
    "delta",
    "delta_c",
    "g",
    "omega",
    "gamma",
    "kappa",
    "kx1",
    "kx2",
    "n_max",
    "gamma_prime",
    "motion.nu",
    "motion.k_qbar",
    "motion.phi1",
    "motion.phi2",
    "grid",
    "outputs",
];

struct Entry<'a> {
    line: usize,
    key: &'static str,
    value: &'a str,
}

impl Entry<'_> {
    fn err(&self, reason: impl Into<String>) -> ConfigError {
        ConfigError::Value {
            line: self.line,
            key: self.key.into(),
            reason: reason.into(),
        }
    }

    fn number(&self, tok: &str) -> Result<f64, ConfigError> {
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err(format!("`{tok}` is not a finite number"))),
        }
    }

    fn with_unit(&self, unit: &'static str) -> Result<f64, ConfigError> {
        let toks: Vec<&str> = self.value.split_whitespace().collect();
        match toks[..] {
            [v, u] if u == unit => self.number(v),
            [_, u] => Err(self.unit_err(unit, u)),
            [_] => Err(self.unit_err(unit, "")),
            _ => Err(self.err(format!("expected `<number> {unit}`"))),
        }
    }

    fn unit_err(&self, expected: &'static str, found: &str) -> ConfigError {
        ConfigError::Unit {
            line: self.line,
            key: self.key.into(),
            expected,
            found: found.into(),
        }
    }

    fn bare(&self) -> Result<f64, ConfigError> {
        match self.value.split_whitespace().collect::<Vec<_>>()[..] {
            [v] => self.number(v),
            _ => Err(self.err("expected a single dimensionless number")),
        }
    }
}

pub fn parse(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut entries: HashMap<&'static str, Entry<'_>> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
        let k = k.trim();
        let key = KEYS
            .iter()
            .copied()
            .find(|known| *known == k)
            .ok_or_else(|| ConfigError::UnknownKey {
                line,
                key: k.to_string(),
            })?;
        if entries.contains_key(key) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        entries.insert(
            key,
            Entry {
                line,
                key,
                value: v.trim(),
            },
        );
    }

    let get = |k: &'static str| entries.get(k).ok_or(ConfigError::MissingKey(k));
    let rate_of = |k: &'static str| get(k)?.with_unit(RATE_UNIT);
    let angle_of = |k: &'static str| get(k)?.with_unit(ANGLE_UNIT);

    let name_entry = get("name")?;
    let name = name_entry.value.to_string();
    check_name(&name).map_err(|r| name_entry.err(r))?;

    let n_entry = get("n_max")?;
    let n_max = n_entry
        .value
        .parse::<usize>()
        .map_err(|_| n_entry.err(format!("`{}` is not a photon cutoff", n_entry.value)))?;
    if n_max > MAX_N_MAX {
        return Err(n_entry.err(format!("at most {MAX_N_MAX}")));
    }

    let params = SystemParams {
        delta: rate_of("delta")?,
        delta_c: rate_of("delta_c")?,
        g: rate_of("g")?,
        omega: rate_of("omega")?,
        gamma: rate_of("gamma")?,
        kappa: rate_of("kappa")?,
        kx1: angle_of("kx1")?,
        kx2: angle_of("kx2")?,
        n_max,
    };

    let gamma_prime_override = match entries.get("gamma_prime") {
        Some(e) => Some(e.with_unit(RATE_UNIT)?),
        None => None,
    };

    let motion_keys = ["motion.nu", "motion.k_qbar", "motion.phi1", "motion.phi2"];
    let motion = if motion_keys.iter().any(|k| entries.contains_key(k)) {
        if let Some(missing) = motion_keys.iter().find(|k| !entries.contains_key(*k)) {
            return Err(ConfigError::PartialMotion(missing));
        }
        Some(MotionParams {
            nu: rate_of("motion.nu")?,
            k_qbar: get("motion.k_qbar")?.bare()?,
            phi1: angle_of("motion.phi1")?,
            phi2: angle_of("motion.phi2")?,
        })
    } else {
        None
    };

    let grid_entry = get("grid")?;
    let grid = match grid_entry.value.split_whitespace().collect::<Vec<_>>()[..] {
        [a, b, n, u] if u == RATE_UNIT => {
            let count = n
                .parse::<usize>()
                .map_err(|_| grid_entry.err(format!("`{n}` is not a point count")))?;
            GridSpec::new(grid_entry.number(a)?, grid_entry.number(b)?, count)?
        }
        [_, _, _, u] => return Err(grid_entry.unit_err(RATE_UNIT, u)),
        [_, _, _] => return Err(grid_entry.unit_err(RATE_UNIT, "")),
        _ => return Err(grid_entry.err(format!("expected `<start> <stop> <count> {RATE_UNIT}`"))),
    };

    let out_entry = get("outputs")?;
    let mut flags = [false; 4];
    for tok in out_entry.value.split(',').map(str::trim) {
        let o = Output::from_name(tok)
            .ok_or_else(|| out_entry.err(format!("unknown output `{tok}`")))?;
        if flags[o as usize] {
            return Err(out_entry.err(format!("`{tok}` listed twice")));
        }
        flags[o as usize] = true;
    }

    let cfg = ScenarioConfig {
        name,
        params,
        motion,
        gamma_prime_override,
        grid,
        outputs: Outputs(flags),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Built-in scenarios, by name.
pub fn preset(name: &str) -> Option<ScenarioConfig> {
    let cfg = match name {
        "fig3" => ScenarioConfig::new("fig3", SystemParams::fig3()),
        "fig3_emission" => ScenarioConfig {
            gamma_prime_override: Some(0.5),
            ..ScenarioConfig::new(
                "fig3_emission",
                SystemParams {
                    gamma: 1e4,
                    ..SystemParams::fig3()
                },
            )
        },
        "fig4" => ScenarioConfig {
            grid: GridSpec {
                start: -500.0,
                stop: 500.0,
                count: 201,
            },
            ..ScenarioConfig::new("fig4", SystemParams::fig4())
        },
        "fig8" => ScenarioConfig {
            motion: Some(MotionParams {
                nu: 1250.0,
                k_qbar: 0.3,
                phi1: 0.0,
                phi2: PI / 7.0,
            }),
            ..ScenarioConfig::new("fig8", SystemParams::fig3())
        },
        _ => return None,
    };
    Some(cfg)
}

pub const PRESETS: [&str; 4] = ["fig3", "fig3_emission", "fig4", "fig8"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_round_trip() {
        for name in PRESETS {
            let cfg = preset(name).unwrap();
            let text = cfg.to_text();
            let back = parse(&text).unwrap();
            assert_eq!(back, cfg, "{name}");
            assert_eq!(back.to_text(), text);
        }
    }

    #[test]
    fn grid_spec_forms() {
        let g: GridSpec = "-5:5:201".parse().unwrap();
        assert_eq!(g, GridSpec::default());
        assert_eq!(g.to_string(), "-5:5:201");
        assert_eq!("0:0:1".parse::<GridSpec>().unwrap().values(), vec![0.0]);
        assert_eq!("1:0:3".parse::<GridSpec>(), Err(GridSpecError::NonMonotone));
        assert_eq!("0:1:0".parse::<GridSpec>(), Err(GridSpecError::Empty));
        assert!(matches!("0:1".parse::<GridSpec>(), Err(GridSpecError::Shape(_))));
        assert!(matches!("0:nan:3".parse::<GridSpec>(), Err(GridSpecError::Number(_))));
        assert!(matches!("0:1:-3".parse::<GridSpec>(), Err(GridSpecError::Count(_))));
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0.5, 1, 2").unwrap(), vec![0.5, 1.0, 2.0]);
        assert_eq!(parse_range("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_range(""), Err(GridSpecError::Empty));
        assert_eq!(parse_range("1,1"), Err(GridSpecError::NonMonotone));
        assert_eq!(parse_range("2,1"), Err(GridSpecError::NonMonotone));
    }
}
