//! Flat `key=value` run configuration.
//!
//! A configuration starts from a recipe (or the library defaults), then
//! applies the keys of a config file, then `--set` overrides, then the
//! dedicated flags. The resolved configuration is echoed as `# key=value`
//! lines at the top of the CSV, and parsing those lines gives it back.

use std::fmt;

use vcc_core::channel::{noise_power, CellGeometry, BANDWIDTH_HZ, NOISE_DENSITY_DBM_HZ};
use vcc_core::experiments::{recipe, ExperimentKind, Pathloss, PowerSweep, QChoice, Scenario};

/// Everything the CLI resolves before running.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub recipe: Option<String>,
    pub scenario: Scenario,
    pub noise_density_dbm_hz: f64,
    pub bandwidth_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    UnknownKey(String),
    Invalid {
        key: String,
        value: String,
        expected: String,
    },
    Syntax {
        line: usize,
        text: String,
    },
    Scenario(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::UnknownKey(k) => {
                write!(f, "unknown key `{k}` (known keys: {})", KEYS.join(", "))
            }
            ConfigError::Invalid {
                key,
                value,
                expected,
            } => {
                write!(
                    f,
                    "invalid value `{value}` for `{key}`: expected {expected}"
                )
            }
            ConfigError::Syntax { line, text } => {
                write!(f, "line {line}: expected `key=value`, found `{text}`")
            }
            ConfigError::Scenario(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Accepted keys, in echo order.
pub const KEYS: &[&str] = &[
    "recipe",
    "experiment",
    "geometry",
    "L",
    "G",
    "M",
    "Q",
    "Q_base",
    "ptot_dbm",
    "snr_db",
    "schemes",
    "T",
    "Theta",
    "noise_density_dbm_hz",
    "bandwidth_hz",
    "csit_variance",
    "csir_variances",
    "locations",
    "fadings",
    "seed",
];

impl Default for RunConfig {
    fn default() -> Self {
        let mut c = Self {
            recipe: None,
            scenario: Scenario::default(),
            noise_density_dbm_hz: NOISE_DENSITY_DBM_HZ,
            bandwidth_hz: BANDWIDTH_HZ,
        };
        c.sync_noise();
        c
    }
}

/// Splits `key=value` lines. Blank lines and `#` comments are skipped; with
/// `echoed`, only `# key=value` lines are read, as found atop a CSV.
pub fn parse_pairs(text: &str, echoed: bool) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let mut line = raw.trim();
        if echoed {
            match line.strip_prefix('#') {
                Some(rest) => line = rest.trim(),
                None => continue,
            }
        } else if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: raw.to_string(),
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn invalid(key: &str, value: &str, expected: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        value: value.to_string(),
        expected: expected.into(),
    }
}

fn positive(key: &str, value: &str) -> Result<usize, ConfigError> {
    match value.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(invalid(key, value, "a positive integer")),
    }
}

fn number(key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| invalid(key, value, "a finite number"))
}

fn list<T>(
    value: &str,
    mut item: impl FnMut(&str) -> Result<T, ConfigError>,
) -> Result<Vec<T>, ConfigError> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|s| item(s.trim())).collect()
}

fn q_choice(key: &str, value: &str) -> Result<QChoice, ConfigError> {
    if value == "optimize" {
        return Ok(QChoice::Optimize);
    }
    positive(key, value)
        .map(QChoice::Fixed)
        .map_err(|_| invalid(key, value, "a positive integer or `optimize`"))
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl RunConfig {
    /// Starts from the named recipe.
    pub fn from_recipe(name: &str) -> Result<Self, ConfigError> {
        let scenario = recipe(name).map_err(|e| invalid("recipe", name, e.to_string()))?;
        let mut c = Self {
            recipe: Some(name.to_string()),
            scenario,
            ..Self::default()
        };
        c.sync_noise();
        Ok(c)
    }

    /// Builds a configuration from pairs, honouring a `recipe` key first.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut c = match pairs.iter().find(|(k, _)| k == "recipe") {
            Some((_, v)) if v != "none" => Self::from_recipe(v)?,
            _ => Self::default(),
        };
        c.apply_all(pairs)?;
        Ok(c)
    }

    pub fn apply_all(&mut self, pairs: &[(String, String)]) -> Result<(), ConfigError> {
        for (k, v) in pairs {
            if k != "recipe" {
                self.apply(k, v)?;
            }
        }
        Ok(())
    }

    /// Sets one key.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let s = &mut self.scenario;
        match key {
            "recipe" => return Err(invalid(key, value, "to be given before any other key")),
            "experiment" => {
                s.kind = match value {
                    "rates" => ExperimentKind::Rates,
                    "msv" => ExperimentKind::Msv,
                    "imperfect_csi" => ExperimentKind::ImperfectCsi,
                    _ => return Err(invalid(key, value, "one of rates, msv, imperfect_csi")),
                }
            }
            "geometry" => {
                s.pathloss = match value {
                    "symmetric" => Pathloss::Unit,
                    _ => Pathloss::Cell(
                        CellGeometry::preset(value)
                            .map_err(|_| invalid(key, value, "one of macro, micro, symmetric"))?,
                    ),
                }
            }
            "L" => s.l = positive(key, value)?,
            "G" => s.groups = positive(key, value)?,
            "M" => {
                s.antennas = list(value, |x| positive(key, x))?;
                if s.antennas.is_empty() {
                    return Err(invalid(
                        key,
                        value,
                        "a comma-separated list of positive integers",
                    ));
                }
            }
            "Q" => s.q = q_choice(key, value)?,
            "Q_base" => s.q_base = q_choice(key, value)?,
            "ptot_dbm" => s.power = PowerSweep::PtotDbm(list(value, |x| number(key, x))?),
            "snr_db" => s.power = PowerSweep::SnrDb(list(value, |x| number(key, x))?),
            "schemes" => {
                let mut bd = false;
                let mut zf = false;
                for item in value.split(',').map(str::trim) {
                    match item {
                        "bd_mrc" => bd = true,
                        "zf" => zf = true,
                        _ => {
                            return Err(invalid(
                                key,
                                value,
                                "a comma-separated subset of bd_mrc, zf",
                            ))
                        }
                    }
                }
                s.schemes.bd_mrc = bd;
                s.schemes.zf = zf;
            }
            "T" => {
                s.coherence_symbols = value
                    .parse()
                    .map_err(|_| invalid(key, value, "a nonnegative integer"))?
            }
            "Theta" => {
                s.pilot_symbols = value
                    .parse()
                    .map_err(|_| invalid(key, value, "a nonnegative integer"))?
            }
            "noise_density_dbm_hz" => {
                self.noise_density_dbm_hz = number(key, value)?;
                self.sync_noise();
            }
            "bandwidth_hz" => {
                self.bandwidth_hz = number(key, value)?;
                self.sync_noise();
            }
            "csit_variance" => s.csit_variance = number(key, value)?,
            "csir_variances" => s.csir_variances = list(value, |x| number(key, x))?,
            "locations" => s.locations = positive(key, value)?,
            "fadings" => s.fadings = positive(key, value)?,
            "seed" => {
                s.seed = value
                    .parse()
                    .map_err(|_| invalid(key, value, "an unsigned 64-bit integer"))?
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    fn sync_noise(&mut self) {
        self.scenario.noise_watts = noise_power(self.noise_density_dbm_hz, self.bandwidth_hz);
    }

    /// Checks the resolved scenario, naming the offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scenario
            .validate()
            .map_err(|e| ConfigError::Scenario(format!("infeasible scenario: {e}")))
    }

    /// The resolved configuration as `key=value` lines, in [`KEYS`] order.
    pub fn echo(&self) -> Vec<String> {
        let s = &self.scenario;
        let mut out = vec![format!(
            "recipe={}",
            self.recipe.as_deref().unwrap_or("none")
        )];
        out.push(format!(
            "experiment={}",
            match s.kind {
                ExperimentKind::Rates => "rates",
                ExperimentKind::Msv => "msv",
                ExperimentKind::ImperfectCsi => "imperfect_csi",
            }
        ));
        let geometry = match s.pathloss {
            Pathloss::Unit => "symmetric",
            Pathloss::Cell(g) if g == CellGeometry::micro_cell() => "micro",
            Pathloss::Cell(_) => "macro",
        };
        out.push(format!("geometry={geometry}"));
        out.push(format!("L={}", s.l));
        out.push(format!("G={}", s.groups));
        out.push(format!("M={}", join(&s.antennas)));
        let q = |c: QChoice| match c {
            QChoice::Fixed(q) => q.to_string(),
            QChoice::Optimize => "optimize".into(),
        };
        out.push(format!("Q={}", q(s.q)));
        out.push(format!("Q_base={}", q(s.q_base)));
        out.push(match &s.power {
            PowerSweep::PtotDbm(v) => format!("ptot_dbm={}", join(v)),
            PowerSweep::SnrDb(v) => format!("snr_db={}", join(v)),
        });
        let mut schemes = Vec::new();
        if s.schemes.bd_mrc {
            schemes.push("bd_mrc");
        }
        if s.schemes.zf {
            schemes.push("zf");
        }
        out.push(format!("schemes={}", schemes.join(",")));
        out.push(format!("T={}", s.coherence_symbols));
        out.push(format!("Theta={}", s.pilot_symbols));
        out.push(format!(
            "noise_density_dbm_hz={}",
            self.noise_density_dbm_hz
        ));
        out.push(format!("bandwidth_hz={}", self.bandwidth_hz));
        out.push(format!("csit_variance={}", s.csit_variance));
        out.push(format!("csir_variances={}", join(&s.csir_variances)));
        out.push(format!("locations={}", s.locations));
        out.push(format!("fadings={}", s.fadings));
        out.push(format!("seed={}", s.seed));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(text: &str) -> Vec<(String, String)> {
        parse_pairs(text, false).unwrap()
    }

    #[test]
    fn type_mismatch_names_the_field() {
        let err = RunConfig::from_pairs(&pairs("L=banana")).unwrap_err();
        assert!(err.to_string().contains("`L`"), "{err}");
    }

    #[test]
    fn unknown_key() {
        let err = RunConfig::from_pairs(&pairs("foo=1")).unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey("foo".into()));
    }

    #[test]
    fn recipe_then_overrides() {
        let c = RunConfig::from_pairs(&pairs("recipe=fig3\nL=28\n")).unwrap();
        assert_eq!(c.scenario.l, 28);
        assert_eq!(c.scenario.groups, 6);
        assert_eq!(c.recipe.as_deref(), Some("fig3"));
    }

    #[test]
    fn echo_round_trip() {
        for name in ["fig2", "fig6", "fig7", "fig8", "fig9"] {
            let mut c = RunConfig::from_recipe(name).unwrap();
            c.apply("noise_density_dbm_hz", "-173.7").unwrap();
            let header: String = c.echo().iter().map(|l| format!("# {l}\n")).collect();
            let back = RunConfig::from_pairs(&parse_pairs(&header, true).unwrap()).unwrap();
            assert_eq!(back, c, "{name}");
        }
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse_pairs("L=3\nnonsense\n", false).unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 2, .. }));
    }
}
