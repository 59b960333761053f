//! Flat key-value experiment configuration.
//!
//! One `key = value` pair per line; `#` starts a comment. Complex values are
//! written as `10+0.5i` or as plain numbers, the friction law as a bare word.
//! Physical, grid and time keys are required; coupling keys fall back to
//! their defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use airsea_swr::swr::SwrConfig;
use airsea_swr::{GridSpec, LawKind, PhysicalParams, TimeSpec, C64};
use num_complex::Complex64;

const REQUIRED: [&str; 14] = [
    "f", "nu_a", "nu_o", "rho_a", "rho_o", "c_d", "u_inf_a", "u_inf_o", "h_a", "h_o", "n_a", "n_o", "dt", "n_t",
];
const OPTIONAL: [&str; 9] = [
    "g_a",
    "g_o",
    "theta",
    "max_iters",
    "tol",
    "noise_amplitude",
    "seed",
    "friction",
    "alpha_c",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: PhysicalParams,
    pub grid: GridSpec,
    pub time: TimeSpec,
    pub swr: SwrConfig,
    pub friction: LawKind,
    /// Constant coefficient of the linear law; `None` means `alpha^e`.
    pub alpha_c: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            params: PhysicalParams::reference(),
            grid: GridSpec::reference(),
            time: TimeSpec::reference(),
            swr: SwrConfig::default(),
            friction: LawKind::Quadratic,
            alpha_c: None,
        }
    }
}

/// Raw values by key, with their line numbers.
type Table = BTreeMap<String, (usize, String)>;

fn tokenize(text: &str) -> Result<Table, ConfigError> {
    let mut table = Table::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(format!("line {}: expected `key = value`", i + 1));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return err(format!("line {}: expected `key = value`", i + 1));
        }
        if let Some((first, _)) = table.insert(key.to_string(), (i + 1, value.to_string())) {
            return err(format!("line {}: key `{key}` already set on line {first}", i + 1));
        }
    }
    Ok(table)
}

struct Reader<'a> {
    table: &'a Table,
}

impl Reader<'_> {
    fn parsed<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, ConfigError> {
        match self.table.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| ConfigError(format!("line {line}: key `{key}`: `{v}` is not {what}"))),
        }
    }

    fn real(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.parsed(key, "a number")
    }

    fn count(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.parsed(key, "a non-negative integer")
    }

    fn seed(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.parsed(key, "a 64-bit unsigned integer")
    }

    fn complex(&self, key: &str) -> Result<Option<C64>, ConfigError> {
        match self.table.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .replace(' ', "")
                .parse::<Complex64>()
                .map(Some)
                .map_err(|_| ConfigError(format!("line {line}: key `{key}`: `{v}` is not a complex number"))),
        }
    }

    fn string(&self, key: &str) -> Option<&str> {
        self.table.get(key).map(|(_, v)| v.as_str())
    }
}

fn required<T>(value: Option<T>, key: &str) -> Result<T, ConfigError> {
    value.ok_or_else(|| ConfigError(format!("missing required key `{key}`")))
}

fn check<T>(r: airsea_swr::Result<T>) -> Result<T, ConfigError> {
    r.map_err(|e| ConfigError(e.to_string()))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table = tokenize(text)?;
        if let Some((k, (line, _))) = table.iter().find(|(k, _)| !REQUIRED.contains(&k.as_str()) && !OPTIONAL.contains(&k.as_str())) {
            return err(format!("line {line}: unknown key `{k}`"));
        }
        if let Some(k) = REQUIRED.iter().find(|k| !table.contains_key(**k)) {
            return err(format!("missing required key `{k}`"));
        }
        let r = Reader { table: &table };
        let real = |k: &str| -> Result<f64, ConfigError> { required(r.real(k)?, k) };
        let complex = |k: &str| -> Result<C64, ConfigError> { required(r.complex(k)?, k) };

        let f = real("f")?;
        let (u_inf_a, u_inf_o) = (complex("u_inf_a")?, complex("u_inf_o")?);
        let g_a = r.complex("g_a")?.unwrap_or(C64::i() * f * u_inf_a);
        let g_o = r.complex("g_o")?.unwrap_or(C64::i() * f * u_inf_o);
        let params = check(PhysicalParams::new(
            f,
            real("nu_a")?,
            real("nu_o")?,
            real("rho_a")?,
            real("rho_o")?,
            real("c_d")?,
            u_inf_a,
            u_inf_o,
            g_a,
            g_o,
        ))?;
        let grid = check(GridSpec::new(
            real("h_a")?,
            real("h_o")?,
            required(r.count("n_a")?, "n_a")?,
            required(r.count("n_o")?, "n_o")?,
        ))?;
        let time = check(TimeSpec::new(real("dt")?, required(r.count("n_t")?, "n_t")?))?;

        let d = SwrConfig::default();
        let swr = SwrConfig {
            theta: r.real("theta")?.unwrap_or(d.theta),
            max_iters: r.count("max_iters")?.unwrap_or(d.max_iters),
            tol: r.real("tol")?.unwrap_or(d.tol),
            noise_amplitude: r.real("noise_amplitude")?.unwrap_or(d.noise_amplitude),
            seed: r.seed("seed")?.unwrap_or(d.seed),
        };
        check(swr.validate())?;
        let friction = match r.string("friction") {
            Some(s) => check(s.parse())?,
            None => LawKind::Quadratic,
        };
        let alpha_c = r.real("alpha_c")?;
        if let Some(a) = alpha_c {
            if !(a.is_finite() && a > 0.0) {
                return err(format!("invalid parameter `alpha_c`: must be finite and > 0, got {a}"));
            }
        }
        Ok(ExperimentConfig {
            params,
            grid,
            time,
            swr,
            friction,
            alpha_c,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = include_str!("../../../configs/default.conf");

    #[test]
    fn shipped_config_matches_builtin_defaults() {
        assert_eq!(ExperimentConfig::parse(FULL).unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn missing_key_is_named() {
        let text: String = FULL.lines().filter(|l| !l.starts_with("c_d")).collect::<Vec<_>>().join("\n");
        let e = ExperimentConfig::parse(&text).unwrap_err();
        assert_eq!(e.0, "missing required key `c_d`");
    }

    #[test]
    fn unknown_key_is_rejected() {
        let e = ExperimentConfig::parse("nu_x = 1.0").unwrap_err();
        assert_eq!(e.0, "line 1: unknown key `nu_x`");
        let e = ExperimentConfig::parse(&format!("{FULL}\nc_d = 1e-3\n")).unwrap_err();
        assert!(e.0.contains("`c_d` already set"), "{}", e.0);
        let e = ExperimentConfig::parse("# only a comment\nc_d 1e-3").unwrap_err();
        assert_eq!(e.0, "line 2: expected `key = value`");
    }

    #[test]
    fn invariants_are_checked_at_load() {
        let text = FULL.replace("dt = 60.0", "dt = -1.0");
        assert!(ExperimentConfig::parse(&text).unwrap_err().0.contains("dt"));
        let text = format!("{FULL}\nalpha_c = 0.0\n");
        assert!(ExperimentConfig::parse(&text).unwrap_err().0.contains("alpha_c"));
        let text = FULL.replace("friction = quadratic", "friction = cubic");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn complex_values_and_overrides() {
        let text = FULL
            .replace("u_inf_a = 10+0i", "u_inf_a = 8 - 2i  # tilted")
            .replace("u_inf_o = 0.1+0i", "u_inf_o = 0.2")
            .lines()
            .filter(|l| !["theta", "seed", "friction"].iter().any(|k| l.starts_with(k)))
            .collect::<Vec<_>>()
            .join("\n");
        let text = format!("{text}\ng_o = 0+1e-5i\ntheta = 1.5\nseed = 18446744073709551615\nfriction = linear\n");
        let c = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(c.params.u_inf_a, C64::new(8.0, -2.0));
        assert_eq!(c.params.u_inf_o, C64::new(0.2, 0.0));
        assert_eq!(c.params.g_a, C64::i() * 1e-4 * C64::new(8.0, -2.0));
        assert_eq!(c.params.g_o, C64::new(0.0, 1e-5));
        assert_eq!(c.swr.theta, 1.5);
        assert_eq!(c.swr.seed, u64::MAX);
        assert_eq!(c.friction, LawKind::Linear);
    }
}
