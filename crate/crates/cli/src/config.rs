//! Parameter resolution: defaults, overridden by a `key=value` config file,
//! overridden by explicit flags.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use targetzone::{ModelParams64, SimConfig};

/// Flags shared by every subcommand; `None` means "not given".
#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Parameter file with `key=value` lines and `#` comments
    /// (keys: sigma, gamma, kappa, c, s0, horizon)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Volatility of the unaffected rate
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    /// Permanent impact per unit of inventory
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Quadratic slippage coefficient
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    /// Defended barrier level c
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub barrier: Option<f64>,
    /// Initial exchange rate (must be >= barrier)
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub s0: Option<f64>,
    /// Trading horizon T
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    /// Monte Carlo seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of Monte Carlo paths
    #[arg(long, global = true)]
    pub paths: Option<usize>,
    /// Number of Euler time steps
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Kernel width of the regularized problem
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Band width of the occupation local-time estimator
    #[arg(long, global = true)]
    pub band_eps: Option<f64>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Comma-separated output formats: csv, json, svg
    #[arg(long, global = true)]
    pub format: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Fully resolved run inputs.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: ModelParams64,
    pub seed: u64,
    pub paths: usize,
    pub steps: usize,
    pub eps: f64,
    pub band_eps: Option<f64>,
    pub out: PathBuf,
    pub formats: Vec<Format>,
}

impl Resolved {
    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }

    /// Simulator configuration; the band defaults to `2 sigma sqrt(dt)`.
    pub fn sim_config(&self) -> Result<SimConfig> {
        let config = match self.band_eps {
            Some(band) => SimConfig::new(self.steps, self.paths, self.seed, band),
            None => SimConfig::with_default_band(
                self.steps,
                self.paths,
                self.seed,
                self.params.sigma(),
                self.params.horizon(),
            ),
        };
        Ok(config?)
    }
}

fn parse_config_file(path: &Path) -> Result<HashMap<String, f64>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!(
                "{}:{}: expected key=value, got {raw:?}",
                path.display(),
                lineno + 1
            );
        };
        let key = key.trim();
        if !matches!(key, "sigma" | "gamma" | "kappa" | "c" | "s0" | "horizon") {
            bail!(
                "{}:{}: unknown parameter {key:?}",
                path.display(),
                lineno + 1
            );
        }
        let value: f64 = value
            .trim()
            .parse()
            .with_context(|| format!("{}:{}: bad number for {key}", path.display(), lineno + 1))?;
        map.insert(key.to_string(), value);
    }
    Ok(map)
}

fn parse_formats(spec: &str) -> Result<Vec<Format>> {
    spec.split(',')
        .map(|f| match f.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => bail!("unknown format {other:?} (expected csv, json or svg)"),
        })
        .collect()
}

/// Applies the precedence chain: defaults < config file < flags.
pub fn resolve(common: &CommonArgs, default_formats: &[Format]) -> Result<Resolved> {
    let file = match &common.config {
        Some(path) => parse_config_file(path)?,
        None => HashMap::new(),
    };
    let pick = |flag: Option<f64>, key: &str, default: f64| {
        flag.or_else(|| file.get(key).copied()).unwrap_or(default)
    };
    let params = ModelParams64::new(
        pick(common.sigma, "sigma", 1.0),
        pick(common.gamma, "gamma", 1.0),
        pick(common.kappa, "kappa", 1.0),
        pick(common.barrier, "c", 0.0),
        pick(common.s0, "s0", 0.5),
        pick(common.horizon, "horizon", 1.0),
    )?;
    let formats = match &common.format {
        Some(spec) => parse_formats(spec)?,
        None => default_formats.to_vec(),
    };
    Ok(Resolved {
        params,
        seed: common.seed.unwrap_or(42),
        paths: common.paths.unwrap_or(10_000),
        steps: common.steps.unwrap_or(1_000),
        eps: common.eps.unwrap_or(1e-2),
        band_eps: common.band_eps,
        out: common.out.clone().unwrap_or_else(|| PathBuf::from(".")),
        formats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn bare_args() -> CommonArgs {
        CommonArgs {
            config: None,
            sigma: None,
            gamma: None,
            kappa: None,
            barrier: None,
            s0: None,
            horizon: None,
            seed: None,
            paths: None,
            steps: None,
            eps: None,
            band_eps: None,
            out: None,
            format: None,
        }
    }

    #[test]
    fn defaults_apply() {
        let r = resolve(&bare_args(), &[Format::Csv]).unwrap();
        assert_eq!(r.params.sigma(), 1.0);
        assert_eq!(r.params.s0(), 0.5);
        assert_eq!(r.seed, 42);
        assert!(r.wants(Format::Csv) && !r.wants(Format::Svg));
    }

    #[test]
    fn file_overrides_defaults_and_flags_override_file() {
        let mut tmp = tempfile::NamedTempFile::new().unwrap();
        writeln!(
            tmp,
            "# comment line\nsigma = 2.0\ns0=3.0   # trailing comment"
        )
        .unwrap();
        let mut args = bare_args();
        args.config = Some(tmp.path().to_path_buf());
        let r = resolve(&args, &[]).unwrap();
        assert_eq!(r.params.sigma(), 2.0);
        assert_eq!(r.params.s0(), 3.0);
        args.sigma = Some(3.5);
        let r = resolve(&args, &[]).unwrap();
        assert_eq!(r.params.sigma(), 3.5);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let mut tmp = tempfile::NamedTempFile::new().unwrap();
        writeln!(tmp, "sigm = 2.0").unwrap();
        let mut args = bare_args();
        args.config = Some(tmp.path().to_path_buf());
        assert!(resolve(&args, &[]).is_err());
    }

    #[test]
    fn format_list_parses() {
        let mut args = bare_args();
        args.format = Some("csv,svg".into());
        let r = resolve(&args, &[]).unwrap();
        assert!(r.wants(Format::Csv) && r.wants(Format::Svg) && !r.wants(Format::Json));
        args.format = Some("bogus".into());
        assert!(resolve(&args, &[]).is_err());
    }
}
