use std::fmt;
use std::path::{Path, PathBuf};

use clap::Args;
use cliffweil::groupscheme::parse_matrix_lines;
use cliffweil::orbitchar::{adjoint_orbits, BetaDatum};
use cliffweil::schurcocycle::SectionPolicy;
use cliffweil::{Family, GroupSpec, Settings};
use serde::{Deserialize, Serialize};

/// A problem with the inputs rather than with the mathematics; exits with 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_err<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(ConfigError(msg.into()).into())
}

/// Parameters shared by every subcommand. The same fields may appear in a
/// TOML or JSON file passed with `--config`; flags win over the file.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// GL, GSp, GO or U.
    #[arg(long)]
    pub family: Option<String>,
    /// Matrix size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Odd prime.
    #[arg(long)]
    pub p: Option<u64>,
    /// Level of O_r = Z/p^r.
    #[arg(long)]
    pub r: Option<u32>,
    /// Residue degree of the Galois ring (GL only).
    #[arg(long)]
    pub d: Option<u32>,
    /// Form matrix for GO and U in the matrix line format; defaults to the identity.
    #[arg(long)]
    pub form: Option<String>,
    /// Inline beta, one matrix in the line format.
    #[arg(long, conflicts_with_all = ["beta_file", "orbit"])]
    pub beta: Option<String>,
    /// File holding beta in the line format; the first matrix is used.
    #[arg(long, conflicts_with = "orbit")]
    pub beta_file: Option<PathBuf>,
    /// Index into the residual orbit table printed by `orbits`.
    #[arg(long)]
    pub orbit: Option<usize>,
    /// Section policy: lex, orthogonal, jordan or random:<seed>.
    #[arg(long)]
    pub policy: Option<String>,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

macro_rules! overlay {
    ($top:expr, $base:expr, $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| ConfigError(format!("{}: {e}", path.display())).into())
    }

    /// `self` with unset fields taken from `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        overlay!(
            self, base, family, n, p, r, d, form, beta, beta_file, orbit, policy, budget, samples,
            seed
        )
    }

    pub fn settings(&self) -> anyhow::Result<Settings> {
        let def = Settings::default();
        let st = Settings {
            budget: self.budget.unwrap_or(def.budget),
            samples: self.samples.unwrap_or(def.samples),
            seed: self.seed.unwrap_or(def.seed),
        };
        if st.budget == 0 || st.samples == 0 {
            return config_err("budget and samples must be positive");
        }
        Ok(st)
    }

    pub fn policy(&self) -> anyhow::Result<SectionPolicy> {
        match &self.policy {
            None => Ok(SectionPolicy::Lex),
            Some(s) => s.parse().or_else(config_err),
        }
    }

    pub fn p(&self) -> anyhow::Result<u64> {
        match self.p {
            None => config_err("--p is required"),
            Some(p) if p % 2 == 0 => config_err(format!("p must be odd, got {p}")),
            Some(p) => Ok(p),
        }
    }

    pub fn r(&self) -> anyhow::Result<u32> {
        self.r.map_or_else(|| config_err("--r is required"), Ok)
    }

    pub fn spec(&self) -> anyhow::Result<GroupSpec> {
        let family: Family = match &self.family {
            None => return config_err("--family is required"),
            Some(f) => f.parse().or_else(config_err)?,
        };
        let p = self.p()?;
        let n = match self.n {
            Some(n) => n,
            None => return config_err("--n is required"),
        };
        if self.d.is_some_and(|d| d != 1) && family != Family::GL {
            return config_err("--d applies to GL only");
        }
        let form = || -> anyhow::Result<Vec<i64>> {
            match &self.form {
                None => Ok((0..n * n).map(|k| i64::from(k % (n + 1) == 0)).collect()),
                Some(text) => single_matrix(text, n, "form"),
            }
        };
        let spec = match family {
            Family::GL => GroupSpec::gl_over(n, p, self.d.unwrap_or(1)),
            Family::GSp => GroupSpec::gsp(n, p),
            Family::GO => {
                let f = form()?;
                let rows: Vec<Vec<i64>> = f.chunks(n).map(<[i64]>::to_vec).collect();
                GroupSpec::go(&rows, p)
            }
            Family::U => GroupSpec::unitary(form()?.into_iter().map(|x| vec![x, 0]).collect(), n, p),
        };
        Ok(spec?)
    }

    /// `beta` at level `r` from the inline matrix, the file or the orbit index.
    pub fn beta(&self, spec: &GroupSpec, r: u32, st: &Settings) -> anyhow::Result<BetaDatum> {
        if let Some(k) = self.orbit {
            let table = adjoint_orbits(spec, 1, st)?;
            let Some(entry) = table.orbits.get(k) else {
                return config_err(format!("orbit index {k} out of range ({} orbits)", table.orbits.len()));
            };
            return Ok(BetaDatum::new(spec, r, &spec.algebra(1)?, &entry.rep)?);
        }
        let entries = if let Some(text) = &self.beta {
            single_matrix(text, spec.n, "beta")?
        } else if let Some(path) = &self.beta_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
            file_matrix(&text, spec.n).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?
        } else {
            return config_err("one of --beta, --beta-file or --orbit is required");
        };
        matrix_datum(spec, r, &entries)
    }
}

/// A datum from base-ring integer entries given at level `r`.
pub fn matrix_datum(spec: &GroupSpec, r: u32, entries: &[i64]) -> anyhow::Result<BetaDatum> {
    let alg = spec.algebra(r)?;
    let m = alg.from_vec(entries.iter().map(|&x| alg.ring.from_int(x)).collect());
    Ok(BetaDatum::new(spec, r, &alg, &m)?)
}

pub fn single_matrix(text: &str, n: usize, what: &str) -> anyhow::Result<Vec<i64>> {
    let mats = parse_matrix_lines(text).map_err(|e| ConfigError(format!("{what}: {e}")))?;
    match mats.as_slice() {
        [(_, k, e)] if *k == n => Ok(e.clone()),
        [(_, k, _)] => config_err(format!("{what}: expected a {n}x{n} matrix, got {k}x{k}")),
        _ => config_err(format!("{what}: expected exactly one matrix, got {}", mats.len())),
    }
}

fn file_matrix(text: &str, n: usize) -> Result<Vec<i64>, String> {
    let mats = parse_matrix_lines(text).map_err(|e| e.to_string())?;
    match mats.first() {
        None => Err("no matrix found".into()),
        Some((line, k, _)) if *k != n => Err(format!("line {line}: expected a {n}x{n} matrix, got {k}x{k}")),
        Some((_, _, e)) => Ok(e.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_the_file() {
        let file: RunConfig = toml::from_str("family = \"GL\"\nn = 2\np = 5\nseed = 7").unwrap();
        let flags = RunConfig {
            p: Some(3),
            ..RunConfig::default()
        };
        let cfg = flags.over(file);
        assert_eq!(cfg.p, Some(3));
        assert_eq!(cfg.n, Some(2));
        assert_eq!(cfg.settings().unwrap().seed, 7);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("famly = \"GL\"").is_err());
    }

    #[test]
    fn even_p_is_a_config_error() {
        let cfg = RunConfig {
            family: Some("GL".into()),
            n: Some(2),
            p: Some(2),
            ..RunConfig::default()
        };
        assert!(cfg.spec().unwrap_err().downcast_ref::<ConfigError>().is_some());
    }

    #[test]
    fn file_errors_carry_line_numbers() {
        let e = file_matrix("# beta\n\n0 1 x 1\n", 2).unwrap_err();
        assert!(e.contains("line 3:"), "{e}");
        let e = file_matrix("0 1 1\n", 2).unwrap_err();
        assert!(e.contains("line 1:"), "{e}");
        let e = file_matrix("1 0 0 0 1 0 0 0 1\n", 2).unwrap_err();
        assert!(e.contains("line 1:"), "{e}");
    }
}
