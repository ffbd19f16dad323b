use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use cliffweil::groupscheme::{check_condition_i, check_condition_ii, check_condition_iii, MatAlgebra};
use cliffweil::orbitchar::{adjoint_orbits, split_level, BetaDatum};
use cliffweil::paramrep::{
    central_check, gl_model, gsp4_model, induced_characters, oracle_certify, parametrize,
    sg_compare, twist_check, u3_model, ClassFunction, ClassifiedGroup, ParamOptions,
};
use cliffweil::schurcocycle::{build_symplectic, cocycle, schur_sweep, triviality, RhoChar};
use cliffweil::weilrep::{weil_check, WeilDatum};
use cliffweil::{GroupSpec, Settings};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{config_err, matrix_datum, single_matrix, ConfigError, RunConfig};

#[derive(Args, Debug)]
pub struct Common {
    /// TOML or JSON file with `RunConfig` fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Conditions I-III for G(O_r).
    Conditions {
        #[command(flatten)]
        common: Common,
    },
    /// Adjoint orbits of g(O_level) with regularity flags.
    Orbits {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        level: u32,
    },
    /// The cocycle c_{beta,rho}: symmetry and a coboundary witness.
    Schur {
        #[command(flatten)]
        common: Common,
        /// Every smoothly regular orbit and every rho.
        #[arg(long)]
        sweep: bool,
        /// Coefficients of rho, comma separated; all characters when omitted.
        #[arg(long, value_delimiter = ',')]
        rho: Option<Vec<u64>>,
    },
    /// The odd-level Weil construction for one (beta, rho).
    WeilCheck {
        #[command(flatten)]
        common: Common,
        /// Coefficients of rho, comma separated; trivial when omitted.
        #[arg(long, value_delimiter = ',')]
        rho: Option<Vec<u64>>,
    },
    /// Admissible theta, sigma, the induced characters and the oracle.
    Parametrize {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        no_oracle: bool,
        #[arg(long)]
        no_sigma_check: bool,
        /// Also store the induced characters for `oracle`.
        #[arg(long)]
        save_characters: Option<PathBuf>,
    },
    /// Certify class functions stored by `parametrize --save-characters`.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        characters: PathBuf,
    },
    /// psi_beta = (mu o det) psi_{beta_0}, or the central factorization.
    TwistCheck {
        #[command(flatten)]
        common: Common,
        /// beta_0 in the line format.
        #[arg(long, required_unless_present = "central")]
        beta0: Option<String>,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        lambda: i64,
        /// Check that a central beta factors through G(O_{r-1}).
        #[arg(long)]
        central: bool,
        /// Also compare the induced characters on G(O_r).
        #[arg(long)]
        induced: bool,
    },
    /// Torus model against G_beta(O_r): bijection, generators, theta counts.
    SgCounts {
        #[command(flatten)]
        common: Common,
        /// gl (uses beta), gsp4 or u3.
        #[arg(long, default_value = "gl")]
        model: String,
    },
}

/// The result of a subcommand before it is wrapped in the report envelope.
pub struct Outcome {
    pub ok: bool,
    pub result: Value,
}

fn outcome(ok: bool, result: impl Serialize) -> anyhow::Result<Outcome> {
    Ok(Outcome {
        ok,
        result: serde_json::to_value(result)?,
    })
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Conditions { .. } => "conditions",
            Command::Orbits { .. } => "orbits",
            Command::Schur { .. } => "schur",
            Command::WeilCheck { .. } => "weil-check",
            Command::Parametrize { .. } => "parametrize",
            Command::Oracle { .. } => "oracle",
            Command::TwistCheck { .. } => "twist-check",
            Command::SgCounts { .. } => "sg-counts",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Conditions { common }
            | Command::Orbits { common, .. }
            | Command::Schur { common, .. }
            | Command::WeilCheck { common, .. }
            | Command::Parametrize { common, .. }
            | Command::Oracle { common, .. }
            | Command::TwistCheck { common, .. }
            | Command::SgCounts { common, .. } => common,
        }
    }

    pub fn run(&self, cfg: &RunConfig, st: &Settings) -> anyhow::Result<Outcome> {
        match self {
            Command::Conditions { .. } => conditions(cfg, st),
            Command::Orbits { level, .. } => {
                let table = adjoint_orbits(&cfg.spec()?, *level, st)?;
                outcome(true, table)
            }
            Command::Schur { sweep: true, .. } => sweep(cfg, st),
            Command::Schur { rho, .. } => schur_single(cfg, rho.as_deref(), st),
            Command::WeilCheck { rho, .. } => weil(cfg, rho.as_deref(), st),
            Command::Parametrize {
                no_oracle,
                no_sigma_check,
                save_characters,
                ..
            } => {
                let opts = ParamOptions {
                    policy: cfg.policy()?,
                    verify_sigma: !no_sigma_check,
                    oracle: !no_oracle,
                };
                param(cfg, &opts, save_characters.as_deref(), st)
            }
            Command::Oracle { characters, .. } => oracle(characters, st),
            Command::TwistCheck {
                beta0,
                lambda,
                central,
                induced,
                ..
            } => twist(cfg, beta0.as_deref(), *lambda, *central, *induced, st),
            Command::SgCounts { model, .. } => sg(cfg, model, st),
        }
    }
}

fn conditions(cfg: &RunConfig, st: &Settings) -> anyhow::Result<Outcome> {
    let spec = cfg.spec()?;
    let r = cfg.r()?;
    let (l, _) = split_level(r);
    let one = check_condition_i(&spec)?;
    let two = check_condition_ii(&spec, r, l, st)?;
    let three = if r % 2 == 1 && r >= 3 {
        Some(check_condition_iii(&spec, r, st)?)
    } else {
        None
    };
    let ok = one.nondegenerate && two.ok && three.as_ref().is_none_or(|c| c.ok);
    outcome(
        ok,
        json!({ "group": spec.name(), "r": r, "condition_i": one, "condition_ii": two, "condition_iii": three }),
    )
}

fn sweep(cfg: &RunConfig, st: &Settings) -> anyhow::Result<Outcome> {
    let spec = cfg.spec()?;
    let table = adjoint_orbits(&spec, 1, st)?;
    let regular = table
        .orbits
        .iter()
        .filter(|o| o.smoothly_regular && !o.residually_central)
        .count();
    let records = schur_sweep(&spec, &cfg.policy()?, st)?;
    let ok = records.iter().all(|r| r.symmetric && r.trivial);
    outcome(
        ok,
        json!({
            "group": spec.name(),
            "orbits": table.orbits.len(),
            "regular_orbits": regular,
            "records": records,
        }),
    )
}

fn rho_for(p: u64, k: usize, coeffs: &[u64]) -> anyhow::Result<RhoChar> {
    if coeffs.len() != k {
        return config_err(format!("rho needs {k} coefficients, got {}", coeffs.len()));
    }
    Ok(RhoChar::new(p, coeffs.to_vec()))
}

fn schur_single(cfg: &RunConfig, rho: Option<&[u64]>, st: &Settings) -> anyhow::Result<Outcome> {
    let spec = cfg.spec()?;
    let datum = cfg.beta(&spec, cfg.r.unwrap_or(2), st)?;
    let sym = build_symplectic(&datum, cfg.policy()?)?;
    let k = sym.centralizer_dim();
    let rhos: Vec<RhoChar> = match rho {
        Some(c) => vec![rho_for(spec.p, k, c)?],
        None => RhoChar::all(spec.p, k).collect(),
    };
    let group = datum.centralizer_c_group(st)?;
    let mut records = Vec::with_capacity(rhos.len());
    let mut ok = true;
    let mut commutative = true;
    for rho in rhos {
        let table = cocycle(&sym, &rho, &group)?;
        commutative &= table.is_commutative();
        let tr = triviality(&table);
        let identity = table.cocycle_identity_holds();
        ok &= identity && tr.symmetric && tr.trivial();
        records.push(json!({
            "rho": rho.coeffs,
            "cocycle_identity": identity,
            "symmetric": tr.symmetric,
            "trivial": tr.trivial(),
            "witness": tr.coboundary_witness,
        }));
    }
    outcome(
        ok,
        json!({
            "group": spec.name(),
            "orbit": datum.res.to_json(&datum.beta_bar),
            "group_order": group.len(),
            "commutative": commutative,
            "records": records,
        }),
    )
}

fn weil(cfg: &RunConfig, rho: Option<&[u64]>, st: &Settings) -> anyhow::Result<Outcome> {
    let spec = cfg.spec()?;
    let datum = cfg.beta(&spec, cfg.r()?, st)?;
    let sym = build_symplectic(&datum, cfg.policy()?)?;
    let k = sym.centralizer_dim();
    let rho = match rho {
        Some(c) => rho_for(spec.p, k, c)?,
        None => RhoChar::trivial(spec.p, k),
    };
    let w = WeilDatum::with_symplectic(&datum, sym, rho)?;
    let report = weil_check(&w, st)?;
    outcome(report.ok(), report)
}

const CHARACTERS_SCHEMA: &str = "cliffweil-characters/1";

/// Induced characters on disk, with what is needed to rebuild `G(O_r)` and `beta`.
#[derive(Serialize, Deserialize)]
struct StoredCharacters {
    schema: String,
    spec: GroupSpec,
    r: u32,
    /// `beta` at level `r`, one coefficient vector per entry.
    beta: Vec<Vec<u64>>,
    class_count: usize,
    characters: Vec<ClassFunction>,
}

fn param(
    cfg: &RunConfig,
    opts: &ParamOptions,
    save: Option<&Path>,
    st: &Settings,
) -> anyhow::Result<Outcome> {
    let spec = cfg.spec()?;
    let datum = cfg.beta(&spec, cfg.r()?, st)?;
    let report = parametrize(&datum, opts, st)?;
    if let Some(path) = save {
        let g = ClassifiedGroup::new(&spec, datum.r, st)?;
        let stored = StoredCharacters {
            schema: CHARACTERS_SCHEMA.into(),
            spec: spec.clone(),
            r: datum.r,
            beta: datum.beta.e.iter().map(|&x| datum.alg.ring.coeffs(x)).collect(),
            class_count: g.class_count(),
            characters: induced_characters(&g, &datum, opts.policy.clone(), st)?,
        };
        std::fs::write(path, serde_json::to_string(&stored)?)?;
    }
    outcome(report.ok(), report)
}

fn oracle(path: &Path, st: &Settings) -> anyhow::Result<Outcome> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let stored: StoredCharacters =
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    if stored.schema != CHARACTERS_SCHEMA {
        return config_err(format!("{}: unsupported schema {:?}", path.display(), stored.schema));
    }
    let alg: MatAlgebra = stored.spec.algebra(stored.r)?;
    if stored.beta.len() != alg.n * alg.n {
        return config_err(format!("{}: beta has {} entries", path.display(), stored.beta.len()));
    }
    let beta = alg.from_vec(stored.beta.iter().map(|c| alg.ring.from_coeffs(c)).collect());
    let datum = BetaDatum::new(&stored.spec, stored.r, &alg, &beta)?;
    let g = ClassifiedGroup::new(&stored.spec, stored.r, st)?;
    if g.class_count() != stored.class_count
        || stored.characters.iter().any(|c| c.values.len() != g.class_count())
    {
        return config_err(format!(
            "{}: stored for {} classes, G(O_r) has {}",
            path.display(),
            stored.class_count,
            g.class_count()
        ));
    }
    let report = oracle_certify(&g, &datum, &stored.characters, st)?;
    outcome(
        report.ok(),
        json!({ "group": stored.spec.name(), "r": stored.r, "orbit": alg.to_json(&beta), "oracle": report }),
    )
}

fn twist(
    cfg: &RunConfig,
    beta0: Option<&str>,
    lambda: i64,
    central: bool,
    induced: bool,
    st: &Settings,
) -> anyhow::Result<Outcome> {
    let spec = cfg.spec()?;
    let r = cfg.r()?;
    let beta = cfg.beta(&spec, r, st)?;
    if central {
        let v = central_check(&beta, st)?;
        return outcome(v.ok(), json!({ "mode": "central", "verdict": v }));
    }
    let Some(text) = beta0 else {
        return config_err("--beta0 is required without --central");
    };
    let b0 = matrix_datum(&spec, r, &single_matrix(text, spec.n, "beta0")?)?;
    let group = if induced {
        Some(ClassifiedGroup::new(&spec, r, st)?)
    } else {
        None
    };
    let v = twist_check(&beta, &b0, lambda, group.as_ref(), st)?;
    outcome(v.ok(), json!({ "mode": "twist", "verdict": v }))
}

fn sg(cfg: &RunConfig, model: &str, st: &Settings) -> anyhow::Result<Outcome> {
    let m = match model {
        "gl" => {
            let spec = cfg.spec()?;
            gl_model(&cfg.beta(&spec, cfg.r()?, st)?, st)?
        }
        "gsp4" => gsp4_model(cfg.p()?, cfg.r.unwrap_or(2), st)?,
        "u3" => u3_model(cfg.p()?, cfg.r.unwrap_or(2), st)?,
        other => return config_err(format!("unknown model {other:?} (gl, gsp4, u3)")),
    };
    let report = sg_compare(&m, st)?;
    outcome(report.ok(), report)
}
