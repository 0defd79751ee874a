use std::path::Path;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use qgt_core::{BaseParam, TypeLabel};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file and then to the built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Base parameter r in (0, 1], as "p/q" or a decimal; q = r^4
    #[arg(long, global = true)]
    pub r: Option<String>,
    /// Root system type (A, B, C or D)
    #[arg(long = "type", global = true)]
    pub type_label: Option<String>,
    #[arg(long, global = true)]
    pub rank: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Largest |λ| kept in truncated state spaces
    #[arg(long, global = true)]
    pub cutoff: Option<i64>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML file with any of: r, type, rank, tol, cutoff, format, seed
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    r: Option<String>,
    #[serde(rename = "type")]
    type_label: Option<String>,
    rank: Option<usize>,
    tol: Option<f64>,
    cutoff: Option<i64>,
    format: Option<Format>,
    seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub param: BaseParam,
    pub type_label: TypeLabel,
    pub rank: usize,
    /// Whether the rank came from a flag or file rather than the default.
    pub rank_given: bool,
    pub tol: f64,
    pub cutoff: i64,
    pub format: Format,
    pub seed: u64,
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

impl SessionConfig {
    pub fn resolve(args: &GlobalArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let r = args.r.clone().or(file.r).unwrap_or_else(|| "4/5".into());
        let ty = args.type_label.clone().or(file.type_label).unwrap_or_else(|| "C".into());
        let rank = args.rank.or(file.rank);
        let tol = args.tol.or(file.tol).unwrap_or(1e-6);
        let cutoff = args.cutoff.or(file.cutoff).unwrap_or(12);
        if !(tol > 0.0) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        if cutoff < 0 {
            return Err(CliError::Usage("--cutoff must be nonnegative".into()));
        }
        Ok(Self {
            param: BaseParam::parse(&r).map_err(|e| CliError::Usage(e.to_string()))?,
            type_label: ty.parse().map_err(|e: qgt_core::Error| CliError::Usage(e.to_string()))?,
            rank: rank.unwrap_or(1),
            rank_given: rank.is_some(),
            tol,
            cutoff,
            format: args.format.or(file.format).unwrap_or(Format::Json),
            seed: args.seed.or(file.seed).unwrap_or(0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = SessionConfig::resolve(&GlobalArgs::default()).unwrap();
        assert_eq!(c.param.to_string(), "4/5");
        assert_eq!(c.type_label, TypeLabel::C);
        assert_eq!((c.rank, c.rank_given, c.cutoff, c.seed), (1, false, 12, 0));
        assert_eq!(c.format, Format::Json);
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("qgt-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("session.toml");
        std::fs::write(&path, "r = \"4/5\"\ntype = \"B\"\nrank = 3\nseed = 9\n").unwrap();
        let args = GlobalArgs {
            rank: Some(2),
            config: Some(path.clone()),
            ..GlobalArgs::default()
        };
        let c = SessionConfig::resolve(&args).unwrap();
        assert_eq!(c.param.to_string(), "4/5");
        assert_eq!(c.type_label, TypeLabel::B);
        assert_eq!((c.rank, c.seed), (2, 9));
        std::fs::write(&path, "colour = 1\n").unwrap();
        assert!(SessionConfig::resolve(&args).is_err());
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        for args in [
            GlobalArgs { r: Some("3/2".into()), ..GlobalArgs::default() },
            GlobalArgs { tol: Some(0.0), ..GlobalArgs::default() },
            GlobalArgs { type_label: Some("E".into()), ..GlobalArgs::default() },
        ] {
            assert!(matches!(SessionConfig::resolve(&args), Err(CliError::Usage(_))));
        }
    }
}
