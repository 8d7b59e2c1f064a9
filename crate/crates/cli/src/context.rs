use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chanid::spark::is_prime;

use crate::config::{parse_list, Config};
use crate::error::CliError;

/// Resolved global settings plus access to the config file.
///
/// Precedence is flag, then the subcommand's section, then the global part of
/// the config file, then the built-in default.
pub struct Context {
    pub section: &'static str,
    config: Config,
    seed: Option<u64>,
    out: Option<PathBuf>,
    trials: Option<usize>,
    noise: Option<f64>,
}

impl Context {
    pub fn new(
        section: &'static str,
        config: Option<&Path>,
        seed: Option<u64>,
        out: Option<PathBuf>,
        trials: Option<usize>,
        noise: Option<f64>,
    ) -> Result<Self, CliError> {
        let config = match config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| CliError::config(format!("{}: {e}", p.display())))?;
                Config::parse(&text)?
            }
            None => Config::default(),
        };
        Ok(Self {
            section,
            config,
            seed,
            out,
            trials,
            noise,
        })
    }

    pub fn value<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.optional(flag, key)?.unwrap_or(default))
    }

    pub fn optional<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => Ok(self.config.get(self.section, key)?),
        }
    }

    pub fn list<T: FromStr>(&self, flag: Option<Vec<T>>, key: &str, default: Vec<T>) -> Result<Vec<T>, CliError> {
        if let Some(v) = flag.filter(|v| !v.is_empty()) {
            return Ok(v);
        }
        match self.config.raw(self.section, key) {
            Some(text) => Ok(parse_list(text)?),
            None => Ok(default),
        }
    }

    pub fn path(&self, flag: Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.or_else(|| self.config.raw(self.section, key).map(PathBuf::from))
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.value(self.seed, "seed", 0)
    }

    pub fn trials(&self, default: usize) -> Result<usize, CliError> {
        self.value(self.trials, "trials", default)
    }

    pub fn noise(&self) -> Result<f64, CliError> {
        let sigma = self.value(self.noise, "noise", 0.0)?;
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(CliError::config(format!(
                "noise must be a finite nonnegative number, got {sigma}"
            )));
        }
        Ok(sigma)
    }

    /// Open `name` under the output directory, or `None` when no directory was
    /// given.
    pub fn csv(&self, name: &str) -> Result<Option<BufWriter<File>>, CliError> {
        let dir = match self
            .out
            .clone()
            .or_else(|| self.config.raw(self.section, "out").map(PathBuf::from))
        {
            Some(d) => d,
            None => return Ok(None),
        };
        fs::create_dir_all(&dir)?;
        Ok(Some(BufWriter::new(File::create(dir.join(name))?)))
    }
}

pub fn warn_if_not_prime(l: usize) {
    if !is_prime(l) {
        eprintln!("warning: L={l} is not prime; full spark is not guaranteed");
    }
}

/// Write `lines` to `w` if present.
pub fn emit(w: Option<BufWriter<File>>, header: &str, lines: impl IntoIterator<Item = String>) -> Result<(), CliError> {
    if let Some(mut w) = w {
        writeln!(w, "{header}")?;
        for line in lines {
            writeln!(w, "{line}")?;
        }
        w.flush()?;
    }
    Ok(())
}
