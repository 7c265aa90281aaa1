use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use orbitspace::basisreg::{builtin_basis, IntegrityBasis};
use orbitspace::pmatrix::PMatrix;
use orbitspace::Error;

use crate::Failure;

/// Exactly one of `--builtin`, `--file`, `--pmatrix`.
#[derive(Args, Debug)]
#[group(id = "source", required = true, multiple = false)]
pub struct Source {
    /// Built-in basis: I2, A2, A3, A4, B2, B3, B4, D4.
    #[arg(long)]
    builtin: Option<String>,
    /// Basis file.
    #[arg(long)]
    file: Option<PathBuf>,
    /// P-matrix file in serialization format.
    #[arg(long)]
    pmatrix: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SourceArgs {
    #[command(flatten)]
    source: Source,
    /// Order of the dihedral group for `--builtin I2`.
    #[arg(long)]
    m: Option<u32>,
}

pub fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Domain(Error::Io(format!("{}: {e}", path.display()))))
}

impl SourceArgs {
    fn validate(&self) -> Result<(), Failure> {
        if self.m.is_some() && self.source.builtin.is_none() {
            return Err(Failure::Usage("--m applies only to --builtin".into()));
        }
        Ok(())
    }

    pub fn basis(&self) -> Result<IntegrityBasis, Failure> {
        self.validate()?;
        if let Some(name) = &self.source.builtin {
            return Ok(builtin_basis(name, self.m)?);
        }
        if let Some(path) = &self.source.file {
            return Ok(IntegrityBasis::parse(&read(path)?)?);
        }
        Err(Failure::Usage(
            "this command needs --builtin or --file".into(),
        ))
    }

    pub fn pmatrix(&self) -> Result<PMatrix, Failure> {
        self.validate()?;
        match &self.source.pmatrix {
            Some(path) => Ok(PMatrix::parse(&read(path)?)?),
            None => Ok(PMatrix::build(&self.basis()?)?),
        }
    }
}
