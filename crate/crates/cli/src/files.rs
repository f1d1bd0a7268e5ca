use std::fs;
use std::path::Path;

use wml_core::io::{from_json_str, MatrixJson, VectorJson};
use wml_core::numerics::{ComplexMatrix, DensityMatrix, StateVector};

use crate::commands::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn parse<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    from_json_str(&read(path)?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    let j: MatrixJson = parse(path)?;
    j.to_matrix().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn read_density(path: &Path) -> Result<DensityMatrix, CliError> {
    DensityMatrix::new(read_matrix(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn read_state(path: &Path) -> Result<StateVector, CliError> {
    let j: VectorJson = parse(path)?;
    j.to_state().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}
