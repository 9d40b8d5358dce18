//! State files: UTF-8 JSON with keys `dims` and `matrix`, the matrix a
//! row-major list of `[re, im]` pairs.

use std::fmt;
use std::path::Path;

use discordium::linalg::{hermitian_eig, ComplexMatrix};
use discordium::states::{validate_density, BipartiteState, DensityMatrix};
use discordium::{CMatrix, Complex64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const VALIDATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub matrix: Entries,
}

/// Flat row-major pairs; a list of rows is also accepted on input.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entries {
    Flat(Vec<[f64; 2]>),
    Rows(Vec<Vec<[f64; 2]>>),
}

#[derive(Debug)]
pub enum InputError {
    Io(String),
    Parse(String),
    Validation { field: &'static str, message: String },
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io(m) => write!(f, "io error: {m}"),
            Self::Parse(m) => write!(f, "parse error: {m}"),
            Self::Validation { field, message } => write!(f, "validation error: {field}: {message}"),
        }
    }
}

fn invalid(field: &'static str, message: impl Into<String>) -> InputError {
    InputError::Validation {
        field,
        message: message.into(),
    }
}

/// Raw bytes of a file and their SHA-256.
pub struct Loaded {
    pub file: StateFile,
    pub digest: String,
}

pub fn load(path: &Path) -> Result<Loaded, InputError> {
    let bytes = std::fs::read(path).map_err(|e| InputError::Io(format!("{}: {e}", path.display())))?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let file = serde_json::from_slice(&bytes).map_err(|e| InputError::Parse(format!("{}: {e}", path.display())))?;
    Ok(Loaded { file, digest })
}

impl StateFile {
    pub fn from_matrix(dims: Vec<usize>, m: &CMatrix) -> Self {
        Self {
            dims,
            matrix: Entries::Flat(m.as_slice().iter().map(|z| [z.re, z.im]).collect()),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, InputError> {
        let flat: Vec<[f64; 2]> = match &self.matrix {
            Entries::Flat(v) => v.clone(),
            Entries::Rows(rows) => {
                let n = rows.len();
                if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
                    return Err(invalid(
                        "matrix",
                        format!("row {i} has {} entries, expected {n}", r.len()),
                    ));
                }
                rows.concat()
            }
        };
        let n = (flat.len() as f64).sqrt().round() as usize;
        if n == 0 || n * n != flat.len() {
            return Err(invalid(
                "matrix",
                format!("{} entries do not form a square matrix", flat.len()),
            ));
        }
        if let Some(k) = flat.iter().position(|[re, im]| !re.is_finite() || !im.is_finite()) {
            return Err(invalid("matrix", format!("entry {k} is not finite")));
        }
        let expected: usize = self.dims.iter().product();
        if self.dims.is_empty() || self.dims.len() > 2 || self.dims.contains(&0) {
            return Err(invalid(
                "dims",
                format!("expected [d] or [d_a, d_b] with positive entries, got {:?}", self.dims),
            ));
        }
        if expected != n {
            return Err(invalid(
                "dims",
                format!("{:?} has product {expected} but the matrix is {n}x{n}", self.dims),
            ));
        }
        let data = flat.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        Ok(ComplexMatrix::from_vec(n, n, data).expect("square"))
    }

    pub fn hermitian(&self) -> Result<CMatrix, InputError> {
        let m = self.to_matrix()?;
        m.ensure_hermitian(VALIDATION_TOL)
            .map_err(|e| invalid("matrix", e.to_string()))?;
        Ok(m)
    }

    /// Density matrix, or with `raw` any Hermitian matrix projected onto
    /// the state space.
    pub fn density(&self, raw: bool) -> Result<DensityMatrix<f64>, InputError> {
        if raw {
            let m = self.hermitian()?;
            let top = hermitian_eig(&m)
                .map_err(|e| invalid("matrix", e.to_string()))?
                .max_eigenvalue();
            if top <= 0.0 {
                return Err(invalid("matrix", "no positive eigenvalue to normalise"));
            }
            return Ok(DensityMatrix::project(&m));
        }
        validate_density(&self.to_matrix()?, VALIDATION_TOL).map_err(|e| invalid("matrix", e.to_string()))
    }

    pub fn bipartite(&self, raw: bool) -> Result<BipartiteState<f64>, InputError> {
        let &[d_a, d_b] = self.dims.as_slice() else {
            return Err(invalid(
                "dims",
                format!("expected two factors [d_a, d_b], got {:?}", self.dims),
            ));
        };
        let rho = self.density(raw)?;
        BipartiteState::new(rho, d_a, d_b).map_err(|e| invalid("dims", e.to_string()))
    }
}

pub fn to_json(file: &StateFile) -> String {
    serde_json::to_string(file).expect("plain data")
}
