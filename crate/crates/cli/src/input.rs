use std::fs;
use std::path::Path;

use orthospec::surface::{build_surface, builtin, validate_declared, Builtin, GeometricSurface, HexCombinatorics, Slot, UshijimaPoint};
use serde::Deserialize;

use crate::CliError;

/// Surface description accepted on the command line.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SurfaceFile {
    Builtin {
        builtin: Builtin,
        coordinates: Vec<f64>,
        #[serde(default)]
        name: Option<String>,
    },
    Explicit {
        #[serde(default)]
        name: Option<String>,
        genus: usize,
        boundary: usize,
        hexagons: usize,
        matching: Vec<[[usize; 2]; 2]>,
        coordinates: Vec<f64>,
    },
}

pub struct LoadedSurface {
    pub name: String,
    pub surface: GeometricSurface,
}

impl SurfaceFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("malformed surface file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn build(&self) -> Result<LoadedSurface, CliError> {
        let (name, comb, coords) = match self {
            SurfaceFile::Builtin { builtin: b, coordinates, name } => {
                (name.clone().unwrap_or_else(|| b.name().to_string()), builtin(*b), coordinates)
            }
            SurfaceFile::Explicit { name, genus, boundary, hexagons, matching, coordinates } => {
                let pairs = matching.iter().map(|[a, b]| (Slot::new(a[0], a[1]), Slot::new(b[0], b[1]))).collect();
                let comb = HexCombinatorics::new(*hexagons, pairs);
                validate_declared(&comb, *genus, *boundary, *hexagons)?;
                (name.clone().unwrap_or_else(|| "surface".to_string()), comb, coordinates)
            }
        };
        let point = UshijimaPoint::new(coords.clone())?;
        Ok(LoadedSurface { name, surface: build_surface(&comb, &point)? })
    }
}
