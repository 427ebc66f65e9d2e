//! Polynomial and state inputs: files or generator specs.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sphere_sos::poly::{random_poly, Monomial, RealPoly};
use sphere_sos::qwass::QuantumState;
use sphere_sos::SetDescriptor;

use crate::CliError;

/// Reads a polynomial from `source`:
/// - `const:<c>`: the constant `c`;
/// - `random:<degree>`: random coefficients up to `degree`, drawn from `seed`;
/// - `bilinear`: `sum_ij a_ij x_i y_j` with Gaussian `a_ij` (two spheres only);
/// - anything else: a polynomial JSON file.
pub fn load_poly(source: &str, set: &SetDescriptor, seed: u64) -> Result<RealPoly, CliError> {
    let layout = set.layout();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = if let Some(c) = source.strip_prefix("const:") {
        let c: f64 = c.parse().map_err(|_| CliError::Parse(format!("bad constant in `{source}`")))?;
        RealPoly::constant(&layout, c)
    } else if let Some(d) = source.strip_prefix("random:") {
        let d: usize = d.parse().map_err(|_| CliError::Parse(format!("bad degree in `{source}`")))?;
        random_poly(&layout, d, &mut rng)
    } else if source == "bilinear" {
        let SetDescriptor::SphereProduct { m: 2, n } = *set else {
            return Err(CliError::Parse(format!("`bilinear` needs a sphere2xN set, got {set}")));
        };
        let dim = 2 * n;
        let terms = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| {
            let m = Monomial::var(dim, i).mul(&Monomial::var(dim, n + j));
            (m, rng.sample::<f64, _>(StandardNormal))
        });
        let terms: Vec<_> = terms.collect();
        RealPoly::from_terms(&layout, terms).map_err(|e| CliError::Parse(e.to_string()))?
    } else {
        let text = read(source)?;
        RealPoly::from_json_str(&text).map_err(|e| CliError::Parse(format!("{source}: {e}")))?
    };
    set.check_layout(q.layout()).map_err(|e| CliError::Parse(format!("{source}: {e}")))?;
    Ok(q)
}

pub fn load_state(path: &str) -> Result<QuantumState, CliError> {
    let text = read(path)?;
    QuantumState::from_json_str(&text).map_err(|e| CliError::Parse(format!("{path}: {e}")))
}

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(Path::new(path)).map_err(|e| CliError::Parse(format!("{path}: {e}")))
}
