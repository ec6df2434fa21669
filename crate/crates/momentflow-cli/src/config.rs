//! Problem configuration: the JSON contract of the command line.

use momentflow::{ComplexMatrix, Complex64, MomentFamily};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub matrix: ComplexMatrix,
    pub moment: MomentFamily,
    #[serde(default)]
    pub cauchy: Option<CauchyConfig>,
    #[serde(default)]
    pub truncation: TruncationConfig,
    #[serde(default)]
    pub hints: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CauchyConfig {
    pub z0: [f64; 2],
    pub y0: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub tol: f64,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        TruncationConfig { n: 150, tol: 1e-10 }
    }
}

impl ProblemConfig {
    pub fn validate(&self) -> Result<(), String> {
        self.moment.validate().map_err(|e| e.to_string())?;
        if self.truncation.n < 1 {
            return Err("truncation.N must be at least 1".to_string());
        }
        if !(self.truncation.tol > 0.0) {
            return Err("truncation.tol must be positive".to_string());
        }
        if let Some(cauchy) = &self.cauchy {
            if cauchy.y0.len() != self.matrix.dim() {
                return Err(format!(
                    "cauchy.y0 has {} components, matrix dimension is {}",
                    cauchy.y0.len(),
                    self.matrix.dim()
                ));
            }
        }
        Ok(())
    }

    pub fn hints_complex(&self) -> Option<Vec<Complex64>> {
        self.hints
            .as_ref()
            .map(|hs| hs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }

    /// Cauchy datum; defaults to `y(0) = (1, …, 1)` when absent, so kernel
    /// probes (`growth`, `verify`) work on matrix-plus-family configs.
    pub fn cauchy_data(&self) -> (Complex64, Vec<Complex64>, bool) {
        match &self.cauchy {
            Some(c) => (
                Complex64::new(c.z0[0], c.z0[1]),
                c.y0.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
                false,
            ),
            None => (
                Complex64::ZERO,
                vec![Complex64::ONE; self.matrix.dim()],
                true,
            ),
        }
    }
}

pub fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

/// Parse points given inline (`"re,im;re,im"`) or as a JSON file of
/// `[[re,im], …]`.
pub fn parse_points(spec: &str) -> Result<Vec<Complex64>, String> {
    let path = std::path::Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read points file {spec}: {e}"))?;
        let pairs: Vec<[f64; 2]> =
            serde_json::from_str(&text).map_err(|e| format!("points file {spec}: {e}"))?;
        return Ok(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect());
    }
    spec.split(';')
        .filter(|chunk| !chunk.trim().is_empty())
        .map(|chunk| {
            let parts: Vec<&str> = chunk.split(',').map(str::trim).collect();
            match parts.as_slice() {
                [re] => re
                    .parse::<f64>()
                    .map(|r| Complex64::new(r, 0.0))
                    .map_err(|e| format!("bad point {chunk:?}: {e}")),
                [re, im] => {
                    let r = re.parse::<f64>().map_err(|e| format!("bad point {chunk:?}: {e}"))?;
                    let i = im.parse::<f64>().map_err(|e| format!("bad point {chunk:?}: {e}"))?;
                    Ok(Complex64::new(r, i))
                }
                _ => Err(format!("bad point {chunk:?}: expected re or re,im")),
            }
        })
        .collect()
}

pub fn parse_f64_list(spec: &str) -> Result<Vec<f64>, String> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("bad number {s:?}: {e}")))
        .collect()
}
