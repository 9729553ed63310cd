//! JSON run records.
//!
//! Every command emits one object with the keys `command`, `input_dims`,
//! `parameters`, `results` and `wall_time_s`. The contents of `parameters`
//! and `results` depend on the command and are documented in the README.
//! RSE values that are exactly `-∞` serialize as the string `"-inf"`.

use serde::{Serialize, Serializer};

/// A decibel value; `-∞` serializes as `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Db(pub f64);

impl Serialize for Db {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetrics {
    pub command: &'static str,
    pub input_dims: Vec<usize>,
    pub parameters: Parameters,
    pub results: Results,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Parameters {
    Gen {
        tubal_rank: usize,
        seed: u64,
    },
    Compress {
        method: &'static str,
        k: Vec<usize>,
        target_ratio: Option<f64>,
    },
    Complete {
        rho: f64,
        tol: f64,
        tol_fit: f64,
        max_iter: usize,
        positivity: bool,
        mask_source: String,
        sample_rate: Option<f64>,
        seed: Option<u64>,
    },
    Info {
        tol: f64,
    },
    ImportPgm {
        frames: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct CompressRecord {
    pub k: usize,
    pub ratio: f64,
    pub achieved_ratio: f64,
    pub stored_scalars: usize,
    pub rse_db: Db,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Results {
    Gen {
        frobenius: f64,
    },
    Compress {
        records: Vec<CompressRecord>,
    },
    Complete {
        iterations: usize,
        converged: bool,
        observed: usize,
        final_primal_residual: f64,
        primal_residuals: Vec<f64>,
        tnn_values: Vec<f64>,
        rse_db: Option<Db>,
    },
    Info {
        frobenius: f64,
        multi_rank: Vec<usize>,
        tubal_rank: usize,
        tnn: f64,
        ttn: f64,
    },
    ImportPgm {
        height: usize,
        width: usize,
        frames: usize,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neg_inf_is_a_string_sentinel() {
        assert_eq!(serde_json::to_string(&Db(f64::NEG_INFINITY)).unwrap(), "\"-inf\"");
        assert_eq!(serde_json::to_string(&Db(-40.0)).unwrap(), "-40.0");
    }
}
