// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufReader, Read};
use std::path::Path;

use prestige_core::model::Params;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub ingest_ms: f64,
    pub rank_ms: f64,
    pub total_ms: f64,
}

/// Provenance record written next to every score file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub params: Params,
    pub weighting: String,
    pub inputs: Vec<InputDigest>,
    pub journals: usize,
    pub documents: usize,
    pub unscored: usize,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub all_dangling_fallback: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

/// SHA-256 of the raw file bytes.
pub fn digest_file(path: &Path) -> io::Result<InputDigest> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    let mut bytes = 0u64;
    loop {
        let k = reader.read(&mut buf)?;
        if k == 0 {
            break;
        }
        bytes += k as u64;
        hasher.update(&buf[..k]);
    }
    Ok(InputDigest {
        path: path.display().to_string(),
        bytes,
        sha256: hex::encode(hasher.finalize()),
    })
}
