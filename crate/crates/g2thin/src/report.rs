//! Machine-readable outputs: JSON report envelopes, frozen CSV schemas, and
//! binary field snapshots.
//!
//! JSON is the superset format: every report is wrapped in an envelope that
//! embeds the crate version and the fully resolved configuration, serialized
//! with a fixed field order so identical inputs give byte-identical files.
//! CSV is the plot-ready subset. Snapshots store a spinor field as a small
//! header (dimensions, twist, epsilon) followed by interleaved real/imag
//! little-endian 64-bit floats, u block then v block, row-major.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64 as C;
use serde::Serialize;

use crate::cylinder::SpinorGrid;
use crate::spectral::{ScalingReport, SpectrumReport};
use crate::{Error, Result};

/// Crate version stamped into every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Snapshot file magic.
pub const SNAPSHOT_MAGIC: &[u8; 8] = b"G2THIN1\0";

/// Report wrapper embedding the version tag and the resolved configuration.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<Cfg: Serialize, Rep: Serialize> {
    pub version: &'static str,
    pub config: Cfg,
    pub report: Rep,
}

impl<Cfg: Serialize, Rep: Serialize> Envelope<Cfg, Rep> {
    pub fn new(config: Cfg, report: Rep) -> Self {
        Envelope {
            version: VERSION,
            config,
            report,
        }
    }

    /// Pretty JSON with a trailing newline; field order is declaration order.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Write a string to a file, creating parent directories if needed.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// CSV schema: epsilon,alpha,beta,lambda_surface_minus,lambda_d,bound,margin
pub fn spectrum_csv(epsilon: f64, alpha: f64, beta: f64, rep: &SpectrumReport) -> String {
    let mut s = String::from("epsilon,alpha,beta,lambda_surface_minus,lambda_d,bound,margin\n");
    s.push_str(&format!(
        "{},{},{},{},{},{},{}\n",
        epsilon, alpha, beta, rep.lambda_surface_minus, rep.lambda_d, rep.bound, rep.margin
    ));
    s
}

/// CSV schema: epsilon,inverse_sup_norm,sigma_min rows, then comment footers
/// `# fitted_exponent=` and `# target_exponent=`.
pub fn scaling_csv(rep: &ScalingReport) -> String {
    let mut s = String::from("epsilon,inverse_sup_norm,sigma_min\n");
    for i in 0..rep.epsilons.len() {
        s.push_str(&format!(
            "{},{},{}\n",
            rep.epsilons[i], rep.inverse_sup_norms[i], rep.sigma_mins[i]
        ));
    }
    s.push_str(&format!("# fitted_exponent={}\n", rep.fitted_exponent));
    s.push_str(&format!("# target_exponent={}\n", rep.target_exponent));
    s
}

/// Write a binary field snapshot: magic, m/n2/n3 as u32 LE, twist and
/// epsilon as f64 LE, then interleaved re/im f64 LE for u then v.
pub fn write_snapshot(
    path: &Path,
    epsilon: f64,
    twist: (f64, f64),
    field: &SpinorGrid,
) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(SNAPSHOT_MAGIC)?;
    for d in [field.m as u32, field.n2 as u32, field.n3 as u32] {
        f.write_all(&d.to_le_bytes())?;
    }
    for x in [twist.0, twist.1, epsilon] {
        f.write_all(&x.to_le_bytes())?;
    }
    for z in field.u.iter().chain(field.v.iter()) {
        f.write_all(&z.re.to_le_bytes())?;
        f.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

/// Read a snapshot back: (epsilon, twist, field).
pub fn read_snapshot(path: &Path) -> Result<(f64, (f64, f64), SpinorGrid)> {
    let mut f = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    f.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::GridInvalid("snapshot magic mismatch".into()));
    }
    let mut u32buf = [0u8; 4];
    let mut dims = [0usize; 3];
    for d in dims.iter_mut() {
        f.read_exact(&mut u32buf)?;
        *d = u32::from_le_bytes(u32buf) as usize;
    }
    let mut f64buf = [0u8; 8];
    let mut head = [0f64; 3];
    for x in head.iter_mut() {
        f.read_exact(&mut f64buf)?;
        *x = f64::from_le_bytes(f64buf);
    }
    let [m, n2, n3] = dims;
    let len = (m + 1) * n2 * n3;
    let mut read_block = |len: usize| -> Result<Vec<C>> {
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            f.read_exact(&mut f64buf)?;
            let re = f64::from_le_bytes(f64buf);
            f.read_exact(&mut f64buf)?;
            let im = f64::from_le_bytes(f64buf);
            out.push(C::new(re, im));
        }
        Ok(out)
    };
    let u = read_block(len)?;
    let v = read_block(len)?;
    Ok((
        head[2],
        (head[0], head[1]),
        SpinorGrid { m, n2, n3, u, v },
    ))
}
