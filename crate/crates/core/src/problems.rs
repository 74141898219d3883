//! Seeded generation of sensing matrices, ground-truth signals, and noisy
//! observations, plus instance persistence.
//!
//! # Reproducibility
//!
//! Every random draw goes through one fixed, documented generator: ChaCha8
//! seeded with a caller-supplied 64-bit seed, using a distinct stream id per
//! purpose (matrix = 1, signal = 2, noise = 3, estimation = 4). Streams make
//! the draws for one purpose independent of whether/when the others run, so
//! reproducibility survives reordering of generation calls. Gaussian
//! matrices are filled in column-major order; noise is drawn in index order.
//!
//! # Instance files
//!
//! Instances persist as UTF-8 `key = value` text (conventional extension
//! `.spi`). Blank lines and `#` comments are ignored. Fields:
//!
//! ```text
//! version      format version, currently 1
//! m, n         matrix dimensions
//! kind         gaussian | pdct | explicit
//! s            sparsity of the ground truth
//! sigma        noise standard deviation
//! matrix_seed  present iff kind != explicit
//! signal_seed  present iff the truth is stored by recipe
//! noise_seed   always present
//! matrix_data  base64 little-endian f64, row-major; present iff kind = explicit
//! truth_data   base64 little-endian f64; present iff signal_seed is absent
//! b_data       base64 little-endian f64; present iff the observation cannot
//!              be re-synthesized from the seeds
//! ```
//!
//! Saving regenerates each component from its recipe and compares bit-exact;
//! dense data is embedded only for components the seeds cannot reproduce.
//! Round-trips are bit-exact either way.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::core::{Error, MatrixKind, ProblemInstance, Result, SensingMatrix, SparseSignal};

/// Stream ids separating the RNG purposes.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Purpose {
    Matrix = 1,
    Signal = 2,
    Noise = 3,
    Estimate = 4,
}

pub(crate) fn rng_for(seed: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng
}

/// Generation recipe for one problem instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub m: usize,
    pub n: usize,
    /// Matrix family; must be `Gaussian` or `Pdct` (an `Explicit` matrix has
    /// no generation recipe).
    pub matrix_kind: MatrixKind,
    /// Number of nonzeros in the ground truth.
    pub sparsity: usize,
    /// Absolute noise standard deviation (a "0.1% noise" setup is 0.001).
    pub sigma: f64,
    pub matrix_seed: u64,
    pub signal_seed: u64,
    pub noise_seed: u64,
}

/// An m-by-n matrix with i.i.d. N(0, 1/m) entries, so column norms
/// concentrate near 1. Entries are drawn in column-major order.
pub fn gen_gaussian(m: usize, n: usize, seed: u64) -> Result<SensingMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("matrix dimensions must be at least 1x1".into()));
    }
    let scale = 1.0 / (m as f64).sqrt();
    let mut rng = rng_for(seed, Purpose::Matrix);
    let mut data = DMatrix::zeros(m, n);
    for j in 0..n {
        for i in 0..m {
            let g: f64 = rng.sample(StandardNormal);
            data[(i, j)] = scale * g;
        }
    }
    Ok(SensingMatrix::from_generated(data, MatrixKind::Gaussian, seed))
}

fn pdct_entries(m: usize, n: usize, xi: &[f64]) -> DMatrix<f64> {
    let scale = 1.0 / (m as f64).sqrt();
    let tau = 2.0 * std::f64::consts::PI;
    // Column multipliers are 1-based; a 0-based multiplier would make the
    // first column constant.
    DMatrix::from_fn(m, n, |j, i| scale * (tau * (i + 1) as f64 * xi[j]).cos())
}

/// A random partial discrete cosine transform matrix: one frequency vector
/// `xi` with entries uniform on [0, 1) is drawn per matrix, and entry (j, i)
/// is `cos(2*pi*(i+1)*xi_j)/sqrt(m)`.
pub fn gen_pdct(m: usize, n: usize, seed: u64) -> Result<SensingMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("matrix dimensions must be at least 1x1".into()));
    }
    let mut rng = rng_for(seed, Purpose::Matrix);
    let xi: Vec<f64> = (0..m).map(|_| rng.random()).collect();
    Ok(SensingMatrix::from_generated(pdct_entries(m, n, &xi), MatrixKind::Pdct, seed))
}

/// Builds a PDCT matrix from caller-supplied frequencies (one per row)
/// instead of a seed. Intended for tests that need a known `xi`; the result
/// has kind `Explicit` since no seed can regenerate it.
pub fn pdct_from_xi(n: usize, xi: &[f64]) -> Result<SensingMatrix> {
    let m = xi.len();
    if m == 0 || n == 0 {
        return Err(Error::Domain("matrix dimensions must be at least 1x1".into()));
    }
    if !xi.iter().all(|v| v.is_finite()) {
        return Err(Error::Domain("frequencies must be finite".into()));
    }
    let data = pdct_entries(m, n, xi);
    let mut rows = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            rows.push(data[(i, j)]);
        }
    }
    SensingMatrix::explicit(m, n, &rows)
}

/// A length-n signal with a uniformly random size-s support and i.i.d.
/// standard normal values.
///
/// The support is drawn first (partial Fisher-Yates over 0..n); values are
/// then assigned in ascending index order, so the value stream does not
/// depend on the order the support was discovered in. Exact zeros are
/// redrawn to keep the sparsity exactly s.
pub fn gen_signal(n: usize, s: usize, seed: u64) -> Result<SparseSignal> {
    if s > n {
        return Err(Error::Domain(format!("sparsity {s} exceeds dimension {n}")));
    }
    let mut rng = rng_for(seed, Purpose::Signal);
    let mut idx: Vec<usize> = (0..n).collect();
    for k in 0..s {
        let j = rng.random_range(k..n);
        idx.swap(k, j);
    }
    let mut support = idx[..s].to_vec();
    support.sort_unstable();
    let mut values = DVector::zeros(n);
    for &i in &support {
        let mut v: f64 = rng.sample(StandardNormal);
        while v == 0.0 {
            v = rng.sample(StandardNormal);
        }
        values[i] = v;
    }
    SparseSignal::from_values(values)
}

/// `b = A*truth + sigma*eps` with `eps` i.i.d. standard normal; the noise
/// draw is skipped entirely when `sigma == 0`, so `b = A*truth` exactly.
fn synthesize_observation(
    matrix: &SensingMatrix,
    truth: &SparseSignal,
    sigma: f64,
    noise_seed: u64,
) -> DVector<f64> {
    let mut b = matrix.matrix() * truth.values();
    if sigma > 0.0 {
        let mut rng = rng_for(noise_seed, Purpose::Noise);
        for i in 0..b.len() {
            let e: f64 = rng.sample(StandardNormal);
            b[i] += sigma * e;
        }
    }
    b
}

/// Materializes a full problem instance from its generation recipe.
pub fn make_instance(spec: &InstanceSpec) -> Result<ProblemInstance> {
    if !spec.sigma.is_finite() || spec.sigma < 0.0 {
        return Err(Error::Domain("sigma must be finite and nonnegative".into()));
    }
    let matrix = match spec.matrix_kind {
        MatrixKind::Gaussian => gen_gaussian(spec.m, spec.n, spec.matrix_seed)?,
        MatrixKind::Pdct => gen_pdct(spec.m, spec.n, spec.matrix_seed)?,
        MatrixKind::Explicit => {
            return Err(Error::Domain(
                "an explicit matrix has no generation recipe; use ProblemInstance::from_parts"
                    .into(),
            ))
        }
    };
    let truth = gen_signal(spec.n, spec.sparsity, spec.signal_seed)?;
    let b = synthesize_observation(&matrix, &truth, spec.sigma, spec.noise_seed);
    Ok(ProblemInstance::from_parts(matrix, truth, spec.sigma, b, spec.noise_seed)?
        .with_signal_seed(spec.signal_seed))
}

const FORMAT_VERSION: u64 = 1;

fn encode_f64s(values: impl Iterator<Item = f64>) -> String {
    use base64::Engine as _;
    let mut bytes = Vec::new();
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    base64::engine::general_purpose::STANDARD.encode(bytes)
}

fn decode_f64s(text: &str, line: usize) -> Result<Vec<f64>> {
    use base64::Engine as _;
    let bytes = base64::engine::general_purpose::STANDARD
        .decode(text)
        .map_err(|e| Error::Parse { line, detail: format!("invalid base64: {e}") })?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Parse {
            line,
            detail: format!("embedded array has {} bytes, not a multiple of 8", bytes.len()),
        });
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

/// Serializes an instance to the documented text format.
///
/// Components whose seeds reproduce them bit-exactly are stored by recipe
/// only; anything else is embedded as base64 data.
pub fn save_instance(instance: &ProblemInstance, path: &Path) -> Result<()> {
    let matrix = instance.matrix();
    let truth = instance.truth();
    let mut out = String::new();
    out.push_str("# sparse12 problem instance\n");
    out.push_str(&format!("version = {FORMAT_VERSION}\n"));
    out.push_str(&format!("m = {}\n", matrix.m()));
    out.push_str(&format!("n = {}\n", matrix.n()));
    out.push_str(&format!("kind = {}\n", matrix.kind()));
    out.push_str(&format!("s = {}\n", truth.sparsity()));
    out.push_str(&format!("sigma = {}\n", instance.sigma()));

    let matrix_reproducible = match (matrix.kind(), matrix.seed()) {
        (MatrixKind::Gaussian, Some(seed)) => {
            out.push_str(&format!("matrix_seed = {seed}\n"));
            gen_gaussian(matrix.m(), matrix.n(), seed)?.matrix() == matrix.matrix()
        }
        (MatrixKind::Pdct, Some(seed)) => {
            out.push_str(&format!("matrix_seed = {seed}\n"));
            gen_pdct(matrix.m(), matrix.n(), seed)?.matrix() == matrix.matrix()
        }
        _ => false,
    };
    if !matrix_reproducible && matrix.kind() != MatrixKind::Explicit {
        return Err(Error::Domain(
            "matrix claims a generated kind but does not match its recipe".into(),
        ));
    }

    let truth_reproducible = match instance.signal_seed() {
        Some(seed) => {
            let regen = gen_signal(truth.n(), truth.sparsity(), seed)?;
            let same = regen.values() == truth.values();
            if same {
                out.push_str(&format!("signal_seed = {seed}\n"));
            }
            same
        }
        None => false,
    };

    out.push_str(&format!("noise_seed = {}\n", instance.noise_seed()));

    let b_reproducible = truth_reproducible
        && synthesize_observation(matrix, truth, instance.sigma(), instance.noise_seed())
            == *instance.observation();

    if !matrix_reproducible {
        out.push_str(&format!(
            "matrix_data = {}\n",
            encode_f64s(matrix.entries_row_major().into_iter())
        ));
    }
    if !truth_reproducible {
        out.push_str(&format!("truth_data = {}\n", encode_f64s(truth.values().iter().copied())));
    }
    if !b_reproducible {
        out.push_str(&format!(
            "b_data = {}\n",
            encode_f64s(instance.observation().iter().copied())
        ));
    }

    std::fs::write(path, out)?;
    Ok(())
}

struct Field {
    line: usize,
    value: String,
}

/// Reads an instance file, regenerating seed-stored components.
pub fn load_instance(path: &Path) -> Result<ProblemInstance> {
    let text = std::fs::read_to_string(path)?;
    let mut fields: std::collections::BTreeMap<String, Field> = std::collections::BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(Error::Parse { line, detail: format!("expected `key = value`, got {trimmed:?}") });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        const KNOWN: [&str; 12] = [
            "version",
            "m",
            "n",
            "kind",
            "s",
            "sigma",
            "matrix_seed",
            "signal_seed",
            "noise_seed",
            "matrix_data",
            "truth_data",
            "b_data",
        ];
        if !KNOWN.contains(&key.as_str()) {
            return Err(Error::Parse { line, detail: format!("unknown field {key:?}") });
        }
        if fields.insert(key.clone(), Field { line, value }).is_some() {
            return Err(Error::Parse { line, detail: format!("duplicate field {key:?}") });
        }
    }

    fn required<'a>(
        fields: &'a std::collections::BTreeMap<String, Field>,
        key: &str,
    ) -> Result<&'a Field> {
        fields
            .get(key)
            .ok_or_else(|| Error::Parse { line: 0, detail: format!("missing required field {key:?}") })
    }
    fn parse_num<T: std::str::FromStr>(field: &Field, key: &str) -> Result<T> {
        field.value.parse().map_err(|_| Error::Parse {
            line: field.line,
            detail: format!("invalid value {:?} for field {key:?}", field.value),
        })
    }

    let version: u64 = parse_num(required(&fields, "version")?, "version")?;
    if version != FORMAT_VERSION {
        return Err(Error::Version { found: version, supported: FORMAT_VERSION });
    }
    let m: usize = parse_num(required(&fields, "m")?, "m")?;
    let n: usize = parse_num(required(&fields, "n")?, "n")?;
    let kind_field = required(&fields, "kind")?;
    let kind = MatrixKind::parse(&kind_field.value).ok_or_else(|| Error::Parse {
        line: kind_field.line,
        detail: format!("unknown matrix kind {:?}", kind_field.value),
    })?;
    let s: usize = parse_num(required(&fields, "s")?, "s")?;
    let sigma: f64 = parse_num(required(&fields, "sigma")?, "sigma")?;
    let noise_seed: u64 = parse_num(required(&fields, "noise_seed")?, "noise_seed")?;

    let matrix = match kind {
        MatrixKind::Explicit => {
            let data = required(&fields, "matrix_data")?;
            let entries = decode_f64s(&data.value, data.line)?;
            if entries.len() != m * n {
                return Err(Error::Parse {
                    line: data.line,
                    detail: format!(
                        "matrix_data has {} entries, expected {}",
                        entries.len(),
                        m * n
                    ),
                });
            }
            SensingMatrix::explicit(m, n, &entries)?
        }
        generated => {
            if let Some(data) = fields.get("matrix_data") {
                return Err(Error::Parse {
                    line: data.line,
                    detail: "matrix_data is only allowed for kind = explicit".into(),
                });
            }
            let seed: u64 = parse_num(required(&fields, "matrix_seed")?, "matrix_seed")?;
            match generated {
                MatrixKind::Gaussian => gen_gaussian(m, n, seed)?,
                MatrixKind::Pdct => gen_pdct(m, n, seed)?,
                MatrixKind::Explicit => unreachable!(),
            }
        }
    };

    let (truth, signal_seed) = if let Some(data) = fields.get("truth_data") {
        let values = decode_f64s(&data.value, data.line)?;
        if values.len() != n {
            return Err(Error::Parse {
                line: data.line,
                detail: format!("truth_data has {} entries, expected {n}", values.len()),
            });
        }
        let truth = SparseSignal::from_values(DVector::from_vec(values))?;
        if truth.sparsity() != s {
            return Err(Error::Parse {
                line: data.line,
                detail: format!("truth_data has {} nonzeros but s = {s}", truth.sparsity()),
            });
        }
        (truth, None)
    } else {
        let seed: u64 = parse_num(required(&fields, "signal_seed")?, "signal_seed")?;
        (gen_signal(n, s, seed)?, Some(seed))
    };

    let b = if let Some(data) = fields.get("b_data") {
        let values = decode_f64s(&data.value, data.line)?;
        if values.len() != m {
            return Err(Error::Parse {
                line: data.line,
                detail: format!("b_data has {} entries, expected {m}", values.len()),
            });
        }
        DVector::from_vec(values)
    } else {
        synthesize_observation(&matrix, &truth, sigma, noise_seed)
    };

    let instance = ProblemInstance::from_parts(matrix, truth, sigma, b, noise_seed)?;
    Ok(match signal_seed {
        Some(seed) => instance.with_signal_seed(seed),
        None => instance,
    })
}
