//! Diffusion kernels and the recursive kernel-deepening transformation.
//!
//! Level 0 is the diffusion kernel `exp(-beta * L)`, computed spectrally from
//! the Laplacian eigendecomposition. One deepening step maps a kernel `K` to
//! the Gaussian kernel of its induced feature-space distance
//! `d(i,j) = sqrt(K(i,i) - 2 K(i,j) + K(j,j))`, with bandwidth `h` set to the
//! average pairwise distance:
//!
//! ```text
//! K'(i,j) = 1/(sqrt(2 pi) h) * exp(-d(i,j)^2 / (2 h^2))
//! ```
//!
//! The bandwidth average is taken over all ordered node pairs, diagonal
//! included (so `h = sum(D) / n^2`). A variant restricts the sum to a node
//! subset while keeping the `n^2` denominator; see
//! [`bandwidth_heuristic_over`] and [`BandwidthDomain`].

use std::io::{self, BufRead, Write};

use ndarray::Array2;
use thiserror::Error;

use crate::graph::LaplacianMatrix;
use crate::rng::SeededRng;

/// Bandwidths below this are treated as degenerate: the Gaussian exponent
/// would overflow.
pub const BANDWIDTH_EPSILON: f64 = 1e-12;

/// Squared distances below this signal a non-PSD kernel; values in
/// `[NEG_RADICAND_TOLERANCE, 0)` are clamped to zero.
pub const NEG_RADICAND_TOLERANCE: f64 = -1e-10;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric within 1e-10 at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("beta must be nonnegative, got {beta}")]
    NegativeBeta { beta: f64 },
    #[error("eigendecomposition did not converge")]
    EigenFailed,
    #[error("squared distance {value} at ({i}, {j}) is below tolerance; kernel is not PSD")]
    NegativeSquaredDistance { i: usize, j: usize, value: f64 },
    #[error("bandwidth {value} is at or below epsilon {epsilon}; feature points coincide")]
    DegenerateBandwidth { value: f64, epsilon: f64 },
    #[error("degenerate kernel while deepening to level {level}")]
    DegenerateAtLevel { level: u32 },
    #[error("kernel is not positive semidefinite: min eigenvalue {min_eigenvalue}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },
    #[error("empty node subset for bandwidth")]
    EmptyBandwidthDomain,
}

/// Eigendecomposition of a symmetric matrix: `input = U diag(s) U^T` with
/// orthogonal `U` (eigenvectors in columns) and ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    vectors: Array2<f64>,
    values: Vec<f64>,
}

impl SpectralDecomposition {
    /// Eigenvector matrix, one eigenvector per column, matching `values` order.
    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }

    /// Eigenvalues in ascending order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Rebuild `U diag(f(s)) U^T`, exactly symmetrized.
    pub fn reconstruct_mapped(&self, f: impl Fn(f64) -> f64) -> Array2<f64> {
        let n = self.n();
        let mut scaled = self.vectors.clone();
        for (m, &s) in self.values.iter().enumerate() {
            let w = f(s);
            for i in 0..n {
                scaled[[i, m]] *= w;
            }
        }
        let mut k = scaled.dot(&self.vectors.t());
        symmetrize_exact(&mut k);
        k
    }
}

/// Symmetric eigendecomposition by the cyclic Jacobi method.
///
/// Deterministic for identical input. The input is defensively symmetrized as
/// `(M + M^T) / 2` first. Suited to the dense, desk-scale matrices this crate
/// works with.
pub fn spectral_decompose(matrix: &Array2<f64>) -> Result<SpectralDecomposition, KernelError> {
    let (rows, cols) = matrix.dim();
    if rows != cols {
        return Err(KernelError::NotSquare { rows, cols });
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(KernelError::NonFinite);
    }
    let n = rows;
    let mut a = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            a[[i, j]] = (matrix[[i, j]] + matrix[[j, i]]) / 2.0;
        }
    }
    let mut v = Array2::<f64>::eye(n);

    let scale = a.iter().fold(0.0f64, |acc, &x| acc.max(x.abs())).max(1.0);
    let tol = 1e-14 * scale;
    let max_sweeps = 100;
    let mut converged = n < 2;
    for _ in 0..max_sweeps {
        let mut off_max = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off_max = off_max.max(a[[p, q]].abs());
            }
        }
        if off_max <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let app = a[[p, p]];
                let aqq = a[[q, q]];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[[i, p]];
                        let aiq = a[[i, q]];
                        a[[i, p]] = c * aip - s * aiq;
                        a[[p, i]] = a[[i, p]];
                        a[[i, q]] = s * aip + c * aiq;
                        a[[q, i]] = a[[i, q]];
                    }
                }
                a[[p, p]] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a[[q, q]] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                a[[p, q]] = 0.0;
                a[[q, p]] = 0.0;

                for i in 0..n {
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = c * vip - s * viq;
                    v[[i, q]] = s * vip + c * viq;
                }
            }
        }
    }
    if !converged {
        return Err(KernelError::EigenFailed);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].partial_cmp(&a[[j, j]]).unwrap().then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| a[[i, i]]).collect();
    let mut vectors = Array2::<f64>::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[[i, dst]] = v[[i, src]];
        }
    }
    Ok(SpectralDecomposition { vectors, values })
}

/// Construction metadata carried by every kernel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelProvenance {
    pub level: u32,
    pub beta: f64,
    /// One bandwidth per deepening step, oldest first; length equals `level`.
    pub bandwidths: Vec<f64>,
}

/// Symmetric PSD similarity matrix at some deepening level.
///
/// Stored exactly symmetric (the upper triangle is mirrored at construction).
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    matrix: Array2<f64>,
    provenance: KernelProvenance,
}

impl KernelMatrix {
    /// Wrap a matrix, checking shape, finiteness, and symmetry within 1e-10
    /// absolute, then mirroring the upper triangle so storage is exact.
    pub fn from_matrix(
        mut matrix: Array2<f64>,
        provenance: KernelProvenance,
    ) -> Result<Self, KernelError> {
        let (rows, cols) = matrix.dim();
        if rows != cols {
            return Err(KernelError::NotSquare { rows, cols });
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(KernelError::NonFinite);
        }
        for i in 0..rows {
            for j in (i + 1)..cols {
                if (matrix[[i, j]] - matrix[[j, i]]).abs() > 1e-10 {
                    return Err(KernelError::NotSymmetric { i, j });
                }
            }
        }
        symmetrize_exact(&mut matrix);
        Ok(Self { matrix, provenance })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn provenance(&self) -> &KernelProvenance {
        &self.provenance
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.n()).fold(f64::NEG_INFINITY, |acc, i| acc.max(self.matrix[[i, i]]))
    }

    /// Check positive semidefiniteness: min eigenvalue must be at least
    /// `-1e-8 * max(1, max diagonal)`. Returns the min eigenvalue.
    pub fn validate_psd(&self) -> Result<f64, KernelError> {
        let deco = spectral_decompose(&self.matrix)?;
        let min_eigenvalue = deco.values().first().copied().unwrap_or(0.0);
        let bound = -1e-8 * self.max_diagonal().max(1.0);
        if min_eigenvalue < bound {
            return Err(KernelError::NotPositiveSemidefinite { min_eigenvalue });
        }
        Ok(min_eigenvalue)
    }
}

fn symmetrize_exact(m: &mut Array2<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            m[[j, i]] = m[[i, j]];
        }
    }
}

/// Diffusion kernel `exp(-beta * L)` via the spectral route
/// `U diag(exp(-beta s_m)) U^T`. `beta = 0` yields the identity exactly.
pub fn diffusion_kernel(lap: &LaplacianMatrix, beta: f64) -> Result<KernelMatrix, KernelError> {
    if beta == 0.0 {
        return identity_kernel(lap.n(), beta);
    }
    let deco = spectral_decompose(lap.matrix())?;
    diffusion_kernel_from_decomposition(&deco, beta)
}

/// Same as [`diffusion_kernel`] but reusing an existing decomposition of the
/// Laplacian, so one decomposition serves a whole beta grid.
pub fn diffusion_kernel_from_decomposition(
    deco: &SpectralDecomposition,
    beta: f64,
) -> Result<KernelMatrix, KernelError> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(KernelError::NegativeBeta { beta });
    }
    if beta == 0.0 {
        return identity_kernel(deco.n(), beta);
    }
    let k = deco.reconstruct_mapped(|s| (-beta * s).exp());
    KernelMatrix::from_matrix(k, KernelProvenance { level: 0, beta, bandwidths: Vec::new() })
}

fn identity_kernel(n: usize, beta: f64) -> Result<KernelMatrix, KernelError> {
    KernelMatrix::from_matrix(
        Array2::eye(n),
        KernelProvenance { level: 0, beta, bandwidths: Vec::new() },
    )
}

/// Pairwise feature-space distances induced by a kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    matrix: Array2<f64>,
}

impl DistanceMatrix {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest triangle-inequality violation `d(i,k) - d(i,j) - d(j,k)` over
    /// uniformly sampled triples. Nonpositive means the axiom held.
    pub fn max_triangle_violation_sampled(&self, triples: usize, seed: u64) -> f64 {
        let n = self.n();
        if n < 3 {
            return 0.0;
        }
        let mut rng = SeededRng::new(seed);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..triples {
            let i = rng.index(n);
            let j = rng.index(n);
            let k = rng.index(n);
            let v = self.matrix[[i, k]] - self.matrix[[i, j]] - self.matrix[[j, k]];
            worst = worst.max(v);
        }
        worst
    }
}

/// Distance `d(i,j) = sqrt(K(i,i) - 2 K(i,j) + K(j,j))`. Radicands in
/// `[-1e-10, 0)` are clamped to zero; anything lower is an error because it
/// means the kernel was not PSD.
pub fn feature_distance(kernel: &KernelMatrix) -> Result<DistanceMatrix, KernelError> {
    let n = kernel.n();
    let k = kernel.matrix();
    let mut d = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let rad = squared_distance(k, i, j)?;
            let dist = rad.sqrt();
            d[[i, j]] = dist;
            d[[j, i]] = dist;
        }
    }
    Ok(DistanceMatrix { matrix: d })
}

fn squared_distance(k: &Array2<f64>, i: usize, j: usize) -> Result<f64, KernelError> {
    let rad = k[[i, i]] - 2.0 * k[[i, j]] + k[[j, j]];
    if rad < NEG_RADICAND_TOLERANCE {
        return Err(KernelError::NegativeSquaredDistance { i, j, value: rad });
    }
    Ok(rad.max(0.0))
}

/// Average pairwise distance over all ordered pairs, zero diagonal included:
/// `h = sum(D) / n^2`.
pub fn bandwidth_heuristic(distances: &DistanceMatrix) -> Result<f64, KernelError> {
    let n = distances.n();
    finish_bandwidth(distances.matrix().sum() / (n as f64 * n as f64))
}

/// Bandwidth summed over ordered pairs drawn from `subset` only, while keeping
/// the all-nodes `n^2` denominator. This is the literal reading of the
/// pseudocode variant that averages over observed nodes; restricting the sum
/// without shrinking the denominator scales the bandwidth down by roughly
/// `(|subset| / n)^2`.
pub fn bandwidth_heuristic_over(
    distances: &DistanceMatrix,
    subset: &[usize],
) -> Result<f64, KernelError> {
    if subset.is_empty() {
        return Err(KernelError::EmptyBandwidthDomain);
    }
    let n = distances.n();
    let d = distances.matrix();
    let mut sum = 0.0;
    for &i in subset {
        for &j in subset {
            sum += d[[i, j]];
        }
    }
    finish_bandwidth(sum / (n as f64 * n as f64))
}

fn finish_bandwidth(h: f64) -> Result<f64, KernelError> {
    if !(h > BANDWIDTH_EPSILON) {
        return Err(KernelError::DegenerateBandwidth { value: h, epsilon: BANDWIDTH_EPSILON });
    }
    Ok(h)
}

/// One deepening step: Gaussian kernel of the induced distance at bandwidth
/// `h`. The diagonal is the constant `1/(sqrt(2 pi) h)` exactly.
pub fn gaussian_step(kernel: &KernelMatrix, h: f64) -> Result<KernelMatrix, KernelError> {
    if !(h > BANDWIDTH_EPSILON) {
        return Err(KernelError::DegenerateBandwidth { value: h, epsilon: BANDWIDTH_EPSILON });
    }
    let n = kernel.n();
    let k = kernel.matrix();
    let coefficient = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * h);
    let denom = 2.0 * h * h;
    let mut out = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        out[[i, i]] = coefficient;
        for j in (i + 1)..n {
            let rad = squared_distance(k, i, j)?;
            let value = coefficient * (-rad / denom).exp();
            out[[i, j]] = value;
            out[[j, i]] = value;
        }
    }
    let prior = kernel.provenance();
    let mut bandwidths = prior.bandwidths.clone();
    bandwidths.push(h);
    KernelMatrix::from_matrix(
        out,
        KernelProvenance { level: prior.level + 1, beta: prior.beta, bandwidths },
    )
}

/// Which node pairs feed the bandwidth average at each deepening step.
#[derive(Debug, Clone, Copy)]
pub enum BandwidthDomain<'a> {
    /// All ordered pairs (the default reading of the heuristic).
    AllNodes,
    /// Pairs of observed nodes only, `n^2` denominator kept.
    Observed(&'a [usize]),
}

/// Apply `level` deepening steps: distance, bandwidth, Gaussian, repeat.
/// `level = 0` returns the input unchanged. Deepening `a + b` levels equals
/// deepening `a` then `b` (identical floating-point sequence).
pub fn deepen(kernel: &KernelMatrix, level: u32) -> Result<KernelMatrix, KernelError> {
    deepen_with(kernel, level, BandwidthDomain::AllNodes)
}

/// [`deepen`] with an explicit bandwidth domain. Degeneracy is reported with
/// the level that failed to build.
pub fn deepen_with(
    kernel: &KernelMatrix,
    level: u32,
    domain: BandwidthDomain<'_>,
) -> Result<KernelMatrix, KernelError> {
    let mut current = kernel.clone();
    for _ in 0..level {
        current = deepen_once(&current, domain)
            .map_err(|err| at_level(err, current.provenance().level + 1))?;
    }
    Ok(current)
}

fn deepen_once(
    kernel: &KernelMatrix,
    domain: BandwidthDomain<'_>,
) -> Result<KernelMatrix, KernelError> {
    let distances = feature_distance(kernel)?;
    let h = match domain {
        BandwidthDomain::AllNodes => bandwidth_heuristic(&distances)?,
        BandwidthDomain::Observed(subset) => bandwidth_heuristic_over(&distances, subset)?,
    };
    gaussian_step(kernel, h)
}

fn at_level(err: KernelError, level: u32) -> KernelError {
    match err {
        KernelError::DegenerateBandwidth { .. } => KernelError::DegenerateAtLevel { level },
        other => other,
    }
}

/// Explicit feature embedding `V = diag(sqrt(s+)) U^T` from the kernel's
/// eigendecomposition; column `i` is the feature vector of node `i`, so
/// `V^T V` reconstructs the kernel. Eigenvalues in
/// `[-1e-8 * max(1, max diag), 0)` are clamped to zero; anything lower is an
/// error.
pub fn explicit_feature_embedding(kernel: &KernelMatrix) -> Result<Array2<f64>, KernelError> {
    let deco = spectral_decompose(kernel.matrix())?;
    let bound = -1e-8 * kernel.max_diagonal().max(1.0);
    let n = deco.n();
    let mut features = Array2::<f64>::zeros((n, n));
    for (m, &s) in deco.values().iter().enumerate() {
        if s < bound {
            return Err(KernelError::NotPositiveSemidefinite { min_eigenvalue: s });
        }
        let w = s.max(0.0).sqrt();
        for i in 0..n {
            features[[m, i]] = w * deco.vectors()[[i, m]];
        }
    }
    Ok(features)
}

// ---------------------------------------------------------------------------
// Kernel CSV interchange
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum KernelCsvError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("missing provenance header line (expected leading '#')")]
    MissingHeader,
    #[error("malformed provenance header: {0}")]
    BadHeader(String),
    #[error("line {line}: bad value {cell:?}")]
    BadValue { line: usize, cell: String },
    #[error("line {line}: expected {expected} columns, found {found}")]
    BadWidth { line: usize, expected: usize, found: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Write the kernel as dense CSV behind one `#`-prefixed provenance line.
/// Floats carry 17 significant digits, which round-trips `f64` exactly.
pub fn write_kernel_csv<W: Write>(out: &mut W, kernel: &KernelMatrix) -> io::Result<()> {
    let p = kernel.provenance();
    let bandwidths: Vec<String> = p.bandwidths.iter().map(|h| format!("{h:.16e}")).collect();
    writeln!(
        out,
        "# level={} beta={:.16e} bandwidths={}",
        p.level,
        p.beta,
        bandwidths.join(",")
    )?;
    let n = kernel.n();
    let mut row = String::new();
    for i in 0..n {
        row.clear();
        for j in 0..n {
            if j > 0 {
                row.push(',');
            }
            row.push_str(&format!("{:.16e}", kernel.matrix()[[i, j]]));
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

pub fn read_kernel_csv<R: BufRead>(reader: R) -> Result<KernelMatrix, KernelCsvError> {
    let mut lines = reader.lines();
    let header = lines.next().ok_or(KernelCsvError::MissingHeader)??;
    let header = header.strip_prefix('#').ok_or(KernelCsvError::MissingHeader)?.trim();

    let mut level: Option<u32> = None;
    let mut beta: Option<f64> = None;
    let mut bandwidths: Option<Vec<f64>> = None;
    for field in header.split_whitespace() {
        let (key, value) =
            field.split_once('=').ok_or_else(|| KernelCsvError::BadHeader(field.to_string()))?;
        match key {
            "level" => {
                level = Some(
                    value.parse().map_err(|_| KernelCsvError::BadHeader(field.to_string()))?,
                )
            }
            "beta" => {
                beta = Some(
                    value.parse().map_err(|_| KernelCsvError::BadHeader(field.to_string()))?,
                )
            }
            "bandwidths" => {
                let list = if value.is_empty() {
                    Vec::new()
                } else {
                    value
                        .split(',')
                        .map(|tok| {
                            tok.parse::<f64>()
                                .map_err(|_| KernelCsvError::BadHeader(tok.to_string()))
                        })
                        .collect::<Result<_, _>>()?
                };
                bandwidths = Some(list);
            }
            _ => return Err(KernelCsvError::BadHeader(field.to_string())),
        }
    }
    let (level, beta, bandwidths) = match (level, beta, bandwidths) {
        (Some(l), Some(b), Some(h)) => (l, b, h),
        _ => return Err(KernelCsvError::BadHeader("missing level/beta/bandwidths".into())),
    };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| KernelCsvError::BadValue {
                    line: idx + 2,
                    cell: tok.to_string(),
                })
            })
            .collect::<Result<_, _>>()?;
        rows.push(row);
    }
    let n = rows.len();
    let mut matrix = Array2::<f64>::zeros((n, n));
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(KernelCsvError::BadWidth { line: i + 2, expected: n, found: row.len() });
        }
        for (j, &v) in row.iter().enumerate() {
            matrix[[i, j]] = v;
        }
    }
    Ok(KernelMatrix::from_matrix(matrix, KernelProvenance { level, beta, bandwidths })?)
}
