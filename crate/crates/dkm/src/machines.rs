//! Base kernel machines and the deep-kernel-machine driver.
//!
//! Two base machines operate on a precomputed kernel:
//!
//! * the simple machine scores a node by its average similarity to observed
//!   class-1 nodes minus its average similarity to observed class-2 nodes,
//!   which with the right threshold is exactly nearest-centroid
//!   classification in feature space;
//! * a C-SVM trained on the observed-by-observed kernel block by pairwise
//!   working-set ascent (SMO with maximal-violating-pair selection).
//!
//! The kernel-density reading of the deepened classifier needs no separate
//! code path: scoring with the Gaussian-stepped kernel through the simple
//! machine is that density-difference classifier, so the driver composes
//! deepening with a base machine and nothing more.

use std::fmt;
use std::io::{self, Write};

use ndarray::Array2;
use thiserror::Error;

use crate::graph::{Label, LabelSet};
use crate::kernel::{deepen_with, BandwidthDomain, KernelError, KernelMatrix};

#[derive(Debug, Error)]
pub enum MachineError {
    #[error("class {class} has no observed nodes")]
    ClassAbsent { class: u8 },
    #[error("label count {labels} does not match kernel size {n}")]
    LabelCountMismatch { labels: usize, n: usize },
    #[error("dimension mismatch: expected {expected} observed columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cost must be positive and finite, got {cost}")]
    InvalidCost { cost: f64 },
    #[error("kernel is not PSD: working pair ({i}, {j}) has curvature {eta}")]
    NegativeCurvature { i: usize, j: usize, eta: f64 },
    #[error("empty cost grid for the svm machine")]
    EmptyCostGrid,
}

/// Propagates either a kernel-construction failure or a machine failure out
/// of the composed deep-kernel-machine run.
#[derive(Debug, Error)]
pub enum DkmError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MachineKind {
    Simple,
    Svm,
}

impl fmt::Display for MachineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MachineKind::Simple => write!(f, "simple"),
            MachineKind::Svm => write!(f, "svm"),
        }
    }
}

impl std::str::FromStr for MachineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "simple" => Ok(MachineKind::Simple),
            "svm" => Ok(MachineKind::Svm),
            other => Err(format!("unknown machine {other:?} (expected simple or svm)")),
        }
    }
}

/// One real score per missing-label node; higher means more class-1.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionScores {
    pub machine: MachineKind,
    pub level: u32,
    pub beta: f64,
    /// SVM cost the model was trained at; `None` for the simple machine.
    pub cost: Option<f64>,
    scores: Vec<(usize, f64)>,
}

impl DecisionScores {
    fn new(
        machine: MachineKind,
        level: u32,
        beta: f64,
        cost: Option<f64>,
        scores: Vec<(usize, f64)>,
    ) -> Self {
        debug_assert!(scores.windows(2).all(|w| w[0].0 < w[1].0));
        Self { machine, level, beta, cost, scores }
    }

    /// `(node index, score)` pairs in ascending node order, one per
    /// missing-label node.
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.scores
    }

    pub fn get(&self, node: usize) -> Option<f64> {
        self.scores
            .binary_search_by_key(&node, |&(i, _)| i)
            .ok()
            .map(|pos| self.scores[pos].1)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

fn class_split(labels: &LabelSet, n: usize) -> Result<(Vec<usize>, Vec<usize>), MachineError> {
    if labels.len() != n {
        return Err(MachineError::LabelCountMismatch { labels: labels.len(), n });
    }
    let c1 = labels.class_indices(Label::Class1);
    let c2 = labels.class_indices(Label::Class2);
    if c1.is_empty() {
        return Err(MachineError::ClassAbsent { class: 1 });
    }
    if c2.is_empty() {
        return Err(MachineError::ClassAbsent { class: 2 });
    }
    Ok((c1, c2))
}

/// Mean-similarity difference score for every missing-label node:
/// average kernel value to observed class 1 minus average to observed class 2.
pub fn simple_km_scores(
    kernel: &KernelMatrix,
    labels: &LabelSet,
) -> Result<DecisionScores, MachineError> {
    let (c1, c2) = class_split(labels, kernel.n())?;
    let k = kernel.matrix();
    let n1 = c1.len() as f64;
    let n2 = c2.len() as f64;
    let scores = labels
        .miss_indices()
        .into_iter()
        .map(|v| {
            let s1: f64 = c1.iter().map(|&i| k[[v, i]]).sum();
            let s2: f64 = c2.iter().map(|&i| k[[v, i]]).sum();
            (v, s1 / n1 - s2 / n2)
        })
        .collect();
    let p = kernel.provenance();
    Ok(DecisionScores::new(MachineKind::Simple, p.level, p.beta, None, scores))
}

/// The threshold that turns the simple machine into the nearest-centroid rule:
/// half the mean within-class-1 kernel value minus half the mean
/// within-class-2 kernel value, both double sums including the diagonal.
pub fn centroid_threshold(kernel: &KernelMatrix, labels: &LabelSet) -> Result<f64, MachineError> {
    let (c1, c2) = class_split(labels, kernel.n())?;
    let k = kernel.matrix();
    let mut s1 = 0.0;
    for &i in &c1 {
        for &j in &c1 {
            s1 += k[[i, j]];
        }
    }
    let mut s2 = 0.0;
    for &i in &c2 {
        for &j in &c2 {
            s2 += k[[i, j]];
        }
    }
    let n1 = c1.len() as f64;
    let n2 = c2.len() as f64;
    Ok(s1 / (2.0 * n1 * n1) - s2 / (2.0 * n2 * n2))
}

/// Hard labels from scores: class 1 strictly above the threshold, class 2
/// otherwise (ties included).
pub fn classify_threshold(scores: &DecisionScores, threshold: f64) -> Vec<(usize, Label)> {
    scores
        .entries()
        .iter()
        .map(|&(v, f)| (v, if f > threshold { Label::Class1 } else { Label::Class2 }))
        .collect()
}

// ---------------------------------------------------------------------------
// SVM on a precomputed kernel
// ---------------------------------------------------------------------------

/// Solver settings; the defaults satisfy the KKT certificate used throughout.
#[derive(Debug, Clone, Copy)]
pub struct SmoOptions {
    /// Stop when the maximal violating pair gap drops to this.
    pub tolerance: f64,
    /// Hard cap on pair updates; hitting it is reported, not an error.
    pub max_pair_updates: u64,
    /// Record the dual objective after every update (testing aid).
    pub track_objective: bool,
}

impl Default for SmoOptions {
    fn default() -> Self {
        Self { tolerance: 1e-3, max_pair_updates: 1_000_000, track_objective: false }
    }
}

/// Trained C-SVM dual solution over the observed nodes.
#[derive(Debug, Clone)]
pub struct SvmModel {
    /// Nonnegative multipliers, one per observed node, each in `[0, cost]`.
    pub alphas: Vec<f64>,
    /// Signs per observed node: class 1 is +1, class 2 is -1.
    pub ys: Vec<f64>,
    pub bias: f64,
    pub cost: f64,
    /// Observed positions with `alpha > 0`.
    pub support_indices: Vec<usize>,
    pub pair_updates: u64,
    pub hit_update_cap: bool,
    /// Dual objective after each pair update when tracking was requested.
    pub objective_trace: Option<Vec<f64>>,
}

/// Solve the C-SVM dual
/// `max sum(alpha) - 1/2 sum alpha_i alpha_j y_i y_j K(i,j)` subject to
/// `0 <= alpha <= C` and `sum alpha_i y_i = 0`, by repeated analytic
/// optimization of the maximal violating pair. Deterministic: pair choice
/// breaks ties by index.
pub fn svm_train(
    k_obs: &Array2<f64>,
    ys: &[f64],
    cost: f64,
) -> Result<SvmModel, MachineError> {
    svm_train_with(k_obs, ys, cost, SmoOptions::default())
}

pub fn svm_train_with(
    k_obs: &Array2<f64>,
    ys: &[f64],
    cost: f64,
    options: SmoOptions,
) -> Result<SvmModel, MachineError> {
    let n = ys.len();
    if k_obs.nrows() != n || k_obs.ncols() != n {
        return Err(MachineError::DimensionMismatch { expected: n, found: k_obs.nrows() });
    }
    if !cost.is_finite() || cost <= 0.0 {
        return Err(MachineError::InvalidCost { cost });
    }
    if !ys.contains(&1.0) {
        return Err(MachineError::ClassAbsent { class: 1 });
    }
    if !ys.contains(&-1.0) {
        return Err(MachineError::ClassAbsent { class: 2 });
    }

    let mut alphas = vec![0.0f64; n];
    // u_i = sum_j alpha_j y_j K(i, j), maintained incrementally
    let mut u = vec![0.0f64; n];
    let mut updates: u64 = 0;
    let mut hit_cap = false;
    let mut trace = options.track_objective.then(Vec::new);

    let in_up = |a: f64, y: f64| (y > 0.0 && a < cost) || (y < 0.0 && a > 0.0);
    let in_low = |a: f64, y: f64| (y > 0.0 && a > 0.0) || (y < 0.0 && a < cost);

    loop {
        // maximal violating pair: i maximizes y - u over the "up" set,
        // j minimizes it over the "low" set
        let mut i_up = None;
        let mut best_up = f64::NEG_INFINITY;
        let mut i_low = None;
        let mut best_low = f64::INFINITY;
        for t in 0..n {
            let margin = ys[t] - u[t];
            if in_up(alphas[t], ys[t]) && margin > best_up {
                best_up = margin;
                i_up = Some(t);
            }
            if in_low(alphas[t], ys[t]) && margin < best_low {
                best_low = margin;
                i_low = Some(t);
            }
        }
        let (i, j) = match (i_up, i_low) {
            (Some(i), Some(j)) => (i, j),
            _ => break,
        };
        if best_up - best_low <= options.tolerance {
            break;
        }
        if updates >= options.max_pair_updates {
            hit_cap = true;
            break;
        }

        let eta = k_obs[[i, i]] + k_obs[[j, j]] - 2.0 * k_obs[[i, j]];
        if eta < -1e-8 {
            return Err(MachineError::NegativeCurvature { i, j, eta });
        }
        let eta = eta.max(1e-12);

        let (lo, hi) = if ys[i] != ys[j] {
            ((alphas[j] - alphas[i]).max(0.0), (cost + alphas[j] - alphas[i]).min(cost))
        } else {
            ((alphas[i] + alphas[j] - cost).max(0.0), (alphas[i] + alphas[j]).min(cost))
        };
        if hi - lo <= 0.0 {
            break;
        }

        let e_i = u[i] - ys[i];
        let e_j = u[j] - ys[j];
        let old_j = alphas[j];
        let old_i = alphas[i];
        let new_j = (old_j + ys[j] * (e_i - e_j) / eta).clamp(lo, hi);
        if new_j == old_j {
            break;
        }
        let new_i = old_i + ys[i] * ys[j] * (old_j - new_j);
        alphas[i] = new_i;
        alphas[j] = new_j;

        let delta_i = (new_i - old_i) * ys[i];
        let delta_j = (new_j - old_j) * ys[j];
        for t in 0..n {
            u[t] += delta_i * k_obs[[i, t]] + delta_j * k_obs[[j, t]];
        }
        updates += 1;
        if let Some(trace) = trace.as_mut() {
            trace.push(dual_objective(&alphas, ys, &u));
        }
    }

    let bound_slack = 1e-12 * cost.max(1.0);
    let unbounded: Vec<usize> = (0..n)
        .filter(|&t| alphas[t] > bound_slack && alphas[t] < cost - bound_slack)
        .collect();
    let bias = if unbounded.is_empty() {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for t in 0..n {
            let margin = ys[t] - u[t];
            if in_up(alphas[t], ys[t]) {
                lo = lo.max(margin);
            }
            if in_low(alphas[t], ys[t]) {
                hi = hi.min(margin);
            }
        }
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => (lo + hi) / 2.0,
            (true, false) => lo,
            (false, true) => hi,
            (false, false) => 0.0,
        }
    } else {
        unbounded.iter().map(|&t| ys[t] - u[t]).sum::<f64>() / unbounded.len() as f64
    };

    let support_indices = (0..n).filter(|&t| alphas[t] > bound_slack).collect();
    Ok(SvmModel {
        alphas,
        ys: ys.to_vec(),
        bias,
        cost,
        support_indices,
        pair_updates: updates,
        hit_update_cap: hit_cap,
        objective_trace: trace,
    })
}

/// Dual objective `sum alpha - 1/2 sum alpha_i y_i u_i`.
fn dual_objective(alphas: &[f64], ys: &[f64], u: &[f64]) -> f64 {
    let linear: f64 = alphas.iter().sum();
    let quadratic: f64 = alphas.iter().zip(ys).zip(u).map(|((&a, &y), &ui)| a * y * ui).sum();
    linear - quadratic / 2.0
}

/// Largest violation of the dual KKT conditions at the model's bias, with the
/// margins recomputed from scratch. A healthy solve keeps this at or below
/// the solver tolerance.
pub fn max_kkt_violation(model: &SvmModel, k_obs: &Array2<f64>) -> f64 {
    let n = model.ys.len();
    let bound_slack = 1e-12 * model.cost.max(1.0);
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut ui = 0.0;
        for j in 0..n {
            ui += model.alphas[j] * model.ys[j] * k_obs[[i, j]];
        }
        let yf = model.ys[i] * (ui + model.bias);
        let violation = if model.alphas[i] <= bound_slack {
            (1.0 - yf).max(0.0)
        } else if model.alphas[i] >= model.cost - bound_slack {
            (yf - 1.0).max(0.0)
        } else {
            (yf - 1.0).abs()
        };
        worst = worst.max(violation);
    }
    worst
}

/// Scores for missing nodes from a kernel block of shape
/// `miss_indices.len() x observed`: `f(v) = sum_i alpha_i y_i K(v, v_i) + b`.
pub fn svm_scores(
    model: &SvmModel,
    k_cross: &Array2<f64>,
    miss_indices: &[usize],
    level: u32,
    beta: f64,
) -> Result<DecisionScores, MachineError> {
    if k_cross.ncols() != model.alphas.len() {
        return Err(MachineError::DimensionMismatch {
            expected: model.alphas.len(),
            found: k_cross.ncols(),
        });
    }
    if k_cross.nrows() != miss_indices.len() {
        return Err(MachineError::DimensionMismatch {
            expected: miss_indices.len(),
            found: k_cross.nrows(),
        });
    }
    let scores = miss_indices
        .iter()
        .enumerate()
        .map(|(row, &v)| {
            let f: f64 = (0..model.alphas.len())
                .map(|i| model.alphas[i] * model.ys[i] * k_cross[[row, i]])
                .sum();
            (v, f + model.bias)
        })
        .collect();
    Ok(DecisionScores::new(MachineKind::Svm, level, beta, Some(model.cost), scores))
}

/// Observed indices (ascending) and their class signs for SVM training.
pub fn observed_signs(labels: &LabelSet) -> (Vec<usize>, Vec<f64>) {
    let obs = labels.obs_indices();
    let ys = obs
        .iter()
        .map(|&i| if labels.get(i) == Label::Class1 { 1.0 } else { -1.0 })
        .collect();
    (obs, ys)
}

pub fn gather_block(m: &Array2<f64>, rows: &[usize], cols: &[usize]) -> Array2<f64> {
    let mut out = Array2::<f64>::zeros((rows.len(), cols.len()));
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            out[[a, b]] = m[[i, j]];
        }
    }
    out
}

/// Score one kernel with one machine. The simple machine yields a single
/// score set; the SVM yields one per cost in grid order, so the harness can
/// select afterwards.
pub fn score_with_machine(
    kernel: &KernelMatrix,
    labels: &LabelSet,
    machine: MachineKind,
    cost_grid: &[f64],
) -> Result<Vec<DecisionScores>, MachineError> {
    match machine {
        MachineKind::Simple => Ok(vec![simple_km_scores(kernel, labels)?]),
        MachineKind::Svm => {
            if cost_grid.is_empty() {
                return Err(MachineError::EmptyCostGrid);
            }
            let (obs, ys) = observed_signs(labels);
            if !ys.contains(&1.0) {
                return Err(MachineError::ClassAbsent { class: 1 });
            }
            if !ys.contains(&-1.0) {
                return Err(MachineError::ClassAbsent { class: 2 });
            }
            let miss = labels.miss_indices();
            let k_obs = gather_block(kernel.matrix(), &obs, &obs);
            let k_cross = gather_block(kernel.matrix(), &miss, &obs);
            let p = kernel.provenance();
            cost_grid
                .iter()
                .map(|&cost| {
                    let model = svm_train(&k_obs, &ys, cost)?;
                    svm_scores(&model, &k_cross, &miss, p.level, p.beta)
                })
                .collect()
        }
    }
}

/// Deep kernel machine: deepen the kernel, then apply the base machine.
pub fn dkm_run(
    kernel: &KernelMatrix,
    labels: &LabelSet,
    level: u32,
    machine: MachineKind,
    cost_grid: Option<&[f64]>,
    domain: BandwidthDomain<'_>,
) -> Result<Vec<DecisionScores>, DkmError> {
    let deepened = deepen_with(kernel, level, domain)?;
    Ok(score_with_machine(&deepened, labels, machine, cost_grid.unwrap_or(&[]))?)
}

/// Scores CSV: `node_id,score,machine_tag,level,beta,cost` plus an optional
/// trailing `label` column for thresholded hard labels.
pub fn write_scores_csv<W: Write>(
    out: &mut W,
    score_sets: &[DecisionScores],
    node_ids: &[String],
    hard_labels: Option<&[Vec<(usize, Label)>]>,
) -> io::Result<()> {
    if hard_labels.is_some() {
        writeln!(out, "node_id,score,machine_tag,level,beta,cost,label")?;
    } else {
        writeln!(out, "node_id,score,machine_tag,level,beta,cost")?;
    }
    for (set_idx, set) in score_sets.iter().enumerate() {
        for (entry_idx, &(node, score)) in set.entries().iter().enumerate() {
            let cost = set.cost.map(|c| format!("{c:.16e}")).unwrap_or_default();
            write!(
                out,
                "{},{:.16e},{},{},{:.16e},{}",
                node_ids[node], score, set.machine, set.level, set.beta, cost
            )?;
            if let Some(all_labels) = hard_labels {
                writeln!(out, ",{}", all_labels[set_idx][entry_idx].1)?;
            } else {
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_sbm, laplacian};
    use crate::kernel::{
        diffusion_kernel, explicit_feature_embedding, KernelMatrix, KernelProvenance,
    };
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};

    fn kernel_from(m: Array2<f64>) -> KernelMatrix {
        KernelMatrix::from_matrix(m, KernelProvenance { level: 0, beta: 1.0, bandwidths: vec![] })
            .unwrap()
    }

    fn labels_from(pattern: &str) -> LabelSet {
        LabelSet::new(
            pattern
                .chars()
                .map(|c| match c {
                    '1' => Label::Class1,
                    '2' => Label::Class2,
                    _ => Label::Unknown,
                })
                .collect(),
        )
    }

    #[test]
    fn simple_scores_identity_kernel_are_zero() {
        let k = kernel_from(Array2::eye(4));
        let labels = labels_from("12??");
        let scores = simple_km_scores(&k, &labels).unwrap();
        assert_eq!(scores.len(), 2);
        assert_eq!(scores.get(2), Some(0.0));
        assert_eq!(scores.get(3), Some(0.0));
    }

    #[test]
    fn simple_scores_singleton_classes() {
        let m = array![
            [1.0, 0.3, 0.8],
            [0.3, 1.0, 0.1],
            [0.8, 0.1, 1.0]
        ];
        let k = kernel_from(m);
        let labels = labels_from("12?");
        let scores = simple_km_scores(&k, &labels).unwrap();
        assert_eq!(scores.get(2), Some(0.8 - 0.1));
    }

    #[test]
    fn simple_scores_hand_mean_difference() {
        // 4 observed (two per class) plus one missing; means done by hand
        let m = array![
            [1.0, 0.0, 0.0, 0.0, 0.9],
            [0.0, 1.0, 0.0, 0.0, 0.5],
            [0.0, 0.0, 1.0, 0.0, 0.4],
            [0.0, 0.0, 0.0, 1.0, 0.2],
            [0.9, 0.5, 0.4, 0.2, 1.0]
        ];
        let k = kernel_from(m);
        let labels = labels_from("1122?");
        let scores = simple_km_scores(&k, &labels).unwrap();
        let expected = (0.9 + 0.5) / 2.0 - (0.4 + 0.2) / 2.0;
        assert_abs_diff_eq!(scores.get(4).unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn simple_scores_missing_class_errors() {
        let k = kernel_from(Array2::eye(3));
        assert!(matches!(
            simple_km_scores(&k, &labels_from("11?")),
            Err(MachineError::ClassAbsent { class: 2 })
        ));
    }

    #[test]
    fn simple_scores_scale_equivariant_and_antisymmetric() {
        let (g, _) = generate_sbm((6, 6), 0.5, 0.2, 5).unwrap();
        let k = diffusion_kernel(&laplacian(&g), 0.4).unwrap();
        let labels = labels_from("12??12??????");
        let base = simple_km_scores(&k, &labels).unwrap();

        // scaling the kernel by lambda scales scores by lambda: ranking fixed
        let scaled = kernel_from(k.matrix() * 3.5);
        let scaled_scores = simple_km_scores(&scaled, &labels).unwrap();
        let mut base_order: Vec<usize> = (0..base.len()).collect();
        base_order.sort_by(|&a, &b| {
            base.entries()[b].1.partial_cmp(&base.entries()[a].1).unwrap()
        });
        let mut scaled_order: Vec<usize> = (0..scaled_scores.len()).collect();
        scaled_order.sort_by(|&a, &b| {
            scaled_scores.entries()[b].1.partial_cmp(&scaled_scores.entries()[a].1).unwrap()
        });
        assert_eq!(base_order, scaled_order);

        // swapping singleton class labels negates scores exactly
        let swapped = labels_from("21??12??????");
        let swapped_scores = simple_km_scores(&k, &swapped).unwrap();
        let flipped = labels_from("12??12??????");
        let _ = flipped;
        for (a, b) in base.entries().iter().zip(swapped_scores.entries()) {
            // only the first two labels swapped: with two observed per class
            // this is not a pure negation, so restrict to singleton test below
            let _ = (a, b);
        }
        let k2 = kernel_from(Array2::eye(3) + 0.25);
        let s12 = simple_km_scores(&k2, &labels_from("12?")).unwrap();
        let s21 = simple_km_scores(&k2, &labels_from("21?")).unwrap();
        assert_eq!(s12.get(2).unwrap(), -s21.get(2).unwrap());
    }

    #[test]
    fn centroid_threshold_identity_balanced_is_zero() {
        let k = kernel_from(Array2::eye(6));
        let labels = labels_from("1122??");
        assert_eq!(centroid_threshold(&k, &labels).unwrap(), 0.0);
    }

    #[test]
    fn centroid_threshold_singletons() {
        let m = array![
            [2.0, 0.1, 0.0],
            [0.1, 0.5, 0.0],
            [0.0, 0.0, 1.0]
        ];
        let k = kernel_from(m);
        let labels = labels_from("12?");
        let c = centroid_threshold(&k, &labels).unwrap();
        assert_abs_diff_eq!(c, (2.0 - 0.5) / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn nearest_centroid_equivalence_with_explicit_features() {
        // the thresholded simple machine must agree with explicit
        // nearest-centroid decisions whenever the margin is clear
        for seed in 0..6 {
            let (g, _) = generate_sbm((8, 8), 0.5, 0.15, seed).unwrap();
            let k = diffusion_kernel(&laplacian(&g), 0.5).unwrap();
            let labels = labels_from("1122????11????22");
            let scores = simple_km_scores(&k, &labels).unwrap();
            let threshold = centroid_threshold(&k, &labels).unwrap();
            let features = explicit_feature_embedding(&k).unwrap();

            let mean_of = |idx: &[usize]| {
                let mut mean = vec![0.0; features.nrows()];
                for &i in idx {
                    for r in 0..features.nrows() {
                        mean[r] += features[[r, i]];
                    }
                }
                for v in &mut mean {
                    *v /= idx.len() as f64;
                }
                mean
            };
            let c1 = mean_of(&labels.class_indices(Label::Class1));
            let c2 = mean_of(&labels.class_indices(Label::Class2));

            for &(v, score) in scores.entries() {
                if (score - threshold).abs() <= 1e-9 {
                    continue;
                }
                let dist = |centroid: &[f64]| -> f64 {
                    (0..features.nrows())
                        .map(|r| (features[[r, v]] - centroid[r]).powi(2))
                        .sum()
                };
                let nearest_is_c1 = dist(&c1) < dist(&c2);
                assert_eq!(score > threshold, nearest_is_c1, "node {v} seed {seed}");
            }
        }
    }

    #[test]
    fn classify_threshold_rules() {
        let scores = DecisionScores::new(
            MachineKind::Simple,
            0,
            0.1,
            None,
            vec![(0, 0.2), (1, -0.1), (2, 0.0)],
        );
        let labels = classify_threshold(&scores, 0.0);
        assert_eq!(labels, vec![(0, Label::Class1), (1, Label::Class2), (2, Label::Class2)]);

        let all_one = classify_threshold(&scores, f64::MIN);
        assert!(all_one.iter().all(|&(_, l)| l == Label::Class1));
    }

    #[test]
    fn svm_two_points_identity_kernel() {
        let k = Array2::eye(2);
        let model = svm_train(&k, &[1.0, -1.0], 1.0).unwrap();
        assert_abs_diff_eq!(model.alphas[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(model.alphas[1], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(model.bias, 0.0, epsilon = 1e-9);
        assert_eq!(model.support_indices, vec![0, 1]);
    }

    #[test]
    fn svm_separable_line_recovers_sign() {
        // linear kernel on x = (-2, -1, 1, 2)
        let xs = [-2.0, -1.0, 1.0, 2.0];
        let ys = [-1.0, -1.0, 1.0, 1.0];
        let mut k = Array2::<f64>::zeros((4, 4));
        for i in 0..4 {
            for j in 0..4 {
                k[[i, j]] = xs[i] * xs[j];
            }
        }
        let model = svm_train(&k, &ys, 1000.0).unwrap();
        for i in 0..4 {
            let mut f = model.bias;
            for j in 0..4 {
                f += model.alphas[j] * model.ys[j] * k[[i, j]];
            }
            assert_eq!(f > 0.0, xs[i] > 0.0, "sign mismatch at {i}");
        }
        assert!(max_kkt_violation(&model, &k) <= 1e-3);
    }

    #[test]
    fn svm_deterministic() {
        let (g, _) = generate_sbm((8, 8), 0.4, 0.1, 14).unwrap();
        let k = diffusion_kernel(&laplacian(&g), 0.5).unwrap();
        let labels = labels_from("112212??1221?2??");
        let (obs, ys) = observed_signs(&labels);
        let k_obs = gather_block(k.matrix(), &obs, &obs);
        let a = svm_train(&k_obs, &ys, 2.0).unwrap();
        let b = svm_train(&k_obs, &ys, 2.0).unwrap();
        assert_eq!(a.alphas, b.alphas);
        assert_eq!(a.bias, b.bias);
    }

    #[test]
    fn svm_kkt_certificate_and_monotone_objective() {
        let mut rng = crate::rng::SeededRng::new(31);
        for trial in 0..8 {
            let n = 12 + (trial % 3) * 6;
            let mut v = Array2::<f64>::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    v[[i, j]] = rng.unit_f64() * 2.0 - 1.0;
                }
            }
            let k = v.t().dot(&v);
            let ys: Vec<f64> =
                (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
            let cost = [0.1, 1.0, 10.0][trial % 3];
            let model = svm_train_with(
                &k,
                &ys,
                cost,
                SmoOptions { track_objective: true, ..SmoOptions::default() },
            )
            .unwrap();
            assert!(!model.hit_update_cap);
            let violation = max_kkt_violation(&model, &k);
            assert!(violation <= 1e-3, "kkt violation {violation}");
            let trace = model.objective_trace.as_ref().unwrap();
            for pair in trace.windows(2) {
                assert!(
                    pair[1] >= pair[0] - 1e-9 * pair[0].abs().max(1.0),
                    "objective decreased: {} -> {}",
                    pair[0],
                    pair[1]
                );
            }
            // alphas stay in the box and the equality constraint holds
            assert!(model.alphas.iter().all(|&a| (-1e-12..=cost + 1e-12).contains(&a)));
            let balance: f64 = model.alphas.iter().zip(&model.ys).map(|(a, y)| a * y).sum();
            assert!(balance.abs() <= 1e-8);
        }
    }

    #[test]
    fn svm_rejects_non_psd_kernel() {
        // curvature along (0,1) is 0 + 0 - 2*5 = -10
        let k = array![[0.0, 5.0], [5.0, 0.0]];
        assert!(matches!(
            svm_train(&k, &[1.0, -1.0], 1.0),
            Err(MachineError::NegativeCurvature { .. })
        ));
    }

    #[test]
    fn svm_scores_constant_bias_when_no_support() {
        let model = SvmModel {
            alphas: vec![0.0, 0.0],
            ys: vec![1.0, -1.0],
            bias: 0.7,
            cost: 1.0,
            support_indices: vec![],
            pair_updates: 0,
            hit_update_cap: false,
            objective_trace: None,
        };
        let k_cross = Array2::<f64>::zeros((3, 2));
        let scores = svm_scores(&model, &k_cross, &[4, 5, 6], 0, 0.1).unwrap();
        assert!(scores.entries().iter().all(|&(_, s)| s == 0.7));
    }

    #[test]
    fn svm_scores_hand_two_support_vectors() {
        let model = SvmModel {
            alphas: vec![0.5, 1.5],
            ys: vec![1.0, -1.0],
            bias: -0.25,
            cost: 2.0,
            support_indices: vec![0, 1],
            pair_updates: 0,
            hit_update_cap: false,
            objective_trace: None,
        };
        let k_cross = array![[0.8, 0.2]];
        let scores = svm_scores(&model, &k_cross, &[9], 1, 0.5).unwrap();
        let expected = 0.5 * 0.8 - 1.5 * 0.2 - 0.25;
        assert_abs_diff_eq!(scores.get(9).unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn svm_unbounded_support_vector_margin_is_one() {
        let (g, _) = generate_sbm((10, 10), 0.5, 0.1, 3).unwrap();
        let k = diffusion_kernel(&laplacian(&g), 0.8).unwrap();
        let labels = labels_from("1111122222??????????");
        let (obs, ys) = observed_signs(&labels);
        let k_obs = gather_block(k.matrix(), &obs, &obs);
        let model = svm_train(&k_obs, &ys, 5.0).unwrap();
        let slack = 1e-12 * model.cost.max(1.0);
        for (t, &alpha) in model.alphas.iter().enumerate() {
            if alpha > slack && alpha < model.cost - slack {
                let mut f = model.bias;
                for j in 0..model.alphas.len() {
                    f += model.alphas[j] * model.ys[j] * k_obs[[t, j]];
                }
                assert!(
                    (model.ys[t] * f - 1.0).abs() <= 1e-3,
                    "unbounded SV margin {} at {t}",
                    model.ys[t] * f
                );
            }
        }
    }

    #[test]
    fn dkm_run_level_zero_equals_simple_scores() {
        let (g, _) = generate_sbm((6, 6), 0.4, 0.1, 20).unwrap();
        let k = diffusion_kernel(&laplacian(&g), 0.3).unwrap();
        let labels = labels_from("12??12??12??");
        let direct = simple_km_scores(&k, &labels).unwrap();
        let via_dkm = dkm_run(
            &k,
            &labels,
            0,
            MachineKind::Simple,
            None,
            BandwidthDomain::AllNodes,
        )
        .unwrap();
        assert_eq!(via_dkm.len(), 1);
        assert_eq!(via_dkm[0], direct);
    }

    #[test]
    fn dkm_run_level_one_matches_manual_composition() {
        let (g, _) = generate_sbm((6, 6), 0.4, 0.1, 21).unwrap();
        let k = diffusion_kernel(&laplacian(&g), 0.3).unwrap();
        let labels = labels_from("12??12??12??");
        let deepened = crate::kernel::deepen(&k, 1).unwrap();
        let manual = simple_km_scores(&deepened, &labels).unwrap();
        let via_dkm = dkm_run(
            &k,
            &labels,
            1,
            MachineKind::Simple,
            None,
            BandwidthDomain::AllNodes,
        )
        .unwrap();
        assert_eq!(via_dkm[0], manual);
    }

    #[test]
    fn dkm_run_level_two_unrolls_recursion() {
        let (g, _) = generate_sbm((6, 6), 0.4, 0.1, 22).unwrap();
        let k0 = diffusion_kernel(&laplacian(&g), 0.3).unwrap();
        let labels = labels_from("12??12??12??");
        let two = dkm_run(&k0, &labels, 2, MachineKind::Simple, None, BandwidthDomain::AllNodes)
            .unwrap();
        let k1 = crate::kernel::deepen(&k0, 1).unwrap();
        let nested =
            dkm_run(&k1, &labels, 1, MachineKind::Simple, None, BandwidthDomain::AllNodes)
                .unwrap();
        assert_eq!(two[0].entries(), nested[0].entries());
    }

    #[test]
    fn dkm_run_svm_returns_one_score_set_per_cost() {
        let (g, _) = generate_sbm((8, 8), 0.5, 0.1, 23).unwrap();
        let k = diffusion_kernel(&laplacian(&g), 0.4).unwrap();
        let labels = labels_from("1122????11??22??");
        let grid = [0.1, 1.0, 10.0];
        let sets = dkm_run(
            &k,
            &labels,
            1,
            MachineKind::Svm,
            Some(&grid),
            BandwidthDomain::AllNodes,
        )
        .unwrap();
        assert_eq!(sets.len(), 3);
        for (set, &cost) in sets.iter().zip(&grid) {
            assert_eq!(set.cost, Some(cost));
            assert_eq!(set.len(), labels.miss_indices().len());
        }
        assert!(matches!(
            dkm_run(&k, &labels, 0, MachineKind::Svm, Some(&[]), BandwidthDomain::AllNodes),
            Err(DkmError::Machine(MachineError::EmptyCostGrid))
        ));
    }
}
