//! Ranking metrics, reproducible stratified splits, and the sweep engine.
//!
//! Splits are driven by the seeded generator documented in [`crate::rng`]:
//! split `s` of a sweep uses seed `master_seed + s`, the class-1 index list is
//! shuffled first and the class-2 list second from the same stream, and the
//! observed count per class is `round(fraction * class_size)` clamped so both
//! sides keep at least one node. Identical seeds reproduce identical
//! partitions on every platform.
//!
//! Sweep cells `(beta, level, machine, split)` are independent, so with the
//! `parallel` feature they are evaluated on a rayon pool; results are
//! gathered and emitted in a fixed key order, making the output byte-for-byte
//! identical for any thread count.

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{Graph, GraphError, Label, LabelSet};
use crate::kernel::{
    deepen_with, diffusion_kernel_from_decomposition, spectral_decompose, BandwidthDomain,
    KernelError, KernelMatrix,
};
use crate::machines::{score_with_machine, DecisionScores, MachineError, MachineKind};
use crate::rng::SeededRng;

/// The SVM cost grid used by the experiments this crate reproduces.
pub const DEFAULT_COST_GRID: [f64; 13] =
    [1e-5, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0];

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no positive nodes among the scored set")]
    NoPositives,
    #[error("no negative nodes among the scored set")]
    NoNegatives,
    #[error("score for node {index} is not finite")]
    NonFiniteScore { index: usize },
    #[error("obs_fraction {value} outside (0, 1)")]
    InvalidFraction { value: f64 },
    #[error("class {class} has only {size} labeled nodes; need at least 2")]
    ClassTooSmall { class: u8, size: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    AveragePrecision,
    Auc,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::AveragePrecision => write!(f, "AP"),
            Metric::Auc => write!(f, "AUC"),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "AP" | "ap" => Ok(Metric::AveragePrecision),
            "AUC" | "auc" => Ok(Metric::Auc),
            other => Err(format!("unknown metric {other:?} (expected AP or AUC)")),
        }
    }
}

fn check_finite(scored: &[(f64, bool)]) -> Result<(), EvalError> {
    for (index, (score, _)) in scored.iter().enumerate() {
        if !score.is_finite() {
            return Err(EvalError::NonFiniteScore { index });
        }
    }
    Ok(())
}

/// Non-interpolated average precision: sort by score descending (ties broken
/// by original position, earlier first), then average precision-at-k over the
/// positions of positives.
pub fn average_precision(scored: &[(f64, bool)]) -> Result<f64, EvalError> {
    check_finite(scored)?;
    let positives = scored.iter().filter(|(_, y)| *y).count();
    if positives == 0 {
        return Err(EvalError::NoPositives);
    }
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&a, &b| {
        scored[b].0.partial_cmp(&scored[a].0).unwrap().then(a.cmp(&b))
    });
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (rank0, &idx) in order.iter().enumerate() {
        if scored[idx].1 {
            hits += 1;
            sum += hits as f64 / (rank0 + 1) as f64;
        }
    }
    Ok(sum / positives as f64)
}

/// Area under the ROC curve by the rank-sum identity with midranks for ties:
/// `(sum of positive ranks - P(P+1)/2) / (P N)`.
pub fn auc(scored: &[(f64, bool)]) -> Result<f64, EvalError> {
    check_finite(scored)?;
    let p = scored.iter().filter(|(_, y)| *y).count();
    let n = scored.len() - p;
    if p == 0 {
        return Err(EvalError::NoPositives);
    }
    if n == 0 {
        return Err(EvalError::NoNegatives);
    }
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&a, &b| scored[a].0.partial_cmp(&scored[b].0).unwrap());
    let mut rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && scored[order[end + 1]].0 == scored[order[start]].0 {
            end += 1;
        }
        // ranks are 1-based; tied scores share the midrank
        let midrank = (start + end) as f64 / 2.0 + 1.0;
        for &idx in &order[start..=end] {
            if scored[idx].1 {
                rank_sum += midrank;
            }
        }
        start = end + 1;
    }
    let p_f = p as f64;
    Ok((rank_sum - p_f * (p_f + 1.0) / 2.0) / (p_f * n as f64))
}

pub fn metric_value(metric: Metric, scored: &[(f64, bool)]) -> Result<f64, EvalError> {
    match metric {
        Metric::AveragePrecision => average_precision(scored),
        Metric::Auc => auc(scored),
    }
}

/// A stratified observed/missing partition of the labeled nodes.
/// Unknown-label nodes always land on the missing side.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub seed: u64,
    pub obs_fraction: f64,
    pub obs_indices: Vec<usize>,
    pub miss_indices: Vec<usize>,
}

/// Stratified random split: per class, `round(fraction * size)` observed
/// nodes, clamped to keep at least one node on each side.
pub fn stratified_split(
    labels: &LabelSet,
    obs_fraction: f64,
    seed: u64,
) -> Result<Split, EvalError> {
    if !obs_fraction.is_finite() || obs_fraction <= 0.0 || obs_fraction >= 1.0 {
        return Err(EvalError::InvalidFraction { value: obs_fraction });
    }
    let mut rng = SeededRng::new(seed);
    let mut obs = Vec::new();
    for (class_no, class) in [(1u8, Label::Class1), (2u8, Label::Class2)] {
        let mut indices = labels.class_indices(class);
        if indices.len() < 2 {
            return Err(EvalError::ClassTooSmall { class: class_no, size: indices.len() });
        }
        let target = (obs_fraction * indices.len() as f64).round() as usize;
        let count = target.clamp(1, indices.len() - 1);
        rng.shuffle(&mut indices);
        obs.extend_from_slice(&indices[..count]);
    }
    obs.sort_unstable();
    let miss = (0..labels.len()).filter(|i| obs.binary_search(i).is_err()).collect();
    Ok(Split { seed, obs_fraction, obs_indices: obs, miss_indices: miss })
}

/// Score/truth pairs for the labeled missing nodes of a split, ascending node
/// order; truth is "is class 1". Nodes without ground truth are skipped.
pub fn scored_truth(
    scores: &DecisionScores,
    truth: &LabelSet,
    split: &Split,
) -> Vec<(f64, bool)> {
    split
        .miss_indices
        .iter()
        .filter_map(|&v| match truth.get(v) {
            Label::Unknown => None,
            label => scores.get(v).map(|s| (s, label == Label::Class1)),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Sweep engine
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandwidthDomainKind {
    AllNodes,
    ObsOnly,
}

impl std::str::FromStr for BandwidthDomainKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all_nodes" => Ok(BandwidthDomainKind::AllNodes),
            "obs_only" => Ok(BandwidthDomainKind::ObsOnly),
            other => {
                Err(format!("unknown bandwidth domain {other:?} (expected all_nodes or obs_only)"))
            }
        }
    }
}

impl fmt::Display for BandwidthDomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BandwidthDomainKind::AllNodes => write!(f, "all_nodes"),
            BandwidthDomainKind::ObsOnly => write!(f, "obs_only"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub beta_grid: Vec<f64>,
    pub levels: Vec<u32>,
    pub machines: Vec<MachineKind>,
    pub cost_grid: Vec<f64>,
    pub n_splits: u32,
    pub obs_fraction: f64,
    pub metric: Metric,
    pub master_seed: u64,
    pub bandwidth_domain: BandwidthDomainKind,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            beta_grid: vec![1e-3, 1e-2, 1e-1, 1.0],
            levels: vec![0, 1, 2],
            machines: vec![MachineKind::Simple],
            cost_grid: DEFAULT_COST_GRID.to_vec(),
            n_splits: 25,
            obs_fraction: 0.5,
            metric: Metric::Auc,
            master_seed: 0,
            bandwidth_domain: BandwidthDomainKind::AllNodes,
        }
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("beta grid is empty")]
    EmptyBetaGrid,
    #[error("level list is empty")]
    EmptyLevels,
    #[error("machine list is empty")]
    EmptyMachines,
    #[error("cost grid is empty but the svm machine was requested")]
    EmptyCostGrid,
    #[error("duplicate value in {grid} grid")]
    DuplicateGridValue { grid: &'static str },
    #[error("beta {beta} is not positive and finite")]
    InvalidBeta { beta: f64 },
    #[error("n_splits must be at least 1")]
    NoSplits,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One evaluated `(beta, level, machine, split)` cell. For the SVM the value
/// is the best over the cost grid for this split (oracle selection) and
/// `cost` records the winning cost.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub beta: f64,
    pub level: u32,
    pub machine: MachineKind,
    pub cost: Option<f64>,
    pub split_id: u32,
    pub metric: Metric,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAggregate {
    pub beta: f64,
    pub level: u32,
    pub machine: MachineKind,
    pub metric: Metric,
    pub mean: f64,
    pub stderr: f64,
    pub n_splits: u32,
}

/// A `(beta, level)` cell that could not be evaluated; `split_id` is set when
/// the failure was split-specific (observed-pair bandwidth domain).
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedCell {
    pub beta: f64,
    pub level: u32,
    pub split_id: Option<u32>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmCapHit {
    pub beta: f64,
    pub level: u32,
    pub split_id: u32,
    pub cost: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SweepDiagnostics {
    pub skipped_cells: Vec<SkippedCell>,
    pub svm_cap_hits: Vec<SvmCapHit>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<SweepAggregate>,
    pub diagnostics: SweepDiagnostics,
}

/// How sweep cells are executed. `Parallel` distributes independent cells
/// over the ambient rayon pool; both modes produce identical bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl ExecMode {
    /// Parallel when available, sequential otherwise.
    pub fn preferred() -> Self {
        #[cfg(feature = "parallel")]
        {
            ExecMode::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            ExecMode::Sequential
        }
    }
}

fn map_indexed<T, F>(count: usize, mode: ExecMode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        ExecMode::Sequential => (0..count).map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(f).collect()
        }
    }
}

pub fn run_sweep(
    graph: &Graph,
    labels: &LabelSet,
    config: &SweepConfig,
) -> Result<SweepResult, SweepError> {
    run_sweep_mode(graph, labels, config, ExecMode::preferred())
}

pub fn run_sweep_mode(
    graph: &Graph,
    labels: &LabelSet,
    config: &SweepConfig,
    mode: ExecMode,
) -> Result<SweepResult, SweepError> {
    validate_config(config)?;

    let splits: Vec<Split> = (0..config.n_splits)
        .map(|s| {
            stratified_split(labels, config.obs_fraction, config.master_seed.wrapping_add(s as u64))
        })
        .collect::<Result<_, _>>()?;

    let lap = crate::graph::laplacian(graph);
    let decomposition = spectral_decompose(lap.matrix())?;

    // Level-0 kernels, one per beta, shared by every split.
    let base: Vec<Arc<KernelMatrix>> = {
        let results = map_indexed(config.beta_grid.len(), mode, |b| {
            diffusion_kernel_from_decomposition(&decomposition, config.beta_grid[b]).map(Arc::new)
        });
        results.into_iter().collect::<Result<_, _>>()?
    };

    match config.bandwidth_domain {
        BandwidthDomainKind::AllNodes => sweep_shared_chains(labels, config, &splits, &base, mode),
        BandwidthDomainKind::ObsOnly => sweep_per_split_chains(labels, config, &splits, &base, mode),
    }
}

fn validate_config(config: &SweepConfig) -> Result<(), SweepError> {
    if config.beta_grid.is_empty() {
        return Err(SweepError::EmptyBetaGrid);
    }
    if config.levels.is_empty() {
        return Err(SweepError::EmptyLevels);
    }
    if config.machines.is_empty() {
        return Err(SweepError::EmptyMachines);
    }
    if config.machines.contains(&MachineKind::Svm) && config.cost_grid.is_empty() {
        return Err(SweepError::EmptyCostGrid);
    }
    if config.n_splits == 0 {
        return Err(SweepError::NoSplits);
    }
    for &beta in &config.beta_grid {
        if !beta.is_finite() || beta < 0.0 {
            return Err(SweepError::InvalidBeta { beta });
        }
    }
    for (grid, has_dup) in [
        ("beta", has_duplicate_f64(&config.beta_grid)),
        ("cost", has_duplicate_f64(&config.cost_grid)),
        ("level", has_duplicate_u32(&config.levels)),
    ] {
        if has_dup {
            return Err(SweepError::DuplicateGridValue { grid });
        }
    }
    Ok(())
}

fn has_duplicate_f64(values: &[f64]) -> bool {
    values
        .iter()
        .enumerate()
        .any(|(i, a)| values[..i].contains(a))
}

fn has_duplicate_u32(values: &[u32]) -> bool {
    values
        .iter()
        .enumerate()
        .any(|(i, a)| values[..i].contains(a))
}

/// Kernel chain for one beta under the all-nodes domain: kernels for each
/// requested level, or the degeneracy that cut the chain short.
struct Chain {
    kernels: Vec<Option<Arc<KernelMatrix>>>,
    failure: Option<(u32, String)>,
}

fn build_chain(
    base: &Arc<KernelMatrix>,
    levels: &[u32],
    domain: BandwidthDomain<'_>,
) -> Result<Chain, KernelError> {
    let max_level = *levels.iter().max().unwrap();
    let mut by_level: Vec<Option<Arc<KernelMatrix>>> = vec![None; levels.len()];
    let mut current = Arc::clone(base);
    let mut failure = None;
    for step in 0..=max_level {
        if step > 0 {
            match deepen_with(&current, 1, domain) {
                Ok(next) => current = Arc::new(next),
                Err(err @ KernelError::DegenerateAtLevel { .. }) => {
                    failure = Some((step, err.to_string()));
                    break;
                }
                Err(other) => return Err(other),
            }
        }
        for (slot, &level) in levels.iter().enumerate() {
            if level == step {
                by_level[slot] = Some(Arc::clone(&current));
            }
        }
    }
    Ok(Chain { kernels: by_level, failure })
}

struct CellOutcome {
    row: SweepRow,
    cap_hits: Vec<SvmCapHit>,
}

fn evaluate_cell(
    kernel: &KernelMatrix,
    labels: &LabelSet,
    split: &Split,
    split_id: u32,
    machine: MachineKind,
    config: &SweepConfig,
) -> Result<CellOutcome, SweepError> {
    use crate::machines::{gather_block, observed_signs, simple_km_scores, svm_scores, svm_train};

    let masked = labels.masked_to(&split.obs_indices);
    let provenance = kernel.provenance();
    let mut cap_hits = Vec::new();
    let (value, cost) = match machine {
        MachineKind::Simple => {
            let scores = simple_km_scores(kernel, &masked)?;
            (metric_value(config.metric, &scored_truth(&scores, labels, split))?, None)
        }
        MachineKind::Svm => {
            let (obs, ys) = observed_signs(&masked);
            let miss = masked.miss_indices();
            let k_obs = gather_block(kernel.matrix(), &obs, &obs);
            let k_cross = gather_block(kernel.matrix(), &miss, &obs);
            let mut best: Option<(f64, f64)> = None;
            for &cost in &config.cost_grid {
                let model = svm_train(&k_obs, &ys, cost)?;
                if model.hit_update_cap {
                    cap_hits.push(SvmCapHit {
                        beta: provenance.beta,
                        level: provenance.level,
                        split_id,
                        cost,
                    });
                }
                let scores = svm_scores(&model, &k_cross, &miss, provenance.level, provenance.beta)?;
                let value = metric_value(config.metric, &scored_truth(&scores, labels, split))?;
                if best.as_ref().is_none_or(|(v, _)| value > *v) {
                    best = Some((value, cost));
                }
            }
            let (value, cost) = best.expect("non-empty cost grid");
            (value, Some(cost))
        }
    };
    Ok(CellOutcome {
        row: SweepRow {
            beta: provenance.beta,
            level: provenance.level,
            machine,
            cost,
            split_id,
            metric: config.metric,
            value,
        },
        cap_hits,
    })
}

fn sweep_shared_chains(
    labels: &LabelSet,
    config: &SweepConfig,
    splits: &[Split],
    base: &[Arc<KernelMatrix>],
    mode: ExecMode,
) -> Result<SweepResult, SweepError> {
    let chains: Vec<Chain> = map_indexed(base.len(), mode, |b| {
        build_chain(&base[b], &config.levels, BandwidthDomain::AllNodes)
    })
    .into_iter()
    .collect::<Result<_, _>>()?;

    let mut skipped = Vec::new();
    for (b, chain) in chains.iter().enumerate() {
        if let Some((failed_at, message)) = &chain.failure {
            for &level in &config.levels {
                if level >= *failed_at {
                    skipped.push(SkippedCell {
                        beta: config.beta_grid[b],
                        level,
                        split_id: None,
                        message: message.clone(),
                    });
                }
            }
        }
    }

    // flat cell list in output order
    let mut cells = Vec::new();
    for b in 0..config.beta_grid.len() {
        for (slot, _) in config.levels.iter().enumerate() {
            for &machine in &config.machines {
                for split_id in 0..splits.len() {
                    cells.push((b, slot, machine, split_id));
                }
            }
        }
    }

    let outcomes = map_indexed(cells.len(), mode, |idx| {
        let (b, slot, machine, split_id) = cells[idx];
        match &chains[b].kernels[slot] {
            Some(kernel) => evaluate_cell(
                kernel,
                labels,
                &splits[split_id],
                split_id as u32,
                machine,
                config,
            )
            .map(Some),
            None => Ok(None),
        }
    });

    let mut rows = Vec::new();
    let mut cap_hits = Vec::new();
    for outcome in outcomes {
        if let Some(outcome) = outcome? {
            rows.extend(outcome.row);
            cap_hits.extend(outcome.cap_hits);
        }
    }
    finish_sweep(config, rows, skipped, cap_hits)
}

fn sweep_per_split_chains(
    labels: &LabelSet,
    config: &SweepConfig,
    splits: &[Split],
    base: &[Arc<KernelMatrix>],
    mode: ExecMode,
) -> Result<SweepResult, SweepError> {
    let mut groups = Vec::new();
    for b in 0..base.len() {
        for split_id in 0..splits.len() {
            groups.push((b, split_id));
        }
    }

    type GroupOut = (Vec<SweepRow>, Vec<SkippedCell>, Vec<SvmCapHit>);
    let outcomes: Vec<Result<GroupOut, SweepError>> = map_indexed(groups.len(), mode, |idx| {
        let (b, split_id) = groups[idx];
        let split = &splits[split_id];
        let chain =
            build_chain(&base[b], &config.levels, BandwidthDomain::Observed(&split.obs_indices))?;
        let mut rows = Vec::new();
        let mut skipped = Vec::new();
        let mut cap_hits = Vec::new();
        if let Some((failed_at, message)) = &chain.failure {
            for &level in &config.levels {
                if level >= *failed_at {
                    skipped.push(SkippedCell {
                        beta: config.beta_grid[b],
                        level,
                        split_id: Some(split_id as u32),
                        message: message.clone(),
                    });
                }
            }
        }
        for (slot, kernel) in chain.kernels.iter().enumerate() {
            let Some(kernel) = kernel else { continue };
            let _ = slot;
            for &machine in &config.machines {
                let outcome =
                    evaluate_cell(kernel, labels, split, split_id as u32, machine, config)?;
                rows.extend(outcome.row);
                cap_hits.extend(outcome.cap_hits);
            }
        }
        Ok((rows, skipped, cap_hits))
    });

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut cap_hits = Vec::new();
    for outcome in outcomes {
        let (r, s, c) = outcome?;
        rows.extend(r);
        skipped.extend(s);
        cap_hits.extend(c);
    }
    finish_sweep(config, rows, skipped, cap_hits)
}

fn finish_sweep(
    config: &SweepConfig,
    mut rows: Vec<SweepRow>,
    mut skipped: Vec<SkippedCell>,
    mut cap_hits: Vec<SvmCapHit>,
) -> Result<SweepResult, SweepError> {
    let beta_pos = |beta: f64| config.beta_grid.iter().position(|&b| b == beta).unwrap_or(0);
    let level_pos = |level: u32| config.levels.iter().position(|&l| l == level).unwrap_or(0);
    let machine_pos =
        |machine: MachineKind| config.machines.iter().position(|&m| m == machine).unwrap_or(0);

    rows.sort_by_key(|row| {
        (beta_pos(row.beta), level_pos(row.level), machine_pos(row.machine), row.split_id)
    });
    skipped.sort_by_key(|cell| {
        (beta_pos(cell.beta), level_pos(cell.level), cell.split_id.map_or(0, |s| s + 1))
    });
    cap_hits.sort_by_key(|hit| {
        (
            beta_pos(hit.beta),
            level_pos(hit.level),
            hit.split_id,
            config.cost_grid.iter().position(|&c| c == hit.cost).unwrap_or(0),
        )
    });

    let mut aggregates = Vec::new();
    for &beta in &config.beta_grid {
        for &level in &config.levels {
            for &machine in &config.machines {
                let values: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.beta == beta && r.level == level && r.machine == machine)
                    .map(|r| r.value)
                    .collect();
                if values.is_empty() {
                    continue;
                }
                let n = values.len() as f64;
                let mean = values.iter().sum::<f64>() / n;
                let stderr = if values.len() > 1 {
                    let var =
                        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
                    (var / n).sqrt()
                } else {
                    0.0
                };
                aggregates.push(SweepAggregate {
                    beta,
                    level,
                    machine,
                    metric: config.metric,
                    mean,
                    stderr,
                    n_splits: values.len() as u32,
                });
            }
        }
    }

    Ok(SweepResult {
        rows,
        aggregates,
        diagnostics: SweepDiagnostics { skipped_cells: skipped, svm_cap_hits: cap_hits },
    })
}

// ---------------------------------------------------------------------------
// CSV output (12 significant digits)
// ---------------------------------------------------------------------------

fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn write_rows_csv<W: Write>(out: &mut W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "beta,level,machine,cost,split_id,metric,value")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt12(row.beta),
            row.level,
            row.machine,
            row.cost.map(fmt12).unwrap_or_default(),
            row.split_id,
            row.metric,
            fmt12(row.value)
        )?;
    }
    Ok(())
}

pub fn write_aggregates_csv<W: Write>(out: &mut W, aggregates: &[SweepAggregate]) -> io::Result<()> {
    writeln!(out, "beta,level,machine,metric,mean,stderr,n_splits")?;
    for agg in aggregates {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt12(agg.beta),
            agg.level,
            agg.machine,
            agg.metric,
            fmt12(agg.mean),
            fmt12(agg.stderr),
            agg.n_splits
        )?;
    }
    Ok(())
}
