// SPDX-License-Identifier: Apache-2.0

//! Run-config schema and its translation into an engine experiment.
//!
//! A run config is one JSON document. Every field except `model` and
//! `observable` has a default; command-line flags override the matching
//! config fields. Validation happens before any propagation starts, so a
//! rejected config never produces an output file.

use std::path::{Path, PathBuf};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use symprop::models::{
    build_ising_circuit, build_xxz_circuit, mid_chain_z, total_spin_squared, Boundary, IsingParams, XxzOrdering,
    XxzParams,
};
use symprop::propagation::DEFAULT_MEMORY_CAP;
use symprop::random::random_symmetric_circuit;
use symprop::{
    Circuit64, MergePolicy, PauliString, PauliSum64, Permutation, ProductState64, PropagationConfig64, SymmetryGroup,
};

use crate::error::CliError;

/// Absolute tolerance when comparing angles of symmetry-related gates.
const ANGLE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub observable: ObservableSpec,
    #[serde(default)]
    pub state: StateSpec,
    #[serde(default)]
    pub symmetry: Option<SymmetrySpec>,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub merge_policy: MergePolicySpec,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub memory_cap: Option<usize>,
    /// Seed for the `random_symmetric` model.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub threads: Option<usize>,
    /// Record per-layer wall-clock times; off by default so that repeated
    /// runs produce byte-identical output.
    #[serde(default)]
    pub timing: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpec {
    Ising(IsingSpec),
    Xxz(XxzSpec),
    RandomSymmetric(RandomSpec),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsingSpec {
    pub n: usize,
    pub h_x: f64,
    pub h_z: f64,
    pub delta_t: f64,
    pub layers: usize,
    #[serde(default)]
    pub boundary: BoundarySpec,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundarySpec {
    #[default]
    Periodic,
    Open,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XxzSpec {
    pub lx: usize,
    pub ly: usize,
    pub j_perp: f64,
    pub delta: f64,
    pub alpha: f64,
    pub delta_t: f64,
    pub layers: usize,
    #[serde(default)]
    pub ordering: OrderingSpec,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingSpec {
    #[default]
    Sublayers,
    PerPair,
}

/// Random circuit commuting with the configured symmetry group.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub n: usize,
    pub layers: usize,
    pub orbits_per_layer: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableSpec {
    MidChainZ,
    TotalSpinSquared,
    /// A single Pauli string, qubit 0 leftmost, e.g. `"XXIZ"`.
    Pauli(String),
    /// A weighted sum, e.g. `[["XXIZ", 0.5], ["ZIII", -1.0]]`.
    Terms(Vec<(String, f64)>),
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSpec {
    #[default]
    PlusX,
    ZeroZ,
    /// The same Bloch vector on every qubit.
    Bloch([f64; 3]),
    /// One Bloch vector per qubit.
    BlochPerQubit(Vec<[f64; 3]>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetrySpec {
    Trivial,
    #[serde(rename = "translation_1d")]
    Translation1d,
    #[serde(rename = "translation_2d")]
    Translation2d {
        lx: usize,
        ly: usize,
    },
    Dihedral,
    PermutationFull,
    Generic {
        generators: Vec<Vec<usize>>,
    },
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergePolicySpec {
    Never,
    #[default]
    AfterEachLayer,
    AfterKLayers(usize),
}

/// Flag values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
    pub memory_cap: Option<usize>,
    pub timing: bool,
}

/// A validated experiment, ready to propagate.
pub struct Experiment {
    pub observable: PauliSum64,
    pub circuit: Circuit64,
    pub state: ProductState64,
    pub group: Option<SymmetryGroup>,
    pub standard: PropagationConfig64,
    pub output: Option<PathBuf>,
    pub timing: bool,
}

impl Experiment {
    /// Propagation settings with symmetry merging switched on.
    pub fn symmetric(&self) -> Option<PropagationConfig64> {
        self.group.clone().map(|g| self.standard.clone().with_symmetry(g))
    }
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
}

fn invalid<T>(field: &str, msg: impl std::fmt::Display) -> Result<T, CliError> {
    Err(CliError::Validation(format!("{field}: {msg}")))
}

fn context<T>(field: &str, r: symprop::Result<T>) -> Result<T, CliError> {
    r.or_else(|e| invalid(field, e))
}

impl RunConfig {
    pub fn model_qubits(&self) -> usize {
        match &self.model {
            ModelSpec::Ising(p) => p.n,
            ModelSpec::Xxz(p) => p.lx * p.ly,
            ModelSpec::RandomSymmetric(p) => p.n,
        }
    }

    pub fn build(&self, overrides: &Overrides) -> Result<Experiment, CliError> {
        let n = self.model_qubits();
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return invalid("epsilon", format!("must be finite and non-negative, got {}", self.epsilon));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return invalid("gamma", format!("must be finite and non-negative, got {}", self.gamma));
        }
        let threads = overrides.threads.or(self.threads);
        if threads == Some(0) {
            return invalid("threads", "must be at least 1");
        }
        let memory_cap = overrides.memory_cap.or(self.memory_cap).unwrap_or(DEFAULT_MEMORY_CAP);
        if memory_cap == 0 {
            return invalid("memory_cap", "must be at least 1");
        }

        let group = self.symmetry.as_ref().map(|s| build_group(s, n)).transpose()?;
        let (circuit, time_step) = self.build_circuit(group.as_ref())?;
        let circuit =
            if self.gamma > 0.0 { context("gamma", circuit.with_noise_everywhere(self.gamma))? } else { circuit };
        let observable = build_observable(&self.observable, n)?;
        let state = build_state(&self.state, n)?;

        if let Some(g) = &group {
            if let Some(layer) = context("symmetry", circuit.first_asymmetric_layer(g, ANGLE_TOLERANCE))? {
                return invalid(
                    "symmetry",
                    format!("layer {layer} of the circuit is not invariant under the {} group", g.kind()),
                );
            }
            if !g.preserves(state.factors()) {
                return invalid("state", format!("the product state is not invariant under the {} group", g.kind()));
            }
        }

        let merge_policy = match self.merge_policy {
            MergePolicySpec::Never => MergePolicy::Never,
            MergePolicySpec::AfterEachLayer => MergePolicy::AfterEachLayer,
            MergePolicySpec::AfterKLayers(0) => return invalid("merge_policy.after_k_layers", "must be at least 1"),
            MergePolicySpec::AfterKLayers(k) => MergePolicy::AfterKLayers(k),
        };
        let standard = PropagationConfig64 {
            epsilon: self.epsilon,
            merge_policy,
            symmetry: None,
            memory_cap,
            workers: threads,
            time_step,
        };
        Ok(Experiment {
            observable,
            circuit,
            state,
            group,
            standard,
            output: overrides.output.clone().or_else(|| self.output_path.clone()),
            timing: overrides.timing || self.timing,
        })
    }

    fn build_circuit(&self, group: Option<&SymmetryGroup>) -> Result<(Circuit64, f64), CliError> {
        match &self.model {
            ModelSpec::Ising(p) => {
                let params = IsingParams {
                    n: p.n,
                    h_x: p.h_x,
                    h_z: p.h_z,
                    delta_t: p.delta_t,
                    layers: p.layers,
                    boundary: match p.boundary {
                        BoundarySpec::Periodic => Boundary::Periodic,
                        BoundarySpec::Open => Boundary::Open,
                    },
                };
                Ok((context("model.ising", build_ising_circuit(&params))?, p.delta_t))
            }
            ModelSpec::Xxz(p) => {
                let params = XxzParams {
                    lx: p.lx,
                    ly: p.ly,
                    j_perp: p.j_perp,
                    delta: p.delta,
                    alpha: p.alpha,
                    delta_t: p.delta_t,
                    layers: p.layers,
                    ordering: match p.ordering {
                        OrderingSpec::Sublayers => XxzOrdering::Sublayers,
                        OrderingSpec::PerPair => XxzOrdering::PerPair,
                    },
                };
                Ok((context("model.xxz", build_xxz_circuit(&params))?, p.delta_t))
            }
            ModelSpec::RandomSymmetric(p) => {
                let Some(group) = group else {
                    return invalid("symmetry", "the random_symmetric model needs a symmetry group");
                };
                if p.orbits_per_layer == 0 {
                    return invalid("model.random_symmetric.orbits_per_layer", "must be at least 1");
                }
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let circuit = random_symmetric_circuit(&mut rng, group, p.layers, p.orbits_per_layer);
                Ok((context("model.random_symmetric", circuit)?, 1.0))
            }
        }
    }
}

pub fn build_group(spec: &SymmetrySpec, n: usize) -> Result<SymmetryGroup, CliError> {
    let expect_n = |field: &str, got: usize| {
        if got == n {
            Ok(())
        } else {
            invalid(field, format!("acts on {got} qubits but the model has {n}"))
        }
    };
    match spec {
        SymmetrySpec::Trivial => context("symmetry", SymmetryGroup::trivial(n)),
        SymmetrySpec::Translation1d => context("symmetry", SymmetryGroup::translation_1d(n)),
        SymmetrySpec::Dihedral => context("symmetry", SymmetryGroup::dihedral(n)),
        SymmetrySpec::PermutationFull => context("symmetry", SymmetryGroup::permutation_full(n)),
        SymmetrySpec::Translation2d { lx, ly } => {
            if lx * ly != n {
                return invalid(
                    "symmetry.translation_2d",
                    format!("lx·ly = {lx}·{ly} = {} but the model has {n} qubits", lx * ly),
                );
            }
            context("symmetry.translation_2d", SymmetryGroup::translation_2d(*lx, *ly))
        }
        SymmetrySpec::Generic { generators } => {
            let mut perms = Vec::with_capacity(generators.len());
            for (i, images) in generators.iter().enumerate() {
                let field = format!("symmetry.generic.generators[{i}]");
                expect_n(&field, images.len())?;
                perms.push(context(&field, Permutation::new(images.clone()))?);
            }
            context("symmetry.generic", SymmetryGroup::generic(n, &perms))
        }
    }
}

fn build_observable(spec: &ObservableSpec, n: usize) -> Result<PauliSum64, CliError> {
    let parse = |field: &str, text: &str| -> Result<PauliString, CliError> {
        let p: PauliString = context(field, text.parse())?;
        if p.n_qubits() != n {
            return invalid(field, format!("{text:?} has {} qubits but the model has {n}", p.n_qubits()));
        }
        Ok(p)
    };
    match spec {
        ObservableSpec::MidChainZ => context("observable", mid_chain_z(n)),
        ObservableSpec::TotalSpinSquared => context("observable", total_spin_squared(n)),
        ObservableSpec::Pauli(text) => Ok(PauliSum64::single(parse("observable.pauli", text)?, 1.0)),
        ObservableSpec::Terms(terms) => {
            if terms.is_empty() {
                return invalid("observable.terms", "needs at least one term");
            }
            let mut sum = context("observable.terms", PauliSum64::new(n))?;
            for (i, (text, c)) in terms.iter().enumerate() {
                let field = format!("observable.terms[{i}]");
                if !c.is_finite() {
                    return invalid(&field, "coefficient must be finite");
                }
                context(&field, sum.add_term(parse(&field, text)?, *c))?;
            }
            Ok(sum)
        }
    }
}

fn build_state(spec: &StateSpec, n: usize) -> Result<ProductState64, CliError> {
    match spec {
        StateSpec::PlusX => context("state", ProductState64::plus_x(n)),
        StateSpec::ZeroZ => context("state", ProductState64::zero_z(n)),
        StateSpec::Bloch(v) => context("state.bloch", ProductState64::uniform(n, *v)),
        StateSpec::BlochPerQubit(vs) => {
            if vs.len() != n {
                return invalid("state.bloch_per_qubit", format!("{} vectors given for {n} qubits", vs.len()));
            }
            context("state.bloch_per_qubit", ProductState64::from_bloch(vs.clone()))
        }
    }
}
