//! Variational outer loop: cost functions, multi-start simplex optimization
//! and warm-started depth sweeps.
//!
//! The PUBO cost is `<H_QP>`; the QUBO cost is `<|H_LP|>`, which vanishes
//! exactly on the kernel of `H_LP`. Both diagonals are integer valued, so
//! every angle is canonicalized into `[-pi, pi]` before evaluation.

mod nelder_mead;

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use nelder_mead::{Minimum, NelderMead};

use crate::analysis::{self, PopulationReport};
use crate::error::{Error, Result};
use crate::exec::{self, Parallelism};
use crate::hamiltonians::{DiagonalHamiltonian, Model};
use crate::instances::Instance;
use crate::simulator::{self, InitPattern, MixerSpec, StateVector};

/// An instance paired with the diagonals one encoding needs.
#[derive(Debug, Clone)]
pub struct Problem {
    instance: Instance,
    model: Model,
    generator: DiagonalHamiltonian,
    cost: DiagonalHamiltonian,
}

impl Problem {
    pub fn new(instance: Instance, model: Model) -> Result<Self> {
        let generator = DiagonalHamiltonian::generator(&instance, model)?;
        let cost = match model {
            Model::Qubo => generator.abs(),
            Model::Pubo => generator.clone(),
        };
        Ok(Problem {
            instance,
            model,
            generator,
            cost,
        })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn model(&self) -> Model {
        self.model
    }

    /// Diagonal driving the phase separator (`H_LP` or `H_QP`).
    pub fn generator(&self) -> &DiagonalHamiltonian {
        &self.generator
    }

    /// Diagonal whose expectation is the cost (`|H_LP|` or `H_QP`).
    pub fn cost_diagonal(&self) -> &DiagonalHamiltonian {
        &self.cost
    }

    /// `C_LP = <|H_LP|>` or `C_QP = <H_QP>`.
    pub fn cost(&self, state: &StateVector) -> Result<f64> {
        state.expectation(&self.cost)
    }

    pub fn run(
        &self,
        params: &QaoaParams,
        pattern: InitPattern,
        mixer: MixerSpec,
    ) -> Result<StateVector> {
        simulator::run_ansatz(
            &self.generator,
            &params.gammas,
            &params.betas,
            pattern,
            mixer,
        )
    }
}

/// Wraps an angle into `[-pi, pi]`, leaving in-range values untouched.
pub fn canonical_angle(x: f64) -> f64 {
    if (-PI..=PI).contains(&x) {
        x
    } else {
        (x + PI).rem_euclid(TAU) - PI
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.len() != betas.len() {
            return Err(Error::DimensionMismatch {
                expected: gammas.len(),
                got: betas.len(),
            });
        }
        Ok(QaoaParams { gammas, betas })
    }

    pub fn zeros(depth: usize) -> Self {
        QaoaParams {
            gammas: vec![0.0; depth],
            betas: vec![0.0; depth],
        }
    }

    pub fn depth(&self) -> usize {
        self.gammas.len()
    }

    /// `[gamma_1..gamma_l, beta_1..beta_l]`
    pub fn to_vec(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn from_slice(x: &[f64]) -> Self {
        let l = x.len() / 2;
        QaoaParams {
            gammas: x[..l].to_vec(),
            betas: x[l..2 * l].to_vec(),
        }
    }

    /// Same circuit with one more `(gamma, beta) = (0, 0)` layer.
    pub fn extended(&self) -> Self {
        let mut p = self.clone();
        p.gammas.push(0.0);
        p.betas.push(0.0);
        p
    }

    pub fn canonical(&self) -> Self {
        QaoaParams {
            gammas: self.gammas.iter().map(|&g| canonical_angle(g)).collect(),
            betas: self.betas.iter().map(|&b| canonical_angle(b)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Starting points per depth (warm start or zero point plus random draws).
    pub restarts: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Evaluation cap per start is this times the depth.
    pub evals_per_layer: usize,
    /// Initial simplex edge, in radians.
    pub step: f64,
    /// Dimension-adaptive simplex coefficients.
    pub adaptive: bool,
    /// Re-seed the simplex around the best point while budget remains.
    pub reseed: bool,
    /// `None` picks the model default (alternating for QUBO, plus for PUBO).
    pub pattern: Option<InitPattern>,
    pub mixer: MixerSpec,
    pub top_k: usize,
    pub parallelism: Parallelism,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 10,
            seed: 0,
            tolerance: 1e-8,
            evals_per_layer: 500,
            step: 0.5,
            adaptive: true,
            reseed: true,
            pattern: None,
            mixer: MixerSpec::default(),
            top_k: 8,
            parallelism: Parallelism::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn pattern_for(&self, model: Model) -> InitPattern {
        self.pattern
            .unwrap_or_else(|| InitPattern::default_for(model))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthOptimum {
    pub params: QaoaParams,
    pub c_min: f64,
    /// Whether the winning start met the tolerance before its budget ran out.
    pub converged: bool,
    /// Objective evaluations summed over all starts.
    pub evaluations: usize,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of random start `restart` at depth `depth`; independent of the
/// order in which starts execute.
pub fn restart_seed(seed: u64, depth: usize, restart: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ depth as u64) ^ restart as u64)
}

/// Optimizes a depth-`depth` ansatz from the warm start (extended by a zero
/// layer) or, without one, the all-zero point, plus `restarts - 1` uniform
/// random draws in `[-pi, pi]^(2 depth)`.
pub fn optimize_depth(
    problem: &Problem,
    depth: usize,
    config: &OptimizerConfig,
    warm_start: Option<&QaoaParams>,
) -> Result<DepthOptimum> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if config.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let first = match warm_start {
        Some(w) if w.depth() + 1 == depth => w.canonical().extended(),
        Some(w) => {
            return Err(Error::InvalidArgument(format!(
                "warm start has depth {}, expected {}",
                w.depth(),
                depth - 1
            )))
        }
        None => QaoaParams::zeros(depth),
    };
    let mut starts = vec![first.to_vec()];
    for r in 1..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(config.seed, depth, r));
        starts.push((0..2 * depth).map(|_| rng.random_range(-PI..=PI)).collect());
    }

    let pattern = config.pattern_for(problem.model);
    let budget = config.evals_per_layer * depth;
    let results: Vec<Result<Minimum>> = exec::map_tasks(config.parallelism, &starts, |x0| {
        let mut failure = None;
        let mut objective = |x: &[f64]| {
            let params = QaoaParams::from_slice(x).canonical();
            match problem
                .run(&params, pattern, config.mixer)
                .and_then(|s| problem.cost(&s))
            {
                Ok(c) => c,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            }
        };
        let mut m = NelderMead {
            tolerance: config.tolerance,
            max_evals: budget,
            step: config.step,
            adaptive: config.adaptive,
        }
        .minimize(x0, &mut objective);
        while config.reseed && m.evals + 2 * depth + 2 < budget {
            let again = NelderMead {
                tolerance: config.tolerance,
                max_evals: budget - m.evals,
                step: config.step,
                adaptive: config.adaptive,
            }
            .minimize(&m.x, &mut objective);
            let improved = again.f < m.f - config.tolerance;
            let evals = m.evals + again.evals;
            if again.f < m.f {
                m = Minimum { evals, ..again };
            } else {
                m.evals = evals;
            }
            if !improved {
                break;
            }
        }
        match failure {
            Some(e) => Err(e),
            None => Ok(m),
        }
    });

    let mut evaluations = 0;
    let mut best: Option<Minimum> = None;
    for r in results {
        let m = r?;
        evaluations += m.evals;
        // Strict comparison: ties go to the earliest start.
        if best.as_ref().is_none_or(|b| m.f < b.f) {
            best = Some(m);
        }
    }
    let best = best.expect("at least one start");
    Ok(DepthOptimum {
        params: QaoaParams::from_slice(&best.x).canonical(),
        c_min: best.f,
        converged: best.converged,
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthRecord {
    pub l: usize,
    pub c_min: f64,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub fidelity: f64,
    pub confidence: f64,
    pub populations: PopulationReport,
    pub converged: bool,
    pub evaluations: usize,
    /// `C_l / C_{l-1}`; absent at `l = 1` or when the previous cost is 0.
    pub ratio_prev: Option<f64>,
    /// `C_l / C_1`; absent when `C_1` is 0.
    pub ratio_first: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub semiprime: u64,
    pub model: Model,
    pub pattern: InitPattern,
    pub seed: u64,
    pub restarts: usize,
    pub depths: Vec<DepthRecord>,
}

impl RunRecord {
    pub fn last(&self) -> &DepthRecord {
        self.depths.last().expect("sweeps have at least one depth")
    }

    pub fn c_min_sequence(&self) -> Vec<f64> {
        self.depths.iter().map(|d| d.c_min).collect()
    }
}

/// Optimizes depths `1..=l_max`, each warm-started from the previous optimum.
pub fn depth_sweep(problem: &Problem, l_max: usize, config: &OptimizerConfig) -> Result<RunRecord> {
    if l_max == 0 {
        return Err(Error::InvalidArgument("layers must be at least 1".into()));
    }
    let pattern = config.pattern_for(problem.model);
    let mut depths: Vec<DepthRecord> = Vec::with_capacity(l_max);
    let mut warm: Option<QaoaParams> = None;
    for l in 1..=l_max {
        let opt = optimize_depth(problem, l, config, warm.as_ref())?;
        if let Some(prev) = depths.last() {
            if opt.c_min > prev.c_min {
                return Err(Error::Invariant(format!(
                    "cost increased from {} to {} at depth {l}",
                    prev.c_min, opt.c_min
                )));
            }
        }
        let state = problem.run(&opt.params, pattern, config.mixer)?;
        let ratio = |den: f64| (den != 0.0).then(|| opt.c_min / den);
        depths.push(DepthRecord {
            l,
            c_min: opt.c_min,
            gammas: opt.params.gammas.clone(),
            betas: opt.params.betas.clone(),
            fidelity: analysis::fidelity(&state, problem.instance())?,
            confidence: analysis::confidence(&normalized(state.probabilities()))?,
            populations: analysis::population_report(&state, problem.instance(), config.top_k)?,
            converged: opt.converged,
            evaluations: opt.evaluations,
            ratio_prev: depths.last().and_then(|p| ratio(p.c_min)),
            ratio_first: depths
                .first()
                .map_or((opt.c_min != 0.0).then_some(1.0), |f| ratio(f.c_min)),
        });
        warm = Some(opt.params);
    }
    Ok(RunRecord {
        semiprime: problem.instance().semiprime(),
        model: problem.model,
        pattern,
        seed: config.seed,
        restarts: config.restarts,
        depths,
    })
}

/// Removes the `~1e-15` drift a long circuit leaves in the total probability.
fn normalized(mut p: Vec<f64>) -> Vec<f64> {
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(n: u64, model: Model) -> Problem {
        Problem::new(Instance::new(n).unwrap(), model).unwrap()
    }

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 3,
            evals_per_layer: 120,
            ..OptimizerConfig::default()
        }
    }

    #[test]
    fn cost_examples() {
        for model in Model::ALL {
            let p = problem(25, model);
            let sol = StateVector::basis(4, 10).unwrap();
            assert_eq!(p.cost(&sol).unwrap(), 0.0);
        }
        let u = StateVector::initial(4, InitPattern::Plus).unwrap();
        assert!((problem(25, Model::Qubo).cost(&u).unwrap() - 14.5).abs() < 1e-12);
        assert!((problem(25, Model::Pubo).cost(&u).unwrap() - 266.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_angles() {
        assert_eq!(canonical_angle(1.0), 1.0);
        assert_eq!(canonical_angle(PI), PI);
        assert!((canonical_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((canonical_angle(-7.0) - (-7.0 + TAU)).abs() < 1e-15);
        let once = canonical_angle(12.3);
        assert_eq!(canonical_angle(once), once);
    }

    #[test]
    fn params_layout() {
        let p = QaoaParams::new(vec![1.0, 2.0], vec![3.0, 4.0]).unwrap();
        assert_eq!(p.to_vec(), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(QaoaParams::from_slice(&p.to_vec()), p);
        assert_eq!(p.extended().to_vec(), vec![1.0, 2.0, 0.0, 3.0, 4.0, 0.0]);
        assert!(QaoaParams::new(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn optimize_never_worse_than_zero_point() {
        let q = optimize_depth(&problem(25, Model::Qubo), 1, &quick(), None).unwrap();
        assert!(q.c_min <= 14.5);
        let p = optimize_depth(&problem(25, Model::Pubo), 1, &quick(), None).unwrap();
        assert!(p.c_min <= 266.0);
        assert_eq!(q.params.depth(), 1);
    }

    #[test]
    fn optimize_rejects_bad_arguments() {
        let p = problem(25, Model::Qubo);
        assert!(optimize_depth(&p, 0, &quick(), None).is_err());
        let cfg = OptimizerConfig {
            restarts: 0,
            ..quick()
        };
        assert!(optimize_depth(&p, 1, &cfg, None).is_err());
        let warm = QaoaParams::zeros(3);
        assert!(optimize_depth(&p, 2, &quick(), Some(&warm)).is_err());
    }

    #[test]
    fn sweep_is_monotone_and_deterministic() {
        let p = problem(35, Model::Qubo);
        let a = depth_sweep(&p, 4, &quick()).unwrap();
        let b = depth_sweep(&p, 4, &quick()).unwrap();
        assert_eq!(a, b);
        let c = a.c_min_sequence();
        assert!(c.windows(2).all(|w| w[1] <= w[0]), "{c:?}");
        assert_eq!(a.depths[0].ratio_prev, None);
        assert!(a
            .depths
            .iter()
            .all(|d| d.gammas.iter().chain(&d.betas).all(|x| x.abs() <= PI)));
        assert!(depth_sweep(&p, 0, &quick()).is_err());
    }

    #[test]
    fn single_depth_sweep_matches_optimize() {
        let p = problem(21, Model::Pubo);
        let rec = depth_sweep(&p, 1, &quick()).unwrap();
        let opt = optimize_depth(&p, 1, &quick(), None).unwrap();
        assert_eq!(rec.depths[0].c_min, opt.c_min);
        assert_eq!(rec.depths[0].gammas, opt.params.gammas);
    }

    #[test]
    fn restart_seeds_differ() {
        let a = restart_seed(0, 1, 1);
        assert_ne!(a, restart_seed(0, 1, 2));
        assert_ne!(a, restart_seed(0, 2, 1));
        assert_ne!(a, restart_seed(1, 1, 1));
    }
}
