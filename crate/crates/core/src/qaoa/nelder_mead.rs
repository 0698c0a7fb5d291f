//! Nelder-Mead simplex minimizer with standard coefficients
//! (reflection 1, expansion 2, contraction 1/2, shrink 1/2).

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    /// Stop once `f_worst - f_best` over the simplex falls to this value.
    pub tolerance: f64,
    pub max_evals: usize,
    /// Edge length of the initial axis-aligned simplex.
    pub step: f64,
    /// Use dimension-dependent coefficients (Gao and Han) instead of the
    /// standard 1, 2, 1/2, 1/2.
    pub adaptive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Coefficients {
    reflect: f64,
    expand: f64,
    contract: f64,
    shrink: f64,
}

impl Coefficients {
    fn new(dim: usize, adaptive: bool) -> Self {
        if adaptive && dim > 0 {
            let n = dim as f64;
            Coefficients {
                reflect: 1.0,
                expand: 1.0 + 2.0 / n,
                contract: 0.75 - 1.0 / (2.0 * n),
                shrink: 1.0 - 1.0 / n,
            }
        } else {
            Coefficients {
                reflect: 1.0,
                expand: 2.0,
                contract: 0.5,
                shrink: 0.5,
            }
        }
    }
}

impl NelderMead {
    /// Minimizes `f` starting from a simplex anchored at `x0`. The returned
    /// value is never worse than `f(x0)`.
    pub fn minimize<F>(&self, x0: &[f64], mut f: F) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let dim = x0.len();
        let k = Coefficients::new(dim, self.adaptive);
        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        let f0 = eval(x0, &mut evals);
        simplex.push((x0.to_vec(), f0));
        for i in 0..dim {
            if evals >= self.max_evals {
                break;
            }
            let mut x = x0.to_vec();
            x[i] += self.step;
            let fx = eval(&x, &mut evals);
            simplex.push((x, fx));
        }
        if dim == 0 || simplex.len() < dim + 1 {
            let (x, fx) = best_of(&simplex);
            return Minimum {
                x,
                f: fx,
                evals,
                converged: dim == 0,
            };
        }

        let mut converged = false;
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (f_best, f_worst) = (simplex[0].1, simplex[dim].1);
            if f_worst - f_best <= self.tolerance {
                converged = true;
                break;
            }
            // A reflect step costs up to two evaluations.
            if evals + 2 > self.max_evals {
                break;
            }

            let centroid: Vec<f64> = (0..dim)
                .map(|j| simplex[..dim].iter().map(|v| v.0[j]).sum::<f64>() / dim as f64)
                .collect();
            let worst = simplex[dim].0.clone();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = along(k.reflect);
            let fr = eval(&xr, &mut evals);
            if fr < f_best {
                let xe = along(k.expand);
                let fe = eval(&xe, &mut evals);
                simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[dim - 1].1 {
                simplex[dim] = (xr, fr);
                continue;
            }
            // Contraction: outside when the reflection improved on the worst.
            let (xc, fc) = if fr < f_worst {
                let xc = along(k.reflect * k.contract);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(-k.contract);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < fr.min(f_worst) {
                simplex[dim] = (xc, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for v in simplex.iter_mut().skip(1) {
                if evals >= self.max_evals {
                    break;
                }
                let x: Vec<f64> = best
                    .iter()
                    .zip(&v.0)
                    .map(|(b, x)| b + k.shrink * (x - b))
                    .collect();
                let fx = eval(&x, &mut evals);
                *v = (x, fx);
            }
        }
        let (x, fx) = best_of(&simplex);
        Minimum {
            x,
            f: fx,
            evals,
            converged,
        }
    }
}

fn best_of(simplex: &[(Vec<f64>, f64)]) -> (Vec<f64>, f64) {
    simplex
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(x, f)| (x.clone(), *f))
        .expect("simplex is never empty")
}
