//! Nelder-Mead simplex search on the unit cube.
//!
//! Trial points leaving `[0, 1]^D` are folded back by mirror reflection at
//! the violated face. Termination is by objective spread across the simplex;
//! after each termination the search restarts around the incumbent with a
//! fresh, smaller simplex until a restart no longer improves it.

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const MAX_RESTARTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Edge length of the initial simplex in unit-cube coordinates.
    pub initial_step: f64,
    pub max_iterations: usize,
    /// Terminate when `f_worst - f_best <= tol * (1 + |f_best|)`.
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult<const D: usize> {
    pub x: [f64; D],
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Mirror `x` back into `[0, 1]`.
pub fn fold_unit(x: f64) -> f64 {
    let y = if x < 0.0 {
        -x
    } else if x > 1.0 {
        2.0 - x
    } else {
        x
    };
    y.clamp(0.0, 1.0)
}

pub fn minimize<const D: usize>(
    mut objective: impl FnMut(&[f64; D]) -> f64,
    start: [f64; D],
    options: &SimplexOptions,
) -> SimplexResult<D> {
    let mut eval = |x: &[f64; D], count: &mut usize| {
        *count += 1;
        let v = objective(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut evaluations = 0;
    let mut iterations = 0;
    let mut best_x = start.map(fold_unit);
    let mut best_f = eval(&best_x, &mut evaluations);
    let mut step = options.initial_step;
    let mut converged = false;

    for restart in 0..=MAX_RESTARTS {
        let (x, f, done, iters) =
            run(&mut eval, &mut evaluations, best_x, best_f, step, options, options.max_iterations - iterations);
        iterations += iters;
        let improved = best_f - f > options.tolerance * (1.0 + f.abs());
        if f <= best_f {
            best_x = x;
            best_f = f;
        }
        converged |= done;
        if !done || iterations >= options.max_iterations {
            break;
        }
        if restart > 0 && !improved {
            break;
        }
        step *= 0.5;
    }

    SimplexResult { x: best_x, f: best_f, iterations, evaluations, converged }
}

fn run<const D: usize>(
    eval: &mut impl FnMut(&[f64; D], &mut usize) -> f64,
    evaluations: &mut usize,
    start: [f64; D],
    start_f: f64,
    step: f64,
    options: &SimplexOptions,
    budget: usize,
) -> ([f64; D], f64, bool, usize) {
    let mut simplex: Vec<([f64; D], f64)> = Vec::with_capacity(D + 1);
    simplex.push((start, start_f));
    for i in 0..D {
        let mut v = start;
        v[i] = if v[i] + step <= 1.0 { v[i] + step } else { v[i] - step };
        let f = eval(&v, evaluations);
        simplex.push((v, f));
    }

    let mut iterations = 0;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let f_best = simplex[0].1;
        let f_worst = simplex[D].1;
        if f_worst - f_best <= options.tolerance * (1.0 + f_best.abs()) {
            return (simplex[0].0, f_best, true, iterations);
        }
        if iterations >= budget {
            return (simplex[0].0, f_best, false, iterations);
        }
        iterations += 1;

        let mut centroid = [0.0; D];
        for (v, _) in &simplex[..D] {
            for k in 0..D {
                centroid[k] += v[k] / D as f64;
            }
        }
        let worst = simplex[D].0;
        let along = |t: f64| -> [f64; D] {
            let mut p = [0.0; D];
            for k in 0..D {
                p[k] = fold_unit(centroid[k] + t * (centroid[k] - worst[k]));
            }
            p
        };

        let reflected = along(REFLECT);
        let f_r = eval(&reflected, evaluations);
        if f_r < f_best {
            let expanded = along(EXPAND);
            let f_e = eval(&expanded, evaluations);
            simplex[D] = if f_e < f_r { (expanded, f_e) } else { (reflected, f_r) };
            continue;
        }
        if f_r < simplex[D - 1].1 {
            simplex[D] = (reflected, f_r);
            continue;
        }
        let (contracted, f_c) = if f_r < f_worst {
            let p = along(CONTRACT);
            let f = eval(&p, evaluations);
            (p, f)
        } else {
            let p = along(-CONTRACT);
            let f = eval(&p, evaluations);
            (p, f)
        };
        if f_c < f_worst.min(f_r) {
            simplex[D] = (contracted, f_c);
            continue;
        }
        let best = simplex[0].0;
        for (v, f) in simplex.iter_mut().skip(1) {
            for k in 0..D {
                v[k] = best[k] + SHRINK * (v[k] - best[k]);
            }
            *f = eval(v, evaluations);
        }
    }
}
