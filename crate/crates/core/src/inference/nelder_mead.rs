//! Nelder–Mead simplex minimization.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Converged when every vertex is within this distance (max-norm) of the
    /// best vertex...
    pub x_tolerance: f64,
    /// ...and the objective values span less than this.
    pub f_tolerance: f64,
    /// Offset of the initial vertices along each axis.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_iterations: 2000,
            x_tolerance: 1e-8,
            f_tolerance: 1e-10,
            initial_step: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn eval<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> f64 {
    let v = f(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn along(from: &[f64], to: &[f64], coef: f64) -> Vec<f64> {
    from.iter()
        .zip(to)
        .map(|(a, b)| a + coef * (b - a))
        .collect()
}

/// Minimizes `f` from `start`. NaN values count as `+inf`, so infeasible
/// regions can be expressed by returning either.
pub fn minimize<F>(f: F, start: &[f64], options: &NelderMeadOptions) -> NelderMeadOutcome
where
    F: Fn(&[f64]) -> f64,
{
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += options.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(&f, v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let spread = values[n] - values[0];
        if diameter < options.x_tolerance && spread < options.f_tolerance {
            converged = true;
            break;
        }
        if iterations >= options.max_iterations {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }

        let reflected = along(&centroid, &simplex[n], -REFLECT);
        let f_reflected = eval(&f, &reflected);
        if f_reflected < values[0] {
            let expanded = along(&centroid, &simplex[n], -EXPAND);
            let f_expanded = eval(&f, &expanded);
            if f_expanded < f_reflected {
                simplex[n] = expanded;
                values[n] = f_expanded;
            } else {
                simplex[n] = reflected;
                values[n] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[n - 1] {
            simplex[n] = reflected;
            values[n] = f_reflected;
            continue;
        }
        let (candidate, f_candidate) = if f_reflected < values[n] {
            let outside = along(&centroid, &reflected, CONTRACT);
            let fo = eval(&f, &outside);
            (outside, fo)
        } else {
            let inside = along(&centroid, &simplex[n], CONTRACT);
            let fi = eval(&f, &inside);
            (inside, fi)
        };
        if f_candidate < values[n].min(f_reflected) {
            simplex[n] = candidate;
            values[n] = f_candidate;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            simplex[i] = along(&best, &simplex[i], SHRINK);
            values[i] = eval(&f, &simplex[i]);
        }
    }

    NelderMeadOutcome {
        x: simplex[0].clone(),
        value: values[0],
        iterations,
        converged,
    }
}
