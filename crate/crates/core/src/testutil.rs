//! Generic numeric minimizers used by the test suites as independent
//! oracles. Nothing here shares code with the closed-form estimators
//! they are used to check.

#![doc(hidden)]

/// Golden-section search for a unimodal scalar function on [lo, hi].
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while (hi - lo).abs() > tol * (1.0 + lo.abs() + hi.abs()) {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Plain Nelder-Mead. Returns the best objective value found.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    start: &[f64],
    max_evals: usize,
    ftol: f64,
) -> f64 {
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut p = start.to_vec();
        let step = if p[i].abs() > 1e-6 { 0.1 * p[i].abs() } else { 0.1 };
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut evals = values.len();

    while evals < max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        if (values[worst] - values[best]).abs()
            <= ftol * (values[best].abs() + values[worst].abs() + 1e-300)
        {
            // Restart around the best point with a shrunk initial step;
            // bail out if both restarts agree.
            let best_point = simplex[best].clone();
            let best_value = values[best];
            simplex = vec![best_point.clone()];
            for i in 0..n {
                let mut p = best_point.clone();
                let step = if p[i].abs() > 1e-8 { 0.01 * p[i].abs() } else { 0.01 };
                p[i] += step;
                simplex.push(p);
            }
            values = simplex.iter().map(|p| f(p)).collect();
            evals += values.len();
            if values
                .iter()
                .all(|v| (v - best_value).abs() <= 10.0 * ftol * (best_value.abs() + 1.0))
            {
                return best_value.min(values.iter().copied().fold(f64::INFINITY, f64::min));
            }
            continue;
        }

        let mut centroid = vec![0.0; n];
        for (idx, p) in simplex.iter().enumerate() {
            if idx != worst {
                for i in 0..n {
                    centroid[i] += p[i] / n as f64;
                }
            }
        }
        let shifted = |coef: f64| -> Vec<f64> {
            (0..n)
                .map(|i| centroid[i] + coef * (centroid[i] - simplex[worst][i]))
                .collect()
        };

        let reflect = shifted(1.0);
        let fr = f(&reflect);
        evals += 1;
        if fr < values[best] {
            let expand = shifted(2.0);
            let fe = f(&expand);
            evals += 1;
            if fe < fr {
                simplex[worst] = expand;
                values[worst] = fe;
            } else {
                simplex[worst] = reflect;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflect;
            values[worst] = fr;
        } else {
            let contract = shifted(-0.5);
            let fc = f(&contract);
            evals += 1;
            if fc < values[worst] {
                simplex[worst] = contract;
                values[worst] = fc;
            } else {
                let best_point = simplex[best].clone();
                for (idx, p) in simplex.iter_mut().enumerate() {
                    if idx != best {
                        for i in 0..n {
                            p[i] = best_point[i] + 0.5 * (p[i] - best_point[i]);
                        }
                    }
                }
                values = simplex.iter().map(|p| f(p)).collect();
                evals += values.len();
            }
        }
    }
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_quadratic_minimum() {
        let min = golden_section(|x| (x - 1.5) * (x - 1.5), 0.0, 10.0, 1e-12);
        assert!((min - 1.5).abs() < 1e-9);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |p: &[f64]| {
            let (x, y) = (p[0], p[1]);
            (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2)
        };
        let best = nelder_mead(&f, &[-1.2, 1.0], 50_000, 1e-14);
        assert!(best < 1e-10, "best {best}");
    }
}
