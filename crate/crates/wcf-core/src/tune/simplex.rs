//! Compact Nelder–Mead with the standard reflection/expansion/contraction
//! coefficients and a shrink step.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

pub struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
}

pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    scale: f64,
    max_iter: usize,
    tol: f64,
) -> SimplexResult {
    let d = x0.len();
    let mut eval = |pt: &[f64]| f(pt);
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    pts.push(x0.to_vec());
    for i in 0..d {
        let mut p = x0.to_vec();
        p[i] += scale;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();

    for _ in 0..max_iter {
        // order ascending by value
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap_or(core::cmp::Ordering::Equal));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = vals[d] - vals[0];
        let diameter = pts[1..]
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&pts[0])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0f64, f64::max);
        if spread < tol && diameter < tol {
            break;
        }

        let centroid: Vec<f64> = (0..d)
            .map(|i| pts[..d].iter().map(|p| p[i]).sum::<f64>() / d as f64)
            .collect();
        let combine = |t: f64| -> Vec<f64> {
            (0..d)
                .map(|i| centroid[i] + t * (centroid[i] - pts[d][i]))
                .collect()
        };
        let reflected = combine(1.0);
        let fr = eval(&reflected);
        if fr < vals[0] {
            let expanded = combine(2.0);
            let fe = eval(&expanded);
            if fe < fr {
                pts[d] = expanded;
                vals[d] = fe;
            } else {
                pts[d] = reflected;
                vals[d] = fr;
            }
        } else if fr < vals[d - 1] {
            pts[d] = reflected;
            vals[d] = fr;
        } else {
            let contracted = combine(-0.5);
            let fc = eval(&contracted);
            if fc < vals[d] {
                pts[d] = contracted;
                vals[d] = fc;
            } else {
                for i in 1..=d {
                    let shrunk: Vec<f64> = (0..d)
                        .map(|k| pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]))
                        .collect();
                    vals[i] = eval(&shrunk);
                    pts[i] = shrunk;
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=d {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    SimplexResult { point: pts[best].clone(), value: vals[best] }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_shifted_quadratic() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2);
        let out = nelder_mead(f, &[0.0, 0.0], 0.5, 2000, 1e-12);
        assert!((out.point[0] - 1.5).abs() < 1e-5, "{:?}", out.point);
        assert!((out.point[1] + 0.5).abs() < 1e-5);
        assert!(out.value < 1e-9);
    }

    #[test]
    fn handles_one_dimension() {
        let f = |x: &[f64]| (x[0] - 2.0).abs();
        let out = nelder_mead(f, &[-3.0], 1.0, 600, 1e-12);
        assert!((out.point[0] - 2.0).abs() < 1e-6);
    }
}
