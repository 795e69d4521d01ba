//! Preconditioned conjugate gradients on flat real vectors.

pub(crate) struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` for symmetric positive (semi-)definite `A` until
/// `‖b − A x‖ ≤ tol · ‖b‖`.
pub(crate) fn pcg(
    mut apply: impl FnMut(&[f64]) -> Vec<f64>,
    mut precondition: impl FnMut(&[f64]) -> Vec<f64>,
    b: &[f64],
    x0: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> CgOutcome {
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        return CgOutcome {
            x: vec![0.0; b.len()],
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }
    let mut x = x0;
    let ax = apply(&x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut rel = dot(&r, &r).sqrt() / b_norm;
    if rel <= tol {
        return CgOutcome {
            x,
            iterations: 0,
            residual: rel,
            converged: true,
        };
    }
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut done = 0;
    for it in 1..=max_iter {
        done = it;
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        // breakdown, or a non-finite operator
        if !(pap > 0.0 && pap.is_finite()) {
            break;
        }
        let alpha = rz / pap;
        x.iter_mut().zip(&p).for_each(|(x, p)| *x += alpha * p);
        r.iter_mut().zip(&ap).for_each(|(r, ap)| *r -= alpha * ap);
        rel = dot(&r, &r).sqrt() / b_norm;
        if rel <= tol {
            return CgOutcome {
                x,
                iterations: it,
                residual: rel,
                converged: true,
            };
        }
        z = precondition(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
    }
    CgOutcome {
        x,
        iterations: done,
        residual: rel,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_spd_system() {
        // tridiagonal 1D Laplacian plus identity
        let n = 50;
        let apply = |x: &[f64]| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    let l = if i > 0 { x[i - 1] } else { 0.0 };
                    let r = if i + 1 < n { x[i + 1] } else { 0.0 };
                    3.0 * x[i] - l - r
                })
                .collect()
        };
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let out = pcg(apply, |r| r.to_vec(), &b, vec![0.0; n], 1e-12, 200);
        assert!(out.converged);
        let ax = apply(&out.x);
        let err: f64 = ax.iter().zip(&b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }

    #[test]
    fn zero_rhs_is_immediate() {
        let out = pcg(|x| x.to_vec(), |r| r.to_vec(), &[0.0; 4], vec![1.0; 4], 1e-10, 10);
        assert_eq!(out.iterations, 0);
        assert_eq!(out.x, vec![0.0; 4]);
    }
}
