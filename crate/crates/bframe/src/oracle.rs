//! Brute-force reference computations that share no code path with the
//! core solvers: everything here is assembled from `eval` alone and solved
//! through dense normal equations or plain sampling.

use bframe_core::{BilinearMap, Matrix, Vector};
use rand::Rng;

/// Solves `A^T A x = A^T b` by Gaussian elimination with partial pivoting.
/// Returns the solution and `||A x - b||`, or `None` when `A^T A` is
/// numerically singular.
pub fn normal_equations(a: &[Vec<f64>], b: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = a.first().map_or(0, Vec::len);
    let mut m = vec![vec![0.0; n + 1]; n];
    for (row, &rhs) in a.iter().zip(b) {
        for p in 0..n {
            for q in 0..n {
                m[p][q] += row[p] * row[q];
            }
            m[p][n] += row[p] * rhs;
        }
    }
    let scale = m
        .iter()
        .flat_map(|r| r[..n].iter())
        .fold(0.0f64, |s, x| s.max(x.abs()));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() <= 1e-12 * scale.max(1e-300) {
            return None;
        }
        m.swap(col, piv);
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            let f = row[col] / pivot_row[col];
            if r != col && f != 0.0 {
                for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    let x: Vec<f64> = (0..n).map(|i| m[i][n] / m[i][i]).collect();
    let res: f64 = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let ax: f64 = row.iter().zip(&x).map(|(p, q)| p * q).sum();
            (ax - rhs) * (ax - rhs)
        })
        .sum();
    Some((x, res.sqrt()))
}

fn image(bm: &BilinearMap, i: usize, x: &Vector) -> Vector {
    bm.eval(&Vector::basis(bm.dim_h(), i), x)
        .expect("oracle dims")
}

/// Minimal residual of the reverse problem: find `U` with
/// `<b(e_i, f_j), V u_k> = sum_l U[l][j] <b(e_i, f_l), u_k>` for all `i, j, k`.
pub fn reverse_residual(bm: &BilinearMap, v: &Matrix) -> Option<(Matrix, f64)> {
    let (nh, nb, nz) = (bm.dim_h(), bm.dim_b(), bm.dim_z());
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for j in 0..nb {
        for i in 0..nh {
            let bij = image(bm, i, &Vector::basis(nb, j));
            for k in 0..nz {
                let mut row = vec![0.0; nb * nb];
                for l in 0..nb {
                    row[l * nb + j] = image(bm, i, &Vector::basis(nb, l))[k];
                }
                rows.push(row);
                rhs.push(bij.dot(&v.column(k)));
            }
        }
    }
    let (x, res) = normal_equations(&rows, &rhs)?;
    Some((Matrix::from_row_major(nb, nb, x).ok()?, res))
}

/// The b-adjoint of `u` from `sum_m c[i][j][m] V[m][k] = <b(e_i, U f_j), u_k>`;
/// `None` when the system does not determine `V`.
pub fn adjoint(bm: &BilinearMap, u: &Matrix) -> Option<(Matrix, f64)> {
    let (nh, nb, nz) = (bm.dim_h(), bm.dim_b(), bm.dim_z());
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for j in 0..nb {
        let ufj = u.column(j);
        for i in 0..nh {
            let bij = image(bm, i, &Vector::basis(nb, j));
            let target = image(bm, i, &ufj);
            for k in 0..nz {
                let mut row = vec![0.0; nz * nz];
                for m in 0..nz {
                    row[m * nz + k] = bij[m];
                }
                rows.push(row);
                rhs.push(target[k]);
            }
        }
    }
    let (x, res) = normal_equations(&rows, &rhs)?;
    Some((Matrix::from_row_major(nz, nz, x).ok()?, res))
}

/// Defect of `V` in the defining relation, `max |<b(e_i,f_j), V u_k> - <b(e_i, U f_j), u_k>|`.
pub fn adjoint_defect(bm: &BilinearMap, u: &Matrix, v: &Matrix) -> f64 {
    let (nh, nb, nz) = (bm.dim_h(), bm.dim_b(), bm.dim_z());
    let mut worst: f64 = 0.0;
    for j in 0..nb {
        for i in 0..nh {
            let bij = image(bm, i, &Vector::basis(nb, j));
            let target = image(bm, i, &u.column(j));
            for k in 0..nz {
                worst = worst.max((bij.dot(&v.column(k)) - target[k]).abs());
            }
        }
    }
    worst
}

/// `min <s z, z> / <m z, z>` over `samples` random `z` with `<m z, z>` not
/// negligible. An upper estimate of the pencil minimum.
pub fn rayleigh_min<R: Rng>(s: &Matrix, m: &Matrix, samples: usize, rng: &mut R) -> RayleighSweep {
    let n = s.rows();
    let mut sweep = RayleighSweep {
        min_ratio: f64::INFINITY,
        ratios_checked: 0,
        min_gap: f64::INFINITY,
    };
    let scale = m.max_abs();
    for _ in 0..samples {
        let z: Vector = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let den = m.mul_vec(&z).dot(&z);
        if den <= 1e-9 * scale * z.norm_sq() {
            continue;
        }
        let ratio = s.mul_vec(&z).dot(&z) / den;
        sweep.ratios_checked += 1;
        sweep.min_ratio = sweep.min_ratio.min(ratio);
    }
    sweep
}

#[derive(Debug, Clone, Copy)]
pub struct RayleighSweep {
    pub min_ratio: f64,
    pub ratios_checked: usize,
    /// Filled by the caller: smallest `ratio - computed` seen.
    pub min_gap: f64,
}
