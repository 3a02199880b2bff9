//! Smallest eigenpairs of `K x = lambda M x` for sparse symmetric positive
//! definite pencils: block Lanczos on `(K - sigma M)^{-1} M` in the
//! `M`-inner product with full reorthogonalization.

use faer::linalg::solvers::Solve;
use faer::{Mat, Par, Side};

use crate::error::{Error, Result};
use crate::sparse::SparseSym;

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    /// `M`-normalized eigenvector.
    pub vector: Vec<f64>,
    /// `|K x - lambda M x| / |K x|`.
    pub residual: f64,
    /// Index of the cluster of numerically equal eigenvalues.
    pub cluster: usize,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Required relative residual.
    pub tol: f64,
    pub block: usize,
    /// Largest Krylov basis before giving up; 0 picks a default.
    pub max_basis: usize,
    pub seed: u64,
    /// Shift below the smallest eigenvalue.
    pub shift: f64,
    /// Relative gap under which eigenvalues form one cluster.
    pub cluster_gap: f64,
    /// Systems up to this size are solved densely.
    pub dense_below: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-9, block: 3, max_basis: 0, seed: 0x5eed, shift: 0.0, cluster_gap: 1e-6, dense_below: 300 }
    }
}

/// The `count` smallest eigenpairs, ascending.
pub fn smallest_eigenpairs(k: &SparseSym, m: &SparseSym, count: usize, opts: &SolverOptions) -> Result<Vec<EigenPair>> {
    let n = k.n;
    if n == 0 {
        return Err(Error::EmptySystem);
    }
    if count == 0 || count > n {
        return Err(Error::Precondition(format!("requested {count} eigenpairs of a system of size {n}")));
    }
    if !k.is_symmetric_finite() || !m.is_symmetric_finite() {
        return Err(Error::Factorization("matrix has non-finite entries".into()));
    }
    if n <= opts.dense_below {
        return dense_eigenpairs(k, m, count, opts);
    }
    lanczos(k, m, count, opts)
}

/// Deterministic uniform numbers in `[-0.5, 0.5)`.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += a * x);
}

/// Classical Gram-Schmidt against `basis` in the `M`-inner product, twice.
/// Returns the accumulated coefficients and the final `M`-norm.
fn orthogonalize(m: &SparseSym, basis: &[Vec<f64>], w: &mut [f64]) -> (Vec<f64>, f64) {
    let mut coef = vec![0.0; basis.len()];
    let mut mw = m.mul_vec(w);
    for _ in 0..2 {
        let c: Vec<f64> = basis.iter().map(|q| dot(q, &mw)).collect();
        for (q, ci) in basis.iter().zip(&c) {
            axpy(-ci, q, w);
        }
        coef.iter_mut().zip(&c).for_each(|(a, b)| *a += b);
        mw = m.mul_vec(w);
    }
    (coef, dot(w, &mw).max(0.0).sqrt())
}

struct Factor {
    llt: faer::sparse::linalg::solvers::Llt<usize, f64>,
    n: usize,
}

impl Factor {
    fn new(a: &SparseSym) -> Result<Factor> {
        faer::set_global_parallelism(Par::Seq);
        let mat = a.to_faer()?;
        let llt = mat
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::Factorization(format!("sparse Cholesky: {e:?}")))?;
        Ok(Factor { llt, n: a.n })
    }

    fn solve(&self, rhs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut b = Mat::<f64>::from_fn(self.n, rhs.len(), |i, j| rhs[j][i]);
        self.llt.solve_in_place(b.as_mut());
        (0..rhs.len()).map(|j| (0..self.n).map(|i| b[(i, j)]).collect()).collect()
    }
}

fn symmetric_eigen(t: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let p = t.len();
    let a = Mat::<f64>::from_fn(p, p, |i, j| 0.5 * (t[i][j] + t[j][i]));
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Factorization(format!("projected eigenproblem: {e:?}")))?;
    let vals: Vec<f64> = (0..p).map(|i| evd.S().column_vector()[i]).collect();
    let u = evd.U();
    let vecs = (0..p).map(|j| (0..p).map(|i| u[(i, j)]).collect()).collect();
    Ok((vals, vecs))
}

fn finish(k: &SparseSym, m: &SparseSym, mut pairs: Vec<(f64, Vec<f64>)>, opts: &SolverOptions) -> Vec<EigenPair> {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ids = cluster(&values, opts.cluster_gap);
    pairs
        .into_iter()
        .zip(ids)
        .map(|((value, mut vector), cluster)| {
            let nrm = m.bilinear(&vector, &vector).sqrt();
            vector.iter_mut().for_each(|v| *v /= nrm);
            let residual = residual(k, m, value, &vector);
            EigenPair { value, vector, residual, cluster }
        })
        .collect()
}

/// `|K x - lambda M x| / |K x|`.
pub fn residual(k: &SparseSym, m: &SparseSym, lambda: f64, x: &[f64]) -> f64 {
    let kx = k.mul_vec(x);
    let mx = m.mul_vec(x);
    let r: f64 = kx.iter().zip(&mx).map(|(a, b)| (a - lambda * b).powi(2)).sum();
    let d: f64 = kx.iter().map(|a| a * a).sum();
    (r / d).sqrt()
}

fn lanczos(k: &SparseSym, m: &SparseSym, count: usize, opts: &SolverOptions) -> Result<Vec<EigenPair>> {
    let n = k.n;
    let b = opts.block.max(1).min(n);
    let max_basis = if opts.max_basis > 0 { opts.max_basis } else { (40 + 8 * count).max(6 * b) }.min(n);
    let shifted = if opts.shift != 0.0 { k.add_scaled(-opts.shift, m) } else { k.clone() };
    let fac = Factor::new(&shifted)?;
    let mut rng = Lcg(opts.seed);

    let mut q: Vec<Vec<f64>> = Vec::new();
    // t[i][j] = (q_i, OP q_j)_M, filled as columns are processed.
    let mut t: Vec<Vec<f64>> = Vec::new();
    let push_random = |q: &mut Vec<Vec<f64>>, t: &mut Vec<Vec<f64>>, rng: &mut Lcg| {
        for _ in 0..8 {
            let mut v: Vec<f64> = (0..n).map(|_| rng.next()).collect();
            let (_, nrm) = orthogonalize(m, q, &mut v);
            if nrm > 1e-10 {
                v.iter_mut().for_each(|x| *x /= nrm);
                q.push(v);
                t.iter_mut().for_each(|row| row.push(0.0));
                t.push(vec![0.0; q.len()]);
                return true;
            }
        }
        false
    };
    for _ in 0..b {
        if !push_random(&mut q, &mut t, &mut rng) {
            return Err(Error::Factorization("could not build a starting block".into()));
        }
    }

    let mut done = 0;
    loop {
        let block: Vec<usize> = (done..q.len()).collect();
        let mq: Vec<Vec<f64>> = block.iter().map(|&j| m.mul_vec(&q[j])).collect();
        let ws = fac.solve(&mq);
        for (&j, mut w) in block.iter().zip(ws) {
            let before = m.bilinear(&w, &w).sqrt();
            let (coef, nrm) = orthogonalize(m, &q, &mut w);
            for (i, c) in coef.iter().enumerate() {
                t[i][j] += c;
            }
            if q.len() >= max_basis.max(count + b) {
                continue;
            }
            if nrm > 1e-10 * before {
                w.iter_mut().for_each(|x| *x /= nrm);
                q.push(w);
                t.iter_mut().for_each(|row| row.push(0.0));
                let mut row = vec![0.0; q.len()];
                row[j] = nrm;
                t.push(row);
            } else {
                push_random(&mut q, &mut t, &mut rng);
            }
        }
        done = block.last().map_or(done, |&j| j + 1);
        let exhausted = q.len() == done;

        if done >= count + b || exhausted {
            let proj: Vec<Vec<f64>> = (0..done).map(|i| t[i][..done].to_vec()).collect();
            let (theta, s) = symmetric_eigen(&proj)?;
            // Largest theta = smallest lambda.
            let top: Vec<usize> = (0..done).rev().take(count).collect();
            let est = top.iter().map(|&c| {
                let r: f64 = (done..q.len())
                    .map(|nk| (0..done).map(|i| t[nk][i] * s[c][i]).sum::<f64>().powi(2))
                    .sum();
                r.sqrt() / theta[c].abs()
            });
            let est_max = est.fold(0.0, f64::max);
            if est_max < opts.tol || exhausted || done >= max_basis {
                let pairs: Vec<(f64, Vec<f64>)> = top
                    .iter()
                    .map(|&c| {
                        let mut y = vec![0.0; n];
                        for i in 0..done {
                            axpy(s[c][i], &q[i], &mut y);
                        }
                        (opts.shift + 1.0 / theta[c], y)
                    })
                    .collect();
                let out = finish(k, m, pairs, opts);
                let worst = out.iter().map(|p| p.residual).fold(0.0, f64::max);
                if worst <= opts.tol {
                    return Ok(out);
                }
                if exhausted || done >= max_basis {
                    let converged = out.iter().filter(|p| p.residual <= opts.tol).count();
                    return Err(Error::NotConverged { converged, wanted: count, worst });
                }
            }
        }
    }
}

/// Dense generalized eigensolver via `M = L L^T`. Used for small systems
/// and as an independent check of the iterative path.
pub fn dense_eigenpairs(k: &SparseSym, m: &SparseSym, count: usize, opts: &SolverOptions) -> Result<Vec<EigenPair>> {
    faer::set_global_parallelism(Par::Seq);
    let n = k.n;
    let kd = k.to_dense();
    let md = m.to_dense();
    let kmat = Mat::<f64>::from_fn(n, n, |i, j| kd[i][j]);
    let mmat = Mat::<f64>::from_fn(n, n, |i, j| md[i][j]);
    let llt = mmat
        .llt(Side::Lower)
        .map_err(|e| Error::Factorization(format!("mass matrix is not positive definite: {e:?}")))?;
    let l = llt.L();
    let mut x = kmat.clone();
    l.solve_lower_triangular_in_place(x.as_mut());
    let mut c = x.transpose().to_owned();
    l.solve_lower_triangular_in_place(c.as_mut());
    let cs = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    let evd = cs
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Factorization(format!("dense eigensolver: {e:?}")))?;
    let mut y = evd.U().get(.., 0..count).to_owned();
    l.transpose().solve_upper_triangular_in_place(y.as_mut());
    let pairs = (0..count)
        .map(|j| (evd.S().column_vector()[j], (0..n).map(|i| y[(i, j)]).collect()))
        .collect();
    Ok(finish(k, m, pairs, opts))
}

/// Cluster ids for ascending values: neighbours closer than `gap`
/// relative to their magnitude share an id.
pub fn cluster(values: &[f64], gap: f64) -> Vec<usize> {
    let mut ids = Vec::with_capacity(values.len());
    let mut id = 0;
    for (i, &v) in values.iter().enumerate() {
        if i > 0 {
            let prev = values[i - 1];
            if (v - prev).abs() > gap * v.abs().max(prev.abs()) {
                id += 1;
            }
        }
        ids.push(id);
    }
    ids
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1D Laplacian with lumped unit mass: eigenvalues 4 sin^2(k pi / 2(n+1)).
    fn laplace_1d(n: usize) -> (SparseSym, SparseSym) {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i + 1, i, -1.0));
            }
        }
        let k = SparseSym::from_triplets(n, &t);
        let m = SparseSym::from_triplets(n, &(0..n).map(|i| (i, i, 1.0)).collect::<Vec<_>>());
        (k, m)
    }

    fn exact(n: usize, j: usize) -> f64 {
        let s = (j as f64 * std::f64::consts::PI / (2.0 * (n as f64 + 1.0))).sin();
        4.0 * s * s
    }

    #[test]
    fn lanczos_matches_closed_form() {
        let n = 800;
        let (k, m) = laplace_1d(n);
        let pairs = smallest_eigenpairs(&k, &m, 5, &SolverOptions::default()).unwrap();
        for (j, p) in pairs.iter().enumerate() {
            assert!((p.value - exact(n, j + 1)).abs() < 1e-10 * exact(n, j + 1), "{j}: {}", p.value);
            assert!(p.residual <= 1e-9);
        }
    }

    #[test]
    fn dense_matches_closed_form() {
        let n = 40;
        let (k, m) = laplace_1d(n);
        let pairs = dense_eigenpairs(&k, &m, 4, &SolverOptions::default()).unwrap();
        for (j, p) in pairs.iter().enumerate() {
            assert!((p.value - exact(n, j + 1)).abs() < 1e-12);
        }
    }

    #[test]
    fn block_lanczos_resolves_double_eigenvalues() {
        // Two decoupled copies: every eigenvalue is double.
        let n = 400;
        let (k1, _) = laplace_1d(n);
        let mut t: Vec<(usize, usize, f64)> = k1.iter().collect();
        t.extend(k1.iter().map(|(i, j, v)| (i + n, j + n, v)));
        let k = SparseSym::from_triplets(2 * n, &t);
        let m = SparseSym::from_triplets(2 * n, &(0..2 * n).map(|i| (i, i, 1.0)).collect::<Vec<_>>());
        let pairs = smallest_eigenpairs(&k, &m, 4, &SolverOptions::default()).unwrap();
        assert!((pairs[0].value - exact(n, 1)).abs() < 1e-10);
        assert!((pairs[1].value - exact(n, 1)).abs() < 1e-10);
        assert!((pairs[2].value - exact(n, 2)).abs() < 1e-10);
        assert_eq!(pairs[0].cluster, pairs[1].cluster);
        assert_ne!(pairs[1].cluster, pairs[2].cluster);
    }

    #[test]
    fn indefinite_stiffness_fails_to_factor() {
        let k = SparseSym::from_triplets(400, &(0..400).map(|i| (i, i, if i == 7 { -1.0 } else { 1.0 })).collect::<Vec<_>>());
        let m = SparseSym::from_triplets(400, &(0..400).map(|i| (i, i, 1.0)).collect::<Vec<_>>());
        assert!(matches!(smallest_eigenpairs(&k, &m, 2, &SolverOptions::default()), Err(Error::Factorization(_))));
    }

    #[test]
    fn clusters_split_on_relative_gap() {
        assert_eq!(cluster(&[1.0, 1.0 + 1e-9, 2.0, 3.0, 3.0], 1e-6), vec![0, 0, 1, 2, 2]);
    }
}
