//! Smallest nontrivial eigenpairs of graph Laplacians.
//!
//! Thick-restarted Lanczos with full reorthogonalization. Every basis
//! vector is kept orthogonal to the Krylov basis and to the constant
//! null vector `1/sqrt(n)`, so the iteration works on the complement of
//! the trivial eigenvector and the first Ritz pair is `lambda_2`.
//! Invariant subspaces (repeated eigenvalues of symmetric graphs) end the
//! Krylov sequence early; a fresh random direction is injected when that
//! happens, and once everything looks converged one more random direction
//! is tried before accepting, so a missed copy of a repeated eigenvalue
//! shows up.
//!
//! Per iteration the cost is one sparse product, `O(m + n)`, plus
//! `O(n * basis)` for reorthogonalization with a basis size independent
//! of `n`.

use nalgebra::DMatrix;
use rand::Rng as _;
use rand::SeedableRng;

use crate::error::EigenError;
use crate::rng::Rng;
use crate::sparse::SymCsr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Residual tolerance: converged when `||L y - lambda y|| <= tol * max(1, lambda)`.
    pub tol: f64,
    /// Cap on matrix-vector products; `None` means `10 n`.
    pub max_iter: Option<usize>,
    pub seed: u64,
    /// Also resolve `lambda_{K+1}`.
    pub next_eigenvalue: bool,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: None,
            seed: 0x5eed,
            next_eigenvalue: true,
        }
    }
}

impl EigenOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// Columns of `y` are the eigenvectors of `lambda_2..lambda_K`, ascending.
#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    pub y: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
    /// `lambda_{K+1}` when requested and `K + 1 <= n`.
    pub lambda_next: Option<f64>,
    pub k: usize,
    pub residuals: Vec<f64>,
    pub matvecs: usize,
    /// `lambda_2` fell below `1e-10 n`.
    pub disconnected: bool,
}

impl SpectralEmbedding {
    /// `S_{2:K}`, the sum of `lambda_2..lambda_K`.
    pub fn partial_sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

/// Partial eigenvalue sum `S_{2:K}(L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialEigsum {
    pub value: f64,
    pub k: usize,
    pub n: usize,
}

impl PartialEigsum {
    pub fn normalized(&self) -> f64 {
        self.value / self.n as f64
    }
}

/// Eigenvectors for `lambda_2..lambda_K` of a connected graph's Laplacian.
pub fn smallest_eigenpairs(
    l: &SymCsr,
    k: usize,
    opts: &EigenOptions,
) -> Result<SpectralEmbedding, EigenError> {
    let emb = smallest_eigenpairs_any(l, k, opts)?;
    if emb.disconnected {
        return Err(EigenError::Disconnected {
            lambda2: emb.eigenvalues[0],
        });
    }
    Ok(emb)
}

/// As [`smallest_eigenpairs`] but a disconnected graph only sets the
/// `disconnected` flag; the extra zero eigenvalues are kept.
pub fn smallest_eigenpairs_any(
    l: &SymCsr,
    k: usize,
    opts: &EigenOptions,
) -> Result<SpectralEmbedding, EigenError> {
    let n = l.dim();
    if k < 2 || k > n {
        return Err(EigenError::InvalidOrder { k, n });
    }
    let want_next = opts.next_eigenvalue && k < n;
    let nev = if want_next { k } else { k - 1 };
    let pairs = lowest_deflated(l, nev, opts)?;
    let mut y = DMatrix::zeros(n, k - 1);
    for (c, v) in pairs.vectors.iter().take(k - 1).enumerate() {
        y.set_column(c, &nalgebra::DVector::from_column_slice(v));
    }
    let eigenvalues = pairs.values[..k - 1].to_vec();
    let disconnected = eigenvalues[0] < 1e-10 * n as f64;
    Ok(SpectralEmbedding {
        y,
        lambda_next: want_next.then(|| pairs.values[k - 1]),
        eigenvalues,
        k,
        residuals: pairs.residuals,
        matvecs: pairs.matvecs,
        disconnected,
    })
}

/// `S_{2:K}(L)`; errors if the graph is disconnected.
pub fn partial_eigenvalue_sum(
    l: &SymCsr,
    k: usize,
    opts: &EigenOptions,
) -> Result<PartialEigsum, EigenError> {
    let opts = EigenOptions {
        next_eigenvalue: false,
        ..*opts
    };
    let emb = smallest_eigenpairs(l, k, &opts)?;
    Ok(PartialEigsum {
        value: emb.partial_sum(),
        k,
        n: l.dim(),
    })
}

struct Pairs {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    residuals: Vec<f64>,
    matvecs: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four partial sums let the compiler vectorize the reduction.
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for i in 0..4 {
            acc[i] += x[i] * y[i];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Two passes of Gram-Schmidt against `1` and the basis. Returns the
/// first-pass coefficients, which are `q_i^T v` for the incoming `v`.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut first = Vec::with_capacity(basis.len());
    for pass in 0..2 {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        for q in basis {
            let c = dot(q, v);
            axpy(-c, q, v);
            if pass == 0 {
                first.push(c);
            }
        }
    }
    first
}

fn random_unit(rng: &mut Rng, basis: &[Vec<f64>], n: usize) -> Option<Vec<f64>> {
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let before = norm(&v);
        orthogonalize(&mut v, basis);
        let after = norm(&v);
        if after > 1e-8 * before {
            v.iter_mut().for_each(|x| *x /= after);
            return Some(v);
        }
    }
    None
}

/// Unnormalized direction orthogonal to the basis, with the norm it had
/// before orthogonalization.
struct Direction {
    v: Vec<f64>,
    before: f64,
}

impl Direction {
    fn unit(self) -> Option<Vec<f64>> {
        let Direction { mut v, before } = self;
        let after = norm(&v);
        (after > 1e-10 * before && after.is_finite()).then(|| {
            v.iter_mut().for_each(|x| *x /= after);
            v
        })
    }
}

/// The `nev` smallest eigenpairs of `l` restricted to the complement of `1`.
///
/// Each new basis vector `v` is multiplied once; the image is
/// orthogonalized against the basis right away, its first-pass
/// coefficients fill the new column of the projected matrix, and what is
/// left becomes the next direction. Residual norms are checked with one
/// product per wanted Ritz pair at each restart, so images need not be
/// stored.
fn lowest_deflated(l: &SymCsr, nev: usize, opts: &EigenOptions) -> Result<Pairs, EigenError> {
    let n = l.dim();
    let space = n - 1;
    let nev = nev.min(space);
    let max_basis = space.min((3 * nev + 20).max(30));
    let keep_target = (nev + (max_basis - nev) / 2).max(nev);
    let max_matvecs = opts.max_iter.unwrap_or(10 * n).max(max_basis);
    let mut rng = Rng::seed_from_u64(opts.seed);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_basis);
    let mut h = DMatrix::<f64>::zeros(max_basis, max_basis);
    let mut next: Option<Direction> = None;
    let mut w = vec![0.0; n];
    let mut matvecs = 0usize;
    let mut verified = false;

    loop {
        while basis.len() < max_basis {
            let v = match next.take().and_then(Direction::unit) {
                Some(v) => v,
                None => match random_unit(&mut rng, &basis, n) {
                    Some(v) => v,
                    None => break,
                },
            };
            l.matvec(&v, &mut w);
            matvecs += 1;
            let idx = basis.len();
            basis.push(v);
            let before = norm(&w);
            let mut image = w.clone();
            let coeffs = orthogonalize(&mut image, &basis);
            for (i, &c) in coeffs.iter().enumerate() {
                h[(i, idx)] = c;
                h[(idx, i)] = c;
            }
            next = Some(Direction { v: image, before });
        }

        let m = basis.len();
        let hm = h.view((0, 0), (m, m)).into_owned();
        let eig = hm.symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let combine = |col: usize| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for (i, s) in basis.iter().enumerate() {
                axpy(eig.eigenvectors[(i, col)], s, &mut out);
            }
            out
        };

        let wanted = nev.min(m);
        let mut max_rel = 0.0f64;
        let mut first_bad = None;
        let mut ritz = Vec::with_capacity(keep_target);
        for (t, &col) in order.iter().take(wanted).enumerate() {
            let theta = eig.eigenvalues[col];
            let x = combine(col);
            l.matvec(&x, &mut w);
            matvecs += 1;
            axpy(-theta, &x, &mut w);
            let rel = norm(&w) / theta.abs().max(1.0);
            if rel > opts.tol && first_bad.is_none() {
                first_bad = Some(t);
            }
            max_rel = max_rel.max(rel);
            ritz.push(x);
        }
        let converged = wanted == nev && first_bad.is_none();
        let exhausted = m >= space || (m < max_basis && next.is_none());

        if exhausted || (converged && verified) {
            return Ok(finish(l, &basis, &eig, &order, wanted, matvecs));
        }
        if matvecs >= max_matvecs {
            return Err(EigenError::NotConverged {
                matvecs,
                residual: max_rel,
            });
        }

        // The next direction is already orthogonal to the whole current
        // basis, so it stays valid after the basis shrinks.
        if converged {
            verified = true;
            next = None;
        }

        let keep = keep_target.min(m.saturating_sub(1)).max(1);
        h.fill(0.0);
        for (t, &col) in order.iter().take(keep).enumerate() {
            if t >= ritz.len() {
                ritz.push(combine(col));
            }
            h[(t, t)] = eig.eigenvalues[col];
        }
        ritz.truncate(keep);
        basis = ritz;
        if next.is_none() {
            next = random_unit(&mut rng, &basis, n).map(|v| Direction { v, before: 1.0 });
        }
    }
}

fn finish(
    l: &SymCsr,
    basis: &[Vec<f64>],
    eig: &nalgebra::SymmetricEigen<f64, nalgebra::Dyn>,
    order: &[usize],
    wanted: usize,
    mut matvecs: usize,
) -> Pairs {
    let n = l.dim();
    let mut values = Vec::with_capacity(wanted);
    let mut vectors = Vec::with_capacity(wanted);
    let mut residuals = Vec::with_capacity(wanted);
    for &col in order.iter().take(wanted) {
        let mut x = vec![0.0; n];
        for (i, q) in basis.iter().enumerate() {
            axpy(eig.eigenvectors[(i, col)], q, &mut x);
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v /= nx);
        let mut lx = vec![0.0; n];
        l.matvec(&x, &mut lx);
        matvecs += 1;
        let theta = dot(&x, &lx);
        axpy(-theta, &x, &mut lx);
        values.push(theta);
        residuals.push(norm(&lx));
        vectors.push(x);
    }
    Pairs {
        values,
        vectors,
        residuals,
        matvecs,
    }
}
