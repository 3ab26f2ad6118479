//! Dense complex linear algebra helpers: column spaces, null spaces,
//! subspace intersections, spectral projectors.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::scalar::{from_real, modulus, one, real, zero, CMat, CVec, Cx, Real};

pub fn identity<T: Real>(n: usize) -> CMat<T> {
    CMat::<T>::identity(n, n)
}

pub fn empty_basis<T: Real>(n: usize) -> CMat<T> {
    CMat::<T>::zeros(n, 0)
}

pub fn commutator<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a * b - b * a
}

pub fn frob<T: Real>(m: &CMat<T>) -> T {
    m.norm()
}

/// Largest entrywise modulus.
pub fn max_abs<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(modulus(*z)))
}

/// `‖a - b‖_F / max(1, ‖a‖_F, ‖b‖_F)`.
pub fn rel_residual<T: Real>(a: &CMat<T>, b: &CMat<T>) -> T {
    let scale = T::one().max(frob(a)).max(frob(b));
    frob(&(a - b)) / scale
}

pub fn hermitian_part<T: Real>(m: &CMat<T>) -> CMat<T> {
    (m + m.adjoint()) * from_real(real::<T>(0.5))
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig<T: Real>(m: &CMat<T>) -> (Vec<T>, CMat<T>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), empty_basis(0));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::<T>::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Columns indexed by `cols`, in order.
pub fn select_columns<T: Real>(m: &CMat<T>, cols: &[usize]) -> CMat<T> {
    CMat::<T>::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])])
}

pub fn hstack<T: Real>(n: usize, blocks: &[&CMat<T>]) -> CMat<T> {
    let total: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::<T>::zeros(n, total);
    let mut at = 0;
    for b in blocks {
        out.view_mut((0, at), (n, b.ncols())).copy_from(b);
        at += b.ncols();
    }
    out
}

/// Eigen-decomposition of `[[0, M], [Mᴴ, 0]]`, whose eigenvalues are the
/// singular values of `M` with both signs plus zeros.
///
/// nalgebra's `SVD` deflates too early on some rank-deficient inputs and
/// returns factors that do not reproduce the matrix, so singular data is
/// read from the Hermitian eigensolver instead.
fn jordan_wielandt<T: Real>(m: &CMat<T>) -> (Vec<T>, CMat<T>) {
    let (r, c) = m.shape();
    let mut big = CMat::<T>::zeros(r + c, r + c);
    big.view_mut((0, r), (r, c)).copy_from(m);
    big.view_mut((r, 0), (c, r)).copy_from(&m.adjoint());
    hermitian_eig(&big)
}

/// Orthonormal basis of the column space, keeping singular values `> tol`,
/// ordered by decreasing singular value.
pub fn orth<T: Real>(m: &CMat<T>, tol: f64) -> CMat<T> {
    let n = m.nrows();
    if m.ncols() == 0 || n == 0 {
        return empty_basis(n);
    }
    let (vals, vecs) = jordan_wielandt(m);
    // Eigenvectors for +σ are (u; v)/√2 with orthogonal left vectors u.
    let keep: Vec<usize> = (0..vals.len()).rev().filter(|&i| vals[i] > real(tol)).collect();
    if keep.is_empty() {
        return empty_basis(n);
    }
    let upper = CMat::<T>::from_fn(n, keep.len(), |r, c| vecs[(r, keep[c])]);
    upper.qr().q()
}

/// Numerical rank: number of singular values `> tol`.
pub fn rank<T: Real>(m: &CMat<T>, tol: f64) -> usize {
    singular_values(m).iter().filter(|s| **s > real(tol)).count()
}

/// The `min(rows, cols)` singular values, descending.
pub fn singular_values<T: Real>(m: &CMat<T>) -> Vec<T> {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Vec::new();
    }
    let (vals, _) = jordan_wielandt(m);
    vals.iter().rev().take(k).map(|v| v.max(T::zero())).collect()
}

/// Largest singular value (spectral norm).
pub fn spectral_norm<T: Real>(m: &CMat<T>) -> T {
    singular_values(m).first().copied().unwrap_or_else(T::zero)
}

/// Orthonormal basis of `{x : m x = 0}`; singular values `<= tol · max(1, σ_max)`
/// count as zero.
pub fn nullspace<T: Real>(m: &CMat<T>, tol: f64) -> CMat<T> {
    let (r, c) = m.shape();
    if c == 0 {
        return empty_basis(0);
    }
    if r == 0 {
        return identity(c);
    }
    if r > c {
        // Same null space, smaller embedding.
        return nullspace(&m.clone().qr().r(), tol);
    }
    let (vals, vecs) = jordan_wielandt(m);
    let smax = vals.iter().fold(T::one(), |a, v| a.max(v.abs()));
    let cutoff = real::<T>(tol) * smax;
    let near: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].abs() <= cutoff).collect();
    if near.is_empty() {
        return empty_basis(c);
    }
    // The near-zero eigenspace is (null Mᴴ) ⊕ (null M) up to the pairs with
    // tiny nonzero σ; its lower blocks span the right null space.
    let lower = CMat::<T>::from_fn(c, near.len(), |i, k| vecs[(r + i, near[k])]);
    orth(&lower, 0.5)
}

/// Orthogonal projector onto the span of an orthonormal basis.
pub fn projector<T: Real>(basis: &CMat<T>) -> CMat<T> {
    basis * basis.adjoint()
}

/// Orthonormal basis of `range(b1) ∩ range(b2)` for orthonormal `b1`, `b2`.
///
/// Directions at principal angle `θ` with `sin²θ ≤ one_tol` count as shared.
/// They are read off the null space of `[b1, −b2]`, whose singular values
/// are `√(1 ± cos θ)`, so small angles are resolved at working precision
/// rather than through `cos²θ ≈ 1`.
pub fn intersect<T: Real>(b1: &CMat<T>, b2: &CMat<T>, one_tol: f64) -> CMat<T> {
    let n = b1.nrows();
    let (k1, k2) = (b1.ncols(), b2.ncols());
    if k1 == 0 || k2 == 0 {
        return empty_basis(n);
    }
    let mut joint = CMat::<T>::zeros(n, k1 + k2);
    joint.columns_mut(0, k1).copy_from(b1);
    joint.columns_mut(k1, k2).copy_from(&(-b2));
    // √(1 − cos θ) ≈ sin θ / √2 for small θ; the joint singular values top
    // out near √2, which `nullspace` scales by.
    let kernel = nullspace(&joint, (one_tol / 4.0).sqrt());
    if kernel.ncols() == 0 {
        return empty_basis(n);
    }
    let from1 = b1 * kernel.rows(0, k1);
    let from2 = b2 * kernel.rows(k1, k2);
    orth(&((from1 + from2) * from_real(real::<T>(0.5))), 0.5)
}

/// Orthonormal basis of the span of several orthonormal bases.
pub fn span<T: Real>(n: usize, parts: &[&CMat<T>], tol: f64) -> CMat<T> {
    orth(&hstack(n, parts), tol)
}

/// Orthogonal complement of `sub` inside `sup` (both orthonormal, `sub ⊆ sup`).
pub fn complement_in<T: Real>(sub: &CMat<T>, sup: &CMat<T>, tol: f64) -> CMat<T> {
    let n = sup.nrows();
    if sup.ncols() == 0 {
        return empty_basis(n);
    }
    let residual = sup - projector(sub) * sup;
    orth(&residual, tol)
}

/// Spectral projector of a diagonalizable matrix onto the eigenvalue
/// `thetas[i]`, by Lagrange interpolation over all listed eigenvalues.
pub fn lagrange_projector<T: Real>(m: &CMat<T>, thetas: &[Cx<T>], i: usize) -> CMat<T> {
    let n = m.nrows();
    let mut acc = identity::<T>(n);
    for (j, &tj) in thetas.iter().enumerate() {
        if j == i {
            continue;
        }
        let factor = (m - identity::<T>(n) * tj) / (thetas[i] - tj);
        acc = factor * acc;
    }
    acc
}

/// Least-squares solution of `m x ≈ b` for full column rank `m`, via QR.
pub fn lstsq<T: Real>(m: &CMat<T>, b: &CVec<T>) -> Option<CVec<T>> {
    if m.nrows() < m.ncols() {
        return None;
    }
    let qr = m.clone().qr();
    let rhs = qr.q().adjoint() * b;
    qr.r().solve_upper_triangular(&rhs)
}

/// Left inverse `R⁻¹Qᴴ` of a full-column-rank basis `B = QR`; equal to
/// `(BᴴB)⁻¹Bᴴ` without squaring the condition number.
pub fn left_inverse<T: Real>(b: &CMat<T>) -> Option<CMat<T>> {
    if b.nrows() < b.ncols() {
        return None;
    }
    if b.ncols() == 0 {
        return Some(CMat::zeros(0, b.nrows()));
    }
    let qr = b.clone().qr();
    let r = qr.r();
    let scale = max_abs(&r);
    if (0..r.ncols()).any(|i| modulus(r[(i, i)]) <= scale * real::<T>(1e-14)) {
        return None;
    }
    r.solve_upper_triangular(&qr.q().adjoint())
}

/// First coordinate with modulus above `tol · max modulus`; used to fix the
/// phase of a vector deterministically.
pub fn normalize_phase<T: Real>(v: &CVec<T>, tol: f64) -> CVec<T> {
    let nrm = v.norm();
    if nrm == T::zero() {
        return v.clone();
    }
    let unit = v / from_real(nrm);
    let big = unit.iter().fold(T::zero(), |a, z| a.max(modulus(*z)));
    let lead = unit
        .iter()
        .copied()
        .find(|z| modulus(*z) > real::<T>(tol) * big)
        .unwrap_or_else(one);
    let phase = lead / from_real(modulus(lead));
    unit / phase
}

pub fn real_to_complex<T: Real>(m: &DMatrix<T>) -> CMat<T> {
    m.map(from_real)
}

pub fn is_zero_matrix<T: Real>(m: &CMat<T>) -> bool {
    m.iter().all(|z| *z == zero())
}
