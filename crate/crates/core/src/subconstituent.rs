//! The dual Bose–Mesner algebra at a base vertex, the commutant of
//! `{A, A*}`, and the orthogonal decomposition of the standard module into
//! irreducible `T`-modules.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::bose_mesner::SpectralData;
use crate::error::{Error, Result};
use crate::graph::{Distances, IntersectionData};
use crate::linalg::{frob, hermitian_eig, identity, nullspace, rank, select_columns, singular_values};
use crate::scalar::{from_real, modulus, real, to_f64, CMat, Cx, Real};

/// Dual idempotents, dual distance matrices and the dual eigenvalue
/// sequence with respect to a base vertex.
#[derive(Debug, Clone)]
pub struct DualData<T: Real> {
    pub base: usize,
    pub dual_idempotents: Vec<CMat<T>>,
    pub dual_distance: Vec<CMat<T>>,
    pub theta_star: Vec<T>,
}

impl<T: Real> DualData<T> {
    pub fn astar(&self) -> &CMat<T> {
        &self.dual_distance[1]
    }
}

/// Builds `E*_i`, `A*_i` with `(A*_i)_{yy} = |X| (E_i)_{xy}` and reads off
/// `θ*_i`. `spectral` must already be in Q-polynomial order.
pub fn dual_data<T: Real>(dist: &Distances, spectral: &SpectralData<T>, x: usize, tol: f64) -> Result<DualData<T>> {
    let n = dist.n();
    if x >= n {
        return Err(Error::InvalidGraph(format!("base vertex {x} out of range for n = {n}")));
    }
    let s = spectral.diameter() + 1;
    let nn = real::<T>(n as f64);
    let tol_t = real::<T>(tol);
    let dual_idempotents: Vec<CMat<T>> = (0..s)
        .map(|i| {
            CMat::<T>::from_fn(n, n, |r, c| {
                if r == c && dist.get(x, r) == i { from_real(T::one()) } else { from_real(T::zero()) }
            })
        })
        .collect();
    let dual_distance: Vec<CMat<T>> = spectral
        .idempotents
        .iter()
        .map(|e| CMat::<T>::from_fn(n, n, |r, c| if r == c { e[(x, r)] * from_real(nn) } else { from_real(T::zero()) }))
        .collect();

    let mut theta_star = Vec::with_capacity(s);
    for i in 0..s {
        let sphere = dist.sphere(x, i);
        let first = dual_distance[1][(sphere[0], sphere[0])];
        for &y in &sphere {
            if modulus(dual_distance[1][(y, y)] - first) > tol_t * nn {
                return Err(Error::numerical("dual_data", format!("A* is not constant on subconstituent {i}")));
            }
        }
        theta_star.push(first.re);
    }
    for i in 0..s {
        for j in 0..i {
            if (theta_star[i] - theta_star[j]).abs() <= tol_t * nn {
                return Err(Error::numerical("dual_data", format!("dual eigenvalues θ*_{j} and θ*_{i} coincide")));
            }
        }
    }
    if frob(&(&dual_distance[0] - identity::<T>(n))) > tol_t * nn {
        return Err(Error::numerical("dual_data", "A*_0 is not the identity"));
    }
    for i in 0..s {
        for j in 0..s {
            let lhs = &dual_distance[i] * &dual_distance[j];
            let rhs = (0..s).fold(CMat::<T>::zeros(n, n), |acc, h| {
                acc + &dual_distance[h] * from_real(spectral.krein.get(h, i, j))
            });
            if frob(&(&lhs - &rhs)) > tol_t * frob(&lhs).max(T::one()) {
                return Err(Error::numerical("dual_data", format!("A*_{i} A*_{j} differs from its Krein expansion")));
            }
        }
    }
    Ok(DualData { base: x, dual_idempotents, dual_distance, theta_star })
}

/// Outcome of checking `E*_h A_i E*_j = 0 ⇔ p^h_{ij} = 0` and
/// `E_h A*_i E_j = 0 ⇔ q^h_{ij} = 0` over all triples.
#[derive(Debug, Clone, Default)]
pub struct TripleReport {
    pub checked: usize,
    /// `(kind, h, i, j)` with kind `'p'` or `'q'`.
    pub violations: Vec<(char, usize, usize, usize)>,
}

impl TripleReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn triple_product_checks<T: Real>(
    spectral: &SpectralData<T>,
    dual: &DualData<T>,
    data: &IntersectionData,
    tol_zero: f64,
) -> TripleReport {
    let s = spectral.diameter() + 1;
    let mut report = TripleReport::default();
    for h in 0..s {
        for i in 0..s {
            for j in 0..s {
                let m = &dual.dual_idempotents[h] * &spectral.distance[i] * &dual.dual_idempotents[j];
                let zero = frob(&m) < real::<T>(tol_zero) * frob(&spectral.distance[i]).max(T::one());
                if zero != (data.p(h, i, j) == 0) {
                    report.violations.push(('p', h, i, j));
                }
                let m = &spectral.idempotents[h] * &dual.dual_distance[i] * &spectral.idempotents[j];
                let zero = frob(&m) < real::<T>(tol_zero) * frob(&dual.dual_distance[i]).max(T::one());
                if zero != spectral.krein.is_zero(h, i, j, tol_zero) {
                    report.violations.push(('q', h, i, j));
                }
                report.checked += 2;
            }
        }
    }
    report
}

fn is_diagonal<T: Real>(m: &CMat<T>) -> bool {
    (0..m.nrows()).all(|r| (0..m.ncols()).all(|c| r == c || m[(r, c)] == from_real(T::zero())))
}

/// Frobenius-orthonormal basis of `{Y : YA = AY, YA* = A*Y}`.
///
/// When `A*` is diagonal the unknowns are restricted to its eigenvalue
/// blocks, which is exactly the condition `[Y, A*] = 0`.
pub fn commutant_basis<T: Real>(a: &CMat<T>, astar: &CMat<T>) -> Vec<CMat<T>> {
    let n = a.nrows();
    let unknowns: Vec<(usize, usize)> = if is_diagonal(astar) {
        let tol = real::<T>(1e-9) * astar.iter().fold(T::one(), |m, z| m.max(modulus(*z)));
        (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .filter(|&(r, c)| modulus(astar[(r, r)] - astar[(c, c)]) <= tol)
            .collect()
    } else {
        (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).collect()
    };
    let ops: Vec<&CMat<T>> = if is_diagonal(astar) { vec![a] } else { vec![a, astar] };
    let mut system = CMat::<T>::zeros(ops.len() * n * n, unknowns.len());
    for (col, &(r, c)) in unknowns.iter().enumerate() {
        // Y = e_r e_cᵀ contributes (Y M − M Y)_{r k} = M_{c k}, (…)_{k c} = −M_{k r}.
        for (blk, m) in ops.iter().enumerate() {
            let off = blk * n * n;
            for k in 0..n {
                system[(off + r * n + k, col)] += m[(c, k)];
                system[(off + k * n + c, col)] -= m[(k, r)];
            }
        }
    }
    let null = nullspace(&system, 1e-10);
    (0..null.ncols())
        .map(|v| {
            let mut y = CMat::<T>::zeros(n, n);
            for (row, &(r, c)) in unknowns.iter().enumerate() {
                y[(r, c)] = null[(row, v)];
            }
            y
        })
        .collect()
}

/// Double-commutant membership test: `Y ∈ T` iff `Y` commutes with every
/// element of the commutant.
pub fn t_membership<T: Real>(y: &CMat<T>, commutant: &[CMat<T>], tol: f64) -> bool {
    let scale = frob(y).max(T::one());
    commutant
        .iter()
        .all(|c| frob(&(y * c - c * y)) < real::<T>(tol) * scale)
}

/// An irreducible `T`-module with its support profile.
#[derive(Debug, Clone)]
pub struct TModule<T: Real> {
    pub basis: CMat<T>,
    pub rho: usize,
    pub tau: usize,
    pub d: usize,
    pub thin: bool,
    pub disp1: i64,
    pub disp2: i64,
    /// `dim E*_i W` for `0 ≤ i ≤ D`.
    pub estar_dims: Vec<usize>,
    /// `dim E_i W` for `0 ≤ i ≤ D`.
    pub e_dims: Vec<usize>,
    pub iso_class: usize,
}

impl<T: Real> TModule<T> {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

#[derive(Debug, Clone)]
pub struct TDecomposition<T: Real> {
    pub modules: Vec<TModule<T>>,
    pub commutant: Vec<CMat<T>>,
    /// Module indices grouped by isomorphism type.
    pub iso_classes: Vec<Vec<usize>>,
    pub attempts: usize,
}

/// Knobs for [`decompose`].
#[derive(Debug, Clone, Copy)]
pub struct DecomposeOptions {
    pub tol_zero: f64,
    pub max_attempts: usize,
    pub allow_nonthin: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { tol_zero: 1e-8, max_attempts: 25, allow_nonthin: false }
    }
}

fn random_hermitian<T: Real, R: Rng>(commutant: &[CMat<T>], rng: &mut R) -> CMat<T> {
    let n = commutant[0].nrows();
    let i_unit = Cx::new(T::zero(), T::one());
    let mut h = CMat::<T>::zeros(n, n);
    for c in commutant {
        let sym = c + c.adjoint();
        let skew = (c - c.adjoint()) * i_unit;
        let g1: f64 = rng.sample(StandardNormal);
        let g2: f64 = rng.sample(StandardNormal);
        h += sym * from_real(real::<T>(g1)) + skew * from_real(real::<T>(g2));
    }
    h
}

/// Dimension of the commutant of `{A, A*}` restricted to `W`.
fn restricted_commutant_dim<T: Real>(a: &CMat<T>, astar: &CMat<T>, basis: &CMat<T>) -> usize {
    let bh = basis.adjoint();
    let aw = &bh * a * basis;
    let sw = &bh * astar * basis;
    commutant_basis(&aw, &sw).len()
}

fn invariance_residual<T: Real>(m: &CMat<T>, basis: &CMat<T>) -> T {
    let image = m * basis;
    let inside = basis * (basis.adjoint() * &image);
    frob(&(&image - inside)) / frob(m).max(T::one())
}

/// Splits `V` into irreducible `T`-modules from the eigenspaces of a random
/// Hermitian element of the commutant.
pub fn decompose<T: Real, R: Rng>(
    spectral: &SpectralData<T>,
    dual: &DualData<T>,
    commutant: Vec<CMat<T>>,
    rng: &mut R,
    opts: DecomposeOptions,
) -> Result<TDecomposition<T>> {
    let a = spectral.adjacency();
    let astar = dual.astar();
    if commutant.is_empty() {
        return Err(Error::numerical("decompose", "empty commutant"));
    }
    for attempt in 1..=opts.max_attempts {
        let h = random_hermitian(&commutant, rng);
        let (vals, vecs) = hermitian_eig(&h);
        let scale = vals.iter().fold(T::one(), |m, v| m.max(v.abs()));
        let cluster_tol = real::<T>(1e-9) * scale;
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for k in 0..vals.len() {
            match clusters.last_mut() {
                Some(c) if vals[k] - vals[*c.last().expect("nonempty")] <= cluster_tol => c.push(k),
                _ => clusters.push(vec![k]),
            }
        }
        let separated = clusters.windows(2).all(|w| {
            vals[w[1][0]] - vals[*w[0].last().expect("nonempty")] > real::<T>(1e-6) * scale
        });
        if !separated {
            continue;
        }
        let bases: Vec<CMat<T>> = clusters.iter().map(|c| select_columns(&vecs, c)).collect();
        let all_good = bases.iter().all(|b| {
            invariance_residual(a, b) < real::<T>(opts.tol_zero)
                && invariance_residual(astar, b) < real::<T>(opts.tol_zero)
                && restricted_commutant_dim(a, astar, b) == 1
        });
        if !all_good {
            continue;
        }
        let mut modules = Vec::with_capacity(bases.len());
        for basis in bases {
            let module = profile(spectral, dual, basis, opts.tol_zero)?;
            if !module.thin && !opts.allow_nonthin {
                return Err(Error::ThinnessViolation(format!(
                    "module with endpoint {}, dual endpoint {}, diameter {} has dim E*_i W = {:?}",
                    module.rho, module.tau, module.d, module.estar_dims
                )));
            }
            modules.push(module);
        }
        modules.sort_by_key(|m| (m.rho, m.tau, m.d, std::cmp::Reverse(m.dim())));
        let iso_classes = classify(spectral, dual, &mut modules, opts.tol_zero);
        return Ok(TDecomposition { modules, commutant, iso_classes, attempts: attempt });
    }
    Err(Error::numerical(
        "decompose",
        format!("no irreducible splitting after {} random commutant samples", opts.max_attempts),
    ))
}

/// Endpoint, dual endpoint, diameter, thinness and displacements of `W`.
pub fn profile<T: Real>(spectral: &SpectralData<T>, dual: &DualData<T>, basis: CMat<T>, tol_zero: f64) -> Result<TModule<T>> {
    let big = spectral.diameter();
    let estar_dims: Vec<usize> = dual.dual_idempotents.iter().map(|e| rank(&(e * &basis), tol_zero)).collect();
    let e_dims: Vec<usize> = spectral.idempotents.iter().map(|e| rank(&(e * &basis), tol_zero)).collect();
    let support = |dims: &[usize]| -> Result<(usize, usize)> {
        let nz: Vec<usize> = (0..dims.len()).filter(|&i| dims[i] > 0).collect();
        let (&lo, &hi) = nz.first().zip(nz.last()).ok_or_else(|| Error::numerical("profile", "module is zero"))?;
        if hi - lo + 1 != nz.len() {
            return Err(Error::numerical("profile", format!("support {dims:?} is not contiguous")));
        }
        Ok((lo, hi - lo))
    };
    let (rho, d) = support(&estar_dims)?;
    let (tau, dual_d) = support(&e_dims)?;
    if d != dual_d {
        return Err(Error::numerical("profile", format!("diameter {d} differs from dual diameter {dual_d}")));
    }
    let thin = estar_dims.iter().chain(&e_dims).all(|&k| k <= 1);
    let (r, t, dd, bd) = (rho as i64, tau as i64, d as i64, big as i64);
    Ok(TModule {
        basis,
        rho,
        tau,
        d,
        thin,
        disp1: r + t + dd - bd,
        disp2: r - t,
        estar_dims,
        e_dims,
        iso_class: 0,
    })
}

/// Invariant of a thin module: the diagonal of `A` in unit vectors spanning
/// `E*_{ρ+i}W` and the squared moduli of its off-diagonal entries.
fn tridiagonal_signature<T: Real>(spectral: &SpectralData<T>, dual: &DualData<T>, m: &TModule<T>, tol: f64) -> Option<Vec<f64>> {
    if !m.thin {
        return None;
    }
    let a = spectral.adjacency();
    let mut ws = Vec::with_capacity(m.d + 1);
    for i in 0..=m.d {
        let proj = &dual.dual_idempotents[m.rho + i] * &m.basis;
        let col = (0..proj.ncols()).max_by(|&x, &y| {
            proj.column(x).norm().partial_cmp(&proj.column(y).norm()).unwrap_or(std::cmp::Ordering::Equal)
        })?;
        let w = proj.column(col).into_owned();
        let nrm = w.norm();
        if nrm <= real::<T>(tol) {
            return None;
        }
        ws.push(w / from_real(nrm));
    }
    let mut sig = Vec::with_capacity(2 * m.d + 1);
    for i in 0..=m.d {
        sig.push(to_f64(ws[i].dotc(&(a * &ws[i])).re));
        if i > 0 {
            sig.push(to_f64(ws[i - 1].dotc(&(a * &ws[i])).norm_sqr()));
        }
    }
    Some(sig)
}

fn classify<T: Real>(spectral: &SpectralData<T>, dual: &DualData<T>, modules: &mut [TModule<T>], tol: f64) -> Vec<Vec<usize>> {
    let sigs: Vec<Option<Vec<f64>>> = modules.iter().map(|m| tridiagonal_signature(spectral, dual, m, tol)).collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for k in 0..modules.len() {
        let found = classes.iter().position(|cls| {
            let r = cls[0];
            let (a, b) = (&modules[r], &modules[k]);
            (a.rho, a.tau, a.d, &a.estar_dims) == (b.rho, b.tau, b.d, &b.estar_dims)
                && match (&sigs[r], &sigs[k]) {
                    (Some(x), Some(y)) => x.iter().zip(y).all(|(p, q)| (p - q).abs() <= 1e-6 * p.abs().max(1.0)),
                    (None, None) => true,
                    _ => false,
                }
        });
        match found {
            Some(c) => classes[c].push(k),
            None => classes.push(vec![k]),
        }
    }
    for (c, cls) in classes.iter().enumerate() {
        for &k in cls {
            modules[k].iso_class = c;
        }
    }
    classes
}

/// Largest singular value of `E*_i · basis`; used for the `E*_i W ≠ 0` test.
pub fn support_strength<T: Real>(e: &CMat<T>, basis: &CMat<T>) -> T {
    singular_values(&(e * basis)).first().copied().unwrap_or_else(T::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bose_mesner::find_qpoly_orderings;
    use crate::graph::{check_distance_regular, distances, Graph};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    struct Setup {
        spectral: SpectralData<f64>,
        dual: DualData<f64>,
        data: IntersectionData,
    }

    fn setup(g: Graph) -> Setup {
        let dist = distances(&g);
        let data = check_distance_regular(&g).unwrap();
        let raw = SpectralData::<f64>::build(&dist, &data, 1e-9, 1e-8).unwrap();
        let ord = find_qpoly_orderings(&raw.krein, &raw.theta, 1e-8).remove(0);
        let spectral = raw.reordered(&ord);
        let dual = dual_data(&dist, &spectral, 0, 1e-8).unwrap();
        Setup { spectral, dual, data }
    }

    #[test]
    fn cycle8_self_dual_and_ranks() {
        let s = setup(Graph::cycle(8).unwrap());
        for (t, ts) in s.spectral.theta.iter().zip(&s.dual.theta_star) {
            assert!((t - ts).abs() < 1e-10);
        }
        let ranks: Vec<usize> = s.dual.dual_idempotents.iter().map(|e| rank(e, 1e-8)).collect();
        assert_eq!(ranks, vec![1, 2, 2, 2, 1]);
        assert!(frob(&(&s.dual.dual_distance[0] - identity::<f64>(8))) < 1e-10);
    }

    #[test]
    fn cycle9_triples_pass() {
        let s = setup(Graph::cycle(9).unwrap());
        let report = triple_product_checks(&s.spectral, &s.dual, &s.data, 1e-8);
        assert!(report.passed(), "{:?}", report.violations);
        assert_eq!(report.checked, 2 * 125);
        let m = &s.dual.dual_idempotents[0] * s.spectral.adjacency() * &s.dual.dual_idempotents[1];
        assert!(frob(&m) > 1.0);
    }

    #[test]
    fn commutant_dimensions() {
        for n in [8, 9] {
            let s = setup(Graph::cycle(n).unwrap());
            let basis = commutant_basis(s.spectral.adjacency(), s.dual.astar());
            assert_eq!(basis.len(), 2);
            let id = identity::<f64>(n);
            // I lies in the span: its projection onto the basis recovers it.
            let proj = basis.iter().fold(CMat::<f64>::zeros(n, n), |acc, c| {
                let coeff = c.iter().zip(id.iter()).map(|(x, y)| x.conj() * y).sum::<Cx<f64>>();
                acc + c * coeff
            });
            assert!(frob(&(proj - id)) < 1e-10);
        }
    }

    #[test]
    fn membership() {
        let s = setup(Graph::cycle(8).unwrap());
        let c = commutant_basis(s.spectral.adjacency(), s.dual.astar());
        assert!(t_membership(s.spectral.adjacency(), &c, 1e-8));
        assert!(t_membership(&s.dual.dual_idempotents[2], &c, 1e-8));
        let diag = CMat::<f64>::from_fn(8, 8, |r, cc| if r == cc { from_real(0.37 * r as f64 + (r * r) as f64 * 0.11) } else { from_real(0.0) });
        assert!(!t_membership(&diag, &c, 1e-8));
    }

    fn profiles(n: usize, seed: u64) -> Vec<(usize, usize, usize, usize, i64, i64, bool)> {
        let s = setup(Graph::cycle(n).unwrap());
        let c = commutant_basis(s.spectral.adjacency(), s.dual.astar());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dec = decompose(&s.spectral, &s.dual, c, &mut rng, DecomposeOptions::default()).unwrap();
        let total: usize = dec.modules.iter().map(|m| m.dim()).sum();
        assert_eq!(total, n);
        for (i, a) in dec.modules.iter().enumerate() {
            for b in &dec.modules[i + 1..] {
                assert!(frob(&(a.basis.adjoint() * &b.basis)) < 1e-10);
            }
        }
        dec.modules.iter().map(|m| (m.rho, m.tau, m.d, m.dim(), m.disp1, m.disp2, m.thin)).collect()
    }

    #[test]
    fn cycle8_modules() {
        assert_eq!(profiles(8, 42), vec![(0, 0, 4, 5, 0, 0, true), (1, 1, 2, 3, 0, 0, true)]);
    }

    #[test]
    fn cycle9_modules() {
        assert_eq!(profiles(9, 42), vec![(0, 0, 4, 5, 0, 0, true), (1, 1, 3, 4, 1, 0, true)]);
    }

    #[test]
    fn decomposition_stable_across_seeds() {
        for n in [7, 10, 12] {
            assert_eq!(profiles(n, 1), profiles(n, 99));
        }
    }
}
