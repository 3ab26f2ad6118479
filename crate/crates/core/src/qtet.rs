//! Matrix images of the q-tetrahedron algebra: the explicit module on a
//! thin irreducible `T`-module, the defining relations, the two
//! automorphisms, and the global assembly on the standard module.

use crate::error::{Error, Result};
use crate::linalg::{frob, identity, left_inverse, rel_residual};
use crate::scalar::{from_real, modulus, one, powi, qint, real, to_f64, CMat, Cx, Real};

/// A standard generator `x_{ij}` with `j − i ∈ {1, 2}` (mod 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gen(pub u8, pub u8);

impl Gen {
    pub const ALL: [Gen; 8] = [
        Gen(0, 1),
        Gen(1, 2),
        Gen(2, 3),
        Gen(3, 0),
        Gen(0, 2),
        Gen(2, 0),
        Gen(1, 3),
        Gen(3, 1),
    ];

    pub fn new(i: i64, j: i64) -> Gen {
        let g = Gen(i.rem_euclid(4) as u8, j.rem_euclid(4) as u8);
        debug_assert!(matches!((g.1 + 4 - g.0) % 4, 1 | 2), "x_{}{} is not a generator", g.0, g.1);
        g
    }

    fn slot(self) -> usize {
        Gen::ALL.iter().position(|&g| g == self).expect("valid generator")
    }

    pub fn name(self) -> String {
        format!("x{}{}", self.0, self.1)
    }
}

/// Where a set of images lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// On one module, in its `u`-basis, for diameter `d`.
    Local { d: usize },
    Global,
}

/// The eight generator images.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxImages<T: Real> {
    mats: [CMat<T>; 8],
    pub scope: Scope,
}

impl<T: Real> BoxImages<T> {
    pub fn from_fn(scope: Scope, mut f: impl FnMut(Gen) -> CMat<T>) -> Self {
        let mats = Gen::ALL.map(&mut f);
        BoxImages { mats, scope }
    }

    pub fn get(&self, g: Gen) -> &CMat<T> {
        &self.mats[g.slot()]
    }

    pub fn x(&self, i: i64, j: i64) -> &CMat<T> {
        self.get(Gen::new(i, j))
    }

    pub fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn map(&self, f: impl Fn(&CMat<T>) -> CMat<T>) -> Self {
        BoxImages { mats: self.mats.each_ref().map(f), scope: self.scope }
    }
}

/// Which relation of the defining presentation a residual belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    Inverse,
    QWeyl,
    Serre,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub name: String,
    pub kind: RelationKind,
    pub residual: f64,
}

/// Normalized residuals of all twenty defining relations.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    pub relations: Vec<Relation>,
}

impl RelationReport {
    pub fn max_residual(&self) -> f64 {
        self.relations.iter().fold(0.0, |m, r| if r.residual.is_nan() { f64::NAN } else { m.max(r.residual) })
    }

    pub fn passes(&self, tol: f64) -> bool {
        let m = self.max_residual();
        m.is_finite() && m < tol
    }
}

/// Parameters outside the admissible locus for the local module.
pub fn check_local_params<T: Real>(d: usize, q: Cx<T>, r: Cx<T>) -> Result<()> {
    let tiny = real::<T>(1e-12);
    if modulus(q) <= tiny {
        return Err(Error::ExcludedLocus("q = 0".into()));
    }
    for i in 1..=d.max(1) as i64 {
        if modulus(powi(q, 2 * i) - one()) <= tiny {
            return Err(Error::ExcludedLocus(format!("q^{} = 1", 2 * i)));
        }
    }
    if modulus(r) <= tiny {
        return Err(Error::ExcludedLocus("r = 0".into()));
    }
    let d = d as i64;
    for e in (1 - d..=d - 1).step_by(2) {
        if modulus(r - powi(q, e)) <= tiny * modulus(r).max(T::one()) {
            return Err(Error::ExcludedLocus(format!("r = q^{e} lies in {{q^(d-1), q^(d-3), ..., q^(1-d)}}")));
        }
    }
    Ok(())
}

/// `Π_{k=lo}^{hi} (1 − q^{2k})`, empty product 1.
fn qpoch<T: Real>(q: Cx<T>, lo: i64, hi: i64) -> Cx<T> {
    (lo..=hi).fold(one(), |acc, k| acc * (one::<T>() - powi(q, 2 * k)))
}

/// `Π (1 − r q^e)` over `e = lo, lo + 2, …, hi`, empty product 1.
fn rpoch<T: Real>(q: Cx<T>, r: Cx<T>, lo: i64, hi: i64) -> Cx<T> {
    let mut acc = one();
    let mut e = lo;
    while e <= hi {
        acc *= one::<T>() - r * powi(q, e);
        e += 2;
    }
    acc
}

/// The eight generator matrices on a `(d+1)`-dimensional module in its
/// `u`-basis. Column `i` holds the coordinates of `x.u_i`.
pub fn local_generators<T: Real>(d: usize, r: Cx<T>, q: Cx<T>) -> Result<BoxImages<T>> {
    check_local_params(d, q, r)?;
    let n = d + 1;
    let di = d as i64;
    let qp = |k: i64| powi(q, k);
    let o = one::<T>();
    let mut x01 = CMat::<T>::zeros(n, n);
    let mut x12 = CMat::<T>::zeros(n, n);
    let mut x23 = CMat::<T>::zeros(n, n);
    let mut x30 = CMat::<T>::zeros(n, n);
    let mut x13 = CMat::<T>::zeros(n, n);
    let mut x31 = CMat::<T>::zeros(n, n);
    for i in 0..n {
        let ii = i as i64;
        x01[(i, i)] = qp(di - 2 * ii);
        x12[(i, i)] = qp(2 * ii - di);
        x23[(i, i)] = qp(2 * ii - di);
        x30[(i, i)] = qp(di - 2 * ii);
        x13[(i, i)] = qp(2 * ii - di);
        x31[(i, i)] = qp(di - 2 * ii);
        if i < d {
            x01[(i + 1, i)] = (qp(di) - qp(di - 2 * ii - 2)) * qp(1 - di) * r;
            x12[(i + 1, i)] = qp(-di) - qp(2 * ii + 2 - di);
        }
        if i >= 1 {
            x23[(i - 1, i)] = qp(di) - qp(2 * ii - 2 - di);
            x30[(i - 1, i)] = (qp(-di) - qp(di - 2 * ii + 2)) * qp(di - 1) / r;
        }
    }

    let a = o - r * qp(-di - 1);
    let b = o - r * qp(di + 1);
    let mut x02 = CMat::<T>::zeros(n, n);
    for i in 0..d {
        let ii = i as i64;
        x02[(0, i)] = a * qpoch(q, di - ii + 1, di) * qp(di - 2 * ii) / rpoch(q, r, di - 1 - 2 * ii, di - 1);
        for h in 1..=i {
            let hh = h as i64;
            x02[(h, i)] += b * a * qpoch(q, di - ii + 1, di - hh) * qp(di - 2 * ii)
                / rpoch(q, r, di - 1 - 2 * ii, di + 1 - 2 * hh);
        }
        x02[(i + 1, i)] = (qp(2 * ii + 2) - o) * r / (qp(2 * ii + 1) * (o - r * qp(di - 1 - 2 * ii)));
    }
    x02[(0, d)] = qpoch(q, 1, di) * qp(-di) / rpoch(q, r, 1 - di, di - 1);
    for h in 1..=d {
        let hh = h as i64;
        x02[(h, d)] += b * qpoch(q, 1, di - hh) * qp(-di) / rpoch(q, r, 1 - di, di + 1 - 2 * hh);
    }

    let mut x20 = CMat::<T>::zeros(n, n);
    for h in 0..d {
        let hh = h as i64;
        x20[(h, 0)] = b * qpoch(q, 1, hh) * powi(r, hh) * qp(hh - di * hh - di) / rpoch(q, r, 1 - di, 2 * hh - di + 1);
    }
    x20[(d, 0)] += qpoch(q, 1, di) * powi(r, di) * qp(-di * di) / rpoch(q, r, 1 - di, di - 1);
    for i in 1..=d {
        let ii = i as i64;
        x20[(i - 1, i)] = (qp(di) - qp(2 * ii - 2 - di)) / (o - r * qp(2 * ii - di - 1));
        for h in i..d {
            let hh = h as i64;
            x20[(h, i)] += b * a * qpoch(q, ii + 1, hh) * powi(r, hh - ii) * qp((di + 1) * ii - (di - 1) * hh - di)
                / rpoch(q, r, 2 * ii - di - 1, 2 * hh - di + 1);
        }
        x20[(d, i)] += a * qpoch(q, ii + 1, di) * powi(r, di - ii) * qp(di * ii + ii - di * di)
            / rpoch(q, r, 2 * ii - di - 1, di - 1);
    }

    let scope = Scope::Local { d };
    Ok(BoxImages::from_fn(scope, |g| match (g.0, g.1) {
        (0, 1) => x01.clone(),
        (1, 2) => x12.clone(),
        (2, 3) => x23.clone(),
        (3, 0) => x30.clone(),
        (0, 2) => x02.clone(),
        (2, 0) => x20.clone(),
        (1, 3) => x13.clone(),
        _ => x31.clone(),
    }))
}

/// Evaluates the inverse, q-Weyl and cubic q-Serre relations.
///
/// Each residual is `‖LHS − RHS‖_F / max(1, ‖LHS‖_F, ‖RHS‖_F)`; for the
/// Serre relations the scale is the sum of the norms of the four terms.
pub fn verify_relations<T: Real>(images: &BoxImages<T>, q: Cx<T>) -> RelationReport {
    let n = images.dim();
    let id = identity::<T>(n);
    let mut relations = Vec::with_capacity(20);
    for i in 0..4 {
        let (a, b) = (images.x(i, i + 2), images.x(i + 2, i));
        relations.push(Relation {
            name: format!("{} {} = 1", Gen::new(i, i + 2).name(), Gen::new(i + 2, i).name()),
            kind: RelationKind::Inverse,
            residual: to_f64(rel_residual(&(a * b), &id)),
        });
    }
    let qinv = one::<T>() / q;
    let denom = q - qinv;
    for (step1, step2) in [(1, 1), (1, 2), (2, 1)] {
        for h in 0..4 {
            let (i, j) = (h + step1, h + step1 + step2);
            let (x, y) = (images.x(h, i), images.x(i, j));
            let lhs = (x * y * q - y * x * qinv) / denom;
            relations.push(Relation {
                name: format!("q-Weyl({}, {})", Gen::new(h, i).name(), Gen::new(i, j).name()),
                kind: RelationKind::QWeyl,
                residual: to_f64(rel_residual(&lhs, &id)),
            });
        }
    }
    let q3 = qint(q, 3);
    for h in 0..4 {
        let (x, y) = (images.x(h, h + 1), images.x(h + 2, h + 3));
        let x2 = x * x;
        let x3 = &x2 * x;
        let terms = [&x3 * y, &x2 * y * x * q3, x * y * &x2 * q3, y * &x3];
        let total = &terms[0] - &terms[1] + &terms[2] - &terms[3];
        let scale = terms.iter().fold(T::zero(), |s, t| s + frob(t)).max(T::one());
        relations.push(Relation {
            name: format!("q-Serre({}, {})", Gen::new(h, h + 1).name(), Gen::new(h + 2, h + 3).name()),
            kind: RelationKind::Serre,
            residual: to_f64(frob(&total) / scale),
        });
    }
    RelationReport { relations }
}

/// Pulls back along the automorphism `x_{ij} ↦ x_{i+1,j+1}`: the new image
/// of `x_{ij}` is the old image of `x_{i+1,j+1}`.
pub fn rho_twist<T: Real>(images: &BoxImages<T>) -> BoxImages<T> {
    BoxImages::from_fn(images.scope, |g| images.x(g.0 as i64 + 1, g.1 as i64 + 1).clone())
}

/// Pulls back along `x_{ij} ↦ −x_{ij}`.
pub fn flip_twist<T: Real>(images: &BoxImages<T>) -> BoxImages<T> {
    images.map(|m| -m)
}

/// A module's local images together with its `u`-basis in `V`.
pub struct LocalBlock<'a, T: Real> {
    pub u_basis: &'a CMat<T>,
    pub images: &'a BoxImages<T>,
}

/// Glues local images into matrices on `V`: on each module with `u`-basis
/// `U`, the global `X` satisfies `X U = U L`. Modules must be mutually
/// orthogonal and together span `V`.
pub fn assemble_theta<T: Real>(n: usize, blocks: &[LocalBlock<'_, T>]) -> Result<BoxImages<T>> {
    let mut pieces = Vec::with_capacity(blocks.len());
    for b in blocks {
        let left = left_inverse(b.u_basis).ok_or_else(|| Error::numerical("assemble_theta", "u-basis is singular"))?;
        pieces.push((b.u_basis, left, b.images));
    }
    Ok(BoxImages::from_fn(Scope::Global, |g| {
        pieces.iter().fold(CMat::<T>::zeros(n, n), |acc, (u, left, imgs)| acc + *u * imgs.get(g) * left)
    }))
}

/// Residuals of the two reconstruction identities for `A` and `A*`.
#[derive(Debug, Clone, PartialEq)]
pub struct MainTheoremReport {
    pub residual_a: f64,
    pub residual_astar: f64,
    /// Per-module residuals of the local identities, `(A, A*)`.
    pub local: Vec<(f64, f64)>,
}

/// Scalars of the reconstruction identities.
#[derive(Debug, Clone, Copy)]
pub struct Coefficients<T: Real> {
    pub eta: Cx<T>,
    pub u: Cx<T>,
    pub v: Cx<T>,
    pub eta_star: Cx<T>,
    pub u_star: Cx<T>,
    pub v_star: Cx<T>,
}

/// `‖A − ηI − uΦΨ⁻¹X01 − vΨΦ⁻¹X12‖/‖A‖` and the `A*` analogue with
/// `ΦΨ`, `Ψ⁻¹Φ⁻¹`.
pub fn main_theorem_residuals<T: Real>(
    a: &CMat<T>,
    astar: &CMat<T>,
    phi: &CMat<T>,
    psi: &CMat<T>,
    images: &BoxImages<T>,
    c: &Coefficients<T>,
) -> Result<(f64, f64)> {
    let n = a.nrows();
    let id = identity::<T>(n);
    let phi_inv = phi.clone().try_inverse().ok_or_else(|| Error::numerical("main_theorem", "Φ is singular"))?;
    let psi_inv = psi.clone().try_inverse().ok_or_else(|| Error::numerical("main_theorem", "Ψ is singular"))?;
    let rebuilt_a = &id * c.eta + phi * &psi_inv * images.x(0, 1) * c.u + psi * &phi_inv * images.x(1, 2) * c.v;
    let rebuilt_s = &id * c.eta_star
        + phi * psi * images.x(2, 3) * c.u_star
        + &psi_inv * &phi_inv * images.x(3, 0) * c.v_star;
    let ra = frob(&(a - rebuilt_a)) / frob(a).max(T::one());
    let rs = frob(&(astar - rebuilt_s)) / frob(astar).max(T::one());
    Ok((to_f64(ra), to_f64(rs)))
}

/// The local identities on one module, where `Φ`, `Ψ` act as
/// `q^{disp1}`, `q^{disp2}`: `A = ηI + u q^{2τ+d−D} x01 + v q^{D−d−2τ} x12`
/// and `A* = η*I + u* q^{2ρ+d−D} x23 + v* q^{D−d−2ρ} x30`, compared in the
/// `u`-basis.
#[allow(clippy::too_many_arguments)]
pub fn local_theorem_residuals<T: Real>(
    a_local: &CMat<T>,
    astar_local: &CMat<T>,
    images: &BoxImages<T>,
    q: Cx<T>,
    c: &Coefficients<T>,
    rho: usize,
    tau: usize,
    big_d: usize,
) -> (f64, f64) {
    let d = images.dim() as i64 - 1;
    let (rho, tau, big) = (rho as i64, tau as i64, big_d as i64);
    let id = identity::<T>(images.dim());
    let ra = &id * c.eta
        + images.x(0, 1) * (c.u * powi(q, 2 * tau + d - big))
        + images.x(1, 2) * (c.v * powi(q, big - d - 2 * tau));
    let rs = &id * c.eta_star
        + images.x(2, 3) * (c.u_star * powi(q, 2 * rho + d - big))
        + images.x(3, 0) * (c.v_star * powi(q, big - d - 2 * rho));
    (
        to_f64(frob(&(a_local - ra)) / frob(a_local).max(T::one())),
        to_f64(frob(&(astar_local - rs)) / frob(astar_local).max(T::one())),
    )
}

/// Eigenvalues of a diagonal image, for spectrum checks.
pub fn diagonal<T: Real>(m: &CMat<T>) -> Vec<Cx<T>> {
    (0..m.nrows()).map(|i| m[(i, i)]).collect()
}

/// Adds `eps`-scaled deterministic noise to one generator.
pub fn perturb<T: Real>(images: &BoxImages<T>, g: Gen, eps: f64) -> BoxImages<T> {
    BoxImages::from_fn(images.scope, |h| {
        let m = images.get(h).clone();
        if h != g {
            return m;
        }
        let n = m.nrows();
        m + CMat::<T>::from_fn(n, n, |r, c| from_real(real::<T>(eps * (((r * 7 + c * 3) % 5) as f64 - 2.0))))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn d0_is_identity() {
        let imgs = local_generators::<f64>(0, cx(0.7, 0.2), cx(1.1, 0.3)).unwrap();
        for g in Gen::ALL {
            assert_eq!(imgs.get(g), &identity::<f64>(1), "{}", g.name());
        }
        let rep = verify_relations(&imgs, cx(1.1, 0.3));
        assert_eq!(rep.relations.len(), 20);
        assert!(rep.max_residual() < 1e-15);
    }

    #[test]
    fn d1_diagonal_generators() {
        let q = cx(0.9, 0.4);
        let imgs = local_generators::<f64>(1, cx(2.0, -1.0), q).unwrap();
        let qi = one::<f64>() / q;
        let x13 = imgs.x(1, 3);
        let x31 = imgs.x(3, 1);
        assert!(modulus(x13[(0, 0)] - qi) < 1e-15 && modulus(x13[(1, 1)] - q) < 1e-15);
        assert!(modulus(x31[(0, 0)] - q) < 1e-15 && modulus(x31[(1, 1)] - qi) < 1e-15);
        assert!(modulus(x13[(0, 1)]) == 0.0 && modulus(x13[(1, 0)]) == 0.0);
    }

    #[test]
    fn d3_inverse_pair() {
        let imgs = local_generators::<f64>(3, cx(2.0, 0.0), cx(1.1, 0.0)).unwrap();
        let prod = imgs.x(0, 2) * imgs.x(2, 0);
        assert!(frob(&(prod - identity::<f64>(4))) < 1e-12);
    }

    #[test]
    fn shapes_in_u_basis() {
        let d = 4;
        let imgs = local_generators::<f64>(d, cx(0.6, 0.5), cx(1.05, 0.2)).unwrap();
        for r in 0..=d {
            for c in 0..=d {
                let nz = |g: Gen| modulus(imgs.get(g)[(r, c)]) != 0.0;
                if r != c {
                    assert!(!nz(Gen(1, 3)) && !nz(Gen(3, 1)));
                }
                if !(r == c || r == c + 1) {
                    assert!(!nz(Gen(0, 1)) && !nz(Gen(1, 2)));
                }
                if !(r == c || r + 1 == c) {
                    assert!(!nz(Gen(2, 3)) && !nz(Gen(3, 0)));
                }
                if r > c + 1 {
                    assert!(!nz(Gen(0, 2)));
                }
                if c > r + 1 {
                    assert!(!nz(Gen(2, 0)));
                }
            }
        }
    }

    #[test]
    fn excluded_locus() {
        let q = cx::<f64>(1.1, 0.0);
        assert!(matches!(local_generators::<f64>(3, q * q, q), Err(Error::ExcludedLocus(_))));
        assert!(matches!(local_generators::<f64>(2, cx(0.5, 0.0), cx(1.0, 0.0)), Err(Error::ExcludedLocus(_))));
        assert!(matches!(local_generators::<f64>(2, cx(0.5, 0.0), cx(-1.0, 0.0)), Err(Error::ExcludedLocus(_))));
    }

    #[test]
    fn perturbation_is_detected() {
        let q = cx(1.1, 0.15);
        let imgs = local_generators::<f64>(3, cx(0.8, -0.4), q).unwrap();
        assert!(verify_relations(&imgs, q).max_residual() < 1e-10);
        let bad = perturb(&imgs, Gen(0, 1), 1e-3);
        assert!(verify_relations(&bad, q).max_residual() > 1e-4);
    }

    #[test]
    fn twists_preserve_relations() {
        let q = cx(0.95, 0.3);
        let imgs = local_generators::<f64>(4, cx(1.3, 0.7), q).unwrap();
        let mut t = imgs.clone();
        for _ in 0..4 {
            t = rho_twist(&t);
            assert!(verify_relations(&t, q).max_residual() < 1e-9);
        }
        assert_eq!(t, imgs);
        let f = flip_twist(&imgs);
        assert!(verify_relations(&f, q).max_residual() < 1e-9);
        assert_eq!(flip_twist(&f), imgs);
    }

    #[test]
    fn works_in_single_precision() {
        let q = Cx::new(1.1f32, 0.2);
        let imgs = local_generators::<f32>(2, Cx::new(0.7f32, -0.3), q).unwrap();
        assert!(verify_relations(&imgs, q).max_residual() < 1e-4);
    }
}
