//! The two split decompositions of the standard module and the central
//! elements `Φ`, `Ψ` that act on their summands by powers of `q`.

use crate::bose_mesner::SpectralData;
use crate::error::{Error, Result};
use crate::linalg::{complement_in, frob, hstack, intersect, orth, projector, singular_values, span};
use crate::scalar::{powi, to_f64, CMat, Cx, Real};
use crate::subconstituent::{t_membership, DualData, TModule};

const ONE_TOL: f64 = 1e-8;
const RANK_TOL: f64 = 1e-6;

/// Which ordering of the primitive idempotents the second filtration uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitKind {
    /// `E_0V + ⋯ + E_jV`.
    DownDown,
    /// `E_DV + ⋯ + E_{D−j}V`.
    DownUp,
}

impl SplitKind {
    pub fn label(self) -> &'static str {
        match self {
            SplitKind::DownDown => "down-down",
            SplitKind::DownUp => "down-up",
        }
    }
}

/// Orthonormal bases of the tilde spaces `Ṽ_{i,j}`, `0 ≤ i, j ≤ D`.
#[derive(Debug, Clone)]
pub struct SplitFamily<T: Real> {
    pub kind: SplitKind,
    pub diameter: usize,
    tilde: Vec<Vec<CMat<T>>>,
    /// Smallest singular value of the concatenated tilde bases.
    pub min_singular: f64,
    /// Ratio of the extreme singular values of the concatenated bases.
    pub condition: f64,
}

impl<T: Real> SplitFamily<T> {
    pub fn tilde(&self, i: usize, j: usize) -> &CMat<T> {
        &self.tilde[i][j]
    }

    pub fn dims(&self) -> Vec<Vec<usize>> {
        self.tilde.iter().map(|row| row.iter().map(|b| b.ncols()).collect()).collect()
    }

    /// `(i, j)` pairs with a nonzero tilde space, row-major.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let d = self.diameter;
        (0..=d)
            .flat_map(|i| (0..=d).map(move |j| (i, j)))
            .filter(|&(i, j)| self.tilde[i][j].ncols() > 0)
            .collect()
    }

    /// All tilde bases side by side, row-major, with the weight `i + j`
    /// of every column.
    fn stacked(&self) -> (CMat<T>, Vec<usize>) {
        let n = self.tilde[0][0].nrows();
        let mut parts = Vec::new();
        let mut weights = Vec::new();
        for (i, j) in self.support() {
            let b = &self.tilde[i][j];
            parts.push(b);
            weights.extend(std::iter::repeat_n(i + j, b.ncols()));
        }
        (hstack(n, &parts), weights)
    }
}

fn idempotent_order(kind: SplitKind, diameter: usize) -> Vec<usize> {
    match kind {
        SplitKind::DownDown => (0..=diameter).collect(),
        SplitKind::DownUp => (0..=diameter).rev().collect(),
    }
}

/// Orthonormal basis of the range of a sum of orthogonal projectors.
fn range_of_sum<T: Real>(n: usize, ps: &[&CMat<T>]) -> CMat<T> {
    let total = ps.iter().fold(CMat::<T>::zeros(n, n), |acc, p| acc + *p);
    orth(&total, 0.5)
}

/// `(E*_0V + ⋯ + E*_iV) ∩ (E_{σ(0)}V + ⋯ + E_{σ(j)}V)`, with the zero space
/// when `i` or `j` is `−1`.
pub fn split_subspace<T: Real>(spectral: &SpectralData<T>, dual: &DualData<T>, i: i64, j: i64, kind: SplitKind) -> CMat<T> {
    let n = spectral.adjacency().nrows();
    let big = spectral.diameter() as i64;
    assert!((-1..=big).contains(&i) && (-1..=big).contains(&j), "index out of range");
    if i < 0 || j < 0 {
        return CMat::<T>::zeros(n, 0);
    }
    let order = idempotent_order(kind, spectral.diameter());
    let left: Vec<&CMat<T>> = dual.dual_idempotents[..=i as usize].iter().collect();
    let right: Vec<&CMat<T>> = order[..=j as usize].iter().map(|&h| &spectral.idempotents[h]).collect();
    intersect(&range_of_sum(n, &left), &range_of_sum(n, &right), ONE_TOL)
}

/// Builds every `Ṽ_{i,j}` as the orthogonal complement of
/// `V_{i−1,j} + V_{i,j−1}` in `V_{i,j}`, then checks that they form a
/// direct sum equal to `V`.
pub fn tilde_spaces<T: Real>(spectral: &SpectralData<T>, dual: &DualData<T>, kind: SplitKind) -> Result<SplitFamily<T>> {
    let n = spectral.adjacency().nrows();
    let big = spectral.diameter();
    let flag: Vec<Vec<CMat<T>>> = (-1..=big as i64)
        .map(|i| (-1..=big as i64).map(|j| split_subspace(spectral, dual, i, j, kind)).collect())
        .collect();
    let mut tilde = Vec::with_capacity(big + 1);
    for i in 1..=big + 1 {
        let mut row = Vec::with_capacity(big + 1);
        for j in 1..=big + 1 {
            let lower = span(n, &[&flag[i - 1][j], &flag[i][j - 1]], RANK_TOL);
            row.push(complement_in(&lower, &flag[i][j], RANK_TOL));
        }
        tilde.push(row);
    }
    let mut family = SplitFamily { kind, diameter: big, tilde, min_singular: 0.0, condition: f64::INFINITY };
    let (stacked, _) = family.stacked();
    if stacked.ncols() != n {
        return Err(Error::numerical(
            "tilde_spaces",
            format!("{} tilde dimensions sum to {} instead of {n}", kind.label(), stacked.ncols()),
        ));
    }
    let sv = singular_values(&stacked);
    let (smax, smin) = (to_f64(sv[0]), to_f64(sv[n - 1]));
    if smin <= RANK_TOL {
        return Err(Error::numerical(
            "tilde_spaces",
            format!("{} tilde spaces are not independent (smallest singular value {smin:e})", kind.label()),
        ));
    }
    family.min_singular = smin;
    family.condition = smax / smin;
    Ok(family)
}

/// Agreement of one displacement class with one tilde layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerResidual {
    pub delta: i64,
    pub module_dim: usize,
    pub layer_dim: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceReport {
    pub kind: SplitKind,
    pub layers: Vec<LayerResidual>,
}

impl CoincidenceReport {
    pub fn max_residual(&self) -> f64 {
        self.layers.iter().fold(0.0, |m, l| m.max(l.residual))
    }
}

fn displacement<T: Real>(module: &TModule<T>, kind: SplitKind) -> i64 {
    match kind {
        SplitKind::DownDown => module.disp1,
        SplitKind::DownUp => module.disp2,
    }
}

/// For every `δ` in `−D..=D`, compares the orthogonal projector onto the
/// modules of displacement `δ` with the one onto `Σ_{i+j=δ+D} Ṽ_{i,j}`.
pub fn verify_displacement_coincidence<T: Real>(
    family: &SplitFamily<T>,
    modules: &[TModule<T>],
    tol: f64,
) -> Result<CoincidenceReport> {
    let big = family.diameter as i64;
    let n = family.tilde[0][0].nrows();
    let mut layers = Vec::new();
    for delta in -big..=big {
        let mods: Vec<&CMat<T>> =
            modules.iter().filter(|m| displacement(m, family.kind) == delta).map(|m| &m.basis).collect();
        let cells: Vec<&CMat<T>> = family
            .support()
            .into_iter()
            .filter(|&(i, j)| (i + j) as i64 == delta + big)
            .map(|(i, j)| family.tilde(i, j))
            .collect();
        let mb = span(n, &mods, RANK_TOL);
        let lb = span(n, &cells, RANK_TOL);
        let residual = to_f64(frob(&(projector(&mb) - projector(&lb))));
        layers.push(LayerResidual { delta, module_dim: mb.ncols(), layer_dim: lb.ncols(), residual });
    }
    let report = CoincidenceReport { kind: family.kind, layers };
    if let Some(bad) = report.layers.iter().find(|l| !(l.residual < tol)) {
        return Err(Error::numerical(
            "displacement_coincidence",
            format!(
                "{} layer δ = {}: module span dim {} vs tilde layer dim {}, residual {:e}",
                family.kind.label(),
                bad.delta,
                bad.module_dim,
                bad.layer_dim,
                bad.residual
            ),
        ));
    }
    Ok(report)
}

/// `Φ` and `Ψ`, with the diagnostics of their two constructions.
#[derive(Debug, Clone)]
pub struct PhiPsi<T: Real> {
    pub phi: CMat<T>,
    pub psi: CMat<T>,
    /// `(q^{disp1}, q^{disp2})` for each module, in decomposition order.
    pub module_scalars: Vec<(Cx<T>, Cx<T>)>,
    /// Largest entrywise gap between the two constructions.
    pub agreement: f64,
    /// `max ‖[X, Y]‖_F / ‖A‖_F` over `X ∈ {Φ, Ψ}`, `Y ∈ {A, A*}`.
    pub commutator: f64,
    pub phi_in_t: bool,
    pub psi_in_t: bool,
}

/// `Σ q^{i+j−D} P̃_{i,j}` with the oblique projectors of the direct sum.
fn weighted_oblique<T: Real>(family: &SplitFamily<T>, q: Cx<T>) -> Result<CMat<T>> {
    let (s, weights) = family.stacked();
    let s_inv = s.clone().try_inverse().ok_or_else(|| Error::numerical("build_phi_psi", "tilde basis is singular"))?;
    let big = family.diameter as i64;
    let mut scaled = s;
    for (c, &w) in weights.iter().enumerate() {
        let f = powi(q, w as i64 - big);
        for z in scaled.column_mut(c).iter_mut() {
            *z *= f;
        }
    }
    Ok(scaled * s_inv)
}

/// Builds `Φ`, `Ψ` from the oblique projectors and compares them with the
/// sums of `q^{ρ+τ+d−D}` and `q^{ρ−τ}` over the module projectors.
#[allow(clippy::too_many_arguments)]
pub fn build_phi_psi<T: Real>(
    down_down: &SplitFamily<T>,
    down_up: &SplitFamily<T>,
    modules: &[TModule<T>],
    commutant: &[CMat<T>],
    a: &CMat<T>,
    astar: &CMat<T>,
    q: Cx<T>,
    tol: f64,
) -> Result<PhiPsi<T>> {
    let n = a.nrows();
    let phi = weighted_oblique(down_down, q)?;
    let psi = weighted_oblique(down_up, q)?;
    let mut phi_mod = CMat::<T>::zeros(n, n);
    let mut psi_mod = CMat::<T>::zeros(n, n);
    let mut module_scalars = Vec::with_capacity(modules.len());
    for m in modules {
        let p = projector(&m.basis);
        let (s1, s2) = (powi(q, m.disp1), powi(q, m.disp2));
        phi_mod += &p * s1;
        psi_mod += &p * s2;
        module_scalars.push((s1, s2));
    }
    let gap = |x: &CMat<T>, y: &CMat<T>| (x - y).iter().fold(0.0f64, |g, z| g.max(to_f64(crate::scalar::modulus(*z))));
    let agreement = gap(&phi, &phi_mod).max(gap(&psi, &psi_mod));
    if !(agreement < tol) {
        return Err(Error::numerical(
            "build_phi_psi",
            format!("oblique and module constructions differ by {agreement:e}"),
        ));
    }
    let scale = frob(a).max(T::one());
    let comm = |x: &CMat<T>, y: &CMat<T>| to_f64(frob(&(x * y - y * x)) / scale);
    let commutator = comm(&phi, a).max(comm(&phi, astar)).max(comm(&psi, a)).max(comm(&psi, astar));
    let phi_in_t = t_membership(&phi, commutant, 1e-8);
    let psi_in_t = t_membership(&psi, commutant, 1e-8);
    Ok(PhiPsi { phi, psi, module_scalars, agreement, commutator, phi_in_t, psi_in_t })
}
