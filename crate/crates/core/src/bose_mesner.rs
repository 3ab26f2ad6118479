//! The Bose–Mesner algebra: distance matrices, primitive idempotents,
//! eigenvalues, Krein parameters and Q-polynomial orderings.

use crate::error::{Error, Result};
use crate::graph::{triangle_equals, triangle_exceeds, Distances, IntersectionData};
use crate::linalg::{frob, hermitian_eig, identity, lagrange_projector, projector, select_columns};
use crate::scalar::{from_real, real, to_f64, CMat, Real};

/// Krein parameters `q^h_{ij}`, indexed `(h, i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KreinTensor<T> {
    size: usize,
    data: Vec<T>,
}

impl<T: Real> KreinTensor<T> {
    pub fn get(&self, h: usize, i: usize, j: usize) -> T {
        self.data[(h * self.size + i) * self.size + j]
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |a, x| a.max(x.abs()))
    }

    /// `|q^h_{ij}| < tol_zero · max |q|`.
    pub fn is_zero(&self, h: usize, i: usize, j: usize, tol_zero: f64) -> bool {
        self.get(h, i, j).abs() < real::<T>(tol_zero) * self.max_abs()
    }

    /// Relabels so that new index `a` refers to old index `perm[a]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let s = self.size;
        let mut data = vec![T::zero(); s * s * s];
        for h in 0..s {
            for i in 0..s {
                for j in 0..s {
                    data[(h * s + i) * s + j] = self.get(perm[h], perm[i], perm[j]);
                }
            }
        }
        KreinTensor { size: s, data }
    }
}

/// Distance matrices, primitive idempotents and their structure constants.
#[derive(Debug, Clone)]
pub struct SpectralData<T: Real> {
    pub distance: Vec<CMat<T>>,
    pub idempotents: Vec<CMat<T>>,
    pub theta: Vec<T>,
    pub mult: Vec<usize>,
    pub krein: KreinTensor<T>,
}

impl<T: Real> SpectralData<T> {
    pub fn build(dist: &Distances, data: &IntersectionData, tol_group: f64, tol_zero: f64) -> Result<Self> {
        let distance = distance_matrices(dist, data, tol_zero)?;
        let theta = eigenvalues(&distance[1], data.diameter, tol_group)?;
        let (idempotents, theta, mult) = primitive_idempotents(&distance[1], &theta, tol_zero)?;
        let krein = krein_parameters(&idempotents, &mult, tol_zero)?;
        Ok(SpectralData { distance, idempotents, theta, mult, krein })
    }

    pub fn diameter(&self) -> usize {
        self.theta.len() - 1
    }

    pub fn adjacency(&self) -> &CMat<T> {
        &self.distance[1]
    }

    /// The same data with idempotents relabelled by a Q-polynomial ordering.
    pub fn reordered(&self, ordering: &QPolyOrdering<T>) -> Self {
        let p = &ordering.perm;
        SpectralData {
            distance: self.distance.clone(),
            idempotents: p.iter().map(|&i| self.idempotents[i].clone()).collect(),
            theta: p.iter().map(|&i| self.theta[i]).collect(),
            mult: p.iter().map(|&i| self.mult[i]).collect(),
            krein: self.krein.permuted(p),
        }
    }
}

/// `(A_i)_{xy} = 1` iff `∂(x, y) = i`; certifies `A_i A_j = Σ_h p^h_{ij} A_h`.
pub fn distance_matrices<T: Real>(dist: &Distances, data: &IntersectionData, tol: f64) -> Result<Vec<CMat<T>>> {
    let n = dist.n();
    let s = data.diameter + 1;
    let mats: Vec<CMat<T>> = (0..s)
        .map(|i| CMat::<T>::from_fn(n, n, |x, y| if dist.get(x, y) == i { from_real(T::one()) } else { from_real(T::zero()) }))
        .collect();
    for i in 0..s {
        for j in 0..s {
            let lhs = &mats[i] * &mats[j];
            let rhs = (0..s).fold(CMat::<T>::zeros(n, n), |acc, h| {
                acc + &mats[h] * from_real(real::<T>(data.p(h, i, j) as f64))
            });
            let res = frob(&(&lhs - &rhs));
            if res > real::<T>(tol) * frob(&lhs).max(T::one()) {
                return Err(Error::numerical(
                    "distance_matrices",
                    format!("A_{i} A_{j} differs from its intersection-number expansion by {}", to_f64(res)),
                ));
            }
        }
    }
    Ok(mats)
}

/// The distinct eigenvalues of `A`, descending, grouped at gaps larger than
/// `tol_group · spectral radius`. Each group is represented by its mean.
pub fn eigenvalues<T: Real>(a: &CMat<T>, diameter: usize, tol_group: f64) -> Result<Vec<T>> {
    let (mut vals, _) = hermitian_eig(a);
    vals.reverse();
    let radius = vals.iter().fold(T::zero(), |m, v| m.max(v.abs())).max(T::one());
    let gap = real::<T>(tol_group) * radius;
    let mut groups: Vec<Vec<T>> = Vec::new();
    for v in vals {
        match groups.last_mut() {
            Some(g) if *g.last().expect("groups are nonempty") - v <= gap => g.push(v),
            _ => groups.push(vec![v]),
        }
    }
    if groups.len() != diameter + 1 {
        return Err(Error::numerical(
            "primitive_idempotents",
            format!("found {} distinct eigenvalues, expected D + 1 = {}", groups.len(), diameter + 1),
        ));
    }
    Ok(groups
        .into_iter()
        .map(|g| {
            let len = real::<T>(g.len() as f64);
            g.into_iter().fold(T::zero(), |a, b| a + b) / len
        })
        .collect())
}

/// `E_i = Π_{j≠i} (A − θ_j I)/(θ_i − θ_j)`, reordered so that `|X|⁻¹J` comes
/// first and the rest follow by descending eigenvalue. Returns the
/// idempotents, matching eigenvalues and multiplicities.
#[allow(clippy::type_complexity)]
pub fn primitive_idempotents<T: Real>(a: &CMat<T>, theta: &[T], tol: f64) -> Result<(Vec<CMat<T>>, Vec<T>, Vec<usize>)> {
    let n = a.nrows();
    let thetas: Vec<_> = theta.iter().map(|&t| from_real(t)).collect();
    let mut order: Vec<usize> = (0..theta.len()).collect();
    order.sort_by(|&x, &y| theta[y].partial_cmp(&theta[x]).unwrap_or(std::cmp::Ordering::Equal));
    let mut es: Vec<CMat<T>> = order.iter().map(|&i| lagrange_projector(a, &thetas, i)).collect();
    let mut th: Vec<T> = order.iter().map(|&i| theta[i]).collect();

    let j_over_n = CMat::<T>::from_element(n, n, from_real(T::one() / real::<T>(n as f64)));
    let trivial = es
        .iter()
        .position(|e| frob(&(e - &j_over_n)) < real::<T>(tol))
        .ok_or_else(|| Error::numerical("primitive_idempotents", "no idempotent equals |X|^-1 J"))?;
    let e0 = es.remove(trivial);
    es.insert(0, e0);
    let t0 = th.remove(trivial);
    th.insert(0, t0);

    let mult: Vec<usize> = es.iter().map(|e| to_f64(e.trace().re).round() as usize).collect();
    let tol_t = real::<T>(tol);
    for i in 0..es.len() {
        for j in 0..es.len() {
            let prod = &es[i] * &es[j];
            let target = if i == j { es[i].clone() } else { CMat::<T>::zeros(n, n) };
            if frob(&(prod - target)) > tol_t {
                return Err(Error::numerical("primitive_idempotents", format!("E_{i} E_{j} is not δ E_{i}")));
            }
        }
    }
    let sum = es.iter().fold(CMat::<T>::zeros(n, n), |acc, e| acc + e);
    if frob(&(sum - identity::<T>(n))) > tol_t {
        return Err(Error::numerical("primitive_idempotents", "idempotents do not sum to I"));
    }
    Ok((es, th, mult))
}

/// Orthogonal projectors onto the eigenspaces of `A` built from the
/// eigenvectors of a Hermitian eigensolver, one per listed eigenvalue.
pub fn eigenvector_projectors<T: Real>(a: &CMat<T>, theta: &[T], tol_group: f64) -> Vec<CMat<T>> {
    let (vals, vecs) = hermitian_eig(a);
    let radius = vals.iter().fold(T::one(), |m, v| m.max(v.abs()));
    theta
        .iter()
        .map(|&t| {
            let cols: Vec<usize> = (0..vals.len())
                .filter(|&k| (vals[k] - t).abs() <= real::<T>(tol_group.max(1e-12)) * radius * real::<T>(1e3))
                .collect();
            projector(&select_columns(&vecs, &cols))
        })
        .collect()
}

/// `q^h_{ij} = |X| tr(E_h (E_i ∘ E_j)) / m_h`, certified by re-expanding
/// `E_i ∘ E_j = |X|⁻¹ Σ_h q^h_{ij} E_h`.
pub fn krein_parameters<T: Real>(es: &[CMat<T>], mult: &[usize], tol: f64) -> Result<KreinTensor<T>> {
    let s = es.len();
    let n = es[0].nrows();
    let nn = real::<T>(n as f64);
    let mut data = vec![T::zero(); s * s * s];
    for i in 0..s {
        for j in 0..s {
            let schur = es[i].component_mul(&es[j]);
            for h in 0..s {
                let tr = (&es[h] * &schur).trace().re;
                data[(h * s + i) * s + j] = nn * tr / real::<T>(mult[h] as f64);
            }
            let rebuilt = (0..s).fold(CMat::<T>::zeros(n, n), |acc, h| {
                acc + &es[h] * from_real(data[(h * s + i) * s + j] / nn)
            });
            if frob(&(rebuilt - &schur)) > real::<T>(tol) {
                return Err(Error::numerical(
                    "krein_parameters",
                    format!("E_{i} ∘ E_{j} is not recovered from its Krein expansion"),
                ));
            }
        }
    }
    let tensor = KreinTensor { size: s, data };
    let floor = -real::<T>(tol) * tensor.max_abs().max(T::one());
    if let Some(pos) = tensor.data.iter().position(|&v| v < floor) {
        return Err(Error::numerical(
            "krein_parameters",
            format!("negative Krein parameter {} at flat index {pos}", to_f64(tensor.data[pos])),
        ));
    }
    Ok(tensor)
}

/// A Q-polynomial ordering: `perm[i]` is the index of the idempotent playing
/// the role of `E_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct QPolyOrdering<T> {
    pub perm: Vec<usize>,
    pub theta_seq: Vec<T>,
}

/// Tries every idempotent as `E_1`, grows the tridiagonal chain from the
/// nonzero pattern of `q^h_{1,·}`, and keeps chains obeying the full
/// triangle rule.
pub fn find_qpoly_orderings<T: Real>(krein: &KreinTensor<T>, theta: &[T], tol_zero: f64) -> Vec<QPolyOrdering<T>> {
    let s = krein.size();
    let mut out = Vec::new();
    if s < 2 {
        return out;
    }
    'candidates: for m in 1..s {
        let mut perm = vec![0, m];
        let mut used = vec![false; s];
        used[0] = true;
        used[m] = true;
        while perm.len() < s {
            let cur = *perm.last().expect("chain is nonempty");
            let next: Vec<usize> = (0..s)
                .filter(|&h| !used[h] && !krein.is_zero(h, m, cur, tol_zero))
                .collect();
            if next.len() != 1 {
                continue 'candidates;
            }
            used[next[0]] = true;
            perm.push(next[0]);
        }
        let q = krein.permuted(&perm);
        let ok = (0..s).all(|h| {
            (0..s).all(|i| {
                (0..s).all(|j| {
                    let zero = q.is_zero(h, i, j, tol_zero);
                    !(triangle_exceeds(h, i, j) && !zero || triangle_equals(h, i, j) && zero)
                })
            })
        });
        if ok {
            let theta_seq = perm.iter().map(|&i| theta[i]).collect();
            out.push(QPolyOrdering { perm, theta_seq });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{check_distance_regular, distances, Graph};

    fn spectral(g: &Graph) -> SpectralData<f64> {
        let dist = distances(g);
        let data = check_distance_regular(g).unwrap();
        SpectralData::build(&dist, &data, 1e-9, 1e-8).unwrap()
    }

    #[test]
    fn cycle8_spectrum() {
        let sd = spectral(&Graph::cycle(8).unwrap());
        let s2 = 2f64.sqrt();
        let expect = [2.0, s2, 0.0, -s2, -2.0];
        for (t, e) in sd.theta.iter().zip(expect) {
            assert!((t - e).abs() < 1e-12);
        }
        assert_eq!(sd.mult, vec![1, 2, 2, 2, 1]);
        let e1 = &sd.idempotents[1];
        assert!(frob(&(e1 * e1 - e1)) < 1e-10);
    }

    #[test]
    fn antipodal_row_counts_and_identity() {
        let sd = spectral(&Graph::cycle(8).unwrap());
        for r in 0..8 {
            let ones = (0..8).filter(|&c| sd.distance[4][(r, c)].re == 1.0).count();
            assert_eq!(ones, 1);
        }
        assert_eq!(sd.distance[0], identity::<f64>(8));
    }

    #[test]
    fn cycle9_adjacency_square() {
        let sd = spectral(&Graph::cycle(9).unwrap());
        let a = &sd.distance[1];
        let rhs = &sd.distance[0] * from_real(2.0) + &sd.distance[2];
        assert!(frob(&(a * a - rhs)) < 1e-12);
    }

    #[test]
    fn lagrange_matches_eigenvector_projectors() {
        for g in [Graph::cycle(8).unwrap(), Graph::cycle(9).unwrap(), Graph::hypercube(3).unwrap()] {
            let sd = spectral(&g);
            let proj = eigenvector_projectors(sd.adjacency(), &sd.theta, 1e-9);
            for (e, p) in sd.idempotents.iter().zip(&proj) {
                assert!(frob(&(e - p)) < 1e-9);
            }
        }
    }

    #[test]
    fn krein_properties() {
        let sd8 = spectral(&Graph::cycle(8).unwrap());
        let s = sd8.krein.size();
        for h in 0..s {
            for i in 0..s {
                for j in 0..s {
                    assert!(sd8.krein.get(h, i, j) >= -1e-9);
                }
            }
        }
        let sd9 = spectral(&Graph::cycle(9).unwrap());
        for h in 0..5 {
            for i in 0..5 {
                for j in 0..5 {
                    assert!((sd9.krein.get(h, i, j) - sd9.krein.get(h, j, i)).abs() < 1e-10);
                }
            }
        }
        // q^0_{ij} = δ_ij m_i
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j { sd9.mult[i] as f64 } else { 0.0 };
                assert!((sd9.krein.get(0, i, j) - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn cycle_orderings() {
        let sd8 = spectral(&Graph::cycle(8).unwrap());
        let ords = find_qpoly_orderings(&sd8.krein, &sd8.theta, 1e-8);
        assert!(!ords.is_empty());
        let s2 = 2f64.sqrt();
        for (t, e) in ords[0].theta_seq.iter().zip([2.0, s2, 0.0, -s2, -2.0]) {
            assert!((t - e).abs() < 1e-12);
        }
        let sd9 = spectral(&Graph::cycle(9).unwrap());
        assert!(!find_qpoly_orderings(&sd9.krein, &sd9.theta, 1e-8).is_empty());
    }

    #[test]
    fn no_chain_gives_empty_list() {
        let s = 3;
        let mut data = vec![0.0; 27];
        let at = |h: usize, i: usize, j: usize| (h * s + i) * s + j;
        for i in 0..s {
            data[at(i, 0, i)] = 1.0;
            data[at(i, i, 0)] = 1.0;
        }
        // E_m ∘ E_k hits everything: no tridiagonal chain.
        for h in 0..s {
            for i in 1..s {
                for j in 1..s {
                    data[at(h, i, j)] = 1.0;
                }
            }
        }
        let krein = KreinTensor { size: s, data };
        assert!(find_qpoly_orderings(&krein, &[3.0, 1.0, -1.0], 1e-8).is_empty());
    }
}
