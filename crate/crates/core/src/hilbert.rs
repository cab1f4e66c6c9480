//! Dense discretisations of the Hilbert-space operators of the extended
//! triple: the dilation unitaries, the diagonal operators D, theta and T,
//! the two-spinor Dirac operator, the left regular representation of the
//! convolution algebra, twisted commutators, and the real structure.
//!
//! Operators act on grid samples with the trapezoid weights as inner
//! product, so adjoints are weighted adjoints. Conjugate-linear operators
//! (the real structure) carry a flag saying the input is conjugated first.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{beta_z, AlgebraElement, Lattice};
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::group::{GroupModel, TripleParams};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

/// First two Pauli matrices; gamma1 couples the base Dirac operator,
/// gamma2 the deformation T.
pub const GAMMA1: [[Complex64; 2]; 2] = [[C0, C1], [C1, C0]];
pub const GAMMA2: [[Complex64; 2]; 2] = [
    [C0, Complex64::new(0.0, -1.0)],
    [CI, C0],
];

#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    pub matrix: Array2<Complex64>,
    /// Quadrature weights defining the inner product on sample vectors.
    pub weights: Vec<f64>,
    /// True for conjugate-linear operators: the input vector is
    /// conjugated before the matrix is applied.
    pub conjugate_input: bool,
}

fn matmul(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (n, k) = a.dim();
    let (k2, m) = b.dim();
    assert_eq!(k, k2);
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![C0; m];
            for p in 0..k {
                let av = a[[i, p]];
                if av == C0 {
                    continue;
                }
                let brow = b.row(p);
                for (j, rv) in row.iter_mut().enumerate() {
                    *rv += av * brow[j];
                }
            }
            row
        })
        .collect();
    let mut out = Array2::zeros((n, m));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    out
}

impl DiscretizedOperator {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn identity_like(&self) -> DiscretizedOperator {
        let n = self.dim();
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            m[[i, i]] = C1;
        }
        DiscretizedOperator { matrix: m, weights: self.weights.clone(), conjugate_input: false }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim());
        let conj: Vec<Complex64>;
        let input = if self.conjugate_input {
            conj = v.iter().map(|z| z.conj()).collect();
            &conj
        } else {
            v
        };
        (0..self.dim())
            .map(|i| {
                let row = self.matrix.row(i);
                row.iter().zip(input).map(|(m, x)| m * x).sum()
            })
            .collect()
    }

    /// Composition self . other (apply `other` first).
    pub fn compose(&self, other: &DiscretizedOperator) -> DiscretizedOperator {
        assert_eq!(self.dim(), other.dim());
        let rhs = if self.conjugate_input {
            other.matrix.mapv(|z| z.conj())
        } else {
            other.matrix.clone()
        };
        DiscretizedOperator {
            matrix: matmul(&self.matrix, &rhs),
            weights: self.weights.clone(),
            conjugate_input: self.conjugate_input ^ other.conjugate_input,
        }
    }

    pub fn add_scaled(&self, other: &DiscretizedOperator, factor: Complex64) -> DiscretizedOperator {
        assert_eq!(self.conjugate_input, other.conjugate_input);
        DiscretizedOperator {
            matrix: &self.matrix + &other.matrix.mapv(|z| z * factor),
            weights: self.weights.clone(),
            conjugate_input: self.conjugate_input,
        }
    }

    pub fn sub(&self, other: &DiscretizedOperator) -> DiscretizedOperator {
        self.add_scaled(other, Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, factor: Complex64) -> DiscretizedOperator {
        DiscretizedOperator {
            matrix: self.matrix.mapv(|z| z * factor),
            weights: self.weights.clone(),
            conjugate_input: self.conjugate_input,
        }
    }

    /// Adjoint with respect to the weighted inner product:
    /// M* = W^{-1} M^H W.
    pub fn adjoint(&self) -> DiscretizedOperator {
        let n = self.dim();
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                m[[i, j]] = self.matrix[[j, i]].conj() * (self.weights[j] / self.weights[i]);
            }
        }
        DiscretizedOperator { matrix: m, weights: self.weights.clone(), conjugate_input: self.conjugate_input }
    }

    /// Deviation from weighted self-adjointness, relative to the largest
    /// matrix entry.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let scale = self.matrix.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1e-300);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d = (self.matrix[[i, j]] * self.weights[i]
                    - self.matrix[[j, i]].conj() * self.weights[j])
                    .norm();
                worst = worst.max(d / (self.weights[i].min(self.weights[j])));
            }
        }
        worst / scale
    }

    pub fn weighted_norm(&self, v: &[Complex64]) -> f64 {
        v.iter()
            .zip(&self.weights)
            .map(|(z, w)| z.norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    }
}

/// Largest singular value with respect to the weighted inner product,
/// by power iteration on A* A. Deterministic for a fixed seed.
pub fn operator_norm(op: &DiscretizedOperator, seed: u64) -> f64 {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let adj = op.adjoint();
    let mut lambda = 0.0f64;
    for _ in 0..10_000 {
        let av = op.apply(&v);
        let bv = adj.apply(&av);
        let norm = op.weighted_norm(&bv);
        if norm == 0.0 {
            return 0.0;
        }
        let new_lambda = {
            // Rayleigh quotient <v, A*Av> / <v, v>
            let num: f64 = v
                .iter()
                .zip(&bv)
                .zip(&op.weights)
                .map(|((x, y), w)| (x.conj() * y).re * w)
                .sum();
            let den: f64 = v.iter().zip(&op.weights).map(|(x, w)| x.norm_sqr() * w).sum();
            (num / den).max(0.0).sqrt()
        };
        for (vi, bi) in v.iter_mut().zip(&bv) {
            *vi = bi / norm;
        }
        if (new_lambda - lambda).abs() <= 1e-8 * new_lambda.abs().max(1e-300) {
            return new_lambda;
        }
        lambda = new_lambda;
    }
    lambda
}

fn lattice_weights(lat: &Lattice, gm: &GroupModel, spin: usize) -> Vec<f64> {
    let wa = crate::group::haar_weights(gm);
    let wb = lat.b.weights();
    let mut w = Vec::with_capacity(lat.len() * spin);
    for ia in 0..lat.a.count() {
        for ib in 0..lat.b.count() {
            for _ in 0..spin {
                w.push(wa[ia] * wb[ib]);
            }
        }
    }
    w
}

fn diag_operator(lat: &Lattice, gm: &GroupModel, f: impl Fn(f64, f64) -> Complex64) -> DiscretizedOperator {
    let n = lat.len();
    let mut m = Array2::zeros((n, n));
    for ia in 0..lat.a.count() {
        for ib in 0..lat.b.count() {
            let k = lat.flat(ia, ib);
            m[[k, k]] = f(lat.a.point(ia), lat.b.point(ib));
        }
    }
    DiscretizedOperator { matrix: m, weights: lattice_weights(lat, gm, 1), conjugate_input: false }
}

/// Tensor an operator on the lattice with a 2x2 spin matrix; spin is the
/// fastest index.
pub fn tensor_spin(op: &DiscretizedOperator, spin: &[[Complex64; 2]; 2]) -> DiscretizedOperator {
    let n = op.dim();
    let mut m = Array2::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            let v = op.matrix[[i, j]];
            if v == C0 {
                continue;
            }
            for s in 0..2 {
                for t in 0..2 {
                    if spin[s][t] != C0 {
                        m[[2 * i + s, 2 * j + t]] = v * spin[s][t];
                    }
                }
            }
        }
    }
    let mut w = Vec::with_capacity(2 * n);
    for i in 0..n {
        w.push(op.weights[i]);
        w.push(op.weights[i]);
    }
    DiscretizedOperator { matrix: m, weights: w, conjugate_input: false }
}

/// Dilation unitary (U_a xi)(b) = e^{a/2} xi(e^a b) on the base grid.
pub fn build_ualpha(gb: &Grid1D, a: f64) -> DiscretizedOperator {
    let n = gb.count();
    let mut m = Array2::zeros((n, n));
    let fac = Complex64::new((a / 2.0).exp(), 0.0);
    for j in 0..n {
        if let Some((i, t)) = gb.interp_stencil(a.exp() * gb.point(j)) {
            m[[j, i]] = fac * (1.0 - t);
            m[[j, i + 1]] = fac * t;
        }
    }
    DiscretizedOperator { matrix: m, weights: gb.weights(), conjugate_input: false }
}

/// The diagonal operators of the extension and the two-spinor Dirac
/// operator assembled from them.
pub struct ExtendedOperators {
    /// (D xi)(a)(b) = e^{-a} b xi(a)(b)
    pub d_hat: DiscretizedOperator,
    /// (theta xi)(a) = e^{-a} xi(a)
    pub theta_hat: DiscretizedOperator,
    /// T = eta + omega theta
    pub t_op: DiscretizedOperator,
    /// Theta = theta tensor identity on spinors
    pub theta_spin: DiscretizedOperator,
    /// Dirac = D tensor gamma1 + T tensor gamma2
    pub dirac: DiscretizedOperator,
}

pub fn build_extended_operators(lat: &Lattice, gm: &GroupModel, p: TripleParams) -> ExtendedOperators {
    let d_hat = diag_operator(lat, gm, |a, b| Complex64::new((-a).exp() * b, 0.0));
    let theta_hat = diag_operator(lat, gm, |a, _| Complex64::new((-a).exp(), 0.0));
    let t_op = diag_operator(lat, gm, |a, _| Complex64::new(p.eta + p.omega * (-a).exp(), 0.0));
    let theta_spin = tensor_spin(&theta_hat, &[[C1, C0], [C0, C1]]);
    let dirac = tensor_spin(&d_hat, &GAMMA1).add_scaled(&tensor_spin(&t_op, &GAMMA2), C1);
    ExtendedOperators { d_hat, theta_hat, t_op, theta_spin, dirac }
}

/// Left regular representation of an algebra element:
/// (rho(f) xi)(a)(b) = e^{-a} integral of f(a - a')(e^{-a}(b - b'))
/// xi(a')(b') da' db'.
pub fn represent(f: &AlgebraElement, gm: &GroupModel) -> Result<DiscretizedOperator> {
    let lat = &f.lattice;
    let n = lat.len();
    let nb = lat.b.count();
    let wa = crate::group::haar_weights(gm);
    if wa.len() != lat.a.count() {
        return Err(Error::Shape("group model does not match the lattice".into()));
    }
    let wb = lat.b.weights();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|row_idx| {
            let ia = row_idx / nb;
            let ib = row_idx % nb;
            let a = lat.a.point(ia);
            let b = lat.b.point(ib);
            let nu = (-a).exp();
            let mut row = vec![C0; n];
            for iap in 0..lat.a.count() {
                let da = a - lat.a.point(iap);
                for ibp in 0..nb {
                    let v = f.eval(da, nu * (b - lat.b.point(ibp)));
                    if v != C0 {
                        row[iap * nb + ibp] = v * (nu * wa[iap] * wb[ibp]);
                    }
                }
            }
            row
        })
        .collect();
    let mut m = Array2::zeros((n, n));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            m[[i, j]] = v;
        }
    }
    Ok(DiscretizedOperator { matrix: m, weights: lattice_weights(lat, gm, 1), conjugate_input: false })
}

/// rho(f) tensor identity, for commutators with two-spinor operators.
pub fn represent_spin(f: &AlgebraElement, gm: &GroupModel) -> Result<DiscretizedOperator> {
    Ok(tensor_spin(&represent(f, gm)?, &[[C1, C0], [C0, C1]]))
}

/// Twisted commutator [X, pi(f)]_beta = X pi(f) - pi(beta f) X, with the
/// modular twist at z = 1. `X` may be a one-spinor or two-spinor operator;
/// the representation is lifted to match.
pub fn twisted_commutator(
    x: &DiscretizedOperator,
    f: &AlgebraElement,
    gm: &GroupModel,
) -> Result<DiscretizedOperator> {
    let n1 = f.lattice.len();
    let lift = if x.dim() == n1 {
        false
    } else if x.dim() == 2 * n1 {
        true
    } else {
        return Err(Error::Shape("operator dimension does not match the lattice".into()));
    };
    let bf = beta_z(f, C1);
    let (pf, pbf) = if lift {
        (represent_spin(f, gm)?, represent_spin(&bf, gm)?)
    } else {
        (represent(f, gm)?, represent(&bf, gm)?)
    };
    Ok(x.compose(&pf).sub(&pbf.compose(x)))
}

/// Upper bound M_{f} mu(S_f) for the norm of the twisted commutator
/// [D, rho(f)]_beta: M_f is the largest b-moment of |f| over the group
/// support, mu the measure of that support.
pub fn commutator_bound(f: &AlgebraElement, gm: &GroupModel) -> f64 {
    let wb = f.lattice.b.weights();
    let wa = crate::group::haar_weights(gm);
    let mut m = 0.0f64;
    let mut mu = 0.0f64;
    for ia in f.support.ia.0..=f.support.ia.1 {
        let moment: f64 = (0..f.lattice.b.count())
            .map(|ib| wb[ib] * f.lattice.b.point(ib).abs() * f.values[[ia, ib]].norm())
            .sum();
        m = m.max(moment);
        mu += wa[ia];
    }
    m * mu
}

/// Real structure J = (J_hat tensor gamma1) followed by complex
/// conjugation, where (J_hat xi)(a)(b) = e^{-a/2} conj(xi(-a)(-e^{-a}b)).
/// Defined for the compatible deformation eta = -omega on a symmetric
/// lattice.
pub fn real_structure(lat: &Lattice, gm: &GroupModel, p: TripleParams) -> Result<DiscretizedOperator> {
    let base = real_structure_base(lat, gm, p)?;
    let linear = DiscretizedOperator {
        matrix: base.matrix,
        weights: base.weights,
        conjugate_input: false,
    };
    let mut j = tensor_spin(&linear, &GAMMA1);
    j.conjugate_input = true;
    Ok(j)
}

/// The one-spinor base J_hat of the real structure, as a conjugate-linear
/// operator. Kept separate so refined-grid defect studies can avoid
/// materializing the spin-doubled matrix: the gamma1 factor acts by
/// swapping spinor components.
pub fn real_structure_base(
    lat: &Lattice,
    gm: &GroupModel,
    p: TripleParams,
) -> Result<DiscretizedOperator> {
    if (p.eta + p.omega).abs() > 1e-12 {
        return Err(Error::Config(format!(
            "real structure needs eta = -omega, got eta = {}, omega = {}",
            p.eta, p.omega
        )));
    }
    if (lat.a.lo() + lat.a.hi()).abs() > 1e-12 || lat.a.count() % 2 == 0 {
        return Err(Error::Config("real structure needs a symmetric odd group grid".into()));
    }
    let (na, nb) = (lat.a.count(), lat.b.count());
    let n = lat.len();
    let mut m = Array2::zeros((n, n));
    for ia in 0..na {
        let a = lat.a.point(ia);
        let ia_ref = na - 1 - ia; // index of -a
        let fac = Complex64::new((-a / 2.0).exp(), 0.0);
        for ib in 0..nb {
            let x = -(-a).exp() * lat.b.point(ib);
            if let Some((jb, t)) = lat.b.interp_stencil(x) {
                let row = lat.flat(ia, ib);
                m[[row, lat.flat(ia_ref, jb)]] = fac * (1.0 - t);
                m[[row, lat.flat(ia_ref, jb + 1)]] = fac * t;
            }
        }
    }
    Ok(DiscretizedOperator {
        matrix: m,
        weights: lattice_weights(lat, gm, 1),
        conjugate_input: true,
    })
}

/// Largest amplification of the operator over a fixed family of smooth
/// normalized spinor probes. Used for approximate-identity defects of
/// resampling operators, whose raw lattice operator norms do not converge
/// under refinement (linear interpolation on the top frequency band loses
/// an order-one fraction of the norm at every resolution).
pub fn probe_norm(op: &DiscretizedOperator, lat: &Lattice) -> f64 {
    let spin = op.dim() / lat.len();
    let mut worst = 0.0f64;
    for v in probe_family(lat, spin) {
        let nv = op.weighted_norm(&v);
        let av = op.apply(&v);
        let na = op.weighted_norm(&av);
        if nv > 0.0 {
            worst = worst.max(na / nv);
        }
    }
    worst
}

/// The fixed family of smooth normalized spinor probes behind
/// `probe_norm`: offset Gaussians with mild phase modulation,
/// concentrated near the lattice center because the modular rescaling
/// maps b to e^{|a|} b at the far rows, and probes must decay before
/// their image leaves the b-window.
pub fn probe_family(lat: &Lattice, spin: usize) -> Vec<Vec<Complex64>> {
    assert!(spin == 1 || spin == 2);
    let (a_half, b_half) = (lat.a.hi(), lat.b.hi());
    let params: [(f64, f64, f64, f64, f64, f64); 6] = [
        (0.0, 0.0, 0.2, 0.2, 0.0, 0.0),
        (0.1, -0.05, 0.18, 0.15, 0.0, 0.0),
        (-0.1, 0.05, 0.15, 0.2, 0.5, 0.3),
        (0.05, 0.08, 0.22, 0.15, -0.4, 0.6),
        (-0.08, -0.08, 0.15, 0.18, 0.3, -0.5),
        (0.0, 0.04, 0.2, 0.16, 0.8, 0.8),
    ];
    params
        .iter()
        .map(|&(ca, cb, sa, sb, ka, kb)| {
            let mut v = vec![C0; spin * lat.len()];
            for ia in 0..lat.a.count() {
                let a = lat.a.point(ia);
                for ib in 0..lat.b.count() {
                    let b = lat.b.point(ib);
                    let amp = (-((a - ca * a_half) / (sa * a_half)).powi(2)
                        - ((b - cb * b_half) / (sb * b_half)).powi(2))
                    .exp();
                    let ph = Complex64::from_polar(amp, ka * a + kb * b);
                    for s in 0..spin {
                        let coef = if s == 0 { C1 } else { Complex64::new(0.6, 0.3) };
                        v[spin * lat.flat(ia, ib) + s] = ph * coef;
                    }
                }
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_group, GroupKind};

    fn setup(na: usize, nb: usize) -> (Lattice, GroupModel) {
        let ga = Grid1D::symmetric(3.0, na).unwrap();
        let gb = Grid1D::symmetric(6.0, nb).unwrap();
        let gm = make_group(GroupKind::RealLine, -3.0, 3.0, na).unwrap();
        (Lattice::new(ga, gb), gm)
    }

    fn probe(lat: &Lattice) -> AlgebraElement {
        AlgebraElement::windowed_gaussian(
            lat.clone(),
            (0.0, 0.0),
            (0.5, 1.0),
            (-1.2, 1.2, -2.4, 2.4),
        )
        .unwrap()
    }

    #[test]
    fn operator_norm_of_a_diagonal_matrix() {
        let (lat, gm) = setup(9, 9);
        let d = diag_operator(&lat, &gm, |a, b| Complex64::new(a + 2.0 * b, 0.0));
        let n = operator_norm(&d, 7);
        assert!((n - 15.0).abs() < 1e-6, "norm {n}");
    }

    #[test]
    fn ualpha_is_approximately_unitary_on_probes() {
        // The discrete adjoint of an interpolation operator has hat rows
        // narrower than the grid spacing, so U*U is not the right probe of
        // unitarity here; isometry plus a two-sided inverse is.
        let gb = Grid1D::symmetric(6.0, 129).unwrap();
        let wnorm = |v: &[Complex64]| -> f64 {
            v.iter().zip(gb.weights()).map(|(z, w)| z.norm_sqr() * w).sum::<f64>().sqrt()
        };
        let u = build_ualpha(&gb, 0.4);
        let uinv = build_ualpha(&gb, -0.4);
        let v: Vec<Complex64> = gb
            .points()
            .map(|b| Complex64::new((-(b / 2.0) * (b / 2.0)).exp(), 0.0))
            .collect();
        let nv = wnorm(&v);
        let uv = u.apply(&v);
        assert!((wnorm(&uv) - nv).abs() / nv < 0.01, "isometry defect {}", (wnorm(&uv) - nv).abs() / nv);
        let round: Vec<Complex64> =
            uinv.apply(&uv).iter().zip(&v).map(|(x, y)| x - y).collect();
        assert!(wnorm(&round) / nv < 0.01, "inverse defect {}", wnorm(&round) / nv);
        let round2: Vec<Complex64> =
            u.apply(&uinv.apply(&v)).iter().zip(&v).map(|(x, y)| x - y).collect();
        assert!(wnorm(&round2) / nv < 0.01, "inverse defect {}", wnorm(&round2) / nv);
    }

    #[test]
    fn dirac_is_weighted_self_adjoint() {
        let (lat, gm) = setup(13, 13);
        let ops = build_extended_operators(&lat, &gm, TripleParams { eta: 1.0, omega: -1.0, s: 3.0, c: 0.0 });
        assert!(ops.dirac.hermiticity_residual() < 1e-12);
        assert!(ops.theta_spin.hermiticity_residual() < 1e-12);
    }

    #[test]
    fn dirac_commutes_with_the_modular_operator() {
        let (lat, gm) = setup(11, 11);
        let ops = build_extended_operators(&lat, &gm, TripleParams { eta: 0.5, omega: 2.0, s: 3.0, c: 0.0 });
        let lhs = ops.dirac.compose(&ops.theta_spin);
        let rhs = ops.theta_spin.compose(&ops.dirac);
        let d = lhs.sub(&rhs).matrix.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        assert!(d < 1e-12, "defect {d}");
    }

    #[test]
    fn theta_commutes_with_the_representation_twistedly() {
        // [theta, rho(f)]_beta = 0 exactly on the lattice
        let (lat, gm) = setup(15, 15);
        let ops = build_extended_operators(&lat, &gm, TripleParams { eta: 0.0, omega: 1.0, s: 3.0, c: 0.0 });
        let f = probe(&lat);
        let comm = twisted_commutator(&ops.theta_hat, &f, &gm).unwrap();
        let scale = represent(&f, &gm).unwrap().matrix.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        let d = comm.matrix.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        assert!(d < 1e-12 * scale.max(1.0), "defect {d}");
    }

    #[test]
    fn twisted_commutator_with_d_respects_the_moment_bound() {
        let (lat, gm) = setup(17, 17);
        let ops = build_extended_operators(&lat, &gm, TripleParams { eta: 0.0, omega: 1.0, s: 3.0, c: 0.0 });
        let f = probe(&lat);
        let comm = twisted_commutator(&ops.d_hat, &f, &gm).unwrap();
        let norm = operator_norm(&comm, 11);
        let bound = commutator_bound(&f, &gm);
        assert!(norm <= bound * (1.0 + 1e-6), "norm {norm} bound {bound}");
        assert!(norm > 1e-4, "commutator should not vanish, got {norm}");
    }

    #[test]
    fn real_structure_squares_to_one_on_probes() {
        let (lat, gm) = setup(31, 61);
        let p = TripleParams { eta: 1.0, omega: -1.0, s: 3.0, c: 0.0 };
        let j = real_structure(&lat, &gm, p).unwrap();
        // J conjugates its input, so two applications act linearly; the
        // double apply avoids a dense compose at this resolution.
        let mut worst = 0.0f64;
        for v in probe_family(&lat, 2) {
            let jjv = j.apply(&j.apply(&v));
            let diff: Vec<Complex64> = jjv.iter().zip(&v).map(|(x, y)| x - y).collect();
            worst = worst.max(j.weighted_norm(&diff) / j.weighted_norm(&v));
        }
        assert!(worst < 0.05, "defect {worst}");
    }

    #[test]
    fn real_structure_rejects_incompatible_parameters() {
        let (lat, gm) = setup(9, 9);
        assert!(real_structure(&lat, &gm, TripleParams { eta: 1.0, omega: 1.0, s: 3.0, c: 0.0 }).is_err());
    }
}
