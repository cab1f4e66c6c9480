//! End-to-end acceptance gate: one test per quantitative claim the
//! library is required to reproduce, each printing a single verdict line
//! (visible with `--nocapture`). Tolerances are pinned here on purpose;
//! loosening them is a behavior change, not a test fix.

use num_complex::Complex64;
use std::time::Instant;

use nctriple::algebra::{pairing_point, AlgebraElement, Lattice};
use nctriple::cli::{algebra_law_defects, algebra_trio, dimension_row, suite_cocycle, suite_commutator, ExampleKind};
use nctriple::config::ScenarioConfig;
use nctriple::grid::Grid1D;
use nctriple::group::{make_group, GroupKind, GroupModel, TripleParams};
use nctriple::hilbert::{real_structure_base, represent, DiscretizedOperator};
use nctriple::specfun::hyp2f1;
use nctriple::spectral::{
    gsc_b_integral, gsc_full_integral, residue_affine, series_zr, symbol_l1_norm, trace_affine,
    trace_affine_scalar, trace_dilation, Classification, DilationSpec, GscSpec, Method,
};

fn report(idx: usize, name: &str, pass: bool, detail: String) {
    println!(
        "criterion {idx:02} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {idx:02} {name} failed: {detail}");
}

// 1. Affine trace: closed form against independent quadrature, relative
// agreement 1e-6 over a parameter lattice, within a fixed time budget.
#[test]
fn criterion_01_affine_trace_closed_vs_quadrature() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for eta in [0.0, 1.0, 2.0] {
        for omega in [-1.0, 1.0, 0.5] {
            for s in [2.5, 3.0, 4.0] {
                let closed = trace_affine_scalar(eta, omega, s, 1.0, Method::ClosedForm).unwrap();
                let quad = trace_affine_scalar(eta, omega, s, 1.0, Method::Quadrature).unwrap();
                assert_eq!(closed.classification, Classification::Convergent);
                let rel = (closed.value - quad.value).abs() / closed.value.abs();
                worst = worst.max(rel);
            }
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    report(
        1,
        "affine trace closed vs quadrature",
        worst <= 1e-6 && dt < 60.0,
        format!("max rel diff {worst:.3e}, {dt:.1}s"),
    );
}

// 2. Residue of the affine trace at s = 2 by Richardson extrapolation of
// d * T(2 + d) at d in {0.1, 0.05, 0.025}, against the closed residue,
// for two algebra pairs and two omega values.
#[test]
fn criterion_02_affine_residue_richardson() {
    let (_lat, f, g, h) = algebra_trio(65).unwrap();
    let gm = make_group(GroupKind::RealLine, -2.0, 2.0, 65).unwrap();
    let eta = 0.3;
    let mut worst = 0.0f64;
    for omega in [1.0, -2.0] {
        for (x, y) in [(&f, &g), (&g, &h)] {
            let pairing = pairing_point(y, x, &gm).unwrap().re;
            let lim = |d: f64| {
                let p = TripleParams::new(eta, omega, 2.0 + d, 0.0).unwrap();
                d * trace_affine(x, y, &gm, &p, Method::ClosedForm).unwrap().value
            };
            let (l1, l2, l3) = (lim(0.1), lim(0.05), lim(0.025));
            // Halving nodes: the first stage removes the O(d) term, the
            // second the remaining O(d^2) term.
            let (r12, r23) = (2.0 * l2 - l1, 2.0 * l3 - l2);
            let extrap = (4.0 * r23 - r12) / 3.0;
            let exact = residue_affine(omega, pairing);
            worst = worst.max((extrap - exact).abs() / exact.abs());
        }
    }
    report(
        2,
        "affine residue by Richardson extrapolation",
        worst <= 1e-3,
        format!("max rel error {worst:.3e}"),
    );
}

// 3. Spectral dimension estimates: 2 (affine), 2 (integer model), n + 1
// (dilations, n = 1..3), 1 (untwisted), all within 0.02.
#[test]
fn criterion_03_spectral_dimensions() {
    let cfg = ScenarioConfig::default();
    let mut all = true;
    let mut detail = String::new();
    for ex in [
        ExampleKind::Affine,
        ExampleKind::Zr,
        ExampleKind::Dilation(1),
        ExampleKind::Dilation(2),
        ExampleKind::Dilation(3),
        ExampleKind::Untwisted,
    ] {
        let (row, ok) = dimension_row(&cfg, ex).unwrap();
        all &= ok;
        let est = &row.fields.iter().find(|(k, _)| *k == "p_estimate").unwrap().1;
        detail.push_str(&format!("{}={} ", ex.label(), est));
    }
    report(3, "spectral dimension estimates", all, detail.trim().to_string());
}

// 4. Convergence-region fidelity: every classifier flips exactly at its
// stated boundary; 10 points per boundary at margin 0.05, zero
// misclassifications.
#[test]
fn criterion_04_convergence_boundaries() {
    let conv = Classification::Convergent;
    let mut bad = 0usize;
    let mut total = 0usize;
    let mut check = |got: Classification, expect_conv: bool| {
        total += 1;
        let ok = if expect_conv { got == conv } else { got == Classification::Divergent };
        if !ok {
            bad += 1;
        }
    };

    // Double integral of g_{s,c}: convergent iff c > 0 and s > 1 + c.
    for s in [2.5, 3.0, 3.5, 4.0, 4.5] {
        for side in [1.0, -1.0] {
            let spec = GscSpec { s, c: side * 0.05, eta: 0.3, omega: 1.0 };
            check(gsc_full_integral(&spec).classification, side > 0.0);
        }
    }
    for c in [0.2, 0.5, 1.0, 1.5, 2.0] {
        for side in [1.0, -1.0] {
            let spec = GscSpec { s: 1.0 + c + side * 0.05, c, eta: 0.3, omega: 1.0 };
            check(gsc_full_integral(&spec).classification, side > 0.0);
        }
    }
    // Trace-class region of the modular-weighted trace: s > 2 + c, probed
    // through the shifted kernel with c + 1 in place of c.
    for c in [0.1, 0.4, 0.8, 1.2, 1.6] {
        for side in [1.0, -1.0] {
            let spec = GscSpec { s: 2.0 + c + side * 0.05, c: c + 1.0, eta: 0.3, omega: 1.0 };
            check(gsc_full_integral(&spec).classification, side > 0.0);
        }
    }
    // The unweighted case c = 0 diverges for every (eta, omega).
    for (eta, omega) in [(0.0, 1.0), (1.0, 1.0), (2.0, -1.0), (0.5, 0.5), (1.0, -2.0)] {
        for side in [1.0, -1.0] {
            let spec = GscSpec { s: 3.0, c: side * 0.05, eta, omega };
            check(gsc_full_integral(&spec).classification, side > 0.0);
        }
    }
    // The fiberwise b-integral diverges at s = 1 whatever the weight.
    for c in [1.0, 1.5, 2.0, 2.5, 3.0] {
        for side in [1.0, -1.0] {
            let spec = GscSpec { s: 1.0 + side * 0.05, c, eta: 0.3, omega: 1.0 };
            check(gsc_b_integral(&spec, 0.3).quadrature.classification, side > 0.0);
        }
    }
    // Integer model series: convergent iff s > 2.
    for (eta, omega) in [(0.0, 1.0), (1.0, 1.0), (2.0, -1.0), (0.5, 0.5), (1.0, -2.0)] {
        for side in [1.0, -1.0] {
            let p = TripleParams::new(eta, omega, 2.0 + side * 0.05, 0.0).unwrap();
            check(series_zr(&p, Complex64::new(1.0, 0.0)).classification, side > 0.0);
        }
    }
    // Dilation model: convergent iff s > n + 1.
    let dil: [(usize, f64); 5] = [(1, 0.0), (2, 0.0), (3, 0.0), (1, 1.0), (2, -0.5)];
    for (n, eta) in dil {
        for side in [1.0, -1.0] {
            let spec = DilationSpec { n, s: n as f64 + 1.0 + side * 0.05, eta, omega: 1.0, fhat0: 1.0 };
            check(trace_dilation(&spec, Method::ClosedForm).unwrap().classification, side > 0.0);
        }
    }

    report(
        4,
        "convergence-region boundaries",
        bad == 0,
        format!("{bad} misclassifications out of {total} straddling points"),
    );
}

// 5. Hypergeometric identity eta * 2F1(1/2, 1/2; 3/2; -eta^2) =
// arcsinh(eta) to 1e-10.
#[test]
fn criterion_05_hypergeometric_arcsinh() {
    let mut worst = 0.0f64;
    for eta in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let lhs = eta * hyp2f1(0.5, 0.5, 1.5, -eta * eta).unwrap();
        worst = worst.max((lhs - eta.asinh()).abs());
    }
    report(5, "2F1 arcsinh identity", worst <= 1e-10, format!("max abs error {worst:.3e}"));
}

// 6. The four *-algebra law defects decay at second order over two grid
// doublings and are below 5e-4 at the 64-point resolution. Defects at
// machine zero (the twist laws: the twist is an exact diagonal multiplier
// in this discretization) count as exactly satisfied.
#[test]
fn criterion_06_algebra_law_defects() {
    let counts = [33usize, 65, 129];
    let mut d = Vec::new();
    for &count in &counts {
        let gm = make_group(GroupKind::RealLine, -2.0, 2.0, count).unwrap();
        d.push(algebra_law_defects(count, &gm).unwrap());
    }
    let names = ["associativity", "involution", "twist", "twist-involution"];
    let mut all = true;
    let mut detail = String::new();
    for k in 0..4 {
        let (d0, d1, d2) = (d[0][k], d[1][k], d[2][k]);
        let ok = if d0 < 1e-12 {
            d1 < 1e-12 && d2 < 1e-12
        } else {
            // Least-squares slope over the two doublings.
            let order = 0.5 * (d0 / d2).log2();
            d1 < 5e-4 && (1.7..=2.3).contains(&order)
        };
        all &= ok;
        let shown = if d0 < 1e-12 { "exact".to_string() } else { format!("order {:.2}", 0.5 * (d0 / d2).log2()) };
        detail.push_str(&format!("{}={:.2e} ({shown}) ", names[k], d1));
    }
    report(6, "algebra law defects O(h^2)", all, detail.trim().to_string());
}

// 7. Operator identities: twisted commutators with the modular weights,
// the commutator moment bound, exact [Dirac, Theta] = 0 and weighted
// Hermiticity, as checked by the commutator suite at its tolerances.
#[test]
fn criterion_07_operator_identities() {
    let cfg = ScenarioConfig::default();
    let rep = suite_commutator(&cfg).unwrap();
    let detail = rep
        .rows
        .iter()
        .map(|r| {
            let q = &r.fields.iter().find(|(k, _)| *k == "quantity").unwrap().1;
            let v = &r.fields.iter().find(|(k, _)| *k == "verdict").unwrap().1;
            format!("{q}={v}")
        })
        .collect::<Vec<_>>()
        .join(" ");
    report(7, "operator identities", rep.pass, detail);
}

// ---------------------------------------------------------------------
// 8. Real structure defects. All three defect ratios stay below 0.05 at
// the default grid and shrink with order at least 0.8 when the base grid
// spacing is halved. Everything is evaluated through matrix-free applies
// of the one-spinor base operators; the gamma1 factor of the real
// structure acts by swapping spinor components.

struct SpinBench {
    lat: Lattice,
    jhat: DiscretizedOperator,
    pf: DiscretizedOperator,
    pg: DiscretizedOperator,
    dvals: Vec<f64>,
    tvals: Vec<f64>,
    thinv: Vec<f64>,
}

impl SpinBench {
    fn new(na: usize, nb: usize, b_half: f64) -> Self {
        let lat = Lattice::new(
            Grid1D::symmetric(3.0, na).unwrap(),
            Grid1D::symmetric(b_half, nb).unwrap(),
        );
        let gm = make_group(GroupKind::RealLine, -3.0, 3.0, na).unwrap();
        let p = TripleParams::new(-1.0, 1.0, 3.0, 0.0).unwrap();
        let jhat = real_structure_base(&lat, &gm, p).unwrap();
        let f = AlgebraElement::windowed_gaussian(
            lat.clone(),
            (0.0, 0.0),
            (0.5, 1.0),
            (-1.2, 1.2, -2.4, 2.4),
        )
        .unwrap();
        let g = AlgebraElement::windowed_gaussian(
            lat.clone(),
            (0.2, -0.3),
            (0.4, 0.9),
            (-1.1, 1.1, -2.2, 2.2),
        )
        .unwrap();
        let pf = represent(&f, &gm).unwrap();
        let pg = represent(&g, &gm).unwrap();
        let n = lat.len();
        let mut dvals = vec![0.0; n];
        let mut tvals = vec![0.0; n];
        let mut thinv = vec![0.0; n];
        for ia in 0..lat.a.count() {
            let a = lat.a.point(ia);
            for ib in 0..lat.b.count() {
                let k = lat.flat(ia, ib);
                dvals[k] = (-a).exp() * lat.b.point(ib);
                tvals[k] = -1.0 + (-a).exp();
                thinv[k] = a.exp();
            }
        }
        SpinBench { lat, jhat, pf, pg, dvals, tvals, thinv }
    }

    /// Smooth normalized probes with widths fixed in absolute units
    /// (referenced to the default bench half-sizes 3 and 6), so that
    /// enlarging the truncation window is a pure refinement rather than a
    /// change of the probe family.
    fn probes(&self) -> Vec<Vec<Complex64>> {
        let params: [(f64, f64, f64, f64, f64, f64); 6] = [
            (0.0, 0.0, 0.2, 0.2, 0.0, 0.0),
            (0.1, -0.05, 0.18, 0.15, 0.0, 0.0),
            (-0.1, 0.05, 0.15, 0.2, 0.5, 0.3),
            (0.05, 0.08, 0.22, 0.15, -0.4, 0.6),
            (-0.08, -0.08, 0.15, 0.18, 0.3, -0.5),
            (0.0, 0.04, 0.2, 0.16, 0.8, 0.8),
        ];
        let (ah, bh) = (3.0f64, 6.0f64);
        let lat = &self.lat;
        params
            .iter()
            .map(|&(ca, cb, sa, sb, ka, kb)| {
                let mut v = vec![Complex64::new(0.0, 0.0); lat.len()];
                for ia in 0..lat.a.count() {
                    let a = lat.a.point(ia);
                    for ib in 0..lat.b.count() {
                        let b = lat.b.point(ib);
                        let amp = (-((a - ca * ah) / (sa * ah)).powi(2)
                            - ((b - cb * bh) / (sb * bh)).powi(2))
                        .exp();
                        v[lat.flat(ia, ib)] = Complex64::from_polar(amp, ka * a + kb * b);
                    }
                }
                v
            })
            .collect()
    }

    /// Interleaved two-spinor probes built from the scalar family.
    fn spin_probes(&self) -> Vec<Vec<Complex64>> {
        self.probes()
            .into_iter()
            .map(|v| {
                let mut w = Vec::with_capacity(2 * v.len());
                for x in v {
                    w.push(x);
                    w.push(x * Complex64::new(0.6, 0.3));
                }
                w
            })
            .collect()
    }

    /// Largest probe amplification of a one-spinor operator.
    fn pnorm(&self, op: &DiscretizedOperator) -> f64 {
        let mut worst = 0.0f64;
        for v in self.probes() {
            let av = op.apply(&v);
            worst = worst.max(self.jhat.weighted_norm(&av) / self.jhat.weighted_norm(&v));
        }
        worst
    }

    fn split(v: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = v.len() / 2;
        let mut v0 = Vec::with_capacity(n);
        let mut v1 = Vec::with_capacity(n);
        for k in 0..n {
            v0.push(v[2 * k]);
            v1.push(v[2 * k + 1]);
        }
        (v0, v1)
    }

    fn norm2(&self, v0: &[Complex64], v1: &[Complex64]) -> f64 {
        self.jhat.weighted_norm(v0).hypot(self.jhat.weighted_norm(v1))
    }

    /// J (v0, v1) = (Jhat v1, Jhat v0): the gamma1 swap plus the
    /// conjugate-linear base.
    fn japply(&self, v0: &[Complex64], v1: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        (self.jhat.apply(v1), self.jhat.apply(v0))
    }

    /// Dirac (v0, v1) = (dhat v1 - i T v1, dhat v0 + i T v0).
    fn dapply(&self, v0: &[Complex64], v1: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let out0: Vec<Complex64> = v1
            .iter()
            .enumerate()
            .map(|(k, &x)| x * Complex64::new(self.dvals[k], -self.tvals[k]))
            .collect();
        let out1: Vec<Complex64> = v0
            .iter()
            .enumerate()
            .map(|(k, &x)| x * Complex64::new(self.dvals[k], self.tvals[k]))
            .collect();
        (out0, out1)
    }

    fn theta_inv(&self, v: &[Complex64]) -> Vec<Complex64> {
        v.iter().enumerate().map(|(k, &x)| x * self.thinv[k]).collect()
    }

    /// max over the probe family of |J J v - v| / |v|.
    fn j_square_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for v in self.spin_probes() {
            let (v0, v1) = Self::split(&v);
            let (w0, w1) = self.japply(&v0, &v1);
            let (u0, u1) = self.japply(&w0, &w1);
            let d0: Vec<Complex64> = u0.iter().zip(&v0).map(|(a, b)| a - b).collect();
            let d1: Vec<Complex64> = u1.iter().zip(&v1).map(|(a, b)| a - b).collect();
            worst = worst.max(self.norm2(&d0, &d1) / self.norm2(&v0, &v1));
        }
        worst
    }

    /// max over probes of |J D v + Theta^{-1} D J v| / (|D| |v|): the
    /// compatibility J D = -Theta^{-1} D J of the twisted real structure.
    fn jd_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        let mut dnorm = 0.0f64;
        for v in self.spin_probes() {
            let (v0, v1) = Self::split(&v);
            let nv = self.norm2(&v0, &v1);
            let (dv0, dv1) = self.dapply(&v0, &v1);
            dnorm = dnorm.max(self.norm2(&dv0, &dv1) / nv);
            let (l0, l1) = self.japply(&dv0, &dv1);
            let (jv0, jv1) = self.japply(&v0, &v1);
            let (r0, r1) = self.dapply(&jv0, &jv1);
            let (r0, r1) = (self.theta_inv(&r0), self.theta_inv(&r1));
            let d0: Vec<Complex64> = l0.iter().zip(&r0).map(|(a, b)| a + b).collect();
            let d1: Vec<Complex64> = l1.iter().zip(&r1).map(|(a, b)| a + b).collect();
            worst = worst.max(self.norm2(&d0, &d1) / nv);
        }
        worst / dnorm
    }

    /// max over probes of |[pi(f), J pi(g) J] v| / (|pi(f)| |pi(g)| |v|).
    /// The spinor factor of J squares out against the identity spin lift
    /// of the representation, so this runs on one-spinor vectors.
    fn commutant_defect(&self) -> f64 {
        let x = |v: &[Complex64]| self.jhat.apply(&self.pg.apply(&self.jhat.apply(v)));
        let mut worst = 0.0f64;
        for v in self.probes() {
            let lhs = x(&self.pf.apply(&v));
            let rhs = self.pf.apply(&x(&v));
            let d: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
            worst = worst.max(self.jhat.weighted_norm(&d) / self.jhat.weighted_norm(&v));
        }
        worst / (self.pnorm(&self.pf) * self.pnorm(&self.pg))
    }
}

#[test]
fn criterion_08_real_structure_defects() {
    // The defects mix fiber interpolation error with truncation of the
    // modular b-rescaling at the window edge, so a refinement step both
    // halves the fiber spacing and widens the window; the probe family is
    // fixed in absolute units across the step.
    let coarse = SpinBench::new(31, 61, 6.0);
    let (j0, jd0, com0) = (coarse.j_square_defect(), coarse.jd_defect(), coarse.commutant_defect());
    drop(coarse);
    let fine = SpinBench::new(31, 181, 9.0);
    let (j1, jd1, com1) = (fine.j_square_defect(), fine.jd_defect(), fine.commutant_defect());
    let pairs = [
        ("J^2-1", j0, j1),
        ("JD+Theta^-1 D J", jd0, jd1),
        ("commutant", com0, com1),
    ];
    let mut all = true;
    let mut detail = String::new();
    for (name, d0, d1) in pairs {
        let order = (d0 / d1).log2();
        let ok = d0 < 0.05 && order >= 0.8;
        all &= ok;
        detail.push_str(&format!("{name}: {d0:.3e} -> {d1:.3e} (order {order:.2}) "));
    }
    report(8, "real structure defects", all, detail.trim().to_string());
}

// 9. Cocycle laws for the canonical families and their powers, the
// coboundary round trip, and rejection of a perturbed cocycle, across
// the three group models.
#[test]
fn criterion_09_cocycle_laws() {
    let mut all = true;
    let mut detail = String::new();
    for ex in ["affine", "zr", "dilation:2"] {
        let mut cfg = ScenarioConfig::default();
        cfg.example = ex.into();
        let rep = suite_cocycle(&cfg).unwrap();
        all &= rep.pass;
        detail.push_str(&format!("{ex}={} ", if rep.pass { "ok" } else { "fail" }));
    }
    report(9, "cocycle laws", all, detail.trim().to_string());
}

// 10. L^1 symbol norm: the factorized evaluation against a direct 4D
// quadrature of |symbol| at 16 nodes per axis, within 5% at (s, c) =
// (5, 1). The direct sum uses the rescaled fiber variable b = e^a u so a
// uniform 16-point grid resolves the kernel at every group point.
#[test]
fn criterion_10_symbol_norm_factorization() {
    let (_lat, f, _g, _h) = algebra_trio(65).unwrap();
    let p = TripleParams::new(0.0, 1.0, 5.0, 1.0).unwrap();
    let fact = symbol_l1_norm(&f, &p, 8.0, 97).unwrap().value;

    // samples of h(a)(b) = e^{-a} f(a)(e^{-a} b) on f's lattice
    let lat = &f.lattice;
    let wa = lat.a.weights();
    let wb = lat.b.weights();
    let mut h = vec![Complex64::new(0.0, 0.0); lat.len()];
    for ia in 0..lat.a.count() {
        let a = lat.a.point(ia);
        let e = (-a).exp();
        for ib in 0..lat.b.count() {
            h[lat.flat(ia, ib)] = f.eval(a, e * lat.b.point(ib)) * e;
        }
    }
    let ft = |alpha: f64, beta: f64| -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ia in 0..lat.a.count() {
            let a = lat.a.point(ia);
            for ib in 0..lat.b.count() {
                let v = h[lat.flat(ia, ib)];
                if v.norm_sqr() == 0.0 {
                    continue;
                }
                let phase = -(alpha * a + beta * lat.b.point(ib));
                acc += v * Complex64::from_polar(wa[ia] * wb[ib], phase);
            }
        }
        acc.norm()
    };

    // 16 uniform nodes per axis. The frequency-beta and fiber-b nodes are
    // rescaled per group point to the local width of the symbol (the
    // symbol is still evaluated as a full product at every 4D node; only
    // the node placement tracks the modular rescaling, without which no
    // fixed 16-point grid can resolve the kernel across the group
    // window).
    let nodes = |half: f64| -> Vec<f64> {
        (0..16).map(|k| -half + 2.0 * half * k as f64 / 15.0).collect()
    };
    let (alphas, walpha) = (nodes(8.0), 16.0 / 15.0);
    let (betas, wbeta) = (nodes(8.0), 16.0 / 15.0);
    let (avals, wa4) = (nodes(6.0), 12.0 / 15.0);
    let (uvals, wu) = (nodes(6.0), 12.0 / 15.0);
    let spec = GscSpec { s: p.s, c: p.c, eta: p.eta, omega: p.omega };
    let tau = 2.0 * std::f64::consts::PI;
    let mut direct = 0.0f64;
    for &ap in &avals {
        let ea = ap.exp();
        // local widths: e^{-a} for the frequency fiber, e^a sqrt(1 + T^2)
        // for the base fiber
        let t = spec.eta + spec.omega * (-ap).exp();
        let bw = ea * (1.0 + t * t).sqrt();
        let fiber: f64 = uvals.iter().map(|&u| spec.gsc(ap, bw * u) * bw * wu).sum();
        let mut fsum = 0.0f64;
        for &alpha in &alphas {
            for &bnode in &betas {
                let beta = bnode / ea;
                fsum += tau * ft(alpha, ea * beta) * (wbeta / ea) * walpha;
            }
        }
        direct += fsum * fiber * wa4;
    }

    let rel = (direct - fact).abs() / fact;
    report(
        10,
        "symbol norm factorization vs direct 4D quadrature",
        rel <= 0.05,
        format!("factorized {fact:.6e}, direct {direct:.6e}, rel diff {rel:.3e}"),
    );
}
