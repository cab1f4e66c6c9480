//! Randomized invariants: structural laws that must hold for arbitrary
//! inputs, checked with proptest-generated data.

use num_complex::Complex64;
use proptest::prelude::*;

use nctriple::algebra::{beta_z, from_csv, involution, to_csv, AlgebraElement, Lattice};
use nctriple::cocycle::{coboundary_fit, cocycle_law_residual, Cocycle};
use nctriple::grid::Grid1D;
use nctriple::group::{make_group, GroupKind};
use nctriple::quad::{integrate_adaptive, integrate_real_line};
use nctriple::spectral::{gsc_full_integral, Classification, GscSpec};

fn small_element(amp: f64, ca: f64, cb: f64) -> AlgebraElement {
    let lat = Lattice::new(
        Grid1D::symmetric(1.5, 17).unwrap(),
        Grid1D::symmetric(3.0, 17).unwrap(),
    );
    AlgebraElement::from_fn(lat, (-1.2, 1.2, -2.4, 2.4), move |a, b| {
        Complex64::new(
            amp * (-((a - ca) * 2.0).powi(2) - ((b - cb) * 1.5).powi(2)).exp(),
            0.3 * amp * (-(a * a + b * b)).exp(),
        )
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // A cocycle planted as the coboundary of a smooth positive witness is
    // recovered by the fit with a small residual.
    #[test]
    fn planted_coboundary_roundtrip(
        c1 in 0.1f64..2.0,
        c2 in -1.0f64..1.0,
        w in 0.5f64..2.0,
    ) {
        let base = Grid1D::symmetric(4.0, 161).unwrap();
        let witness: Vec<f64> = base
            .points()
            .map(|x| 1.0 + c1 * (-(x - c2) * (x - c2) / (w * w)).exp())
            .collect();
        let planted = Cocycle::from_coboundary(base, &witness).unwrap();
        let fit = coboundary_fit(&planted, &[-1.0, -0.5, 0.5, 1.0]).unwrap();
        let res = fit.expect("planted coboundary must be recovered").residual;
        prop_assert!(res < 1e-8, "residual {res}");
    }

    // Exponential cocycles satisfy the multiplicative law to rounding;
    // this is the defining identity of the canonical family.
    #[test]
    fn exponential_cocycle_law(rate in -2.0f64..2.0) {
        let c = Cocycle::scalar_real(move |r| (-rate * r).exp());
        let pairs = [(0.5, 0.25), (-1.0, 0.5), (1.5, -2.0), (0.0, 0.7), (2.0, 1.5)];
        let res = cocycle_law_residual(&c, (-8.0, 8.0), &pairs).unwrap();
        prop_assert!(res < 1e-10, "residual {res}");
    }

    // CSV serialization round-trips algebra elements bit-for-bit on the
    // sampled values.
    #[test]
    fn csv_roundtrip(amp in 0.1f64..3.0, ca in -0.5f64..0.5, cb in -0.8f64..0.8) {
        let f = small_element(amp, ca, cb);
        let mut buf = Vec::new();
        to_csv(&f, &mut buf).unwrap();
        let g = from_csv(&mut std::io::BufReader::new(buf.as_slice())).unwrap();
        prop_assert_eq!(f.values.len(), g.values.len());
        for (x, y) in f.values.iter().zip(g.values.iter()) {
            prop_assert!((x - y).norm() <= 1e-12 * (1.0 + x.norm()));
        }
    }

    // The modular twist is a group action in the twist parameter:
    // beta_z then beta_{-z} is the identity, and the twist commutes with
    // the involution up to the sign flip of z.
    #[test]
    fn twist_inverse_and_involution(
        amp in 0.1f64..2.0,
        zr in -1.0f64..1.0,
        zi in -1.0f64..1.0,
    ) {
        let f = small_element(amp, 0.0, 0.3);
        let z = Complex64::new(zr, zi);
        let back = beta_z(&beta_z(&f, z), -z);
        for (x, y) in back.values.iter().zip(f.values.iter()) {
            prop_assert!((x - y).norm() <= 1e-10 * (1.0 + y.norm()));
        }
        let gm = make_group(GroupKind::RealLine, -1.5, 1.5, 17).unwrap();
        let lhs = involution(&beta_z(&f, z), &gm);
        let rhs = beta_z(&involution(&f, &gm), -z.conj());
        for (x, y) in lhs.values.iter().zip(rhs.values.iter()) {
            prop_assert!((x - y).norm() <= 1e-10 * (1.0 + y.norm()));
        }
    }

    // The involution is involutive. The b-samples go through two rounds
    // of interpolation at the modular rescaling, so this needs a b-grid
    // finer than the element's features and a narrow group window.
    #[test]
    fn involution_squares_to_identity(amp in 0.1f64..2.0, cb in -0.3f64..0.3) {
        let lat = Lattice::new(
            Grid1D::symmetric(0.8, 17).unwrap(),
            Grid1D::symmetric(4.0, 65).unwrap(),
        );
        let f = AlgebraElement::from_fn(lat, (-0.6, 0.6, -1.4, 1.4), move |a, b| {
            Complex64::new(amp * (-(a * 2.0).powi(2) - ((b - cb) * 1.5).powi(2)).exp(), 0.0)
        })
        .unwrap();
        let gm = make_group(GroupKind::RealLine, -0.8, 0.8, 17).unwrap();
        let ff = involution(&involution(&f, &gm), &gm);
        let mut worst = 0.0f64;
        for (x, y) in ff.values.iter().zip(f.values.iter()) {
            worst = worst.max((x - y).norm());
        }
        prop_assert!(worst <= 2e-2 * amp, "worst {worst}");
    }

    // Whole-line quadrature reproduces scaled Gaussian integrals.
    #[test]
    fn gaussian_integral(amp in 0.1f64..5.0, width in 0.2f64..4.0, shift in -3.0f64..3.0) {
        let got = integrate_real_line(
            &|x| amp * (-((x - shift) / width).powi(2)).exp(),
            1e-12,
        )
        .value;
        let exact = amp * width * std::f64::consts::PI.sqrt();
        prop_assert!((got - exact).abs() <= 1e-9 * exact, "got {got}, exact {exact}");
    }

    // Adaptive quadrature is additive over subdivision points.
    #[test]
    fn quadrature_additivity(split in -0.9f64..0.9) {
        let f = |x: f64| (x * 3.0).sin() * (-x * x).exp() + 0.2 * x;
        let whole = integrate_adaptive(&f, -1.0, 1.0, 1e-12).value;
        let parts = integrate_adaptive(&f, -1.0, split, 1e-12).value
            + integrate_adaptive(&f, split, 1.0, 1e-12).value;
        prop_assert!((whole - parts).abs() <= 1e-10);
    }

    // The convergence classifier agrees with the analytic region
    // c > 0 and s > 1 + c away from the boundaries.
    #[test]
    fn classifier_matches_region(
        s in 1.2f64..5.0,
        c in -1.0f64..2.0,
        eta in -2.0f64..2.0,
        omega in prop::sample::select(vec![-2.0, -0.7, 0.6, 1.0, 1.8]),
    ) {
        prop_assume!((c.abs() - 0.0).abs() > 0.05);
        prop_assume!((s - 1.0 - c).abs() > 0.05);
        let spec = GscSpec { s, c, eta, omega };
        let got = gsc_full_integral(&spec).classification;
        let expect = if c > 0.0 && s > 1.0 + c {
            Classification::Convergent
        } else {
            Classification::Divergent
        };
        prop_assert_eq!(got, expect, "s={} c={} eta={} omega={}", s, c, eta, omega);
    }
}
