//! Compactly supported kernels on (group coordinate) x (base coordinate)
//! with the twisted convolution product, involution, modular twist, and
//! the seminorms and weight pairings built on them.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::group::GroupModel;

/// Product lattice carrying the kernels: `a` for the group direction, `b`
/// for the base direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub a: Grid1D,
    pub b: Grid1D,
}

impl Lattice {
    pub fn new(a: Grid1D, b: Grid1D) -> Self {
        Lattice { a, b }
    }

    pub fn len(&self) -> usize {
        self.a.count() * self.b.count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn flat(&self, ia: usize, ib: usize) -> usize {
        ia * self.b.count() + ib
    }
}

/// Inclusive index bounds of the support box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportBox {
    pub ia: (usize, usize),
    pub ib: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct AlgebraElement {
    pub lattice: Lattice,
    pub values: Array2<Complex64>,
    pub support: SupportBox,
    /// Set when a product ran outside the lattice window and part of the
    /// result was dropped.
    pub truncated: bool,
    /// Set when a modular twist clamped an exponential overflow.
    pub overflow: bool,
}

impl AlgebraElement {
    /// Sample a kernel on the lattice, hard-zeroed outside the stated
    /// coordinate box `(a0, a1, b0, b1)`.
    pub fn from_fn(
        lattice: Lattice,
        bbox: (f64, f64, f64, f64),
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let (a0, a1, b0, b1) = bbox;
        if !(a0 < a1 && b0 < b1) {
            return Err(Error::Config("support box must have positive extent".into()));
        }
        let (na, nb) = (lattice.a.count(), lattice.b.count());
        let mut values = Array2::zeros((na, nb));
        for ia in 0..na {
            let a = lattice.a.point(ia);
            if a < a0 || a > a1 {
                continue;
            }
            for ib in 0..nb {
                let b = lattice.b.point(ib);
                if b < b0 || b > b1 {
                    continue;
                }
                values[[ia, ib]] = f(a, b);
            }
        }
        let mut el = AlgebraElement {
            lattice,
            values,
            support: SupportBox { ia: (0, na - 1), ib: (0, nb - 1) },
            truncated: false,
            overflow: false,
        };
        el.recompute_support();
        Ok(el)
    }

    /// Gaussian bump times a C^2 window that rises and falls over 15% of
    /// the stated box; the standard smooth test element.
    pub fn windowed_gaussian(
        lattice: Lattice,
        center: (f64, f64),
        width: (f64, f64),
        bbox: (f64, f64, f64, f64),
    ) -> Result<Self> {
        let (ca, cb) = center;
        let (sa, sb) = width;
        let (a0, a1, b0, b1) = bbox;
        Self::from_fn(lattice, bbox, move |a, b| {
            let g = (-((a - ca) / sa).powi(2) - ((b - cb) / sb).powi(2)).exp();
            let w = window(a, a0, a1) * window(b, b0, b1);
            Complex64::new(g * w, 0.0)
        })
    }

    pub fn recompute_support(&mut self) {
        let (na, nb) = (self.lattice.a.count(), self.lattice.b.count());
        let (mut ia0, mut ia1, mut ib0, mut ib1) = (na, 0usize, nb, 0usize);
        for ia in 0..na {
            for ib in 0..nb {
                if self.values[[ia, ib]].norm() > 0.0 {
                    ia0 = ia0.min(ia);
                    ia1 = ia1.max(ia);
                    ib0 = ib0.min(ib);
                    ib1 = ib1.max(ib);
                }
            }
        }
        if ia0 > ia1 {
            // identically zero element
            self.support = SupportBox { ia: (0, 0), ib: (0, 0) };
        } else {
            self.support = SupportBox { ia: (ia0, ia1), ib: (ib0, ib1) };
        }
    }

    /// Bilinear interpolation of the kernel, zero outside the lattice.
    pub fn eval(&self, a: f64, b: f64) -> Complex64 {
        let (sa, sb) = match (self.lattice.a.interp_stencil(a), self.lattice.b.interp_stencil(b)) {
            (Some(sa), Some(sb)) => (sa, sb),
            _ => return Complex64::new(0.0, 0.0),
        };
        let (ia, ta) = sa;
        let (ib, tb) = sb;
        let v00 = self.values[[ia, ib]];
        let v01 = self.values[[ia, ib + 1]];
        let v10 = self.values[[ia + 1, ib]];
        let v11 = self.values[[ia + 1, ib + 1]];
        v00 * ((1.0 - ta) * (1.0 - tb))
            + v01 * ((1.0 - ta) * tb)
            + v10 * (ta * (1.0 - tb))
            + v11 * (ta * tb)
    }

    /// Coordinate bounds of the current support box.
    pub fn support_bounds(&self) -> (f64, f64, f64, f64) {
        (
            self.lattice.a.point(self.support.ia.0),
            self.lattice.a.point(self.support.ia.1),
            self.lattice.b.point(self.support.ib.0),
            self.lattice.b.point(self.support.ib.1),
        )
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        if self.lattice != other.lattice {
            return Err(Error::Shape("elements live on different lattices".into()));
        }
        let mut out = self.clone();
        out.values = &self.values - &other.values;
        out.truncated |= other.truncated;
        out.overflow |= other.overflow;
        out.recompute_support();
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// C^2 window over [lo, hi] with smooth rise and fall over 15% margins.
/// C^2 smoothstep window, identically 1 away from a 15% margin at each
/// end of [lo, hi] and 0 outside.
pub fn window(x: f64, lo: f64, hi: f64) -> f64 {
    let m = 0.15 * (hi - lo);
    let ramp = |t: f64| {
        let t = t.clamp(0.0, 1.0);
        t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    };
    if x <= lo || x >= hi {
        0.0
    } else {
        ramp((x - lo) / m) * ramp((hi - x) / m)
    }
}

/// Twisted convolution:
/// (f * g)(a)(b) = sum over (a', b') of e^{a'} f(a')(b') g(a - a')(e^{a'}(b - b')),
/// with the group weight taken from the model's Haar measure. Sets the
/// truncation flag when the support sum leaves the lattice window.
pub fn star_alpha(f: &AlgebraElement, g: &AlgebraElement, gm: &GroupModel) -> Result<AlgebraElement> {
    if f.lattice != g.lattice {
        return Err(Error::Shape("star product needs a common lattice".into()));
    }
    let lat = &f.lattice;
    let wa = crate::group::haar_weights(gm);
    if wa.len() != lat.a.count() {
        return Err(Error::Shape(format!(
            "group model has {} points, lattice has {}",
            wa.len(),
            lat.a.count()
        )));
    }
    let wb = lat.b.weights();
    let (na, nb) = (lat.a.count(), lat.b.count());
    let apts: Vec<f64> = lat.a.points().collect();
    let bpts: Vec<f64> = lat.b.points().collect();

    // truncation check on the a-support sum and the induced b-range
    let (fa0, fa1, fb0, fb1) = f.support_bounds();
    let (ga0, ga1, gb0, gb1) = g.support_bounds();
    let mut truncated = fa0 + ga0 < lat.a.lo() - 1e-12 || fa1 + ga1 > lat.a.hi() + 1e-12;
    for &ak in &[fa0, fa1] {
        let scale = (-ak).exp();
        for &gb in &[gb0, gb1] {
            for &fb in &[fb0, fb1] {
                let b = fb + scale * gb;
                if b < lat.b.lo() - 1e-12 || b > lat.b.hi() + 1e-12 {
                    truncated = true;
                }
            }
        }
    }

    let sup = f.support;
    let rows: Vec<Vec<Complex64>> = (0..na)
        .into_par_iter()
        .map(|ia| {
            let a = apts[ia];
            let mut row = vec![Complex64::new(0.0, 0.0); nb];
            for ka in sup.ia.0..=sup.ia.1 {
                let ap = apts[ka];
                let scale = ap.exp();
                let wmod = wa[ka] / gm.nu(ap);
                let a_rem = a - ap;
                if !lat.a.contains(a_rem) {
                    continue;
                }
                for kb in sup.ib.0..=sup.ib.1 {
                    let fv = f.values[[ka, kb]];
                    if fv.norm() == 0.0 {
                        continue;
                    }
                    let coef = fv * (wmod * wb[kb]);
                    let bp = bpts[kb];
                    for (ib, row_v) in row.iter_mut().enumerate() {
                        let gv = g.eval(a_rem, scale * (bpts[ib] - bp));
                        *row_v += coef * gv;
                    }
                }
            }
            row
        })
        .collect();

    let mut values = Array2::zeros((na, nb));
    for (ia, row) in rows.into_iter().enumerate() {
        for (ib, v) in row.into_iter().enumerate() {
            values[[ia, ib]] = v;
        }
    }
    let mut out = AlgebraElement {
        lattice: lat.clone(),
        values,
        support: SupportBox { ia: (0, na - 1), ib: (0, nb - 1) },
        truncated: truncated || f.truncated || g.truncated,
        overflow: f.overflow || g.overflow,
    };
    out.recompute_support();
    Ok(out)
}

/// Involution f*(a)(b) = e^{a} conj(f(-a)(-e^{a} b)).
pub fn involution(f: &AlgebraElement, gm: &GroupModel) -> AlgebraElement {
    let lat = &f.lattice;
    let (na, nb) = (lat.a.count(), lat.b.count());
    let mut values = Array2::zeros((na, nb));
    for ia in 0..na {
        let a = lat.a.point(ia);
        let scale = a.exp();
        let wmod = gm.nu(a).recip();
        for ib in 0..nb {
            let b = lat.b.point(ib);
            values[[ia, ib]] = f.eval(-a, -scale * b).conj() * wmod;
        }
    }
    let mut out = AlgebraElement {
        lattice: lat.clone(),
        values,
        support: SupportBox { ia: (0, na - 1), ib: (0, nb - 1) },
        truncated: f.truncated,
        overflow: f.overflow,
    };
    out.recompute_support();
    out
}

/// Modular twist (beta_z f)(a)(b) = e^{-z a} f(a)(b), evaluated through
/// the exponent so an overflow clamps and raises the flag instead of
/// producing infinities.
pub fn beta_z(f: &AlgebraElement, z: Complex64) -> AlgebraElement {
    let lat = &f.lattice;
    let (na, nb) = (lat.a.count(), lat.b.count());
    let mut values = Array2::zeros((na, nb));
    let mut overflow = false;
    for ia in 0..na {
        let a = lat.a.point(ia);
        let mut expo = -z.re * a;
        if expo > 690.0 {
            overflow = true;
            expo = 690.0;
        }
        let factor = Complex64::from_polar(expo.exp(), -z.im * a);
        for ib in 0..nb {
            values[[ia, ib]] = f.values[[ia, ib]] * factor;
        }
    }
    let mut out = AlgebraElement {
        lattice: lat.clone(),
        values,
        support: f.support,
        truncated: f.truncated,
        overflow: f.overflow || overflow,
    };
    out.recompute_support();
    out
}

/// Weight functions entering the Frechet seminorms.
#[derive(Clone)]
pub struct SeminormScales {
    pub w: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub sigma: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Default for SeminormScales {
    /// w(a) = (1 + e^{|a|}) / 2, sigma(b) = 1 + |b|.
    fn default() -> Self {
        SeminormScales {
            w: Arc::new(|a: f64| 0.5 * (1.0 + a.abs().exp())),
            sigma: Arc::new(|b: f64| 1.0 + b.abs()),
        }
    }
}

/// Weighted L^1 seminorm: integral of w(a)^m sigma(b)^n |f(a)(b)|.
pub fn seminorm(f: &AlgebraElement, m: i32, n: i32, scales: &SeminormScales) -> f64 {
    let wa = f.lattice.a.weights();
    let wb = f.lattice.b.weights();
    let mut acc = 0.0;
    for ia in 0..f.lattice.a.count() {
        let a = f.lattice.a.point(ia);
        let fa = (scales.w)(a).powi(m) * wa[ia];
        for ib in 0..f.lattice.b.count() {
            let v = f.values[[ia, ib]].norm();
            if v > 0.0 {
                acc += fa * (scales.sigma)(f.lattice.b.point(ib)).powi(n) * wb[ib] * v;
            }
        }
    }
    acc
}

/// Dual weight pairing in its integral form:
/// <f, g> = integral of e^{-a} conj(f(a)(b)) g(a)(b) da db.
pub fn dual_weight(f: &AlgebraElement, g: &AlgebraElement, gm: &GroupModel) -> Result<Complex64> {
    if f.lattice != g.lattice {
        return Err(Error::Shape("pairing needs a common lattice".into()));
    }
    let wa = crate::group::haar_weights(gm);
    let wb = f.lattice.b.weights();
    let mut acc = Complex64::new(0.0, 0.0);
    for ia in 0..f.lattice.a.count() {
        let a = f.lattice.a.point(ia);
        let fac = gm.nu(a) * wa[ia];
        for ib in 0..f.lattice.b.count() {
            acc += f.values[[ia, ib]].conj() * g.values[[ia, ib]] * (fac * wb[ib]);
        }
    }
    Ok(acc)
}

/// Point evaluation (f * g)(0)(0) of the twisted convolution, the form in
/// which the dual weight enters the trace formulas. Evaluated directly, so
/// no full product needs to be formed.
pub fn pairing_point(f: &AlgebraElement, g: &AlgebraElement, gm: &GroupModel) -> Result<Complex64> {
    if f.lattice != g.lattice {
        return Err(Error::Shape("pairing needs a common lattice".into()));
    }
    let lat = &f.lattice;
    let wa = crate::group::haar_weights(gm);
    let wb = lat.b.weights();
    let mut acc = Complex64::new(0.0, 0.0);
    for ka in 0..lat.a.count() {
        let ap = lat.a.point(ka);
        let scale = ap.exp();
        let fac = wa[ka] / gm.nu(ap);
        for kb in 0..lat.b.count() {
            let fv = f.values[[ka, kb]];
            if fv.norm() == 0.0 {
                continue;
            }
            let gv = g.eval(-ap, -scale * lat.b.point(kb));
            acc += fv * gv * (fac * wb[kb]);
        }
    }
    Ok(acc)
}

/// Write the kernel as CSV rows `a,b,re,im` in row-major lattice order.
/// f64 values print in Rust's shortest round-trip form, so a load
/// reproduces the element bit for bit.
pub fn to_csv(f: &AlgebraElement, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "a,b,re,im")?;
    for ia in 0..f.lattice.a.count() {
        let a = f.lattice.a.point(ia);
        for ib in 0..f.lattice.b.count() {
            let b = f.lattice.b.point(ib);
            let v = f.values[[ia, ib]];
            writeln!(out, "{},{},{},{}", a, b, v.re, v.im)?;
        }
    }
    Ok(())
}

/// Load an element written by `to_csv`, reconstructing the lattice from
/// the coordinate columns.
pub fn from_csv(input: &mut dyn BufRead) -> Result<AlgebraElement> {
    let mut lines = input.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim() == "a,b,re,im" => {}
        _ => return Err(Error::Config("expected header 'a,b,re,im'".into())),
    }
    let mut rows: Vec<(f64, f64, Complex64)> = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Config(format!("row {}: expected 4 columns", k + 2)));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Config(format!("row {}: {}", k + 2, e)))?;
        rows.push((nums[0], nums[1], Complex64::new(nums[2], nums[3])));
    }
    if rows.is_empty() {
        return Err(Error::Config("no data rows".into()));
    }
    let mut avals: Vec<f64> = Vec::new();
    for (a, _, _) in &rows {
        if avals.last() != Some(a) {
            avals.push(*a);
        }
    }
    let nb = rows.len() / avals.len();
    if nb * avals.len() != rows.len() {
        return Err(Error::Shape("row count is not a full lattice".into()));
    }
    let bvals: Vec<f64> = rows[..nb].iter().map(|r| r.1).collect();
    let ga = Grid1D::new(avals[0], *avals.last().unwrap(), avals.len())?;
    let gb = Grid1D::new(bvals[0], *bvals.last().unwrap(), nb)?;
    // validate uniformity against the reconstructed grids
    for (i, &a) in avals.iter().enumerate() {
        if (a - ga.point(i)).abs() > 1e-9 * ga.h() {
            return Err(Error::Shape("group coordinates are not uniform".into()));
        }
    }
    for (j, &b) in bvals.iter().enumerate() {
        if (b - gb.point(j)).abs() > 1e-9 * gb.h() {
            return Err(Error::Shape("base coordinates are not uniform".into()));
        }
    }
    let lat = Lattice::new(ga, gb);
    let mut values = Array2::zeros((lat.a.count(), lat.b.count()));
    for (k, (_, _, v)) in rows.into_iter().enumerate() {
        values[[k / nb, k % nb]] = v;
    }
    let mut el = AlgebraElement {
        lattice: lat,
        values,
        support: SupportBox { ia: (0, 0), ib: (0, 0) },
        truncated: false,
        overflow: false,
    };
    el.recompute_support();
    Ok(el)
}
