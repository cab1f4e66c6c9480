//! One-cocycles for a group acting on a function algebra, the abelian
//! operations on them, and a least-squares test for whether a given
//! cocycle is a coboundary.
//!
//! A cocycle assigns to each group coordinate r either a scalar or a
//! function on a base grid, subject to c(r + r') = c(r) * alpha_r[c(r')].
//! Scalar cocycles are evaluated in closed form; function-valued ones are
//! sampled on the base grid with a validity mask, because the dilation
//! action pulls points outside the grid window.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// How the group acts on base functions. `Pullback` is the multiplier
/// action (alpha_r v)(x) = v(e^r x); it is trivial on constants.
#[derive(Debug, Clone)]
pub enum Action {
    Trivial,
    Pullback { base: Grid1D },
}

impl Action {
    fn base(&self) -> Option<&Grid1D> {
        match self {
            Action::Trivial => None,
            Action::Pullback { base } => Some(base),
        }
    }
}

/// Value of a cocycle at one group coordinate.
#[derive(Debug, Clone)]
pub enum CocycleValue {
    Scalar(Complex64),
    /// Samples on the action's base grid; `valid[j]` is false where the
    /// value could not be computed (point pulled outside the grid).
    Field { values: Vec<Complex64>, valid: Vec<bool> },
}

type EvalFn = dyn Fn(f64) -> CocycleValue + Send + Sync;

#[derive(Clone)]
pub struct Cocycle {
    action: Action,
    eval: Arc<EvalFn>,
}

impl std::fmt::Debug for Cocycle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cocycle").field("action", &self.action).finish()
    }
}

/// Binary/unary operations available on cocycles over an abelian group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CocycleOp {
    Product,
    Inverse,
    Adjoint,
    Power,
}

impl Cocycle {
    /// Scalar cocycle from a closed-form evaluation, e.g. p(r) = e^{-r}.
    pub fn scalar(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Cocycle {
            action: Action::Trivial,
            eval: Arc::new(move |r| CocycleValue::Scalar(f(r))),
        }
    }

    /// Scalar cocycle from a real-valued closed form.
    pub fn scalar_real(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::scalar(move |r| Complex64::new(f(r), 0.0))
    }

    /// The canonical positive cocycle p(r) = e^{-r}.
    pub fn canonical_p() -> Self {
        Self::scalar_real(|r| (-r).exp())
    }

    /// The square-root cocycle z(r) = e^{-r/2}.
    pub fn canonical_z() -> Self {
        Self::scalar_real(|r| (-r / 2.0).exp())
    }

    /// Coboundary of a positive witness b under the pullback action:
    /// c(r)(x) = b(e^r x) / b(x). Interpolation of the witness happens in
    /// log space, so powers and round trips through `coboundary_fit`
    /// compose exactly on the lattice.
    pub fn from_coboundary(base: Grid1D, b: &[f64]) -> Result<Self> {
        if b.len() != base.count() {
            return Err(Error::Shape(format!(
                "witness has {} samples for a {}-point grid",
                b.len(),
                base.count()
            )));
        }
        if b.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::Domain("coboundary witness must be positive".into()));
        }
        let log_b: Vec<f64> = b.iter().map(|v| v.ln()).collect();
        let grid = base.clone();
        let eval = move |r: f64| {
            let n = grid.count();
            let mut values = vec![Complex64::new(0.0, 0.0); n];
            let mut valid = vec![false; n];
            for j in 0..n {
                let x = grid.point(j);
                if let Some((i, t)) = grid.interp_stencil(r.exp() * x) {
                    let lb = (1.0 - t) * log_b[i] + t * log_b[i + 1];
                    values[j] = Complex64::new((lb - log_b[j]).exp(), 0.0);
                    valid[j] = true;
                }
            }
            CocycleValue::Field { values, valid }
        };
        Ok(Cocycle { action: Action::Pullback { base }, eval: Arc::new(eval) })
    }

    pub fn action(&self) -> &Action {
        &self.action
    }

    pub fn value(&self, r: f64) -> CocycleValue {
        (self.eval)(r)
    }
}

fn apply_action(action: &Action, r: f64, v: &CocycleValue) -> CocycleValue {
    match (action, v) {
        // The pullback action is trivial on constants.
        (_, CocycleValue::Scalar(s)) => CocycleValue::Scalar(*s),
        (Action::Trivial, v) => v.clone(),
        (Action::Pullback { base }, CocycleValue::Field { values, valid }) => {
            let n = base.count();
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            let mut ok = vec![false; n];
            for j in 0..n {
                if let Some((i, t)) = base.interp_stencil(r.exp() * base.point(j)) {
                    if valid[i] && valid[i + 1] {
                        out[j] = values[i] * (1.0 - t) + values[i + 1] * t;
                        ok[j] = true;
                    }
                }
            }
            CocycleValue::Field { values: out, valid: ok }
        }
    }
}

fn value_map(v: &CocycleValue, f: impl Fn(Complex64) -> Complex64) -> CocycleValue {
    match v {
        CocycleValue::Scalar(s) => CocycleValue::Scalar(f(*s)),
        CocycleValue::Field { values, valid } => CocycleValue::Field {
            values: values.iter().map(|&z| f(z)).collect(),
            valid: valid.clone(),
        },
    }
}

fn value_zip(a: &CocycleValue, b: &CocycleValue, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<CocycleValue> {
    match (a, b) {
        (CocycleValue::Scalar(x), CocycleValue::Scalar(y)) => Ok(CocycleValue::Scalar(f(*x, *y))),
        (CocycleValue::Scalar(x), CocycleValue::Field { values, valid }) => Ok(CocycleValue::Field {
            values: values.iter().map(|&z| f(*x, z)).collect(),
            valid: valid.clone(),
        }),
        (CocycleValue::Field { values, valid }, CocycleValue::Scalar(y)) => Ok(CocycleValue::Field {
            values: values.iter().map(|&z| f(z, *y)).collect(),
            valid: valid.clone(),
        }),
        (
            CocycleValue::Field { values: va, valid: ka },
            CocycleValue::Field { values: vb, valid: kb },
        ) => {
            if va.len() != vb.len() {
                return Err(Error::Shape("cocycle fields live on different grids".into()));
            }
            Ok(CocycleValue::Field {
                values: va.iter().zip(vb).map(|(&x, &y)| f(x, y)).collect(),
                valid: ka.iter().zip(kb).map(|(&p, &q)| p && q).collect(),
            })
        }
    }
}

/// Complex power with the principal branch; demands a value in the right
/// half plane (a positive cocycle stays there).
fn principal_power(v: Complex64, z: Complex64) -> Complex64 {
    if v.re <= 0.0 && v.im.abs() < 1e-300 {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    (z * v.ln()).exp()
}

/// Combine cocycles pointwise. `Product` needs both arguments; the unary
/// operations ignore `c2`. `Power` raises `c1`, which must be positive, to
/// the complex exponent `z`.
pub fn cocycle_ops(c1: &Cocycle, c2: Option<&Cocycle>, op: CocycleOp, z: Complex64) -> Result<Cocycle> {
    let a = c1.clone();
    match op {
        CocycleOp::Product => {
            let b = c2
                .ok_or_else(|| Error::Config("product needs a second cocycle".into()))?
                .clone();
            let action = if a.action.base().is_some() { a.action.clone() } else { b.action.clone() };
            let eval = move |r: f64| {
                value_zip(&a.value(r), &b.value(r), |x, y| x * y)
                    .unwrap_or(CocycleValue::Scalar(Complex64::new(f64::NAN, f64::NAN)))
            };
            Ok(Cocycle { action, eval: Arc::new(eval) })
        }
        CocycleOp::Inverse => {
            let action = a.action.clone();
            let eval = move |r: f64| {
                value_map(&a.value(r), |v| {
                    if v.norm() == 0.0 {
                        Complex64::new(f64::NAN, f64::NAN)
                    } else {
                        v.inv()
                    }
                })
            };
            Ok(Cocycle { action, eval: Arc::new(eval) })
        }
        CocycleOp::Adjoint => {
            let action = a.action.clone();
            let eval = move |r: f64| value_map(&a.value(r), |v| v.conj());
            Ok(Cocycle { action, eval: Arc::new(eval) })
        }
        CocycleOp::Power => {
            let action = a.action.clone();
            let eval = move |r: f64| value_map(&a.value(r), |v| principal_power(v, z));
            Ok(Cocycle { action, eval: Arc::new(eval) })
        }
    }
}

/// Largest pointwise defect of the cocycle law c(r + r') = c(r) *
/// alpha_r[c(r')] over the supplied pairs. Every coordinate involved,
/// including the products r + r', must stay inside `window`.
pub fn cocycle_law_residual(c: &Cocycle, window: (f64, f64), pairs: &[(f64, f64)]) -> Result<f64> {
    let (lo, hi) = window;
    let mut worst = 0.0f64;
    for &(r, rp) in pairs {
        for &v in &[r, rp, r + rp] {
            if v < lo || v > hi {
                return Err(Error::Domain(format!(
                    "pair ({r}, {rp}) leaves the group window [{lo}, {hi}]"
                )));
            }
        }
        let lhs = c.value(r + rp);
        let rhs_raw = apply_action(&c.action, r, &c.value(rp));
        let rhs = value_zip(&c.value(r), &rhs_raw, |x, y| x * y)?;
        let defect = match (&lhs, &rhs) {
            (CocycleValue::Scalar(x), CocycleValue::Scalar(y)) => (x - y).norm(),
            (
                CocycleValue::Field { values: va, valid: ka },
                CocycleValue::Field { values: vb, valid: kb },
            ) => {
                let mut d = 0.0f64;
                let mut seen = false;
                for j in 0..va.len() {
                    if ka[j] && kb[j] {
                        d = d.max((va[j] - vb[j]).norm());
                        seen = true;
                    }
                }
                if !seen {
                    return Err(Error::Domain(format!(
                        "pair ({r}, {rp}) has no base point where both sides are defined"
                    )));
                }
                d
            }
            _ => return Err(Error::Shape("cocycle law mixes scalar and field values".into())),
        };
        if !defect.is_finite() {
            return Err(Error::Precision(format!(
                "cocycle evaluation produced a non-finite value at ({r}, {rp})"
            )));
        }
        worst = worst.max(defect);
    }
    Ok(worst)
}

/// A coboundary witness: positive samples b on the base grid with the
/// residual of the fit that produced it.
#[derive(Debug, Clone)]
pub struct CoboundaryWitness {
    pub base: Grid1D,
    pub values: Vec<f64>,
    pub residual: f64,
}

/// Try to express `c` as the coboundary of a positive witness b, i.e.
/// c(r) = alpha_r(b) / b, by least squares in log space over the sample
/// coordinates `rs`. Returns `Ok(None)` when the normal equations are
/// singular, which is the verdict "not a coboundary for this action";
/// the affine modular cocycle under the trivial action lands here.
pub fn coboundary_fit(c: &Cocycle, rs: &[f64]) -> Result<Option<CoboundaryWitness>> {
    if rs.is_empty() {
        return Err(Error::Config("coboundary fit needs sample coordinates".into()));
    }
    let base = match c.action.base() {
        Some(g) => g.clone(),
        // Trivial action: only the constant cocycle 1 is a coboundary.
        None => {
            let mut dev = 0.0f64;
            for &r in rs {
                match c.value(r) {
                    CocycleValue::Scalar(v) => dev = dev.max((v - 1.0).norm()),
                    CocycleValue::Field { values, valid } => {
                        for (v, ok) in values.iter().zip(&valid) {
                            if *ok {
                                dev = dev.max((v - 1.0).norm());
                            }
                        }
                    }
                }
            }
            return if dev < 1e-10 {
                let g = Grid1D::symmetric(1.0, 3)?;
                Ok(Some(CoboundaryWitness { base: g, values: vec![1.0; 3], residual: dev }))
            } else {
                Ok(None)
            };
        }
    };

    let n = base.count();
    // Rows of the design problem: for each sample r and each base index j
    // with a valid stencil, interp(log b, e^r x_j) - log b(x_j) = log c_rj.
    struct Row {
        left: usize,
        t: f64,
        j: usize,
        y: f64,
    }
    let mut rows = Vec::new();
    for &r in rs {
        let v = c.value(r);
        let (values, valid) = match &v {
            CocycleValue::Scalar(s) => (vec![*s; n], vec![true; n]),
            CocycleValue::Field { values, valid } => (values.clone(), valid.clone()),
        };
        for j in 0..n {
            if !valid[j] {
                continue;
            }
            let cv = values[j];
            if !(cv.re > 0.0) || cv.im.abs() > 1e-10 * cv.re.abs().max(1.0) {
                return Err(Error::Domain(format!(
                    "coboundary fit needs a positive cocycle, got {cv} at r = {r}"
                )));
            }
            if let Some((left, t)) = base.interp_stencil(r.exp() * base.point(j)) {
                rows.push(Row { left, t, j, y: cv.re.ln() });
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Domain("no usable equations inside the base window".into()));
    }

    // Normal equations for u = log b, plus a mean-zero gauge row fixing the
    // scale freedom b -> const * b.
    let mut m = vec![0.0f64; n * n];
    let mut rhs = vec![0.0f64; n];
    let add = |idx: &[(usize, f64)], y: f64, m: &mut [f64], rhs: &mut [f64]| {
        for &(i, ci) in idx {
            rhs[i] += ci * y;
            for &(k, ck) in idx {
                m[i * n + k] += ci * ck;
            }
        }
    };
    for row in &rows {
        let mut idx = vec![(row.left, 1.0 - row.t), (row.left + 1, row.t)];
        // combine with the -u_j term (indices may coincide)
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(3);
        idx.push((row.j, -1.0));
        for (i, cval) in idx {
            if let Some(e) = merged.iter_mut().find(|e| e.0 == i) {
                e.1 += cval;
            } else {
                merged.push((i, cval));
            }
        }
        add(&merged, row.y, &mut m, &mut rhs);
    }
    let gauge: Vec<(usize, f64)> = (0..n).map(|i| (i, (n as f64).sqrt().recip())).collect();
    add(&gauge, 0.0, &mut m, &mut rhs);

    // Cholesky; a collapsed pivot means the action cannot see the witness,
    // so the cocycle is reported as not-a-coboundary.
    let max_diag = (0..n).map(|i| m[i * n + i]).fold(0.0f64, f64::max);
    let mut l = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 1e-10 * max_diag {
                    return Ok(None);
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut u = rhs;
    for i in 0..n {
        for k in 0..i {
            u[i] -= l[i * n + k] * u[k];
        }
        u[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            u[i] -= l[k * n + i] * u[k];
        }
        u[i] /= l[i * n + i];
    }

    // Residual in value space: worst deviation of exp(predicted) from c.
    let mut residual = 0.0f64;
    for row in &rows {
        let pred = (1.0 - row.t) * u[row.left] + row.t * u[row.left + 1] - u[row.j];
        residual = residual.max((pred.exp() - row.y.exp()).abs());
    }
    Ok(Some(CoboundaryWitness {
        base,
        values: u.iter().map(|v| v.exp()).collect(),
        residual,
    }))
}
