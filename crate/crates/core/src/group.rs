use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// The three worked group models: the real line acting by dilations on the
/// real line (the affine group), the integers acting by dilations on the
/// real line, and the real line acting by dilations on R^n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    RealLine,
    Integers,
    DilationRn(usize),
}

impl GroupKind {
    pub fn is_discrete(&self) -> bool {
        matches!(self, GroupKind::Integers)
    }

    /// Dimension of the space the group dilates.
    pub fn base_dim(&self) -> usize {
        match self {
            GroupKind::DilationRn(n) => *n,
            _ => 1,
        }
    }
}

/// Parameters of the deformed triple: (eta, omega) define T = eta +
/// omega theta, s is the trace exponent and c the modular power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleParams {
    pub eta: f64,
    pub omega: f64,
    pub s: f64,
    pub c: f64,
}

impl TripleParams {
    pub fn new(eta: f64, omega: f64, s: f64, c: f64) -> crate::error::Result<Self> {
        if omega == 0.0 {
            return Err(crate::error::Error::Config("omega must be nonzero".into()));
        }
        Ok(TripleParams { eta, omega, s, c })
    }
}

/// Discretisation of the acting group: either a uniform grid on an
/// interval of the real line or an integer range.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupGrid {
    Real(Grid1D),
    Integer { n_min: i64, n_max: i64 },
}

/// A concrete group model. Bundles the discretised group together with the
/// structure maps every computation needs: the scaling factor nu of the
/// action on the base, its square root vartheta used by the unitaries, and
/// the canonical positive cocycle p implementing the modular scaling.
///
/// All three models have unimodular acting group, so the group modular
/// function is identically 1; the modular function of the semidirect
/// product itself (e^a for the affine group) is recorded separately and is
/// informational only.
#[derive(Debug, Clone)]
pub struct GroupModel {
    pub kind: GroupKind,
    pub grid: GroupGrid,
}

impl GroupModel {
    /// Scaling factor of the Haar measure on the base under the action:
    /// e^{-a} in one base dimension, e^{-n a} for dilations of R^n.
    pub fn nu(&self, a: f64) -> f64 {
        (-(self.kind.base_dim() as f64) * a).exp()
    }

    /// Square root of the spectral scaling of the base Dirac operator
    /// under the action; e^{-a/2} in every model.
    pub fn vartheta(&self, a: f64) -> f64 {
        (-a / 2.0).exp()
    }

    /// Canonical positive cocycle p(a) = e^{-a}; generates the modular
    /// operator of the extension.
    pub fn p(&self, a: f64) -> f64 {
        (-a).exp()
    }

    /// Modular function of the acting group. All three models are built on
    /// R or Z, so this is identically 1.
    pub fn modular(&self, _a: f64) -> f64 {
        1.0
    }

    /// Modular function of the semidirect product (metadata; nothing is
    /// integrated against it).
    pub fn modular_semidirect(&self, a: f64) -> f64 {
        match self.kind {
            GroupKind::Integers => 1.0,
            _ => a.exp(),
        }
    }

    /// The group coordinates as a vector, in grid order.
    pub fn points(&self) -> Vec<f64> {
        match &self.grid {
            GroupGrid::Real(g) => g.points().collect(),
            GroupGrid::Integer { n_min, n_max } => (*n_min..=*n_max).map(|n| n as f64).collect(),
        }
    }

    pub fn real_grid(&self) -> Option<&Grid1D> {
        match &self.grid {
            GroupGrid::Real(g) => Some(g),
            GroupGrid::Integer { .. } => None,
        }
    }
}

/// Build a group model on the given coordinate window.
///
/// For `Integers` the window is rounded to an integer range and `count` is
/// ignored; for the continuous kinds it becomes a uniform grid.
pub fn make_group(kind: GroupKind, lo: f64, hi: f64, count: usize) -> Result<GroupModel> {
    if let GroupKind::DilationRn(n) = kind {
        if n == 0 {
            return Err(Error::Config("dilation model needs base dimension >= 1".into()));
        }
    }
    let grid = match kind {
        GroupKind::Integers => {
            let n_min = lo.ceil() as i64;
            let n_max = hi.floor() as i64;
            if n_min >= n_max {
                return Err(Error::Config(format!(
                    "integer range [{lo}, {hi}] contains fewer than two points"
                )));
            }
            GroupGrid::Integer { n_min, n_max }
        }
        _ => GroupGrid::Real(Grid1D::new(lo, hi, count)?),
    };
    Ok(GroupModel { kind, grid })
}

/// Quadrature weights for the Haar measure on the discretised group:
/// trapezoid weights for Lebesgue measure on R, unit weights for counting
/// measure on Z.
pub fn haar_weights(g: &GroupModel) -> Vec<f64> {
    match &g.grid {
        GroupGrid::Real(grid) => grid.weights(),
        GroupGrid::Integer { n_min, n_max } => vec![1.0; (n_max - n_min + 1) as usize],
    }
}
