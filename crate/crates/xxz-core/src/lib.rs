//! Thermodynamic observables of the massless XXZ spin-1/2 chain, the
//! threshold singularities of its dynamic response functions, and numerical
//! checks of the underlying singular-integral asymptotics.
//!
//! The low-level numerics (kernels, quadrature, Nyström solver, root finding)
//! are generic over a [`Real`] scalar; the physics layers work in `f64`, and
//! the aliases below name the concrete instantiations.

// `!(a < b)` deliberately rejects NaN; LU sweeps index two arrays at once.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod asymptotics;
pub mod error;
pub mod excitations;
pub mod fredholm;
pub mod kernels;
pub mod momentum;
pub mod observables;
pub mod quadrature;
pub mod roots;
pub mod thresholds;
pub mod velocity;

use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};

pub use error::{Error, Result};

/// Floating-point scalar accepted by the generic numerical core.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("representable literal")
    }
}

impl<T> Real for T where T: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {}

pub type Rapidity = kernels::Rapidity<f64>;
pub type Angle = kernels::Angle<f64>;
pub type QuadratureGrid = fredholm::QuadratureGrid<f64>;
pub type GridFunction = fredholm::GridFunction<f64>;
pub type NystromSolver = fredholm::NystromSolver<f64>;

pub use excitations::ExcitationConfig;
pub use momentum::{MomentumSpace, Segment};
pub use observables::{FieldSpec, ModelParams, Observables, StringSpec};
pub use thresholds::{ThresholdKind, ThresholdSample};
pub use velocity::VelocityAtlas;
