//! The structured inclusion `0 in Ax + L* B L x + C x + D x`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::LinearOperator;
use crate::Scalar;

use super::prox::ResolventHandle;
use super::smooth::{SmoothConstant, SmoothMapHandle};

pub type LinearHandle<T> = Arc<dyn LinearOperator<T>>;

/// Dual block: resolvent of `B^-1` (called as `J_{sigma B^-1}`), the coupling
/// operator `L`, and a bound on `||L||`.
#[derive(Clone)]
pub struct DualBlock<T: Scalar> {
    pub resolvent_b_inv: ResolventHandle<T>,
    pub linear: LinearHandle<T>,
    pub norm_l: T,
}

/// Absent operators are `None`; methods dispatch on this structure.
#[derive(Clone)]
pub struct SplitProblem<T: Scalar> {
    primal_dim: usize,
    resolvent_a: ResolventHandle<T>,
    dual: Option<DualBlock<T>>,
    cocoercive: Option<SmoothMapHandle<T>>,
    lipschitz: Option<SmoothMapHandle<T>>,
    beta: T,
    zeta: T,
}

impl<T: Scalar> SplitProblem<T> {
    pub fn new(primal_dim: usize, resolvent_a: ResolventHandle<T>) -> Self {
        Self {
            primal_dim,
            resolvent_a,
            dual: None,
            cocoercive: None,
            lipschitz: None,
            beta: T::infinity(),
            zeta: T::zero(),
        }
    }

    /// Adds the cocoercive part `C`; its constant must be tagged cocoercive.
    pub fn with_cocoercive(mut self, c: SmoothMapHandle<T>) -> Result<Self> {
        match c.constant() {
            SmoothConstant::Cocoercive(b) if b > T::zero() && b.is_finite() => {
                self.beta = b;
                self.cocoercive = Some(c);
                Ok(self)
            }
            other => Err(Error::invalid(format!(
                "C needs a finite positive cocoercivity constant, got {other:?}"
            ))),
        }
    }

    /// Adds the Lipschitz part `D`. A cocoercive tag is accepted and converted.
    pub fn with_lipschitz(mut self, d: SmoothMapHandle<T>) -> Result<Self> {
        let z = d.constant().lipschitz();
        if !(z > T::zero() && z.is_finite()) {
            return Err(Error::invalid(format!(
                "D needs a finite positive Lipschitz constant, got {z}"
            )));
        }
        self.zeta = z;
        self.lipschitz = Some(d);
        Ok(self)
    }

    pub fn with_dual(mut self, dual: DualBlock<T>) -> Result<Self> {
        if dual.linear.domain_dim() != self.primal_dim {
            return Err(Error::DimensionMismatch {
                expected: self.primal_dim,
                got: dual.linear.domain_dim(),
            });
        }
        if !(dual.norm_l >= T::zero() && dual.norm_l.is_finite()) {
            return Err(Error::invalid(format!("||L|| must be finite and nonnegative, got {}", dual.norm_l)));
        }
        self.dual = Some(dual);
        Ok(self)
    }

    pub fn primal_dim(&self) -> usize {
        self.primal_dim
    }
    pub fn dual_dim(&self) -> usize {
        self.dual.as_ref().map_or(0, |d| d.linear.codomain_dim())
    }
    pub fn resolvent_a(&self) -> &ResolventHandle<T> {
        &self.resolvent_a
    }
    pub fn dual(&self) -> Option<&DualBlock<T>> {
        self.dual.as_ref()
    }
    pub fn cocoercive(&self) -> Option<&SmoothMapHandle<T>> {
        self.cocoercive.as_ref()
    }
    pub fn lipschitz(&self) -> Option<&SmoothMapHandle<T>> {
        self.lipschitz.as_ref()
    }
    /// `+inf` when `C` is absent.
    pub fn beta(&self) -> T {
        self.beta
    }
    /// `0` when `D` is absent.
    pub fn zeta(&self) -> T {
        self.zeta
    }
    pub fn norm_l(&self) -> T {
        self.dual.as_ref().map_or(T::zero(), |d| d.norm_l)
    }

    /// Short structural signature, e.g. `A+B∘L+C+D`.
    pub fn structure(&self) -> String {
        let mut s = String::from("A");
        if self.dual.is_some() {
            s.push_str("+L*BL");
        }
        if self.cocoercive.is_some() {
            s.push_str("+C");
        }
        if self.lipschitz.is_some() {
            s.push_str("+D");
        }
        s
    }
}
