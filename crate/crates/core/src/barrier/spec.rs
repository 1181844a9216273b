use super::{BarrierJet, ClassK, DisturbanceBounds, Potential, SafetyFunction};
use crate::dynamics::{mask_unmatched, ControlAffine, OutputMap};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::scalar::{abssq, Scalar};

/// Which lift of `h` a spec evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lift {
    /// `δ = 0`: no contact state with positive approach speed is safe.
    H0,
    /// `δ = ½γ₂²`: contact allowed up to approach speed `γ₂`.
    H1,
}

/// Whether contact is judged as a landing (`ḣ ∈ [0, γ₂]`) or a docking
/// (`ḣ ∈ [γ₁, γ₂]`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactObjective {
    Landing,
    Docking,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactTolerances<T> {
    /// Minimum approach speed for docking.
    pub gamma1: T,
    /// Maximum approach speed at contact.
    pub gamma2: T,
    pub objective: ContactObjective,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Membership<T> {
    Interior,
    /// `−ε ≤ H ≤ 0`, carrying the `ε` used.
    BoundaryLayer(T),
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactClass {
    Landing,
    Docking,
    UnsafeContact,
    NoContact,
}

/// Everything computed while evaluating a lifted barrier at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftEval<T> {
    pub h: T,
    /// Undisturbed `ḣ = ∂_t h + ∇h·f`.
    pub h_dot: T,
    pub h_dot_w: T,
    /// The lifted value `H`.
    pub value: T,
    pub grad: Vec<T>,
    pub dt: T,
}

impl<T: Scalar> LiftEval<T> {
    pub fn jet(&self) -> BarrierJet<T> {
        BarrierJet { value: self.value, grad: self.grad.clone(), dt: self.dt }
    }
}

/// A relative-degree-two constraint `h` together with its potential-field
/// lift and the parameters of the robust CBF condition.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierSpec<T> {
    output: OutputMap<T>,
    potential: Potential<T>,
    lift: Lift,
    delta: T,
    tolerances: Option<ContactTolerances<T>>,
    alpha: ClassK<T>,
    lipschitz: T,
    contact_tolerance: T,
}

struct Kinematics<T> {
    h: T,
    grad_h: Vec<T>,
    dt_h: T,
    h_dot: T,
    h_dot_w: T,
    grad_h_dot_w: Vec<T>,
    dt_h_dot_w: T,
}

impl<T: Scalar> BarrierSpec<T> {
    /// `H₁` with `δ = ½γ₂²`.
    pub fn h1(
        output: OutputMap<T>,
        potential: Potential<T>,
        tolerances: ContactTolerances<T>,
        alpha: ClassK<T>,
        lipschitz: T,
    ) -> Result<Self> {
        if !(tolerances.gamma1 > T::zero()) {
            return Err(Error::param("gamma1", "must be positive"));
        }
        if !(tolerances.gamma2 > tolerances.gamma1 && tolerances.gamma2.is_finite()) {
            return Err(Error::param("gamma2", "must exceed gamma1"));
        }
        let delta = T::lit(0.5) * tolerances.gamma2 * tolerances.gamma2;
        Self::build(output, potential, Lift::H1, delta, Some(tolerances), alpha, lipschitz)
    }

    /// `H₀`, the lift with `δ = 0`.
    pub fn h0(output: OutputMap<T>, potential: Potential<T>, alpha: ClassK<T>, lipschitz: T) -> Result<Self> {
        Self::build(output, potential, Lift::H0, T::zero(), None, alpha, lipschitz)
    }

    fn build(
        output: OutputMap<T>,
        potential: Potential<T>,
        lift: Lift,
        delta: T,
        tolerances: Option<ContactTolerances<T>>,
        alpha: ClassK<T>,
        lipschitz: T,
    ) -> Result<Self> {
        if !(lipschitz > T::zero() && lipschitz.is_finite()) {
            return Err(Error::param("lipschitz", "must be positive and finite"));
        }
        let spec = Self {
            output,
            potential,
            lift,
            delta,
            tolerances,
            alpha,
            lipschitz,
            contact_tolerance: T::lit(1e-6),
        };
        let d = spec.contact_limit()?;
        if d < T::zero() {
            return Err(Error::param("delta", "contact limit d = Φ⁻¹(Φ(0) − δ) is negative"));
        }
        Ok(spec)
    }

    /// Overrides `δ` on an `H₁` spec. Only `δ ≥ 0` and `d ≥ 0` are enforced.
    pub fn with_delta(mut self, delta: T) -> Result<Self> {
        if !(delta >= T::zero() && delta.is_finite()) {
            return Err(Error::param("delta", "must be nonnegative and finite"));
        }
        if self.lift == Lift::H0 && delta != T::zero() {
            return Err(Error::param("delta", "H0 lift requires delta = 0"));
        }
        self.delta = delta;
        if self.contact_limit()? < T::zero() {
            return Err(Error::param("delta", "contact limit d = Φ⁻¹(Φ(0) − δ) is negative"));
        }
        Ok(self)
    }

    pub fn with_alpha(mut self, alpha: ClassK<T>) -> Self {
        self.alpha = alpha;
        self
    }

    /// Band around `h = 0` treated as contact (default 1e−6).
    pub fn with_contact_tolerance(mut self, tol: T) -> Result<Self> {
        if !(tol > T::zero()) {
            return Err(Error::param("contact_tolerance", "must be positive"));
        }
        self.contact_tolerance = tol;
        Ok(self)
    }

    pub fn output(&self) -> &OutputMap<T> {
        &self.output
    }

    pub fn potential(&self) -> &Potential<T> {
        &self.potential
    }

    pub fn lift(&self) -> Lift {
        self.lift
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn tolerances(&self) -> Option<&ContactTolerances<T>> {
        self.tolerances.as_ref()
    }

    pub fn alpha(&self) -> &ClassK<T> {
        &self.alpha
    }

    pub fn lipschitz(&self) -> T {
        self.lipschitz
    }

    pub fn contact_tolerance(&self) -> T {
        self.contact_tolerance
    }

    /// `d = Φ⁻¹(Φ(0) − δ)`, the largest `h` allowed in the safe set.
    pub fn contact_limit(&self) -> Result<T> {
        self.potential.inverse_offset(T::zero(), -self.delta)
    }

    /// `α_w⁻¹(2)`
    pub fn layer_width(&self) -> T {
        self.alpha.layer_width()
    }

    /// The lift `Φ⁻¹(Φ(h) − ½·abssq(ḣ_w) + δ)` for given `h` and `ḣ_w`.
    pub fn lift_value(&self, h: T, h_dot_w: T) -> Result<T> {
        self.potential.inverse_offset(h, self.delta - T::lit(0.5) * abssq(h_dot_w))
    }

    fn kinematics(&self, model: &dyn ControlAffine<T>, t: T, x: &[T], with_grad: bool) -> Result<Kinematics<T>> {
        let jet = self.output.jet(t, x)?;
        let g = model.input_matrix(t, x);
        let residual = norm(&g.left_mul(&jet.grad));
        if residual > T::lit(1e-9) {
            return Err(Error::RelativeDegree { residual: residual.to_f64_lossy() });
        }
        let f = model.drift(t, x);
        let h_dot = jet.dt + dot(&jet.grad, &f);
        let mask = model.unmatched_mask();
        let w_x_max = model.bounds().w_x_max;
        let grad_w = mask_unmatched(mask, &jet.grad);
        let reach = norm(&grad_w);
        let h_dot_w = h_dot + reach * w_x_max;

        let (grad_h_dot_w, dt_h_dot_w) = if with_grad {
            // ∇ḣ = ∇∂_t h + Hess(h)·f + J_fᵀ·∇h
            let hf = jet.hessian.mul_vec(&f);
            let jtg = model.drift_jacobian(t, x).left_mul(&jet.grad);
            let mut grad: Vec<T> = (0..x.len()).map(|i| jet.grad_dt[i] + hf[i] + jtg[i]).collect();
            let dft = model.drift_time_partial(t, x);
            let mut dt = jet.dtt + dot(&jet.grad_dt, &f) + dot(&jet.grad, &dft);
            if reach > T::zero() && w_x_max > T::zero() {
                // ∇‖P∇h‖ = Hess(h)·P∇h / ‖P∇h‖
                let hp = jet.hessian.mul_vec(&grad_w);
                for (gi, hpi) in grad.iter_mut().zip(hp) {
                    *gi = *gi + w_x_max * hpi / reach;
                }
                let grad_dt_w = mask_unmatched(mask, &jet.grad_dt);
                dt = dt + w_x_max * dot(&grad_w, &grad_dt_w) / reach;
            }
            (grad, dt)
        } else {
            (Vec::new(), T::zero())
        };

        Ok(Kinematics {
            h: jet.value,
            grad_h: jet.grad,
            dt_h: jet.dt,
            h_dot,
            h_dot_w,
            grad_h_dot_w,
            dt_h_dot_w,
        })
    }

    /// `ḣ` maximized over `‖w_x‖ ≤ w_x,max`:
    /// `∂_t h + ∇h·f + ‖P∇h‖·w_x,max`.
    pub fn h_dot_w(&self, model: &dyn ControlAffine<T>, t: T, x: &[T]) -> Result<T> {
        Ok(self.kinematics(model, t, x, false)?.h_dot_w)
    }

    /// Undisturbed `ḣ = ∂_t h + ∇h·f`.
    pub fn h_dot(&self, model: &dyn ControlAffine<T>, t: T, x: &[T]) -> Result<T> {
        Ok(self.kinematics(model, t, x, false)?.h_dot)
    }

    /// The lifted barrier value `H(t,x)`.
    pub fn value(&self, model: &dyn ControlAffine<T>, t: T, x: &[T]) -> Result<T> {
        let k = self.kinematics(model, t, x, false)?;
        self.lift_value(k.h, k.h_dot_w)
    }

    /// Value, gradient and time partial of `H`.
    ///
    /// Differentiating `Φ(H) = Φ(h) − ½·abssq(ḣ_w) + δ` gives
    /// `∇H = [φ(h)·∇h − |ḣ_w|·∇ḣ_w] / φ(H)`.
    pub fn evaluate(&self, model: &dyn ControlAffine<T>, t: T, x: &[T]) -> Result<LiftEval<T>> {
        let k = self.kinematics(model, t, x, true)?;
        let value = self.lift_value(k.h, k.h_dot_w)?;
        let phi_big = self.potential.deriv(value);
        if phi_big.abs() < T::lit(1e-12) {
            return Err(Error::DegeneratePotential { value: phi_big.to_f64_lossy() });
        }
        let phi_h = self.potential.deriv(k.h);
        let speed = k.h_dot_w.abs();
        let grad = k
            .grad_h
            .iter()
            .zip(&k.grad_h_dot_w)
            .map(|(&gh, &gw)| (phi_h * gh - speed * gw) / phi_big)
            .collect();
        let dt = (phi_h * k.dt_h - speed * k.dt_h_dot_w) / phi_big;
        Ok(LiftEval { h: k.h, h_dot: k.h_dot, h_dot_w: k.h_dot_w, value, grad, dt })
    }

    /// `γ₂ > γ₁ + 2·l_h·w_x,max`. Always false for specs without contact
    /// tolerances.
    pub fn feasibility_check(&self, bounds: &DisturbanceBounds<T>) -> bool {
        match &self.tolerances {
            Some(tol) => tol.gamma2 > tol.gamma1 + T::lit(2.0) * self.lipschitz * bounds.w_x_max,
            None => false,
        }
    }

    /// Gain `k` of a linear `α_w(λ) = kλ` whose layer width `α_w⁻¹(2)` is
    /// `ε* = −Φ⁻¹(½γ₂² + Φ(0) − ½(2·l_h·w_x,max + γ₁)²)`, the width that
    /// guarantees contact in finite time.
    pub fn solve_alpha_gain(&self, bounds: &DisturbanceBounds<T>) -> Result<T> {
        let tol = self.tolerances.ok_or_else(|| Error::param("tolerances", "gain condition needs gamma1 and gamma2"))?;
        let required = tol.gamma1 + T::lit(2.0) * self.lipschitz * bounds.w_x_max;
        if !self.feasibility_check(bounds) {
            return Err(Error::Infeasible { gamma2: tol.gamma2.to_f64_lossy(), required: required.to_f64_lossy() });
        }
        let half = T::lit(0.5);
        let dy = half * tol.gamma2 * tol.gamma2 - half * required * required;
        let width = -self.potential.inverse_offset(T::zero(), dy)?;
        if !(width > T::zero()) {
            return Err(Error::NonPositiveLayer(width.to_f64_lossy()));
        }
        Ok(T::lit(2.0) / width)
    }

    /// Membership in the safe set, its boundary layer of width `eps`
    /// (default `α_w⁻¹(2)`), or neither.
    pub fn membership(&self, model: &dyn ControlAffine<T>, t: T, x: &[T], eps: Option<T>) -> Result<Membership<T>> {
        let eps = eps.unwrap_or_else(|| self.layer_width());
        let k = self.kinematics(model, t, x, false)?;
        let value = self.lift_value(k.h, k.h_dot_w)?;
        self.classify_membership(k.h, value, eps)
    }

    pub(crate) fn classify_membership(&self, h: T, value: T, eps: T) -> Result<Membership<T>> {
        if value > T::zero() || h > self.contact_limit()? {
            Ok(Membership::Outside)
        } else if value >= -eps {
            Ok(Membership::BoundaryLayer(eps))
        } else {
            Ok(Membership::Interior)
        }
    }

    /// Classifies a contact event from the approach speed `ḣ` at `(t_f, x_f)`.
    pub fn classify_contact(&self, t_f: T, x_f: &[T], h_dot_f: T) -> Result<ContactClass> {
        let h = self.output.value(t_f, x_f)?;
        Ok(self.classify_contact_value(h, h_dot_f))
    }

    pub fn classify_contact_value(&self, h: T, h_dot_f: T) -> ContactClass {
        let tol = match &self.tolerances {
            Some(tol) => tol,
            None => return ContactClass::NoContact,
        };
        if h.abs() > self.contact_tolerance {
            return ContactClass::NoContact;
        }
        if h_dot_f > tol.gamma2 {
            ContactClass::UnsafeContact
        } else if tol.objective == ContactObjective::Docking && h_dot_f >= tol.gamma1 {
            ContactClass::Docking
        } else if h_dot_f >= T::zero() {
            ContactClass::Landing
        } else {
            ContactClass::NoContact
        }
    }
}

impl<T: Scalar> SafetyFunction<T> for BarrierSpec<T> {
    fn jet(&self, model: &dyn ControlAffine<T>, t: T, x: &[T]) -> Result<BarrierJet<T>> {
        Ok(self.evaluate(model, t, x)?.jet())
    }

    fn class_k(&self) -> &ClassK<T> {
        &self.alpha
    }
}
