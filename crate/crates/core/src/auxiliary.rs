//! Auxiliary fields 𝒰 = ∂_y f and λ = ∂ₓ³u − (∂_y u)∫₀ʸ𝒰, and residual
//! checks of the exact transport relations they satisfy along a trajectory.
//!
//! All relations below carry a damping coefficient d ∈ {0, 1} (d = 1 is
//! the magnetic case); the lone (∂_y u)∫₀ʸ𝒰 term of the λ source exists
//! only because of the damping term and scales with d.

use crate::grid::Field;
use crate::solver::normal_velocity;

/// f and the fields derived from it at one output time.
#[derive(Debug, Clone)]
pub struct AuxSnapshot {
    pub t: f64,
    pub f: Field,
    pub aux_u: Field,
    pub lambda: Field,
}

impl AuxSnapshot {
    pub fn from_state(t: f64, u: &Field, f: &Field) -> Self {
        let aux_u = derive_aux_u(f);
        let lambda = lambda_field(u, &aux_u);
        Self {
            t,
            f: f.clone(),
            aux_u,
            lambda,
        }
    }
}

/// 𝒰 = ∂_y f.
pub fn derive_aux_u(f: &Field) -> Field {
    f.dy(1)
}

/// ‖∂_y𝒰(·, 0)‖_{L²_x}: the defect in the Neumann condition at the wall.
pub fn wall_neumann_defect(aux_u: &Field) -> f64 {
    let d = aux_u.dy(1);
    let col = d.node(0);
    (crate::grid::LX * col.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
}

/// λ = ∂ₓ³u − (∂_y u) ∫₀ʸ 𝒰 dỹ.
pub fn lambda_field(u: &Field, aux_u: &Field) -> Field {
    let prim = aux_u.integrate_y_from_0();
    &u.dx(3) - &u.dy(1).mul_unchecked(&prim)
}

/// 𝓛(u, 𝒰) = ∫₀ʸ ((∂_y u) ∫₀^ỹ 𝒰 dr) dỹ.
pub fn double_layer(u: &Field, aux_u: &Field) -> Field {
    u.dy(1).mul_unchecked(&aux_u.integrate_y_from_0()).integrate_y_from_0()
}

/// Where in a three-snapshot window the residual is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowPoint {
    /// One-sided second-order difference at the first snapshot.
    Start,
    /// Centered difference at the middle snapshot.
    Center,
    /// One-sided second-order difference at the last snapshot.
    End,
}

impl WindowPoint {
    fn index(self) -> usize {
        match self {
            WindowPoint::Start => 0,
            WindowPoint::Center => 1,
            WindowPoint::End => 2,
        }
    }

    /// Second-order time derivative from three equally spaced samples.
    pub fn time_derivative(self, a: &Field, b: &Field, c: &Field, dt: f64) -> Field {
        let mut out = Field::zeros(a.grid());
        match self {
            WindowPoint::Start => {
                out.axpy(-1.5 / dt, a);
                out.axpy(2.0 / dt, b);
                out.axpy(-0.5 / dt, c);
            }
            WindowPoint::Center => {
                out.axpy(-0.5 / dt, a);
                out.axpy(0.5 / dt, c);
            }
            WindowPoint::End => {
                out.axpy(0.5 / dt, a);
                out.axpy(-2.0 / dt, b);
                out.axpy(1.5 / dt, c);
            }
        }
        out
    }
}

/// One snapshot of the coupled system as seen by the residual checks.
#[derive(Debug, Clone, Copy)]
pub struct WindowSample<'a> {
    pub t: f64,
    pub u: &'a Field,
    pub aux: &'a AuxSnapshot,
}

/// Three equally spaced samples plus the coefficients of the run.
#[derive(Debug, Clone, Copy)]
pub struct Window<'a> {
    pub samples: [WindowSample<'a>; 3],
    pub damping: f64,
    /// Manufactured source in the u-equation at the evaluation time, if any.
    pub source: Option<&'a Field>,
}

impl<'a> Window<'a> {
    fn spacing(&self) -> f64 {
        0.5 * (self.samples[2].t - self.samples[0].t)
    }

    fn at(&self, p: WindowPoint) -> &WindowSample<'a> {
        &self.samples[p.index()]
    }

    fn transport(&self, p: WindowPoint, pick: impl Fn(&WindowSample<'a>) -> &'a Field) -> Field {
        let s = self.at(p);
        let q = pick(s);
        let dt = self.spacing();
        let dq = p.time_derivative(pick(&self.samples[0]), pick(&self.samples[1]), pick(&self.samples[2]), dt);
        let v = normal_velocity(s.u);
        let mut out = dq;
        out = &out + &s.u.mul_unchecked(&q.dx(1));
        out = &out + &v.mul_unchecked(&q.dy(1));
        out.axpy(-1.0, &q.dy(2));
        out.axpy(self.damping, q);
        out
    }

    /// Residual field of (∂ₜ + u∂ₓ + v∂_y − ∂_y²)f + d f = −∂ₓ³v.
    pub fn f_relation_field(&self, p: WindowPoint) -> Field {
        let s = self.at(p);
        let lhs = self.transport(p, |w| &w.aux.f);
        let forcing = s.u.dx(4).integrate_y_from_0();
        &lhs - &forcing
    }

    /// Residual field of
    /// (∂ₜ + u∂ₓ + v∂_y − ∂_y²)𝒰 + d𝒰 = ∂ₓλ + (∂ₓ∂_y u)∫₀ʸ𝒰 + (∂ₓu)𝒰.
    pub fn u_relation_field(&self, p: WindowPoint) -> Field {
        let s = self.at(p);
        let lhs = self.transport(p, |w| &w.aux.aux_u);
        let prim = s.aux.aux_u.integrate_y_from_0();
        let mut rhs = s.aux.lambda.dx(1);
        rhs = &rhs + &s.u.dx(1).dy(1).mul_unchecked(&prim);
        rhs = &rhs + &s.u.dx(1).mul_unchecked(&s.aux.aux_u);
        &lhs - &rhs
    }

    /// The seven-term source H of the λ relation, assembled from primitives.
    pub fn lambda_source(&self, p: WindowPoint) -> Field {
        let s = self.at(p);
        let u = s.u;
        let aux_u = &s.aux.aux_u;
        let lambda = &s.aux.lambda;
        let v = normal_velocity(u);
        let ux = u.dx(1);
        let uy = u.dy(1);
        let uxy = ux.dy(1);
        let prim = aux_u.integrate_y_from_0();

        let mut h = ux.mul_unchecked(lambda).scale(-4.0);
        let coeff = &uy.scale(self.damping) - &ux.mul_unchecked(&uy).scale(4.0);
        h = &h + &coeff.mul_unchecked(&prim);
        h = &h + &uxy.mul_unchecked(&lambda.integrate_y_from_0()).scale(3.0);
        h = &h + &uxy.mul_unchecked(&double_layer(u, aux_u)).scale(3.0);
        let uxx = u.dx(2);
        h = &h - &uxx.mul_unchecked(&uxx).scale(3.0);
        h = &h - &v.dx(1).mul_unchecked(&u.dx(2).dy(1)).scale(3.0);
        h = &h + &u.dy(2).mul_unchecked(aux_u).scale(2.0);
        h
    }

    /// Residual field of (∂ₜ + u∂ₓ + v∂_y − ∂_y²)λ + dλ = H (+ source terms).
    pub fn lambda_relation_field(&self, p: WindowPoint) -> Field {
        let lhs = self.transport(p, |w| &w.aux.lambda);
        let mut rhs = self.lambda_source(p);
        if let Some(src) = self.source {
            // a forced u-equation adds ∂ₓ³S − (∫₀ʸ𝒰) ∂_y S
            let s = self.at(p);
            rhs = &rhs + &src.dx(3);
            rhs = &rhs - &s.aux.aux_u.integrate_y_from_0().mul_unchecked(&src.dy(1));
        }
        &lhs - &rhs
    }

    // boundary rows carry the closures, not the equations
    fn interior_norm(mut r: Field) -> f64 {
        r.zero_boundary_rows();
        r.l2_norm()
    }

    pub fn residual_f_relation(&self, p: WindowPoint) -> f64 {
        Self::interior_norm(self.f_relation_field(p))
    }

    pub fn residual_u_relation(&self, p: WindowPoint) -> f64 {
        Self::interior_norm(self.u_relation_field(p))
    }

    pub fn residual_lambda_relation(&self, p: WindowPoint) -> f64 {
        Self::interior_norm(self.lambda_relation_field(p))
    }
}
