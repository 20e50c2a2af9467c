//! Weyl disks, the m-function by disk shrinkage, and subordinacy ratios.

use crate::error::{Error, Result};
use crate::linalg::{Mat2, C64};
use crate::potential::{BoundaryAngle, PotentialSpec};
use crate::propagate::{solution_with_l2, transfer, Tolerances, TransferMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylDisk {
    pub center: C64,
    pub radius: f64,
    pub z: C64,
    pub x: f64,
    pub alpha: BoundaryAngle,
}

impl WeylDisk {
    pub fn contains(&self, w: C64) -> bool {
        (w - self.center).norm() < self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MFunctionResult {
    pub m: C64,
    pub x_used: f64,
    pub radius_at_stop: f64,
}

/// `R_α = [[cos α, −sin α], [sin α, cos α]]`.
pub fn rotation(alpha: BoundaryAngle) -> Mat2 {
    let (s, c) = alpha.value().sin_cos();
    Mat2::real(c, -s, s, c)
}

fn mobius(m: &Mat2, w: C64) -> C64 {
    (m.a * w + m.b) / (m.c * w + m.d)
}

fn circumcircle(p: [C64; 3], x: f64) -> Result<(C64, f64)> {
    let (a, b, c) = (p[0], p[1], p[2]);
    let scale = (b - a).norm().max((c - a).norm());
    let u = b - a;
    let v = c - a;
    let cross = u.re * v.im - u.im * v.re;
    if !(cross.abs() > 1e-12 * scale * scale) || !cross.is_finite() {
        return Err(Error::DegenerateDisk { x });
    }
    let uu = u.norm_sqr();
    let vv = v.norm_sqr();
    let off = C64::new(v.im * uu - u.im * vv, u.re * vv - v.re * uu) / (2.0 * cross);
    Ok((a + off, off.norm()))
}

/// Disk from a precomputed `T(z; x, 0)`.
pub fn weyl_disk_from_transfer(t: &TransferMatrix, alpha: BoundaryAngle) -> Result<WeylDisk> {
    let z = t.z;
    if !(z.im > 0.0) {
        return Err(Error::NotUpperHalfPlane);
    }
    let x = t.x_to;
    let m = rotation(alpha) * t.inverse().normalized();
    let inf = if m.c.norm() == 0.0 {
        return Err(Error::DegenerateDisk { x });
    } else {
        m.a / m.c
    };
    let pts = [mobius(&m, C64::new(0.0, 0.0)), mobius(&m, C64::new(1.0, 0.0)), inf];
    let (center, radius) = circumcircle(pts, x)?;
    let disk = WeylDisk {
        center,
        radius,
        z,
        x,
        alpha,
    };
    if !disk.contains(mobius(&m, C64::new(0.0, 1.0))) {
        return Err(Error::DegenerateDisk { x });
    }
    Ok(disk)
}

/// `D_x^α(z)`: the image of the upper half-plane under `R_α T(z; x, 0)⁻¹`.
pub fn weyl_disk(
    pot: &PotentialSpec,
    z: C64,
    x: f64,
    alpha: BoundaryAngle,
    tol: &Tolerances,
) -> Result<WeylDisk> {
    if !(z.im > 0.0) {
        return Err(Error::NotUpperHalfPlane);
    }
    if !(x > 0.0) {
        return Err(Error::InvalidParams(format!("disk needs x > 0, got {x}")));
    }
    weyl_disk_from_transfer(&transfer(pot, z, x, 0.0, tol)?, alpha)
}

/// Doubles `x` from 1 until the disk radius drops below `radius_tol`. A step
/// that overshoots into a numerically degenerate disk is halved.
pub fn m_function(
    pot: &PotentialSpec,
    z: C64,
    alpha: BoundaryAngle,
    radius_tol: f64,
    x_max: f64,
    tol: &Tolerances,
) -> Result<MFunctionResult> {
    if !(z.im > 0.0) {
        return Err(Error::NotUpperHalfPlane);
    }
    if !(radius_tol > 0.0) {
        return Err(Error::InvalidParams("radius_tol must be positive".into()));
    }
    let mut x = 1.0f64.min(x_max);
    let mut t = transfer(pot, z, x, 0.0, tol)?;
    let mut d = weyl_disk_from_transfer(&t, alpha)?;
    loop {
        if d.radius < radius_tol {
            return Ok(MFunctionResult {
                m: d.center,
                x_used: x,
                radius_at_stop: d.radius,
            });
        }
        if x >= x_max {
            return Err(Error::NoConvergence(format!(
                "Weyl disk radius {:e} above {radius_tol:e} at x = {x}",
                d.radius
            )));
        }
        let mut next = (2.0 * x).min(x_max);
        let mut halvings = 0;
        loop {
            let tn = transfer(pot, z, next, x, tol)?.after(&t);
            match weyl_disk_from_transfer(&tn, alpha) {
                Ok(dn) => {
                    t = tn;
                    d = dn;
                    x = next;
                    break;
                }
                Err(Error::DegenerateDisk { .. }) if halvings < MAX_HALVINGS => {
                    next = x + 0.5 * (next - x);
                    halvings += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

const MAX_HALVINGS: usize = 40;

/// `‖φ‖_x / ‖θ‖_x` with `‖f‖_x² = ∫₀ˣ |f|²`.
pub fn subordinacy_ratio(
    pot: &PotentialSpec,
    e: f64,
    alpha: BoundaryAngle,
    x: f64,
    tol: &Tolerances,
) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParams(format!("x must be positive, got {x}")));
    }
    let (s, c) = alpha.value().sin_cos();
    let z = C64::new(e, 0.0);
    let re = |a: f64| C64::new(a, 0.0);
    let phi = solution_with_l2(pot, z, [re(c), re(-s)], 0.0, &[x], tol)?;
    let theta = solution_with_l2(pot, z, [re(s), re(c)], 0.0, &[x], tol)?;
    Ok((phi[0].l2_sq / theta[0].l2_sq).sqrt())
}
