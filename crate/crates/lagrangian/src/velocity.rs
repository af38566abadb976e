//! Velocity samplers for trajectory integration: closed-form fields for
//! oracle tests and gridded solver snapshots (cubic in space, linear in
//! time).

use nssl_spectral::PhysicalField;

/// A velocity field evaluable at arbitrary points and times, together with
/// its spatial Jacobian `jac[i][j] = ∂v_i/∂x_j`.
pub trait PointVelocity: Sync {
    fn velocity(&self, t: f64, x: &[f64; 3]) -> [f64; 3];
    fn jacobian(&self, t: f64, x: &[f64; 3]) -> [[f64; 3]; 3];
}

/// Closed-form velocity given by closures.
pub struct AnalyticVelocity<V, J>
where
    V: Fn(f64, &[f64; 3]) -> [f64; 3] + Sync,
    J: Fn(f64, &[f64; 3]) -> [[f64; 3]; 3] + Sync,
{
    pub velocity: V,
    pub jacobian: J,
}

impl<V, J> PointVelocity for AnalyticVelocity<V, J>
where
    V: Fn(f64, &[f64; 3]) -> [f64; 3] + Sync,
    J: Fn(f64, &[f64; 3]) -> [[f64; 3]; 3] + Sync,
{
    fn velocity(&self, t: f64, x: &[f64; 3]) -> [f64; 3] {
        (self.velocity)(t, x)
    }

    fn jacobian(&self, t: f64, x: &[f64; 3]) -> [[f64; 3]; 3] {
        (self.jacobian)(t, x)
    }
}

/// Rigid rotation about the x₃ axis through `center`: `v = ω(−x̃₂, x̃₁, 0)`.
pub fn rigid_rotation(
    omega: f64,
    center: [f64; 2],
) -> AnalyticVelocity<impl Fn(f64, &[f64; 3]) -> [f64; 3] + Sync, impl Fn(f64, &[f64; 3]) -> [[f64; 3]; 3] + Sync>
{
    AnalyticVelocity {
        velocity: move |_t, x: &[f64; 3]| {
            [-omega * (x[1] - center[1]), omega * (x[0] - center[0]), 0.0]
        },
        jacobian: move |_t, _x: &[f64; 3]| {
            [[0.0, -omega, 0.0], [omega, 0.0, 0.0], [0.0, 0.0, 0.0]]
        },
    }
}

/// One time level of a gridded velocity: physical samples plus the spectral
/// Jacobian components `∂_j v_i` stored at `data[i·ndim + j]`.
pub struct VelocitySnapshot {
    pub t: f64,
    pub v: PhysicalField,
    pub jac: PhysicalField,
}

impl VelocitySnapshot {
    /// Build from a spectral velocity (2D grids accepted: the third
    /// coordinate is ignored and `∂₃ = 0`).
    pub fn from_spectral(t: f64, v: &nssl_spectral::SpectralField) -> Self {
        let ndim = v.grid.ndim();
        let ncomp = v.ncomp();
        let mut jac_parts = Vec::with_capacity(ncomp * ndim);
        for i in 0..ncomp {
            let vi = v.component(i);
            for j in 0..ndim {
                jac_parts.push(nssl_spectral::deriv(&vi, j));
            }
        }
        VelocitySnapshot {
            t,
            v: v.to_physical(),
            jac: nssl_spectral::SpectralField::from_components(jac_parts).to_physical(),
        }
    }
}

/// Snapshot sequence sampled cubically in space and linearly in time.
pub struct SampledVelocity {
    pub snapshots: Vec<VelocitySnapshot>,
}

impl SampledVelocity {
    pub fn new(snapshots: Vec<VelocitySnapshot>) -> Self {
        assert!(!snapshots.is_empty());
        for w in snapshots.windows(2) {
            assert!(w[1].t > w[0].t, "snapshots must be time-ordered");
        }
        SampledVelocity { snapshots }
    }

    fn bracket(&self, t: f64) -> (usize, usize, f64) {
        let snaps = &self.snapshots;
        if snaps.len() == 1 || t <= snaps[0].t {
            return (0, 0, 0.0);
        }
        if t >= snaps[snaps.len() - 1].t {
            let i = snaps.len() - 1;
            return (i, i, 0.0);
        }
        let mut lo = 0;
        let mut hi = snaps.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if snaps[mid].t <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let theta = (t - snaps[lo].t) / (snaps[hi].t - snaps[lo].t);
        (lo, hi, theta)
    }
}

impl PointVelocity for SampledVelocity {
    fn velocity(&self, t: f64, x: &[f64; 3]) -> [f64; 3] {
        let (lo, hi, theta) = self.bracket(t);
        let a = self.snapshots[lo].v.sample_vector(x);
        if lo == hi {
            return a;
        }
        let b = self.snapshots[hi].v.sample_vector(x);
        [
            (1.0 - theta) * a[0] + theta * b[0],
            (1.0 - theta) * a[1] + theta * b[1],
            (1.0 - theta) * a[2] + theta * b[2],
        ]
    }

    fn jacobian(&self, t: f64, x: &[f64; 3]) -> [[f64; 3]; 3] {
        let (lo, hi, theta) = self.bracket(t);
        let sample = |snap: &VelocitySnapshot| -> [[f64; 3]; 3] {
            let ndim = snap.v.grid.ndim();
            let ncomp = snap.v.ncomp();
            let mut j = [[0.0; 3]; 3];
            for i in 0..ncomp {
                for a in 0..ndim {
                    j[i][a] = snap.jac.sample_cubic(i * ndim + a, x);
                }
            }
            j
        };
        let a = sample(&self.snapshots[lo]);
        if lo == hi {
            return a;
        }
        let b = sample(&self.snapshots[hi]);
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for jx in 0..3 {
                out[i][jx] = (1.0 - theta) * a[i][jx] + theta * b[i][jx];
            }
        }
        out
    }
}
