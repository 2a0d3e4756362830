//! Accessibility of boundary and interior points from the outer cylinder.
//!
//! Three layers:
//! - boundary fans: the region between the two extreme characteristics
//!   from a seed, every interior point of which is reachable along
//!   time-like curves inside the boundary surface itself;
//! - an interior path construction that descends from an interior point
//!   to the boundary at speed 1/2, waits on a vertical line, and splices
//!   a boundary certificate;
//! - a grid reachability oracle over spacetime: the reachable set is
//!   advanced by `R(t+Δt) = dilate(R(t), Δt) ∩ Ω_{t+Δt} ∩ {|x| ≤ ρ}`.
//!
//! Grid state is a per-cell *witness*: exact continuum coordinates of a
//! point known to lie in the current reachable set, kept sub-cell
//! accurate so first-arrival times converge linearly in the grid
//! spacing. Dilation moves each witness toward its cell (one Euclidean
//! distance-transform relaxation per step spreads the nearest witness),
//! masking re-validates witnesses against the obstacle slice. The
//! dilation is morphological, matching the definition above: obstacles
//! thinner than one step with free space on both sides are transparent;
//! the domains assembled here always back a thin wall with solid.

use crate::boundary::{BoundaryCurve2D, SigmaDomain};
use crate::characteristics::{integrate_characteristic, SpeedField, Termination, Trajectory};
use crate::error::{CoreError, Result};
use crate::numerics::{add, dot, norm, scale, sub};
use crate::stefanov::ChannelGeometry;
use serde::{Deserialize, Serialize};
use std::io::{Read as _, Write as _};

// ---------------------------------------------------------------------
// Domains
// ---------------------------------------------------------------------

/// Spacetime domain: the free region Ω_t inside the cylinder |x| ≤ ρ.
#[derive(Debug, Clone)]
pub enum Domain {
    /// No obstacle.
    Empty { rho: f64 },
    /// Stationary disk obstacle.
    Disk {
        center: [f64; 2],
        radius: f64,
        rho: f64,
    },
    /// Obstacle enclosed by a closed moving curve (circle-like families
    /// get exact point tests; Fourier curves use a sampled polygon).
    CurveObstacle { curve: BoundaryCurve2D, rho: f64 },
    /// The travelling-wall assembly: a stationary hull filled solid
    /// except for the moving channel slit under the wall, open only at
    /// its right mouth.
    Channel(ChannelDomain),
}

/// Hull-plus-slit assembly around a travelling wall.
///
/// The hull is a stationary rounded rectangle covering the wall for all
/// time; free space inside it is exactly the channel tube
/// `{wall(σ,t) + η ν : 0 < η < ε}`. The tube's right mouth coincides
/// with the hull's right edge, so the only way into the region around
/// the left mouth is through the channel.
#[derive(Debug, Clone)]
pub struct ChannelDomain {
    pub geometry: ChannelGeometry,
    pub rho: f64,
    pub hull_pad_left: f64,
    pub hull_pad_vertical: f64,
    pub corner_radius: f64,
}

impl ChannelDomain {
    pub fn new(geometry: ChannelGeometry, rho: f64) -> Self {
        Self {
            geometry,
            rho,
            hull_pad_left: 0.3,
            hull_pad_vertical: 0.3,
            corner_radius: 0.2,
        }
    }

    pub fn half_width(&self) -> f64 {
        self.geometry.params.inner_half_width + self.geometry.params.taper_width
    }

    fn hull_bounds(&self) -> ([f64; 2], [f64; 2]) {
        let w = self.half_width();
        let amp = match self.geometry.params.wave {
            crate::boundary::WaveShape::Sine { amplitude } => amplitude.abs(),
        };
        (
            [-w - self.hull_pad_left, -amp - self.hull_pad_vertical],
            [w, amp + self.hull_pad_vertical],
        )
    }

    fn inside_hull(&self, x: [f64; 2]) -> bool {
        let (lo, hi) = self.hull_bounds();
        let rc = self.corner_radius;
        if x[0] < lo[0] || x[0] > hi[0] || x[1] < lo[1] || x[1] > hi[1] {
            return false;
        }
        let cx = x[0].clamp(lo[0] + rc, hi[0] - rc);
        let cy = x[1].clamp(lo[1] + rc, hi[1] - rc);
        let d = norm(sub(x, [cx, cy]));
        d <= rc
    }

    /// Signed offset below the wall: η > 0 strictly between the wall and
    /// its ε-offset means the point is inside the channel tube.
    fn tube_offset(&self, x: [f64; 2], t: f64) -> Option<f64> {
        let w = self.half_width();
        if x[0].abs() >= w {
            return None;
        }
        let params = &self.geometry.params;
        // Quick vertical reject: the tube's vertical extent below the
        // wall graph is at most ε √(1 + g²), far below 0.1.
        let jet0 = params.slope_jet(x[0], t);
        let v = jet0.height - x[1];
        if !(-0.02..=0.1).contains(&v) {
            return None;
        }
        // Newton on (x − wall(σ))·x_σ(σ) = 0 from σ = x₁.
        let mut sigma = x[0];
        for _ in 0..6 {
            let jet = params.slope_jet(sigma, t);
            let wall = [sigma, jet.height];
            let xs = [1.0, jet.g];
            let r = sub(x, wall);
            let f = dot(r, xs);
            let df = -(1.0 + jet.g * jet.g) + r[1] * jet.g_sigma;
            if df.abs() < 1e-12 {
                break;
            }
            let step = f / df;
            sigma -= step;
            if step.abs() < 1e-14 {
                break;
            }
        }
        if sigma.abs() >= w {
            return None;
        }
        let jet = params.slope_jet(sigma, t);
        let wall = [sigma, jet.height];
        let one_g2 = (1.0 + jet.g * jet.g).sqrt();
        // Downward unit normal (g, −1)/√(1+g²).
        let nu = [jet.g / one_g2, -1.0 / one_g2];
        Some(dot(sub(x, wall), nu))
    }

    pub fn is_free(&self, x: [f64; 2], t: f64) -> bool {
        if !self.inside_hull(x) {
            return true;
        }
        match self.tube_offset(x, t) {
            Some(eta) => eta > 1e-12 && eta < self.geometry.epsilon - 1e-12,
            None => false,
        }
    }

    /// Cells crossing the segment {x₁ = −M−L} × [−ε, 0]: the left mouth.
    pub fn left_mouth_probes(&self, n: usize) -> Vec<[f64; 2]> {
        let w = self.half_width();
        let eps = self.geometry.epsilon;
        (0..=n)
            .map(|i| [-w, -eps * i as f64 / n as f64])
            .collect()
    }
}

impl Domain {
    pub fn rho(&self) -> f64 {
        match self {
            Domain::Empty { rho } => *rho,
            Domain::Disk { rho, .. } => *rho,
            Domain::CurveObstacle { rho, .. } => *rho,
            Domain::Channel(c) => c.rho,
        }
    }

    /// Per-time view used by the grid engine and path checks.
    pub fn slice(&self, t: f64) -> SliceView<'_> {
        match self {
            Domain::Empty { .. } => SliceView::Free,
            Domain::Disk { center, radius, .. } => SliceView::Disk {
                center: *center,
                radius: *radius,
            },
            Domain::CurveObstacle { curve, .. } => match circleish(curve, t) {
                Some((center, radius)) => SliceView::Disk { center, radius },
                None => {
                    let n = 2048;
                    let mut pts = Vec::with_capacity(n);
                    for i in 0..n {
                        let sigma = i as f64 / n as f64;
                        pts.push(curve.eval_unchecked(sigma, t).x);
                    }
                    SliceView::Polygon { points: pts }
                }
            },
            Domain::Channel(c) => SliceView::Channel { domain: c, t },
        }
    }

    pub fn is_free(&self, x: [f64; 2], t: f64) -> bool {
        if norm(x) > self.rho() {
            return false;
        }
        self.slice(t).is_free(x)
    }

    /// Obstacle boundary samples at time t (used for apex search and the
    /// interior construction); empty for the empty domain.
    pub fn boundary_samples(&self, t: f64, n: usize) -> Vec<[f64; 2]> {
        match self {
            Domain::Empty { .. } => Vec::new(),
            Domain::Disk { center, radius, .. } => (0..n)
                .map(|i| {
                    let a = crate::boundary::TWO_PI * i as f64 / n as f64;
                    [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
                })
                .collect(),
            Domain::CurveObstacle { curve, .. } => (0..n)
                .map(|i| curve.eval_unchecked(i as f64 / n as f64, t).x)
                .collect(),
            Domain::Channel(c) => {
                let w = c.half_width();
                (0..n)
                    .map(|i| {
                        let sigma = -w + 2.0 * w * i as f64 / n as f64;
                        let jet = c.geometry.params.slope_jet(sigma, t);
                        [sigma, jet.height]
                    })
                    .collect()
            }
        }
    }
}

fn circleish(curve: &BoundaryCurve2D, t: f64) -> Option<([f64; 2], f64)> {
    use crate::boundary::CurveFamily as F;
    match curve.family() {
        F::Circle | F::TranslatingCurve | F::BreathingCircle => {
            // Center and radius recovered from two probe points.
            let a = curve.eval_unchecked(0.0, t).x;
            let b = curve.eval_unchecked(0.5, t).x;
            let center = scale(add(a, b), 0.5);
            Some((center, 0.5 * norm(sub(a, b))))
        }
        _ => None,
    }
}

/// One time slice of a domain.
pub enum SliceView<'a> {
    Free,
    Disk { center: [f64; 2], radius: f64 },
    Polygon { points: Vec<[f64; 2]> },
    Channel { domain: &'a ChannelDomain, t: f64 },
}

impl SliceView<'_> {
    pub fn is_free(&self, x: [f64; 2]) -> bool {
        match self {
            SliceView::Free => true,
            SliceView::Disk { center, radius } => norm(sub(x, *center)) >= *radius,
            SliceView::Polygon { points } => !point_in_polygon(x, points),
            SliceView::Channel { domain, t } => domain.is_free(x, *t),
        }
    }
}

fn point_in_polygon(x: [f64; 2], pts: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = pts.len();
    let mut j = n - 1;
    for i in 0..n {
        let (pi, pj) = (pts[i], pts[j]);
        if (pi[1] > x[1]) != (pj[1] > x[1]) {
            let t = (x[1] - pi[1]) / (pj[1] - pi[1]);
            if x[0] < pi[0] + t * (pj[0] - pi[0]) {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

// ---------------------------------------------------------------------
// Apex seeds and boundary fans
// ---------------------------------------------------------------------

/// A boundary point of maximal |x|, accessible by a radial light ray,
/// replicated once per period.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ApexSeed {
    pub sigma: f64,
    pub t: f64,
    pub radius: f64,
}

/// Maximizers of |x(σ, t)| over one period, replicated at t + nT for
/// n = 0..periods. When every σ ties (circles), σ = 0 represents the
/// orbit of maximizers.
pub fn apex_seeds(curve: &BoundaryCurve2D, periods: usize, resolution: usize) -> Vec<ApexSeed> {
    let n = resolution.max(128);
    let period = curve.time_period().unwrap_or(1.0);
    let (s_lo, s_span) = match curve.sigma_domain() {
        SigmaDomain::Circle { period } => (0.0, period),
        SigmaDomain::Interval { lo, hi } => (lo, hi - lo),
    };
    let mut best = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    let mut radius_min = f64::INFINITY;
    for j in 0..=n {
        let t = period * j as f64 / n as f64;
        for i in 0..n {
            let sigma = s_lo + s_span * i as f64 / n as f64;
            let r = norm(curve.eval_unchecked(sigma, t).x);
            radius_min = radius_min.min(r);
            if r > best.2 + 1e-12 {
                best = (sigma, t, r);
            }
        }
    }
    let sigma = if best.2 - radius_min < 1e-9 {
        s_lo // every parameter ties; return the canonical representative
    } else {
        best.0
    };
    (0..periods.max(1))
        .map(|k| ApexSeed {
            sigma,
            t: best.1 + k as f64 * period,
            radius: best.2,
        })
        .collect()
}

/// One time sample of an accessibility fan.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FanSample {
    pub t: f64,
    pub lo: f64,
    pub hi: f64,
}

/// The fan of boundary points reachable from a seed along time-like
/// curves inside the boundary: everything strictly between the slow and
/// fast characteristics through the seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AccessFan {
    pub seed: (f64, f64),
    pub samples: Vec<FanSample>,
    /// First time at which the fan spans a full σ-period (circle
    /// domains only).
    pub coverage_time: Option<f64>,
    pub lower_termination: Termination,
    pub upper_termination: Termination,
}

impl AccessFan {
    /// Whether (σ, t) lies strictly inside the fan, modulo σ-periodicity
    /// on circle domains.
    pub fn contains(&self, curve: &BoundaryCurve2D, sigma: f64, t: f64) -> bool {
        if t < self.seed.1 || self.samples.is_empty() {
            return false;
        }
        let last = self.samples.last().unwrap();
        if t > last.t {
            return false;
        }
        let idx = self
            .samples
            .partition_point(|s| s.t <= t)
            .saturating_sub(1)
            .min(self.samples.len() - 2);
        let (a, b) = (self.samples[idx], self.samples[idx + 1]);
        let w = if b.t > a.t { (t - a.t) / (b.t - a.t) } else { 0.0 };
        let lo = a.lo + w * (b.lo - a.lo);
        let hi = a.hi + w * (b.hi - a.hi);
        match curve.sigma_domain() {
            SigmaDomain::Circle { period } => {
                if hi - lo >= period {
                    return true;
                }
                let k = ((lo - sigma) / period).ceil();
                let s = sigma + k * period;
                s > lo && s < hi
            }
            SigmaDomain::Interval { .. } => sigma > lo && sigma < hi,
        }
    }
}

/// Integrate the two extreme characteristics forward from a seed and
/// record the fan envelope. Interval-domain sides hold their edge value
/// after leaving the domain.
pub fn boundary_fan(
    curve: &BoundaryCurve2D,
    seed: (f64, f64),
    horizon: f64,
) -> Result<AccessFan> {
    let (sigma0, t0) = seed;
    let lower = integrate_characteristic(&SpeedField::lower(curve.clone()), sigma0, t0, t0 + horizon)?;
    let upper = integrate_characteristic(&SpeedField::upper(curve.clone()), sigma0, t0, t0 + horizon)?;
    let n = 512usize;
    let mut samples = Vec::with_capacity(n + 1);
    let span = match curve.sigma_domain() {
        SigmaDomain::Circle { period } => Some(period),
        SigmaDomain::Interval { .. } => None,
    };
    let mut coverage = None;
    let mut prev: Option<FanSample> = None;
    for i in 0..=n {
        let t = t0 + horizon * i as f64 / n as f64;
        let lo = sample_clamped(&lower, t);
        let hi = sample_clamped(&upper, t);
        let s = FanSample { t, lo, hi };
        if let (Some(period), None) = (span, coverage) {
            if hi - lo >= period {
                // Refine the crossing linearly between samples.
                coverage = Some(match prev {
                    Some(p) => {
                        let w0 = p.hi - p.lo;
                        let w1 = hi - lo;
                        if w1 > w0 {
                            p.t + (period - w0) / (w1 - w0) * (s.t - p.t) - t0
                        } else {
                            t - t0
                        }
                    }
                    None => t - t0,
                });
            }
        }
        prev = Some(s);
        samples.push(s);
    }
    Ok(AccessFan {
        seed,
        samples,
        coverage_time: coverage,
        lower_termination: lower.termination,
        upper_termination: upper.termination,
    })
}

fn sample_clamped(traj: &Trajectory, t: f64) -> f64 {
    let (t_end, s_end) = traj.end();
    if t >= t_end {
        s_end
    } else {
        traj.sigma_at(t)
    }
}

// ---------------------------------------------------------------------
// Grid reachability
// ---------------------------------------------------------------------

/// Source of reachability: where subluminal curves may start.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    /// The full outer ring |x| = ρ, active at every step (the default)
    /// or only at the start.
    CylinderRing { start_only: bool },
    /// Specific points, active at every step or only at the start.
    Points {
        points: Vec<[f64; 2]>,
        start_only: bool,
    },
}

impl Default for Source {
    fn default() -> Self {
        Source::CylinderRing { start_only: false }
    }
}

/// Grid parameters for [`reach_forward`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReachConfig {
    pub dx: f64,
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// Record a boolean slice every this many steps.
    pub slice_stride: usize,
    pub source: Source,
    /// Worker threads for mask evaluation (1 = sequential; results are
    /// identical for any count).
    pub threads: usize,
}

impl ReachConfig {
    pub fn new(dx: f64, dt: f64, t_start: f64, t_end: f64) -> Self {
        Self {
            dx,
            dt,
            t_start,
            t_end,
            slice_stride: 64,
            source: Source::default(),
            threads: 1,
        }
    }
}

/// Spacetime occupancy produced by [`reach_forward`].
#[derive(Debug, Clone)]
pub struct ReachSet {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub origin: [f64; 2],
    pub rho: f64,
    pub dt: f64,
    pub t_start: f64,
    pub steps: usize,
    pub slice_times: Vec<f64>,
    /// One bitmask per recorded slice, row-major, 64 cells per word.
    pub slices: Vec<Vec<u64>>,
    /// Earliest time each cell was reached (+∞ if never).
    pub first_arrival: Vec<f64>,
}

impl ReachSet {
    pub fn center(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + (i as f64 + 0.5) * self.dx,
            self.origin[1] + (j as f64 + 0.5) * self.dx,
        ]
    }

    pub fn cell_of(&self, x: [f64; 2]) -> Option<(usize, usize)> {
        let i = ((x[0] - self.origin[0]) / self.dx).floor();
        let j = ((x[1] - self.origin[1]) / self.dx).floor();
        if i < 0.0 || j < 0.0 || i >= self.nx as f64 || j >= self.ny as f64 {
            None
        } else {
            Some((i as usize, j as usize))
        }
    }

    pub fn slice_bit(&self, slice: usize, i: usize, j: usize) -> bool {
        let idx = j * self.nx + i;
        (self.slices[slice][idx / 64] >> (idx % 64)) & 1 == 1
    }

    /// Any reached bit within `radius_cells` (Chebyshev) of x in a slice.
    pub fn reachable_near(&self, slice: usize, x: [f64; 2], radius_cells: usize) -> bool {
        let Some((ci, cj)) = self.cell_of(x) else {
            return false;
        };
        let r = radius_cells as isize;
        for dj in -r..=r {
            for di in -r..=r {
                let i = ci as isize + di;
                let j = cj as isize + dj;
                if i >= 0 && j >= 0 && (i as usize) < self.nx && (j as usize) < self.ny {
                    if self.slice_bit(slice, i as usize, j as usize) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Whether any cell within `radius_cells` of x was ever reached.
    pub fn ever_reached_near(&self, x: [f64; 2], radius_cells: usize) -> bool {
        let Some((ci, cj)) = self.cell_of(x) else {
            return false;
        };
        let r = radius_cells as isize;
        for dj in -r..=r {
            for di in -r..=r {
                let i = ci as isize + di;
                let j = cj as isize + dj;
                if i >= 0 && j >= 0 && (i as usize) < self.nx && (j as usize) < self.ny {
                    if self.first_arrival[(j as usize) * self.nx + i as usize].is_finite() {
                        return true;
                    }
                }
            }
        }
        false
    }

    pub fn first_arrival_at(&self, x: [f64; 2]) -> Option<f64> {
        self.cell_of(x).map(|(i, j)| self.first_arrival[j * self.nx + i])
    }

    /// Area of a recorded slice.
    pub fn slice_measure(&self, slice: usize) -> f64 {
        let count: u32 = self.slices[slice].iter().map(|w| w.count_ones()).sum();
        count as f64 * self.dx * self.dx
    }

    /// Persist as a JSON header line followed by raw little-endian slice
    /// words and the first-arrival array.
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let header = serde_json::json!({
            "nx": self.nx, "ny": self.ny, "dx": self.dx,
            "origin": self.origin, "rho": self.rho,
            "dt": self.dt, "t_start": self.t_start, "steps": self.steps,
            "slice_times": self.slice_times,
            "words_per_slice": self.slices.first().map_or(0, |s| s.len()),
            "slices": self.slices.len(),
            "first_arrival": true,
        });
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(&mut f, &header).map_err(|e| CoreError::Io(e.to_string()))?;
        f.write_all(b"\n")?;
        for s in &self.slices {
            for w in s {
                f.write_all(&w.to_le_bytes())?;
            }
        }
        for v in &self.first_arrival {
            f.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut header = Vec::new();
        let mut byte = [0u8; 1];
        loop {
            f.read_exact(&mut byte)?;
            if byte[0] == b'\n' {
                break;
            }
            header.push(byte[0]);
        }
        let h: serde_json::Value =
            serde_json::from_slice(&header).map_err(|e| CoreError::Io(e.to_string()))?;
        let nx = h["nx"].as_u64().unwrap() as usize;
        let ny = h["ny"].as_u64().unwrap() as usize;
        let n_slices = h["slices"].as_u64().unwrap() as usize;
        let words = h["words_per_slice"].as_u64().unwrap() as usize;
        let mut slices = Vec::with_capacity(n_slices);
        let mut buf = [0u8; 8];
        for _ in 0..n_slices {
            let mut s = Vec::with_capacity(words);
            for _ in 0..words {
                f.read_exact(&mut buf)?;
                s.push(u64::from_le_bytes(buf));
            }
            slices.push(s);
        }
        let mut arrival = Vec::with_capacity(nx * ny);
        for _ in 0..nx * ny {
            f.read_exact(&mut buf)?;
            arrival.push(f64::from_le_bytes(buf));
        }
        Ok(Self {
            nx,
            ny,
            dx: h["dx"].as_f64().unwrap(),
            origin: [
                h["origin"][0].as_f64().unwrap(),
                h["origin"][1].as_f64().unwrap(),
            ],
            rho: h["rho"].as_f64().unwrap(),
            dt: h["dt"].as_f64().unwrap(),
            t_start: h["t_start"].as_f64().unwrap(),
            steps: h["steps"].as_u64().unwrap() as usize,
            slice_times: h["slice_times"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_f64().unwrap())
                .collect(),
            slices,
            first_arrival: arrival,
        })
    }
}

struct Engine<'a> {
    domain: &'a Domain,
    nx: usize,
    ny: usize,
    dx: f64,
    origin: [f64; 2],
    rho: f64,
    /// Witness coordinates per cell ([NAN, NAN] when absent).
    witness: Vec<[f64; 2]>,
    /// Squared distance cell-center → witness (INFINITY when absent).
    d2: Vec<f64>,
    mask: Vec<bool>,
    arrival: Vec<f64>,
    arrival_gate: f64,
    snap: f64,
}

impl<'a> Engine<'a> {
    fn center(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + (i as f64 + 0.5) * self.dx,
            self.origin[1] + (j as f64 + 0.5) * self.dx,
        ]
    }

    fn build_mask(&mut self, t: f64, threads: usize) {
        let slice = self.domain.slice(t);
        let nx = self.nx;
        let rho2 = self.rho * self.rho;
        let origin = self.origin;
        let dx = self.dx;
        let row_free = |j: usize, out: &mut [bool]| {
            let y = origin[1] + (j as f64 + 0.5) * dx;
            for (i, cell) in out.iter_mut().enumerate() {
                let x = [origin[0] + (i as f64 + 0.5) * dx, y];
                *cell = x[0] * x[0] + y * y <= rho2 && slice.is_free(x);
            }
        };
        if threads <= 1 {
            for j in 0..self.ny {
                let (a, b) = (j * nx, (j + 1) * nx);
                row_free(j, &mut self.mask[a..b]);
            }
        } else {
            let rows_per = self.ny.div_ceil(threads).max(1);
            let chunks: Vec<(usize, &mut [bool])> = self
                .mask
                .chunks_mut(nx * rows_per)
                .enumerate()
                .map(|(c, chunk)| (c * rows_per, chunk))
                .collect();
            std::thread::scope(|scope| {
                for (j0, chunk) in chunks {
                    let row_free = &row_free;
                    scope.spawn(move || {
                        for (r, row) in chunk.chunks_mut(nx).enumerate() {
                            row_free(j0 + r, row);
                        }
                    });
                }
            });
        }
    }

    /// Dilate by dt: move every witness toward its cell, re-validating
    /// against the new mask time.
    fn move_witnesses(&mut self, dt: f64, t_next: f64) {
        let slice = self.domain.slice(t_next);
        for j in 0..self.ny {
            for i in 0..self.nx {
                let idx = j * self.nx + i;
                if !self.d2[idx].is_finite() {
                    continue;
                }
                let y = self.center(i, j);
                let a = self.witness[idx];
                let d = norm(sub(y, a));
                let a_new = if d <= dt {
                    y
                } else {
                    add(a, scale(sub(y, a), dt / d))
                };
                if norm(a_new) <= self.rho && slice.is_free(a_new) {
                    self.witness[idx] = a_new;
                    let dn = sub(y, a_new);
                    self.d2[idx] = dot(dn, dn);
                } else if norm(a) <= self.rho && slice.is_free(a) {
                    // keep the old witness; it is still in the reach set
                } else {
                    self.witness[idx] = [f64::NAN, f64::NAN];
                    self.d2[idx] = f64::INFINITY;
                }
            }
        }
    }

    /// Two Euclidean distance-transform relaxation scans spreading each
    /// cell's nearest witness through the free region.
    fn relax(&mut self) {
        let nx = self.nx as isize;
        let ny = self.ny as isize;
        let idx = |i: isize, j: isize| (j * nx + i) as usize;
        let forward: [(isize, isize); 4] = [(-1, 0), (-1, -1), (0, -1), (1, -1)];
        let backward: [(isize, isize); 4] = [(1, 0), (1, 1), (0, 1), (-1, 1)];
        for pass in 0..2 {
            let offs = if pass == 0 { &forward } else { &backward };
            let jr: Vec<isize> = if pass == 0 {
                (0..ny).collect()
            } else {
                (0..ny).rev().collect()
            };
            for &j in &jr {
                let ir: Vec<isize> = if pass == 0 {
                    (0..nx).collect()
                } else {
                    (0..nx).rev().collect()
                };
                for i in ir {
                    let c = idx(i, j);
                    if !self.mask[c] {
                        continue;
                    }
                    let y = self.center(i as usize, j as usize);
                    let mut best = self.d2[c];
                    let mut best_w = self.witness[c];
                    for &(di, dj) in offs {
                        let (ni, nj) = (i + di, j + dj);
                        if ni < 0 || nj < 0 || ni >= nx || nj >= ny {
                            continue;
                        }
                        let nc = idx(ni, nj);
                        if !self.mask[nc] || !self.d2[nc].is_finite() {
                            continue;
                        }
                        let w = self.witness[nc];
                        let d = sub(y, w);
                        let d2 = dot(d, d);
                        if d2 < best {
                            best = d2;
                            best_w = w;
                        }
                    }
                    self.d2[c] = best;
                    self.witness[c] = best_w;
                }
            }
        }
    }

    fn inject(&mut self, source: &Source, t: f64) {
        let slice = self.domain.slice(t);
        match source {
            Source::CylinderRing { .. } => {
                let band = 2.5 * self.dx;
                for j in 0..self.ny {
                    for i in 0..self.nx {
                        let y = self.center(i, j);
                        let r = norm(y);
                        if (r - self.rho).abs() > band || r < 1e-12 {
                            continue;
                        }
                        let w = scale(y, self.rho / r);
                        if !slice.is_free(w) {
                            continue;
                        }
                        let d = sub(y, w);
                        let d2 = dot(d, d);
                        let idx = j * self.nx + i;
                        if d2 < self.d2[idx] {
                            self.d2[idx] = d2;
                            self.witness[idx] = w;
                        }
                    }
                }
            }
            Source::Points { points, .. } => {
                for p in points {
                    if norm(*p) > self.rho || !slice.is_free(*p) {
                        continue;
                    }
                    let ci = ((p[0] - self.origin[0]) / self.dx).floor() as isize;
                    let cj = ((p[1] - self.origin[1]) / self.dx).floor() as isize;
                    for dj in -3..=3isize {
                        for di in -3..=3isize {
                            let (i, j) = (ci + di, cj + dj);
                            if i < 0 || j < 0 || i >= self.nx as isize || j >= self.ny as isize {
                                continue;
                            }
                            let idx = j as usize * self.nx + i as usize;
                            let y = self.center(i as usize, j as usize);
                            let d = sub(y, *p);
                            let d2 = dot(d, d);
                            if d2 < self.d2[idx] {
                                self.d2[idx] = d2;
                                self.witness[idx] = *p;
                            }
                        }
                    }
                }
            }
        }
    }

    fn record_arrivals(&mut self, t: f64) {
        let gate2 = self.arrival_gate * self.arrival_gate;
        for idx in 0..self.nx * self.ny {
            if !self.mask[idx] || self.d2[idx] > gate2 {
                continue;
            }
            let candidate = t + self.d2[idx].sqrt();
            if candidate < self.arrival[idx] {
                self.arrival[idx] = candidate;
            }
        }
    }

    fn snapshot(&self) -> Vec<u64> {
        let n = self.nx * self.ny;
        let snap2 = self.snap * self.snap;
        let mut words = vec![0u64; n.div_ceil(64)];
        for idx in 0..n {
            if self.mask[idx] && self.d2[idx] <= snap2 {
                words[idx / 64] |= 1 << (idx % 64);
            }
        }
        words
    }
}

/// Time-stepped reachability: seed from the source, then per step dilate
/// the witness field by Δt, mask by the obstacle slice and the cylinder,
/// and record sub-cell first arrivals.
pub fn reach_forward(domain: &Domain, cfg: &ReachConfig) -> Result<ReachSet> {
    if cfg.dt > 0.5 * cfg.dx + 1e-12 {
        return Err(CoreError::CflViolation {
            dt: cfg.dt,
            dx: cfg.dx,
        });
    }
    if cfg.t_end <= cfg.t_start || cfg.dx <= 0.0 || cfg.dt <= 0.0 {
        return Err(CoreError::InvalidConfig(
            "reach grid needs positive dx, dt and a forward time range".into(),
        ));
    }
    let rho = domain.rho();
    let n = ((2.0 * rho) / cfg.dx).ceil() as usize;
    let origin = [-rho, -rho];
    let steps = ((cfg.t_end - cfg.t_start) / cfg.dt).round().max(1.0) as usize;
    let cells = n * n;
    let mut eng = Engine {
        domain,
        nx: n,
        ny: n,
        dx: cfg.dx,
        origin,
        rho,
        witness: vec![[f64::NAN, f64::NAN]; cells],
        d2: vec![f64::INFINITY; cells],
        mask: vec![false; cells],
        arrival: vec![f64::INFINITY; cells],
        arrival_gate: 2.5 * cfg.dx,
        snap: 0.5 * cfg.dx,
    };
    let start_only = match &cfg.source {
        Source::CylinderRing { start_only } => *start_only,
        Source::Points { start_only, .. } => *start_only,
    };
    let mut slice_times = Vec::new();
    let mut slices = Vec::new();

    eng.build_mask(cfg.t_start, cfg.threads);
    eng.inject(&cfg.source, cfg.t_start);
    eng.relax();
    eng.record_arrivals(cfg.t_start);
    slice_times.push(cfg.t_start);
    slices.push(eng.snapshot());

    for step in 1..=steps {
        let t = cfg.t_start + step as f64 * cfg.dt;
        eng.build_mask(t, cfg.threads);
        eng.move_witnesses(cfg.dt, t);
        if !start_only {
            eng.inject(&cfg.source, t);
        }
        eng.relax();
        eng.record_arrivals(t);
        if step % cfg.slice_stride == 0 || step == steps {
            slice_times.push(t);
            slices.push(eng.snapshot());
        }
    }
    Ok(ReachSet {
        nx: n,
        ny: n,
        dx: cfg.dx,
        origin,
        rho,
        dt: cfg.dt,
        t_start: cfg.t_start,
        steps,
        slice_times,
        slices,
        first_arrival: eng.arrival,
    })
}

// ---------------------------------------------------------------------
// Interior access paths
// ---------------------------------------------------------------------

/// A piecewise path (t, x(t)) presented as labelled segments.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathSegment {
    pub label: String,
    /// (t, x) samples in forward time order.
    pub points: Vec<(f64, [f64; 2])>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AccessPath {
    pub segments: Vec<PathSegment>,
    pub max_speed: f64,
    pub departure: (f64, [f64; 2]),
    pub arrival: (f64, [f64; 2]),
}

impl AccessPath {
    /// Verify speeds ≤ 1 (with slack) and membership in the free region
    /// at every sample.
    pub fn validate(&self, domain: &Domain, tol: f64) -> Result<()> {
        for seg in &self.segments {
            for w in seg.points.windows(2) {
                let (t0, x0) = w[0];
                let (t1, x1) = w[1];
                if t1 < t0 - 1e-12 {
                    return Err(CoreError::InvalidConfig(format!(
                        "segment {} runs backward in time",
                        seg.label
                    )));
                }
                let dt = (t1 - t0).max(1e-300);
                let speed = norm(sub(x1, x0)) / dt;
                if speed > 1.0 + tol {
                    return Err(CoreError::InvalidConfig(format!(
                        "segment {} exceeds speed 1: {speed}",
                        seg.label
                    )));
                }
            }
            for &(t, x) in &seg.points {
                if norm(x) > domain.rho() + 1e-9 {
                    return Err(CoreError::InvalidConfig(format!(
                        "segment {} leaves the cylinder",
                        seg.label
                    )));
                }
                if !domain.slice(t).is_free(x) && !near_boundary(domain, x, t, 1e-6) {
                    return Err(CoreError::InvalidConfig(format!(
                        "segment {} enters the obstacle at t={t}",
                        seg.label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.arrival.0 - self.departure.0
    }
}

fn near_boundary(domain: &Domain, x: [f64; 2], t: f64, tol: f64) -> bool {
    // Tolerate samples within `tol` of the free region (paths may touch
    // the boundary).
    for d in [
        [tol, 0.0],
        [-tol, 0.0],
        [0.0, tol],
        [0.0, -tol],
    ] {
        if domain.slice(t).is_free(add(x, d)) {
            return true;
        }
    }
    false
}

/// Outcome of the interior construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum PathOutcome {
    Accessible(AccessPath),
    Inaccessible { reason: String },
}

/// Construct a subluminal path from the outer ring to an interior point
/// (x₀, t₀): try the radial line first; otherwise descend along a
/// spatial path toward the obstacle at speed 1/2, wait on a vertical
/// line, and splice a boundary certificate built from an apex seed, a
/// radial light ray, and a blended characteristic aimed by bisection.
pub fn interior_access_path(
    domain: &Domain,
    curve: Option<&BoundaryCurve2D>,
    point: [f64; 2],
    t0: f64,
) -> Result<PathOutcome> {
    let rho = domain.rho();
    if norm(point) >= rho {
        return Err(CoreError::InvalidConfig(
            "interior point must lie strictly inside the cylinder".into(),
        ));
    }
    if !domain.slice(t0).is_free(point) {
        return Err(CoreError::InvalidConfig(
            "interior point lies inside the obstacle".into(),
        ));
    }

    // Radial attempt: inward light ray at speed 1.
    if let Some(path) = radial_path(domain, point, t0) {
        return Ok(PathOutcome::Accessible(path));
    }
    let Some(curve) = curve else {
        return Ok(PathOutcome::Inaccessible {
            reason: "radial ray blocked and no boundary curve available for a certificate".into(),
        });
    };

    // Spatial path from the point to the nearest obstacle boundary point
    // at t0.
    let boundary_pts = domain.boundary_samples(t0, 2048);
    let (mut b, mut best) = ([0.0, 0.0], f64::INFINITY);
    for p in &boundary_pts {
        let d = norm(sub(*p, point));
        if d < best {
            best = d;
            b = *p;
        }
    }
    let l = best;
    let dir = scale(sub(b, point), 1.0 / l);

    // First parameter along the path whose vertical line meets the
    // moving boundary (sweep over one period).
    let period = curve.time_period().unwrap_or(1.0);
    let n_scan = 400;
    let mut sigma0 = l;
    'scan: for i in 0..n_scan {
        let s = l * i as f64 / n_scan as f64;
        let q = add(point, scale(dir, s));
        for j in 0..64 {
            let t = t0 + period * j as f64 / 64.0;
            if !domain.slice(t).is_free(q) {
                sigma0 = s;
                break 'scan;
            }
        }
    }
    let nudge = (1e-3 * l).min(0.5 * sigma0).max(0.0);
    let s_use = (sigma0 - nudge).max(0.0);
    let wait_x = add(point, scale(dir, s_use));
    let t_wait_end = t0 - 2.0 * s_use;

    // Boundary target: where and when the boundary passes near q(σ0).
    let target_x = add(point, scale(dir, sigma0));
    let (mut sig_target, mut t_touch, mut best_d) = (0.0, t0, f64::INFINITY);
    let n_sig = 1024;
    let (s_lo, s_span) = match curve.sigma_domain() {
        SigmaDomain::Circle { period } => (0.0, period),
        SigmaDomain::Interval { lo, hi } => (lo, hi - lo),
    };
    for j in 0..256 {
        let t = j as f64 * period / 256.0;
        for i in 0..n_sig {
            let sg = s_lo + s_span * i as f64 / n_sig as f64;
            let d = norm(sub(curve.eval_unchecked(sg, t).x, target_x));
            if d < best_d {
                best_d = d;
                sig_target = sg;
                t_touch = t;
            }
        }
    }
    if best_d > 2.0 * nudge + 1e-6 {
        return Ok(PathOutcome::Inaccessible {
            reason: format!(
                "no boundary parameter matches the descent target (gap {best_d:.3e})"
            ),
        });
    }
    // Latest boundary pass no later than the wait window start.
    let mut t_n = t_touch;
    while t_n > t_wait_end {
        t_n -= period;
    }

    // Certificate: apex seed -> radial ray -> aimed characteristic.
    let apex = apex_seeds(curve, 1, 256)[0];
    let certificate = (0..200).find_map(|back| {
        let t_seed = apex.t - back as f64 * period;
        if t_seed > t_n {
            return None;
        }
        aim_characteristic(curve, (apex.sigma, t_seed), sig_target, t_n).ok().flatten()
    });
    let Some((alpha, boundary_traj)) = certificate else {
        return Ok(PathOutcome::Inaccessible {
            reason: "no fan from an apex seed reaches the target boundary point in time".into(),
        });
    };

    // Assemble forward in time.
    let mut segments = Vec::new();
    let seed_t = boundary_traj.times[0];
    let seed_x = curve.eval_unchecked(boundary_traj.sigmas[0], seed_t).x;
    let seed_r = norm(seed_x);
    let t_dep = seed_t - (rho - seed_r);
    let mut radial = Vec::new();
    for i in 0..=64 {
        let w = i as f64 / 64.0;
        let r = rho + (seed_r - rho) * w;
        radial.push((t_dep + (seed_t - t_dep) * w, scale(seed_x, r / seed_r)));
    }
    segments.push(PathSegment {
        label: "radial ray to apex".into(),
        points: radial,
    });

    // Boundary characteristic, nudged off the boundary toward the free
    // side.
    let inward = inward_direction(domain, curve, boundary_traj.sigmas[0], seed_t);
    let mu = 1e-7;
    let m = boundary_traj.times.len();
    let stride = (m / 512).max(1);
    let mut on_boundary = Vec::new();
    for (i, (&t, &sg)) in boundary_traj
        .times
        .iter()
        .zip(boundary_traj.sigmas.iter())
        .enumerate()
    {
        if i % stride == 0 || i + 1 == m {
            let x = curve.eval_unchecked(sg, t).x;
            let nv = inward_direction(domain, curve, sg, t);
            let _ = inward;
            on_boundary.push((t, add(x, scale(nv, mu))));
        }
    }
    segments.push(PathSegment {
        label: format!("boundary characteristic (blend {alpha:.6})"),
        points: on_boundary,
    });

    // Hop from the boundary point to the vertical waiting position, then
    // wait, then ascend back along the spatial path at speed 1/2.
    let hop_from = segments.last().unwrap().points.last().unwrap().1;
    let hop_gap = norm(sub(wait_x, hop_from));
    let t_hop_end = t_n + hop_gap / 0.5;
    if t_hop_end > t_wait_end + 1e-9 {
        return Ok(PathOutcome::Inaccessible {
            reason: "waiting window too short to absorb the boundary hop".into(),
        });
    }
    segments.push(PathSegment {
        label: "hop to the vertical line".into(),
        points: vec![(t_n, hop_from), (t_hop_end, wait_x)],
    });
    segments.push(PathSegment {
        label: "vertical wait".into(),
        points: vec![(t_hop_end, wait_x), (t_wait_end, wait_x)],
    });
    let mut ascend = Vec::new();
    for i in 0..=64 {
        let w = i as f64 / 64.0;
        let s = s_use * (1.0 - w);
        ascend.push((t0 - 2.0 * s, add(point, scale(dir, s))));
    }
    segments.push(PathSegment {
        label: "half-speed ascent to the target".into(),
        points: ascend,
    });

    let mut max_speed = 0.0f64;
    for seg in &segments {
        for w in seg.points.windows(2) {
            let dt = (w[1].0 - w[0].0).max(1e-300);
            max_speed = max_speed.max(norm(sub(w[1].1, w[0].1)) / dt);
        }
    }
    let path = AccessPath {
        departure: (t_dep, scale(seed_x, rho / seed_r)),
        arrival: (t0, point),
        segments,
        max_speed,
    };
    path.validate(domain, 1e-4)?;
    Ok(PathOutcome::Accessible(path))
}

fn radial_path(domain: &Domain, point: [f64; 2], t0: f64) -> Option<AccessPath> {
    let rho = domain.rho();
    let r = norm(point);
    let dir = if r > 1e-9 { scale(point, 1.0 / r) } else { [1.0, 0.0] };
    let travel = rho - r;
    let t_dep = t0 - travel;
    let mut pts = Vec::new();
    let n = 256;
    for i in 0..=n {
        let w = i as f64 / n as f64;
        let rr = rho - travel * w;
        let x = scale(dir, rr);
        let t = t_dep + travel * w;
        if !domain.slice(t).is_free(x) {
            return None;
        }
        pts.push((t, x));
    }
    Some(AccessPath {
        departure: pts[0],
        arrival: (t0, point),
        segments: vec![PathSegment {
            label: "radial ray".into(),
            points: pts,
        }],
        max_speed: 1.0,
    })
}

/// Free-side unit direction off the boundary at (σ, t).
fn inward_direction(domain: &Domain, curve: &BoundaryCurve2D, sigma: f64, t: f64) -> [f64; 2] {
    let jet = curve.eval_unchecked(sigma, t);
    let tangent = jet.x_sigma;
    let n = [-tangent[1], tangent[0]];
    let n = scale(n, 1.0 / norm(n).max(1e-300));
    let probe = 1e-4;
    if domain.slice(t).is_free(add(jet.x, scale(n, probe))) {
        n
    } else {
        scale(n, -1.0)
    }
}

/// Aim a blended characteristic from `seed` so that σ(t_target) hits
/// `sig_target` (mod σ-period); bisection over the blend, sound because
/// the flow is monotone in the blend's drift ordering.
fn aim_characteristic(
    curve: &BoundaryCurve2D,
    seed: (f64, f64),
    sig_target: f64,
    t_target: f64,
) -> Result<Option<(f64, Trajectory)>> {
    let span = match curve.sigma_domain() {
        SigmaDomain::Circle { period } => period,
        SigmaDomain::Interval { lo, hi } => hi - lo,
    };
    let end_sigma = |alpha: f64| -> Result<f64> {
        let field = SpeedField::new(curve.clone(), alpha)?;
        let traj = integrate_characteristic(&field, seed.0, seed.1, t_target)?;
        Ok(traj.end().1)
    };
    let hi_end = end_sigma(0.0)?;
    let lo_end = end_sigma(1.0)?;
    // Choose the unwrapped representative of the target between the two
    // extremes, if any.
    let mut target = sig_target;
    if let SigmaDomain::Circle { period } = curve.sigma_domain() {
        let k = ((lo_end - target) / period).ceil();
        target += k * period;
        let _ = span;
    }
    if target < lo_end - 1e-9 || target > hi_end + 1e-9 {
        return Ok(None);
    }
    let mut f = |alpha: f64| end_sigma(alpha).unwrap_or(f64::NAN) - target;
    let alpha = crate::numerics::bisect(&mut f, 1.0, 0.0, 1e-10);
    let field = SpeedField::new(curve.clone(), alpha)?;
    let traj = integrate_characteristic(&field, seed.0, seed.1, t_target)?;
    if (traj.end().1 - target).abs() > 1e-5 {
        return Ok(None);
    }
    Ok(Some((alpha, traj)))
}

// ---------------------------------------------------------------------
// Inaccessibility report
// ---------------------------------------------------------------------

/// Boundary samples never reached by the grid oracle (within a 3-cell
/// neighborhood of the free-side nudge of each sample).
pub fn inaccessible_report(
    domain: &Domain,
    curve: &BoundaryCurve2D,
    reach: &ReachSet,
    sigma_samples: usize,
    t_samples: usize,
) -> Vec<(f64, f64)> {
    let (s_lo, s_span) = match curve.sigma_domain() {
        SigmaDomain::Circle { period } => (0.0, period),
        SigmaDomain::Interval { lo, hi } => (lo, hi - lo),
    };
    let period = curve.time_period().unwrap_or(1.0);
    let mut out = Vec::new();
    let nudge = match domain {
        Domain::Channel(c) => 0.5 * c.geometry.epsilon,
        _ => 1.5 * reach.dx,
    };
    for i in 0..sigma_samples {
        let sigma = s_lo + s_span * i as f64 / sigma_samples as f64;
        for j in 0..t_samples {
            let t = period * j as f64 / t_samples as f64;
            let x = curve.eval_unchecked(sigma, t).x;
            let dirn = free_side(domain, curve, sigma, t);
            let probe = add(x, scale(dirn, nudge));
            if !reach.ever_reached_near(probe, 3) {
                out.push((sigma, t));
            }
        }
    }
    out
}

fn free_side(domain: &Domain, curve: &BoundaryCurve2D, sigma: f64, t: f64) -> [f64; 2] {
    match domain {
        Domain::Channel(_) => {
            // Downward normal into the channel tube.
            let jet = curve.eval_unchecked(sigma, t);
            let g = jet.x_sigma[1] / jet.x_sigma[0].max(1e-300);
            let s = (1.0 + g * g).sqrt();
            [g / s, -1.0 / s]
        }
        _ => inward_direction(domain, curve, sigma, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::StefanovWallParams;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn apex_of_circle_and_breathing() {
        let seeds = apex_seeds(&BoundaryCurve2D::unit_circle(), 3, 128);
        assert_eq!(seeds.len(), 3);
        assert_eq!(seeds[0].sigma, 0.0);
        assert!((seeds[0].radius - 1.0).abs() < 1e-12);
        assert!((seeds[1].t - seeds[0].t - 1.0).abs() < 1e-12);

        let b = BoundaryCurve2D::breathing_circle([0.0, 0.0], 1.0, 0.1, 0.0);
        let seeds = apex_seeds(&b, 1, 256);
        assert!((seeds[0].t - 0.25).abs() < 1e-9, "t* = {}", seeds[0].t);
        assert!((seeds[0].radius - 1.1).abs() < 1e-9);
    }

    #[test]
    fn fan_on_unit_circle_covers_at_pi() {
        let fan = boundary_fan(&BoundaryCurve2D::unit_circle(), (0.0, 0.0), 4.0).unwrap();
        let cov = fan.coverage_time.expect("coverage");
        assert!((cov - PI).abs() < 1e-3, "coverage {cov}");
        // Envelope is the pair of straight lines ±t/(2π).
        for s in fan.samples.iter().step_by(32) {
            assert!((s.hi - (s.t) / (2.0 * PI)).abs() < 1e-6);
            assert!((s.lo + (s.t) / (2.0 * PI)).abs() < 1e-6);
        }
        assert!(fan.contains(&BoundaryCurve2D::unit_circle(), 0.4, 3.5));
    }

    #[test]
    fn fan_from_wall_edge_stays_right_of_minus_m() {
        let wall =
            BoundaryCurve2D::stefanov_wall(StefanovWallParams::default_example(1)).unwrap();
        let fan = boundary_fan(&wall, (2.0, 0.0), 100.0).unwrap();
        let min_lo = fan
            .samples
            .iter()
            .map(|s| s.lo)
            .fold(f64::INFINITY, f64::min);
        assert!(min_lo > -2.0, "fan lower envelope reached {min_lo}");
        assert!(fan.coverage_time.is_none());
    }

    fn empty_domain() -> Domain {
        Domain::Empty { rho: 1.0 }
    }

    #[test]
    fn reach_rejects_bad_cfl() {
        let cfg = ReachConfig::new(0.1, 0.06, 0.0, 1.0);
        assert!(matches!(
            reach_forward(&empty_domain(), &cfg),
            Err(CoreError::CflViolation { .. })
        ));
    }

    #[test]
    fn empty_domain_inward_cone() {
        // R(t) = {x : ρ − |x| ≤ t}; first arrival ≈ ρ − |x|.
        let mut cfg = ReachConfig::new(0.02, 0.01, 0.0, 1.1);
        cfg.slice_stride = 20;
        let reach = reach_forward(&empty_domain(), &cfg).unwrap();
        let mut worst = 0.0f64;
        for j in 0..reach.ny {
            for i in 0..reach.nx {
                let x = reach.center(i, j);
                let r = norm(x);
                if r > 0.97 {
                    continue;
                }
                let a = reach.first_arrival[j * reach.nx + i];
                worst = worst.max((a - (1.0 - r)).abs());
            }
        }
        assert!(worst <= 2.0 * cfg.dx, "worst arrival error {worst}");
    }

    #[test]
    fn reach_monotone_in_time_for_static_obstacle() {
        let domain = Domain::Disk {
            center: [0.0, 0.0],
            radius: 0.4,
            rho: 1.0,
        };
        let mut cfg = ReachConfig::new(0.025, 0.0125, 0.0, 2.0);
        cfg.slice_stride = 40;
        let reach = reach_forward(&domain, &cfg).unwrap();
        for w in reach.slices.windows(2) {
            for (a, b) in w[0].iter().zip(w[1].iter()) {
                assert_eq!(a & !b, 0, "a reached cell became unreached");
            }
        }
    }

    #[test]
    fn reach_monotone_in_sources() {
        let domain = Domain::Disk {
            center: [0.2, 0.0],
            radius: 0.3,
            rho: 1.0,
        };
        let mut cfg_point = ReachConfig::new(0.025, 0.0125, 0.0, 2.5);
        cfg_point.source = Source::Points {
            points: vec![[0.0, 1.0]],
            start_only: false,
        };
        let reach_point = reach_forward(&domain, &cfg_point).unwrap();
        let cfg_ring = ReachConfig::new(0.025, 0.0125, 0.0, 2.5);
        let reach_ring = reach_forward(&domain, &cfg_ring).unwrap();
        // Ring ⊇ point: every point-reached cell is ring-reached, and
        // ring arrivals are never later.
        let last = reach_point.slices.len() - 1;
        for (a, b) in reach_point.slices[last]
            .iter()
            .zip(reach_ring.slices[last].iter())
        {
            assert_eq!(a & !b, 0);
        }
        for (ap, ar) in reach_point
            .first_arrival
            .iter()
            .zip(reach_ring.first_arrival.iter())
        {
            assert!(ar <= &(ap + 1e-9));
        }
    }

    #[test]
    fn reach_save_load_roundtrip() {
        let mut cfg = ReachConfig::new(0.05, 0.025, 0.0, 0.5);
        cfg.slice_stride = 5;
        let reach = reach_forward(&empty_domain(), &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("reach.bin");
        reach.save(&path).unwrap();
        let loaded = ReachSet::load(&path).unwrap();
        assert_eq!(loaded.nx, reach.nx);
        assert_eq!(loaded.slices, reach.slices);
        assert_eq!(loaded.first_arrival, reach.first_arrival);
        assert_eq!(loaded.slice_times, reach.slice_times);
    }

    #[test]
    fn interior_radial_path_in_empty_domain() {
        let outcome = interior_access_path(&empty_domain(), None, [0.3, -0.2], 5.0).unwrap();
        match outcome {
            PathOutcome::Accessible(path) => {
                assert!((path.max_speed - 1.0).abs() < 1e-9);
                assert_eq!(path.segments.len(), 1);
                path.validate(&empty_domain(), 1e-9).unwrap();
                let r = norm([0.3, -0.2]);
                assert!((path.duration() - (1.0 - r)).abs() < 1e-9);
            }
            PathOutcome::Inaccessible { reason } => panic!("{reason}"),
        }
    }

    #[test]
    fn interior_path_behind_offset_disk() {
        // Point between the cylinder center and an off-center disk: the
        // radial ray is blocked, forcing the full construction.
        let curve = BoundaryCurve2D::circle([0.4, 0.0], 0.3);
        let domain = Domain::CurveObstacle {
            curve: curve.clone(),
            rho: 1.2,
        };
        let point = [0.05, 0.0];
        assert!(domain.slice(0.0).is_free(point));
        let outcome = interior_access_path(&domain, Some(&curve), point, 6.0).unwrap();
        match outcome {
            PathOutcome::Accessible(path) => {
                path.validate(&domain, 1e-4).unwrap();
                assert!(path.max_speed <= 1.0 + 1e-4);
                assert!(path.segments.len() >= 4, "expected the full construction");
            }
            PathOutcome::Inaccessible { reason } => panic!("{reason}"),
        }
    }

    #[test]
    fn channel_domain_geometry_sanity() {
        let params = StefanovWallParams::default_example(1);
        let geom = crate::stefanov::build_channel(&params, None).unwrap();
        let eps = geom.epsilon;
        let dom = ChannelDomain::new(geom, 5.0);
        // Inside the tube: just below the wall at σ = 0.
        let t = 0.37;
        let jet = dom.geometry.params.slope_jet(0.0, t);
        let g = jet.g;
        let s = (1.0 + g * g).sqrt();
        let nu = [g / s, -1.0 / s];
        let inside = add([0.0, jet.height], scale(nu, 0.5 * eps));
        assert!(dom.is_free(inside, t), "tube midpoint must be free");
        // Just past the lower wall: solid.
        let below = add([0.0, jet.height], scale(nu, 1.5 * eps));
        assert!(!dom.is_free(below, t));
        // Above the wall inside the hull: solid.
        let above = add([0.0, jet.height], scale(nu, -0.5 * eps));
        assert!(!dom.is_free(above, t));
        // Outside the hull: free.
        assert!(dom.is_free([4.5, 0.0], t));
        assert!(dom.is_free([0.0, 1.8], t));
        // Left mouth probes sit inside the hull and are not free from
        // outside the tube.
        for p in dom.left_mouth_probes(4) {
            assert!(dom.inside_hull(p));
        }
    }
}
