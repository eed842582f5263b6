//! Energy surfaces of the shared mode and their resonance geometry.
//!
//! With site `j` excited the mode oscillates about `Q_j = √2 f_j / ω`, so
//!
//! ```text
//! E_j(Q, P) = Ω_j + (ω/2) (P² + (Q − Q_j)²)
//! ```
//!
//! and the level of energy `E₀` is a circle centred at `(Q_j, 0)` with
//! squared radius `2 (E₀ − Ω_j) / ω`. The mismatch `E_j − E_k` is affine in
//! `Q` with slope `ω (Q_k − Q_j) = −√2 (f_j − f_k)`.

use alloc::vec::Vec;

use crate::model::{MoleculeChain, SharedMode};
use crate::math;

/// `E_j(Q, P)`.
pub fn energy_surface(chain: &MoleculeChain, mode: &SharedMode, site: usize, q: f64, p: f64) -> f64 {
    let dq = q - mode.equilibrium_position(site);
    chain.site_energies()[site] + 0.5 * mode.frequency * (p * p + dq * dq)
}

/// Level set `E_site(Q, P) = E₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseContour {
    pub site: usize,
    /// Centre on the `Q` axis.
    pub centre: f64,
    /// May be negative, in which case the contour is empty.
    pub radius_sq: f64,
}

impl PhaseContour {
    pub fn new(chain: &MoleculeChain, mode: &SharedMode, site: usize, energy: f64) -> Self {
        let radius_sq = 2.0 * (energy - chain.site_energies()[site]) / mode.frequency;
        Self { site, centre: mode.equilibrium_position(site), radius_sq }
    }

    pub fn radius(&self) -> Option<f64> {
        (self.radius_sq >= 0.0).then(|| math::sqrt(self.radius_sq))
    }
}

/// How two contours meet. Points are `(Q, P)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Intersection {
    None,
    Tangent((f64, f64)),
    Two([(f64, f64); 2]),
    /// Identical circles: every point is shared.
    Degenerate,
}

impl Intersection {
    pub fn intersects(&self) -> bool {
        !matches!(self, Intersection::None)
    }
}

/// Region of the `Q` axis (for every `P`) where `|E_j − E_k| < J_jk`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResonanceBand {
    Empty,
    Everywhere,
    Interval { q_min: f64, q_max: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourPair {
    pub other: usize,
    pub intersection: Intersection,
    pub band: ResonanceBand,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceReport {
    pub occupied_site: usize,
    pub energy: f64,
    /// One contour per site, in site order.
    pub contours: Vec<PhaseContour>,
    /// Geometry of the occupied contour against every other site.
    pub pairs: Vec<ContourPair>,
}

impl ResonanceReport {
    pub fn pair(&self, other: usize) -> Option<&ContourPair> {
        self.pairs.iter().find(|p| p.other == other)
    }
}

const RELATIVE_TOLERANCE: f64 = 1e-12;

/// Intersects the contour of `occupied_site` with every other contour at
/// total energy `energy`.
pub fn resonance_intersections(
    chain: &MoleculeChain,
    mode: &SharedMode,
    occupied_site: usize,
    energy: f64,
) -> ResonanceReport {
    let contours: Vec<PhaseContour> = (0..chain.len()).map(|k| PhaseContour::new(chain, mode, k, energy)).collect();
    let own = contours[occupied_site];
    let pairs = contours
        .iter()
        .filter(|c| c.site != occupied_site)
        .map(|c| ContourPair {
            other: c.site,
            intersection: intersect(&own, c),
            band: band(chain, mode, occupied_site, c.site),
        })
        .collect();
    ResonanceReport { occupied_site, energy, contours, pairs }
}

fn intersect(a: &PhaseContour, b: &PhaseContour) -> Intersection {
    let scale = a.radius_sq.abs().max(b.radius_sq.abs()).max(a.centre * a.centre).max(b.centre * b.centre).max(1.0);
    let tol = RELATIVE_TOLERANCE * scale;
    if a.radius_sq < -tol || b.radius_sq < -tol {
        return Intersection::None;
    }
    let d = b.centre - a.centre;
    if d.abs() <= RELATIVE_TOLERANCE * math::sqrt(scale) {
        return if (a.radius_sq - b.radius_sq).abs() <= tol { Intersection::Degenerate } else { Intersection::None };
    }
    // Radical line of the two circles, then the chord half-height.
    let along = (a.radius_sq - b.radius_sq + d * d) / (2.0 * d);
    let q = a.centre + along;
    let h_sq = a.radius_sq.max(0.0) - along * along;
    if h_sq < -tol {
        Intersection::None
    } else if h_sq <= tol {
        Intersection::Tangent((q, 0.0))
    } else {
        let h = math::sqrt(h_sq);
        Intersection::Two([(q, -h), (q, h)])
    }
}

fn band(chain: &MoleculeChain, mode: &SharedMode, j: usize, k: usize) -> ResonanceBand {
    let coupling = chain.coupling(j, k).abs();
    // E_j − E_k = offset + slope · Q
    let offset = energy_surface(chain, mode, j, 0.0, 0.0) - energy_surface(chain, mode, k, 0.0, 0.0);
    let slope = math::sqrt(2.0) * (mode.site_couplings[k] - mode.site_couplings[j]);
    if slope == 0.0 {
        return if offset.abs() < coupling { ResonanceBand::Everywhere } else { ResonanceBand::Empty };
    }
    if coupling == 0.0 {
        return ResonanceBand::Empty;
    }
    let a = (-coupling - offset) / slope;
    let b = (coupling - offset) / slope;
    ResonanceBand::Interval { q_min: a.min(b), q_max: a.max(b) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn surface_examples() {
        let chain = MoleculeChain::linear(vec![2.0, 0.0], 1.0);
        let mode = SharedMode::new(1.0, vec![1.0, 2.0]);
        assert!((energy_surface(&chain, &mode, 0, 0.0, 0.0) - 3.0).abs() < 1e-14);
        assert!((energy_surface(&chain, &mode, 1, 0.0, 0.0) - 4.0).abs() < 1e-14);
        // Affine mismatch with slope −√2 (f₁ − f₂).
        let diff = |q: f64| energy_surface(&chain, &mode, 0, q, 0.7) - energy_surface(&chain, &mode, 1, q, 0.7);
        let slope = (diff(1.3) - diff(-0.4)) / 1.7;
        assert!((slope - math::sqrt(2.0)).abs() < 1e-12);
        assert!((diff(2.0) - 2.0 * diff(1.0) + diff(0.0)).abs() < 1e-12);

        let equal = SharedMode::new(1.3, vec![0.8, 0.8]);
        for (q, p) in [(0.0, 0.0), (3.0, -1.0), (-2.5, 4.0)] {
            let d = energy_surface(&chain, &equal, 0, q, p) - energy_surface(&chain, &equal, 1, q, p);
            assert!((d - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dynamic_resonance_contours_intersect() {
        let mode = SharedMode::new(1.0, vec![1.0, 2.0]);
        for delta in [-1.0, 0.0, 1.0, 2.0, 3.0] {
            let chain = MoleculeChain::linear(vec![delta, 0.0], 1.0);
            let e0 = energy_surface(&chain, &mode, 0, 0.0, 0.0);
            let report = resonance_intersections(&chain, &mode, 0, e0);
            let pair = report.pair(1).unwrap();
            assert!(pair.intersection.intersects(), "ΔΩ = {delta}: {:?}", pair.intersection);
            if let Intersection::Two(points) = pair.intersection {
                for (q, p) in points {
                    assert!((energy_surface(&chain, &mode, 0, q, p) - e0).abs() < 1e-10);
                    assert!((energy_surface(&chain, &mode, 1, q, p) - e0).abs() < 1e-10);
                }
            }
        }
        // The sampled range ends at tangency on both sides.
        for delta in [-1.0, 3.0] {
            let chain = MoleculeChain::linear(vec![delta, 0.0], 1.0);
            let e0 = energy_surface(&chain, &mode, 0, 0.0, 0.0);
            let report = resonance_intersections(&chain, &mode, 0, e0);
            assert!(matches!(report.pair(1).unwrap().intersection, Intersection::Tangent(_)));
        }
        let chain = MoleculeChain::linear(vec![3.5, 0.0], 1.0);
        let e0 = energy_surface(&chain, &mode, 0, 0.0, 0.0);
        assert_eq!(resonance_intersections(&chain, &mode, 0, e0).pair(1).unwrap().intersection, Intersection::None);
    }

    #[test]
    fn non_resonant_start_has_no_crossing() {
        let chain = MoleculeChain::linear(vec![2.0, 0.0], 1.0);
        let mode = SharedMode::new(2.4, vec![-0.5, 1.0]);
        let e0 = energy_surface(&chain, &mode, 1, 0.0, 0.0);
        let report = resonance_intersections(&chain, &mode, 1, e0);
        assert!(report.contours[0].radius_sq < 0.0);
        assert!(report.contours[0].radius().is_none());
        assert_eq!(report.pair(0).unwrap().intersection, Intersection::None);
    }

    #[test]
    fn identical_sites_are_degenerate() {
        let chain = MoleculeChain::linear(vec![0.5, 0.5], 1.0);
        let mode = SharedMode::new(1.0, vec![0.7, 0.7]);
        let report = resonance_intersections(&chain, &mode, 0, 3.0);
        let pair = report.pair(1).unwrap();
        assert_eq!(pair.intersection, Intersection::Degenerate);
        assert_eq!(pair.band, ResonanceBand::Everywhere);
    }

    #[test]
    fn band_brackets_the_crossing() {
        let chain = MoleculeChain::linear(vec![2.0, 0.0], 1.0);
        let mode = SharedMode::new(1.0, vec![1.0, 2.0]);
        let ResonanceBand::Interval { q_min, q_max } = band(&chain, &mode, 0, 1) else {
            panic!("expected an interval");
        };
        let diff = |q: f64| energy_surface(&chain, &mode, 0, q, 0.0) - energy_surface(&chain, &mode, 1, q, 0.0);
        assert!((diff(q_min).abs() - 1.0).abs() < 1e-12);
        assert!((diff(q_max).abs() - 1.0).abs() < 1e-12);
        assert!(diff(0.5 * (q_min + q_max)).abs() < 1e-12);
        assert!((q_max - q_min - math::sqrt(2.0)).abs() < 1e-12);
    }
}
