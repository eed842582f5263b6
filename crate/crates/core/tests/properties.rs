use dret_core::closed::resonance::{energy_surface, resonance_intersections, Intersection};
use dret_core::closed::wigner::{wigner_function, PhaseGrid, NORMALIZATION_TOLERANCE};
use dret_core::closed::{
    evolve_closed, initial_state, rms_displacement, site_populations, EvolveOptions, FockTruncation, PolaronState,
};
use dret_core::heom::{enumerate_hierarchy, heom_evolve, HeomOptions};
use dret_core::model::{build_effective_electronic_hamiltonian, build_polaron_hamiltonian};
use dret_core::{BathSpec, CMatrix, MoleculeChain, SharedMode, C64};
use nalgebra::DMatrix;
use proptest::collection::vec;
use proptest::prelude::*;

fn chain_and_mode(n: usize) -> impl Strategy<Value = (MoleculeChain, SharedMode)> {
    (vec(-3.0..3.0f64, n), vec(-1.5..1.5f64, n * n), 0.2..3.0f64, vec(-1.5..1.5f64, n)).prop_map(
        move |(e, j, w, f)| {
            let mut m = DMatrix::zeros(n, n);
            for a in 0..n {
                for b in a + 1..n {
                    m[(a, b)] = j[a * n + b];
                    m[(b, a)] = j[a * n + b];
                }
            }
            (MoleculeChain::new(e, m), SharedMode::new(w, f))
        },
    )
}

fn system() -> impl Strategy<Value = (MoleculeChain, SharedMode)> {
    (1usize..=4).prop_flat_map(chain_and_mode)
}

fn binomial(n: usize, k: usize) -> usize {
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polaron_hamiltonian_is_hermitian((chain, mode) in system(), n_max in 1usize..12) {
        let h = build_polaron_hamiltonian(&chain, &mode, n_max, 5000).unwrap();
        prop_assert_eq!(h.nrows(), chain.len() * (n_max + 1));
        let worst = (&h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-12);
    }

    #[test]
    fn closed_evolution_conserves_norm((chain, mode) in system(), n_max in 1usize..10, start in 0usize..4) {
        let start = start % chain.len();
        let h = build_polaron_hamiltonian(&chain, &mode, n_max, 5000).unwrap();
        let psi0 = initial_state(chain.len(), FockTruncation::new(n_max), start).unwrap();
        let res = evolve_closed(&h, &psi0, &EvolveOptions::new(4.0, 0.5, start)).unwrap();
        prop_assert!(res.max_norm_drift() < 1e-9);
        prop_assert!(res.max_relative_energy_drift() < 1e-8);
        for p in &res.populations {
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn populations_sum_to_norm(sites in 1usize..5, levels in 1usize..6, seed in vec(-1.0..1.0f64, 40)) {
        let amps: Vec<C64> = (0..sites * levels).map(|i| C64::new(seed[i % 40], seed[(i + 7) % 40])).collect();
        let state = PolaronState::from_amplitudes(sites, levels, amps.clone()).unwrap();
        let total: f64 = site_populations(&state).iter().sum();
        let norm_sq: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((total - norm_sq).abs() < 1e-12);
    }

    #[test]
    fn rms_displacement_is_bounded(weights in vec(0.0..1.0f64, 1..9), origin in 0usize..9) {
        let sum: f64 = weights.iter().sum();
        prop_assume!(sum > 1e-6);
        let p: Vec<f64> = weights.iter().map(|w| w / sum).collect();
        let origin = origin % p.len();
        let far = origin.max(p.len() - 1 - origin) as f64;
        let d = rms_displacement(&p, origin);
        prop_assert!(d >= 0.0 && d <= far + 1e-12);
    }

    #[test]
    fn identical_sites_keep_identical_effective_energies(
        omega in -2.0..2.0f64, lambda in 0.0..1.0f64, gamma in 0.05..3.0f64, s in 0.0..20.0f64, t in 0.0..30.0f64,
    ) {
        let chain = MoleculeChain::linear(vec![omega, omega, 0.0], 1.0);
        let bath = BathSpec {
            reorganization: vec![lambda, lambda, 0.3],
            relaxation: vec![gamma, gamma, 0.5],
            scaling: vec![s, s, 1.0],
            thermal_energy: 1.0,
        };
        let h = build_effective_electronic_hamiltonian(&chain, &bath, t);
        prop_assert!((h[(0, 0)] - h[(1, 1)]).norm() < 1e-12);
    }

    #[test]
    fn hierarchy_size_is_binomial(sites in 1usize..6, cutoff in 1usize..7) {
        let h = enumerate_hierarchy(sites, cutoff, 1_000_000).unwrap();
        prop_assert_eq!(h.len(), binomial(sites + cutoff - 1, sites));
        prop_assert!(h.indices().iter().all(|i| (i.rank() as usize) < cutoff));
    }

    #[test]
    fn wigner_function_integrates_to_trace(levels in 1usize..6, re in vec(-1.0..1.0f64, 36), im in vec(-1.0..1.0f64, 36)) {
        let a = CMatrix::from_fn(levels, levels, |i, j| C64::new(re[i * 6 + j], im[i * 6 + j]));
        let rho = &a * a.adjoint();
        let rho = &rho / rho.trace();
        let grid = PhaseGrid::symmetric(PhaseGrid::recommended_extent(levels).max(6.0), 121);
        let w = wigner_function(&rho, &grid).unwrap();
        prop_assert!((w.normalization - 1.0).abs() < NORMALIZATION_TOLERANCE);
    }

    #[test]
    fn contour_intersections_lie_on_both_surfaces((chain, mode) in chain_and_mode(3), excess in 0.0..6.0f64) {
        let energy = chain.site_energies().iter().copied().fold(f64::NEG_INFINITY, f64::max) + excess;
        let report = resonance_intersections(&chain, &mode, 0, energy);
        for pair in &report.pairs {
            let points: Vec<(f64, f64)> = match pair.intersection {
                Intersection::Two(p) => p.to_vec(),
                Intersection::Tangent(p) => vec![p],
                _ => Vec::new(),
            };
            for (q, p) in points {
                let scale = 1.0 + energy.abs();
                prop_assert!((energy_surface(&chain, &mode, 0, q, p) - energy).abs() < 1e-8 * scale);
                prop_assert!((energy_surface(&chain, &mode, pair.other, q, p) - energy).abs() < 1e-8 * scale);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hierarchy_conserves_trace(
        omega in -2.0..2.0f64, lambda in vec(0.0..0.5f64, 2), gamma in vec(0.1..2.0f64, 2),
        s in vec(0.0..10.0f64, 2), kt in 0.5..4.0f64,
    ) {
        let chain = MoleculeChain::linear(vec![omega, 0.0], 1.0);
        let bath = BathSpec { reorganization: lambda, relaxation: gamma, scaling: s, thermal_energy: kt };
        let mut rho0 = CMatrix::from_element(2, 2, C64::new(0.0, 0.0));
        rho0[(0, 0)] = C64::new(1.0, 0.0);
        let mut opts = HeomOptions::new(3, 5.0, 0.5);
        opts.psd_tolerance = f64::INFINITY;
        let res = heom_evolve(&chain, &bath, &rho0, &opts).unwrap();
        prop_assert!(res.max_trace_drift() < 1e-6);
    }
}
