use proptest::prelude::*;
use xxz_pin::model::{build_hamiltonian, s3_commutator_defect};
use xxz_pin::solver::{
    dense_spectrum, lowest_k, sector_resolved_spectrum, LanczosConfig, SolverConfig,
};
use xxz_pin::{AssemblyConfig, BoundaryCondition, ModelSpec, Spin};

fn bc_strategy() -> impl Strategy<Value = BoundaryCondition> {
    prop_oneof![
        Just(BoundaryCondition::Bare),
        Just(BoundaryCondition::PlusPlus),
        Just(BoundaryCondition::MinusMinus),
        Just(BoundaryCondition::PlusMinus),
        Just(BoundaryCondition::MinusPlus),
    ]
}

#[test]
fn kink_kernel_dimension() {
    for (two_j, max_sites) in [(1u32, 6usize), (2, 5)] {
        let spin = Spin::from_twice(two_j).unwrap();
        for sites in 2..=max_sites {
            let spec = ModelSpec::chain(sites, spin, 1.9, BoundaryCondition::PlusMinus).unwrap();
            let h = spec.hamiltonian().unwrap().to_dense(1 << 14).unwrap();
            let ev = dense_spectrum(&h, 1 << 14, false).unwrap().eigenvalues;
            let zeros = ev.iter().filter(|v| v.abs() < 1e-9).count();
            assert_eq!(zeros, two_j as usize * sites + 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hamiltonians_are_hermitian(
        bc in bc_strategy(), sites in 2usize..6, two_j in 1u32..4,
        b in prop::array::uniform3(-2.0f64..2.0), delta in 1.01f64..8.0,
    ) {
        let spin = Spin::from_twice(two_j).unwrap();
        prop_assume!(spin.dim().pow(sites as u32) <= 1024);
        let y = 1 + sites / 2;
        let spec = ModelSpec::chain(sites, spin, delta, bc).unwrap().with_field(b, y).unwrap();
        let h = build_hamiltonian(&spec, &AssemblyConfig::default()).unwrap();
        prop_assert!(h.hermiticity_defect() < 1e-14);
    }

    #[test]
    fn axial_fields_conserve_s3(
        bc in bc_strategy(), sites in 2usize..7, bz in -2.0f64..2.0, delta in 1.01f64..8.0,
    ) {
        let spec = ModelSpec::chain(sites, Spin::HALF, delta, bc).unwrap()
            .with_field([0.0, 0.0, bz], 1).unwrap();
        let h = spec.hamiltonian().unwrap();
        prop_assert!(s3_commutator_defect(&h, 1 << 12).unwrap() < 1e-14);
    }

    #[test]
    fn sectors_reassemble_the_full_spectrum(
        bc in bc_strategy(), sites in 2usize..7, bz in -2.0f64..2.0, two_j in 1u32..3,
    ) {
        let spin = Spin::from_twice(two_j).unwrap();
        let spec = ModelSpec::chain(sites, spin, 2.25, bc).unwrap()
            .with_field([0.0, 0.0, bz], sites).unwrap();
        let cfg = SolverConfig::default();
        let h = spec.hamiltonian().unwrap().to_dense(1 << 12).unwrap();
        let full = dense_spectrum(&h, 1 << 12, false).unwrap().eigenvalues;
        let mut sect = sector_resolved_spectrum(&spec, None, &cfg).unwrap().eigenvalues;
        sect.sort_by(f64::total_cmp);
        prop_assert_eq!(full.len(), sect.len());
        for (a, b) in full.iter().zip(&sect) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn lanczos_matches_dense(
        bc in bc_strategy(), b in prop::array::uniform3(-1.5f64..1.5), seed in 0u64..1000,
    ) {
        let spec = ModelSpec::chain(8, Spin::HALF, 2.0, bc).unwrap().with_field(b, 4).unwrap();
        let h = spec.hamiltonian().unwrap();
        let dense = dense_spectrum(&h.to_dense(1 << 12).unwrap(), 1 << 12, false).unwrap().eigenvalues;
        let cfg = LanczosConfig { seed, ..LanczosConfig::default() };
        let it = lowest_k(&h, 6, &cfg).unwrap();
        for (a, b) in it.eigenvalues.iter().zip(&dense) {
            prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        }
        prop_assert!(it.diagnostics.max_residual() < 1e-8);
    }
}
