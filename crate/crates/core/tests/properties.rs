mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use symdiag::instancegen::{
    planted_from_symplectic, random_commuting_family, random_orthosymplectic,
    random_orthosymplectic_family, random_pd_with_spectrum, random_psd_with_spectrum,
    random_symplectic, GenConfig,
};
use symdiag::matcore::{
    common_eigenspace_partition, j_matrix, kernel_basis, skew_canonical, sym_power,
    symplectic_residual, SymMatrix, ToleranceConfig,
};
use symdiag::psdnf::psd_normal_form_family;
use symdiag::simdiag::{hamilton_map, simdiag_pd_family, simdiag_pd_pair};
use symdiag::williamson::{is_orthosymplectic_diagonalizable, symplectic_eigenvalues, williamson};
use symdiag::{
    gaussian_normal_modes, partition_function, poisson_bracket_gram, symplectically_commutes,
};

fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn spectrum(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.5f64..10.0, n)
}

/// Seeded generator config plus a planted symplectic spectrum.
fn planted() -> impl Strategy<Value = (GenConfig, Vec<f64>)> {
    (any::<u64>(), 1usize..=5, 0.05f64..0.4).prop_flat_map(|(seed, n, spread)| {
        (
            Just(GenConfig::new(seed, n).with_spread(spread)),
            spectrum(n),
        )
    })
}

fn planted_pair() -> impl Strategy<Value = (GenConfig, Vec<f64>, Vec<f64>)> {
    (any::<u64>(), 1usize..=5, 0.05f64..0.4).prop_flat_map(|(seed, n, spread)| {
        (
            Just(GenConfig::new(seed, n).with_spread(spread)),
            spectrum(n),
            spectrum(n),
        )
    })
}

fn pd_2x2() -> impl Strategy<Value = SymMatrix> {
    (0.1f64..10.0, 0.1f64..10.0, -1.0f64..1.0).prop_map(|(a, c, r)| {
        let b = 0.95 * r * (a * c).sqrt();
        SymMatrix::from_row_slice(2, &[a, b, b, c]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sym_power_composes((g, d) in planted()) {
        let a = random_pd_with_spectrum(&g, &d).unwrap();
        prop_assume!(condition(&a) <= 1e6);
        let norm = a.norm();
        for s in [-1.0, 0.5, 1.0, 2.0] {
            for t in [-1.0, 0.5, 1.0, 2.0] {
                let nested = sym_power(&sym_power(&a, s, &cfg()).unwrap(), t, &cfg()).unwrap();
                let direct = sym_power(&a, s * t, &cfg()).unwrap();
                let err = (nested.matrix() - direct.matrix()).norm();
                prop_assert!(err <= 1e-8 * norm.powf((s * t).abs()), "s={s} t={t} err={err:e}");
            }
        }
    }

    #[test]
    fn skew_canonical_matches_eigenvalue_oracle(
        entries in prop::collection::vec(-5.0f64..5.0, 1..=36),
    ) {
        let dim = (entries.len() as f64).sqrt() as usize;
        let m = DMatrix::from_column_slice(dim, dim, &entries[..dim * dim]);
        let y = &m - m.transpose();
        let sc = skew_canonical(&y, &cfg()).unwrap();
        let recon = &sc.q * sc.canonical_matrix() * sc.q.transpose();
        prop_assert!((recon - &y).norm() <= cfg().tol_residual * y.norm().max(1.0));

        // Independent oracle: the nonsymmetric eigensolver on Y itself.
        let mut oracle: Vec<f64> = y
            .complex_eigenvalues()
            .iter()
            .map(|z| z.im)
            .filter(|&im| im > 1e-9 * y.norm())
            .collect();
        oracle.sort_by(f64::total_cmp);
        prop_assert_eq!(oracle.len(), sc.deltas.len());
        prop_assert!(max_rel_diff(&sc.deltas, &oracle) <= 1e-9);
    }

    #[test]
    fn eigenspace_partition_is_orthonormal_cover((g, d1, d2) in planted_pair()) {
        let o = random_orthosymplectic(&g).unwrap();
        // Rounded spectra force repeated eigenvalues and nontrivial blocks.
        let round = |d: &[f64]| d.iter().map(|x| x.round().max(1.0)).collect::<Vec<_>>();
        let a = planted_from_symplectic(&o, &round(&d1)).unwrap();
        let b = planted_from_symplectic(&o, &round(&d2)).unwrap();
        let blocks = common_eigenspace_partition(&[a, b], &cfg()).unwrap();
        let total: usize = blocks.iter().map(|b| b.dim()).sum();
        prop_assert_eq!(total, 2 * g.n);
        let cols: Vec<_> = blocks.iter().flat_map(|b| b.cols().column_iter().map(|c| c.into_owned()).collect::<Vec<_>>()).collect();
        let p = DMatrix::from_columns(&cols);
        let err = (p.transpose() * &p - DMatrix::identity(2 * g.n, 2 * g.n)).norm();
        prop_assert!(err <= cfg().tol_residual);
    }

    #[test]
    fn williamson_matches_symplectic_eigenvalues((g, d) in planted()) {
        let a = random_pd_with_spectrum(&g, &d).unwrap();
        prop_assume!(condition(&a) <= 1e6);
        let w = williamson(&a, &cfg()).unwrap();
        let ev = symplectic_eigenvalues(&a, &cfg()).unwrap();
        prop_assert!(max_rel_diff(&w.d, &ev) <= 1e-9);
        prop_assert!(max_rel_diff(&w.d, &sorted(&d)) <= 1e-8);
    }

    #[test]
    fn two_by_two_is_sqrt_det(a in pd_2x2()) {
        let ev = symplectic_eigenvalues(&a, &cfg()).unwrap();
        let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
        prop_assert!(max_rel_diff(&ev, &[det.sqrt()]) <= 1e-10);
    }

    #[test]
    fn scaling_covariance((g, d) in planted()) {
        let a = random_pd_with_spectrum(&g, &d).unwrap();
        let ev = symplectic_eigenvalues(&a, &cfg()).unwrap();
        for c in [2.0, 10.0] {
            let scaled = SymMatrix::new(a.matrix() * c).unwrap();
            let ev_c = symplectic_eigenvalues(&scaled, &cfg()).unwrap();
            let expected: Vec<f64> = ev.iter().map(|x| c * x).collect();
            prop_assert!(max_rel_diff(&ev_c, &expected) <= 1e-10);
        }
    }

    #[test]
    fn commuting_with_j_gives_orthogonal_williamson((g, d) in planted()) {
        let a = random_orthosymplectic_family(&g, &[d]).unwrap().remove(0);
        prop_assert!(is_orthosymplectic_diagonalizable(&a, &cfg()).unwrap().diagonalizable);
        let w = williamson(&a, &cfg()).unwrap();
        let n2 = 2 * g.n;
        prop_assert!((w.s.transpose() * &w.s - DMatrix::identity(n2, n2)).norm() <= cfg().tol_residual);
    }

    #[test]
    fn bracket_is_commutator_of_hamilton_maps((g, d1, d2) in planted_pair(), seed2 in any::<u64>()) {
        let a = random_pd_with_spectrum(&g, &d1).unwrap();
        let b = random_pd_with_spectrum(&GenConfig { seed: seed2, ..g }, &d2).unwrap();
        let c = poisson_bracket_gram(&a, &b).unwrap();
        let (ha, hb) = (hamilton_map(&a), hamilton_map(&b));
        let comm = &ha * &hb - &hb * &ha;
        let lhs = j_matrix(g.n).transpose() * c;
        prop_assert!((lhs + comm * 2.0).norm() <= 1e-10 * a.norm() * b.norm());
    }

    #[test]
    fn bracket_matches_gradient_oracle(
        (g, d1, d2) in planted_pair(),
        seed2 in any::<u64>(),
        u in prop::collection::vec(-1.0f64..1.0, 10),
    ) {
        let a = random_pd_with_spectrum(&g, &d1).unwrap();
        let b = random_pd_with_spectrum(&GenConfig { seed: seed2, ..g }, &d2).unwrap();
        let u = &u[..2 * g.n];
        let c = poisson_bracket_gram(&a, &b).unwrap();
        let ga = fd_gradient(|x| quadratic(a.matrix(), x), u, 1e-4);
        let gb = fd_gradient(|x| quadratic(b.matrix(), x), u, 1e-4);
        let oracle = canonical_bracket(&ga, &gb);
        let got = quadratic(&c, u);
        // Scale guards against cancellation when the bracket is near zero at u.
        let scale = DVector::from_column_slice(&ga).norm() * DVector::from_column_slice(&gb).norm();
        prop_assert!((got - oracle).abs() <= 1e-6 * oracle.abs().max(scale));
    }

    #[test]
    fn hamilton_map_spectrum_is_imaginary((g, d) in planted()) {
        let a = random_pd_with_spectrum(&g, &d).unwrap();
        let worst = hamilton_map(&a)
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re.abs())
            .fold(0.0, f64::max);
        prop_assert!(worst <= 1e-10 * a.norm());
    }

    #[test]
    fn kernel_equals_hamilton_map_kernel((g, d) in planted(), zeros in 1usize..=5) {
        let mut d = d;
        let zeros = zeros.min(g.n);
        for x in d.iter_mut().rev().take(zeros) {
            *x = 0.0;
        }
        let a = random_psd_with_spectrum(&g, &d).unwrap();
        let k = kernel_basis(&a, &cfg()).into_cols();
        let svd = hamilton_map(&a).svd(false, true);
        let v_t = svd.v_t.unwrap();
        let floor = cfg().tol_rank * svd.singular_values.max();
        let idx: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] <= floor)
            .collect();
        prop_assert_eq!(idx.len(), k.ncols());
        prop_assert_eq!(k.ncols(), 2 * zeros);
        let h = DMatrix::from_rows(&idx.iter().map(|&i| v_t.row(i).into_owned()).collect::<Vec<_>>()).transpose();
        let proj = |p: &DMatrix<f64>, x: &DMatrix<f64>| (x - p * (p.transpose() * x)).norm();
        prop_assert!(proj(&k, &h) <= 1e-9);
        prop_assert!(proj(&h, &k) <= 1e-9);
    }

    #[test]
    fn simdiag_spectra_symmetric_in_arguments((g, d1, d2) in planted_pair()) {
        let fam = random_commuting_family(&g, &[d1, d2]).unwrap();
        prop_assume!(condition(&fam[0]) <= 1e6 && condition(&fam[1]) <= 1e6);
        let ab = simdiag_pd_pair(&fam[0], &fam[1], &cfg()).unwrap();
        let ba = simdiag_pd_pair(&fam[1], &fam[0], &cfg()).unwrap();
        let n = g.n;
        let ab_modes = mode_tuples(&ab.spectra, n);
        let ba_modes: Vec<Vec<f64>> = mode_tuples(&ba.spectra, n)
            .into_iter()
            .map(|t| vec![t[1], t[0]])
            .collect();
        prop_assert!(match_modes(&ab_modes, &ba_modes) <= 1e-8);
    }

    #[test]
    fn pair_with_identity_is_orthogonal_when_commuting_with_j((g, d) in planted()) {
        let a = random_orthosymplectic_family(&g, &[d]).unwrap().remove(0);
        let id = SymMatrix::identity(2 * g.n).unwrap();
        let r = simdiag_pd_pair(&a, &id, &cfg()).unwrap();
        let n2 = 2 * g.n;
        prop_assert!((r.s.transpose() * &r.s - DMatrix::identity(n2, n2)).norm() <= cfg().tol_residual);
    }

    #[test]
    fn planted_psd_family_round_trip(
        (g, d1, d2) in planted_pair(),
        z1 in 0usize..=5,
        z2 in 0usize..=5,
    ) {
        let n = g.n;
        let zero_tail = |d: &[f64], z: usize| {
            let mut d = d.to_vec();
            for x in d.iter_mut().rev().take(z.min(n)) {
                *x = 0.0;
            }
            d
        };
        let spectra = vec![zero_tail(&d1, z1), zero_tail(&d2, z2)];
        let fam = random_commuting_family(&g, &spectra).unwrap();
        let nf = psd_normal_form_family(&fam, &cfg()).unwrap();
        let active = n - z1.min(n).min(z2.min(n));
        prop_assert_eq!(nf.k, active);
        prop_assert_eq!(nf.kernel_dim, 2 * (n - active));
        for sp in &nf.spectra {
            prop_assert!(sp[active..].iter().all(|&x| x == 0.0));
        }
        let expected = mode_tuples(&spectra, active);
        let got = mode_tuples(&nf.spectra, active);
        prop_assert!(match_modes(&expected, &got) <= 1e-8);
        prop_assert!(symplectic_residual(&nf.s) <= cfg().tol_residual);
    }

    #[test]
    fn psd_form_agrees_with_pd_family((g, d1, d2) in planted_pair()) {
        let fam = random_commuting_family(&g, &[d1, d2]).unwrap();
        let nf = psd_normal_form_family(&fam, &cfg()).unwrap();
        let pd = simdiag_pd_family(&fam, &cfg()).unwrap();
        prop_assert_eq!(nf.k, g.n);
        let a = mode_tuples(&nf.spectra, g.n);
        let b = mode_tuples(&pd.spectra, g.n);
        prop_assert!(match_modes(&a, &b) <= 1e-9);
    }

    #[test]
    fn partition_invariant_under_symplectic_congruence(
        (g, d1, d2) in planted_pair(),
        seed2 in any::<u64>(),
    ) {
        let fam = random_commuting_family(&g, &[d1, d2]).unwrap();
        let s0 = random_symplectic(&GenConfig { seed: seed2, ..g }).unwrap();
        let moved: Vec<SymMatrix> = fam
            .iter()
            .map(|m| SymMatrix::new(s0.transpose() * m.matrix() * &s0).unwrap())
            .collect();
        let d = g.n / 2;
        prop_assume!(d >= 1 && g.n == 2 * d);
        let z0 = partition_function(&fam, 0.7, 1.3, d, 2, &cfg()).unwrap();
        let z1 = partition_function(&moved, 0.7, 1.3, d, 2, &cfg()).unwrap();
        prop_assert!((z0.log_z - z1.log_z).abs() <= 1e-8 * z0.log_z.abs().max(1.0));
        prop_assert!(match_modes(
            &z0.mode_sums.iter().map(|&x| vec![x]).collect::<Vec<_>>(),
            &z1.mode_sums.iter().map(|&x| vec![x]).collect::<Vec<_>>(),
        ) <= 1e-8);
    }

    #[test]
    fn mode_sums_multiply_to_sqrt_det((g, d1, d2) in planted_pair()) {
        let fam = random_commuting_family(&g, &[d1, d2]).unwrap();
        prop_assume!(g.n % 2 == 0);
        let z = partition_function(&fam, 1.0, 1.0, g.n / 2, 2, &cfg()).unwrap();
        let total = fam[0].matrix() + fam[1].matrix();
        let det = total.lu().determinant();
        let product: f64 = z.mode_sums.iter().product();
        prop_assert!((product - det.sqrt()).abs() <= 1e-8 * det.sqrt());
    }

    #[test]
    fn gaussian_modes_of_identical_states((g, d) in planted()) {
        let v = random_pd_with_spectrum(&g, &d).unwrap();
        let r = gaussian_normal_modes(&v, &v, &cfg()).unwrap();
        prop_assert!(r.nu1.iter().zip(&r.nu2).all(|(a, b)| (a - b).abs() <= 1e-10 * a.max(1.0)));
    }

    #[test]
    fn generators_are_deterministic(seed in any::<u64>(), n in 1usize..=4, spread in 0.05f64..1.0) {
        let g = GenConfig::new(seed, n).with_spread(spread);
        prop_assert_eq!(random_symplectic(&g).unwrap(), random_symplectic(&g).unwrap());
        prop_assert_eq!(random_orthosymplectic(&g).unwrap(), random_orthosymplectic(&g).unwrap());
        let s = random_symplectic(&g).unwrap();
        prop_assert!(symplectic_residual(&s) <= 1e-10 * s.norm_squared());
        prop_assert!(condition(&s) <= symdiag::instancegen::MAX_CONDITION);
    }

    #[test]
    fn commuting_families_commute((g, d1, d2) in planted_pair()) {
        let fam = random_commuting_family(&g, &[d1.clone(), d2.clone()]).unwrap();
        prop_assert!(symplectically_commutes(&fam[0], &fam[1], &cfg()).unwrap().relative_residual(&cfg()) <= 1e-9);
        let fam = random_orthosymplectic_family(&g, &[d1, d2]).unwrap();
        let (a, b) = (fam[0].matrix(), fam[1].matrix());
        prop_assert!((a * b - b * a).norm() <= 1e-9 * a.norm() * b.norm());
    }
}
