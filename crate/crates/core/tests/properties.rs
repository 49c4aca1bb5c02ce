//! Property-level invariants of the kernel and the structure layer.

use num_complex::Complex64;
use proptest::prelude::*;

use tbt_core::identities::{
    displacement_core, ones_row_resolvent, resolvent_apply, CouplingSet, ResolventKind, Side,
};
use tbt_core::linalg::{cplx, inverse, lu_solve, max_abs_diff, rel_residual, ComplexMatrix};
use tbt_core::rng::XorShift64Star;
use tbt_core::structured::{
    random_spec, structure_check, BlockTbtSpec, DimTriple, ExchangeSet, StructureClass,
};

fn arb_entry() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| cplx(re, im))
}

fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(arb_entry(), rows * cols)
        .prop_map(move |v| ComplexMatrix::from_entries(rows, cols, v).unwrap())
}

proptest! {
    #[test]
    fn kron_mixed_product(
        (a, b, c, d) in (1usize..=3, 1usize..=3, 1usize..=3, 1usize..=3, 1usize..=3, 1usize..=3)
            .prop_flat_map(|(r1, c1, r2, c2, c3, c4)| {
                (
                    arb_matrix(r1, c1),
                    arb_matrix(r2, c2),
                    arb_matrix(c1, c3),
                    arb_matrix(c2, c4),
                )
            })
    ) {
        let lhs = a.kron(&b).matmul(&c.kron(&d)).unwrap();
        let rhs = a.matmul(&c).unwrap().kron(&b.matmul(&d).unwrap());
        prop_assert!(rel_residual(&lhs, &rhs) <= 1e-13);
    }

    #[test]
    fn row_factor_absorbs_into_kron(
        (f, h) in (1usize..=3, 1usize..=3, 1usize..=4)
            .prop_flat_map(|(r, k, q)| (arb_matrix(r, k), arb_matrix(1, q)))
    ) {
        // F (I_k (x) h) == F (x) h for a row vector h
        let k = f.cols();
        let lhs = f.matmul(&ComplexMatrix::identity(k).kron(&h)).unwrap();
        let rhs = f.kron(&h);
        prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-14);
    }

    #[test]
    fn conj_transpose_involution(a in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| arb_matrix(r, c))) {
        prop_assert_eq!(a.conj_transpose().conj_transpose(), a);
    }

    #[test]
    fn lu_solve_residual_bound(
        (a, rhs) in (2usize..=8, 1usize..=3).prop_flat_map(|(n, k)| (arb_matrix(n, n), arb_matrix(n, k)))
    ) {
        let n = a.rows();
        let mut a = a;
        for d in 0..n {
            a[(d, d)] += cplx(2.0 * n as f64, 0.0); // keep it comfortably invertible
        }
        let x = lu_solve(&a, &rhs).unwrap();
        let residual = max_abs_diff(&a.matmul(&x).unwrap(), &rhs);
        let cond_proxy = n as f64 * a.norm_max() * inverse(&a).unwrap().norm_max();
        prop_assert!(residual <= cond_proxy * n as f64 * f64::EPSILON * rhs.norm_max().max(1.0));
    }

    #[test]
    fn assemble_is_linear(
        (seed_x, seed_y, alpha, beta) in (0u64..500, 500u64..1000, arb_entry(), arb_entry())
    ) {
        let dims = DimTriple::new(2, 3, 2).unwrap();
        let x = random_spec(dims, seed_x, StructureClass::General, Some(0.0));
        let y = random_spec(dims, seed_y, StructureClass::General, Some(0.0));
        let combined: Vec<ComplexMatrix> = x
            .coeff_blocks()
            .iter()
            .zip(y.coeff_blocks())
            .map(|(bx, by)| &bx.scale(alpha) + &by.scale(beta))
            .collect();
        let spec = BlockTbtSpec::new(dims, StructureClass::General, combined).unwrap();
        let lhs = spec.assemble();
        let rhs = &x.assemble().scale(alpha) + &y.assemble().scale(beta);
        prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-14);
    }
}

fn dims_grid() -> Vec<DimTriple> {
    let mut out = Vec::new();
    for m1 in [2usize, 3] {
        for m2 in [2usize, 3] {
            for m3 in [2usize, 3] {
                out.push(DimTriple::new(m1, m2, m3).unwrap());
            }
        }
    }
    out
}

#[test]
fn structure_check_confirms_every_generated_class() {
    let grid = dims_grid();
    for class in StructureClass::ALL {
        for seed in 0..100u64 {
            let dims = grid[(seed as usize) % grid.len()];
            let spec = random_spec(dims, seed, class, None);
            assert!(
                structure_check(&spec).satisfies(class),
                "class {class} seed {seed} dims {dims:?}"
            );
        }
    }
}

#[test]
fn dstu_transpose_conjugation_both_levels() {
    for (seed, dims) in dims_grid().into_iter().enumerate() {
        let spec = random_spec(dims, seed as u64, StructureClass::Dstu, None);
        let ex = ExchangeSet::new(dims);
        let t = spec.assemble();
        assert!(rel_residual(&t.transpose(), &(&(&ex.u * &t) * &ex.u)) <= 1e-13);
        let u23 = ex.u2.kron(&ex.u3);
        for r in -(dims.m1() as i64 - 1)..=(dims.m1() as i64 - 1) {
            let outer = spec.outer_block(r);
            assert!(rel_residual(&outer.transpose(), &(&(&u23 * &outer) * &u23)) <= 1e-13);
        }
    }
}

#[test]
fn default_shift_gives_invertibility_everywhere() {
    for class in StructureClass::ALL {
        for (seed, dims) in dims_grid().into_iter().enumerate() {
            let spec = random_spec(dims, 1000 + seed as u64, class, None);
            assert!(
                tbt_core::linalg::lu_factor(&spec.assemble()).is_ok(),
                "class {class} dims {dims:?}"
            );
        }
    }
}

/// The wide factors commute with the displacement resolvents through the
/// corresponding level-core resolvents, in all the forms the recovery
/// pipeline relies on.
#[test]
fn factor_resolvent_intertwining() {
    let dims = DimTriple::new(3, 2, 2).unwrap();
    let spec = random_spec(dims, 77, StructureClass::General, None);
    let cs = CouplingSet::build(&spec);
    let eye = |n: usize| ComplexMatrix::identity(n);
    let m3 = dims.m3();
    let mut rng = XorShift64Star::new(2024);
    for _ in 0..6 {
        let z = cplx(rng.next_unit() * 0.5, rng.next_unit() * 0.4);
        if (z - cplx(0.0, 0.5)).norm() < 1e-2 || (z + cplx(0.0, 0.5)).norm() < 1e-2 {
            continue;
        }
        let small = |p: usize, adjoint: bool| {
            let core = cs.core(p).unwrap();
            let core = if adjoint {
                core.conj_transpose()
            } else {
                core.clone()
            };
            inverse(&(&core - &eye(core.rows()).scale(z))).unwrap()
        };

        let f1 = cs.factors(1).unwrap();
        let f2 = cs.factors(2).unwrap();

        // adjoint-side: wide factors slide out as closed-form rows
        let lhs = resolvent_apply(dims, 1, z, ResolventKind::Adjoint, Side::Right, &f1.m2).unwrap();
        let row1 = ones_row_resolvent(dims.m1(), z).unwrap();
        let rhs = row1.kron(&eye(dims.m2() * m3));
        assert!(rel_residual(&lhs, &rhs) <= 1e-12);

        let lhs = resolvent_apply(dims, 2, z, ResolventKind::Adjoint, Side::Right, &f2.m2).unwrap();
        let row2 = ones_row_resolvent(dims.m2(), z).unwrap();
        let rhs = eye(dims.m1()).kron(&row2.kron(&eye(m3)));
        assert!(rel_residual(&lhs, &rhs) <= 1e-12);

        // tall factors commute with the complementary resolvent
        let lhs = resolvent_apply(dims, 2, z, ResolventKind::Standard, Side::Left, &f1.m3).unwrap();
        let rhs = &f1.m3 * &small(2, false).kron(&eye(m3));
        assert!(rel_residual(&lhs, &rhs) <= 1e-12);

        let lhs = resolvent_apply(dims, 1, z, ResolventKind::Standard, Side::Left, &f2.m3).unwrap();
        let rhs = &f2.m3 * &small(1, false).kron(&eye(m3));
        assert!(rel_residual(&lhs, &rhs) <= 1e-12);

        // and their adjoints
        for (p, k) in [(1usize, 2usize), (2, 1)] {
            let m2p = &cs.factors(p).unwrap().m2;
            let lhs =
                resolvent_apply(dims, k, z, ResolventKind::Adjoint, Side::Right, m2p).unwrap();
            let rhs = &small(k, true).kron(&eye(m3)) * m2p;
            assert!(rel_residual(&lhs, &rhs) <= 1e-12, "p={p} k={k}");
        }

        // the summation row reaches the complementary wide factor
        let l_star = cs.l.conj_transpose();
        let lhs =
            resolvent_apply(dims, 1, z, ResolventKind::Adjoint, Side::Right, &l_star).unwrap();
        let rhs = &row1.kron(&eye(m3)) * &f2.m2;
        assert!(rel_residual(&lhs, &rhs) <= 1e-12);

        let lhs =
            resolvent_apply(dims, 2, z, ResolventKind::Adjoint, Side::Right, &l_star).unwrap();
        let rhs = &row2.kron(&eye(m3)) * &f1.m2;
        assert!(rel_residual(&lhs, &rhs) <= 1e-12);
    }
}

/// The displacement core at every level is the same triangular matrix, so
/// its closed-form resolvent row is level independent.
#[test]
fn displacement_core_uniform_across_levels() {
    let dims = DimTriple::new(3, 3, 3).unwrap();
    let spec = random_spec(dims, 5, StructureClass::General, None);
    let cs = CouplingSet::build(&spec);
    for p in 1..=3 {
        assert_eq!(*cs.core(p).unwrap(), displacement_core(3));
    }
}

/// Index arithmetic keeps working past the small acceptance grid: the
/// identities and the recovery pipeline hold on wider and deeper levels.
#[test]
fn wider_levels_smoke() {
    use tbt_core::identities::{
        first_factor_identity_residual, fourth_factor_identity_residual,
        structure_identity_residual,
    };
    use tbt_core::recovery::{
        omega_direct, omega_min, recover_u, recover_uhat, sample_pairs, u_stacked, uhat_stacked,
        InverseData, MinimalData,
    };

    for (m1, m2, m3) in [(4usize, 3usize, 2usize), (5, 4, 3)] {
        let dims = DimTriple::new(m1, m2, m3).unwrap();
        for (ci, class) in StructureClass::ALL.iter().enumerate() {
            let spec = random_spec(dims, 4242 + ci as u64, *class, None);
            let cs = CouplingSet::build(&spec);
            let t = spec.assemble();
            let levels: &[usize] = if *class == StructureClass::Toeplitz3d {
                &[1, 2, 3]
            } else {
                &[1, 2]
            };
            for &p in levels {
                assert!(structure_identity_residual(&t, &cs, p).unwrap() <= 1e-12);
            }
            for k in 1..=2 {
                assert!(fourth_factor_identity_residual(&cs, k).unwrap() <= 1e-12);
                assert!(first_factor_identity_residual(&cs, k).unwrap() <= 1e-12);
            }

            let id = InverseData::compute(&spec, &cs).unwrap();
            let md = MinimalData::compute(&cs, &id);
            let pair = sample_pairs(11, 1)[0];
            let omega_ref = omega_direct(&cs, &id, pair.lambda, pair.mu).unwrap();
            for p in 1..=2 {
                let got = omega_min(&cs, &md, pair.lambda, pair.mu, p).unwrap();
                assert!(rel_residual(&got, &omega_ref) <= 1e-9, "{class} p={p}");
            }
            let uhat = recover_uhat(&cs, &md, pair.lambda).unwrap();
            let u = recover_u(&cs, &md, pair.mu).unwrap();
            assert!(rel_residual(&uhat, &uhat_stacked(&cs, &id, pair.lambda).unwrap()) <= 1e-9);
            assert!(rel_residual(&u, &u_stacked(&cs, &id, pair.mu).unwrap()) <= 1e-9);
        }
    }
}

/// The stacked wide factors commute with an adjoint resolvent through the
/// inverse of the paired-core factor, up to a low-rank correction built
/// from the constant coupling row; dually, the stacked tall factors
/// commute with a standard resolvent through it. These are the relations
/// that make the block-system reconstruction work.
#[test]
fn paired_core_commutation_identities() {
    use num_complex::Complex64;
    use tbt_core::identities::mixed_core_pair;
    use tbt_core::linalg::{lu_solve, ComplexMatrix};

    let dims = DimTriple::new(3, 2, 2).unwrap();
    let spec = random_spec(dims, 321, StructureClass::General, None);
    let cs = CouplingSet::build(&spec);
    let m = dims.m();
    let eye = ComplexMatrix::identity(m);
    let mut rng = XorShift64Star::new(5150);
    for _ in 0..4 {
        let z = cplx(rng.next_unit() * 0.5, rng.next_unit() * 0.4);
        if (z - cplx(0.0, 0.5)).norm() < 0.05 || (z + cplx(0.0, 0.5)).norm() < 0.05 {
            continue;
        }
        for (p, k) in [(1usize, 2usize), (2, 1)] {
            let fp = cs.factors(p).unwrap();
            let fk = cs.factors(k).unwrap();
            let pair_k = mixed_core_pair(dims, k, z).unwrap();
            let q_k = &(&cs.k1[k - 1] * &fk.m2) + &(&cs.lp[k - 1] * &cs.k_row);

            // invertible off the spectrum, singular on it
            assert!(inverse(&pair_k).is_ok());

            // adjoint side: PiHat_p (A_k^* - z)^'t equals the paired-core
            // inverse applied to PiHat_p plus the correction through q_k
            let a_k_star = cs.op(k).unwrap().conj_transpose();
            let shifted = &a_k_star - &eye.scale(z);
            let lhs = lu_solve(&shifted.transpose(), &fp.pi_hat.transpose())
                .unwrap()
                .transpose();
            let corr_rows = fp.pi_hat.rows() / 2;
            let mut corr = ComplexMatrix::zeros(fp.pi_hat.rows(), m);
            corr.set_block(
                corr_rows,
                0,
                &lu_solve(&shifted.transpose(), &q_k.transpose())
                    .unwrap()
                    .transpose(),
            );
            let rhs = lu_solve(&pair_k, &(&fp.pi_hat + &corr.scale(Complex64::I))).unwrap();
            assert!(rel_residual(&lhs, &rhs) <= 1e-11, "adjoint p={p} k={k}");

            // standard side: (A_p - z)^'t Pi_k conjugates through the
            // level-p paired core with the first-factor correction
            let pair_p = mixed_core_pair(dims, p, z).unwrap();
            let v_p = &(&cs.n_col * &cs.lp[p - 1].conj_transpose()) + &(&fp.m3 * &cs.k1[k - 1]);
            let a_p = cs.op(p).unwrap();
            let shifted_p = a_p - &eye.scale(z);
            let lhs = lu_solve(&shifted_p, &fk.pi).unwrap();
            let zeros = ComplexMatrix::zeros(v_p.rows(), v_p.cols());
            let corr = ComplexMatrix::hstack(&[&lu_solve(&shifted_p, &v_p).unwrap(), &zeros]);
            let rhs_num = &fk.pi - &corr.scale(Complex64::I);
            // solve X pair_p = rhs_num through the transposed system
            let rhs = lu_solve(&pair_p.transpose(), &rhs_num.transpose())
                .unwrap()
                .transpose();
            assert!(rel_residual(&lhs, &rhs) <= 1e-11, "standard p={p} k={k}");
        }
    }

    // singular exactly on the spectrum
    let on_pole = mixed_core_pair(dims, 1, cplx(0.0, 0.5)).unwrap();
    assert!(inverse(&on_pole).is_err());
}

/// Three-way kernel agreement over the full class x dims grid, five
/// well-separated pairs each: the direct sandwich and both reconstructed
/// rank-one routes coincide.
#[test]
fn kernel_agreement_across_full_grid() {
    use tbt_core::recovery::{omega_direct, omega_min, sample_pairs, InverseData, MinimalData};

    let mut worst = 0.0f64;
    for class in StructureClass::ALL {
        for (di, dims) in dims_grid().into_iter().enumerate() {
            let seed = 60_000 + di as u64;
            let spec = random_spec(dims, seed, class, None);
            let cs = CouplingSet::build(&spec);
            let id = InverseData::compute(&spec, &cs).unwrap();
            let md = MinimalData::compute(&cs, &id);
            for pair in sample_pairs(seed + 1, 5) {
                let reference = omega_direct(&cs, &id, pair.lambda, pair.mu).unwrap();
                for p in 1..=2 {
                    let got = omega_min(&cs, &md, pair.lambda, pair.mu, p).unwrap();
                    worst = worst.max(rel_residual(&got, &reference));
                }
            }
        }
    }
    assert!(worst <= 1e-9, "worst {worst:.3e}");
}
