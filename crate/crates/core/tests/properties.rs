//! Property tests for the structural invariants: prox firmness, epigraph
//! feasibility, adjoint correctness, norm preservation of the orthogonal
//! pieces, relaxation tightness at minimizers, and generator determinism.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use proptest::prelude::*;

use epirelax::epigraph::{epi_l1_lambda_star, epi_project_l1, epi_project_l2, epi_project_linf};
use epirelax::image::{
    color_transform, diff_ops, grad3, load_ppm, measurement_op, patch_expand, permute_gradients,
    save_ppm, synth_piecewise, ImagePlane, PatchConfig, PermVariant,
};
use epirelax::layered::{parse_norm_spec, relax};
use epirelax::linalg::{adjoint_residual, norm2, DenseMatrix, Identity, LinearOp, OpRef};
use epirelax::pds::{default_steps, pds_solve};
use epirelax::prox::{
    GroupL21, GroupStructure, L1BallInd, L1Norm, L2BallInd, L2Norm, LInfNorm, NonPosInd,
    NuclearNorm, Proximable, SqDist,
};
use epirelax::recovery::{dstv_norm, dvtv_norm, RecoveryConfig, Regularizer};
use epirelax::rpca::{build_dft_split, gen_shifted_target, gen_sparse_noise};

fn prox_roster(n: usize) -> Vec<Box<dyn Proximable>> {
    let mut r: Vec<Box<dyn Proximable>> = vec![
        Box::new(L1Norm { n }),
        Box::new(L2Norm { n, scale: 1.3 }),
        Box::new(LInfNorm { n }),
        Box::new(SqDist {
            center: (0..n).map(|i| 0.3 - 0.1 * i as f64).collect(),
        }),
        Box::new(NonPosInd { n }),
        Box::new(L1BallInd::new(n, 1.1).unwrap()),
        Box::new(L2BallInd::new(vec![0.1; n], 0.9).unwrap()),
    ];
    if n % 2 == 0 {
        r.push(Box::new(GroupL21 {
            gs: GroupStructure::uniform(n / 2, 2, 1.0).unwrap(),
        }));
    }
    if n == 6 {
        r.push(Box::new(NuclearNorm::new(2, 3)));
    }
    r
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Prox maps are firmly nonexpansive, hence 1-Lipschitz.
    #[test]
    fn prox_is_nonexpansive(
        n in 2usize..=8,
        seed_x in proptest::collection::vec(-3.0f64..3.0, 8),
        seed_y in proptest::collection::vec(-3.0f64..3.0, 8),
        gamma in 0.05f64..5.0,
    ) {
        let x = &seed_x[..n];
        let y = &seed_y[..n];
        for f in prox_roster(n) {
            let px = f.prox(x, gamma);
            let py = f.prox(y, gamma);
            let d_in: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let d_out: f64 = px.iter().zip(&py).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            prop_assert!(
                d_out <= d_in * (1.0 + 1e-10) + 1e-12,
                "{} expanded {d_in:.3e} -> {d_out:.3e}", f.name()
            );
        }
    }

    /// Epigraph projections produce feasible fixed points and leave feasible
    /// inputs untouched.
    #[test]
    fn epi_projections_are_feasible_idempotent(
        n in 1usize..=6,
        seed_x in proptest::collection::vec(-2.0f64..2.0, 6),
        xi in -2.0f64..2.5,
        tau in 0.5f64..1.5,
    ) {
        let x = &seed_x[..n];
        let cases: [(&str, (Vec<f64>, f64), Box<dyn Fn(&[f64]) -> f64>); 3] = [
            ("l2", epi_project_l2(x, xi, tau), Box::new(move |v: &[f64]| tau * norm2(v))),
            ("l1", epi_project_l1(x, xi), Box::new(|v: &[f64]| v.iter().map(|a| a.abs()).sum())),
            ("linf", epi_project_linf(x, xi), Box::new(|v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs())))),
        ];
        for (name, (y, eta), f) in cases {
            prop_assert!(f(&y) <= eta + 1e-9, "{name}: f(y) {:.3e} > eta {eta:.3e}", f(&y));
            let (y2, eta2) = match name {
                "l2" => epi_project_l2(&y, eta, tau),
                "l1" => epi_project_l1(&y, eta),
                _ => epi_project_linf(&y, eta),
            };
            let drift = y.iter().zip(&y2).map(|(a, b)| (a - b).abs()).fold((eta - eta2).abs(), f64::max);
            prop_assert!(drift <= 1e-9, "{name}: projection moved a feasible point by {drift:.3e}");
        }
    }

    /// The closed-form `λ*` is a nonnegative root of
    /// `φ(λ) = Σ max(|xᵢ|−λ, 0) − (ξ+λ)` whenever the input lies strictly
    /// outside the epigraph.
    #[test]
    fn lambda_star_is_a_root(
        n in 1usize..=16,
        seed_x in proptest::collection::vec(-2.0f64..2.0, 16),
        xi in -2.0f64..2.0,
    ) {
        let x = &seed_x[..n];
        let l1: f64 = x.iter().map(|a| a.abs()).sum();
        prop_assume!(l1 > xi + 1e-9);
        let lam = epi_l1_lambda_star(x, xi);
        prop_assert!(lam >= 0.0);
        let phi: f64 = x.iter().map(|a| (a.abs() - lam).max(0.0)).sum::<f64>() - (xi + lam);
        prop_assert!(phi.abs() <= 1e-9 * (1.0 + l1), "phi(λ*) = {phi:.3e}");
    }

    /// ⟨Ax, y⟩ = ⟨x, Aᵀy⟩ for every operator family.
    #[test]
    fn operators_have_exact_adjoints(
        w in 2usize..=5,
        h in 2usize..=5,
        m in 2usize..=9,
        seed in 0u64..1000,
    ) {
        let ops: Vec<OpRef> = vec![
            Arc::new(DenseMatrix::from_fn(m, w * h, |r, c| ((r * 31 + c * 17 + seed as usize) % 13) as f64 / 6.5 - 1.0)),
            diff_ops(w, h).0,
            diff_ops(w, h).1,
            grad3(w, h, 3),
            color_transform(w * h),
            permute_gradients(PermVariant::P1, w, h),
            permute_gradients(PermVariant::P4, w, h),
            patch_expand(PatchConfig::new(3).unwrap(), w.max(3), h.max(3)),
            measurement_op(m, 16, seed).unwrap(),
            Arc::new(build_dft_split(m, 2, 1).unwrap()),
        ];
        for op in ops {
            let r = adjoint_residual(op.as_ref(), 4);
            prop_assert!(r <= 1e-8, "adjoint residual {r:.3e} (in {} out {})", op.in_dim(), op.out_dim());
        }
    }

    /// The opponent color transform, gradient permutations, and the DFT
    /// split are isometries.
    #[test]
    fn orthogonal_pieces_preserve_norms(
        w in 2usize..=5,
        h in 2usize..=5,
        seed_x in proptest::collection::vec(-2.0f64..2.0, 150),
    ) {
        let n = w * h;
        let color = color_transform(n);
        let x = &seed_x[..3 * n];
        prop_assert!((norm2(&color.apply_vec(x)) - norm2(x)).abs() <= 1e-10 * (1.0 + norm2(x)));
        for variant in [PermVariant::P1, PermVariant::P4] {
            let p = permute_gradients(variant, w, h);
            let g = &seed_x[..p.in_dim()];
            prop_assert!((norm2(&p.apply_vec(g)) - norm2(g)).abs() <= 1e-10 * (1.0 + norm2(g)));
        }
        let t = build_dft_split(w * h, 2, 1).unwrap();
        let v = &seed_x[..2 * w * h];
        prop_assert!((norm2(&t.apply_vec(v)) - norm2(v)).abs() <= 1e-10 * (1.0 + norm2(v)));
    }

    /// The structure-tensor regularizer with a 1×1 patch window is exactly
    /// the decorrelated-VTV value.
    #[test]
    fn patch1_structure_tensor_equals_dvtv(
        w in 3usize..=7,
        h in 3usize..=7,
        luma_w in 0.2f64..0.95,
        seed_px in proptest::collection::vec(0.0f64..1.0, 3 * 49),
    ) {
        let mut cfg = RecoveryConfig::new(Regularizer::Dstv, w, h).unwrap();
        cfg.patch = PatchConfig::new(1).unwrap();
        cfg.w = luma_w;
        let img = ImagePlane::new(w, h, 3, seed_px[..3 * w * h].to_vec()).unwrap();
        let a = dstv_norm(&img, &cfg).unwrap();
        let b = dvtv_norm(&img, &cfg).unwrap();
        prop_assert!((a - b).abs() <= 1e-8, "dstv {a:.12} vs dvtv {b:.12}");
    }

    /// Every column of the shifted target carries one 5-sample run starting
    /// `shift` rows below the previous column's; invalid geometry errors.
    #[test]
    fn shifted_target_layout(
        shift in 0usize..=4,
        m in 8usize..=48,
        n in 2usize..=24,
    ) {
        let r = gen_shifted_target(shift, m, n);
        if shift * (n - 1) + 5 > m {
            prop_assert!(r.is_err());
        } else {
            let t = r.unwrap();
            for c in 0..n {
                for row in 0..m {
                    let want = (row >= shift * c && row < shift * c + 5) as u8 as f64;
                    prop_assert!((t.get(row, c) - want).abs() < 1e-15);
                }
            }
        }
    }

    /// Sparse noise avoids the target's support and is seed-deterministic.
    #[test]
    fn sparse_noise_disjoint_and_deterministic(
        shift in 0usize..=2,
        p in 0.01f64..0.3,
        seed in 0u64..500,
    ) {
        let t = gen_shifted_target(shift, 43, 20).unwrap();
        let s1 = gen_sparse_noise(&t, p, seed).unwrap();
        let s2 = gen_sparse_noise(&t, p, seed).unwrap();
        prop_assert_eq!(s1.data(), s2.data());
        for (a, b) in t.data().iter().zip(s1.data()) {
            prop_assert!(a * b == 0.0, "noise overlaps the target");
        }
    }
}

static ROUND_TRIP_ID: AtomicUsize = AtomicUsize::new(0);

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Already-quantized images survive the 8-bit file format exactly.
    #[test]
    fn pnm_round_trip_is_exact_on_quantized_pixels(
        w in 1usize..=9,
        h in 1usize..=9,
        channels in prop_oneof![Just(1usize), Just(3usize)],
        seed_px in proptest::collection::vec(0u8..=255, 3 * 81),
    ) {
        let px: Vec<f64> = seed_px[..channels * w * h].iter().map(|&b| b as f64 / 255.0).collect();
        let img = ImagePlane::new(w, h, channels, px).unwrap();
        let path = std::env::temp_dir().join(format!(
            "epirelax_prop_{}_{}.pnm",
            std::process::id(),
            ROUND_TRIP_ID.fetch_add(1, Ordering::Relaxed)
        ));
        save_ppm(&path, &img).unwrap();
        let back = load_ppm(&path).unwrap();
        let _ = std::fs::remove_file(&path);
        prop_assert_eq!(back.width(), w);
        prop_assert_eq!(back.height(), h);
        prop_assert_eq!(back.channels(), channels);
        let worst = img.pixels().iter().zip(back.pixels())
            .map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
        prop_assert!(worst <= 1e-12, "round trip drifted by {worst:.3e}");
    }

    /// At the relaxed minimizer the epigraph bounds are tight: each
    /// auxiliary vector equals the forward value of its layer.
    #[test]
    fn relaxation_is_tight_at_minimizers(
        spec_idx in 0usize..4,
        center in proptest::collection::vec(-1.5f64..1.5, 8),
    ) {
        let (spec, n) = [
            ("l1(group2:l2)", 8usize),
            ("l2(group2:l1)", 8),
            ("l1(group3:l2)", 6),
            ("l1(group2:l2(group2:l1))", 8),
        ][spec_idx];
        let ln = parse_norm_spec(spec, n).unwrap();
        let a_op: OpRef = Arc::new(Identity::new(n));
        let relaxed = relax(
            &ln,
            a_op.clone(),
            Some(Box::new(SqDist { center: center[..n].to_vec() })),
            vec![],
        ).unwrap();
        let steps = default_steps(relaxed.problem.f_norm());
        let init = relaxed.init_primal(&vec![0.0; n]);
        let dual0 = vec![0.0; relaxed.problem.dual_dim()];
        let out = pds_solve(&relaxed.problem, steps, 1e-9, 300_000, Some((init, dual0))).unwrap();
        let x = &out.primal[..relaxed.x_dim];
        let chain = relaxed.norm.forward(&a_op.apply_vec(x));
        for (i, vals) in chain.iter().take(ln.depth() - 1).enumerate() {
            let aux = &out.primal[relaxed.aux_range(i)];
            for (a, b) in vals.iter().zip(aux) {
                prop_assert!(
                    (a - b).abs() <= 1e-5 * (1.0 + a.abs()),
                    "{spec}: layer {} bound {b:.8} vs value {a:.8}", i + 1
                );
            }
        }
    }
}

/// Fixed-seed pipelines reproduce bit-identical outputs.
#[test]
fn generators_are_deterministic() {
    let a = synth_piecewise(16, 16, 3).unwrap();
    let b = synth_piecewise(16, 16, 3).unwrap();
    assert_eq!(a.pixels(), b.pixels());

    let phi1 = measurement_op(10, 64, 5).unwrap();
    let phi2 = measurement_op(10, 64, 5).unwrap();
    let x: Vec<f64> = (0..64).map(|i| (i as f64 * 0.37).sin()).collect();
    assert_eq!(phi1.apply_vec(&x), phi2.apply_vec(&x));
}
