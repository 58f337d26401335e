//! Acceptance checks, one line per criterion. Run with
//! `cargo test -p shapley-lg --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{dmatrix, DMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rayon::prelude::*;

use shapley_lg::cli::median_seconds;
use shapley_lg::condvar::CondVarTable;
use shapley_lg::indices::{shapley_from_table, sobol_from_table};
use shapley_lg::mc::estimate_cond_var_table;
use shapley_lg::permutation::replicate_random_permutation;
use shapley_lg::seed;
use shapley_lg::{
    block_additive_shapley, conditional_variance, cv_experiment,
    double_mc_cond_var, exact_permutation_shapley, generate_block_instance,
    generate_random_instance, lg_groups_indices, lg_indices, mc_shapley,
    verify_cross_block_zeros, BlackBoxModel, Block, GaussianInput, LinearGaussianModel,
    McConfig, SubsetId,
};

type Outcome = Result<String, String>;

fn linear_black_box(model: &LinearGaussianModel) -> (BlackBoxModel, GaussianInput) {
    let beta: Vec<f64> = model.beta().iter().copied().collect();
    let f = BlackBoxModel::new(beta.len(), move |x| beta.iter().zip(x).map(|(b, x)| b * x).sum());
    let input = GaussianInput::new(model.mu().clone(), model.gamma().clone()).unwrap();
    (f, input)
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for s in 0..100u64 {
        let p = 2 + (s % 7) as usize;
        let model = generate_random_instance(p, 1000 + s);
        let lg = lg_indices(&model).map_err(|e| e.to_string())?;
        let perm = exact_permutation_shapley(&model).map_err(|e| e.to_string())?;
        for (a, b) in lg.shapley.iter().zip(&perm) {
            worst = worst.max((a - b).abs());
        }
    }
    let elapsed = start.elapsed();
    let msg = format!("max |LG - exact-perm| = {worst:.3e}, runtime {:.2} s", elapsed.as_secs_f64());
    if worst <= 1e-10 && elapsed < Duration::from_secs(60) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_2() -> Outcome {
    let mut sobol_err: f64 = 0.0;
    let mut shapley_err: f64 = 0.0;
    let mut range_err: f64 = 0.0;
    let mut chain_drop: f64 = 0.0;
    for s in 0..100u64 {
        let p = 2 + (s % 11) as usize;
        let model = generate_random_instance(p, 2000 + s);
        let r = lg_indices(&model).map_err(|e| e.to_string())?;
        sobol_err = sobol_err.max((r.sobol.iter().sum::<f64>() - 1.0).abs());
        shapley_err = shapley_err.max((r.shapley.iter().sum::<f64>() - 1.0).abs());
        for &e in &r.shapley {
            range_err = range_err.max(-e).max(e - 1.0);
        }
        let mut rng = seed::rng(3000 + s);
        let mut order: Vec<usize> = (0..p).collect();
        for _ in 0..50 {
            order.shuffle(&mut rng);
            let mut mask = 0usize;
            let mut prev = r.closed_sobol[0];
            for &i in &order {
                mask |= 1 << i;
                let next = r.closed_sobol[mask];
                chain_drop = chain_drop.max(prev - next);
                prev = next;
            }
        }
    }
    let msg = format!(
        "|sum S - 1| <= {sobol_err:.2e}, |sum eta - 1| <= {shapley_err:.2e}, \
         eta range excess {range_err:.2e}, largest closed-Sobol drop {chain_drop:.2e}"
    );
    if sobol_err <= 1e-10 && shapley_err <= 1e-10 && range_err <= 1e-10 && chain_drop <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_3() -> Outcome {
    let shapes = [(2, 3), (3, 4), (3, 5)];
    let mut worst: f64 = 0.0;
    let mut violations = 0;
    for s in 0..20u64 {
        let (k, n) = shapes[s as usize % 3];
        let model = generate_block_instance(k, n, 4000 + s);
        let grouped = lg_groups_indices(&model, 0.0).map_err(|e| e.to_string())?;
        if grouped.partition.k() != k {
            return Err(format!("instance {s}: found {} groups, expected {k}", grouped.partition.k()));
        }
        let full = lg_indices(&model).map_err(|e| e.to_string())?;
        for (a, b) in grouped.shapley.iter().zip(&full.shapley) {
            worst = worst.max((a - b).abs());
        }
        violations += verify_cross_block_zeros(&full, &grouped.partition, 1e-10).len();
    }
    let msg = format!("max |grouped - full| = {worst:.3e}, cross-block violations {violations}");
    if worst <= 1e-10 && violations == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_4() -> Outcome {
    let model = generate_block_instance(2, 6, 5000);
    let grouped = lg_groups_indices(&model, 0.0).map_err(|e| e.to_string())?;
    let full = lg_indices(&model).map_err(|e| e.to_string())?;
    let msg = format!("grouped {} evaluations, full {}", grouped.eval_count, full.eval_count);
    if grouped.eval_count == 128 && full.eval_count == 4096 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let model = generate_random_instance(8, 6000);
    let t_lg = median_seconds(9, || {
        lg_indices(&model).unwrap();
    });
    let t_perm = median_seconds(3, || {
        exact_permutation_shapley(&model).unwrap();
    });
    let first = start.elapsed();

    let start = Instant::now();
    let blocks = generate_block_instance(4, 4, 6001);
    let t_grouped = median_seconds(9, || {
        lg_groups_indices(&blocks, 0.0).unwrap();
    });
    let t_full = median_seconds(5, || {
        lg_indices(&blocks).unwrap();
    });
    let second = start.elapsed();

    let r1 = t_perm / t_lg;
    let r2 = t_full / t_grouped;
    let msg = format!(
        "p=8: exact-perm/LG = {r1:.0}x ({t_perm:.3e} s vs {t_lg:.3e} s, {:.1} s total); \
         (4,4): full/grouped = {r2:.0}x ({t_full:.3e} s vs {t_grouped:.3e} s, {:.1} s total)",
        first.as_secs_f64(),
        second.as_secs_f64()
    );
    let limit = Duration::from_secs(300);
    if r1 >= 100.0 && r2 >= 50.0 && first < limit && second < limit {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_6() -> Outcome {
    let model = generate_random_instance(5, 7000);
    let exact = lg_indices(&model).map_err(|e| e.to_string())?.shapley;
    let runs = replicate_random_permutation(&model, 50, 200, 7001).map_err(|e| e.to_string())?;
    let mut worst_z: f64 = 0.0;
    for i in 0..5 {
        let xs: Vec<f64> = runs.iter().map(|r| r.shapley_hat[i]).collect();
        let (mean, se) = mean_se(&xs);
        worst_z = worst_z.max((mean - exact[i]).abs() / se);
    }
    let cv100 = cv_experiment(&model, 100, 200, 7002).map_err(|e| e.to_string())?;
    let cv400 = cv_experiment(&model, 400, 200, 7003).map_err(|e| e.to_string())?;
    let ratio = cv400.mean_cv / cv100.mean_cv;
    let msg = format!(
        "(a) largest |mean - exact| = {worst_z:.2} SE; (b) mean CV {:.2}% at m=100, {:.2}% at m=400, ratio {ratio:.3}",
        cv100.mean_cv, cv400.mean_cv
    );
    if worst_z <= 3.0 && (0.35..=0.65).contains(&ratio) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn binom(n: u64, k: u64) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

fn criterion_7() -> Outcome {
    let mut checked = 0;
    let mut failures = 0;
    for p in 1..=20u64 {
        for c in 1..=p {
            for u in 0..c {
                let mut lhs = BigRational::zero();
                for j in 0..=(p - c) {
                    lhs += BigRational::new(binom(p - c, j), binom(p - 1, u + j));
                }
                lhs /= BigRational::from_integer(BigInt::from(p));
                let rhs = BigRational::new(BigInt::one(), BigInt::from(c) * binom(c - 1, u));
                checked += 1;
                if lhs != rhs {
                    failures += 1;
                }
            }
        }
    }
    let msg = format!("{checked} exact cases, {failures} failures");
    if failures == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_8() -> Outcome {
    let model = generate_random_instance(4, 8000);
    let (f, input) = linear_black_box(&model);
    let mut masks: Vec<u64> = (1..15).collect();
    masks.shuffle(&mut seed::rng(8001));
    let mut worst_z: f64 = 0.0;
    for &mask in &masks[..10] {
        let u = SubsetId::new(mask, 4).unwrap();
        let exact = conditional_variance(&model, u);
        let reps: Vec<f64> = (0..50u64)
            .into_par_iter()
            .map(|r| double_mc_cond_var(&f, &input, u, 1000, 100, seed::derive(8002, &[mask, r])).unwrap())
            .collect();
        let (mean, se) = mean_se(&reps);
        worst_z = worst_z.max((mean - exact).abs() / se);
    }
    let msg = format!("10 subsets, largest |mean - exact| = {worst_z:.2} SE");
    if worst_z <= 3.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn block_fn(w: (f64, f64)) -> impl Fn(f64, f64) -> f64 + Send + Sync + Copy {
    move |a, b| {
        let z = w.0 * a * a + w.1 * b * b;
        z.cos() + z
    }
}

fn criterion_9() -> Outcome {
    let weights = [(1.0, 0.5), (0.3, 1.2), (0.8, 0.8)];
    let rhos = [0.6, -0.4, 0.0];
    let mut gamma = DMatrix::zeros(6, 6);
    let mut blocks = Vec::new();
    for j in 0..3 {
        let g = dmatrix![1.0, rhos[j]; rhos[j], 1.0];
        gamma.view_mut((2 * j, 2 * j), (2, 2)).copy_from(&g);
        let h = block_fn(weights[j]);
        blocks.push(Block {
            indices: vec![2 * j, 2 * j + 1],
            model: BlackBoxModel::new(2, move |x| h(x[0], x[1])),
            input: GaussianInput::centered(g).unwrap(),
        });
    }
    let hs: Vec<_> = weights.iter().map(|&w| block_fn(w)).collect();
    let full = BlackBoxModel::new(6, move |x| (0..3).map(|j| hs[j](x[2 * j], x[2 * j + 1])).sum());
    let input = GaussianInput::centered(gamma).unwrap();

    let reps = 40u64;
    let cfg = |s: u64| McConfig {
        m: 400,
        n_var: 20_000,
        n_outer: 1,
        n_inner: 3,
        seed: s,
        ..McConfig::default()
    };
    let add: Vec<Vec<f64>> = (0..reps)
        .map(|r| block_additive_shapley(&blocks, &cfg(seed::derive(9000, &[r]))).map(|e| e.shapley))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let tot: Vec<Vec<f64>> = (0..reps)
        .map(|r| mc_shapley(&full, &input, &cfg(seed::derive(9001, &[r]))).map(|e| e.shapley_hat))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut worst_z: f64 = 0.0;
    let mut sum_add = [0.0; 6];
    for i in 0..6 {
        let (ma, sa) = mean_se(&add.iter().map(|v| v[i]).collect::<Vec<_>>());
        let (mt, st) = mean_se(&tot.iter().map(|v| v[i]).collect::<Vec<_>>());
        sum_add[i] = ma;
        worst_z = worst_z.max((ma - mt).abs() / (sa * sa + st * st).sqrt());
    }
    let msg = format!(
        "block-additive vs full, largest gap {worst_z:.2} combined SE; block-additive means {:?}",
        sum_add.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>()
    );
    if worst_z <= 3.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// `V_u = Var(Y) - E_u` of a table, `u` given as a mask of the table's inputs.
fn closed_var(t: &CondVarTable, mask: usize) -> f64 {
    t.var_y() - t.values()[mask]
}

/// Compresses the bits of `mask` at the positions `idx` into a local mask.
fn local_mask(mask: usize, idx: &[usize]) -> usize {
    idx.iter().enumerate().fold(0, |acc, (l, &i)| acc | (((mask >> i) & 1) << l))
}

fn criterion_10() -> Outcome {
    // Y = g1(A1) + g2(A2) + g12(A1, A2), A1 = (X1, X2), A2 = (X3, X4),
    // every term centered and g12 centered given either group.
    let g_a = dmatrix![1.0, 0.5; 0.5, 1.0];
    let g_b = dmatrix![1.0, -0.3; -0.3, 2.0];
    let mut gamma = DMatrix::zeros(4, 4);
    gamma.view_mut((0, 0), (2, 2)).copy_from(&g_a);
    gamma.view_mut((2, 2), (2, 2)).copy_from(&g_b);
    let g1 = |a1: f64, a2: f64| a1 + a1 * a2 - 0.5;
    let g2 = |b1: f64, b2: f64| b1.sin() + 0.5 * b2 * b2 - 1.0;
    let g12 = |a1: f64, b2: f64| a1 * b2;

    let y = BlackBoxModel::new(4, move |x| 3.0 + g1(x[0], x[1]) + g2(x[2], x[3]) + g12(x[0], x[3]));
    let m1 = BlackBoxModel::new(2, move |x| g1(x[0], x[1]));
    let m2 = BlackBoxModel::new(2, move |x| g2(x[0], x[1]));
    let m12 = BlackBoxModel::new(4, move |x| g12(x[0], x[3]));
    let in_y = GaussianInput::centered(gamma).unwrap();
    let in_a = GaussianInput::centered(g_a).unwrap();
    let in_b = GaussianInput::centered(g_b).unwrap();
    let c1 = [0usize, 1];
    let c2 = [2usize, 3];

    let reps = 200u64;
    // Per replicate: differences LHS - RHS for every identity component.
    let diffs: Vec<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let cfg = |tag: u64| McConfig {
                n_var: 40_000,
                n_outer: 2000,
                n_inner: 4,
                seed: seed::derive(10_000, &[r, tag]),
                ..McConfig::default()
            };
            let ty = estimate_cond_var_table(&y, &in_y, &cfg(0)).unwrap();
            let t1 = estimate_cond_var_table(&m1, &in_a, &cfg(1)).unwrap();
            let t2 = estimate_cond_var_table(&m2, &in_b, &cfg(2)).unwrap();
            let t12 = estimate_cond_var_table(&m12, &in_y, &cfg(3)).unwrap();

            let mut d = Vec::new();
            // V_u = Σ_w V^{g,w}_{u ∩ C_w}
            for u in 0..16usize {
                let rhs = closed_var(&t1, local_mask(u, &c1))
                    + closed_var(&t2, local_mask(u, &c2))
                    + closed_var(&t12, u);
                d.push(closed_var(&ty, u) - rhs);
            }
            // S_u = Σ_{w: u ⊆ C_w} S^g_w S^{g,w}_u, with Var(Y) = Σ_w Var(g_w)
            let var_sum = t1.var_y() + t2.var_y() + t12.var_y();
            let (w1, w2, w12) = (t1.var_y() / var_sum, t2.var_y() / var_sum, t12.var_y() / var_sum);
            let (s_y, s1, s2, s12) = (
                sobol_from_table(&ty),
                sobol_from_table(&t1),
                sobol_from_table(&t2),
                sobol_from_table(&t12),
            );
            for u in 1..16usize {
                let mut rhs = w12 * s12[u];
                if u & 0b1100 == 0 {
                    rhs += w1 * s1[local_mask(u, &c1)];
                }
                if u & 0b0011 == 0 {
                    rhs += w2 * s2[local_mask(u, &c2)];
                }
                d.push(s_y[u] - rhs);
            }
            // η_i = Σ_{w ∋ j(i)} S^g_w η^{g,w}_i
            let (e_y, e1, e2, e12) = (
                shapley_from_table(&ty),
                shapley_from_table(&t1),
                shapley_from_table(&t2),
                shapley_from_table(&t12),
            );
            for i in 0..4 {
                let own = if i < 2 { w1 * e1[i] } else { w2 * e2[i - 2] };
                d.push(e_y[i] - (own + w12 * e12[i]));
            }
            d
        })
        .collect();

    let n = diffs[0].len();
    let mut worst = (0.0f64, 0usize);
    for c in 0..n {
        let xs: Vec<f64> = diffs.iter().map(|d| d[c]).collect();
        let (mean, se) = mean_se(&xs);
        let z = if se > 0.0 { mean.abs() / se } else if mean.abs() <= 1e-12 { 0.0 } else { f64::INFINITY };
        if z > worst.0 {
            worst = (z, c);
        }
    }
    let label = match worst.1 {
        c if c < 16 => format!("V_{{mask {c}}}"),
        c if c < 31 => format!("S_{{mask {}}}", c - 15),
        c => format!("eta_{}", c - 30),
    };
    let msg = format!(
        "{n} identity components (V_u sum, Sobol, Shapley), largest gap {:.2} SE at {label}",
        worst.0
    );
    if worst.0 <= 3.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle equivalence", criterion_1),
        ("normalization", criterion_2),
        ("block consistency", criterion_3),
        ("work count", criterion_4),
        ("speed orderings", criterion_5),
        ("estimator statistics", criterion_6),
        ("binomial identity", criterion_7),
        ("double MC fidelity", criterion_8),
        ("block-additive MC", criterion_9),
        ("decomposition fixtures", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let id = format!("{}", k + 1);
        if !filter.is_empty() && !filter.iter().any(|f| *f == id || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {id:>2} PASS  {name}: {msg} [{secs:.1} s]"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {msg} [{secs:.1} s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
