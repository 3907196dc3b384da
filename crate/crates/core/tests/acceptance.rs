//! Acceptance criteria, one PASS/FAIL line each. Every check compares the
//! toolkit against an oracle computed here from first principles.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rittkit::linalg::{frobenius, identity, kron, kron_all, power, spectral_norm};
use rittkit::representations::{random_instance, trial_seed};
use rittkit::tensor::{interchange_identity_check, lemma_lem_check, pisier_expression_norm, random_family, random_reversible_chain, rota_dilation};
use rittkit::{
    bar_constant, convolution_operator, eval_poly_operator, minimal_stolz_angle, phi_n_sup, ritt_constants, stolz_contains, stolz_ratio_constant,
    subordination_chain_check, transference_trials, CheckStatus, Exponent, FiniteAbelianGroup, LinearOperator, Mat, NormTag, Polynomial,
    ProbabilityMeasure, Verdict, C64,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `nu_hat(xi) = sum_t nu(t) exp(2 pi i xi t / N)` by direct summation.
fn dft(weights: &[f64]) -> Vec<C64> {
    let n = weights.len();
    (0..n)
        .map(|xi| weights.iter().enumerate().map(|(t, w)| w * C64::from_polar(1.0, TAU * ((xi * t) % n) as f64 / n as f64)).sum())
        .collect()
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

fn circulant(g: &FiniteAbelianGroup, nu: &ProbabilityMeasure) -> LinearOperator {
    convolution_operator(nu.measure(), g, &NormTag::l2(g.order())).unwrap()
}

fn normal_calculus() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(2..=64);
        let g = FiniteAbelianGroup::cyclic(n).unwrap();
        let w = random_weights(&mut rng, n);
        let nu = ProbabilityMeasure::from_group_weights(&g, &w).unwrap();
        let total: f64 = w.iter().sum();
        let symbol = dft(&w.iter().map(|x| x / total).collect::<Vec<_>>());
        let t = circulant(&g, &nu);
        for _ in 0..20 {
            let deg = rng.random_range(0..=12);
            let coeffs: Vec<C64> = (0..=deg).map(|_| C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)).collect();
            let phi = Polynomial::new(coeffs.clone());
            let lhs = spectral_norm(eval_poly_operator(&phi, &t).matrix());
            let rhs = symbol.iter().map(|&z| coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c).norm()).fold(0.0, f64::max);
            let dev = (lhs - rhs).abs() / rhs.max(1.0);
            worst = worst.max(dev);
            ensure(dev <= 1e-9, || format!("N={n}, degree {deg}: ||phi(C)|| = {lhs}, max |phi(nu_hat)| = {rhs}"))?;
        }
    }
    Ok(format!("1000 pairs, max relative deviation {worst:.2e}"))
}

fn bar_ritt_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut bar, mut non_bar) = (0, 0);
    for i in 0..200 {
        let n = rng.random_range(2..=24);
        let g = FiniteAbelianGroup::cyclic(n).unwrap();
        let mut w = vec![0.0; n];
        if i % 3 == 0 {
            w = random_weights(&mut rng, n);
        } else {
            for _ in 0..rng.random_range(1..=3) {
                let t = if i % 3 == 1 { rng.random_range(0..n) } else { 2 * rng.random_range(0..n.div_ceil(2)) % n + 1 } % n;
                w[t] += rng.random::<f64>() + 0.1;
            }
        }
        let nu = ProbabilityMeasure::from_group_weights(&g, &w).unwrap();
        let symbol = nu.fourier_symbol(None).unwrap();
        let k = bar_constant(&symbol).unwrap().constant;
        let ritt = ritt_constants(&circulant(&g, &nu), 64).unwrap();
        let ritt_finite = ritt.verdict == Verdict::RittCertified && ritt.tail_certified && ritt.c1.is_finite();
        let angle = minimal_stolz_angle(&symbol).unwrap().gamma_star.is_some_and(|a| a < FRAC_PI_2);
        let unimodular = dft(&w.iter().map(|x| x / w.iter().sum::<f64>()).collect::<Vec<_>>()).iter().any(|z| (z.norm() - 1.0).abs() < 1e-12 && (z - 1.0).norm() > 1e-12);
        ensure(k.is_some() == ritt_finite && ritt_finite == angle && angle == !unimodular, || {
            format!("measure {i} on Z_{n} {w:?}: BAR {k:?}, Ritt {:?}, angle below pi/2 {angle}, oracle unimodular {unimodular}", ritt.verdict)
        })?;
        if angle {
            bar += 1;
        } else {
            non_bar += 1;
        }
    }
    ensure(bar >= 20 && non_bar >= 20, || format!("corpus not mixed: {bar} BAR, {non_bar} non-BAR"))?;
    Ok(format!("{bar} BAR and {non_bar} non-BAR measures, zero disagreements"))
}

/// `sup_{n >= 1} n t^{n-1} (1 - t)` for `t` in `[0, 1]`.
fn eigen_sup(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let f = |n: f64| n * t.powf(n - 1.0) * (1.0 - t);
    let star = -1.0 / t.ln();
    [1.0, star.floor().max(1.0), star.ceil().max(1.0)].into_iter().map(f).fold(0.0, f64::max)
}

fn square_of_symmetric() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(2..=48);
        let g = FiniteAbelianGroup::cyclic(n).unwrap();
        let mut w = random_weights(&mut rng, n);
        for t in 1..n {
            w[n - t] = w[t];
        }
        let eta = ProbabilityMeasure::from_group_weights(&g, &w).unwrap();
        let total: f64 = w.iter().sum();
        let oracle = dft(&w.iter().map(|x| x / total).collect::<Vec<_>>()).iter().map(|z| eigen_sup(z.re * z.re)).fold(0.0, f64::max);
        let r = ritt_constants(&circulant(&g, &eta.square().unwrap()), 64).unwrap();
        ensure(r.tail_certified && r.verdict == Verdict::RittCertified, || format!("Z_{n}: verdict {:?}", r.verdict))?;
        ensure(r.c1 <= 1.0 + 1e-9, || format!("Z_{n}: c1 = {} > 1", r.c1))?;
        worst = worst.max((r.c1 - oracle).abs());
        ensure((r.c1 - oracle).abs() <= 1e-9, || format!("Z_{n}: c1 = {}, per-eigenvalue oracle {oracle}", r.c1))?;
    }
    Ok(format!("50 measures, c1 <= 1, max deviation from per-eigenvalue oracle {worst:.2e}"))
}

fn not_ritt_witness() -> Outcome {
    let g = FiniteAbelianGroup::cyclic(4).unwrap();
    let shift = ProbabilityMeasure::dirac_at(&g, &[1]).unwrap();
    let t = circulant(&g, &shift);
    let r = ritt_constants(&t, 1000).unwrap();
    ensure(r.verdict == Verdict::NotRitt, || format!("verdict {:?}", r.verdict))?;
    ensure(r.profile.len() == 1000, || format!("profile has {} points", r.profile.len()))?;
    for p in &r.profile {
        ensure(p.value == 2.0 * p.n as f64, || format!("n = {}: {} != {}", p.n, p.value, 2 * p.n))?;
    }
    // Integer oracle: T^n - T^{n-1} is a signed permutation difference with entries in {-1, 0, 1}.
    let m = t.matrix().map(|z| z.re.round() as i64);
    let mut pow = DMatrix::<i64>::identity(4, 4);
    for n in 1..=1000usize {
        let next = &pow * &m;
        let diff = &next - &pow;
        let x = DMatrix::from_row_slice(4, 1, &[1, -1, 1, -1]);
        let image = &diff * &x;
        ensure(image.iter().all(|v| v.abs() == 2), || format!("n = {n}: alternating vector not doubled"))?;
        pow = next;
    }
    Ok(format!("n ||T^n - T^(n-1)|| = 2n exactly for n <= 1000, witness {:?}", r.witness.unwrap_or_default()))
}

fn transference() -> Outcome {
    let master = 2024;
    let records = transference_trials(master, 100, 8, 6, Exponent::TWO).unwrap();
    let g = FiniteAbelianGroup::cyclic(8).unwrap();
    let mut min_slack = f64::INFINITY;
    for (i, r) in records.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(master, i));
        let dim = rng.random_range(1..=6);
        let (pi, nu) = random_instance(&mut rng, 8, dim, Exponent::TWO).unwrap();
        let u = pi.at_element(&g.element_at(1)).unwrap();
        let powers: Vec<Mat> = (0..8).map(|k| power(&u, k)).collect();
        let w = nu.measure().dense_weights().unwrap();
        let s = powers.iter().zip(&w).fold(Mat::zeros(dim, dim), |acc, (p, c)| acc + p * *c);
        let lhs = spectral_norm(&s);
        let pi_norm = powers.iter().map(spectral_norm).fold(0.0, f64::max);
        let conv = dft(&w.iter().map(|z| z.re).collect::<Vec<_>>()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let rhs = pi_norm * pi_norm * conv;
        ensure(r.dim == dim && (r.lhs - lhs).abs() <= 1e-9 * lhs.max(1.0) && (r.rhs - rhs).abs() <= 1e-9 * rhs.max(1.0), || {
            format!("trial {i}: toolkit (lhs {}, rhs {}) vs oracle (lhs {lhs}, rhs {rhs})", r.lhs, r.rhs)
        })?;
        ensure(lhs <= rhs + 1e-9 && r.holds, || format!("trial {i}: {lhs} > ||pi||^2 ||C|| = {rhs}"))?;
        min_slack = min_slack.min(rhs - lhs);
    }
    Ok(format!("100 trials hold, minimum slack {min_slack:.3e}"))
}

fn rota() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = rng.random_range(1..=8);
        let (p, pi) = random_reversible_chain(&mut rng, n, 0.3).unwrap();
        let d = rota_dilation(&p, &pi).unwrap();
        let pc = p.map(|x| C64::new(x, 0.0));
        let k = d.support.len();
        let m_diag = Mat::from_diagonal(&nalgebra::DVector::from_iterator(k, d.path_measure.iter().map(|&x| C64::new(x, 0.0))));
        let pi_diag = Mat::from_diagonal(&nalgebra::DVector::from_iterator(n, pi.iter().map(|&x| C64::new(x, 0.0))));
        let ones = Mat::from_element(k, 1, C64::new(1.0, 0.0));
        let residuals = [
            frobenius(&(&d.q * &d.j - identity(n))),
            frobenius(&(&d.q * &d.e * &d.j - &pc * &pc)),
            frobenius(&(&d.e * &d.e - &d.e)),
            frobenius(&(&d.e * &ones - &ones)),
            frobenius(&(d.j.adjoint() * &m_diag * &d.j - pi_diag)),
        ];
        let max = residuals.iter().copied().fold(0.0, f64::max);
        worst = worst.max(max);
        ensure(max <= 1e-11, || format!("chain {i} ({n} states): residuals {residuals:?}"))?;
        ensure(d.e.iter().all(|z| z.re >= 0.0 && z.im == 0.0), || format!("chain {i}: E has a negative entry"))?;
        ensure(d.residuals.holds(1e-11), || format!("chain {i}: toolkit residuals {:?}", d.residuals))?;
    }
    Ok(format!("100 chains, max residual {worst:.2e}"))
}

fn tensor_interchange() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut lemma_cases = 0;
    for i in 0..100 {
        let order = [2, 3][i % 2];
        let legs = [2, 3][(i / 2) % 2];
        let m = [1, 2][(i / 4) % 2];
        let g = FiniteAbelianGroup::cyclic(order).unwrap();
        let terms = rng.random_range(1..=3);
        let family = random_family(&mut rng, &g, legs, terms).unwrap();
        let f: Vec<C64> = (0..order * m).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let report = interchange_identity_check(&family, &g, &f, m).unwrap();
        let mats: Vec<Vec<Mat>> =
            family.iter().map(|term| term.iter().map(|nu| convolution_operator(nu, &g, &NormTag::l2(order)).unwrap().matrix().clone()).collect()).collect();
        let im = identity(m);
        let product: Mat = mats.iter().map(|t| t.iter().fold(identity(order), |acc, c| c * acc)).fold(Mat::zeros(order, order), |a, b| a + b);
        let tensor: Mat = mats.iter().map(|t| kron_all(&t.iter().collect::<Vec<_>>())).fold(Mat::zeros(order.pow(legs as u32), order.pow(legs as u32)), |a, b| a + b);
        let fv = Mat::from_column_slice(order * m, 1, &f);
        let lhs = kron(&product, &im) * &fv;
        let big = order.pow(legs as u32);
        let sum_of = |mut k: usize| {
            let mut s = 0;
            for _ in 0..legs {
                s = (s + k % order) % order;
                k /= order;
            }
            s
        };
        let lifted = Mat::from_fn(big * m, 1, |r, _| f[sum_of(r / m) * m + r % m]);
        let rhs = kron(&tensor, &im) * lifted;
        let dev = (0..big * m).map(|r| (rhs[r] - lhs[sum_of(r / m) * m + r % m]).norm()).fold(0.0, f64::max);
        worst = worst.max(dev);
        ensure(dev <= 1e-10 && report.holds, || format!("instance {i}: oracle deviation {dev:.2e}, toolkit {:.2e}", report.max_deviation))?;
        let lemma = lemma_lem_check(&family, &g, Exponent::TWO, Exponent::TWO, m).unwrap();
        let (lo, hi) = (spectral_norm(&product), spectral_norm(&tensor));
        ensure(lemma.holds && lemma.status == CheckStatus::Holds && lo <= hi + 1e-10, || {
            format!("instance {i}: product norm {lo} vs tensor norm {hi}, toolkit {lemma:?}")
        })?;
        ensure((lemma.lhs - lo).abs() <= 1e-9 && (lemma.rhs - hi).abs() <= 1e-9, || format!("instance {i}: toolkit norms differ from SVD"))?;
        lemma_cases += 1;
    }
    Ok(format!("100 identities, max deviation {worst:.2e}; {lemma_cases} exact inequality checks hold"))
}

/// Value of the projection expression at `p = q = 2` from the joint eigenbasis:
/// `1` when some eigenvalue pattern has exactly one zero, else `0`.
fn pisier_oracle(rank: usize, size: usize, legs: usize) -> f64 {
    let has_zero = rank < size;
    let has_one = rank > 0;
    if has_zero && (legs == 1 || has_one) {
        1.0
    } else {
        0.0
    }
}

fn pisier() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut cases = 0;
    while cases < 60 {
        let n = rng.random_range(1..=3);
        let (p, pi) = random_reversible_chain(&mut rng, n, 0.3).unwrap();
        let d = rota_dilation(&p, &pi).unwrap();
        let size = d.support.len();
        if size > 9 {
            continue;
        }
        let rank = d.e.trace().re.round() as usize;
        for legs in 1..=3 {
            let r = pisier_expression_norm(&d.e, &d.path_measure, legs, Exponent::TWO, Exponent::TWO, 1).unwrap();
            let oracle = pisier_oracle(rank, size, legs);
            ensure(r.value <= 1.0 + 1e-10, || format!("|Omega| = {size}, legs {legs}: {}", r.value))?;
            ensure((r.value - oracle).abs() <= 1e-9, || format!("|Omega| = {size}, rank {rank}, legs {legs}: {} vs oracle {oracle}", r.value))?;
            worst = worst.max(r.value);
        }
        cases += 1;
    }
    Ok(format!("60 expectations x 3 leg counts, max norm {worst:.12}"))
}

fn subordination_chain() -> Outcome {
    let g = FiniteAbelianGroup::cyclic(2).unwrap();
    let coin = ProbabilityMeasure::uniform(&g).unwrap();
    let table = subordination_chain_check(&coin, &g, Exponent::TWO, Exponent::TWO, 1, 2).unwrap();
    let row = table.rows.iter().find(|r| r.n == 2).ok_or("no n = 2 row")?;
    let t = circulant(&g, &coin.square().unwrap());
    let oracle_lhs = 2.0 * spectral_norm(&(power(t.matrix(), 2) - t.matrix()));
    ensure((row.lhs - oracle_lhs).abs() <= 1e-12, || format!("lhs {} vs oracle {oracle_lhs}", row.lhs))?;
    ensure(row.lhs <= row.mid + 1e-12 && row.mid <= row.rhs + 1e-12, || format!("chain out of order: {row:?}"))?;
    ensure(
        [row.lhs_certificate, row.mid_certificate, row.rhs_certificate].iter().all(|c| c.is_exact()) && row.status == CheckStatus::Holds,
        || format!("not exactly computed: {row:?}"),
    )?;
    Ok(format!("lhs {} <= mid {} <= rhs {}, slack {}", row.lhs, row.mid, row.rhs, row.slack))
}

fn phi_n_bound() -> Outcome {
    let k = stolz_ratio_constant(FRAC_PI_4, 4096).unwrap().value;
    let s = FRAC_PI_4.sin();
    let closed_form = (1.0 + s) / (1.0 - s);
    ensure((k - closed_form).abs() <= 1e-6 * closed_form, || format!("ratio constant {k} vs (1 + sin g)/(1 - sin g) = {closed_form}"))?;
    let mut ns: Vec<usize> = (0..=40).map(|i| 10f64.powf(4.0 * i as f64 / 40.0).round() as usize).collect();
    ns.dedup();
    let mut tightest = f64::INFINITY;
    for &n in &ns {
        let sup = phi_n_sup(n, FRAC_PI_4).unwrap().value;
        let bound = k * (1.0 - 1.0 / n as f64).powi(n as i32 - 1) + 1e-6;
        ensure(sup <= bound, || format!("n = {n}: sup {sup} > bound {bound}"))?;
        tightest = tightest.min(bound - sup);
    }
    Ok(format!("{} values of n in [1, 10^4], ratio constant {k:.9}, minimum margin {tightest:.3e}", ns.len()))
}

/// Convex hull of `1` and the disc of radius `sin(gamma)`: `z` is inside iff the
/// ray from `1` through `z` meets the disc at or beyond `z`.
fn hull_distance(gamma: f64, z: C64) -> f64 {
    let w = z - 1.0;
    if w.norm() == 0.0 {
        return -gamma.sin();
    }
    let u = (-w.re / w.norm_sqr()).max(1.0);
    (1.0 + u * w).norm() - gamma.sin()
}

fn geometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut banded = 0;
    for gamma in [PI / 12.0, FRAC_PI_4, PI / 3.0, 5.0 * PI / 12.0] {
        let mut count = 0;
        while count < 100_000 {
            let z = C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
            if z.norm() > 1.0 {
                continue;
            }
            count += 1;
            let d = hull_distance(gamma, z);
            if d.abs() < 1e-9 {
                banded += 1;
                continue;
            }
            let inside = stolz_contains(gamma, z).unwrap();
            ensure(inside == (d < 0.0), || format!("gamma {gamma}, z = {z}: toolkit {inside}, hull distance {d}"))?;
        }
    }
    Ok(format!("400000 points, zero disagreements ({banded} in the boundary band)"))
}

const CONFIGS: [(&str, &str); 10] = [
    ("analyze-measure", "coin.json"),
    ("analyze-measure", "shift.json"),
    ("analyze-measure", "lazy_walk_z32.json"),
    ("analyze-measure", "integer_walk.json"),
    ("analyze-operator", "operator.json"),
    ("transference", "transference.json"),
    ("tensor-chain", "tensor_chain.json"),
    ("dilation", "dilation.json"),
    ("sweep", "sweep_regular.json"),
    ("sweep", "sweep_kconvexity.json"),
];

fn reproducibility() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_rittkit");
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for (command, config) in CONFIGS {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = root.path().join(format!("{config}.{run}"));
            let status = Command::new(bin)
                .args([command, "--config"])
                .arg(configs.join(config))
                .arg("--out")
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(status.status.success(), || format!("{command} {config}: {}", String::from_utf8_lossy(&status.stderr)))?;
            outputs.push(out);
        }
        let mut names: Vec<String> = std::fs::read_dir(&outputs[0]).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
        names.sort();
        ensure(names.contains(&"report.json".to_string()), || format!("{config}: no report.json"))?;
        for name in names.iter().filter(|n| *n != "timings.json") {
            let a = std::fs::read(outputs[0].join(name)).unwrap();
            let b = std::fs::read(outputs[1].join(name)).map_err(|e| format!("{config}/{name}: {e}"))?;
            ensure(a == b, || format!("{config}/{name} differs between runs"))?;
            files += 1;
        }
    }
    Ok(format!("{} configs over all 6 commands, {files} output files byte-identical", CONFIGS.len()))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 12] = [
        ("normal-calculus equality", Duration::from_secs(10), normal_calculus),
        ("BAR <=> Ritt <=> angle below pi/2", Duration::from_secs(30), bar_ritt_equivalence),
        ("square of a symmetric measure", Duration::from_secs(10), square_of_symmetric),
        ("not-Ritt witness for the shift", Duration::from_secs(1), not_ritt_witness),
        ("transference on Z_8", Duration::from_secs(20), transference),
        ("Rota dilation identities", Duration::from_secs(10), rota),
        ("tensor interchange identity", Duration::from_secs(60), tensor_interchange),
        ("commuting-projection expression", Duration::from_secs(30), pisier),
        ("subordination chain for the coin", Duration::from_secs(10), subordination_chain),
        ("phi_n uniform bound", Duration::from_secs(30), phi_n_bound),
        ("Stolz membership vs hull oracle", Duration::from_secs(10), geometry),
        ("byte-identical CLI reports", Duration::from_secs(60), reproducibility),
    ];
    let mut failures = 0;
    for (i, (name, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} ({name}) [{elapsed:.2?}]: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {:>2} ({name}) [{elapsed:.2?}]: {why}", i + 1);
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 12 acceptance criteria passed");
}
