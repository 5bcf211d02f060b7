use std::collections::VecDeque;

use proptest::prelude::*;

use super::*;
use crate::rng::{rng_from_seed, stream};

fn bfs_labels(grid: &Grid, adjacency: Adjacency) -> Vec<Option<usize>> {
    let n = grid.n;
    let mut label = vec![None; n * n];
    for s in 0..n * n {
        if !grid.open[s] || label[s].is_some() {
            continue;
        }
        // s is the smallest index of its component since sites are scanned in order
        label[s] = Some(s);
        let mut queue = VecDeque::from([s]);
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % n) as i32, (i / n) as i32);
            for &(dx, dy) in adjacency.offsets() {
                let (a, b) = (x + dx, y + dy);
                if a < 0 || b < 0 || a >= n as i32 || b >= n as i32 {
                    continue;
                }
                let j = b as usize * n + a as usize;
                if grid.open[j] && label[j].is_none() {
                    label[j] = Some(s);
                    queue.push_back(j);
                }
            }
        }
    }
    label
}

fn bfs_spans(grid: &Grid, labels: &[Option<usize>]) -> bool {
    let n = grid.n;
    let left: Vec<usize> = (0..n).filter_map(|y| labels[y * n]).collect();
    (0..n).filter_map(|y| labels[y * n + n - 1]).any(|l| left.contains(&l))
}

fn random_grid(n: usize, p: f64, seed: u64) -> Grid {
    let u = draw_uniforms(n, &mut rng_from_seed(seed));
    Grid::from_uniforms(n, p, &u)
}

#[test]
fn empty_grid_does_not_span() {
    let r = percolate(16, 0.0, Adjacency::Four, &mut rng_from_seed(1)).unwrap();
    assert_eq!(r.open_sites, 0);
    assert!(!r.spanning);
    assert_eq!(r.cluster_size_at_origin, 0);
}

#[test]
fn full_grid_spans_with_whole_origin_cluster() {
    for adj in [Adjacency::Four, Adjacency::Eight] {
        let r = percolate(16, 1.0, adj, &mut rng_from_seed(1)).unwrap();
        assert!(r.spanning);
        assert_eq!(r.cluster_size_at_origin, 256);
        assert_eq!(r.open_sites, 256);
    }
}

#[test]
fn percolate_rejects_bad_input() {
    let mut rng = rng_from_seed(0);
    assert!(percolate(1, 0.5, Adjacency::Four, &mut rng).is_err());
    assert!(percolate(8, 1.5, Adjacency::Four, &mut rng).is_err());
    assert!(percolate(8, -0.1, Adjacency::Four, &mut rng).is_err());
}

#[test]
fn union_find_matches_bfs_on_small_grids() {
    for seed in 0..100u64 {
        for n in [2, 3, 5, 8, 17, 32] {
            for p in [0.3, 0.5, 0.593, 0.7] {
                let g = random_grid(n, p, seed);
                for adj in [Adjacency::Four, Adjacency::Eight] {
                    let labels = bfs_labels(&g, adj);
                    assert_eq!(g.cluster_labels(adj), labels, "n={n} p={p} seed={seed} {adj}");
                    let r = g.analyze(p, adj);
                    assert_eq!(r.spanning, bfs_spans(&g, &labels));
                    let [a, b] = g.origin_sites();
                    let mut ids: Vec<usize> = [labels[a], labels[b]].into_iter().flatten().collect();
                    ids.dedup();
                    let size: usize = ids.iter().map(|&l| labels.iter().filter(|&&x| x == Some(l)).count()).sum();
                    assert_eq!(r.cluster_size_at_origin, size);
                }
            }
        }
    }
}

#[test]
fn threshold_is_where_spanning_starts() {
    for seed in 0..50u64 {
        let n = 12;
        let u = draw_uniforms(n, &mut rng_from_seed(seed));
        for adj in [Adjacency::Four, Adjacency::Eight] {
            let t = spanning_threshold(n, adj, &u);
            assert!(Grid::from_uniforms(n, t, &u).analyze(t, adj).spanning == false);
            let above = t + 1e-12;
            assert!(Grid::from_uniforms(n, above, &u).analyze(above, adj).spanning);
        }
    }
}

#[test]
fn union_find_sentinels_carry_no_weight() {
    let mut uf = UnionFind::new(3);
    let s = uf.add_sentinel();
    uf.union(0, s);
    uf.union(1, s);
    assert_eq!(uf.set_size(0), 2);
    assert!(uf.connected(0, 1));
    assert!(!uf.connected(0, 2));
}

#[test]
fn sweep_crossing_near_square_lattice_threshold() {
    let grid: Vec<f64> = (0..11).map(|i| 0.54 + 0.01 * i as f64).collect();
    let sweep = spanning_sweep(48, Adjacency::Four, &grid, 400, 3).unwrap();
    let c = crossing_point(&sweep).unwrap();
    assert!((c - 0.593).abs() < 0.03, "crossing at {c}");
    let est = estimate_threshold(48, Adjacency::Four, 400, 3).unwrap();
    assert!((est.p_c_hat - c).abs() < 0.01, "{} vs {c}", est.p_c_hat);
    assert!(est.ci_halfwidth > 0.0 && est.ci_halfwidth < 0.02);
}

#[test]
fn crossing_point_interpolates() {
    let c = crossing_point(&[(0.1, 0.0), (0.2, 0.25), (0.3, 0.75), (0.4, 1.0)]).unwrap();
    assert!((c - 0.25).abs() < 1e-12);
    assert_eq!(crossing_point(&[(0.1, 0.6), (0.2, 0.9)]), None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shared_uniforms_are_monotone_in_p(seed in any::<u64>(), n in 2usize..20, p in 0.0f64..1.0, q in 0.0f64..1.0) {
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        let u = draw_uniforms(n, &mut rng_from_seed(seed));
        let (a, b) = (Grid::from_uniforms(n, lo, &u), Grid::from_uniforms(n, hi, &u));
        prop_assert!(a.open.iter().zip(&b.open).all(|(x, y)| !x || *y));
        for adj in [Adjacency::Four, Adjacency::Eight] {
            let (ra, rb) = (a.analyze(lo, adj), b.analyze(hi, adj));
            prop_assert!(!ra.spanning || rb.spanning);
            prop_assert!(ra.cluster_size_at_origin <= rb.cluster_size_at_origin);
        }
    }

    #[test]
    fn eight_neighbour_spans_whenever_four_does(seed in any::<u64>(), n in 2usize..24, p in 0.0f64..1.0) {
        let g = random_grid(n, p, seed);
        let (four, eight) = (g.analyze(p, Adjacency::Four), g.analyze(p, Adjacency::Eight));
        prop_assert!(!four.spanning || eight.spanning);
        prop_assert!(four.cluster_size_at_origin <= eight.cluster_size_at_origin);
    }
}

fn frequency(config: &RegionTrialConfig, trials: usize) -> f64 {
    estimate_openness(config, trials, 1.0).unwrap().p_tilde
}

/// Exact success probability of a trial started at the corner opposite
/// the activating one, from the absorbing Markov chain on
/// (position, infection/excursion state).
fn exact_openness(k: i32, lambda: f64, gamma: f64) -> f64 {
    let act = (-k, -k);
    let corners = [(k, -k), (-k, k), (k, k)];
    let side = (2 * k + 1) as usize;
    // excursion state 0 = healthy, 1 = infected with no excursion,
    // 2 + mask = excursion that has seen `mask`
    let idx = |(x, y): (i32, i32), e: usize| (((y + k) as usize * side + (x + k) as usize) * 9) + e;
    let n = side * side * 9;
    let mut a = vec![vec![0.0; n + 1]; n];
    for y in -k..=k {
        for x in -k..=k {
            for e in 0..9 {
                let i = idx((x, y), e);
                let infected = e != 0;
                a[i][i] = 1.0 + gamma + if infected { lambda } else { 0.0 };
                if infected {
                    a[i][idx((x, y), 0)] -= lambda;
                }
                let nb: Vec<(i32, i32)> = [(1, 0), (-1, 0), (0, 1), (0, -1)]
                    .iter()
                    .map(|&(dx, dy)| (x + dx, y + dy))
                    .filter(|q| q.0.abs() <= k && q.1.abs() <= k)
                    .collect();
                let w = 1.0 / nb.len() as f64;
                for &q in &nb {
                    let mut e2 = e;
                    if q == act {
                        e2 = e.max(1);
                    } else {
                        if (x, y) == act && e == 1 {
                            e2 = 2;
                        }
                        if e2 >= 2 {
                            if let Some(c) = corners.iter().position(|&c| c == q) {
                                let mask = (e2 - 2) | 1 << c;
                                if mask == 7 {
                                    a[i][n] += w;
                                    continue;
                                }
                                e2 = mask + 2;
                            }
                        }
                    }
                    a[i][idx(q, e2)] -= w;
                }
            }
        }
    }
    for c in 0..n {
        let piv = (c..n).max_by(|&r, &s| a[r][c].abs().total_cmp(&a[s][c].abs())).unwrap();
        a.swap(c, piv);
        for r in 0..n {
            if r != c && a[r][c] != 0.0 {
                let f = a[r][c] / a[c][c];
                for j in c..=n {
                    a[r][j] -= f * a[c][j];
                }
            }
        }
    }
    let i = idx((k, k), 0);
    a[i][n] / a[i][i]
}

fn assert_near_exact(config: &RegionTrialConfig, trials: usize) {
    let exact = exact_openness(config.k as i32, config.lambda, config.gamma);
    let f = frequency(config, trials);
    let sd = (exact * (1.0 - exact) / trials as f64).sqrt();
    assert!((f - exact).abs() <= 4.0 * sd + 1e-12, "mc {f} exact {exact}");
}

#[test]
fn exact_oracle_limits() {
    assert!(exact_openness(1, 1.0, 1e-7) >= 0.99);
    assert!(exact_openness(1, 1e3, 1.0) <= 0.01);
    let by_gamma: Vec<f64> = [1e-2, 1e-3, 1e-4, 1e-5].iter().map(|&g| exact_openness(1, 1.0, g)).collect();
    assert!(by_gamma.windows(2).all(|w| w[0] < w[1]), "{by_gamma:?}");
}

#[test]
fn openness_matches_exact_chain() {
    assert_near_exact(&RegionTrialConfig::new(1, 1.0, 1e-4, 11), 10_000);
    assert_near_exact(&RegionTrialConfig::new(1, 0.2, 0.01, 13), 10_000);
    assert_near_exact(&RegionTrialConfig::new(2, 0.05, 0.01, 14), 5_000);
}

#[test]
fn tiny_clearance_rate_almost_always_opens() {
    let f = frequency(&RegionTrialConfig::new(1, 1.0, 1e-6, 11), 2_000);
    assert!(f >= 0.94, "{f}");
    assert_near_exact(&RegionTrialConfig::new(1, 1.0, 1e-6, 11), 2_000);
}

#[test]
fn fast_recovery_almost_never_opens() {
    let f = frequency(&RegionTrialConfig::new(1, 1e3, 1.0, 12), 10_000);
    assert!(f <= 0.01, "{f}");
}

#[test]
fn successful_trials_walk_the_whole_perimeter() {
    for k in [1, 2, 3] {
        let config = RegionTrialConfig::new(k, 0.02, 1e-3, 5);
        let mut seen = 0;
        for t in 0..2000 {
            let o = region_trial(&config, &mut stream(5, t));
            if o.success {
                seen += 1;
                // 4k to reach the activating corner, then 6k around the others
                assert!(o.jumps >= 10 * k as u64, "k={k} jumps={}", o.jumps);
            }
        }
        assert!(seen > 0, "k={k}");
    }
}

#[test]
fn time_safeguard_is_counted_separately() {
    let mut config = RegionTrialConfig::new(2, 1.0, 1e-6, 9);
    config.lambda = 1e6;
    config.max_sim_time = Some(5.0);
    let e = estimate_openness(&config, 200, 1.0).unwrap();
    assert_eq!(e.p_tilde, 0.0);
    assert_eq!(e.safeguard_trips, 200);
}

#[test]
fn start_policies_all_run() {
    for policy in [StartPolicy::AtCenter, StartPolicy::AtFarthestCorner, StartPolicy::Uniform] {
        let mut config = RegionTrialConfig::new(1, 0.2, 1e-3, 4);
        config.start_policy = policy;
        assert!(frequency(&config, 500) > 0.5);
    }
    assert_eq!("farthest".parse::<StartPolicy>().unwrap(), StartPolicy::AtFarthestCorner);
    assert!("corner".parse::<StartPolicy>().is_err());
}

#[test]
fn openness_is_monotone_in_both_rates() {
    let trials = 10_000;
    let sigma = |a: f64, b: f64| ((a * (1.0 - a) + b * (1.0 - b)) / trials as f64).sqrt();
    let by_lambda: Vec<f64> = [0.25, 0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&l| frequency(&RegionTrialConfig::new(1, l, 0.05, 21), trials))
        .collect();
    for w in by_lambda.windows(2) {
        assert!(w[1] <= w[0] + 3.0 * sigma(w[0], w[1]), "{by_lambda:?}");
    }
    let by_gamma: Vec<f64> = [1.0, 0.3, 0.1, 0.03, 0.01]
        .iter()
        .map(|&g| frequency(&RegionTrialConfig::new(1, 2.0, g, 22), trials))
        .collect();
    for w in by_gamma.windows(2) {
        assert!(w[1] >= w[0] - 3.0 * sigma(w[0], w[1]), "{by_gamma:?}");
    }
    assert!(by_lambda[0] > by_lambda[4] && by_gamma[4] > by_gamma[0]);
}

#[test]
fn always_true_stub_has_zero_width_interval() {
    let e = estimate_openness_with(100, 0.8, 0, |_| (true, false)).unwrap();
    assert_eq!(e.p_tilde, 1.0);
    assert_eq!(e.ci_halfwidth, 0.0);
    assert!((e.p_open - 0.8).abs() < 1e-15);
}

#[test]
fn no_particle_means_no_openness() {
    let e = estimate_openness(&RegionTrialConfig::new(1, 1.0, 1e-3, 2), 200, 0.0).unwrap();
    assert!(e.p_tilde > 0.0);
    assert_eq!(e.p_open, 0.0);
}

#[test]
fn openness_needs_enough_trials() {
    assert!(estimate_openness(&RegionTrialConfig::new(1, 1.0, 1.0, 0), 99, 1.0).is_err());
    assert!(estimate_openness(&RegionTrialConfig::new(1, 1.0, 1.0, 0), 100, 1.1).is_err());
    assert!(estimate_openness(&RegionTrialConfig::new(0, 1.0, 1.0, 0), 100, 1.0).is_err());
}

#[test]
fn openness_is_reproducible() {
    let c = RegionTrialConfig::new(2, 1.0, 0.01, 77);
    assert_eq!(estimate_openness(&c, 1000, 0.9).unwrap(), estimate_openness(&c, 1000, 0.9).unwrap());
}

fn threshold_stub(p_c_hat: f64, ci: f64) -> ThresholdEstimate {
    ThresholdEstimate { n: 64, adjacency: Adjacency::Four, p_c_hat, ci_halfwidth: ci, realizations: 100 }
}

#[test]
fn certain_openness_capped_by_particle_presence() {
    let open = estimate_openness_with(100, 0.5, 0, |_| (true, false)).unwrap();
    let v = compare(open, threshold_stub(0.593, 0.005));
    assert_ne!(v.verdict, Verdict::SupercriticalEvidence);
    assert_eq!(v.verdict, Verdict::SubcriticalEvidence);
    assert!(v.p_open <= 1.0 && v.p_c_hat > 0.0 && v.p_c_hat < 1.0);
}

#[test]
fn overlapping_intervals_are_inconclusive() {
    let open = estimate_openness_with(100, 0.6, 0, |_| (true, false)).unwrap();
    assert_eq!(compare(open, threshold_stub(0.593, 0.01)).verdict, Verdict::Inconclusive);
}

#[test]
fn very_small_clearance_rate_gives_supercritical_evidence() {
    let config = SupercriticalityConfig {
        region: RegionTrialConfig::new(1, 1.0, 1e-6, 8),
        p_m_ge_1: 1.0,
        trials: 2000,
        n: 64,
        adjacency: Adjacency::Four,
        realizations: 200,
    };
    let v = supercriticality_check(&config).unwrap();
    assert_eq!(v.verdict, Verdict::SupercriticalEvidence, "{v:?}");
    assert!(v.margin > 0.0);
}

#[test]
fn csv_layouts() {
    let mut out = Vec::new();
    write_percolation_csv(8, Adjacency::Eight, &[(0.5, 0.25)], &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "n,adjacency,p,spanning_fraction\n8,eight,0.5,0.25\n");
    let c = RegionTrialConfig::new(1, 1.0, 0.5, 0);
    let e = estimate_openness_with(100, 1.0, 0, |_| (false, false)).unwrap();
    let mut out = Vec::new();
    write_openness_csv(&[(c, e)], &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "lambda,gamma,k,trials,p_tilde,ci,p_open\n1,0.5,1,100,0,0,0\n");
}

#[test]
fn verdict_serialises_kebab_case() {
    assert_eq!(serde_json::to_string(&Verdict::SupercriticalEvidence).unwrap(), "\"supercritical-evidence\"");
    assert_eq!(serde_json::to_string(&Adjacency::Four).unwrap(), "\"four\"");
}
