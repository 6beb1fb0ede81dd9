use nearfield::multiaccess::{build_graph_with_model, greedy_select, heuristic_select_with_model, z_grid, EXACT_CLIQUE_CAP};
use nearfield::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn medium() -> Medium {
    Medium::with_wavelength(0.01, 376.730).unwrap()
}

fn random_graph(rng: &mut ChaCha8Rng, k: usize, density: f64) -> SirGraph {
    let mut edges = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            if rng.gen_bool(density) {
                edges.push((a, b));
            }
        }
    }
    SirGraph::from_edges(k, &edges).unwrap()
}

fn brute_force_clique(g: &SirGraph) -> usize {
    let k = g.node_count();
    (0u32..1 << k)
        .filter(|mask| {
            let nodes: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
            g.is_clique(&nodes)
        })
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap()
}

// Neumaier-compensated sum
fn compensated(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        c += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + c
}

fn oracle_channel(array: &TxArray, r: &Vec3, lambda: f64) -> Vec<Complex64> {
    let k = 2.0 * std::f64::consts::PI / lambda;
    array
        .elements()
        .iter()
        .map(|e| {
            let d = r - e.center;
            let dist = d.norm();
            let uy = d.y / dist;
            Complex64::new(0.0, -1.0) * Complex64::from_polar((1.0 - uy * uy) / dist, -k * dist)
        })
        .collect()
}

fn oracle_sir(a: &[Complex64], b: &[Complex64]) -> f64 {
    let na = compensated(a.iter().map(|c| c.norm_sqr()));
    let nb = compensated(b.iter().map(|c| c.norm_sqr()));
    let re = compensated(a.iter().zip(b).map(|(x, y)| (x.conj() * y).re));
    let im = compensated(a.iter().zip(b).map(|(x, y)| (x.conj() * y).im));
    na * nb / (re * re + im * im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn greedy_returns_a_clique_within_k_rounds(seed in any::<u64>(), k in 1usize..30, density in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, k, density);
        let priority: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
        let sel = greedy_select(&g, &priority).unwrap();
        prop_assert!(!sel.is_empty() && sel.len() <= k);
        prop_assert!(g.is_clique(&sel));
        let mut seen = sel.clone();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), sel.len());
    }

    #[test]
    fn exact_clique_matches_brute_force(seed in any::<u64>(), k in 1usize..14, density in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, k, density);
        let best = exact_max_clique(&g).unwrap();
        prop_assert!(g.is_clique(&best));
        prop_assert_eq!(best.len(), brute_force_clique(&g));
        let greedy = greedy_select(&g, &vec![0.0; k]).unwrap();
        prop_assert!(greedy.len() <= best.len());
    }

    #[test]
    fn raising_gamma_never_adds_edges(lo in 0.0f64..30.0, step in 0.0f64..10.0) {
        let m = medium();
        let a = build_array(4, 20, 0.005, 0.005).unwrap();
        let users = UserSet::on_z_axis(12, 0.05, 2.0).unwrap();
        let g_lo = build_graph(&users, lo, &a, &m).unwrap();
        let g_hi = build_graph(&users, lo + step, &a, &m).unwrap();
        for x in 0..12 {
            for y in 0..12 {
                prop_assert!(!g_hi.adjacent(x, y) || g_lo.adjacent(x, y));
            }
        }
        let n_lo = heuristic_select(&users, lo, &a, &m).unwrap().selected.len();
        let n_hi = heuristic_select(&users, lo + step, &a, &m).unwrap().selected.len();
        prop_assert!(n_hi <= n_lo, "{} dB: {}, {} dB: {}", lo, n_lo, lo + step, n_hi);
    }
}

#[test]
fn exact_dominates_greedy_on_physical_instances() {
    let m = medium();
    let a = build_array(4, 40, 0.005, 0.005).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let k = rng.gen_range(2..=20);
        let users: Vec<Vec3> = (0..k)
            .map(|_| Vec3::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3), rng.gen_range(0.05..3.0)))
            .collect();
        let users = UserSet::new(users).unwrap();
        let gamma_db = rng.gen_range(0.0..25.0);
        let res = heuristic_select_with_model(&users, gamma_db, &a, &m, Model::Near).unwrap();
        let best = exact_max_clique(&res.graph).unwrap();
        assert!(res.graph.is_clique(&res.selected));
        assert!(res.graph.is_clique(&best));
        assert!(res.selected.len() <= best.len());
        if res.selected.len() > 1 {
            assert!(res.min_selected_sir() > res.graph.gamma);
        }
    }
}

#[test]
fn exact_clique_refuses_oversized_instances() {
    let g = SirGraph::from_edges(EXACT_CLIQUE_CAP + 1, &[]).unwrap();
    assert!(matches!(exact_max_clique(&g), Err(Error::InstanceTooLarge { .. })));
}

#[test]
fn far_model_cannot_separate_users_on_a_ray() {
    let m = medium();
    let a = build_array(6, 30, 0.005, 0.005).unwrap();
    let users = UserSet::on_z_axis(25, 0.1, 10.0).unwrap();
    let res = heuristic_select_with_model(&users, 18.0, &a, &m, Model::Far).unwrap();
    assert_eq!(res.selected, vec![0]);
    assert_eq!(res.graph.edge_count(), 0);
    assert!(res.sir_matrix.rows().iter().flatten().all(|&v| v == 1.0));
    let g = build_graph_with_model(&users, -1.0, &a, &m, Model::Far).unwrap();
    assert_eq!(g.edge_count(), 25 * 24 / 2);
}

#[test]
fn sir_agrees_with_compensated_oracle() {
    let lambda = 0.01;
    let m = medium();
    let a = build_array(20, 200, 0.005, 0.005).unwrap();
    let p = Vec3::new(0.0, 0.0, 0.1);
    let q = Vec3::new(0.0, 0.0, 10.0);
    let g1 = channel_vector(&a, &p, &m, Model::Near).unwrap();
    let g2 = channel_vector(&a, &q, &m, Model::Near).unwrap();
    let got = sir(&g1, &g2).unwrap();
    let want = oracle_sir(&oracle_channel(&a, &p, lambda), &oracle_channel(&a, &q, lambda));
    assert!((got - want).abs() / want < 1e-9, "{got} vs {want}");
    assert!(got > 1.0);
    assert_eq!(sir(&g1, &g2).unwrap(), sir(&g2, &g1).unwrap());
}

#[test]
fn sir_of_a_channel_with_itself_is_one() {
    let m = medium();
    let a = build_array(5, 5, 0.005, 0.005).unwrap();
    let g = channel_vector(&a, &Vec3::new(0.01, 0.02, 0.3), &m, Model::Near).unwrap();
    assert_eq!(sir(&g, &g).unwrap(), 1.0);
}

#[test]
fn three_user_trace() {
    // 0 - 1 - 2 path; nearest-first keeps 0, drops 2, then keeps 1
    let g = SirGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    assert_eq!(greedy_select(&g, &[0.1, 0.2, 0.3]).unwrap(), vec![0, 1]);
    // 2 first: keeps 2, drops 0, keeps 1
    assert_eq!(greedy_select(&g, &[0.3, 0.2, 0.1]).unwrap(), vec![2, 1]);
    // 1 first: both neighbours survive but are not adjacent to each other
    assert_eq!(greedy_select(&g, &[0.2, 0.1, 0.3]).unwrap(), vec![1, 0]);
    assert_eq!(exact_max_clique(&g).unwrap().len(), 2);
}

#[test]
fn grid_is_inclusive() {
    let g = z_grid(100, 0.1, 10.0);
    assert_eq!(g.len(), 100);
    assert_eq!(g[0], 0.1);
    assert!((g[99] - 10.0).abs() < 1e-12);
    assert!(g.windows(2).all(|w| w[1] > w[0]));
}
