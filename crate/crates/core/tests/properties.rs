use std::sync::Arc;

use graph_wishart::bayes::{posterior_update, GaussianSample};
use graph_wishart::cone::{
    complete, logdet_hat, phi, precision_of, project, split_blocks, trace_pair, IncompleteMatrix, SparsePrecision,
};
use graph_wishart::dist::{log_laplace_type1, log_laplace_type2, mean_type1, Family, Point, WishartSpec};
use graph_wishart::graph::{
    decompose, enumerate_perfect_orders, homogeneous_structure, DecomposableGraph, Homogeneity, NodeRole,
    MAX_ENUMERATION_CLIQUES,
};
use graph_wishart::linalg::{inv_pd, logdet_pd, max_abs};
use graph_wishart::math::LN_PI;
use graph_wishart::rng::RngStream;
use graph_wishart::shape::{
    canonical_shape, in_a_p, in_b_p, log_gamma_i, log_gamma_ii, log_multigamma, CanonicalKind, Path, ShapeParam,
};
use graph_wishart::verify::{gauss_2f1, mc_normalizer, Kind, McEstimate};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// A random connected chordal graph: each new vertex is joined to a clique
/// grown greedily around a random earlier vertex.
fn random_chordal(n: usize, rng: &mut impl Rng) -> Arc<DecomposableGraph> {
    let mut adj = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        let mut clique = vec![u];
        for w in 0..v {
            if w != u && adj[u][w] && rng.gen_bool(0.6) && clique.iter().all(|&c| adj[c][w]) {
                clique.push(w);
            }
        }
        for &c in &clique {
            adj[c][v] = true;
            adj[v][c] = true;
            edges.push((c + 1, v + 1));
        }
    }
    Arc::new(DecomposableGraph::new(n, &edges).unwrap())
}

fn random_pd(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    &a * a.transpose() + DMatrix::identity(n, n) * n as f64
}

fn random_qg(g: &Arc<DecomposableGraph>, rng: &mut impl Rng) -> IncompleteMatrix {
    project(&random_pd(g.n(), rng), g).unwrap()
}

fn has_induced_path4(g: &DecomposableGraph) -> bool {
    let n = g.n();
    let e = |i: usize, j: usize| i != j && g.adjacent(i, j);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let distinct = a != b && a != c && a != d && b != c && b != d && c != d;
                    if distinct && e(a, b) && e(b, c) && e(c, d) && !e(a, c) && !e(b, d) && !e(a, d) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn graph_strategy() -> impl Strategy<Value = Arc<DecomposableGraph>> {
    (1usize..=7, any::<u64>()).prop_map(|(n, seed)| random_chordal(n, &mut ChaCha8Rng::seed_from_u64(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn separator_multiplicities_are_order_invariant(g in graph_strategy()) {
        let ord = decompose(&g);
        prop_assert_eq!(&ord, &decompose(&g));
        let total: usize = ord.distinct_separators().iter().map(|d| d.multiplicity).sum();
        prop_assert_eq!(total, ord.k() - 1);
        if ord.k() <= MAX_ENUMERATION_CLIQUES {
            let mut reference: Vec<_> =
                ord.distinct_separators().iter().map(|d| (d.vertices.clone(), d.multiplicity)).collect();
            reference.sort();
            for other in enumerate_perfect_orders(&g, MAX_ENUMERATION_CLIQUES).unwrap() {
                let mut m: Vec<_> =
                    other.distinct_separators().iter().map(|d| (d.vertices.clone(), d.multiplicity)).collect();
                m.sort();
                prop_assert_eq!(&m, &reference);
            }
        }
    }

    #[test]
    fn homogeneity_matches_induced_path_scan(g in graph_strategy()) {
        let ord = decompose(&g);
        match homogeneous_structure(&g).unwrap() {
            Homogeneity::Homogeneous(t) => {
                prop_assert!(!has_induced_path4(&g));
                let cliques = t.nodes.iter().filter(|n| matches!(n.role, NodeRole::Clique(_))).count();
                let seps: Vec<usize> = t.nodes.iter().filter_map(|n| match n.role {
                    NodeRole::Separator { nu, .. } => Some(nu),
                    NodeRole::Clique(_) => None,
                }).collect();
                prop_assert_eq!(cliques, ord.k());
                prop_assert_eq!(seps.len(), ord.distinct_separators().len());
                prop_assert_eq!(seps.iter().sum::<usize>(), ord.k() - 1);
                for n in &t.nodes {
                    if let NodeRole::Separator { nu, .. } = n.role {
                        prop_assert_eq!(nu + 1, n.children.len());
                    }
                }
            }
            Homogeneity::NotHomogeneous { .. } => prop_assert!(has_induced_path4(&g)),
        }
    }

    #[test]
    fn cone_maps_round_trip(g in graph_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_qg(&g, &mut rng);
        let y = precision_of(&random_qg(&g, &mut rng)).unwrap();
        prop_assert!(phi(&precision_of(&x).unwrap()).unwrap().max_diff(&x) <= 1e-12 * max_abs(x.values()));
        let back = precision_of(&phi(&y).unwrap()).unwrap();
        prop_assert!(max_abs(&(back.values() - y.values())) <= 1e-12 * max_abs(y.values()));
        let dense = logdet_pd(&complete(&x).unwrap()).unwrap();
        prop_assert!((logdet_hat(&x).unwrap() - dense).abs() <= 1e-10 * dense.abs().max(1.0));
        for _ in 0..20 {
            let p = trace_pair(&random_qg(&g, &mut rng), &precision_of(&random_qg(&g, &mut rng)).unwrap()).unwrap();
            prop_assert!(p > 0.0);
        }
    }

    #[test]
    fn hyper_and_gwishart_shapes_are_admissible_for_every_order(g in graph_strategy(), t in 0.01f64..5.0) {
        let cmax = decompose(&g).cliques().iter().map(|c| c.len()).max().unwrap();
        let hyper = canonical_shape(&g, CanonicalKind::Hyper((cmax as f64 - 1.0) / 2.0 + t)).unwrap();
        let gw = canonical_shape(&g, CanonicalKind::GWishart(t)).unwrap();
        let orders = if decompose(&g).k() <= MAX_ENUMERATION_CLIQUES {
            enumerate_perfect_orders(&g, MAX_ENUMERATION_CLIQUES).unwrap()
        } else {
            vec![decompose(&g)]
        };
        let ref_i = log_gamma_i(&hyper, Path::Order(&orders[0])).unwrap();
        let ref_ii = log_gamma_ii(&gw, Path::Order(&orders[0])).unwrap();
        for ord in &orders {
            prop_assert!(in_a_p(&hyper, ord));
            prop_assert!(in_b_p(&gw, ord));
            prop_assert!((log_gamma_i(&hyper, Path::Order(ord)).unwrap() - ref_i).abs() < 1e-10);
            prop_assert!((log_gamma_ii(&gw, Path::Order(ord)).unwrap() - ref_ii).abs() < 1e-10);
        }
        if let Homogeneity::Homogeneous(tree) = homogeneous_structure(&g).unwrap() {
            prop_assert!((log_gamma_i(&hyper, Path::Homogeneous(&tree)).unwrap() - ref_i).abs() < 1e-10);
            prop_assert!((log_gamma_ii(&gw, Path::Homogeneous(&tree)).unwrap() - ref_ii).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_splits_along_blocks(g in graph_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ord = decompose(&g);
        prop_assume!(ord.k() > 1);
        let x = random_qg(&g, &mut rng);
        let sigma = random_qg(&g, &mut rng);
        let bx = split_blocks(&x, &ord).unwrap();
        let bs = split_blocks(&sigma, &ord).unwrap();
        let term = |xu: &DMatrix<f64>, su: &DMatrix<f64>, rx: &DMatrix<f64>, rs: &DMatrix<f64>, xs: &DMatrix<f64>| {
            let inv = inv_pd(su).unwrap();
            let d = rx - rs;
            (xu * &inv).trace() + (&d * xs * d.transpose() * inv).trace()
        };
        let mut total = term(&bx.first, &bs.first, &bx.first_ratio, &bs.first_ratio, &bx.sep)
            + (&bx.sep * inv_pd(&bs.sep).unwrap()).trace();
        for j in 1..ord.k() {
            let xs = x.block(ord.separator(j));
            total += term(&bx.schur[j - 1], &bs.schur[j - 1], &bx.ratio[j - 1], &bs.ratio[j - 1], &xs);
        }
        let direct = trace_pair(&x, &precision_of(&sigma).unwrap()).unwrap();
        prop_assert!((total - direct).abs() <= 1e-10 * direct.abs());
    }

    #[test]
    fn laplace_transforms_convolve(seed in any::<u64>(), p in 0.6f64..4.0, q in 0.6f64..4.0) {
        let g = Arc::new(DecomposableGraph::path(4).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = random_qg(&g, &mut rng);
        let s1 = canonical_shape(&g, CanonicalKind::Hyper(p)).unwrap();
        let s2 = ShapeParam::new(&g, vec![q + 0.5, q, q + 0.2], vec![q, q + 0.2]).unwrap();
        let sum = s1.add(&s2);
        prop_assert!(in_a_p(&s2, g.canonical()) && in_a_p(&sum, g.canonical()));
        // A small direction keeps σ̂⁻¹ − t in P_G.
        let k = precision_of(&sigma).unwrap();
        let t = SparsePrecision::from_dense(g.clone(), &(k.values() * rng.gen_range(-0.5..0.5))).unwrap();
        let lhs = log_laplace_type1(&sum, &sigma, &t).unwrap();
        let rhs = log_laplace_type1(&s1, &sigma, &t).unwrap() + log_laplace_type1(&s2, &sigma, &t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        let theta = random_qg(&g, &mut rng);
        let b1 = canonical_shape(&g, CanonicalKind::GWishart(p)).unwrap();
        let b2 = canonical_shape(&g, CanonicalKind::GWishart(q)).unwrap();
        let tt = theta.scaled(rng.gen_range(-0.5..0.5));
        let lhs = log_laplace_type2(&b1.add(&b2), &theta, &tt).unwrap();
        let rhs = log_laplace_type2(&b1, &theta, &tt).unwrap() + log_laplace_type2(&b2, &theta, &tt).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn batches_combine_exactly(seed in any::<u64>(), split in 0usize..=6) {
        let g = Arc::new(DecomposableGraph::path(4).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..6).map(|_| (0..4).map(|_| rng.sample(StandardNormal)).collect()).collect();
        let prior = WishartSpec::new(
            Family::InvTypeII,
            ShapeParam::new(&g, vec![-1.0; 3], vec![1.0, -0.5]).unwrap(),
            project(&DMatrix::identity(4, 4), &g).unwrap(),
        ).unwrap();
        let a = GaussianSample::from_rows(g.clone(), &rows[..split], false).unwrap();
        let b = GaussianSample::from_rows(g.clone(), &rows[split..], false).unwrap();
        let all = GaussianSample::from_rows(g.clone(), &rows, false).unwrap();
        let seq = posterior_update(&posterior_update(&prior, &a).unwrap(), &b).unwrap();
        let one = posterior_update(&prior, &all).unwrap();
        prop_assert!(seq.scale().max_diff(one.scale()) < 1e-12);
        for (u, v) in seq.shape().alpha.iter().chain(&seq.shape().beta).zip(one.shape().alpha.iter().chain(&one.shape().beta)) {
            prop_assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn hypergeometric_contiguous_relation(a in 0.1f64..3.0, b in 0.1f64..3.0, c in 1.2f64..4.0, z in 0.0f64..0.85) {
        // c(c−1)(z−1) F(c−1) + c[c−1−(2c−a−b−1)z] F(c) + (c−a)(c−b) z F(c+1) = 0.
        let f = |cc: f64| gauss_2f1(a, b, cc, z).unwrap();
        let terms = [
            c * (c - 1.0) * (z - 1.0) * f(c - 1.0),
            c * (c - 1.0 - (2.0 * c - a - b - 1.0) * z) * f(c),
            (c - a) * (c - b) * z * f(c + 1.0),
        ];
        let scale = terms.iter().map(|t| t.abs()).fold(0.0, f64::max);
        prop_assert!(terms.iter().sum::<f64>().abs() <= 1e-11 * scale);
        prop_assert!(gauss_2f1(a, b, c, (z + 0.1).min(0.99)).unwrap() > f(c));
    }
}

#[test]
fn multigamma_ratio_identities() {
    for c in 1..=6usize {
        for s in 0..c {
            for k in 0..20 {
                let alpha = (c as f64 - 1.0) / 2.0 + 0.05 + 0.37 * k as f64;
                let lhs = (c - s) as f64 * s as f64 / 2.0 * LN_PI + log_multigamma(c - s, alpha - s as f64 / 2.0).unwrap();
                let rhs = log_multigamma(c, alpha).unwrap() - log_multigamma(s, alpha).unwrap();
                assert!((lhs - rhs).abs() < 1e-12, "first identity c={c} s={s} α={alpha}");
                let lhs = (c - s) as f64 * s as f64 / 2.0 * LN_PI + log_multigamma(c - s, alpha).unwrap();
                let rhs = log_multigamma(c, alpha).unwrap() - log_multigamma(s, alpha - (c - s) as f64 / 2.0).unwrap();
                assert!((lhs - rhs).abs() < 1e-12, "second identity c={c} s={s} α={alpha}");
            }
        }
    }
}

#[test]
fn samples_stay_in_their_cones() {
    let g = Arc::new(DecomposableGraph::path(4).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let scale = random_qg(&g, &mut rng);
    let a = ShapeParam::new(&g, vec![2.0, 1.5, 1.2], vec![1.0, 1.2]).unwrap();
    let b = ShapeParam::new(&g, vec![-2.0, -2.5, -1.5], vec![-0.5, -1.0]).unwrap();
    for (family, shape) in
        [(Family::TypeI, &a), (Family::InvTypeI, &a), (Family::TypeII, &b), (Family::InvTypeII, &b)]
    {
        let spec = WishartSpec::new(family, shape.clone(), scale.clone()).unwrap();
        for p in spec.sample(&RngStream::new(12), 10_000).unwrap() {
            match p {
                Point::Q(x) => assert!(family.on_qg() && x.in_qg()),
                Point::P(y) => assert!(!family.on_qg() && y.in_pg()),
            }
        }
    }
}

#[test]
fn scatter_of_gaussian_data_is_hyper_wishart() {
    // nπ(S) for n draws of N(0, Σ̂) is type I with α = β = n/2 and scale 2Σ_G.
    let g = Arc::new(DecomposableGraph::path(4).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let sigma = random_qg(&g, &mut rng);
    let chol = complete(&sigma).unwrap().cholesky().unwrap();
    let n = 3;
    let reps = 20_000;
    let draws: Vec<DMatrix<f64>> = (0..reps)
        .map(|_| {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let z = DVector::from_fn(4, |_, _| rng.sample::<f64, _>(StandardNormal));
                    (chol.l() * z).iter().copied().collect()
                })
                .collect();
            GaussianSample::from_rows(g.clone(), &rows, false).unwrap().scatter().clone()
        })
        .collect();
    let shape = canonical_shape(&g, CanonicalKind::Hyper(n as f64 / 2.0)).unwrap();
    let mean = mean_type1(&shape, &sigma.scaled(2.0)).unwrap();
    for (i, j) in [(0, 0), (0, 1), (1, 2), (2, 3), (3, 3)] {
        let v: Vec<f64> = draws.iter().map(|d| d[(i, j)]).collect();
        let z = McEstimate::from_samples(&v).z(mean.values()[(i, j)]);
        assert!(z < 4.0, "entry ({i}, {j}) off by {z} SE");
    }
}

#[test]
fn verification_is_deterministic_given_seed() {
    let g = Arc::new(DecomposableGraph::path(4).unwrap());
    let s = ShapeParam::new(&g, vec![2.0, 1.5, 1.2], vec![1.0, 1.2]).unwrap();
    let sigma = project(&DMatrix::identity(4, 4), &g).unwrap();
    let run = || mc_normalizer(Kind::I, &s, &sigma, 2000, &RngStream::new(5), None).unwrap();
    assert_eq!(run(), run());
}
