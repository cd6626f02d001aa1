use dpgraph::graph::pairs;
use dpgraph::mechanisms::{exact_output_probability, normalization_constant, utility_class_pmf};
use dpgraph::oracle::{
    chi_square_goodness_of_fit, dp_ratio_max, enumerate_graphs, exact_distribution,
    product_form_probability, tv_distance_from_counts, UtilityClassHistogram,
};
use dpgraph::{flip_probability, pair_count, sample_private_graph, Graph, PrivacyParams};

fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i, i + 1))).unwrap()
}

#[test]
fn exact_distribution_matches_product_form_for_every_output() {
    for n in 2..=5 {
        for &eps in &[0.0, 0.5, 1.0, 2.5] {
            for a in 1..=2 {
                let params = PrivacyParams::new(eps, a).unwrap();
                let g = path(n);
                let p = flip_probability(params);
                for h in enumerate_graphs(n).unwrap() {
                    let exact = exact_output_probability(&g, &h, params).unwrap();
                    let product = product_form_probability(&g, &h, p).unwrap();
                    assert!(
                        (exact - product).abs() <= 1e-12 * exact,
                        "n={n} eps={eps} A={a}"
                    );
                }
            }
        }
    }
}

#[test]
fn normalization_is_input_independent() {
    let params = PrivacyParams::new(1.0, 1).unwrap();
    let c = normalization_constant(4, params).unwrap();
    for g in enumerate_graphs(4).unwrap().step_by(7) {
        let total: f64 = enumerate_graphs(4)
            .unwrap()
            .map(|h| exact_output_probability(&g, &h, params).unwrap() * c)
            .sum();
        assert!((total - c).abs() <= 1e-12 * c);
    }
}

#[test]
fn sampler_histogram_fits_exact_law() {
    let g = path(4);
    let params = PrivacyParams::new(1.0, 1).unwrap();
    let exact = exact_distribution(&g, params).unwrap();
    let mut counts = vec![0u64; 1 << pair_count(4)];
    for s in 0..200_000u64 {
        counts[sample_private_graph(&g, params, s).pair_mask().unwrap() as usize] += 1;
    }
    assert!(tv_distance_from_counts(&exact, &counts).unwrap() < 0.01);
    assert!(chi_square_goodness_of_fit(&counts, exact.probabilities())
        .unwrap()
        .passes(0.001));
}

#[test]
fn distance_follows_binomial_class_law() {
    let n = 40;
    let g = Graph::from_edges(n, pairs(n).filter(|&(i, j)| (i * j) % 3 == 1)).unwrap();
    let params = PrivacyParams::new(2.5, 1).unwrap();
    let mut hist = UtilityClassHistogram::new(n);
    for s in 0..4000u64 {
        hist.record(&g, &sample_private_graph(&g, params, s))
            .unwrap();
    }
    let m = pair_count(n) as f64;
    let q = flip_probability(params).complement();
    let sd_of_mean = (m * q * (1.0 - q) / 4000.0).sqrt();
    assert!((hist.mean() - m * q).abs() < 5.0 * sd_of_mean);

    let pmf = utility_class_pmf(n, params);
    let mean: f64 = pmf.iter().enumerate().map(|(k, w)| k as f64 * w).sum();
    assert!((mean - m * q).abs() <= 1e-9 * m);
}

#[test]
fn privacy_audit_is_tight_at_distance_a() {
    for a in 1..=2 {
        for &eps in &[0.0, 1.0, 2.5] {
            let audit = dp_ratio_max(3, PrivacyParams::new(eps, a).unwrap()).unwrap();
            let bound = f64::exp(eps);
            assert!(audit.max_ratio <= bound * (1.0 + 1e-12));
            assert!((audit.max_ratio_at_distance_a.unwrap() - bound).abs() <= 1e-9 * bound);
        }
    }
}
