use animals_core::census::{
    audit_identities, brute_force_census, enumerate_census, enumerate_with_visitor, Frame,
};
use animals_core::lattice::{compute_stats, AnimalStats};
use animals_core::percolation::{exact_pn, sigma_n};

#[test]
fn enumeration_matches_oracle() {
    for (d, n_max) in [(2, 6), (3, 4), (4, 3)] {
        let fast = enumerate_census(d, n_max, 1).unwrap();
        let slow = brute_force_census(d, n_max).unwrap();
        assert_eq!(fast, slow, "d={d}, n_max={n_max}");
    }
}

#[test]
fn known_square_lattice_totals() {
    let t = enumerate_census(2, 9, 4).unwrap();
    let totals: Vec<u64> = (1..=9).map(|n| t.classes(n)).collect();
    assert_eq!(totals, vec![2, 6, 22, 88, 372, 1628, 7312, 33466, 155446]);
}

#[test]
fn parallel_matches_serial() {
    for (d, n_max) in [(2, 9), (3, 7)] {
        let serial = enumerate_census(d, n_max, 1).unwrap();
        for threads in [2, 3, 8] {
            assert_eq!(enumerate_census(d, n_max, threads).unwrap(), serial);
        }
    }
}

#[test]
fn incremental_stats_match_explicit_stats() {
    for (d, n_max) in [(2, 6), (3, 4)] {
        let mut checked = 0u64;
        enumerate_with_visitor(d, n_max, |f: &Frame<'_>| {
            let a = f.to_animal();
            assert!(a.is_normalized());
            assert_eq!(compute_stats(&a).unwrap(), f.stats());
            checked += 1;
        })
        .unwrap();
        assert!(checked > 0);
    }
}

#[test]
fn identity_audit_is_clean() {
    let a = audit_identities(3, 5).unwrap();
    assert_eq!(a.bound_violations + a.identity_violations, 0, "{a:?}");
}

#[test]
fn table_invariants() {
    let t = enumerate_census(2, 8, 4).unwrap();
    t.validate().unwrap();
    for ((n, m), e) in t.entries() {
        assert!(m <= AnimalStats::max_perimeter(2, n));
        assert!(e.sigma_prime <= e.vertex_weighted);
        assert!(e.vertex_weighted <= (n as u64 + 1) * e.sigma_prime);
    }
}

#[test]
fn cluster_probabilities_are_probabilities() {
    let t = enumerate_census(2, 8, 4).unwrap();
    for j in 1..=19 {
        let p = 0.05 * j as f64;
        let mut last = 0.0;
        for n in 1..=8 {
            let pn = exact_pn(&t, p, n).unwrap();
            assert!((0.0..=1.0).contains(&pn));
            let s = sigma_n(&t, p, n).unwrap();
            assert!(s >= last && s <= 1.0, "p={p} N={n}");
            last = s;
        }
    }
}
