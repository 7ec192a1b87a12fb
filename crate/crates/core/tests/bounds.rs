use thinlab::bounds::{
    almost_leaves_solution, check_bounds, closed_form_binary, closed_form_mary, count_almost_leaves,
};
use thinlab::certify::check_consistent;
use thinlab::engine::compute_thinness;
use thinlab::tree::{enumerate_labeled_trees, gen_complete_mary, gen_random_tree, gen_smallest_tree};

#[test]
fn closed_forms_match_the_engine() {
    for h in 0..=12 {
        let t = gen_complete_mary(2, h).unwrap();
        assert_eq!(compute_thinness(&t, 0).unwrap().0, closed_form_binary(h), "h {h}");
    }
    for (m, hmax) in [(3, 8), (4, 6), (5, 5)] {
        for h in 0..=hmax {
            let t = gen_complete_mary(m, h).unwrap();
            assert_eq!(compute_thinness(&t, 0).unwrap().0, closed_form_mary(m, h).unwrap(), "m {m} h {h}");
        }
    }
}

#[test]
fn bounds_hold_on_small_and_random_trees() {
    for n in 1..=7 {
        for t in enumerate_labeled_trees(n).unwrap() {
            let k = compute_thinness(&t, 0).unwrap().0;
            assert!(check_bounds(&t, k).all_satisfied(), "{:?}", t.edges());
        }
    }
    for seed in 0..300 {
        let t = gen_random_tree(1 + seed as usize * 7, seed).unwrap();
        let k = compute_thinness(&t, 0).unwrap().0;
        let report = check_bounds(&t, k);
        assert!(report.all_satisfied(), "seed {seed}\n{}", report.to_csv());
    }
}

#[test]
fn smallest_trees_are_tight() {
    for k in 1..=7 {
        let t = gen_smallest_tree(k).unwrap();
        assert_eq!(t.len(), 3usize.pow(k as u32) - 2);
        let report = check_bounds(&t, k);
        assert!(report.all_satisfied());
        assert_eq!(report.get("log3").unwrap().bound, k);
        assert!(!check_bounds(&t, k + 1).all_satisfied());
    }
}

#[test]
fn almost_leaves_on_families() {
    for k in 2..=5 {
        let t = gen_smallest_tree(k).unwrap();
        let al = count_almost_leaves(&t);
        let sol = almost_leaves_solution(&t).unwrap();
        assert!(sol.class_count() <= al - 1);
        assert_eq!(check_consistent(&t, &sol), Ok(()));
    }
}
