use proptest::prelude::*;
use thinlab::certify::check_consistent;
use thinlab::engine::compute_thinness;
use thinlab::layout::{consistent_solution, solution_given_path, ComponentSolution, ConsistentSolution};
use thinlab::tree::{
    decode_prufer, gen_complete_mary, gen_random_tree, gen_smallest_tree, parse_edge_list, Path, Tree,
};

fn solve(t: &Tree, root: usize) -> (usize, ConsistentSolution) {
    let (k, table) = compute_thinness(t, root).unwrap();
    (k, consistent_solution(t, root, table).unwrap())
}

fn assert_valid(t: &Tree, k: usize, sol: &ConsistentSolution) {
    let mut seen = vec![false; t.len()];
    for &v in &sol.order {
        assert!(!seen[v]);
        seen[v] = true;
    }
    assert!(seen.iter().all(|&s| s));
    assert_eq!(sol.classes.len(), t.len());
    assert_eq!(sol.class_count(), k);
    assert_eq!(check_consistent(t, sol), Ok(()));
}

#[test]
fn smallest_tree_around_its_center() {
    let t = gen_smallest_tree(2).unwrap();
    let outer: Vec<usize> = (0..t.len()).filter(|&v| !t.has_edge(0, v) && v != 0).collect();
    assert_eq!(outer.len(), 3);
    let parts: Vec<ComponentSolution> = outer
        .iter()
        .map(|&v| ComponentSolution {
            vertices: vec![v],
            solution: ConsistentSolution { order: vec![0], classes: vec![1] },
        })
        .collect();
    let sol = solution_given_path(&t, &Path::new(&t, vec![0]).unwrap(), &parts).unwrap();
    assert_valid(&t, 2, &sol);
}

#[test]
fn binary_tree_of_height_eight() {
    let t = gen_complete_mary(2, 8).unwrap();
    assert_eq!(t.len(), 511);
    let (k, sol) = solve(&t, 0);
    assert_eq!(k, 3);
    assert_valid(&t, 3, &sol);
}

#[test]
fn every_root_gives_an_optimal_solution() {
    for seed in 0..30 {
        let t = gen_random_tree(35, 8000 + seed).unwrap();
        for r in 0..t.len() {
            let (k, sol) = solve(&t, r);
            assert_valid(&t, k, &sol);
        }
    }
}

#[test]
fn smallest_trees_solved_from_any_leaf() {
    for k in 1..=6 {
        let t = gen_smallest_tree(k).unwrap();
        for r in [0, t.len() - 1, t.len() / 2] {
            let (kk, sol) = solve(&t, r);
            assert_eq!(kk, k);
            assert_valid(&t, k, &sol);
        }
    }
}

fn prufer_tree() -> impl Strategy<Value = Tree> {
    (2usize..160).prop_flat_map(|n| prop::collection::vec(0..n, n - 2).prop_map(|seq| decode_prufer(&seq).unwrap()))
}

proptest! {
    #[test]
    fn solutions_are_consistent_and_optimal(t in prufer_tree(), r in any::<prop::sample::Index>()) {
        let root = r.index(t.len());
        let (k, sol) = solve(&t, root);
        prop_assert_eq!(sol.class_count(), k);
        prop_assert_eq!(check_consistent(&t, &sol), Ok(()));
        prop_assert_eq!(ConsistentSolution::parse_any(&sol.to_text()).unwrap(), sol.clone());
        prop_assert_eq!(ConsistentSolution::parse_any(&sol.to_json_line()).unwrap(), sol);
    }

    #[test]
    fn edge_list_round_trip(t in prufer_tree()) {
        let back = parse_edge_list(&t.to_edge_list()).unwrap();
        prop_assert_eq!(back.edges(), t.edges());
        prop_assert_eq!(back.to_edge_list(), t.to_edge_list());
    }
}
