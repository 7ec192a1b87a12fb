use thinlab::tree::{
    dangling, enumerate_labeled_trees, gen_complete_mary, gen_random_tree, gen_smallest_tree, root_at, Tree,
};

fn connected(t: &Tree) -> bool {
    let rooted = root_at(t, 0).unwrap();
    rooted.bfs_order().len() == t.len() && t.edge_count() + 1 == t.len()
}

#[test]
fn dangling_trees_split_every_edge() {
    for seed in 0..40 {
        let t = gen_random_tree(2 + seed as usize % 50, seed).unwrap();
        for (u, v) in t.edges() {
            let (a, map_a) = dangling(&t, v, u).unwrap();
            let (b, map_b) = dangling(&t, u, v).unwrap();
            assert_eq!(a.len() + b.len(), t.len());
            assert!(connected(&a) && connected(&b));
            let mut all: Vec<usize> = map_a.iter().chain(&map_b).copied().collect();
            all.sort_unstable();
            assert_eq!(all, (0..t.len()).collect::<Vec<_>>());
            assert!(map_a.contains(&u) && map_b.contains(&v));
        }
    }
}

#[test]
fn generators_produce_trees() {
    for k in 1..=6 {
        let t = gen_smallest_tree(k).unwrap();
        assert_eq!(t.len(), 3usize.pow(k as u32) - 2);
        assert!(connected(&t));
    }
    for (m, h) in [(2, 0), (2, 6), (3, 4), (5, 3)] {
        let t = gen_complete_mary(m, h).unwrap();
        assert!(connected(&t));
        let rooted = root_at(&t, 0).unwrap();
        for v in 0..t.len() {
            if rooted.children(v).is_empty() {
                assert_eq!(rooted.depth(v), h);
            } else {
                assert_eq!(rooted.children(v).len(), m);
            }
        }
    }
    for seed in 0..50 {
        assert!(connected(&gen_random_tree(1 + seed as usize * 13, seed).unwrap()));
    }
    assert_eq!(gen_random_tree(8, 42).unwrap(), gen_random_tree(8, 42).unwrap());
}

#[test]
fn labeled_tree_counts() {
    let counts: Vec<usize> = (1..=7).map(|n| enumerate_labeled_trees(n).unwrap().count()).collect();
    assert_eq!(counts, vec![1, 1, 3, 16, 125, 1296, 16807]);
    assert!(enumerate_labeled_trees(9).is_err());
}

#[test]
fn smallest_tree_dangles_into_two_vertex_paths() {
    let t = gen_smallest_tree(2).unwrap();
    for c in t.neighbors(0) {
        let (d, _) = dangling(&t, 0, c).unwrap();
        assert_eq!((d.len(), d.edge_count()), (2, 1));
    }
}
