use hyperell::arith::{rat, rat_frac, BigRational};
use hyperell::fiber::{
    example_ex_graph, node_count, omega_degree, ord_xi, pair, phi_divisor, phi_self_intersection,
    sum_phi_squares, verify_local_identity, Component, ComponentGraph, SectionIncidence,
    VerticalQDivisor,
};
use num_traits::Zero;
use proptest::prelude::*;

fn comp(name: &str, m: i64, pa: i64, internal_nodes: i64) -> Component {
    Component {
        name: name.into(),
        m,
        pa,
        internal_nodes,
    }
}

fn section(name: &str, meets: &str) -> SectionIncidence {
    SectionIncidence {
        name: name.into(),
        meets: meets.into(),
    }
}

fn smooth_fiber(g: usize) -> (ComponentGraph, Vec<SectionIncidence>) {
    let graph =
        ComponentGraph::new(g, vec![comp("C", 1, g as i64, 0)], vec![vec![0]], None).unwrap();
    let sections = (0..2 * g + 2)
        .map(|i| section(&format!("P{i}"), "C"))
        .collect();
    (graph, sections)
}

#[test]
fn example_ex_tables() {
    let (g, sections) = example_ex_graph();
    let a = g.divisor(&[("A", rat(1))]).unwrap();
    let b = g.divisor(&[("B", rat(1))]).unwrap();
    let d = g.divisor(&[("D", rat(1))]).unwrap();
    assert_eq!(pair(&g, &a, &a).unwrap(), rat(-1));
    assert_eq!(pair(&g, &b, &d).unwrap(), rat(2));
    let f = g.fiber();
    for x in [&a, &b, &d] {
        assert_eq!(pair(&g, &f, x).unwrap(), rat(0));
    }
    assert_eq!(omega_degree(&g, &a).unwrap(), rat(1));
    let e = g
        .divisor(&[("A", rat(1)), ("B", rat(1)), ("D", rat(2))])
        .unwrap();
    assert_eq!(omega_degree(&g, &e).unwrap(), rat(2));
    assert_eq!(
        omega_degree(&g, &VerticalQDivisor::zero(&g)).unwrap(),
        rat(0)
    );
    let shown: Vec<String> = sections
        .iter()
        .map(|p| phi_divisor(&g, p).unwrap().to_string())
        .collect();
    assert_eq!(
        shown,
        ["-B - D", "-B - D", "-B - D", "-A", "-2A - B", "-2A - B"]
    );
    let squares: Vec<BigRational> = sections
        .iter()
        .map(|p| phi_self_intersection(&g, p).unwrap())
        .collect();
    assert_eq!(squares, [-1, -1, -1, -1, -3, -3].map(rat));
    assert_eq!(sum_phi_squares(&g, &sections).unwrap(), rat(-10));
    assert_eq!(node_count(&g), 3);
    assert_eq!(ord_xi(&g, &sections, &e).unwrap(), rat(10 + 54 + 16));
    let id = verify_local_identity(&g, &sections, &e, 8).unwrap();
    assert_eq!((id.lhs.clone(), id.rhs.clone()), (rat(40), rat(40)));
    assert!(id.holds());
    assert_eq!(
        verify_local_identity(&g, &sections, &e, 9)
            .unwrap()
            .residual,
        rat(5)
    );
    assert_eq!(
        verify_local_identity(&g, &sections, &e, 7)
            .unwrap()
            .residual,
        rat(-5)
    );
}

#[test]
fn trivial_fibers() {
    let (g, sections) = smooth_fiber(2);
    assert!(phi_divisor(&g, &sections[0])
        .unwrap()
        .coeffs()
        .iter()
        .all(Zero::is_zero));
    assert_eq!(phi_self_intersection(&g, &sections[0]).unwrap(), rat(0));
    assert_eq!(node_count(&g), 0);
    let zero = VerticalQDivisor::zero(&g);
    assert_eq!(ord_xi(&g, &sections, &zero).unwrap(), rat(0));
    let id = verify_local_identity(&g, &sections, &zero, 0).unwrap();
    assert!(id.holds() && id.lhs.is_zero());
    let nodal = ComponentGraph::new(2, vec![comp("C", 1, 1, 1)], vec![vec![0]], None).unwrap();
    assert_eq!(node_count(&nodal), 1);
    assert!(ord_xi(&g, &sections[..5], &zero).is_err());
}

#[test]
fn invalid_graphs_are_rejected() {
    let c = |n: &str, pa| comp(n, 1, pa, 0);
    // asymmetric
    assert!(ComponentGraph::new(
        1,
        vec![c("A", 0), c("B", 0)],
        vec![vec![-1, 1], vec![2, -2]],
        None
    )
    .is_err());
    // rows do not sum to zero
    assert!(ComponentGraph::new(
        1,
        vec![c("A", 0), c("B", 0)],
        vec![vec![-2, 1], vec![1, -1]],
        None
    )
    .is_err());
    // disconnected
    assert!(ComponentGraph::new(
        2,
        vec![c("A", 1), c("B", 1)],
        vec![vec![0, 0], vec![0, 0]],
        None
    )
    .is_err());
    // wrong genus
    assert!(ComponentGraph::new(3, vec![c("A", 2)], vec![vec![0]], None).is_err());
    // omega override disagrees with adjunction
    let m = vec![vec![-1, 1, 0], vec![1, -3, 2], vec![0, 2, -2]];
    let comps = vec![c("A", 1), c("B", 0), c("D", 0)];
    assert!(ComponentGraph::new(2, comps, m, Some(&[1, 0, 1])).is_err());
}

#[test]
fn sections_on_multiple_components_are_rejected() {
    let g = ComponentGraph::new(
        2,
        vec![comp("A", 1, 1, 0), comp("B", 2, 0, 0)],
        vec![vec![-4, 2], vec![2, -1]],
        None,
    )
    .unwrap();
    assert!(phi_divisor(&g, &section("P", "B")).is_err());
    assert!(phi_divisor(&g, &section("P", "A")).is_ok());
    assert!(phi_divisor(&g, &section("P", "Z")).is_err());
}

#[derive(Debug, Clone)]
struct RandomGraph {
    g: usize,
    comps: Vec<Component>,
    m: Vec<Vec<i64>>,
}

/// Connected multigraphs with all multiplicities one: a random spanning tree
/// plus extra edges, diagonal fixed by `M·1 = 0`, genus read off adjunction.
fn graph_strategy() -> impl Strategy<Value = RandomGraph> {
    (1usize..9).prop_flat_map(|k| {
        let parents = prop::collection::vec(any::<prop::sample::Index>(), k.saturating_sub(1));
        let tree_w = prop::collection::vec(1i64..3, k.saturating_sub(1));
        let extra = prop::collection::vec(
            (
                any::<prop::sample::Index>(),
                any::<prop::sample::Index>(),
                0i64..2,
            ),
            0..k,
        );
        let pa = prop::collection::vec(0i64..3, k);
        let nodes = prop::collection::vec(0i64..2, k);
        (parents, tree_w, extra, pa, nodes).prop_map(
            move |(parents, tree_w, extra, mut pa, nodes)| {
                let mut m = vec![vec![0i64; k]; k];
                for i in 1..k {
                    let j = parents[i - 1].index(i);
                    m[i][j] += tree_w[i - 1];
                    m[j][i] += tree_w[i - 1];
                }
                for (a, b, w) in extra {
                    let (a, b) = (a.index(k), b.index(k));
                    if a != b {
                        m[a][b] += w;
                        m[b][a] += w;
                    }
                }
                for i in 0..k {
                    m[i][i] = -(0..k).filter(|&j| j != i).map(|j| m[i][j]).sum::<i64>();
                }
                let edges: i64 = (0..k)
                    .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                    .map(|(i, j)| m[i][j])
                    .sum();
                let mut g = 1 + edges + (0..k).map(|i| pa[i] - 1 + nodes[i]).sum::<i64>();
                if g < 2 {
                    pa[0] += 2 - g;
                    g = 2;
                }
                let comps = (0..k)
                    .map(|i| comp(&format!("C{i}"), 1, pa[i], nodes[i]))
                    .collect();
                RandomGraph {
                    g: g as usize,
                    comps,
                    m,
                }
            },
        )
    })
}

fn apply(m: &[Vec<i64>], x: &[BigRational]) -> Vec<BigRational> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(&a, b)| rat(a) * b).sum())
        .collect()
}

fn quad(m: &[Vec<i64>], x: &[BigRational]) -> BigRational {
    apply(m, x).iter().zip(x).map(|(a, b)| a * b).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_satisfies_its_defining_constraints(rg in graph_strategy()) {
        let graph = ComponentGraph::new(rg.g, rg.comps.clone(), rg.m.clone(), None).unwrap();
        let omega = graph.omega_degrees().to_vec();
        let k = rg.comps.len();
        for (cp, c) in rg.comps.iter().enumerate() {
            let p = section("P", &c.name);
            let phi = phi_divisor(&graph, &p).unwrap();
            let x = phi.coeffs().to_vec();
            prop_assert!(x[cp].is_zero());
            let mx = apply(&rg.m, &x);
            for i in 0..k {
                let p_dot = if i == cp { rat(2 * rg.g as i64 - 2) } else { rat(0) };
                prop_assert_eq!(&mx[i] + p_dot - rat(omega[i]), rat(0));
            }
            let sq = phi_self_intersection(&graph, &p).unwrap();
            prop_assert!(sq <= rat(0));
            prop_assert_eq!(&sq, &quad(&rg.m, &x));
            for c in [rat(1), rat_frac(-3, 2), rat(7)] {
                let shifted = phi.add(&graph.fiber().scale(&c)).unwrap();
                prop_assert_eq!(pair(&graph, &shifted, &shifted).unwrap(), sq.clone());
            }
        }
    }

    #[test]
    fn pairing_is_negative_semidefinite(rg in graph_strategy(), xs in prop::collection::vec(-5i64..6, 8)) {
        let graph = ComponentGraph::new(rg.g, rg.comps.clone(), rg.m.clone(), None).unwrap();
        prop_assert!(graph.check_semidefinite().unwrap());
        let k = rg.comps.len();
        let x: Vec<BigRational> = xs[..k].iter().map(|&v| rat(v)).collect();
        let q = quad(&rg.m, &x);
        prop_assert!(q <= rat(0));
        let proportional = x.iter().all(|v| *v == x[0]);
        prop_assert_eq!(q.is_zero(), proportional);
    }

    #[test]
    fn adjunction_and_node_count(rg in graph_strategy()) {
        let graph = ComponentGraph::new(rg.g, rg.comps.clone(), rg.m.clone(), None).unwrap();
        let k = rg.comps.len();
        let omega = graph.omega_degrees();
        prop_assert_eq!(omega.iter().sum::<i64>(), 2 * rg.g as i64 - 2);
        prop_assert!(omega.iter().all(|&w| w >= -2));
        let edges: i64 = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).map(|(i, j)| rg.m[i][j]).sum();
        let internal: i64 = rg.comps.iter().map(|c| c.internal_nodes).sum();
        prop_assert_eq!(node_count(&graph), edges + internal);
    }

    #[test]
    fn ord_xi_is_twice_the_identity_rhs(
        rg in graph_strategy(),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 20),
        e_coeffs in prop::collection::vec(0i64..4, 8),
        ord in 0i64..30,
    ) {
        let graph = ComponentGraph::new(rg.g, rg.comps.clone(), rg.m.clone(), None).unwrap();
        let k = rg.comps.len();
        let sections: Vec<_> = (0..2 * rg.g + 2)
            .map(|i| section(&format!("P{i}"), &rg.comps[picks[i % 20].index(k)].name))
            .collect();
        let entries: Vec<(&str, BigRational)> =
            rg.comps.iter().zip(&e_coeffs).map(|(c, &v)| (c.name.as_str(), rat(v))).collect();
        let e = graph.divisor(&entries).unwrap();
        let xi = ord_xi(&graph, &sections, &e).unwrap();
        let id = verify_local_identity(&graph, &sections, &e, ord).unwrap();
        prop_assert_eq!(xi, rat(2) * &id.rhs);
        prop_assert_eq!(&id.lhs - &id.rhs, id.residual.clone());
        prop_assert_eq!(id.lhs, rat((3 * rg.g as i64 - 1) * ord));
    }
}
