//! Exhaustive checks over small enumerated graphs.

use kignn::compile::{
    audit_primitives, compile_gml_localsum, compile_isotype_globalsum, compile_isotype_localmax,
    compile_isotype_localsum_square, compile_lddl_semilinear, compile_ml_localmax, compile_unique_address,
    compile_wgml_modal, compile_wgml_top, fixture_classifier, parse_address_pair, unique_address_query, AddressMode,
    CompileTarget,
};
use kignn::equiv::{bisimilar, color_refine, label_coloring};
use kignn::feature::{check_policy_conformance, classify, Feature, GnnClassifier, Policy};
use kignn::graph::{
    builtin_graph, enumerate_graphs, enumerate_pointed_graphs, parse_graph, random_keying, Fixture, Graph,
    PointedGraph, PointedKeyedGraph,
};
use kignn::logic::{parse_gml, parse_lddl, random_gml, sat_gml, GmlFormula};
use kignn::workbench::{oracle_agreement, test_key_invariance, CorpusSpec, InvarianceVerdict};
use kignn::Mode;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn counting_shorthands_agree_with_neighbor_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let inner: Vec<GmlFormula> = (0..20).map(|_| random_gml(&mut rng, 1, 2, 1)).collect();
    for g in enumerate_graphs(4, 1, false).unwrap() {
        for phi in &inner {
            let s = sat_gml(&g, phi);
            for k in 0..4 {
                let eq = sat_gml(&g, &GmlFormula::diamond_eq(k, phi.clone()));
                let le = sat_gml(&g, &GmlFormula::diamond_leq(k, phi.clone()));
                for v in 0..g.node_count() {
                    let n = g.neighbors(v).iter().filter(|&&u| s[u]).count();
                    assert_eq!(eq[v], n == k, "{phi} k={k}");
                    assert_eq!(le[v], n <= k, "{phi} k={k}");
                }
            }
        }
    }
}

#[test]
fn refinement_stabilizes_within_node_count() {
    for g in enumerate_graphs(5, 1, false).unwrap() {
        let init = label_coloring(&g);
        let n = g.node_count();
        let partition = |c: &[usize]| {
            let mut cells: Vec<Vec<usize>> = vec![];
            for v in 0..c.len() {
                if let Some(cell) = cells.iter_mut().find(|cell| c[cell[0]] == c[v]) {
                    cell.push(v);
                } else {
                    cells.push(vec![v]);
                }
            }
            cells
        };
        let stable = partition(&color_refine(&g, &init, n));
        assert_eq!(partition(&color_refine(&g, &init, n + 1)), stable);
        assert_eq!(partition(&color_refine(&g, &init, n + 3)), stable);
    }
}

#[test]
fn bisimilarity_is_an_equivalence() {
    let gs: Vec<PointedGraph> = enumerate_pointed_graphs(3, 1, false).unwrap().collect();
    let rel: Vec<Vec<bool>> =
        gs.iter().map(|a| gs.iter().map(|b| bisimilar(a, b).is_some()).collect()).collect();
    for i in 0..gs.len() {
        assert!(rel[i][i]);
        for j in 0..gs.len() {
            assert_eq!(rel[i][j], rel[j][i]);
            if !rel[i][j] {
                continue;
            }
            for k in 0..gs.len() {
                assert!(!rel[j][k] || rel[i][k]);
            }
        }
    }
}

#[test]
fn unique_address_matches_oracle_in_both_modes() {
    for mode in [AddressMode::Sigmoid, AddressMode::Semilinear] {
        let target = CompileTarget::UniqAddrLocalSum(mode);
        let rep = oracle_agreement(target, &CorpusSpec::standard(target)).unwrap();
        assert!(rep.passed(), "{rep}");
        assert!(rep.instances > 0);
    }
}

#[test]
fn unique_address_examples() {
    let (a, b) = parse_address_pair("p1, top / top, p1").unwrap();
    let c = compile_unique_address(&a, &b, AddressMode::Semilinear).unwrap();
    assert!(audit_primitives(&c, CompileTarget::UniqAddrLocalSum(AddressMode::Semilinear)).is_empty());
    let mut g = Graph::from_edges(3, 1, &[(0, 1), (1, 2)]).unwrap();
    g.set_label(0, 1, true).unwrap();
    for point in 0..3 {
        let pg = PointedGraph::new(g.clone(), point).unwrap();
        for s in 0..10 {
            let kg = PointedKeyedGraph { keying: Some(random_keying(&g, s)), pointed: pg.clone() };
            assert_eq!(classify(&c, &kg).unwrap().accept, unique_address_query(&pg, &a, &b));
        }
    }
    assert!(compile_unique_address(&[], &b, AddressMode::Sigmoid).is_err());
}

#[test]
fn isotype_compilers_agree_on_a_triangle() {
    let c3 = builtin_graph(Fixture::Cycle(3)).unwrap().pointed;
    let by_max = compile_isotype_localmax(&c3).unwrap();
    let by_global = compile_isotype_globalsum(&c3).unwrap();
    let by_sum = compile_isotype_localsum_square(&c3).unwrap();
    for g in enumerate_pointed_graphs(4, 0, true).unwrap() {
        for s in 0..3 {
            let kg = PointedKeyedGraph { keying: Some(random_keying(&g.graph, s)), pointed: g.clone() };
            let a = classify(&by_max, &kg).unwrap().accept;
            assert_eq!(a, classify(&by_global, &kg).unwrap().accept);
            assert_eq!(a, classify(&by_sum, &kg).unwrap().accept);
            assert_eq!(a, kignn::graph::is_isomorphic(&g, &c3).is_some());
        }
    }
}

#[test]
fn diamond_fixture_equals_compiled_formula() {
    let fixture = fixture_classifier("diamond2top").unwrap();
    let compiled = compile_wgml_top(&parse_gml("<>{>=2}top").unwrap()).unwrap();
    for g in enumerate_graphs(4, 0, false).unwrap() {
        for s in 0..10 {
            let k = random_keying(&g, s);
            let a = fixture.classify_nodes(&g, Some(&k)).unwrap();
            let b = compiled.classify_nodes(&g, Some(&k)).unwrap();
            assert_eq!(a.iter().map(|d| d.accept).collect::<Vec<_>>(), b.iter().map(|d| d.accept).collect::<Vec<_>>());
        }
    }
}

#[test]
fn every_target_passes_its_primitive_audit() {
    let phi = parse_gml("<>{>=2}(p1 & ~<>p1)").unwrap();
    let ml = parse_gml("<>(p1 | []~p1)").unwrap();
    let wtop = parse_gml("<>{>=2}top | <>(<>{>=2}top & p1)").unwrap();
    let lddl = parse_lddl("<step;test(p1);step>=1 top").unwrap();
    let c3 = builtin_graph(Fixture::Cycle(3)).unwrap().pointed;
    let (a, b) = parse_address_pair("p1 / top").unwrap();
    for t in CompileTarget::ALL {
        let c: GnnClassifier = match t {
            CompileTarget::GmlLocalSumRelu => compile_gml_localsum(&phi),
            CompileTarget::MlLocalMaxRelu => compile_ml_localmax(&ml).unwrap(),
            CompileTarget::WgmlTopLocalMaxRelu => compile_wgml_top(&wtop).unwrap(),
            CompileTarget::WgmlModalLocalMaxSigmoid => compile_wgml_modal(&phi).unwrap(),
            CompileTarget::LddlLocalMaxSemilinear => compile_lddl_semilinear(&lddl),
            CompileTarget::UniqAddrLocalSum(m) => compile_unique_address(&a, &b, m).unwrap(),
            CompileTarget::IsotypeLocalMaxSemilinear => compile_isotype_localmax(&c3).unwrap(),
            CompileTarget::IsotypeLocalSumSquare => compile_isotype_localsum_square(&c3).unwrap(),
            CompileTarget::IsotypeGlobalSumSemilinear => compile_isotype_globalsum(&c3).unwrap(),
        };
        assert!(audit_primitives(&c, t).is_empty(), "{t}: {:?}", audit_primitives(&c, t));
    }
}

#[test]
fn gml_outputs_stay_in_the_zero_one_band() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..30 {
        let c = compile_gml_localsum(&random_gml(&mut rng, 3, 3, 1));
        assert_eq!(c.policy, Policy::OneZero);
        let rep = check_policy_conformance(&c, enumerate_pointed_graphs(4, 1, false).unwrap(), 0, 0);
        assert!(rep.passed(), "{}: {:?}", c.meta, rep.violations);
    }
}

#[test]
fn invariance_counterexamples_replay() {
    // accepts exactly when the point holds the largest key in its neighborhood
    let v = Feature::val();
    let c = GnnClassifier::new(&v - &v.local_max(), Policy::PosNonpos, Mode::Exact).unwrap().with_meta("local key maximum");
    let rep = test_key_invariance(&c, 3, 0, 10, 0).unwrap();
    let InvarianceVerdict::Counterexample { graph, seed_a, seed_b, accept_a, accept_b, .. } = rep.verdict else {
        panic!("expected a counterexample:\n{rep}");
    };
    assert_ne!(accept_a, accept_b);
    let g = parse_graph(&graph).unwrap();
    for (seed, expect) in [(seed_a, accept_a), (seed_b, accept_b)] {
        let k = random_keying(g.graph(), seed);
        let d = classify(&c, &PointedKeyedGraph { pointed: g.pointed.clone(), keying: Some(k) }).unwrap();
        assert_eq!(d.accept, expect);
    }
    let oblivious = compile_gml_localsum(&parse_gml("<>{>=2}top").unwrap());
    assert!(test_key_invariance(&oblivious, 4, 0, 5, 0).unwrap().passed());
}
