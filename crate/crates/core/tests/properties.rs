use proptest::prelude::*;

use hyperperc::algebra::{decompose_closed, is_closed};
use hyperperc::cube::all_patterns;
use hyperperc::extremal::lift_set;
use hyperperc::norms::NormSpec;
use hyperperc::{engine, CubeShape, Pattern, Symbol, VertexSet};

fn shape_strategy() -> impl Strategy<Value = CubeShape> {
    prop_oneof![
        (1usize..=4).prop_map(|n| CubeShape::new(n, 3).unwrap()),
        (1usize..=3).prop_map(|n| CubeShape::new(n, 4).unwrap()),
        (1usize..=6).prop_map(|n| CubeShape::new(n, 2).unwrap()),
    ]
}

fn set_in(shape: CubeShape) -> impl Strategy<Value = VertexSet> {
    prop::collection::vec(prop::bool::weighted(0.25), shape.len()).prop_map(move |bits| {
        let mut s = VertexSet::empty(shape);
        for v in shape.vertices() {
            if bits[v.index()] {
                s.insert(v);
            }
        }
        s
    })
}

fn shape_and_set() -> impl Strategy<Value = VertexSet> {
    shape_strategy().prop_flat_map(set_in)
}

fn pattern_in(shape: CubeShape) -> impl Strategy<Value = Pattern> {
    let q = shape.q();
    prop::collection::vec(prop::option::of(0..q), shape.n()).prop_map(move |syms| {
        let symbols = syms
            .into_iter()
            .map(|s| s.map_or(Symbol::Star, Symbol::Fixed))
            .collect();
        Pattern::new(shape, symbols).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closedness_is_the_closure_fixpoint(s in shape_and_set()) {
        let c = engine::closure(&s, 2).unwrap();
        prop_assert_eq!(is_closed(&s), c == s);
        prop_assert!(is_closed(&c));
    }

    #[test]
    fn closures_split_into_far_apart_subcubes(s in shape_and_set()) {
        let c = engine::closure(&s, 2).unwrap();
        let d = decompose_closed(&c).unwrap();
        prop_assert!(d.valid);
        let mut union = VertexSet::empty(c.shape());
        for (i, x) in d.components.iter().enumerate() {
            union.union_with(&VertexSet::from_pattern(x));
            for y in &d.components[i + 1..] {
                prop_assert!(x.distance(y).unwrap() >= 3);
            }
        }
        prop_assert_eq!(union, c);
    }

    #[test]
    fn lifting_commutes_with_closure(s in shape_and_set()) {
        let up = lift_set(&s).unwrap();
        let (a, b) = (engine::run(&s, 2).unwrap(), engine::run(&up, 2).unwrap());
        prop_assert_eq!(a.rounds(), b.rounds());
        prop_assert_eq!(lift_set(&a.closure()).unwrap(), b.closure());
    }

    #[test]
    fn join_is_the_smallest_common_subcube(
        (x, y) in (1usize..=3).prop_flat_map(|n| {
            let s = CubeShape::new(n, 3).unwrap();
            (pattern_in(s), pattern_in(s))
        })
    ) {
        let j = x.join(&y).unwrap();
        prop_assert!(x.is_subcube_of(&j) && y.is_subcube_of(&j));
        for z in all_patterns(x.shape()) {
            if x.is_subcube_of(&z) && y.is_subcube_of(&z) {
                prop_assert!(j.is_subcube_of(&z));
            }
        }
    }

    #[test]
    fn seeds_near_two_subcubes_stay_in_their_join(
        (x, y, bits) in (2usize..=4).prop_flat_map(|n| {
            let s = CubeShape::new(n, 3).unwrap();
            (pattern_in(s), pattern_in(s), prop::collection::vec(any::<bool>(), s.len()))
        })
    ) {
        prop_assume!(x.distance(&y).unwrap() <= 2);
        let shape = x.shape();
        let mut seed = VertexSet::empty(shape);
        for v in shape.vertices() {
            if bits[v.index()] && (x.contains(v) || y.contains(v)) {
                seed.insert(v);
            }
        }
        let join = VertexSet::from_pattern(&x.join(&y).unwrap());
        prop_assert!(engine::closure(&seed, 2).unwrap().is_subset(&join));
    }

    #[test]
    fn norm_gates(
        digits in prop::collection::vec(0u32..3, 5),
        n1 in prop::option::of(0usize..=2),
        n2 in prop::option::of(0usize..=2),
        suffix in prop::collection::vec(0u32..3, 0..=1),
    ) {
        let shape = CubeShape::new(5, 3).unwrap();
        let n2 = n1.and(n2);
        let spec = NormSpec::new(shape, n1, n2, &suffix).unwrap();
        let d = suffix.len();
        let a = n1.unwrap_or(0);
        let gate1 = n1.is_none() || digits[..a].iter().any(|&c| c != 0);
        let gate2 = n2.is_none_or(|b| digits[a..a + b].iter().any(|&c| c != 0));
        let gate3 = digits[5 - d..] == suffix[..];
        let count = digits[..5 - d].iter().filter(|&&c| c != 0).count() as u32;
        let expected = if gate1 && gate2 && gate3 { count } else { 0 };
        prop_assert_eq!(spec.norm_digits(&digits), expected);
        let v = shape.encode(&digits).unwrap();
        prop_assert_eq!(spec.norm(v), expected);
    }
}
