use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wittkit::category::{
    compose_bispans, exponential_diagram, isomorphic, mult_pullback, verify_law, CategoryError,
    LawDiagram, LawOptions,
};
use wittkit::random;

fn opts(seed: u64) -> LawOptions {
    LawOptions {
        random_vectors: 3,
        range: 4,
        seed,
        witt_symbolic: false,
    }
}

#[test]
fn restriction_past_transfer() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..100 {
        let (f, g) = random::rt_pair(&mut rng, 5);
        let r = verify_law(&LawDiagram::RT { f, g }, &opts(i));
        assert!(r.holds, "{}", serde_json::to_string(&r).unwrap());
    }
}

#[test]
fn restriction_past_norm_with_joins() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..100 {
        let (f, g) = random::nr_pair(&mut rng, 5);
        assert!(mult_pullback(&f, &g).is_ok());
        let r = verify_law(&LawDiagram::NR { f, g }, &opts(i));
        assert!(r.holds, "{}", serde_json::to_string(&r).unwrap());
    }
}

#[test]
fn norm_past_transfer() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for i in 0..60 {
        let (f, g) = random::tn_pair(&mut rng, 4, 6);
        let x = match exponential_diagram(&f, &g) {
            Ok(x) => x,
            Err(CategoryError::CapExceeded(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        assert!(x.orbit_cardinality_holds());
        assert!(x.n.is_n() && x.t.is_t());
        let r = verify_law(&LawDiagram::TN { f, g }, &opts(i));
        assert!(r.holds, "{}", serde_json::to_string(&r).unwrap());
    }
}

#[test]
fn bispan_composition_respects_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..30 {
        let s = Arc::new(random::join_poset(&mut rng, 4, 4));
        let b1 = random::bispan_from(&mut rng, &s, 4);
        let b2 = random::bispan_from(&mut rng, b1.target(), 4);
        let c = compose_bispans(&b1, &b2).unwrap();
        for _ in 0..3 {
            let v = random::witt_vector(&mut rng, &s, 3);
            let stepwise = b2.evaluate(&b1.evaluate(&v).unwrap()).unwrap();
            assert_eq!(c.evaluate(&v).unwrap(), stepwise);
        }
    }
}

#[test]
fn bispan_composition_is_associative_up_to_isomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut done = 0;
    while done < 20 {
        let s = Arc::new(random::join_poset(&mut rng, 4, 3));
        let b1 = random::bispan_from(&mut rng, &s, 3);
        let b2 = random::bispan_from(&mut rng, b1.target(), 3);
        let b3 = random::bispan_from(&mut rng, b2.target(), 3);
        let left = compose_bispans(&b1, &b2).and_then(|c| compose_bispans(&c, &b3));
        let right = compose_bispans(&b2, &b3).and_then(|c| compose_bispans(&b1, &c));
        match (left, right) {
            (Ok(l), Ok(r)) => {
                assert!(isomorphic(&l, &r));
                done += 1;
            }
            (Err(CategoryError::CapExceeded(_)), _) | (_, Err(CategoryError::CapExceeded(_))) => {}
            (l, r) => panic!("{:?} {:?}", l.err(), r.err()),
        }
    }
}
