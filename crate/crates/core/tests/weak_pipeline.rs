//! Prefix construction and tail assembly for t-weak sequencings.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nullcert::certify::{CertFamily, FactorMode, SearchConfig};
use nullcert::sequencing::{is_t_weak_sequencing, Subset};
use nullcert::weakseq::{
    assemble_weak_sequencing, greedy_prefix, verify_tail_certificate, weak_certificate_search, TailSource, TailStore,
    WeakOutcome,
};
use nullcert::{GroupElement, SemidirectGroup};

fn random_subset(g: &SemidirectGroup, k: usize, rng: &mut ChaCha8Rng) -> Subset {
    let mut all: Vec<GroupElement> = g.elements().into_iter().filter(|&u| u != g.identity()).collect();
    all.shuffle(rng);
    Subset::new(g, all[..k].to_vec()).unwrap()
}

/// Searches tail certificates for whatever `(λ'', ā)` the subsets need.
fn store_for(g: &SemidirectGroup, subsets: &[Subset], t: usize) -> TailStore {
    let family = CertFamily::from_group(g);
    let ell = 2 * (t - 1);
    let mut wanted = BTreeSet::new();
    for s in subsets {
        let plan = greedy_prefix(g, s, t, s.len() - ell).unwrap();
        wanted.insert((plan.abar, plan.tail_type(g.h().order())));
    }
    let mut store = TailStore::new();
    for (abar, lam) in wanted {
        if let Some(c) = weak_certificate_search(&family, &lam, abar, t, FactorMode::Reduced, &SearchConfig::default()).unwrap() {
            assert!(verify_tail_certificate(&c).unwrap().0);
            store.insert(c);
        }
    }
    store
}

fn run(g: &SemidirectGroup, k: usize, t: usize, n: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subsets: Vec<Subset> = (0..n).map(|_| random_subset(g, k, &mut rng)).collect();
    let store = store_for(g, &subsets, t);
    let mut certified = 0;
    for s in &subsets {
        match assemble_weak_sequencing(g, s, t, &store).unwrap() {
            WeakOutcome::Found(w) => {
                assert!(is_t_weak_sequencing(g, &w.ordering, t).unwrap());
                let mut got = w.ordering.clone();
                got.sort();
                assert_eq!(got, s.sorted());
                if matches!(w.source, TailSource::Certified { .. }) {
                    certified += 1;
                }
            }
            other => panic!("{:?}: {other:?}", s.sorted()),
        }
    }
    certified
}

#[test]
fn prefix_in_d26() {
    let g = SemidirectGroup::dihedral(13).unwrap();
    let s = Subset::parse(&g, "1.0 2.0 3.0 4.0 5.0 6.0 7.0 1.1 2.1 3.1 4.1 5.1 6.1 7.1").unwrap();
    let t = 4;
    let plan = greedy_prefix(&g, &s, t, 8).unwrap();
    assert_eq!(plan.prefix.len(), 8);
    assert_eq!(plan.rest.len(), 6);
    assert!(is_t_weak_sequencing(&g, &plan.prefix, t).unwrap());
    // (b) the last t-1 prefix elements lie in ā
    assert!(plan.prefix[8 - (t - 1)..].iter().all(|u| u.a == plan.abar));
    // (c) at least t-1 elements of ā are left for the tail
    assert!(plan.rest.iter().filter(|u| u.a == plan.abar).count() >= t - 1);
}

#[test]
fn assemble_d26_k14_t4() {
    let g = SemidirectGroup::dihedral(13).unwrap();
    let certified = run(&g, 14, 4, 30, 1);
    assert!(certified > 0);
}

#[test]
fn assemble_z13xz2_k19_t6() {
    let g = SemidirectGroup::direct(13, 2).unwrap();
    let certified = run(&g, 19, 6, 10, 2);
    assert!(certified > 0);
}

#[test]
fn assemble_d22_small_t() {
    let g = SemidirectGroup::dihedral(11).unwrap();
    for t in 2..=3 {
        run(&g, (2 * t - 3) * 2 + 1, t, 30, t as u64);
    }
}

#[test]
fn preconditions_are_enforced() {
    let g = SemidirectGroup::dihedral(13).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = random_subset(&g, 10, &mut rng);
    // k must exceed (2t-3)|H| = 10
    assert!(assemble_weak_sequencing(&g, &s, 4, &TailStore::new()).is_err());
    assert!(greedy_prefix(&g, &s, 4, 8).is_err());
    assert!(greedy_prefix(&g, &s, 0, 4).is_err());
}
