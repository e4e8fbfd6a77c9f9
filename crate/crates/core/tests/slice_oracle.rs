//! Cross-checks of the slice-process catalog against independent
//! machinery: the cell-level reference application of the generator, and
//! the coupling with the full majority model driven by a shared event
//! log.

use std::collections::BTreeMap;

use majority_core::dynamics::{generate_event_log, MajorityRule};
use majority_core::lattice::{Configuration, Coord, HyperedgeFamily, LatticeGeometry};
use majority_core::rng::RngStream;
use majority_core::slice2d::{active_updates, reference, SliceState};

fn random_state(rng: &mut RngStream, allow_invalid: bool) -> SliceState {
    loop {
        let middle = rng.int_range(-5, 5);
        let state = SliceState {
            bottom: middle + rng.int_range(-5, 5),
            middle,
            top: middle + rng.int_range(-5, 5),
        };
        if allow_invalid || state.is_valid() {
            return state;
        }
    }
}

fn catalog_as_map(state: SliceState) -> BTreeMap<Coord, SliceState> {
    active_updates(state)
        .into_iter()
        .map(|e| (e.anchor, e.successor))
        .collect()
}

#[test]
fn catalog_matches_the_cell_level_reference_on_random_states() {
    let mut rng = RngStream::new(2300, 0);
    for i in 0..1000 {
        let state = random_state(&mut rng, false);
        let expected: BTreeMap<Coord, SliceState> =
            reference::state_changing_updates(state).into_iter().collect();
        let got = catalog_as_map(state);
        assert_eq!(got, expected, "catalog mismatch at case {i}, state {state:?}");
    }
}

#[test]
fn catalog_matches_the_reference_on_unreachable_states_too() {
    // The generator is total: triples with the middle front strictly
    // smallest are unreachable but still well-defined configurations.
    let mut rng = RngStream::new(2301, 0);
    let mut invalid_seen = 0;
    for _ in 0..300 {
        let state = random_state(&mut rng, true);
        if !state.is_valid() {
            invalid_seen += 1;
        }
        let expected: BTreeMap<Coord, SliceState> =
            reference::state_changing_updates(state).into_iter().collect();
        assert_eq!(catalog_as_map(state), expected, "mismatch at {state:?}");
    }
    assert!(invalid_seen > 10, "sampler produced too few unreachable states");
}

#[test]
fn catalog_matches_the_reference_exhaustively_near_the_origin() {
    for state in majority_core::slice2d::states_in_range(4) {
        let expected: BTreeMap<Coord, SliceState> =
            reference::state_changing_updates(state).into_iter().collect();
        assert_eq!(catalog_as_map(state), expected, "mismatch at {state:?}");
    }
}

#[test]
fn slice_process_is_dominated_by_the_full_majority_model() {
    // Couple the two processes through the same Poisson events on a
    // strip: at every event the slice's 1-set must stay inside the full
    // model's 1-set.
    let geometry = LatticeGeometry::window2d(-16, -3, 36, 7);
    let family = HyperedgeFamily::new(2, geometry).unwrap();
    let rule = MajorityRule::new(family);
    let x_lo = geometry.origin().x;

    for replica in 0..15u64 {
        let mut rng = RngStream::new(2400, replica);
        let log = generate_event_log(&family, 3.0, &mut rng);

        let mut slice = SliceState::flat();
        let mut full: Configuration = slice.materialize(geometry);
        let mut flips = Vec::new();

        for ev in &log.events {
            rule.update_at(&mut full, ev.anchor, &mut flips);
            if let Some(entry) = active_updates(slice)
                .into_iter()
                .find(|e| e.anchor == ev.anchor)
            {
                slice = entry.successor;
            }
            for row in [-1i64, 0, 1] {
                let front = slice.front(row);
                assert!(
                    front >= x_lo + 2 && front <= x_lo + 30,
                    "slice front left the comparison window; shorten the horizon"
                );
                for x in x_lo..=front {
                    assert!(
                        full.get(Coord::new(x, row)),
                        "containment broken at ({x}, {row}), replica {replica}, t = {}",
                        ev.time
                    );
                }
            }
        }
    }
}
