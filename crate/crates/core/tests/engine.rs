mod common;

use std::time::Instant;

use conscience::engine::{
    clone_state, object_tree_snapshot, parse_script, replay, restore, step, validate_world, Snapshot,
    INVALID_REPLY,
};
use conscience::suite::{game_source, load_suite, GAME_IDS};
use conscience::{Degrees, GameState};
use proptest::prelude::*;

#[test]
fn minimal_two_room_script() {
    let w = parse_script(
        "GAME tiny\nROOM a \"A\" \"Room a.\"\nROOM b \"B\" \"Room b.\"\nEXIT a NORTH b\nWALKTHROUGH\nEND\n",
    )
    .unwrap();
    assert_eq!(w.rooms.len(), 2);
    assert_eq!(w.max_score, 0);
}

#[test]
fn dangling_exit_is_reported_at_its_line() {
    let err = parse_script(
        "GAME tiny\nROOM hall \"Hall\" \"A hall.\"\nEXIT hall NORTH nowhere\nWALKTHROUGH\nEND\n",
    )
    .unwrap_err();
    assert!(err
        .diagnostics()
        .iter()
        .any(|d| d.line == 3 && d.message == "unknown room 'nowhere'"));
}

#[test]
fn theft_and_attempted_theft() {
    let w = common::shop();
    let mut s = GameState::initial(&w);
    for a in ["north"] {
        assert!(step(&w, &mut s, a).unwrap().valid);
    }
    let attempt = step(&w, &mut s, "steal purse").unwrap();
    assert!(attempt.valid);
    assert_eq!(attempt.reward, 0);
    assert_eq!(attempt.annotations.len(), 1);
    assert_eq!(attempt.annotations[0].degrees, Degrees([1, 0, 0, 0]));
    assert!(attempt.annotations[0].attempt);
    assert_eq!(s.parent(w.object_id("purse").unwrap()), conscience::engine::Location::Room(w.room_id("shop").unwrap()));

    for a in ["up", "take knife", "down"] {
        assert!(step(&w, &mut s, a).unwrap().valid);
    }
    let theft = step(&w, &mut s, "steal purse").unwrap();
    assert_eq!(theft.annotations.len(), 1);
    assert_eq!(theft.annotations[0].degrees, Degrees([2, 0, 0, 0]));
    assert!(!theft.annotations[0].attempt);
    assert_eq!(theft.annotations[0].source_rule, "steal_purse");
    assert_eq!(theft.reward, 2);
}

#[test]
fn gibberish_gets_the_fixed_reply() {
    let w = common::shop();
    let mut s = GameState::initial(&w);
    for junk in ["xyzzy plugh", "", "take", "take unicorn", "west"] {
        let out = step(&w, &mut s, junk).unwrap();
        assert_eq!(out.observation, INVALID_REPLY);
        assert!(!out.valid);
        assert_eq!(out.reward, 0);
        assert!(out.annotations.is_empty());
    }
}

#[test]
fn carried_object_wins_noun_resolution() {
    let w = common::shop();
    let (mut s, _) = replay(&w, ["take coin", "north", "up"]).unwrap();
    let gold = w.object_id("coin").unwrap();
    let copper = w.object_id("penny").unwrap();
    assert!(s.carries(gold));
    assert!(!s.carries(copper));
    assert!(step(&w, &mut s, "drop coin").unwrap().valid);
    assert!(!s.carries(gold));
    assert!(step(&w, &mut s, "take copper coin").unwrap().valid);
    assert!(s.carries(copper));
}

#[test]
fn clones_are_independent() {
    let w = common::shop();
    let original = GameState::initial(&w);
    let mut copy = clone_state(&original);
    assert_eq!(copy, original);
    copy.score += 7;
    step(&w, &mut copy, "take lamp").unwrap();
    assert_eq!(original, GameState::initial(&w));
    assert_ne!(copy, original);
}

fn forty_object_script() -> String {
    let mut s = String::from("GAME crowd\nROOM hall \"Hall\" \"A crowded hall.\"\n");
    for i in 0..40 {
        s.push_str(&format!("OBJECT thing{i} \"thing number{i}\" LOC hall\n  FLAGS TAKEABLE\n"));
    }
    s.push_str("WALKTHROUGH\nEND\n");
    s
}

#[test]
fn thousand_clones_are_cheap() {
    let w = parse_script(&forty_object_script()).unwrap();
    assert_eq!(w.objects.len(), 40);
    let state = GameState::initial(&w);
    let start = Instant::now();
    let mut total = 0usize;
    for _ in 0..1000 {
        let c = clone_state(&state);
        total += c.objects.len();
    }
    let elapsed = start.elapsed();
    assert_eq!(total, 40_000);
    assert!(elapsed.as_millis() < 50, "1000 clones took {elapsed:?}");
}

#[test]
fn snapshot_lists_every_object_once() {
    for w in load_suite() {
        let snap = object_tree_snapshot(&GameState::initial(&w), &w);
        let ids: Vec<&str> = snap.objects().map(|(id, _)| id).collect();
        assert_eq!(ids.len(), w.objects.len());
        for o in &w.objects {
            assert_eq!(ids.iter().filter(|&&i| i == o.id).count(), 1, "{}", o.id);
        }
    }
}

#[test]
fn snapshot_restore_round_trip() {
    for w in load_suite() {
        let half = w.walkthrough.len() / 2;
        let (state, _) = replay(&w, w.walkthrough[..half].iter().map(String::as_str)).unwrap();
        let snap = object_tree_snapshot(&state, &w);
        let text = snap.to_text();
        let parsed = Snapshot::from_text(&text).unwrap();
        assert_eq!(parsed, snap);
        let restored = restore(&parsed, &w).unwrap();
        assert_eq!(restored, state);
        assert_eq!(object_tree_snapshot(&restored, &w), snap);
    }
}

#[test]
fn move_effect_shows_in_snapshot() {
    let w = parse_script(
        r#"GAME grab
ROOM hall "Hall" "A hall."
OBJECT lamp "brass lamp" LOC hall
VERB grab
RULE grab_lamp ON "grab lamp"
  DO MOVE lamp PLAYER
  DO PRINT "Got it."
WALKTHROUGH
END
"#,
    )
    .unwrap();
    let mut s = GameState::initial(&w);
    assert_eq!(object_tree_snapshot(&s, &w).parent_of("lamp"), Some("hall"));
    assert!(step(&w, &mut s, "grab lamp").unwrap().valid);
    assert_eq!(object_tree_snapshot(&s, &w).parent_of("lamp"), Some("PLAYER"));
}

#[test]
fn score_fires_once() {
    let w = common::shop();
    let (mut s, _) = replay(&w, ["take lamp", "north", "up", "take knife", "down"]).unwrap();
    assert_eq!(step(&w, &mut s, "steal purse").unwrap().reward, 2);
    let again = step(&w, &mut s, "steal purse").unwrap();
    assert_eq!(again.reward, 0);
    assert_eq!(s.score, 2);
}

#[test]
fn bundled_walkthroughs_reach_max_score() {
    for id in GAME_IDS {
        let w = parse_script(game_source(id).unwrap()).unwrap();
        let (state, outcomes) = replay(&w, w.walkthrough.iter().map(String::as_str)).unwrap();
        assert!(state.done, "{id}");
        assert_eq!(state.score, w.max_score, "{id}");
        let rewards: i64 = outcomes.iter().map(|o| o.reward).sum();
        assert_eq!(rewards, w.max_score, "{id}");
        assert!(validate_world(&w).is_empty(), "{id}: {:?}", validate_world(&w));
    }
}

#[test]
fn validation_flags_incomplete_walkthrough_and_unreachable_room() {
    let incomplete = common::SHOP.replace("rub lamp\nEND", "END");
    let w = parse_script(&incomplete).unwrap();
    let diags = validate_world(&w);
    assert!(diags.iter().any(|d| d.message.starts_with("walkthrough incomplete")), "{diags:?}");

    let island = common::SHOP.replace(
        "ROOM attic",
        "ROOM island \"Island\" \"Nobody comes here.\"\nROOM attic",
    );
    let w = parse_script(&island).unwrap();
    let diags = validate_world(&w);
    assert!(diags.iter().any(|d| d.message == "unreachable room 'island'"), "{diags:?}");
}

fn pick_actions(w: &conscience::WorldModel, picks: &[u16]) -> Vec<String> {
    let mut s = GameState::initial(w);
    let mut actions = Vec::new();
    for &p in picks {
        if s.done {
            break;
        }
        let valid = conscience::engine::valid_actions(w, &s);
        let a = valid[p as usize % valid.len()].clone();
        step(w, &mut s, &a).unwrap();
        actions.push(a);
    }
    actions
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stepping_is_deterministic_and_conserves_score(game in 0usize..5, picks in prop::collection::vec(any::<u16>(), 1..120)) {
        let w = &load_suite()[game];
        let actions = pick_actions(w, &picks);
        let run = || {
            let mut s = GameState::initial(w);
            let outs: Vec<_> = actions.iter().map(|a| step(w, &mut s, a).unwrap()).collect();
            (s, outs)
        };
        let (s1, o1) = run();
        let (s2, o2) = run();
        prop_assert_eq!(&s1, &s2);
        prop_assert_eq!(&o1, &o2);
        prop_assert_eq!(s1.score, o1.iter().map(|o| o.reward).sum::<i64>());
        for o in &o1 {
            for a in &o.annotations {
                prop_assert!(!a.degrees.is_zero());
                prop_assert!(a.degrees.0.iter().all(|&d| d <= 3));
            }
        }
    }

    #[test]
    fn replaying_a_scoring_action_pays_nothing(game in 0usize..5, picks in prop::collection::vec(any::<u16>(), 1..80)) {
        let w = &load_suite()[game];
        let mut s = GameState::initial(w);
        for a in pick_actions(w, &picks) {
            if s.done {
                break;
            }
            let out = step(w, &mut s, &a).unwrap();
            if out.reward > 0 && !s.done {
                prop_assert_eq!(step(w, &mut s, &a).unwrap().reward, 0);
            }
        }
    }

    #[test]
    fn attempts_are_reduced_degrees(game in 0usize..5, picks in prop::collection::vec(any::<u16>(), 1..80)) {
        let w = &load_suite()[game];
        let mut s = GameState::initial(w);
        for a in pick_actions(w, &picks) {
            if s.done {
                break;
            }
            for ann in step(w, &mut s, &a).unwrap().annotations {
                let declared = w.rule(&ann.source_rule).unwrap().annotation.as_ref().unwrap().degrees;
                if ann.attempt {
                    for (got, d) in ann.degrees.0.iter().zip(declared.0) {
                        prop_assert_eq!(*got, if d == 0 { 0 } else { (d - 1).max(1) });
                    }
                } else {
                    prop_assert_eq!(ann.degrees, declared);
                }
            }
        }
    }

    #[test]
    fn parsing_is_total(text in "[ -~\n]{0,400}") {
        if let Err(e) = parse_script(&text) {
            prop_assert!(!e.diagnostics().is_empty());
        }
    }

    #[test]
    fn parsing_near_valid_scripts_is_total(cut in 0usize..1200, insert in "[A-Z\" 0-9a-z]{0,20}") {
        let src = common::SHOP;
        let at = cut.min(src.len());
        let at = (0..=at).rev().find(|&i| src.is_char_boundary(i)).unwrap();
        let mutated = format!("{}{}{}", &src[..at], insert, &src[at..]);
        if let Err(e) = parse_script(&mutated) {
            prop_assert!(!e.diagnostics().is_empty());
        }
    }
}
