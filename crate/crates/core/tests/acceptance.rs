use sharpflat_core::acceptance::{run_all, CRITERIA};

#[test]
fn acceptance() {
    let outcomes = run_all();
    for o in &outcomes {
        println!("{o}");
    }
    assert_eq!(outcomes.len(), CRITERIA.len());
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    let slow: Vec<u8> = outcomes.iter().filter(|o| o.elapsed.as_secs() >= 60).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
    assert!(slow.is_empty(), "criteria over 60 s: {slow:?}");
}
