use shla::acceptance::{count, run};
use shla::sampling::default_seed;

#[test]
fn acceptance_criteria() {
    let seed = default_seed();
    let mut failed = Vec::new();
    for id in 1..=count() {
        let r = run(id, seed);
        println!("{r}");
        if !r.pass {
            failed.push(r.id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
