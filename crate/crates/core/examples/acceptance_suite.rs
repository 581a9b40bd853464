//! Run every acceptance criterion and print the table.
fn main() {
    let results = shla::acceptance::run_all(shla::sampling::default_seed());
    for r in &results {
        println!("{r}");
    }
    println!("{}/{} passed", results.iter().filter(|r| r.pass).count(), results.len());
}
