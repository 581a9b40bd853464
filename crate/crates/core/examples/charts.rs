//! Load a chart document and check the pre-symplectic data.
use shla::chart::{builtin_oscillator, load_chart, rational};

const CHART: &str = r#"{"k":1,"r":2,"coords":{"y":["y1","y2"],"q":["q1","q2"]},
    "periods":{"y1":1,"y2":1,"q1":1,"q2":1},
    "omega":[["0","1+c*sin(2*pi*y1)"],["-1-c*sin(2*pi*y1)","0"]],
    "R":[["0","sin(2*pi*q1)/4"],["cos(2*pi*y1)/5","0"]],"params":{"c":"1/5"}}"#;

fn main() -> anyhow::Result<()> {
    let c = load_chart(CHART)?;
    c.validate(64, 7)?;
    println!("{c:?}: omega_12 = {}", c.omega[0][1]);
    let osc = builtin_oscillator(&rational("3/2").unwrap())?;
    println!("{osc:?}: omega_12 = {}, y2 domain {:?}", osc.omega[0][1], osc.domain[1]);
    Ok(())
}
