//! Hodge-type bounds for SO(m, 2) as a markdown table.
use ffskit::hodgebound::{self, ParabolicDatum};

fn main() {
    print!("{}", hodgebound::render_markdown(&hodgebound::table(1..=12, 1, 1)));
    println!();
    for p in ParabolicDatum::all(5) {
        println!("m=5 r={} s={} sign={} δ=({}, {}) → (R₊, R₋) = {:?}", p.r, p.s, p.sign_a0, p.delta_plus, p.delta_minus, p.r_plus_minus());
    }
}
