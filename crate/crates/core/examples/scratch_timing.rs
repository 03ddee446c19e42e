use std::time::Instant;
use wicklab::*;

fn main() {
    let model = IncrementVarianceModel::power_law(1.6).unwrap();
    let g = StepFunction::indicator(0.0, 1.0).unwrap();
    for &(h, hp) in &[
        (0.125f64, 0.0625f64),
        (0.125, 2f64.powi(-10)),
        (2f64.powi(-9), 2f64.powi(-10)),
        (2f64.powi(-10), 2f64.powi(-11)),
        (0.125, 0.0),
        (2f64.powi(-10), 0.0),
    ] {
        let t0 = Instant::now();
        let d = metric_d(&model, 2, &g, h, hp).unwrap();
        println!("d({h:.6}, {hp:.6}) = {d:.6e}   [{:?}]", t0.elapsed());
    }
}
