//! Regenerates the JSON trace fixtures under `tests/fixtures/`.
//!
//! cargo run -p effortvib --example gen_fixtures

#[path = "../tests/common/mod.rs"]
mod common;

use effortvib::trace_io::{LandmarkTrace, UpAxis};
use effortvib::Vec3;

use common::{fixture, squat_trace, synthetic_trace};

fn write(name: &str, trace: &LandmarkTrace) {
    let path = fixture(name);
    trace.write_json(&path).expect("write fixture");
    println!("wrote {} ({} frames)", path.display(), trace.len());
}

fn main() {
    std::fs::create_dir_all(fixture("")).expect("fixture dir");

    write("static_stance_30fps.json", &synthetic_trace(30.0, 60, |_, _| Vec3::zeros()));
    for rate in [30.0, 60.0, 100.0, 120.0] {
        write(&format!("squat_{rate}fps.json"), &squat_trace(rate, 2.0));
    }

    // Shaped like the pose extractor's image-coordinate output: y down,
    // units of 1/1.7 m, partial visibility, one dropped frame and mild
    // timing jitter.
    let mut sample = synthetic_trace(30.0, 46, |name, t| {
        let sway = 0.03 * (std::f64::consts::TAU * 0.8 * t).sin();
        let arm = if name.contains("wrist") || name.contains("index") || name.contains("pinky") || name.contains("thumb") {
            0.1 * (std::f64::consts::TAU * 1.3 * t).sin()
        } else {
            0.0
        };
        Vec3::new(sway, arm, 0.0)
    });
    sample.frames.remove(20);
    let scale = 1.7;
    for (k, frame) in sample.frames.iter_mut().enumerate() {
        frame.timestamp += if k % 3 == 1 { 0.002 } else { 0.0 };
        for (name, p) in frame.positions.iter_mut() {
            *p = UpAxis::NegY.from_y_up(*p) / scale;
            let vis = if name.contains("ear") || name.contains("eye") { 0.62 } else { 0.97 };
            frame.visibility.insert(name.clone(), vis);
        }
    }
    sample.unit_scale = scale;
    sample.up_axis = UpAxis::NegY;
    sample.frame_rate_hint = Some(30.0);
    write("extractor_sample.json", &sample);
}
