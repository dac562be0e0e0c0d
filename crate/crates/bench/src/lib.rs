//! Fixed workloads shared by the benchmarks.

use proxplay_core::{presets, Path, Point, SetSpec};

pub struct Workload {
    pub name: &'static str,
    pub set: SetSpec,
    pub input: Path,
    pub z0: Point,
}

/// Scalar ramp, rotating disk and sliding complement, each on `segments` steps.
pub fn workloads(segments: usize) -> Vec<Workload> {
    vec![
        Workload {
            name: "interval_ramp",
            set: SetSpec::interval(-1.0, 1.0).unwrap(),
            input: presets::ramp(2.0, segments, &Point::scalar(0.0), &Point::scalar(1.0)).unwrap(),
            z0: Point::scalar(0.0),
        },
        Workload {
            name: "disk_rotating",
            set: SetSpec::ball([0.0, 0.0], 1.0).unwrap(),
            input: presets::circle_arc(6.0, segments, [-1.0, 0.0], 2.0, 0.0, 1.0).unwrap(),
            z0: Point::from([1.0, 0.0]),
        },
        Workload {
            name: "hole_sliding",
            set: SetSpec::complement_of_ball([0.0, 0.0], 1.0).unwrap(),
            input: presets::ramp(0.5, segments, &Point::zeros(2), &Point::from([-1.0, 1.0]))
                .unwrap(),
            z0: Point::from([1.0, 0.0]),
        },
    ]
}
