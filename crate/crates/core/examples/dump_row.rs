use pulseforge::shooting::{solve_concat, ConcatSearch};

fn main() {
    let cfg = ConcatSearch {
        ts_lo: 0.5,
        ts_hi: 0.5,
        ts_points: 1,
        ridge_refine: false,
        ..ConcatSearch::default()
    };
    let scan = solve_concat(&cfg);
    for p in &scan.points {
        println!(
            "p2={:+.4} p1={:?} merit={:?}",
            p.p2,
            p.p1.map(|v| (v * 1e6).round() / 1e6),
            p.merit.map(|v| (v * 100.0).round() / 100.0)
        );
    }
}
