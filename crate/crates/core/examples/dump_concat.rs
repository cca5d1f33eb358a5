use pulseforge::shooting::{solve_concat, ConcatSearch};

fn main() {
    let scan = solve_concat(&ConcatSearch::default());
    println!("ridge entries: {}", scan.ridge.len());
    for c in &scan.ridge {
        println!(
            "ts={:.4} p2={:+.6} p1={:.6} tf={:.6} merit={:.2} robust={}",
            c.t_s, c.adj.p2, c.adj.p1, c.t_f, c.merit, c.robust
        );
    }
    let rows_with_roots = scan
        .points
        .chunks(50)
        .map(|row| row.iter().filter(|p| p.p1.is_some()).count())
        .collect::<Vec<_>>();
    println!("grid roots per ts row: {rows_with_roots:?}");
}
