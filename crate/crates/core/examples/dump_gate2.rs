use pulseforge::shooting::{candidate_score, solve_not_gate, GateSearch, UfClass};

fn main() {
    let cfg = GateSearch {
        refine: false,
        include_2k_branch: false,
        ..GateSearch::default()
    };
    let scan = solve_not_gate(&cfg);
    println!("candidates: {}", scan.candidates.len());
    let mut by_score: Vec<_> = scan
        .candidates
        .iter()
        .filter(|c| c.uf_class == UfClass::TwoKPlusU0)
        .collect();
    by_score.sort_by(|a, b| candidate_score(a).total_cmp(&candidate_score(b)));
    for c in by_score.iter().take(12) {
        println!(
            "score={:.3e} p1={:.6} p2={:+.6} pe={:+.4} tf={:.5} infid={:.3e} coeff={:.3e}",
            candidate_score(c), c.adj.p1, c.adj.p2, c.adj.pe, c.t_f, c.infidelity, c.alpha2_coeff
        );
    }
}
