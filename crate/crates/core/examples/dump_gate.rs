use pulseforge::shooting::{solve_not_gate, GateSearch, UfClass};

fn main() {
    let cfg = GateSearch {
        // small grid around the optimum for a quick look
        p2_lo: -1.75,
        p2_hi: -1.65,
        p2_points: 9,
        pe_lo: -0.02,
        pe_hi: 0.02,
        pe_points: 5,
        include_2k_branch: false,
        ..GateSearch::default()
    };
    let scan = solve_not_gate(&cfg);
    println!("candidates: {}", scan.candidates.len());
    for c in scan
        .candidates
        .iter()
        .filter(|c| c.uf_class == UfClass::TwoKPlusU0)
        .take(14)
    {
        println!(
            "p1={:.6} p2={:+.6} pe={:+.4} tf={:.5} infid={:.3e} |F|={:.3e} |E|={:.3e} coeff={:.3e} robust={}",
            c.adj.p1, c.adj.p2, c.adj.pe, c.t_f, c.infidelity, c.f_residual, c.e_residual,
            c.alpha2_coeff, c.robust
        );
    }
}
