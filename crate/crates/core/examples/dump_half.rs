fn main() {
    let cfg = pulseforge::shooting::HalfSearch::default();
    let cands = pulseforge::shooting::solve_half_transfer(&cfg);
    println!("total candidates: {}", cands.len());
    for c in cands.iter().take(12) {
        println!(
            "p1={:.6} p2={:+.6} beta={:?} tf={:.5} class={:?} infid={:.3e} |F|={:.4e} E={:.4e} robust={} verified={}",
            c.adj.p1,
            c.adj.p2,
            c.beta.map(|b| b / std::f64::consts::PI),
            c.t_f,
            c.uf_class,
            c.infidelity,
            c.f_residual,
            c.e_residual,
            c.robust,
            c.verified
        );
    }
}
