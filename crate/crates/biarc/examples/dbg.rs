use biarc::oracle::{oracle_search, OracleTarget};
use biarc::*;
use std::time::Instant;

fn check(h: &Digraph, tag: &str) -> bool {
    let built = match build_min_ordering(h) {
        Ok(r) => r,
        Err(e) => {
            println!("BUILDER ERROR [{tag}] on {:?}: {e}", h.arcs());
            return false;
        }
    };
    let oracle = oracle_search(h, OracleTarget::MinOrdering).unwrap();
    let agree = matches!(
        (&built, &oracle),
        (RecognitionResult::MinOrdering(_), Some(_)) | (RecognitionResult::Obstruction(_), None)
    );
    if !agree {
        println!("DISAGREE [{tag}] on {:?}", h.arcs());
        return false;
    }
    true
}

fn main() {
    let t0 = Instant::now();
    let mut bad = 0usize;
    // exhaustive n = 4: all 65536 labeled digraphs
    let n = 4usize;
    for mask in 0u64..1 << (n * n) {
        let arcs = (0..n * n).filter(|i| mask >> i & 1 == 1).map(|i| (i / n, i % n));
        let h = Digraph::new(n, arcs).unwrap();
        if !check(&h, &format!("exh4 {mask}")) {
            bad += 1;
            if bad > 3 { return; }
        }
    }
    println!("exhaustive n=4 done in {:?}, {bad} bad", t0.elapsed());

    // reflexive and bigraph families, denser sampling
    for n in 4..=8usize {
        for i in 0..400u64 {
            let density = 0.1 + 0.09 * ((i % 10) as f64);
            let h = gen_random_digraph(n, density, 31_000_000 * n as u64 + i,
                GenFlags { reflexive: true, ..Default::default() });
            if !check(&h, &format!("refl n={n} i={i}")) { bad += 1; if bad > 3 { return; } }
            let h = gen_random_digraph(n, density, 37_000_000 * n as u64 + i,
                GenFlags { bigraph: true, ..Default::default() });
            if !check(&h, &format!("bigr n={n} i={i}")) { bad += 1; if bad > 3 { return; } }
        }
        println!("families n={n} done");
    }
    println!("ALL DONE in {:?}, {bad} bad", t0.elapsed());
}
