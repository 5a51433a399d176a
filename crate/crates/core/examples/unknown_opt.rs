//! How elements are routed to the instances of the guess families.

use dynsub::{GuessMode, Router};

fn main() -> dynsub::Result<()> {
    let k = 4;
    let opt = Router::new(GuessMode::Opt, k, 0.5)?;
    let max = Router::new(GuessMode::Max, k, 0.5)?;
    for v in [0.3, 1.0, 7.5, 1000.0] {
        let (lo, hi) = opt.route(v).expect("positive values route");
        println!(
            "f(e) = {v:7.1}: OPT guesses {:.2}..{:.2} (indices {lo}..{hi}), MAX indices {:?}",
            opt.guess(lo),
            opt.guess(hi),
            max.route(v)
        );
    }
    println!(
        "width bounds: OPT {}, MAX {}",
        opt.width_bound(),
        max.width_bound()
    );

    let mut clamped = opt.clone();
    clamped.clamp = Some((0, 5));
    println!(
        "clamped to 0..=5, 1000.0 routes to {:?}",
        clamped.route(1000.0)
    );
    Ok(())
}
