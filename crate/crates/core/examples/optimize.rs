//! Search a small neighbourhood of the design space and print the top designs.
//!
//! The full default space has over a million candidates; run it through the
//! CLI (`exosynth optimize --out dir`) in release mode.

use exosynth::config::reference_geometry;
use exosynth::optimizer::{optimize, EvalContext, ParamRange, SearchSpace};

fn main() -> exosynth::Result<()> {
    let geom = reference_geometry();
    let space = SearchSpace {
        ranges: [
            ParamRange::new(35.0, 39.0),
            ParamRange::new(16.0, 17.0),
            ParamRange::new(10.0, 12.0),
            ParamRange::new(30.0, 34.0),
            ParamRange::new(28.0, 32.0),
            ParamRange::new(40.0, 44.0),
        ],
        step: 1.0,
    };
    let opt = optimize(&space, &geom, &EvalContext::default(), 0)?;
    println!(
        "{} candidates, {} pass the linear filter, {} feasible",
        opt.total, opt.phase1_passed, opt.phase2_passed
    );
    println!("p spread {:.3}", opt.p_spread());
    for r in opt.ranked.iter().take(5) {
        println!("#{:<5} {:?}  p = {:.4}", r.index, r.lengths, r.p.unwrap());
    }
    Ok(())
}
