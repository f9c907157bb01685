//! Fit traces: one tab-separated line per recorded step.

use std::io::Write;

use acttopic_core::catmix::{Convergence, FitTrace};

use super::fmt_f64;
use crate::error::Result;

pub fn write_em_trace(w: &mut dyn Write, trace: &FitTrace) -> Result<()> {
    writeln!(w, "#trace v1 model=catmix quantity=log_likelihood")?;
    for (i, ll) in trace.log_likelihoods.iter().enumerate() {
        writeln!(w, "{i}\t{}", fmt_f64(*ll))?;
    }
    let reason = match trace.convergence {
        Convergence::Tolerance => "tolerance",
        Convergence::MaxIterations => "max_iterations",
    };
    writeln!(
        w,
        "#end iterations={} convergence={reason}",
        trace.iterations
    )?;
    Ok(())
}

/// Sweep log of one or more LDA chains: `(chain, sweep, log joint)`.
pub fn write_sweep_log(
    w: &mut dyn Write,
    entries: &[(usize, usize, f64)],
    chosen_chain: usize,
) -> Result<()> {
    writeln!(w, "#trace v1 model=lda quantity=log_joint")?;
    for (chain, sweep, lj) in entries {
        writeln!(w, "{chain}\t{sweep}\t{}", fmt_f64(*lj))?;
    }
    writeln!(w, "#end chosen_chain={chosen_chain}")?;
    Ok(())
}
