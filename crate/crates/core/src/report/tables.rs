use std::io::Write;

use crate::era::fmt_num;
use crate::error::Result;
use crate::mms::BranchSample;

/// `Omega,a0,psi0,branch,stable,P_avg,CWR` rows.
pub fn write_branch_csv<W: Write>(mut out: W, rows: &[BranchSample]) -> Result<()> {
    writeln!(out, "Omega,a0,psi0,branch,stable,P_avg,CWR")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_num(r.omega),
            fmt_num(r.state.a0),
            fmt_num(r.state.psi0),
            r.state.branch,
            r.state.stable,
            fmt_num(r.p_avg),
            fmt_num(r.cwr)
        )?;
    }
    Ok(())
}
