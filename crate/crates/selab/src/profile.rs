use selab_core::catalog;

use crate::error::RunError;
use crate::report::num;

/// Warp profile of a warped catalog chart as CSV `r,f,f_prime,K_r`, keeping
/// every `every`-th node.
pub fn warp_profile_csv(id: &str, every: usize) -> Result<String, RunError> {
    let w = catalog::warped_chart(id).map_err(|e| RunError::Config(e.to_string()))?;
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    out.write_record(["r", "f", "f_prime", "K_r"]).expect("in-memory csv");
    for (r, f, df, k) in w.profile.table().step_by(every.max(1)) {
        out.write_record([num(r), num(f), num(df), num(k)]).expect("in-memory csv");
    }
    Ok(String::from_utf8(out.into_inner().expect("in-memory csv")).expect("csv is utf-8"))
}
