mod curves;
mod mc;
mod verify;

pub use curves::{edges, outage_cmd, pdf, rate, weights};
pub use mc::{mc, McFiles};
pub use verify::{run_verify, Family, VerifyReport};
