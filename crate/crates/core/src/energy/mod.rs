mod harvest;
mod io;
mod modes;
mod profile;
mod storage;

pub use harvest::*;
pub use io::*;
pub use modes::*;
pub use profile::*;
pub use storage::*;
