pub mod analysis;
pub mod cds;
pub mod cli;
pub mod crypto;
pub mod flood;
pub mod proto;
pub mod sim;
pub mod udg;
