pub mod analytic;
pub mod rmt;
pub mod verify;
