pub mod cpmap;
pub mod error;
pub mod instrument;
pub mod linmat;
pub mod random;
pub mod report;
pub mod frameorbit;
pub mod frames;
pub mod covariant;
pub mod examples;
pub mod json;
