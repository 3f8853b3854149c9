pub mod bell;
pub mod classicalize;
pub mod cli;
pub mod composites;
pub mod exactlp;
pub mod morphisms;
pub mod outcome;
pub mod testspace;
pub mod weights;
