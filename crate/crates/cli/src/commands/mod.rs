pub mod advise;
pub mod estimate;
pub mod evaluate;
pub mod regime;
pub mod simulate;
pub mod tent_example;
pub mod validate;
pub mod yu_check;
