pub mod comp;
pub mod completion;
pub mod formula;
pub mod modelcheck;
pub mod parser;
pub mod puzzle;
pub mod reverse;
pub mod solve;
pub mod sorts;
pub mod syntax;
pub mod term;
pub mod tightness;
