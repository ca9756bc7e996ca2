pub mod algebra;
pub mod automaton;
pub mod boolean_ops;
pub mod equiv;
pub mod expand;
pub mod json;
pub mod normal;
pub mod regex;
pub mod single_valued;
