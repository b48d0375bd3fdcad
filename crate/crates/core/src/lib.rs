//! Prime-representing recurrences `a(n+1) = f(a(n))` whose rounded iterates
//! are all prime: rigorous interval arithmetic, probable-prime search, chain
//! construction and seed recovery, annealing search and prime forests.

pub mod bigreal;
pub mod primality;
pub mod chains;
pub mod constants;
pub mod store;
pub mod search;
pub mod trees;
