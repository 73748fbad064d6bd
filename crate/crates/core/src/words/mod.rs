//! Infinite and finite digit words: mechanical words over irrational
//! slopes, factor statistics, and the balance certificate machinery.

pub mod analysis;
pub mod mechanical;
pub mod word;

pub use analysis::{
    complexity, detect_period, factor_set, frequency, is_balanced, longest_run, slope_of,
    Balance, PalindromeWitness,
};
pub use mechanical::{
    characteristic, fibonacci_word, lower_mechanical, shifted_intercept, upper_mechanical,
};
pub use word::{DigitWord, LexVerdict};
