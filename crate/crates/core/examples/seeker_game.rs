//! The hide-and-seek game: how many queries a seeker needs to find k hidden
//! Trojans among n nodes, simulated and compared with k(n+1)/(k+1).
//!
//!     cargo run --example seeker_game

use trojan_forge::analytics::{expected_game_length, seek_simulate, Strategy};

fn main() {
    let n = 100;
    println!("{:>3} {:>10} {:>8} {:>10}", "k", "simulated", "stderr", "expected");
    for k in [1, 2, 5, 10, 50, 100] {
        let s = seek_simulate(n, k, Strategy::Uniform, Strategy::Uniform, 50_000, 3, n as u64).unwrap();
        println!("{k:>3} {:>10.3} {:>8.3} {:>10.3}", s.mean, s.std_error, expected_game_length(n, k));
    }

    // a budget-limited seeker stops early and pays the whole budget
    let s = seek_simulate(n, 3, Strategy::Uniform, Strategy::Uniform, 50_000, 3, 40).unwrap();
    println!("budget 40, k = 3: mean {:.2}, {} of {} games unfinished", s.mean, s.exhausted, s.trials);

    // with nothing hidden the seeker cannot stop before the budget is spent
    let s = seek_simulate(n, 0, Strategy::Uniform, Strategy::Uniform, 1_000, 3, 25).unwrap();
    println!("k = 0: every game costs {:?}", s.histogram.keys().collect::<Vec<_>>());

    // a predictable hider loses to a seeker who guesses the pattern
    let s = seek_simulate(n, 5, Strategy::Sequential, Strategy::Sequential, 10, 3, n as u64).unwrap();
    println!("sequential hider vs sequential seeker, k = 5: L = {}", s.mean);
}
