//! Seeded generator of expressions in the coefficient syntax.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DIM: usize = 4;

fn lin(rng: &mut ChaCha8Rng) -> String {
    loop {
        let m: Vec<i64> = (0..DIM).map(|_| if rng.gen_bool(0.5) { rng.gen_range(-3..=3) } else { 0 }).collect();
        if m.iter().all(|&c| c == 0) {
            continue;
        }
        let mut out = String::new();
        for (i, &c) in m.iter().enumerate().filter(|(_, c)| **c != 0) {
            let sign = if c < 0 { "-" } else if out.is_empty() { "" } else { "+" };
            let mag = c.abs();
            let body = if mag == 1 && rng.gen_bool(0.5) { format!("x{}", i + 1) } else { format!("{mag}*x{}", i + 1) };
            out.push_str(&format!("{}{sign}{body}", if out.is_empty() { "" } else { " " }));
        }
        return out;
    }
}

fn atom(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..3) {
        0 => {
            let n = rng.gen_range(0..=9);
            if rng.gen_bool(0.5) {
                format!("{n}/{}", rng.gen_range(1..=5))
            } else {
                n.to_string()
            }
        }
        1 => format!("sin({})", lin(rng)),
        _ => format!("cos({})", lin(rng)),
    }
}

fn expr(rng: &mut ChaCha8Rng, depth: u32) -> String {
    if depth == 0 {
        return atom(rng);
    }
    match rng.gen_range(0..5) {
        0 => atom(rng),
        1 => format!("{} + {}", expr(rng, depth - 1), expr(rng, depth - 1)),
        2 => format!("{} - {}", expr(rng, depth - 1), expr(rng, depth - 1)),
        3 => format!("({})*{}", expr(rng, depth - 1), atom(rng)),
        _ => format!("-({})", expr(rng, depth - 1)),
    }
}

/// `count` expressions from a fixed seed.
pub fn corpus(count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| expr(&mut rng, 3)).collect()
}

/// `count` points of `[0, 2π)^DIM`.
pub fn sample_points(count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..DIM).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect()).collect()
}
