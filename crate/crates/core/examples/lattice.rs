//! The lattice of system quality for three parts and three priority layers:
//! the ten layer-count vectors of one w-plane and their cover relation.

use morphsynth::{dominates_quality, Dominance, QualityVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut plane = Vec::new();
    for a in (0..=3u32).rev() {
        for b in (0..=3 - a).rev() {
            plane.push(QualityVector::new(3, vec![a, b, 3 - a - b]));
        }
    }
    let above = |x: &QualityVector, y: &QualityVector| dominates_quality(x, y).map(|d| d == Dominance::StrictlyDominates);
    println!("{} nodes per w-plane", plane.len());
    for x in &plane {
        let mut covered = Vec::new();
        for y in &plane {
            if above(x, y)? {
                let mut direct = true;
                for z in &plane {
                    if above(x, z)? && above(z, y)? {
                        direct = false;
                    }
                }
                if direct {
                    covered.push(y.to_string());
                }
            }
        }
        println!("{x} covers {}", if covered.is_empty() { "nothing".into() } else { covered.join(", ") });
    }
    println!("\nincomparable example: (3;2,0,1) vs (3;1,2,0) -> {:?}", dominates_quality(&"(3;2,0,1)".parse()?, &"(3;1,2,0)".parse()?)?);
    Ok(())
}
