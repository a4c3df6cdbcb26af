//! Write a random state and POVM to JSON and read them back bit for bit.

use qdiscord::io::{povm_from_str, povm_to_string, state_from_str, state_to_string};
use qdiscord::states::{random_density, random_povm};
use qdiscord::{Result, Rng};

fn main() -> Result<()> {
    let mut rng = Rng::new(1);
    let rho = random_density(&[2, 2], 2, &mut rng)?;
    let povm = random_povm(2, 3, true, &mut rng)?;

    let text = state_to_string(&rho);
    print!("{text}");
    let back = state_from_str(&text)?;
    let same = back
        .matrix()
        .as_slice()
        .iter()
        .zip(rho.matrix().as_slice())
        .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
    println!("state round trip exact: {same}");

    let text = povm_to_string(&povm);
    let back = povm_from_str(&text)?;
    println!(
        "POVM round trip identical text: {}",
        povm_to_string(&back) == text
    );
    Ok(())
}
