//! Write a field with provenance to PFLD and read it back.

use paracalc::io::{read_field, sidecar_path, write_field, Provenance};
use paracalc::stochastic::{mollify, sample_white_noise, Mollifier};
use paracalc::{Result, TorusGrid};

fn main() -> Result<()> {
    let grid = TorusGrid::new(2, 64)?;
    let xi = mollify(&sample_white_noise(grid, 42), 0.1, Mollifier::Fejer);
    let path = std::env::temp_dir().join("paracalc-xi.pfld");
    let prov = Provenance {
        seed: Some(42),
        eps: Some(0.1),
        kernel: Some("fejer".into()),
        component: Some("xi".into()),
        ..Provenance::default()
    };
    write_field(&path, &xi, prov)?;
    let back = read_field(&path)?;
    println!("round trip exact: {}", back == xi);
    println!("{}", std::fs::read_to_string(sidecar_path(&path))?);
    Ok(())
}
