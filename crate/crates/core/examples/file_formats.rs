use hklattice::cli::resolve;
use hklattice::files::{parse_group_file, parse_lattice_file, print_group_file, print_lattice_file};

const NS: &str = r#"{
  "label": "NS",
  "gram": [
    [4, 2],
    [2, -2]
  ]
}
"#;

const SWAP: &str = r#"{
  "label": "swap",
  "lattice": {
    "gram": "U"
  },
  "generators": [
    [
      [0, 1],
      [1, 0]
    ]
  ]
}
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = parse_lattice_file(NS)?;
    assert_eq!(print_lattice_file(&f), NS);
    let l = resolve(&f, "ns")?;
    println!("{}: rank {}, det {}", l.label, l.lattice.rank(), l.lattice.det());

    let g = parse_group_file(SWAP)?;
    assert_eq!(print_group_file(&g), SWAP);
    println!("{} generator(s) round-trip byte for byte", g.generators.len());
    print!("{}", print_lattice_file(&f));
    Ok(())
}
