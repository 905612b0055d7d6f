//! Render the four benchmark targets as graymaps and show how similar they
//! are to each other.
//!
//! cargo run --example make_targets -- [size] [out_dir]

use std::path::PathBuf;

use morphogrid::flags::{make_target, similarity, GrayImage, PgmFormat, TargetKind};

fn main() {
    let mut args = std::env::args().skip(1);
    let size: usize = args.next().map_or(32, |s| s.parse().expect("size"));
    let out = PathBuf::from(args.next().unwrap_or_else(|| "targets".into()));
    std::fs::create_dir_all(&out).expect("create output directory");

    let targets: Vec<(TargetKind, GrayImage)> = TargetKind::ALL
        .into_iter()
        .map(|k| (k, make_target(k, size, size).unwrap()))
        .collect();
    for (kind, image) in &targets {
        let path = out.join(format!("{kind}.pgm"));
        image.save_pgm(&path, PgmFormat::Plain).unwrap();
        assert_eq!(&GrayImage::load_pgm(&path).unwrap(), image);
        println!("{:10} {} levels -> {}", kind.name(), image.distinct_levels(), path.display());
    }

    print!("\n{:10}", "");
    for (k, _) in &targets {
        print!("{:>10}", k.name());
    }
    println!();
    for (a, ia) in &targets {
        print!("{:10}", a.name());
        for (_, ib) in &targets {
            print!("{:>10.4}", similarity(ia, ib).unwrap());
        }
        println!();
    }
}
