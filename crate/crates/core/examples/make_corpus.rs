//! Writes procedural aerial scenes as 16-bit PNGs, a stand-in corpus for
//! `lapjitter synth`.
//!
//! cargo run --example make_corpus -- <dir> [count] [height] [width]

use std::path::PathBuf;

use lapjitter::{io, scene};

fn main() -> lapjitter::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "corpus".into()));
    let count: usize = args.next().map_or(4, |s| s.parse().expect("count"));
    let height: usize = args.next().map_or(960, |s| s.parse().expect("height"));
    let width: usize = args.next().map_or(1280, |s| s.parse().expect("width"));
    for i in 0..count {
        let img = scene::aerial_scene(height, width, i as u64);
        let path = dir.join(format!("scene_{i:03}.png"));
        io::write_png16(&path, &img)?;
        println!("{}", path.display());
    }
    Ok(())
}
