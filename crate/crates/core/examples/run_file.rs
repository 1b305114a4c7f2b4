use std::path::Path;

use trsw::cli::run_cli;
use trsw::io::{read_slice, read_snapshot};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("trsw_run_file_example");
    std::fs::create_dir_all(&dir)?;
    let cfg = dir.join("shear.cfg");
    std::fs::write(
        &cfg,
        "scenario = shear_flow\nnx = 64\nny = 64\ntfinal = 0.5\nsnapshots = 0.25\nscheme = apdffv\n",
    )?;
    let out = dir.join("out");
    let code = run_cli([
        "trsw",
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--cfl",
        "0.2",
        "--out",
        out.to_str().unwrap(),
    ]);
    println!("trsw run exited with {code}");

    for i in 0..3 {
        let p = out.join(format!("snapshot_{i:03}.csv"));
        if !Path::new(&p).exists() {
            break;
        }
        let snap = read_snapshot(&p)?;
        let sl = read_slice(out.join(format!("slice_{i:03}_x.csv")))?;
        let h = sl.column("h").expect("h column");
        let (lo, hi) = h
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        println!("t = {:.3}: h along the centre line in [{lo:.6}, {hi:.6}]", snap.t);
    }
    Ok(())
}
