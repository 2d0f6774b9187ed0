fn main() {
    let t = std::time::Instant::now();
    let w = critmet::eigh_bench(2048);
    println!("2048 eigh: {:?} (w0={})", t.elapsed(), w);
    let t = std::time::Instant::now();
    let w = critmet::eigh_bench(512);
    println!("512 eigh: {:?} (w0={})", t.elapsed(), w);
}
