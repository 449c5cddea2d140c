fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(supershift_lab::run(&argv) as i32);
}
