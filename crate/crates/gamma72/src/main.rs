fn main() {
    // CLI filled in once the library surface is complete.
    eprintln!("gamma72: not yet wired");
    std::process::exit(2);
}
