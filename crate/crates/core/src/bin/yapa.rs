fn main() { std::process::exit(yapa::cli::main()); }
