fn main() { std::process::exit(digitdrift::cli::run(std::env::args_os())); }
