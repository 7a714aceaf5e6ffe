fn main() {
    std::process::exit(borel_stein::cli::run(std::env::args_os()));
}
