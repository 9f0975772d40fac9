fn main() {
    std::process::exit(rainbow_core::cli::dispatch(std::env::args_os()));
}
