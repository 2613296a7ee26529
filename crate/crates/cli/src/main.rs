fn main() {
    std::process::exit(dispersal_cli::dispatch(std::env::args_os()));
}
