fn main() {
    std::process::exit(sgp_harness::cli::main_entry(std::env::args_os()));
}
