fn main() {
    std::process::exit(hermite_fock::cli::run_from_args(std::env::args_os()));
}
