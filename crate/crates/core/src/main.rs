fn main() {
    std::process::exit(mlhr_opt::cli::run(std::env::args_os()));
}
