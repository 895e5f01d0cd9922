fn main() {
    std::process::exit(affmed_bench::cli::run(std::env::args_os()));
}
