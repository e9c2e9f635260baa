fn main() {
    std::process::exit(quatop::cli::main_with_args(std::env::args_os()));
}
