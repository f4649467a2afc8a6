fn main() {
    std::process::exit(hyperconf_cli::run(std::env::args_os()));
}
