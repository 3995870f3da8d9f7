fn main() {
    std::process::exit(weilhecke_cli::run(std::env::args_os()));
}
