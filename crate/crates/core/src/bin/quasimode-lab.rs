fn main() {
    std::process::exit(quasimode_lab::lab::cli_main(std::env::args_os()));
}
