fn main() {
    std::process::exit(usv_mission::cli::run_cli(std::env::args_os()));
}
