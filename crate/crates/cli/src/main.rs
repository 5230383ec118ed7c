fn main() {
    std::process::exit(fluidgeom_cli::run(std::env::args_os()));
}
