use cubecover::cli;

fn main() {
    std::process::exit(cli::run());
}
