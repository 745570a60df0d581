fn main() {
    std::process::exit(sphere_ricci::cli::main_with_args(std::env::args_os()));
}
