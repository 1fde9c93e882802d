fn main() {
    std::process::exit(gl_vortex::cli::main_with_args(std::env::args_os()));
}
