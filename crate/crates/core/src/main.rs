fn main() -> std::process::ExitCode {
    rinorm::cli::main_with_args(std::env::args_os())
}
