fn main() -> std::process::ExitCode {
    polyzeta::cli::main_with_args(std::env::args_os())
}
