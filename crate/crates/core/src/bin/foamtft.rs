fn main() -> std::process::ExitCode {
    foamtft::cli::main_with_args()
}
