fn main() -> std::process::ExitCode {
    help_core::cli::main()
}
