fn main() -> std::process::ExitCode {
    helios::cli::main()
}
