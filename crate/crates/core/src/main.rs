fn main() -> std::process::ExitCode {
    sdbc::cli::main()
}
