fn main() -> std::process::ExitCode {
    shla::cli::main()
}
