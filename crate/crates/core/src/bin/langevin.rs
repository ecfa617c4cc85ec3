fn main() -> std::process::ExitCode {
    langevin::cli::main()
}
