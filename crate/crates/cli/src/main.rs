fn main() -> std::process::ExitCode {
    ltlcheck::app::main()
}
