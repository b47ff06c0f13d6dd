fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("QSHJE_LOG")).init();
    std::process::exit(qsep::cli::run(std::env::args_os()));
}
