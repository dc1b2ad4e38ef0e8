fn main() {
    std::process::exit(qcmrf::cli::dispatch(std::env::args_os()));
}
