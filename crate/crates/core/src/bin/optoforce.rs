fn main() {
    std::process::exit(optoforce::io::main_with_args(std::env::args_os()));
}
