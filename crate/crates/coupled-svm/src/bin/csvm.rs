fn main() {
    std::process::exit(coupled_svm::cli::main_entry());
}
