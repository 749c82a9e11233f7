#include "cli_app.hpp"

int main(int argc, char** argv) { return ksc::cli::run_cli(argc, argv); }
