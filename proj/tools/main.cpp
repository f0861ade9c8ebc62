#include "cli.hpp"

int main(int argc, char** argv) { return bic::cli::run(argc, argv); }
