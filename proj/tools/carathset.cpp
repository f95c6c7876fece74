#include "cli/app.hpp"

int main(int argc, char** argv) { return carathset::cli::run(argc, argv); }
