#include "cli.hpp"

int main(int argc, char** argv) { return mmnn::cli::run(argc, argv); }
