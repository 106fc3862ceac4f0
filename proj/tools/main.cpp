#include "cli.hpp"

int main(int argc, char** argv) { return zrlj::cli::run(argc, argv); }
