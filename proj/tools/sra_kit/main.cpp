#include "commands.hpp"

int main(int argc, char** argv) { return sra::cli::run(argc, argv); }
