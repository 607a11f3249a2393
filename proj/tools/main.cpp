#include "eigenpoint/cli.hpp"

int main(int argc, char** argv) { return eigenpoint::cli::run(argc, argv); }
