#include "cloudcast_cli.hpp"

int main(int argc, char** argv) { return cloudcast::cli::run(argc, argv); }
