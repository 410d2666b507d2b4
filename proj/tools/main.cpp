#include "homograph/cli.hpp"

int main(int argc, char** argv) { return homograph::cli::run(argc, argv); }
