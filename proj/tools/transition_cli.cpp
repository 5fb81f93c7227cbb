#include "transition/cli.hpp"

int main(int argc, char** argv) { return transition::cli::run(argc, argv); }
