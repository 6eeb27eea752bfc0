#include "infocycle/cli.hpp"

int main(int argc, char** argv) { return infocycle::cli::dispatch(argc, argv); }
